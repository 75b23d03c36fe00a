from django.contrib import admin
from django.utils.html import format_html

from .models import CipherRecord

PREVIEW_CHARS = 40


@admin.register(CipherRecord)
class CipherRecordAdmin(admin.ModelAdmin):
    list_display = ['digest_display', 'seed', 'randomness_index', 'charset_id',
                    'length_display', 'ciphertext_preview', 'created_at']
    list_filter = ['randomness_index', 'charset_id', 'created_at']
    search_fields = ['plaintext_sha256', 'ciphertext']
    readonly_fields = ['created_at']
    date_hierarchy = 'created_at'

    fieldsets = (
        ('Ciphertext', {
            'fields': ('ciphertext',)
        }),
        ('Provenance', {
            'fields': ('plaintext_sha256', 'seed', 'randomness_index', 'charset_id')
        }),
        ('Model Configuration', {
            'fields': ('config',),
            'classes': ('collapse',)
        }),
        ('Metadata', {
            'fields': ('created_at',),
            'classes': ('collapse',)
        }),
    )

    def digest_display(self, obj):
        """Short plaintext digest"""
        return format_html('<code>{}</code>', obj.plaintext_sha256[:12])
    digest_display.short_description = 'Plaintext SHA-256'

    def length_display(self, obj):
        return f'{obj.ciphertext_len} chars'
    length_display.short_description = 'Length'

    def ciphertext_preview(self, obj):
        """Ciphertext head in monospace"""
        text = obj.ciphertext
        if len(text) > PREVIEW_CHARS:
            text = text[:PREVIEW_CHARS] + '…'
        return format_html('<code>{}</code>', text)
    ciphertext_preview.short_description = 'Ciphertext'
