from django.contrib import admin
from django.utils.html import format_html

from .models import KeyGenReport


@admin.register(KeyGenReport)
class KeyGenReportAdmin(admin.ModelAdmin):
    list_display = ['digest_display', 'status_display', 'attempts', 'iterations_used',
                    'final_loss', 'wall_time_s', 'created_at']
    list_filter = ['success', 'attempts', 'created_at']
    search_fields = ['plaintext_sha256']
    readonly_fields = ['created_at']

    def digest_display(self, obj):
        return format_html('<code>{}</code>', obj.plaintext_sha256[:12])
    digest_display.short_description = 'Plaintext SHA-256'

    def status_display(self, obj):
        """Colored outcome badge"""
        color = 'green' if obj.success else 'red'
        label = 'verified' if obj.success else 'failed'
        return format_html('<span style="color: {};">{}</span>', color, label)
    status_display.short_description = 'Outcome'
