from django.contrib import admin
from django.utils.html import format_html

from .models import EvalRecord, StealthRow


@admin.register(EvalRecord)
class EvalRecordAdmin(admin.ModelAdmin):
    list_display = ['plaintext_len', 'ciphertext_len', 'lev_distance', 'char_variation',
                    'encrypt_time_s', 'keygen_time_s', 'seed', 'created_at']
    list_filter = ['created_at']
    readonly_fields = ['created_at']
    date_hierarchy = 'created_at'


@admin.register(StealthRow)
class StealthRowAdmin(admin.ModelAdmin):
    list_display = ['set_id', 'benchmark_distance', 'proposed_mean_distance', 'ratio_display',
                    'mean_normalized_distance', 'trials', 'created_at']
    list_filter = ['flagged', 'created_at']
    search_fields = ['set_id']
    readonly_fields = ['created_at']

    def ratio_display(self, obj):
        """Ratio above 1 means the ciphertexts are further from the source than the benchmark"""
        if obj.ratio is None:
            return format_html('<span style="color: orange;">{}</span>', 'flagged')
        color = 'green' if obj.ratio >= 1 else 'red'
        return format_html('<span style="color: {}; font-weight: bold;">{}</span>',
                           color, f'{obj.ratio:.4f}')
    ratio_display.short_description = 'Ratio'
