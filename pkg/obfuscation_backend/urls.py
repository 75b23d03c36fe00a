"""
URL configuration for obfuscation_backend project.

Only the admin is routed: it browses the run ledger. The pipeline itself
is driven through management commands.
"""
from django.contrib import admin
from django.urls import path

urlpatterns = [
    path('admin/', admin.site.urls),
]

# Customize admin site
admin.site.site_header = "Obfuscation Ledger Admin"
admin.site.site_title = "Obfuscation Ledger Portal"
admin.site.index_title = "Cipher records, keys and experiment runs"
