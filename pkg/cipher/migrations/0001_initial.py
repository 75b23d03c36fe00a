# Generated by Django 4.2.7

from django.db import migrations, models
import obfuscation_backend.fields


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='CipherRecord',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('ciphertext', models.TextField(blank=True)),
                ('plaintext_sha256', models.CharField(help_text='Hex SHA-256 of the UTF-8 plaintext', max_length=64)),
                ('seed', obfuscation_backend.fields.UInt64Field()),
                ('randomness_index', models.PositiveIntegerField(default=10)),
                ('charset_id', models.CharField(max_length=100)),
                ('config', models.JSONField(help_text='Seq2SeqConfig snapshot used for the draw')),
                ('created_at', models.DateTimeField(auto_now_add=True)),
            ],
            options={
                'verbose_name': 'Cipher Record',
                'verbose_name_plural': 'Cipher Records',
                'ordering': ['-created_at'],
                'indexes': [models.Index(fields=['plaintext_sha256'], name='cipher_plaintext_sha_idx')],
            },
        ),
    ]
