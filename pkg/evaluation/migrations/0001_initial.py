# Generated by Django 4.2.7

import django.core.validators
from django.db import migrations, models
import obfuscation_backend.fields


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='EvalRecord',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('plaintext_len', models.PositiveIntegerField()),
                ('lev_distance', models.PositiveIntegerField()),
                ('encrypt_time_s', models.FloatField(validators=[django.core.validators.MinValueValidator(0)])),
                ('keygen_time_s', models.FloatField(validators=[django.core.validators.MinValueValidator(0)])),
                ('char_variation', models.PositiveIntegerField(help_text='Distinct characters in the ciphertext')),
                ('ciphertext_len', models.PositiveIntegerField()),
                ('seed', obfuscation_backend.fields.UInt64Field()),
                ('created_at', models.DateTimeField(auto_now_add=True)),
            ],
            options={
                'verbose_name': 'Cost Record',
                'verbose_name_plural': 'Cost Records',
                'ordering': ['plaintext_len', '-created_at'],
            },
        ),
        migrations.CreateModel(
            name='StealthRow',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('set_id', models.CharField(max_length=100)),
                ('benchmark_distance', models.PositiveIntegerField()),
                ('proposed_mean_distance', models.FloatField()),
                ('ratio', models.FloatField(blank=True, help_text='Empty when the benchmark distance is 0', null=True)),
                ('trials', models.PositiveIntegerField()),
                ('mean_normalized_distance', models.FloatField(help_text='Mean of lev(p, c) / max(|p|, |c|)')),
                ('flagged', models.BooleanField(default=False)),
                ('created_at', models.DateTimeField(auto_now_add=True)),
            ],
            options={
                'verbose_name': 'Stealth Row',
                'verbose_name_plural': 'Stealth Rows',
                'ordering': ['set_id', '-created_at'],
            },
        ),
    ]
