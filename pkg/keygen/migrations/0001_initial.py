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
            name='KeyGenReport',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('plaintext_sha256', models.CharField(max_length=64)),
                ('seed', obfuscation_backend.fields.UInt64Field(help_text='Seed of the attempt that produced the key (or of the last attempt)')),
                ('iterations_used', models.PositiveIntegerField(help_text='Training iterations summed over attempts')),
                ('final_loss', models.FloatField(validators=[django.core.validators.MinValueValidator(0)])),
                ('wall_time_s', models.FloatField()),
                ('attempts', models.PositiveIntegerField()),
                ('success', models.BooleanField(default=False)),
                ('created_at', models.DateTimeField(auto_now_add=True)),
            ],
            options={
                'verbose_name': 'Key Generation Report',
                'verbose_name_plural': 'Key Generation Reports',
                'ordering': ['-created_at'],
            },
        ),
    ]
