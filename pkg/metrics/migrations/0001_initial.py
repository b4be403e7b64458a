# Generated by Django 5.0.8 on 2026-10-18 09:12

import django.db.models.deletion
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='SweepRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('name', models.CharField(max_length=100)),
                ('source', models.CharField(blank=True, max_length=255)),
                ('frame_count', models.IntegerField(default=0)),
                ('shapes', models.CharField(blank=True, max_length=255)),
                ('created_at', models.DateTimeField(auto_now_add=True)),
            ],
            options={
                'ordering': ['-created_at'],
            },
        ),
        migrations.CreateModel(
            name='SweepResult',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('index', models.IntegerField()),
                ('mode', models.IntegerField(choices=[(0, 'baseline'), (1, 'full'), (2, 'simplified')])),
                ('bit_depth', models.IntegerField()),
                ('refresh_period', models.IntegerField()),
                ('codec_id', models.IntegerField()),
                ('codec_params', models.CharField(blank=True, max_length=100)),
                ('fusion_id', models.IntegerField()),
                ('temporal', models.BooleanField(default=False)),
                ('config_line', models.TextField()),
                ('total_bytes', models.IntegerField()),
                ('kbps', models.FloatField()),
                ('header_bytes', models.IntegerField()),
                ('stats_bytes', models.IntegerField()),
                ('minmax_bytes', models.IntegerField()),
                ('framing_bytes', models.IntegerField()),
                ('payload_bytes', models.IntegerField()),
                ('mse', models.FloatField()),
                ('psnr', models.FloatField()),
                ('mean_drift', models.FloatField()),
                ('std_drift', models.FloatField()),
                ('rel_mean_drift', models.FloatField()),
                ('rel_std_drift', models.FloatField()),
                ('proxy_accuracy', models.FloatField()),
                ('run', models.ForeignKey(on_delete=django.db.models.deletion.CASCADE, related_name='results', to='metrics.sweeprun')),
            ],
            options={
                'ordering': ['run', 'index'],
                'unique_together': {('run', 'index')},
            },
        ),
    ]
