# File: metrics/models.py

from django.db import models

from signaling.params import SignalingMode
from .bjontegaard import RateAccuracyPoint


class SweepRun(models.Model):
    """A recorded rate-accuracy sweep over one input sequence"""

    name = models.CharField(max_length=100)
    source = models.CharField(max_length=255, blank=True)
    frame_count = models.IntegerField(default=0)
    shapes = models.CharField(max_length=255, blank=True)
    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        ordering = ['-created_at']

    def __str__(self):
        return f"Sweep {self.pk}: {self.name} ({self.results.count()} points)"

    def curve(self, mode=None):
        """Rate-accuracy points ordered by rate, optionally for one signaling mode"""
        results = self.results.all()
        if mode is not None:
            results = results.filter(mode=SignalingMode.from_name(mode))
        return [
            RateAccuracyPoint(result.kbps, result.proxy_accuracy)
            for result in results.order_by('kbps')
        ]


class SweepResult(models.Model):
    """One configuration's row of a sweep"""

    run = models.ForeignKey(SweepRun, on_delete=models.CASCADE, related_name='results')
    index = models.IntegerField()

    # Configuration
    mode = models.IntegerField(choices=SignalingMode.choices)
    bit_depth = models.IntegerField()
    refresh_period = models.IntegerField()
    codec_id = models.IntegerField()
    codec_params = models.CharField(max_length=100, blank=True)
    fusion_id = models.IntegerField()
    temporal = models.BooleanField(default=False)
    config_line = models.TextField()

    # Rate
    total_bytes = models.IntegerField()
    kbps = models.FloatField()
    header_bytes = models.IntegerField()
    stats_bytes = models.IntegerField()
    minmax_bytes = models.IntegerField()
    framing_bytes = models.IntegerField()
    payload_bytes = models.IntegerField()

    # Fidelity
    mse = models.FloatField()
    psnr = models.FloatField()
    mean_drift = models.FloatField()
    std_drift = models.FloatField()
    rel_mean_drift = models.FloatField()
    rel_std_drift = models.FloatField()
    proxy_accuracy = models.FloatField()

    class Meta:
        ordering = ['run', 'index']
        unique_together = ['run', 'index']

    def __str__(self):
        return f"{self.get_mode_display()} q={self.bit_depth}: {self.kbps:.2f} kbps, {self.proxy_accuracy:.2f} dB"
