import math

from django.db import models


class ScenarioRecord(models.Model):
    """One executed (sigma, seed) scenario and its outcome.

    Written by the ``run`` and ``sweep`` commands; the full trace lives on disk
    under ``output_dir``.
    """
    SOURCE_CHOICES = [
        ('run', 'Single run'),
        ('sweep', 'Homophily sweep'),
    ]

    source = models.CharField(max_length=10, choices=SOURCE_CHOICES, default='run')
    sigma = models.FloatField()
    seed = models.IntegerField()
    mean_dist_defender_goal = models.FloatField(null=True, blank=True)
    mean_dist_adversary_goal = models.FloatField(null=True, blank=True)
    final_bimodality = models.FloatField(null=True, blank=True)
    J_a = models.FloatField(null=True, blank=True)
    J_d = models.FloatField(null=True, blank=True)
    error = models.TextField(blank=True)
    config_path = models.CharField(max_length=500, blank=True)
    output_dir = models.CharField(max_length=500, blank=True)
    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        ordering = ('-created_at', 'sigma', 'seed')
        indexes = [
            models.Index(fields=['sigma', 'seed'], name='scenario_sigma_seed_idx'),
            models.Index(fields=['created_at'], name='scenario_created_idx'),
        ]

    def __str__(self):
        state = 'failed' if self.error else 'ok'
        return f"sigma={self.sigma:g} seed={self.seed} ({self.source}, {state})"

    @property
    def failed(self) -> bool:
        return bool(self.error)

    @classmethod
    def from_row(cls, row, source='run', config_path='', output_dir=''):
        """Build (unsaved) from a sweep row or MetricsRecord.sweep_row(); NaN becomes NULL."""
        def num(key):
            value = row.get(key)
            if value is None:
                return None
            value = float(value)
            return None if math.isnan(value) else value

        return cls(
            source=source,
            sigma=float(row['sigma']),
            seed=int(row['seed']),
            mean_dist_defender_goal=num('mean_dist_defender_goal'),
            mean_dist_adversary_goal=num('mean_dist_adversary_goal'),
            final_bimodality=num('final_bimodality'),
            J_a=num('J_a'),
            J_d=num('J_d'),
            error=str(row.get('error') or ''),
            config_path=str(config_path or ''),
            output_dir=str(output_dir or ''),
        )
