# Generated by Django 5.2.7 on 2026-10-17 09:12

from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='ScenarioRecord',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('source', models.CharField(choices=[('run', 'Single run'), ('sweep', 'Homophily sweep')], default='run', max_length=10)),
                ('sigma', models.FloatField()),
                ('seed', models.IntegerField()),
                ('mean_dist_defender_goal', models.FloatField(blank=True, null=True)),
                ('mean_dist_adversary_goal', models.FloatField(blank=True, null=True)),
                ('final_bimodality', models.FloatField(blank=True, null=True)),
                ('J_a', models.FloatField(blank=True, null=True)),
                ('J_d', models.FloatField(blank=True, null=True)),
                ('error', models.TextField(blank=True)),
                ('config_path', models.CharField(blank=True, max_length=500)),
                ('output_dir', models.CharField(blank=True, max_length=500)),
                ('created_at', models.DateTimeField(auto_now_add=True)),
            ],
            options={
                'ordering': ('-created_at', 'sigma', 'seed'),
                'indexes': [models.Index(fields=['sigma', 'seed'], name='scenario_sigma_seed_idx'), models.Index(fields=['created_at'], name='scenario_created_idx')],
            },
        ),
    ]
