from django.apps import AppConfig


class ConflictConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'conflict'
    verbose_name = 'Influence-opinion conflicts'
