from django.apps import AppConfig


class DrumsConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "drums"
    verbose_name = "Isospectral drums"
