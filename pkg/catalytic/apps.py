from django.apps import AppConfig


class CatalyticConfig(AppConfig):
    name = "catalytic"
    verbose_name = "Catalytic machine lab"
