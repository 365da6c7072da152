from django.apps import AppConfig


class BiaffineNetConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'biaffine_net'
