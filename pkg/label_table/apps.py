from django.apps import AppConfig


class LabelTableConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'label_table'
