# unire_lab/celery.py
import os
from celery import Celery

# Set the default Django settings module
os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'unire_lab.settings')

# Create Celery instance
app = Celery('unire_lab')

# Load task modules from all registered Django app configs
app.config_from_object('django.conf:settings', namespace='CELERY')

# Auto-discover decode/score shard tasks in all installed apps
app.autodiscover_tasks()
