import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'unire_lab.settings')
django.setup()
