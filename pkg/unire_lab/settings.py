from pathlib import Path
from dotenv import load_dotenv
import os

load_dotenv()

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# Only used by Django internals; the lab serves nothing over the network.
SECRET_KEY = os.getenv('DJANGO_SECRET_KEY', 'unire-lab-local-only')

DEBUG = os.getenv('DJANGO_DEBUG', '0') == '1'

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    # Third party apps
    'rest_framework',
    # local apps
    'common',
    'label_table',
    'biaffine_net',
    'objectives',
    'decoder',
    'evaluation',
    'corpus',
]

# No app persists rows; tensors, corpora and checkpoints live in files.
DATABASES = {}

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

# Internationalization
LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True

# REST Framework configuration (serializers/renderers only)
REST_FRAMEWORK = {
    'UNICODE_JSON': True,
    'COMPACT_JSON': True,
    'STRICT_JSON': True,
}


def _optional_int(name):
    value = os.getenv(name)
    return int(value) if value not in (None, '') else None


# Model, training and decoding defaults
UNIRE = {
    'SEED': _optional_int('UNIRE_SEED'),
    'HIDDEN_SIZE': int(os.getenv('UNIRE_HIDDEN_SIZE', 150)),
    'EMBEDDING_SIZE': int(os.getenv('UNIRE_EMBEDDING_SIZE', 64)),
    'MLP_DEPTH': int(os.getenv('UNIRE_MLP_DEPTH', 1)),
    'LOGIT_DROPOUT': float(os.getenv('UNIRE_LOGIT_DROPOUT', 0.2)),
    'LEARNING_RATE': float(os.getenv('UNIRE_LEARNING_RATE', 5e-5)),
    'WEIGHT_DECAY': float(os.getenv('UNIRE_WEIGHT_DECAY', 1e-5)),
    'ADAM_BETA1': float(os.getenv('UNIRE_ADAM_BETA1', 0.9)),
    'ADAM_BETA2': float(os.getenv('UNIRE_ADAM_BETA2', 0.9)),
    'ADAM_EPSILON': float(os.getenv('UNIRE_ADAM_EPSILON', 1e-8)),
    'WARMUP_RATIO': float(os.getenv('UNIRE_WARMUP_RATIO', 0.2)),
    'BATCH_SIZE': int(os.getenv('UNIRE_BATCH_SIZE', 32)),
    'MAX_EPOCHS': int(os.getenv('UNIRE_MAX_EPOCHS', 200)),
    'PATIENCE': int(os.getenv('UNIRE_PATIENCE', 20)),
    'THRESHOLD': float(os.getenv('UNIRE_THRESHOLD', 1.4)),
    'DISTANCE_MODE': os.getenv('UNIRE_DISTANCE_MODE', 'squared'),
    'DECODE_SHARD_SIZE': int(os.getenv('UNIRE_DECODE_SHARD_SIZE', 64)),
}


# Celery Configuration
CELERY_BROKER_URL = os.getenv('CELERY_BROKER_URL')
CELERY_RESULT_BACKEND = os.getenv('CELERY_RESULT_BACKEND')
CELERY_ACCEPT_CONTENT = ['json']
CELERY_TASK_SERIALIZER = 'json'
CELERY_RESULT_SERIALIZER = 'json'
# Without a broker every shard runs in-process
CELERY_TASK_ALWAYS_EAGER = not CELERY_BROKER_URL
CELERY_TASK_EAGER_PROPAGATES = True


# Logging
LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{asctime} {levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
    },
    'root': {
        'handlers': ['console'],
        'level': os.getenv('UNIRE_LOG_LEVEL', 'INFO'),
    },
    'loggers': {
        'celery': {
            'level': 'WARNING',
        },
    },
}
