"""
Django settings for the marvel project.
"""

import os
from pathlib import Path

BASE_DIR = Path(__file__).resolve().parent.parent

SECRET_KEY = os.environ.get('MARVEL_SECRET_KEY', 'marvel-offline-toolkit-not-a-web-service')

DEBUG = False

ALLOWED_HOSTS = []

INSTALLED_APPS = [
    'django.contrib.contenttypes',
    'django.contrib.auth',
    # Third party
    'rest_framework',
    # Local apps
    'acoustics',
    'corpus',
    'pipeline',
    'networks',
    'training',
    'metrics',
    'analysis',
    'experiments',
]

DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': BASE_DIR / 'db.sqlite3',
    }
}

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

#^ Internationalization
LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True


#^ < ==========================MARVEL TOOLKIT========================== >

MARVEL = {
    'DEFAULT_CONFIG': BASE_DIR.parent / 'configs' / 'desk.json',
    'SCHEMA_PATH': BASE_DIR.parent / 'configs' / 'schema.json',
    'LOCK_FILENAME': '.marvel.lock',
    # single intra-op thread + torch deterministic algorithms
    'DETERMINISTIC': True,
    'MATPLOTLIB_BACKEND': 'Agg',
    'REPORT_VERSION': 1,
    'MANIFEST_VERSION': 1,
}


#^ < ==========================LOGGING========================== >

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{asctime} {levelname} {name} {message}',
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
        'level': 'WARNING',
    },
    'loggers': {
        app: {
            'handlers': ['console'],
            'level': os.environ.get('MARVEL_LOG_LEVEL', 'INFO'),
            'propagate': False,
        }
        for app in (
            'acoustics', 'corpus', 'pipeline', 'networks',
            'training', 'metrics', 'analysis', 'experiments',
        )
    },
}
