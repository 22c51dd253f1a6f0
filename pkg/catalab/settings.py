"""
Django settings for catalab project.

The project hosts a single app, ``catalytic``, driven from management
commands. There is no database and no HTTP surface.

For more information on this file, see
https://docs.djangoproject.com/en/5.2/topics/settings/

For the full list of settings and their values, see
https://docs.djangoproject.com/en/5.2/ref/settings/
"""

import os
from pathlib import Path

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = os.environ.get(
    "CATALAB_SECRET_KEY", "django-insecure-catalab-local-lab-key-not-for-deployment"
)

DEBUG = os.environ.get("CATALAB_DEBUG", "") == "1"

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    # Third party
    "rest_framework",
    # Local apps
    "catalytic",
]


# Database
# The lab keeps everything in memory; test runs need no database either.

DATABASES = {}


# Internationalization
# https://docs.djangoproject.com/en/5.2/topics/i18n/

LANGUAGE_CODE = "en-us"

TIME_ZONE = "UTC"

USE_I18N = False

USE_TZ = True


# Logging

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'simple': {
            'format': '{levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'simple',
        },
    },
    'loggers': {
        'catalytic': {
            'handlers': ['console'],
            'level': os.environ.get('CATALAB_LOG_LEVEL', 'WARNING'),
            'propagate': False,
        },
    },
}


# Catalytic lab settings; defaults live in catalytic.conf.DEFAULTS
CATALAB = {
    'JOBS': int(os.environ.get('CATALAB_JOBS', '1')),
}
