"""
Django settings for obfuscation_backend project.
"""

import os
from pathlib import Path

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


# Quick-start development settings - unsuitable for production
# See https://docs.djangoproject.com/en/4.2/howto/deployment/checklist/

# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = os.environ.get(
    'DOBF_SECRET_KEY', 'django-insecure-ledger-only-change-in-production'
)

# SECURITY WARNING: don't run with debug turned on in production!
DEBUG = os.environ.get('DOBF_DEBUG', '0') == '1'

ALLOWED_HOSTS = ['localhost', '127.0.0.1']


# Application definition

INSTALLED_APPS = [
    'django.contrib.admin',
    'django.contrib.auth',
    'django.contrib.contenttypes',
    'django.contrib.sessions',
    'django.contrib.messages',
    'django.contrib.staticfiles',

    # Third-party apps
    'rest_framework',

    # Local apps
    'text_codec',
    'seq2seq_core',
    'cipher',
    'keygen',
    'key_store',
    'runner',
    'evaluation',
]

MIDDLEWARE = [
    'django.middleware.security.SecurityMiddleware',
    'django.contrib.sessions.middleware.SessionMiddleware',
    'django.middleware.common.CommonMiddleware',
    'django.middleware.csrf.CsrfViewMiddleware',
    'django.contrib.auth.middleware.AuthenticationMiddleware',
    'django.contrib.messages.middleware.MessageMiddleware',
    'django.middleware.clickjacking.XFrameOptionsMiddleware',
]

ROOT_URLCONF = 'obfuscation_backend.urls'

TEMPLATES = [
    {
        'BACKEND': 'django.template.backends.django.DjangoTemplates',
        'DIRS': [],
        'APP_DIRS': True,
        'OPTIONS': {
            'context_processors': [
                'django.template.context_processors.debug',
                'django.template.context_processors.request',
                'django.contrib.auth.context_processors.auth',
                'django.contrib.messages.context_processors.messages',
            ],
        },
    },
]

WSGI_APPLICATION = 'obfuscation_backend.wsgi.application'


# Database
# The run ledger (cipher records, keygen reports, experiment rows).

DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': os.environ.get('DOBF_LEDGER_DB', BASE_DIR / 'ledger.sqlite3'),
    }
}


# Internationalization
# https://docs.djangoproject.com/en/4.2/topics/i18n/

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = True

USE_TZ = True


# Static files (CSS, JavaScript, Images)
# https://docs.djangoproject.com/en/4.2/howto/static-files/

STATIC_URL = 'static/'
STATIC_ROOT = BASE_DIR / 'staticfiles'

# Default primary key field type
# https://docs.djangoproject.com/en/4.2/ref/settings/#default-auto-field

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

# REST Framework Settings (serializers only; no API is routed)
REST_FRAMEWORK = {
    'COERCE_DECIMAL_TO_STRING': False,
    'DATETIME_FORMAT': '%Y-%m-%d %H:%M:%S',
}

# Logging: diagnostics on stderr, stdout stays machine-readable
LOG_LEVEL = os.environ.get('DOBF_LOG_LEVEL', 'INFO').upper()

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
            'stream': 'ext://sys.stderr',
            'formatter': 'verbose',
        },
    },
    'root': {
        'handlers': ['console'],
        'level': 'WARNING',
    },
    'loggers': {
        app: {'handlers': ['console'], 'level': LOG_LEVEL, 'propagate': False}
        for app in (
            'obfuscation_backend', 'text_codec', 'seq2seq_core', 'cipher',
            'keygen', 'key_store', 'runner', 'evaluation',
        )
    },
}

# Obfuscation Pipeline Settings
SEQ2SEQ_HIDDEN_SIZE = 64  # desk scale; the reference model uses 256
RANDOMNESS_INDEX = 10  # successive weight draws before ciphertext generation
MAX_DECODE_LEN = 100  # ciphertext length cap in characters
LEARNING_RATE = 1e-2  # RMSprop step size for key generation
MAX_ITERATIONS = 2000  # training iterations per keygen attempt
CHECK_INTERVAL = 50  # iterations between round-trip checks
MAX_KEYGEN_ATTEMPTS = 3  # re-seeded retrains before giving up

# Evaluation Settings
STEALTH_TRIALS = 100  # ciphertexts generated per corpus pair
COST_KEYGEN_ITERATIONS = 200  # fixed keygen iterations in the cost sweep
EVAL_JOBS = 1  # worker threads for non-timing trials

SEED_ENV_VAR = 'DOBF_SEED'
