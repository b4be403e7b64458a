# File: featurecodec/settings.py

"""
Django settings for the featurecodec project - split-inference feature codec
"""
from pathlib import Path
from decouple import config

# Project Configuration
PROJECT_NAME = 'FeatureCodec'
PROJECT_VERSION = '1.0'

# Build paths inside the project
BASE_DIR = Path(__file__).resolve().parent.parent

# Security
SECRET_KEY = config('SECRET_KEY', default='featurecodec-local-only')
DEBUG = config('DEBUG', default=False, cast=bool)
ALLOWED_HOSTS = []

# Application definition
INSTALLED_APPS = [
    'tensors.apps.TensorsConfig',
    'fusion.apps.FusionConfig',
    'packing.apps.PackingConfig',
    'signaling.apps.SignalingConfig',
    'rescaling.apps.RescalingConfig',
    'innercodec.apps.InnerCodecConfig',
    'temporal.apps.TemporalConfig',
    'bitstream.apps.BitstreamConfig',
    'pipeline.apps.PipelineConfig',
    'metrics.apps.MetricsConfig',
]

# Database (recorded sweep runs only)
DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': config('FCM_DATABASE', default=str(BASE_DIR / 'db.sqlite3')),
    }
}

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

# Internationalization
LANGUAGE_CODE = 'en-us'
TIME_ZONE = 'UTC'
USE_I18N = False
USE_TZ = True

# Logging
FCM_LOG_LEVEL = config('FCM_LOG_LEVEL', default='INFO')

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'codec': {
            'format': '{asctime} {levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'codec',
        },
    },
    'root': {
        'handlers': ['console'],
        'level': 'WARNING',
    },
    'loggers': {
        app: {'handlers': ['console'], 'level': FCM_LOG_LEVEL, 'propagate': False}
        for app in (
            'featurecodec', 'tensors', 'fusion', 'packing', 'signaling', 'rescaling',
            'innercodec', 'temporal', 'bitstream', 'pipeline', 'metrics',
        )
    },
}

# ========== CODEC DEFAULTS ==========
# Used when neither a config file nor a CLI flag sets a field
FCM_DEFAULT_MODE = config('FCM_DEFAULT_MODE', default='full')
FCM_DEFAULT_BIT_DEPTH = config('FCM_DEFAULT_BIT_DEPTH', default=10, cast=int)
FCM_DEFAULT_REFRESH_PERIOD = config('FCM_DEFAULT_REFRESH_PERIOD', default=32, cast=int)
FCM_DEFAULT_CODEC = config('FCM_DEFAULT_CODEC', default=0, cast=int)
FCM_DEFAULT_FUSION = config('FCM_DEFAULT_FUSION', default=1, cast=int)
FCM_DEFAULT_FPS = config('FCM_DEFAULT_FPS', default='30/1')
FCM_DEFAULT_WORKERS = config('FCM_DEFAULT_WORKERS', default=1, cast=int)

# Decoder-side rescaling
FCM_RESCALE_EPSILON = config('FCM_RESCALE_EPSILON', default=1e-8, cast=float)

# Metrics
FCM_PSNR_CAP = config('FCM_PSNR_CAP', default=150.0, cast=float)

# ========== EXTERNAL INNER CODEC ==========
# Templates receive {input}, {output}, {width}, {height}, {bit_depth}
FCM_EXTERNAL_ENCODER_CMD = config('FCM_EXTERNAL_ENCODER_CMD', default='')
FCM_EXTERNAL_DECODER_CMD = config('FCM_EXTERNAL_DECODER_CMD', default='')
FCM_EXTERNAL_POOL_SIZE = config('FCM_EXTERNAL_POOL_SIZE', default=1, cast=int)
FCM_EXTERNAL_TIMEOUT = config('FCM_EXTERNAL_TIMEOUT', default=600, cast=int)
