import copy

from .base import *

DEBUG = False

# Logging
# https://docs.djangoproject.com/en/4.2/topics/logging/#configuring-logging

LOGGING = copy.deepcopy(LOGGING)

LOGGING['handlers']['file'] = {
    'level': os.getenv('GROWTHRATE_LOG_LEVEL', 'INFO'),
    'class': 'logging.FileHandler',
    'filename': os.getenv('GROWTHRATE_LOG_FILE', '/var/log/growthrate.log'),
    'formatter': 'simple',
}

LOGGING['root']['handlers'] = ['console', 'file']
