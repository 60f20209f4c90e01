import os

# Base dir path
BASE_DIR = os.path.dirname(
    os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

# No web surface is served; the key only satisfies Django's startup checks.
SECRET_KEY = os.getenv('SECRET_KEY', 'growthrate-insecure-local-key')

DEBUG = False if os.getenv('DEBUG') == 'False' else True

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS_THIRD_PARTIES = [
    'rest_framework',
]

INSTALLED_APPS_LOCAL = [
    'growthrate',
    'core',
    'periodic',
    'closedform',
    'monodromy',
    'spectral',
    'dde',
    'chrono',
    'experiments',
]

INSTALLED_APPS = INSTALLED_APPS_THIRD_PARTIES + INSTALLED_APPS_LOCAL

MIDDLEWARE = []

# Nothing is persisted; experiment results go to CSV/JSON files.
DATABASES = {}

DEFAULT_AUTO_FIELD = 'django.db.models.AutoField'

USE_TZ = True

TIME_ZONE = 'UTC'


# Quadrature and root finding

QUADRATURE_NODES = int(os.getenv('QUADRATURE_NODES', 2 ** 16))

ROOT_BISECTION_XTOL = float(os.getenv('ROOT_BISECTION_XTOL', 1e-8))

ROOT_NEWTON_STEPS = int(os.getenv('ROOT_NEWTON_STEPS', 3))

ROOT_BRACKET_GROWTH_LIMIT = int(os.getenv('ROOT_BRACKET_GROWTH_LIMIT', 200))


# Discretization

AGE_TAIL_FACTOR = float(os.getenv('AGE_TAIL_FACTOR', 30))

STEP_QUADRATURE_ORDER = int(os.getenv('STEP_QUADRATURE_ORDER', 8))

# 'exponential' applies age-independent losses as exact per-step factors,
# 'implicit' puts them in the division denominator.
LOSS_SCHEME = os.getenv('LOSS_SCHEME', 'exponential')

DEFAULT_N_TIME = int(os.getenv('DEFAULT_N_TIME', 1024))


# Power iteration

FLOQUET_TOL = float(os.getenv('FLOQUET_TOL', 1e-12))

FLOQUET_MAX_ITER = int(os.getenv('FLOQUET_MAX_ITER', 100000))

ADJOINT_MISMATCH_FLOOR = float(os.getenv('ADJOINT_MISMATCH_FLOOR', 1e-10))


# Chronotherapy

PLATEAU_TOLERANCE = float(os.getenv('PLATEAU_TOLERANCE', 1e-9))

DEFAULT_THETA_POINTS = int(os.getenv('DEFAULT_THETA_POINTS', 64))

DEFAULT_EPSILONS = [float(eps) for eps in os.getenv('DEFAULT_EPSILONS', '0.1,0.5,1').split(',')]


# Delay equation oracle

DDE_STEPS_PER_PERIOD = int(os.getenv('DDE_STEPS_PER_PERIOD', 1000))

DDE_PERIODS = int(os.getenv('DDE_PERIODS', 60))

DDE_BURN_IN = int(os.getenv('DDE_BURN_IN', 50))


# Worker pool

SWEEP_JOBS = int(os.getenv('SWEEP_JOBS', 1))

# worker processes; threads when False
SWEEP_PROCESSES = False if os.getenv('SWEEP_PROCESSES') == 'False' else True

SWEEP_START_METHOD = os.getenv('SWEEP_START_METHOD', 'spawn')


# Logging
# https://docs.djangoproject.com/en/4.2/topics/logging/#configuring-logging

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'simple': {
            'format': '{asctime} {levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'level': os.getenv('GROWTHRATE_LOG_LEVEL', 'INFO'),
            'class': 'logging.StreamHandler',
            'formatter': 'simple',
        },
    },
    'loggers': {
        'django': {
            'handlers': ['console'],
            'level': os.getenv('DJANGO_LOG_LEVEL', 'WARNING'),
            'propagate': True,
        },
    },
    'root': {
        'handlers': ['console'],
        'level': os.getenv('GROWTHRATE_LOG_LEVEL', 'INFO'),
    },
}
