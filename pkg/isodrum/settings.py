"""
Django settings for the isodrum project.

isodrum has no database and serves no HTTP; Django provides configuration,
logging, management commands and the test runner.

For the full list of settings and their values, see
https://docs.djangoproject.com/en/5.2/ref/settings/
"""

import os
from pathlib import Path

from dotenv import load_dotenv

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

load_dotenv(dotenv_path=BASE_DIR / ".env")

SECRET_KEY = os.environ.get("ISODRUM_SECRET_KEY", "isodrum-local-only")

DEBUG = os.environ.get("ISODRUM_DEBUG", "0") == "1"

ALLOWED_HOSTS = []

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "plain": {
            "format": "%(levelname)s %(name)s: %(message)s",
        },
    },
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
            "formatter": "plain",
        },
    },
    "root": {
        "handlers": ["console"],
        "level": os.environ.get("ISODRUM_LOG_LEVEL", "INFO"),
    },
}


# Application definition

INSTALLED_APPS = [
    "django.contrib.contenttypes",
    "django.contrib.auth",
    "rest_framework",
    "drums",
]

# No persistence.
DATABASES = {}


# Isodrum tunables

ISODRUM_CATALOG = os.environ.get(
    "ISODRUM_CATALOG", str(BASE_DIR / "drums" / "data" / "catalog.txt")
)

ISODRUM_COMMUTANT_MAX_DIM = int(os.environ.get("ISODRUM_COMMUTANT_MAX_DIM", "16"))
ISODRUM_SIGNED_MAX_DIM = int(os.environ.get("ISODRUM_SIGNED_MAX_DIM", "10"))
ISODRUM_GROUP_LIMIT = int(os.environ.get("ISODRUM_GROUP_LIMIT", "2000000"))
ISODRUM_THETA_NODE_BUDGET = int(os.environ.get("ISODRUM_THETA_NODE_BUDGET", "100000000"))

ISODRUM_OVERLAP_TOL = float(os.environ.get("ISODRUM_OVERLAP_TOL", "1e-9"))
ISODRUM_LOOP_TOL = float(os.environ.get("ISODRUM_LOOP_TOL", "1e-9"))
ISODRUM_EIG_RESIDUAL = float(os.environ.get("ISODRUM_EIG_RESIDUAL", "1e-10"))
ISODRUM_POLE_EXCLUSION = float(os.environ.get("ISODRUM_POLE_EXCLUSION", "1e-6"))
ISODRUM_BISECT_RTOL = float(os.environ.get("ISODRUM_BISECT_RTOL", "1e-10"))


# Internationalization
# https://docs.djangoproject.com/en/5.2/topics/i18n/

LANGUAGE_CODE = "en-us"

TIME_ZONE = "UTC"

USE_I18N = True

USE_TZ = True

DEFAULT_AUTO_FIELD = "django.db.models.BigAutoField"
