import os
from pathlib import Path


BASE_DIR = Path(__file__).resolve().parent.parent

# No web surface is served; the key only satisfies Django's settings checks.
SECRET_KEY = "esetlab-offline-l+mkhn=ej%yb98(yo*83c%+3+7fv5q2x"

DEBUG = False

ALLOWED_HOSTS = []


INSTALLED_APPS = [
    "exceptional_sets",
]

DATABASES = {}

LANGUAGE_CODE = "en-us"

TIME_ZONE = "UTC"

USE_I18N = False

USE_TZ = True

DEFAULT_AUTO_FIELD = "django.db.models.BigAutoField"

# Output directory for experiment artifacts; the only environment override.
ESETLAB_OUT = Path(os.environ.get("ESETLAB_OUT", "out"))

CONFIG_DIR = BASE_DIR / "esetlab" / "configs"

LAB = {
    "monte_carlo_samples": 10_000,
    "logderiv_samples": 10_000,
    "workers": 1,
}

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "verbose": {
            "format": "{asctime} {levelname} {name}: {message}",
            "style": "{",
        },
    },
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
            "stream": "ext://sys.stderr",
            "formatter": "verbose",
        },
    },
    "root": {
        "handlers": ["console"],
        "level": "WARNING",
    },
    "loggers": {
        "exceptional_sets": {
            "handlers": ["console"],
            "level": "INFO",
            "propagate": False,
        },
        "esetlab": {
            "handlers": ["console"],
            "level": "INFO",
            "propagate": False,
        },
    },
}
