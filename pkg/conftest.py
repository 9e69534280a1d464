import os

import django

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "esetlab.settings")
django.setup()
