"""Configure Django before pytest collects the drums test modules."""
import os

import django

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "isodrum.settings")
django.setup()
