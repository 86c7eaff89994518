# pytest wiring: configure Django the same way manage.py does for `manage.py test cbp`.
import os

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'cbp.testrunner.settings')

try:
    import django
except ImportError:  # Django-free environments
    pass
else:
    django.setup()
