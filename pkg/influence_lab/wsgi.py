import os
from django.core.wsgi import get_wsgi_application

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'influence_lab.settings')

# Serves the admin for browsing persisted scenario records.
application = get_wsgi_application()
