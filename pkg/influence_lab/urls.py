from django.contrib import admin
from django.urls import path

# Scenario records are browsed through the admin; there is no public site.
urlpatterns = [
    path('admin/', admin.site.urls),
]
