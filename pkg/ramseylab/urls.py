from django.urls import include, path
from django.contrib import admin

urlpatterns = [
    path("admin/", admin.site.urls),
    path("api/", include(("ultra_api.urls", "ultra_api"), namespace="ultra_api")),
]
