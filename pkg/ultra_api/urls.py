from django.urls import path
from drf_spectacular.views import (
    SpectacularAPIView,
    SpectacularRedocView,
    SpectacularSwaggerView,
)
from . import views

urlpatterns = [
    path("schema/", SpectacularAPIView.as_view(), name="schema"),
    path(
        "swagger/",
        SpectacularSwaggerView.as_view(url_name="ultra_api:schema"),
        name="swagger",
    ),
    path(
        "redoc/", SpectacularRedocView.as_view(url_name="ultra_api:schema"), name="redoc"
    ),
    path("v1/lattice/check/", views.LatticeCheck.as_view()),
    path("v1/space/check/", views.SpaceCheck.as_view()),
    path("v1/lift/", views.Lift.as_view()),
    path("v1/job/", views.JobList.as_view()),
    path("v1/job/<int:pk>/", views.JobDetail.as_view()),
]
