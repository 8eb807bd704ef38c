from django_filters import rest_framework as filters
from ultra.models import VerificationJob


class VerificationJobFilter(filters.FilterSet):
    class Meta:
        model = VerificationJob
        fields = {
            "id": ["exact"],
            "kind": ["exact"],
            "status": ["exact"],
            "verdict": ["exact"],
            "create_time": ["lt", "gte"],
        }
