from rest_framework import serializers

from ultra.exceptions import UltraError
from ultra.kstruct import default_params, params_from_dict
from ultra.lattice import find_forbidden_sublattice, is_distributive, meet_irreducibles
from ultra.models import VerificationJob
from ultra.utils.codec import lattice_of, ordered_of, space_of
import logging

logger = logging.getLogger("default")


def _errors(e):
    return serializers.ValidationError({"errors": e.to_dict()})


class LatticeCheckSerializer(serializers.Serializer):
    lattice = serializers.JSONField(label="格, JSON 或 CH3 这样的名字")

    def validate_lattice(self, lattice):
        try:
            return lattice_of({"lattice": lattice})
        except UltraError as e:
            raise _errors(e)

    def get_result(self):
        lattice = self.validated_data["lattice"]
        forbidden = find_forbidden_sublattice(lattice)
        return {
            "lattice": lattice.to_dict(),
            "distributive": is_distributive(lattice),
            "forbidden": list(forbidden) if forbidden else None,
            "meet_irreducibles": meet_irreducibles(lattice),
        }


class LatticeCheckResultSerializer(serializers.Serializer):
    lattice = serializers.JSONField(read_only=True)
    distributive = serializers.BooleanField(read_only=True)
    forbidden = serializers.JSONField(read_only=True)
    meet_irreducibles = serializers.ListField(read_only=True)


class SpaceCheckSerializer(serializers.Serializer):
    lattice = serializers.JSONField(label="格")
    points = serializers.ListField(child=serializers.CharField(), label="点")
    d = serializers.DictField(label='距离表, 键为 "x,y"')

    def validate(self, attrs):
        try:
            lattice = lattice_of(attrs)
            attrs["space"] = space_of(attrs, lattice)
        except UltraError as e:
            raise _errors(e)
        return attrs

    def get_result(self):
        space = self.validated_data["space"]
        return {
            **space.to_dict(),
            "classes": {lam: space.classes(lam) for lam in space.lattice.elements},
        }


class LiftSerializer(serializers.Serializer):
    lattice = serializers.JSONField(label="格")
    space = serializers.JSONField(label="超度量空间")
    language = serializers.JSONField(label="语言", required=False)
    orders = serializers.ListField(child=serializers.JSONField(), label="子商序", default=list)
    params = serializers.JSONField(label="提升参数", required=False)

    def validate(self, attrs):
        try:
            lattice = lattice_of(attrs)
            attrs["ordered"] = ordered_of(attrs, lattice)
            attrs["lift_params"] = (
                params_from_dict(lattice, attrs["params"])
                if attrs.get("params")
                else default_params(lattice, attrs["ordered"].language)
            )
        except UltraError as e:
            raise _errors(e)
        return attrs


class VerificationJobSerializer(serializers.ModelSerializer):
    @staticmethod
    def validate_payload(payload):
        if not isinstance(payload, dict) or "lattice" not in payload:
            raise serializers.ValidationError({"errors": "payload 必须是包含 lattice 的对象"})
        try:
            lattice_of(payload)
        except UltraError as e:
            raise _errors(e)
        return payload

    def validate(self, attrs):
        payload = attrs["payload"]
        required = {
            "ramsey-check": ("A", "B", "C"),
            "ramsey-search": ("A", "B", "size"),
            "expansion-check": ("A",),
        }[attrs["kind"]]
        missing = [key for key in required if key not in payload]
        if missing:
            raise serializers.ValidationError({"errors": f"payload 缺少字段:{missing}"})
        return attrs

    class Meta:
        model = VerificationJob
        fields = "__all__"
        read_only_fields = (
            "status",
            "verdict",
            "result",
            "cost",
            "task_id",
            "create_time",
            "finish_time",
        )
