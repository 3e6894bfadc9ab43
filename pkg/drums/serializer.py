from rest_framework import serializers

from .permcat import COLORS, GEN_KEYS


class PairRecordSerializer(serializers.Serializer):
    name = serializers.CharField(max_length=32)
    group_label = serializers.CharField(max_length=64, required=False, default="")
    d = serializers.IntegerField(min_value=1)
    a1 = serializers.CharField(allow_blank=True)
    b1 = serializers.CharField(allow_blank=True)
    c1 = serializers.CharField(allow_blank=True)
    a2 = serializers.CharField(allow_blank=True)
    b2 = serializers.CharField(allow_blank=True)
    c2 = serializers.CharField(allow_blank=True)

    def validate(self, attrs):
        missing = [k for k in GEN_KEYS if k not in attrs]
        if missing:
            raise serializers.ValidationError(f"Missing generators {', '.join(missing)}")
        return attrs


class DomainRecordSerializer(serializers.Serializer):
    tiles = serializers.ListField(
        child=serializers.ListField(
            child=serializers.ListField(child=serializers.FloatField(), min_length=2, max_length=2),
            min_length=3,
            max_length=3,
        ),
        min_length=1,
    )
    edges = serializers.ListField(
        child=serializers.ListField(child=serializers.IntegerField(min_value=0), min_length=3, max_length=3)
    )
    boundary = serializers.ListField(
        child=serializers.ListField(child=serializers.FloatField(), min_length=2, max_length=2),
        min_length=3,
    )

    def validate(self, attrs):
        d = len(attrs["tiles"])
        for i, j, mu in attrs["edges"]:
            if mu not in COLORS:
                raise serializers.ValidationError(f"Edge ({i}, {j}) has invalid color {mu}")
            if i >= d or j >= d:
                raise serializers.ValidationError(f"Edge ({i}, {j}) refers to a tile outside 0..{d - 1}")
        return attrs


class DomainFileSerializer(serializers.Serializer):
    pair = serializers.CharField(max_length=32)
    base = serializers.CharField(max_length=128)
    domains = serializers.DictField(child=DomainRecordSerializer())


class LatticeFileSerializer(serializers.Serializer):
    """``rank``, ``scale`` and integer generator rows; the basis is rows / scale."""

    rank = serializers.IntegerField(min_value=1)
    scale = serializers.IntegerField(min_value=1)
    rows = serializers.ListField(child=serializers.ListField(child=serializers.IntegerField()))

    def validate(self, attrs):
        n = attrs["rank"]
        if len(attrs["rows"]) != n or any(len(r) != n for r in attrs["rows"]):
            raise serializers.ValidationError(f"Expected {n} rows of {n} integers")
        return attrs


class SpectrumRowSerializer(serializers.Serializer):
    index = serializers.IntegerField(min_value=1)
    eigenvalue_pi2_d2 = serializers.FloatField(min_value=0)
