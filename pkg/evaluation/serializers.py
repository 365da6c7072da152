from rest_framework import serializers

from .models import ERROR_CATEGORIES


class ScoreSerializer(serializers.Serializer):
    gold = serializers.IntegerField()
    predicted = serializers.IntegerField()
    correct = serializers.IntegerField()
    precision = serializers.FloatField()
    recall = serializers.FloatField()
    f1 = serializers.FloatField()


class EvalReportSerializer(serializers.Serializer):
    """Corpus-level strict scores; per-sentence detail is left out of the JSON report."""
    entity = ScoreSerializer()
    relation = ScoreSerializer()
    span = ScoreSerializer()


class ErrorBreakdownSerializer(serializers.Serializer):
    total = serializers.IntegerField()
    counts = serializers.SerializerMethodField()
    fractions = serializers.DictField(child=serializers.FloatField())

    def get_counts(self, obj):
        return obj.as_dict()


class ShardCountsSerializer(serializers.Serializer):
    """Counts returned by a scoring shard: [gold, predicted, correct] triples plus error counts."""
    entity = serializers.ListField(child=serializers.IntegerField(min_value=0), min_length=3, max_length=3)
    relation = serializers.ListField(child=serializers.IntegerField(min_value=0), min_length=3, max_length=3)
    span = serializers.ListField(child=serializers.IntegerField(min_value=0), min_length=3, max_length=3)
    errors = serializers.DictField(child=serializers.IntegerField(min_value=0))

    def validate_errors(self, value):
        unknown = set(value) - set(ERROR_CATEGORIES)
        if unknown:
            raise serializers.ValidationError(f"Unknown error categories: {sorted(unknown)}.")
        return value
