# common/serializers.py
from rest_framework import serializers

from label_table.exceptions import InvalidAnnotationError, InvalidLabelSpaceError
from label_table.models import Entity, LabelSpace, Relation, SentenceAnnotation


def describe_errors(detail, prefix='') -> str:
    """Flatten DRF error details into 'field.path: message' fragments."""
    if isinstance(detail, dict):
        parts = []
        for key, value in detail.items():
            path = prefix if key == 'non_field_errors' else (f"{prefix}.{key}" if prefix else str(key))
            parts.append(describe_errors(value, path))
        return '; '.join(part for part in parts if part)
    if isinstance(detail, list):
        if all(isinstance(item, str) for item in detail):
            message = ' '.join(str(item) for item in detail)
            return f"{prefix}: {message}" if prefix else message
        parts = []
        for index, item in enumerate(detail):
            if item:
                parts.append(describe_errors(item, f"{prefix}[{index}]"))
        return '; '.join(parts)
    return f"{prefix}: {detail}" if prefix else str(detail)


class LabelSpaceSerializer(serializers.Serializer):
    """Sidecar label-space declaration: entity types, relation types and the undirected relation types."""
    entity_types = serializers.ListField(child=serializers.CharField(), allow_empty=False)
    relation_types = serializers.ListField(child=serializers.CharField(), default=list)
    symmetric_relations = serializers.ListField(child=serializers.CharField(), default=list)

    def validate(self, data):
        unknown = set(data['symmetric_relations']) - set(data['relation_types'])
        if unknown:
            raise serializers.ValidationError({'symmetric_relations': f"Not relation types: {sorted(unknown)}."})
        try:
            data['label_space'] = LabelSpace.build(
                data['entity_types'], data['relation_types'], data['symmetric_relations'],
            )
        except InvalidLabelSpaceError as exc:
            raise serializers.ValidationError(str(exc))
        return data

    def create(self, validated_data):
        return validated_data['label_space']

    def to_representation(self, instance):
        return {
            'entity_types': list(instance.entity_types),
            'relation_types': list(instance.relation_types),
            'symmetric_relations': sorted(instance.symmetric_relations),
        }


class _LabelledSerializer(serializers.Serializer):
    """Base for items whose `type` name is resolved against `context['label_space']`."""
    allowed = 'entity_types'

    @property
    def label_space(self) -> LabelSpace:
        return self.context['label_space']

    def validate_type(self, value):
        if value not in getattr(self.label_space, self.allowed):
            raise serializers.ValidationError(f"Unknown type {value!r}.")
        return value


class EntitySerializer(_LabelledSerializer):
    start = serializers.IntegerField(min_value=0)
    end = serializers.IntegerField(min_value=1)
    type = serializers.CharField()

    def validate(self, data):
        if data['start'] >= data['end']:
            raise serializers.ValidationError({'end': "Must be greater than start."})
        return data

    def to_entity(self, data) -> Entity:
        return Entity(start=data['start'], end=data['end'], label=self.label_space.id_of(data['type']))

    def to_representation(self, instance):
        return {'start': instance.start, 'end': instance.end, 'type': self.label_space.name_of(instance.label)}


class RelationSerializer(_LabelledSerializer):
    allowed = 'relation_types'
    head = serializers.IntegerField(min_value=0)
    tail = serializers.IntegerField(min_value=0)
    type = serializers.CharField()

    def to_relation(self, data) -> Relation:
        return Relation(head=data['head'], tail=data['tail'], label=self.label_space.id_of(data['type']))

    def to_representation(self, instance):
        return {'head': instance.head, 'tail': instance.tail, 'type': self.label_space.name_of(instance.label)}


class ExtractionFieldsMixin:
    """Shared conversion of nested entity/relation lists into domain tuples."""

    def build_entities(self, data):
        return tuple(self.fields['entities'].child.to_entity(item) for item in data.get('entities', []))

    def build_relations(self, data, n_entities):
        relations = tuple(self.fields['relations'].child.to_relation(item) for item in data.get('relations', []))
        for index, relation in enumerate(relations):
            if relation.head >= n_entities or relation.tail >= n_entities:
                raise serializers.ValidationError(
                    {'relations': f"[{index}] references an entity index outside 0..{n_entities - 1}."}
                )
        return relations


class SentenceSerializer(ExtractionFieldsMixin, serializers.Serializer):
    """One corpus line: tokens, entities with half-open spans, relations by entity index."""
    tokens = serializers.ListField(child=serializers.CharField(), allow_empty=False)
    entities = EntitySerializer(many=True, default=list)
    relations = RelationSerializer(many=True, default=list)

    def validate(self, data):
        entities = self.build_entities(data)
        annotation = SentenceAnnotation(
            tokens=tuple(data['tokens']),
            entities=entities,
            relations=self.build_relations(data, len(entities)),
        )
        try:
            annotation.validate(self.context['label_space'])
        except InvalidAnnotationError as exc:
            raise serializers.ValidationError(str(exc))
        data['annotation'] = annotation
        return data

    def create(self, validated_data):
        return validated_data['annotation']

    def to_representation(self, instance):
        return {
            'tokens': list(instance.tokens),
            'entities': [self.fields['entities'].child.to_representation(e) for e in instance.entities],
            'relations': [self.fields['relations'].child.to_representation(r) for r in instance.relations],
        }
