from rest_framework import serializers

from common.serializers import EntitySerializer, ExtractionFieldsMixin, RelationSerializer

from .models import DECODER_TAGS, ExtractionResult


class PredictionSerializer(ExtractionFieldsMixin, serializers.Serializer):
    """
    One predictions line: decoded entities and relations, the decoder that
    produced them and, for joint decoding, the interior split positions.
    """
    entities = EntitySerializer(many=True, default=list)
    relations = RelationSerializer(many=True, default=list)
    decoder = serializers.ChoiceField(choices=DECODER_TAGS)
    splits = serializers.ListField(child=serializers.IntegerField(min_value=1), default=list)

    def validate(self, data):
        entities = self.build_entities(data)
        data['result'] = ExtractionResult(
            entities=entities,
            relations=self.build_relations(data, len(entities)),
            decoder_tag=data['decoder'],
            split_positions=tuple(data['splits']),
        )
        return data

    def create(self, validated_data):
        return validated_data['result']

    def to_representation(self, instance):
        return {
            'entities': [self.fields['entities'].child.to_representation(e) for e in instance.entities],
            'relations': [self.fields['relations'].child.to_representation(r) for r in instance.relations],
            'decoder': instance.decoder_tag,
            'splits': list(instance.split_positions),
        }
