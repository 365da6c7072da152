from dataclasses import dataclass
from typing import Tuple

from label_table.models import Entity, LabelSpace, Relation, SentenceAnnotation, structure_of

DISTANCE_MODES = ('squared', 'l2')
DECODER_TAGS = ('joint', 'hard', 'oracle')


@dataclass(frozen=True)
class DecodeConfig:
    """
    Span-stage settings.

    `squared` averages the squared row and column norms of adjacent
    differences; `l2` averages the plain norms.
    """
    threshold: float = 1.4
    distance_mode: str = 'squared'

    def __post_init__(self):
        if not self.threshold > 0:
            raise ValueError(f"Threshold must be positive, got {self.threshold}.")
        if self.distance_mode not in DISTANCE_MODES:
            raise ValueError(f"Unknown distance mode {self.distance_mode!r}; expected one of {DISTANCE_MODES}.")

    @classmethod
    def from_settings(cls, **overrides) -> 'DecodeConfig':
        from django.conf import settings

        values = dict(threshold=settings.UNIRE['THRESHOLD'], distance_mode=settings.UNIRE['DISTANCE_MODE'])
        values.update({key: value for key, value in overrides.items() if value is not None})
        return cls(**values)


@dataclass(frozen=True)
class ExtractionResult:
    """
    Decoded entities and relations of one sentence.

    Entities are sorted and non-overlapping; relations reference them by list
    index. `split_positions` holds the interior boundaries found by span
    decoding and is empty for the other decoders.
    """
    entities: Tuple[Entity, ...] = ()
    relations: Tuple[Relation, ...] = ()
    decoder_tag: str = 'joint'
    split_positions: Tuple[int, ...] = ()

    def __post_init__(self):
        if self.decoder_tag not in DECODER_TAGS:
            raise ValueError(f"Unknown decoder tag {self.decoder_tag!r}.")

    def structure(self, ls: LabelSpace) -> tuple:
        return structure_of(self.entities, self.relations, ls)

    def as_annotation(self, tokens) -> SentenceAnnotation:
        """Wrap the prediction as an (unvalidated) annotation over `tokens`."""
        return SentenceAnnotation(tokens=tuple(tokens), entities=self.entities, relations=self.relations)
