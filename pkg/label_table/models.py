from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .exceptions import InvalidAnnotationError, InvalidLabelSpaceError, InvalidTensorError

NULL_LABEL = '<null>'
NULL_ID = 0


@dataclass(frozen=True)
class LabelSpace:
    """
    The unified label space shared by every table cell.

    Label ids are dense: the null label is pinned at id 0, entity types follow
    in declared order, then relation types. Entity types are always symmetric;
    `symmetric_labels` additionally lists the undirected relation types.
    """
    entity_types: tuple
    relation_types: tuple
    symmetric_labels: frozenset = frozenset()
    null_label: str = NULL_LABEL

    def __post_init__(self):
        names = list(self.entity_types) + list(self.relation_types)
        if not self.entity_types:
            raise InvalidLabelSpaceError("At least one entity type is required.")
        for name in names:
            if not isinstance(name, str) or not name:
                raise InvalidLabelSpaceError(f"Label names must be non-empty strings, got {name!r}.")
        if len(set(names)) != len(names):
            raise InvalidLabelSpaceError("Entity and relation type names must be distinct.")
        if self.null_label in names:
            raise InvalidLabelSpaceError(f"{self.null_label!r} is reserved for the null label.")
        unknown = set(self.symmetric_labels) - set(names)
        if unknown:
            raise InvalidLabelSpaceError(f"Symmetric labels not in the label space: {sorted(unknown)}.")
        missing = set(self.entity_types) - set(self.symmetric_labels)
        if missing:
            raise InvalidLabelSpaceError(f"Entity types must be symmetric: {sorted(missing)}.")

    @classmethod
    def build(cls, entity_types: Iterable[str], relation_types: Iterable[str] = (),
              symmetric_relations: Iterable[str] = ()) -> 'LabelSpace':
        """Create a label space, marking every entity type symmetric automatically."""
        entity_types = tuple(entity_types)
        return cls(
            entity_types=entity_types,
            relation_types=tuple(relation_types),
            symmetric_labels=frozenset(entity_types) | frozenset(symmetric_relations),
        )

    @property
    def labels(self) -> tuple:
        return (self.null_label,) + tuple(self.entity_types) + tuple(self.relation_types)

    @property
    def size(self) -> int:
        return 1 + len(self.entity_types) + len(self.relation_types)

    @property
    def entity_ids(self) -> np.ndarray:
        return np.arange(1, 1 + len(self.entity_types))

    @property
    def relation_ids(self) -> np.ndarray:
        start = 1 + len(self.entity_types)
        return np.arange(start, start + len(self.relation_types))

    @property
    def symmetric_ids(self) -> np.ndarray:
        return np.array([i for i, name in enumerate(self.labels) if name in self.symmetric_labels], dtype=int)

    @property
    def symmetric_relations(self) -> frozenset:
        return frozenset(self.symmetric_labels) - frozenset(self.entity_types)

    def id_of(self, name: str) -> int:
        try:
            return self.labels.index(name)
        except ValueError:
            raise InvalidAnnotationError(f"Unknown label {name!r}.") from None

    def name_of(self, label_id: int) -> str:
        return self.labels[label_id]

    def is_entity(self, label_id: int) -> bool:
        return 1 <= label_id <= len(self.entity_types)

    def is_relation(self, label_id: int) -> bool:
        return len(self.entity_types) < label_id < self.size

    def is_symmetric(self, label_id: int) -> bool:
        return self.labels[label_id] in self.symmetric_labels


@dataclass(frozen=True, order=True)
class Entity:
    """An entity mention: half-open token span [start, end) and its entity label id."""
    start: int
    end: int
    label: int

    @property
    def span(self) -> tuple:
        return (self.start, self.end)


@dataclass(frozen=True, order=True)
class Relation:
    """A relation triplet between two entities, referenced by their list index."""
    head: int
    tail: int
    label: int


@dataclass(frozen=True)
class SentenceAnnotation:
    """
    A sentence with its gold entities and relations.

    Undirected (symmetric) relations are stored as two mirrored triplets.
    """
    tokens: tuple
    entities: tuple = ()
    relations: tuple = ()

    def __len__(self):
        return len(self.tokens)

    def validate(self, ls: LabelSpace) -> 'SentenceAnnotation':
        """Check every annotation invariant against `ls`; returns self for chaining."""
        n = len(self.tokens)
        if n < 1:
            raise InvalidAnnotationError("A sentence needs at least one token.")
        for index, entity in enumerate(self.entities):
            if not 0 <= entity.start < entity.end <= n:
                raise InvalidAnnotationError(
                    f"entities[{index}]: span [{entity.start}, {entity.end}) outside sentence of length {n}."
                )
            if not ls.is_entity(entity.label):
                raise InvalidAnnotationError(f"entities[{index}]: label id {entity.label} is not an entity type.")
        ordered = sorted(self.entities)
        for left, right in zip(ordered, ordered[1:]):
            if right.start < left.end:
                raise InvalidAnnotationError(
                    f"Overlapping entity spans [{left.start}, {left.end}) and [{right.start}, {right.end})."
                )
        triplets = set()
        for index, relation in enumerate(self.relations):
            for role in ('head', 'tail'):
                ref = getattr(relation, role)
                if not 0 <= ref < len(self.entities):
                    raise InvalidAnnotationError(f"relations[{index}]: {role} {ref} is not an entity index.")
            if relation.head == relation.tail:
                raise InvalidAnnotationError(f"relations[{index}]: head and tail are the same entity.")
            if not ls.is_relation(relation.label):
                raise InvalidAnnotationError(f"relations[{index}]: label id {relation.label} is not a relation type.")
            triplets.add((relation.head, relation.tail, relation.label))
        for head, tail, label in triplets:
            if ls.is_symmetric(label) and (tail, head, label) not in triplets:
                raise InvalidAnnotationError(
                    f"Symmetric relation {ls.name_of(label)!r} ({head}, {tail}) lacks its mirrored triplet."
                )
        return self


@dataclass(frozen=True, eq=False)
class GoldTable:
    """|s|×|s| matrix of label ids rendered from an annotation."""
    cells: np.ndarray

    @property
    def size(self) -> int:
        return self.cells.shape[0]


@dataclass(frozen=True, eq=False)
class ProbTensor:
    """
    |s|×|s|×|𝒴| per-cell label probabilities.

    Construction checks shape and range only; `check_normalized` enforces the
    sum-to-one invariant for tensors that must satisfy it (symmetrized tensors
    may drift from it after the averaging).
    """
    values: np.ndarray
    labels: Optional[tuple] = field(default=None, compare=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 3 or values.shape[0] != values.shape[1] or values.shape[0] < 1:
            raise InvalidTensorError(f"Expected an |s|x|s|x|Y| tensor, got shape {values.shape}.")
        if not np.all(np.isfinite(values)) or values.min() < -1e-12 or values.max() > 1 + 1e-12:
            raise InvalidTensorError("Probabilities must be finite and within [0, 1].")
        object.__setattr__(self, 'values', values)

    @property
    def size(self) -> int:
        return self.values.shape[0]

    @property
    def n_labels(self) -> int:
        return self.values.shape[2]

    def check_normalized(self, tol: float = 1e-6) -> 'ProbTensor':
        sums = self.values.sum(axis=2)
        if not np.allclose(sums, 1.0, atol=tol, rtol=0.0):
            worst = np.unravel_index(np.argmax(np.abs(sums - 1.0)), sums.shape)
            raise InvalidTensorError(f"Cell {tuple(int(i) for i in worst)} sums to {sums[worst]:.9f}, not 1.")
        return self


def structure_of(entities: Sequence[Entity], relations: Sequence[Relation], ls: LabelSpace) -> tuple:
    """
    Canonical, order-free view of an extraction: (entity set, relation set).

    Relations are keyed by argument spans so entity list order does not matter;
    undirected relations collapse to one item with the earlier span first.
    """
    entity_set = frozenset((e.start, e.end, e.label) for e in entities)
    relation_set = set()
    for relation in relations:
        head = entities[relation.head]
        tail = entities[relation.tail]
        first, second = (head.start, head.end, head.label), (tail.start, tail.end, tail.label)
        if ls.is_symmetric(relation.label) and second < first:
            first, second = second, first
        relation_set.add((first, second, relation.label))
    return entity_set, frozenset(relation_set)
