from dataclasses import dataclass, field
from typing import Dict, Tuple

ERROR_CATEGORIES = ('SSE', 'ENF', 'ETE', 'RNF', 'RTE')


def precision_recall_f1(correct: int, predicted: int, gold: int) -> Tuple[float, float, float]:
    """Micro P/R/F1 from counts; every 0/0 is 0."""
    precision = correct / predicted if predicted else 0.0
    recall = correct / gold if gold else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return precision, recall, f1


@dataclass(frozen=True)
class Score:
    """Gold / predicted / correct counts of one item kind."""
    gold: int = 0
    predicted: int = 0
    correct: int = 0

    def __post_init__(self):
        if min(self.gold, self.predicted, self.correct) < 0 or self.correct > min(self.gold, self.predicted):
            raise ValueError(f"Inconsistent counts: {self}.")

    def __add__(self, other: 'Score') -> 'Score':
        return Score(self.gold + other.gold, self.predicted + other.predicted, self.correct + other.correct)

    @property
    def precision(self) -> float:
        return precision_recall_f1(self.correct, self.predicted, self.gold)[0]

    @property
    def recall(self) -> float:
        return precision_recall_f1(self.correct, self.predicted, self.gold)[1]

    @property
    def f1(self) -> float:
        return precision_recall_f1(self.correct, self.predicted, self.gold)[2]

    def as_counts(self) -> list:
        return [self.gold, self.predicted, self.correct]


@dataclass(frozen=True)
class SpanScore(Score):
    """Split-position counts; F1 of two empty split sets is 1."""

    def __add__(self, other: Score) -> 'SpanScore':
        return SpanScore(self.gold + other.gold, self.predicted + other.predicted, self.correct + other.correct)

    @property
    def f1(self) -> float:
        if self.gold == 0 and self.predicted == 0:
            return 1.0
        return super().f1


@dataclass(frozen=True)
class EvalReport:
    """Strict-criterion scores, summed over sentences (micro-averaged)."""
    entity: Score = field(default_factory=Score)
    relation: Score = field(default_factory=Score)
    span: SpanScore = field(default_factory=SpanScore)
    per_sentence: Tuple['EvalReport', ...] = ()

    def __add__(self, other: 'EvalReport') -> 'EvalReport':
        return EvalReport(
            entity=self.entity + other.entity,
            relation=self.relation + other.relation,
            span=self.span + other.span,
            per_sentence=self.per_sentence + (other.per_sentence or (other,)),
        )

    @property
    def span_f1(self) -> float:
        return self.span.f1

    def as_counts(self) -> Dict[str, list]:
        return {'entity': self.entity.as_counts(), 'relation': self.relation.as_counts(),
                'span': self.span.as_counts()}

    @classmethod
    def from_counts(cls, counts: Dict[str, list]) -> 'EvalReport':
        return cls(entity=Score(*counts['entity']), relation=Score(*counts['relation']),
                   span=SpanScore(*counts['span']))


@dataclass(frozen=True)
class ErrorBreakdown:
    """Counts of unrecovered gold relations per error category."""
    counts: Tuple[Tuple[str, int], ...] = tuple((name, 0) for name in ERROR_CATEGORIES)

    @classmethod
    def from_dict(cls, counts: Dict[str, int]) -> 'ErrorBreakdown':
        unknown = set(counts) - set(ERROR_CATEGORIES)
        if unknown:
            raise ValueError(f"Unknown error categories: {sorted(unknown)}.")
        return cls(counts=tuple((name, int(counts.get(name, 0))) for name in ERROR_CATEGORIES))

    def as_dict(self) -> Dict[str, int]:
        return dict(self.counts)

    def __add__(self, other: 'ErrorBreakdown') -> 'ErrorBreakdown':
        mine, theirs = self.as_dict(), other.as_dict()
        return ErrorBreakdown.from_dict({name: mine[name] + theirs[name] for name in ERROR_CATEGORIES})

    @property
    def total(self) -> int:
        return sum(count for _, count in self.counts)

    @property
    def fractions(self) -> Dict[str, float]:
        total = self.total
        return {name: (count / total if total else 0.0) for name, count in self.counts}


@dataclass(frozen=True)
class DistanceHistogram:
    """Binned adjacent-distance counts for entity boundaries and other positions."""
    edges: Tuple[float, ...]
    ent_bound: Tuple[int, ...]
    non_ent_bound: Tuple[int, ...]


@dataclass(frozen=True)
class SweepRow:
    alpha: float
    span_f1: float
    entity_f1: float
    relation_f1: float
