"""
Strict-criterion scoring.

An entity is correct with exact boundaries and type; a relation is correct
with the exact type and both arguments correct on boundaries and type.
Undirected relations are counted once per mirrored pair on both sides.
"""
import logging
from typing import Iterable, Sequence, Set

from decoder.models import ExtractionResult
from label_table.exceptions import InvalidAnnotationError
from label_table.models import LabelSpace, SentenceAnnotation, structure_of

from .models import ERROR_CATEGORIES, ErrorBreakdown, EvalReport, Score, SpanScore

logger = logging.getLogger(__name__)


def entity_boundaries(entities, length: int) -> Set[int]:
    """Interior positions (0 < k < length) where some entity starts or ends."""
    return {k for e in entities for k in (e.start, e.end) if 0 < k < length}


def predicted_splits(pred: ExtractionResult, length: int) -> Set[int]:
    """Joint decoding reports its splits; other decoders are judged by their entity boundaries."""
    if pred.decoder_tag == 'joint':
        return {k for k in pred.split_positions if 0 < k < length}
    return entity_boundaries(pred.entities, length)


def _check_in_range(pred: ExtractionResult, length: int):
    for index, entity in enumerate(pred.entities):
        if not 0 <= entity.start < entity.end <= length:
            raise InvalidAnnotationError(
                f"entities[{index}]: span [{entity.start}, {entity.end}) outside sentence of length {length}."
            )
    for index, relation in enumerate(pred.relations):
        if not (0 <= relation.head < len(pred.entities) and 0 <= relation.tail < len(pred.entities)):
            raise InvalidAnnotationError(f"relations[{index}]: argument index out of range.")


def span_counts(pred_splits: Iterable[int], gold_splits: Iterable[int]) -> SpanScore:
    pred_splits, gold_splits = set(pred_splits), set(gold_splits)
    return SpanScore(gold=len(gold_splits), predicted=len(pred_splits), correct=len(pred_splits & gold_splits))


def span_f1(pred_splits: Iterable[int], gold_splits: Iterable[int]) -> float:
    """Micro F1 over split positions; two empty sets score 1."""
    return span_counts(pred_splits, gold_splits).f1


def strict_eval(pred: ExtractionResult, gold: SentenceAnnotation, ls: LabelSpace) -> EvalReport:
    length = len(gold.tokens)
    _check_in_range(pred, length)
    pred_entities, pred_relations = pred.structure(ls)
    gold_entities, gold_relations = structure_of(gold.entities, gold.relations, ls)
    return EvalReport(
        entity=Score(len(gold_entities), len(pred_entities), len(pred_entities & gold_entities)),
        relation=Score(len(gold_relations), len(pred_relations), len(pred_relations & gold_relations)),
        span=span_counts(predicted_splits(pred, length), entity_boundaries(gold.entities, length)),
    )


def corpus_eval(preds: Sequence[ExtractionResult], golds: Sequence[SentenceAnnotation],
                ls: LabelSpace) -> EvalReport:
    """Sum per-sentence counts; per-sentence reports are kept in order."""
    if len(preds) != len(golds):
        raise ValueError(f"{len(preds)} predictions for {len(golds)} gold sentences.")
    report = EvalReport()
    for pred, gold in zip(preds, golds):
        report = report + strict_eval(pred, gold, ls)
    return report


def _classify(gold_relation, pred_entities, pred_relations, boundaries) -> str:
    first, second, _ = gold_relation
    arguments = (first, second)
    if any(start < k < end for start, end, _ in arguments for k in boundaries):
        return 'SSE'
    pred_spans = {(start, end) for start, end, _ in pred_entities}
    if any((start, end) not in pred_spans for start, end, _ in arguments):
        return 'ENF'
    if any(argument not in pred_entities for argument in arguments):
        return 'ETE'
    pair = {first, second}
    if not any({head, tail} == pair for head, tail, _ in pred_relations):
        return 'RNF'
    return 'RTE'


def error_taxonomy(pred: ExtractionResult, gold: SentenceAnnotation, ls: LabelSpace) -> ErrorBreakdown:
    """
    Tag each gold relation the prediction misses with exactly one category.

    In priority order: SSE (a predicted boundary falls strictly inside an
    argument's gold span), ENF (an argument span is not a predicted entity
    span), ETE (an argument span is found with the wrong type), RNF (both
    arguments are correct but no relation links them), RTE (a relation
    links them with the wrong type or direction).
    """
    length = len(gold.tokens)
    _check_in_range(pred, length)
    pred_entities, pred_relations = pred.structure(ls)
    _, gold_relations = structure_of(gold.entities, gold.relations, ls)
    boundaries = predicted_splits(pred, length) | entity_boundaries(pred.entities, length)
    counts = dict.fromkeys(ERROR_CATEGORIES, 0)
    for relation in sorted(gold_relations - pred_relations):
        counts[_classify(relation, pred_entities, pred_relations, boundaries)] += 1
    return ErrorBreakdown.from_dict(counts)


def corpus_error_taxonomy(preds: Sequence[ExtractionResult], golds: Sequence[SentenceAnnotation],
                          ls: LabelSpace) -> ErrorBreakdown:
    if len(preds) != len(golds):
        raise ValueError(f"{len(preds)} predictions for {len(golds)} gold sentences.")
    breakdown = ErrorBreakdown()
    for pred, gold in zip(preds, golds):
        breakdown = breakdown + error_taxonomy(pred, gold, ls)
    logger.debug("error taxonomy: %s", breakdown.as_dict())
    return breakdown
