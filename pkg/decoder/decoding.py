"""
Table decoders.

`joint_decode` is the three-stage approximate decoder (span boundaries from
adjacent row/column distances, then entity typing by square means, then
relation typing by rectangle means). `hard_decode` is the per-cell argmax
baseline and `oracle_decode` an exhaustive reference for short sentences.
"""
import itertools
import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np

from label_table.models import NULL_ID, Entity, LabelSpace, ProbTensor, Relation
from label_table.tables import argmax_table, symmetrize

from .exceptions import OracleSizeError
from .models import DecodeConfig, ExtractionResult

logger = logging.getLogger(__name__)

ORACLE_MAX_LENGTH = 8
LOG_FLOOR = 1e-12
_SCORE_TOLERANCE = 1e-9


def adjacent_distances(p: ProbTensor, mode: str = 'squared') -> np.ndarray:
    """
    Distances between consecutive rows (and columns) of the flattened tensor.

    Entry k-1 belongs to the boundary k, between tokens k-1 and k.
    """
    values = p.values
    n = values.shape[0]
    if n < 2:
        return np.zeros(0)
    rows = values.reshape(n, -1)
    cols = values.transpose(1, 0, 2).reshape(n, -1)
    row_sq = np.square(np.diff(rows, axis=0)).sum(axis=1)
    col_sq = np.square(np.diff(cols, axis=0)).sum(axis=1)
    if mode == 'squared':
        return (row_sq + col_sq) / 2.0
    if mode == 'l2':
        return (np.sqrt(row_sq) + np.sqrt(col_sq)) / 2.0
    raise ValueError(f"Unknown distance mode {mode!r}.")


def span_decode(p: ProbTensor, cfg: DecodeConfig) -> Tuple[List[int], List[Tuple[int, int]]]:
    """
    Split a (symmetrized) tensor into spans covering the whole sentence.

    Returns the split positions, always ending with |s|, and the half-open
    spans between consecutive splits.
    """
    n = p.size
    if n == 1:
        return [1], [(0, 1)]
    distances = adjacent_distances(p, cfg.distance_mode)
    splits = [int(k) for k in np.flatnonzero(distances > cfg.threshold) + 1]
    splits.append(n)
    starts = [0] + splits[:-1]
    return splits, list(zip(starts, splits))


def _best_label(block: np.ndarray, candidates: np.ndarray) -> int:
    # candidates start with the null id, so ties go to null, then to the smallest id
    means = block[:, :, candidates].mean(axis=(0, 1))
    return int(candidates[int(np.argmax(means))])


def _with_null(ids: np.ndarray) -> np.ndarray:
    return np.concatenate(([NULL_ID], ids)).astype(int)


def entity_type_decode(p: ProbTensor, span: Tuple[int, int], ls: LabelSpace) -> int:
    """Entity label id (or the null id) with the highest mean over the span's square."""
    start, end = span
    return _best_label(p.values[start:end, start:end], _with_null(ls.entity_ids))


def relation_type_decode(p: ProbTensor, head: Tuple[int, int], tail: Tuple[int, int], ls: LabelSpace) -> int:
    """Relation label id (or the null id) with the highest mean over the head-rows x tail-columns rectangle."""
    return _best_label(p.values[head[0]:head[1], tail[0]:tail[1]], _with_null(ls.relation_ids))


def _relations_between(p: ProbTensor, entities: Sequence[Entity], ls: LabelSpace) -> List[Relation]:
    relations = []
    if ls.relation_ids.size == 0:
        return relations
    for head, tail in itertools.permutations(range(len(entities)), 2):
        label = relation_type_decode(p, entities[head].span, entities[tail].span, ls)
        if label != NULL_ID:
            relations.append(Relation(head=head, tail=tail, label=label))
    return relations


def joint_decode(p: ProbTensor, ls: LabelSpace, cfg: Optional[DecodeConfig] = None) -> ExtractionResult:
    cfg = cfg or DecodeConfig()
    p = symmetrize(p, ls)
    splits, spans = span_decode(p, cfg)
    entities = []
    for span in spans:
        label = entity_type_decode(p, span, ls)
        if label != NULL_ID:
            entities.append(Entity(start=span[0], end=span[1], label=label))
    relations = _relations_between(p, entities, ls)
    logger.debug("joint decode: %d spans, %d entities, %d relations", len(spans), len(entities), len(relations))
    return ExtractionResult(
        entities=tuple(entities),
        relations=tuple(relations),
        decoder_tag='joint',
        split_positions=tuple(splits[:-1]),
    )


def _block_counts(table: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """2-D prefix sums of per-label cell counts, shape (len(labels), n+1, n+1)."""
    n = table.shape[0]
    onehot = (table[None, :, :] == labels[:, None, None]).astype(np.int64)
    counts = np.zeros((labels.size, n + 1, n + 1), dtype=np.int64)
    counts[:, 1:, 1:] = onehot.cumsum(axis=1).cumsum(axis=2)
    return counts


def _count_block(counts: np.ndarray, rows: Tuple[int, int], cols: Tuple[int, int]) -> np.ndarray:
    (r0, r1), (c0, c1) = rows, cols
    return counts[:, r1, c1] - counts[:, r0, c1] - counts[:, r1, c0] + counts[:, r0, c0]


def hard_decode(p: ProbTensor, ls: LabelSpace) -> ExtractionResult:
    """
    Per-cell argmax of the tensor as given, followed by greedy square extraction.

    Squares are scanned from size |s| down to 1, left to right. A square's
    label is its most frequent entity-or-null label; it is accepted when that
    label is an entity type and it overlaps no accepted entity. Each ordered
    entity pair then takes the most frequent relation-or-null label of its
    rectangle. Count ties go to null, then to the smallest label id.
    """
    table = argmax_table(p).cells
    n = table.shape[0]
    entity_labels = _with_null(ls.entity_ids)
    counts = _block_counts(table, entity_labels)
    taken = np.zeros(n, dtype=bool)
    entities = []
    for size in range(n, 0, -1):
        starts = np.arange(0, n - size + 1)
        ends = starts + size
        square = (counts[:, ends, ends] - counts[:, starts, ends]
                  - counts[:, ends, starts] + counts[:, starts, starts])
        winners = entity_labels[np.argmax(square, axis=0)]
        for start in np.flatnonzero(winners != NULL_ID):
            start = int(start)
            if taken[start:start + size].any():
                continue
            taken[start:start + size] = True
            entities.append(Entity(start=start, end=start + size, label=int(winners[start])))
    entities.sort()

    relations = []
    if ls.relation_ids.size:
        relation_labels = _with_null(ls.relation_ids)
        rel_counts = _block_counts(table, relation_labels)
        for head, tail in itertools.permutations(range(len(entities)), 2):
            block = _count_block(rel_counts, entities[head].span, entities[tail].span)
            label = int(relation_labels[int(np.argmax(block))])
            if label != NULL_ID:
                relations.append(Relation(head=head, tail=tail, label=label))
    logger.debug("hard decode: %d entities, %d relations", len(entities), len(relations))
    return ExtractionResult(entities=tuple(entities), relations=tuple(relations), decoder_tag='hard')


def _segmentations(n: int):
    for mask in range(2 ** (n - 1)):
        yield tuple(k for k in range(1, n) if mask >> (k - 1) & 1)


def oracle_decode(p: ProbTensor, ls: LabelSpace) -> ExtractionResult:
    """
    Exhaustive search over every segmentation of a short sentence.

    Each segment takes its best entity-or-null label and each ordered entity
    pair its best relation-or-null label, both read off the symmetrized
    tensor; a candidate scores the summed log probability, under the tensor as
    given, of the table it renders. Ties prefer fewer entities, then the
    lexicographically smallest split tuple.
    """
    n = p.size
    if n > ORACLE_MAX_LENGTH:
        raise OracleSizeError(f"Oracle decoding needs |s| <= {ORACLE_MAX_LENGTH}, got |s| = {n}.")
    log_p = np.log(np.clip(p.values, LOG_FLOOR, None))
    p = symmetrize(p, ls)
    rows, cols = np.indices((n, n))
    entity_cache, relation_cache = {}, {}

    best = None
    for splits in _segmentations(n):
        bounds = (0,) + splits + (n,)
        entities = []
        for span in zip(bounds[:-1], bounds[1:]):
            if span not in entity_cache:
                entity_cache[span] = entity_type_decode(p, span, ls)
            if entity_cache[span] != NULL_ID:
                entities.append(Entity(start=span[0], end=span[1], label=entity_cache[span]))
        table = np.full((n, n), NULL_ID, dtype=np.int64)
        for entity in entities:
            table[entity.start:entity.end, entity.start:entity.end] = entity.label
        relations = []
        if ls.relation_ids.size:
            for head, tail in itertools.permutations(range(len(entities)), 2):
                key = (entities[head].span, entities[tail].span)
                if key not in relation_cache:
                    relation_cache[key] = relation_type_decode(p, key[0], key[1], ls)
                label = relation_cache[key]
                if label != NULL_ID:
                    relations.append(Relation(head=head, tail=tail, label=label))
                    table[key[0][0]:key[0][1], key[1][0]:key[1][1]] = label
        score = float(log_p[rows, cols, table].sum())
        rank = (len(entities), splits)
        if (best is None or score > best[0] + _SCORE_TOLERANCE
                or (abs(score - best[0]) <= _SCORE_TOLERANCE and rank < best[1])):
            best = (score, rank, entities, relations)

    _, _, entities, relations = best
    return ExtractionResult(entities=tuple(entities), relations=tuple(relations), decoder_tag='oracle')


def run_decoder(name: str, p: ProbTensor, ls: LabelSpace, cfg: Optional[DecodeConfig] = None) -> ExtractionResult:
    """Dispatch by decoder tag: joint, hard or oracle."""
    if name == 'joint':
        return joint_decode(p, ls, cfg)
    if name == 'hard':
        return hard_decode(p, ls)
    if name == 'oracle':
        return oracle_decode(p, ls)
    raise ValueError(f"Unknown decoder {name!r}; expected joint, hard or oracle.")


def agreement_rate(tensors: Sequence[ProbTensor], ls: LabelSpace, cfg: Optional[DecodeConfig] = None,
                   decoder: str = 'joint') -> float:
    """Fraction of tensors on which `decoder` returns the same structure as the oracle."""
    if not tensors:
        raise ValueError("agreement_rate needs at least one tensor.")
    agree = sum(
        run_decoder(decoder, p, ls, cfg).structure(ls) == oracle_decode(p, ls).structure(ls)
        for p in tensors
    )
    return agree / len(tensors)
