import logging
import math
from typing import List, Optional, Sequence

import numpy as np

from decoder.decoding import adjacent_distances, joint_decode
from decoder.models import DecodeConfig
from label_table.models import LabelSpace, ProbTensor, SentenceAnnotation
from label_table.tables import symmetrize

from .metrics import corpus_eval, entity_boundaries
from .models import DistanceHistogram, SweepRow

logger = logging.getLogger(__name__)

BIN_WIDTH = 0.1
HISTOGRAM_RANGE = 5.0


def alpha_grid(start: float, stop: float, step: float) -> List[float]:
    """Inclusive grid start, start+step, ..., stop (rounded to absorb float drift)."""
    if step <= 0 or stop < start:
        raise ValueError(f"Bad grid {start}:{stop}:{step}.")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 10) for i in range(count)]


def parse_alpha_grid(text: str) -> List[float]:
    """Parse 'start:stop:step' or a comma-separated list of thresholds."""
    if ':' in text:
        parts = text.split(':')
        if len(parts) != 3:
            raise ValueError(f"Expected start:stop:step, got {text!r}.")
        return alpha_grid(*(float(part) for part in parts))
    values = [float(part) for part in text.split(',') if part.strip()]
    if not values:
        raise ValueError("The threshold grid is empty.")
    return values


DEFAULT_ALPHAS = alpha_grid(0.6, 2.0, 0.1)


def _check_pairs(tensors, golds):
    if len(tensors) != len(golds):
        raise ValueError(f"{len(tensors)} tensors for {len(golds)} gold sentences.")
    for index, (p, gold) in enumerate(zip(tensors, golds)):
        if p.size != len(gold.tokens):
            raise ValueError(f"Tensor {index} has |s| = {p.size} but its sentence has {len(gold.tokens)} tokens.")


def distance_histogram(tensors: Sequence[ProbTensor], golds: Sequence[SentenceAnnotation], ls: LabelSpace,
                       mode: str = 'squared') -> DistanceHistogram:
    """
    Bin every adjacent-position distance by whether the position is a gold
    entity boundary. Bins are [k·0.1, (k+1)·0.1) over [0, 5) plus an overflow bin.
    """
    _check_pairs(tensors, golds)
    n_bins = int(round(HISTOGRAM_RANGE / BIN_WIDTH))
    ent = np.zeros(n_bins + 1, dtype=np.int64)
    non_ent = np.zeros(n_bins + 1, dtype=np.int64)
    for p, gold in zip(tensors, golds):
        distances = adjacent_distances(symmetrize(p, ls), mode)
        if distances.size == 0:
            continue
        bins = np.minimum(np.floor(np.round(distances / BIN_WIDTH, 9)).astype(np.int64), n_bins)
        boundary = np.zeros(distances.size, dtype=bool)
        for k in entity_boundaries(gold.entities, p.size):
            boundary[k - 1] = True
        np.add.at(ent, bins[boundary], 1)
        np.add.at(non_ent, bins[~boundary], 1)
    edges = tuple(round(i * BIN_WIDTH, 10) for i in range(n_bins + 1))
    return DistanceHistogram(edges=edges, ent_bound=tuple(int(c) for c in ent),
                             non_ent_bound=tuple(int(c) for c in non_ent))


def threshold_sweep(tensors: Sequence[ProbTensor], golds: Sequence[SentenceAnnotation], ls: LabelSpace,
                    alphas: Optional[Sequence[float]] = None, mode: str = 'squared') -> List[SweepRow]:
    """Re-decode the batch at each threshold and score it."""
    _check_pairs(tensors, golds)
    alphas = list(DEFAULT_ALPHAS if alphas is None else alphas)
    if not alphas:
        raise ValueError("The threshold grid is empty.")
    rows = []
    for alpha in alphas:
        cfg = DecodeConfig(threshold=alpha, distance_mode=mode)
        report = corpus_eval([joint_decode(p, ls, cfg) for p in tensors], golds, ls)
        rows.append(SweepRow(alpha=alpha, span_f1=report.span_f1, entity_f1=report.entity.f1,
                             relation_f1=report.relation.f1))
        logger.debug("alpha %.3f: span F1 %.4f", alpha, report.span_f1)
    return rows
