"""
Decoding throughput.

Timings cover symmetrization and every decode stage; tensors are built
beforehand and never timed.
"""
import logging
import statistics
import time
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from decoder.decoding import hard_decode, joint_decode, span_decode
from decoder.models import DecodeConfig
from label_table.models import LabelSpace, ProbTensor
from label_table.tables import symmetrize

from .generator import generate_corpus
from .models import GenConfig, NoiseConfig
from .noise import render_tensors

logger = logging.getLogger(__name__)

BENCH_DECODERS = ('joint', 'hard')


@dataclass(frozen=True)
class Throughput:
    decoder: str
    sentences: int
    median_seconds: float

    @property
    def sentences_per_second(self) -> float:
        return self.sentences / self.median_seconds if self.median_seconds > 0 else float('inf')


def _median_time(work, runs: int, warmup: int) -> float:
    for _ in range(warmup):
        work()
    timings = []
    for _ in range(runs):
        started = time.perf_counter()
        work()
        timings.append(time.perf_counter() - started)
    return statistics.median(timings)


def bench_decoders(tensors: Sequence[ProbTensor], ls: LabelSpace, cfg: Optional[DecodeConfig] = None,
                   runs: int = 5, warmup: int = 1) -> List[Throughput]:
    """Median-of-`runs` throughput of joint and hard decoding over the same batch."""
    if not tensors:
        raise ValueError("bench_decoders needs a non-empty tensor batch.")
    if runs < 1 or warmup < 0:
        raise ValueError("Need runs >= 1 and warmup >= 0.")
    cfg = cfg or DecodeConfig()
    decoders = {
        'joint': lambda: [joint_decode(p, ls, cfg) for p in tensors],
        'hard': lambda: [hard_decode(p, ls) for p in tensors],
    }
    table = []
    for name in BENCH_DECODERS:
        row = Throughput(decoder=name, sentences=len(tensors), median_seconds=_median_time(decoders[name], runs, warmup))
        logger.info("%s decoding: %.1f sentences/s over %d sentences", name, row.sentences_per_second, row.sentences)
        table.append(row)
    return table


def bench_config(length: int, n_labels: int = 8, seed: int = 0) -> GenConfig:
    """Generator settings for fixed-length sentences with about one entity per ten tokens."""
    if n_labels < 2:
        raise ValueError("Need at least the null label and one entity type.")
    n_entity_types = max(1, (n_labels - 1) // 3)
    n_relation_types = n_labels - 1 - n_entity_types
    max_entities = max(1, length // 10)
    n_pools = 4 + n_entity_types + 2 * n_relation_types
    return GenConfig(
        seed=seed, min_length=length, max_length=length,
        vocab_size=n_pools * max(max_entities, 2) * 3,
        n_entity_types=n_entity_types, n_relation_types=n_relation_types,
        max_entities=max_entities, relation_density=0.5,
    )


def synthetic_batch(count: int, length: int, n_labels: int = 8, seed: int = 0,
                    sigma: float = 0.05) -> Tuple[List[ProbTensor], LabelSpace]:
    """Gold tables of generated sentences under Dirichlet jitter, standing in for model output."""
    annotations, ls = generate_corpus(bench_config(length, n_labels, seed), count)
    noise = NoiseConfig(mode='dirichlet-jitter', sigma=sigma, seed=seed)
    return render_tensors(annotations, ls, noise=noise), ls


def span_stage_scaling(lengths: Sequence[int] = (50, 100, 200, 400), n_labels: int = 8, count: int = 5,
                       runs: int = 5, seed: int = 0) -> List[Dict[str, float]]:
    """
    Median span-stage time per sentence length.

    Each row carries the length, the median seconds per sentence and the ratio
    to the previous length's time (None for the first row). Doubling the
    length should roughly quadruple the time.
    """
    cfg = DecodeConfig()
    rows = []
    previous = None
    for length in lengths:
        tensors, ls = synthetic_batch(count, length, n_labels, seed)
        tensors = [symmetrize(p, ls) for p in tensors]
        seconds = _median_time(lambda: [span_decode(p, cfg) for p in tensors], runs, warmup=1) / count
        rows.append({'length': length, 'seconds': seconds, 'ratio': seconds / previous if previous else None})
        previous = seconds
    return rows
