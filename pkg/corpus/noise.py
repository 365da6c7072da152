import logging
from typing import List, Optional, Sequence

import numpy as np

from decoder.decoding import run_decoder
from decoder.models import DecodeConfig
from label_table.models import LabelSpace, ProbTensor, SentenceAnnotation, structure_of
from label_table.tables import one_hot_tensor, render_gold_table

from .models import NoiseConfig

logger = logging.getLogger(__name__)


def corrupt_tensor(p: ProbTensor, cfg: NoiseConfig, rng: Optional[np.random.Generator] = None) -> ProbTensor:
    """
    Perturb a probability tensor.

    dirichlet-jitter mixes every cell with a flat Dirichlet draw at weight
    sigma; label-flip replaces a cell, with probability sigma, by a one-hot
    at a label other than its argmax. Pass `rng` to share one stream across
    a batch; otherwise a fresh generator is seeded from `cfg.seed`.
    """
    rng = rng if rng is not None else np.random.default_rng(cfg.seed)
    values = p.values
    if cfg.sigma == 0.0:
        return ProbTensor(values=values.copy(), labels=p.labels)
    n, _, n_labels = values.shape
    if cfg.mode == 'dirichlet-jitter':
        jitter = rng.dirichlet(np.ones(n_labels), size=(n, n))
        mixed = (1.0 - cfg.sigma) * values + cfg.sigma * jitter
        mixed /= mixed.sum(axis=2, keepdims=True)
        return ProbTensor(values=mixed, labels=p.labels)

    if n_labels < 2:
        return ProbTensor(values=values.copy(), labels=p.labels)
    flipped = values.copy()
    hit = rng.random((n, n)) < cfg.sigma
    shift = rng.integers(1, n_labels, size=(n, n))
    wrong = (np.argmax(values, axis=2) + shift) % n_labels
    rows, cols = np.nonzero(hit)
    flipped[rows, cols, :] = 0.0
    flipped[rows, cols, wrong[rows, cols]] = 1.0
    return ProbTensor(values=flipped, labels=p.labels)


def corrupt_batch(tensors: Sequence[ProbTensor], cfg: NoiseConfig) -> List[ProbTensor]:
    rng = np.random.default_rng(cfg.seed)
    return [corrupt_tensor(p, cfg, rng) for p in tensors]


def render_tensors(annotations: Sequence[SentenceAnnotation], ls: LabelSpace, epsilon: float = 0.0,
                   noise: Optional[NoiseConfig] = None) -> List[ProbTensor]:
    """Gold one-hot (optionally smoothed) tensors for a corpus, corrupted when `noise` is given."""
    tensors = [one_hot_tensor(render_gold_table(a, ls), ls, epsilon) for a in annotations]
    if noise is not None:
        tensors = corrupt_batch(tensors, noise)
    return tensors


def recovery_rate(annotations: Sequence[SentenceAnnotation], ls: LabelSpace, noise: NoiseConfig,
                  cfg: Optional[DecodeConfig] = None, decoder: str = 'joint', epsilon: float = 0.0) -> float:
    """Fraction of sentences whose structure `decoder` recovers exactly from corrupted gold tensors."""
    if not annotations:
        raise ValueError("recovery_rate needs at least one annotation.")
    tensors = render_tensors(annotations, ls, epsilon, noise)
    recovered = 0
    for annotation, p in zip(annotations, tensors):
        gold = structure_of(annotation.entities, annotation.relations, ls)
        recovered += run_decoder(decoder, p, ls, cfg).structure(ls) == gold
    rate = recovered / len(annotations)
    logger.info("%s recovery under %s sigma=%.3f: %.4f", decoder, noise.mode, noise.sigma, rate)
    return rate
