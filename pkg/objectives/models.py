from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from biaffine_net.models import ModelParams
from label_table.models import GoldTable


@dataclass(frozen=True)
class SentenceLoss:
    """Loss components of one sentence."""
    l_entry: float
    l_sym: float = 0.0
    l_imp: float = 0.0

    @property
    def total(self) -> float:
        return self.l_entry + self.l_sym + self.l_imp


@dataclass(frozen=True)
class LossReport:
    """
    Batch-level losses: each component is the mean over sentences of the
    per-sentence (length-normalized) values, and `total` is their plain sum.
    """
    l_entry: float
    l_sym: float
    l_imp: float
    per_sentence: Tuple[SentenceLoss, ...] = ()

    @property
    def total(self) -> float:
        return self.l_entry + self.l_sym + self.l_imp

    @classmethod
    def from_sentences(cls, losses) -> 'LossReport':
        losses = tuple(losses)
        if not losses:
            return cls(0.0, 0.0, 0.0)
        count = len(losses)
        return cls(
            l_entry=sum(loss.l_entry for loss in losses) / count,
            l_sym=sum(loss.l_sym for loss in losses) / count,
            l_imp=sum(loss.l_imp for loss in losses) / count,
            per_sentence=losses,
        )


@dataclass
class OptimizerState:
    """AdamW moments plus the warmup/decay schedule position."""
    first_moment: ModelParams
    second_moment: ModelParams
    total_steps: int
    warmup_ratio: float
    step: int = 0

    @classmethod
    def for_params(cls, params: ModelParams, total_steps: int, warmup_ratio: float) -> 'OptimizerState':
        if total_steps < 1:
            raise ValueError("total_steps must be >= 1.")
        return cls(
            first_moment=params.zeros_like(),
            second_moment=params.zeros_like(),
            total_steps=total_steps,
            warmup_ratio=warmup_ratio,
        )


@dataclass(frozen=True, eq=False)
class Example:
    """A training sentence: vocabulary ids and its gold table."""
    token_ids: np.ndarray
    gold: GoldTable


@dataclass(frozen=True)
class EpochRecord:
    """One line of the training log."""
    epoch: int
    l_entry: float
    l_sym: float
    l_imp: float
    dev_ent_f1: float
    dev_rel_f1: float
    lr: float

    @property
    def dev_score(self) -> float:
        """Model-selection metric: mean of entity and relation F1."""
        return (self.dev_ent_f1 + self.dev_rel_f1) / 2.0


@dataclass
class TrainingResult:
    params: ModelParams
    log: List[EpochRecord] = field(default_factory=list)
    best_epoch: Optional[int] = None
    best_score: float = float('-inf')
    stopped_early: bool = False
