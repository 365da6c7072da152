"""
Toy sentence encoder, head/tail MLPs and the deep biaffine scorer.

The pre-trained encoder is replaced by a trainable embedding lookup; every
later stage follows the table-filling model: two dimension-reducing GELU
MLPs give head and tail views of each word, and a biaffine form turns every
(head_i, tail_j) pair into a |Y|-dimensional logit vector. Gradients are
computed analytically and checked against finite differences in the tests.
"""
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np
from scipy.special import erf

from label_table.models import LabelSpace, ProbTensor
from label_table.tables import symmetrize_backward

from .exceptions import ForwardStateError, NumericError
from .models import UNK_ID, LogitDropout, ModelParams, ScoreTable

logger = logging.getLogger(__name__)

_SQRT2 = np.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / np.sqrt(2.0 * np.pi)


def gelu(x: np.ndarray) -> np.ndarray:
    """Exact GELU, x * Phi(x)."""
    return 0.5 * x * (1.0 + erf(x / _SQRT2))


def gelu_grad(x: np.ndarray) -> np.ndarray:
    return 0.5 * (1.0 + erf(x / _SQRT2)) + x * _INV_SQRT_2PI * np.exp(-0.5 * x * x)


def _check_finite(array: np.ndarray, location: str) -> np.ndarray:
    if not np.all(np.isfinite(array)):
        raise NumericError(location)
    return array


@dataclass
class ForwardPass:
    """Activations cached by one forward pass, consumed by `backward`."""
    token_ids: np.ndarray
    h: np.ndarray
    head_cache: List[tuple]
    tail_cache: List[tuple]
    h_head: np.ndarray
    h_tail: np.ndarray
    scores: ScoreTable
    dropped: Optional[ScoreTable] = None
    _probs: Optional[ProbTensor] = field(default=None, repr=False)
    _dropped_probs: Optional[ProbTensor] = field(default=None, repr=False)

    @property
    def probs(self) -> ProbTensor:
        """Clean 𝒫 (no logit dropout)."""
        if self._probs is None:
            self._probs = softmax_cells(self.scores)
        return self._probs

    @property
    def training_scores(self) -> ScoreTable:
        """The logits the training softmax sees: dropped if dropout ran, else clean."""
        return self.dropped if self.dropped is not None else self.scores

    @property
    def dropped_probs(self) -> ProbTensor:
        """𝒫 after logit dropout; the clean tensor when dropout is off."""
        if self.dropped is None:
            return self.probs
        if self._dropped_probs is None:
            self._dropped_probs = softmax_cells(self.dropped)
        return self._dropped_probs


def encode(token_ids: Sequence[int], params: ModelParams) -> np.ndarray:
    """Embedding lookup; ids outside the vocabulary map to UNK."""
    ids = np.asarray(token_ids, dtype=np.int64).reshape(-1)
    ids = np.where((ids < 0) | (ids >= params.vocab_size), UNK_ID, ids)
    return _check_finite(params.embeddings[ids], 'token embeddings')


def _mlp_forward(x: np.ndarray, weights, biases, side: str):
    cache = []
    for depth, (weight, bias) in enumerate(zip(weights, biases)):
        pre = x @ weight + bias
        _check_finite(pre, f'{side} MLP layer {depth}')
        cache.append((x, pre))
        x = gelu(pre)
    return x, cache


def _mlp_backward(grad: np.ndarray, cache, weights, weight_grads, bias_grads) -> np.ndarray:
    for depth in reversed(range(len(cache))):
        x, pre = cache[depth]
        grad_pre = grad * gelu_grad(pre)
        weight_grads[depth] += x.T @ grad_pre
        bias_grads[depth] += grad_pre.sum(axis=0)
        grad = grad_pre @ weights[depth].T
    return grad


def biaffine(h_head: np.ndarray, h_tail: np.ndarray, params: ModelParams) -> np.ndarray:
    """g[i, j] = h_head_i^T U1 h_tail_j + U2 (h_head_i ⊕ h_tail_j) + b, shape |s|×|s|×|Y|."""
    d = params.hidden_size
    bilinear = np.einsum('ia,tab,jb->ijt', h_head, params.U1, h_tail, optimize=True)
    linear_head = h_head @ params.U2[:, :d].T
    linear_tail = h_tail @ params.U2[:, d:].T
    return bilinear + linear_head[:, None, :] + linear_tail[None, :, :] + params.b


def apply_logit_dropout(scores: ScoreTable, dropout: LogitDropout) -> ScoreTable:
    keep = dropout.rng.random(scores.logits.shape) >= dropout.rate
    scale = 1.0 / (1.0 - dropout.rate)
    return ScoreTable(logits=scores.logits * keep * scale, dropout_mask=keep, keep_scale=scale)


def score_table(h: np.ndarray, params: ModelParams, dropout: Optional[LogitDropout] = None) -> ScoreTable:
    """Score every word pair; with `dropout`, logits are dropped and the mask recorded."""
    return _forward_from_h(np.zeros(len(h), dtype=np.int64), h, params, dropout).training_scores


def softmax_cells(scores: ScoreTable) -> ProbTensor:
    """Per-cell softmax over the label axis, stabilized by max-subtraction."""
    logits = scores.logits
    shifted = logits - logits.max(axis=2, keepdims=True)
    exp = np.exp(shifted)
    return ProbTensor(values=exp / exp.sum(axis=2, keepdims=True))


def _forward_from_h(token_ids, h, params, dropout) -> ForwardPass:
    if len(h) < 1:
        raise ValueError("Cannot score an empty sentence.")
    h_head, head_cache = _mlp_forward(h, params.head_weights, params.head_biases, 'head')
    h_tail, tail_cache = _mlp_forward(h, params.tail_weights, params.tail_biases, 'tail')
    logits = _check_finite(biaffine(h_head, h_tail, params), 'biaffine logits')
    scores = ScoreTable(logits=logits)
    dropped = apply_logit_dropout(scores, dropout) if dropout is not None else None
    return ForwardPass(
        token_ids=token_ids, h=h, head_cache=head_cache, tail_cache=tail_cache,
        h_head=h_head, h_tail=h_tail, scores=scores, dropped=dropped,
    )


class BiaffineModel:
    """
    Stateful wrapper binding parameters to the forward/backward functions.

    `forward` returns its cached activations; `backward` takes them explicitly
    or falls back to the most recent pass, so disjoint sentences can be run
    concurrently against shared read-only parameters.
    """

    def __init__(self, params: ModelParams):
        self.params = params
        self._last: Optional[ForwardPass] = None

    def encode(self, token_ids: Sequence[int]) -> np.ndarray:
        return encode(token_ids, self.params)

    def forward(self, token_ids: Sequence[int], dropout: Optional[LogitDropout] = None) -> ForwardPass:
        ids = np.asarray(token_ids, dtype=np.int64).reshape(-1)
        ids = np.where((ids < 0) | (ids >= self.params.vocab_size), UNK_ID, ids)
        self._last = _forward_from_h(ids, encode(ids, self.params), self.params, dropout)
        return self._last

    def predict(self, token_ids: Sequence[int]) -> ProbTensor:
        """Clean probability tensor for inference."""
        return self.forward(token_ids).probs

    def backward(self, forward: Optional[ForwardPass] = None, grad_logits: Optional[np.ndarray] = None,
                 grad_probs: Optional[np.ndarray] = None, grad_probs_symmetrized: Optional[np.ndarray] = None,
                 ls: Optional[LabelSpace] = None) -> ModelParams:
        """
        Parameter gradients from upstream gradients of one forward pass.

        grad_logits is taken w.r.t. the logits fed to the dropped softmax (the
        clean logits when dropout was off); grad_probs w.r.t. the clean 𝒫;
        grad_probs_symmetrized w.r.t. symmetrize(𝒫), which requires `ls`.
        """
        forward = forward if forward is not None else self._last
        if forward is None:
            raise ForwardStateError("backward() called before any forward pass.")
        params = self.params
        n, n_labels = forward.scores.logits.shape[0], params.n_labels
        grad_g = np.zeros((n, n, n_labels))

        if grad_logits is not None:
            if forward.dropped is not None:
                grad_g += grad_logits * forward.dropped.dropout_mask * forward.dropped.keep_scale
            else:
                grad_g += grad_logits
        if grad_probs_symmetrized is not None:
            if ls is None:
                raise ValueError("grad_probs_symmetrized needs the label space.")
            extra = symmetrize_backward(grad_probs_symmetrized, ls)
            grad_probs = extra if grad_probs is None else grad_probs + extra
        if grad_probs is not None:
            probs = forward.probs.values
            grad_g += probs * (grad_probs - (grad_probs * probs).sum(axis=2, keepdims=True))

        grads = params.zeros_like()
        d = params.hidden_size
        h_head, h_tail = forward.h_head, forward.h_tail
        grads.U1 += np.einsum('ijt,ia,jb->tab', grad_g, h_head, h_tail, optimize=True)
        row_sums = grad_g.sum(axis=1)  # (i, t)
        col_sums = grad_g.sum(axis=0)  # (j, t)
        grads.U2[:, :d] += row_sums.T @ h_head
        grads.U2[:, d:] += col_sums.T @ h_tail
        grads.b += grad_g.sum(axis=(0, 1))

        grad_head = np.einsum('ijt,tab,jb->ia', grad_g, params.U1, h_tail, optimize=True) + row_sums @ params.U2[:, :d]
        grad_tail = np.einsum('ijt,tab,ia->jb', grad_g, params.U1, h_head, optimize=True) + col_sums @ params.U2[:, d:]

        grad_h = _mlp_backward(grad_head, forward.head_cache, params.head_weights,
                               grads.head_weights, grads.head_biases)
        grad_h = grad_h + _mlp_backward(grad_tail, forward.tail_cache, params.tail_weights,
                                        grads.tail_weights, grads.tail_biases)
        np.add.at(grads.embeddings, forward.token_ids, grad_h)
        return grads
