"""
Table-filling objectives: cell cross-entropy, the symmetry penalty and the
implication hinge. Subgradients at |.| and hinge kinks are zero.
"""
import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from biaffine_net.models import LogitDropout, ModelParams
from biaffine_net.network import BiaffineModel
from label_table.models import GoldTable, LabelSpace, ProbTensor

from .models import Example, LossReport, SentenceLoss

logger = logging.getLogger(__name__)

PROB_FLOOR = 1e-12


@dataclass(frozen=True, eq=False)
class LossTerm:
    """A loss value and its gradient (w.r.t. logits for L_entry, w.r.t. 𝒫 otherwise)."""
    value: float
    grad: np.ndarray
    clamped: int = 0


def loss_entry(p_dropped: ProbTensor, gold: GoldTable) -> LossTerm:
    """Mean negative log-likelihood of the gold label over all |s|² cells."""
    values = p_dropped.values
    n = p_dropped.size
    if gold.size != n:
        raise ValueError(f"Gold table size {gold.size} does not match tensor size {n}.")
    rows, cols = np.indices((n, n))
    picked = values[rows, cols, gold.cells]
    clamped = int(np.count_nonzero(picked < PROB_FLOOR))
    if clamped:
        logger.warning("Clamped %d gold probabilities below %g in L_entry.", clamped, PROB_FLOOR)
    value = float(-np.log(np.maximum(picked, PROB_FLOOR)).sum() / (n * n))
    grad = values.copy()
    grad[rows, cols, gold.cells] -= 1.0
    return LossTerm(value=value, grad=grad / (n * n), clamped=clamped)


def loss_sym(p_clean: ProbTensor, ls: LabelSpace) -> LossTerm:
    """(1/|s|²) Σ_ij Σ_{t∈Y_sym} |𝒫[i,j,t] − 𝒫[j,i,t]|, both orders of each pair counted."""
    values = p_clean.values
    n = p_clean.size
    grad = np.zeros_like(values)
    sym = ls.symmetric_ids
    if sym.size == 0:
        return LossTerm(value=0.0, grad=grad)
    sliced = values[:, :, sym]
    diff = sliced - sliced.transpose(1, 0, 2)
    value = float(np.abs(diff).sum() / (n * n))
    # d/dP[i,j] picks up sign(D[i,j]) from term (i,j) and again from term (j,i)
    grad[:, :, sym] = 2.0 * np.sign(diff) / (n * n)
    return LossTerm(value=value, grad=grad)


def loss_imp(p_clean: ProbTensor, ls: LabelSpace) -> LossTerm:
    """
    (1/|s|) Σ_i [max relation prob in row i or column i − max entity prob at (i,i)]_+.

    No margin. Ties among maxima go to the smallest row-major cell index,
    then the smallest label id.
    """
    values = p_clean.values
    n, _, n_labels = values.shape
    grad = np.zeros_like(values)
    relations, entities = ls.relation_ids, ls.entity_ids
    if relations.size == 0:
        return LossTerm(value=0.0, grad=grad)

    index = np.arange(n)
    rel = values[:, :, relations]
    width = relations.size
    row_flat = rel.reshape(n, -1)
    col_flat = rel.transpose(1, 0, 2).reshape(n, -1)
    row_arg, col_arg = row_flat.argmax(axis=1), col_flat.argmax(axis=1)
    row_max, col_max = row_flat[index, row_arg], col_flat[index, col_arg]
    row_j, row_l = np.divmod(row_arg, width)
    col_j, col_l = np.divmod(col_arg, width)
    row_key = (index * n + row_j) * n_labels + relations[row_l]
    col_key = (col_j * n + index) * n_labels + relations[col_l]
    use_row = (row_max > col_max) | ((row_max == col_max) & (row_key <= col_key))
    rel_max = np.where(use_row, row_max, col_max)

    diag = values[index, index][:, entities]
    ent_arg = diag.argmax(axis=1)
    ent_max = diag[index, ent_arg]

    hinge = rel_max - ent_max
    active = hinge > 0
    value = float(hinge[active].sum() / n)
    if np.any(active):
        rel_rows = np.where(use_row, index, col_j)[active]
        rel_cols = np.where(use_row, row_j, index)[active]
        rel_labels = relations[np.where(use_row, row_l, col_l)][active]
        np.add.at(grad, (rel_rows, rel_cols, rel_labels), 1.0 / n)
        np.add.at(grad, (index[active], index[active], entities[ent_arg][active]), -1.0 / n)
    return LossTerm(value=value, grad=grad)


def table_losses(p_dropped: ProbTensor, p_clean: ProbTensor, gold: GoldTable, ls: LabelSpace,
                 use_sym: bool = True, use_imp: bool = True):
    """
    Per-sentence losses with their gradients.

    Returns (SentenceLoss, gradient w.r.t. the dropped logits, gradient w.r.t. clean 𝒫).
    """
    entry = loss_entry(p_dropped, gold)
    grad_probs = np.zeros_like(p_clean.values)
    l_sym = l_imp = 0.0
    if use_sym:
        sym = loss_sym(p_clean, ls)
        l_sym, grad_probs = sym.value, grad_probs + sym.grad
    if use_imp:
        imp = loss_imp(p_clean, ls)
        l_imp, grad_probs = imp.value, grad_probs + imp.grad
    return SentenceLoss(l_entry=entry.value, l_sym=l_sym, l_imp=l_imp), entry.grad, grad_probs


def total_loss(model: BiaffineModel, batch: Sequence[Example], ls: LabelSpace, use_sym: bool = True,
               use_imp: bool = True, dropout: Optional[LogitDropout] = None):
    """
    L_entry + L_sym + L_imp averaged over the batch, with summed-then-averaged gradients.

    L_entry sees the dropped logits; L_sym and L_imp see 𝒫 computed without dropout.
    """
    grads: ModelParams = model.params.zeros_like()
    losses = []
    for example in batch:
        forward = model.forward(example.token_ids, dropout)
        loss, grad_logits, grad_probs = table_losses(
            forward.dropped_probs, forward.probs, example.gold, ls, use_sym=use_sym, use_imp=use_imp,
        )
        losses.append(loss)
        grads.add_(model.backward(forward, grad_logits=grad_logits, grad_probs=grad_probs))
    if batch:
        grads = grads.map(lambda array: array / len(batch))
    return LossReport.from_sentences(losses), grads
