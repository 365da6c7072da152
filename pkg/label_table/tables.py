import numpy as np

from .exceptions import InvalidAnnotationError, TableConsistencyError
from .models import NULL_ID, GoldTable, LabelSpace, ProbTensor, SentenceAnnotation


def render_gold_table(ann: SentenceAnnotation, ls: LabelSpace) -> GoldTable:
    """
    Fill the |s|×|s| table from an annotation.

    Entity squares sit on the diagonal, relation rectangles at (head rows,
    tail columns); every other cell is the null label.
    """
    ann.validate(ls)
    n = len(ann.tokens)
    cells = np.full((n, n), NULL_ID, dtype=np.int64)
    for entity in ann.entities:
        block = cells[entity.start:entity.end, entity.start:entity.end]
        if np.any(block != NULL_ID):
            raise InvalidAnnotationError(f"Entity span [{entity.start}, {entity.end}) overlaps another entity.")
        block[...] = entity.label
    for relation in ann.relations:
        head = ann.entities[relation.head]
        tail = ann.entities[relation.tail]
        block = cells[head.start:head.end, tail.start:tail.end]
        taken = (block != NULL_ID) & (block != relation.label)
        if np.any(taken):
            raise TableConsistencyError(
                f"Relation {ls.name_of(relation.label)!r} collides with label "
                f"{ls.name_of(int(block[taken][0]))!r} in rectangle "
                f"[{head.start}, {head.end})x[{tail.start}, {tail.end})."
            )
        block[...] = relation.label
    return GoldTable(cells=cells)


def one_hot_tensor(table: GoldTable, ls: LabelSpace, epsilon: float = 0.0) -> ProbTensor:
    """Turn a gold table into a (label-smoothed) probability tensor."""
    if epsilon < 0 or epsilon * ls.size >= 1:
        raise ValueError(f"Smoothing {epsilon} must satisfy 0 <= epsilon * |Y| < 1 (|Y| = {ls.size}).")
    n = table.size
    values = np.full((n, n, ls.size), epsilon, dtype=np.float64)
    gold = 1.0 - epsilon * (ls.size - 1)
    rows, cols = np.indices((n, n))
    values[rows, cols, table.cells] = gold
    return ProbTensor(values=values, labels=ls.labels)


def argmax_table(p: ProbTensor) -> GoldTable:
    """Per-cell argmax; ties go to the smallest label id."""
    return GoldTable(cells=np.argmax(p.values, axis=2).astype(np.int64))


def symmetrize(p: ProbTensor, ls: LabelSpace) -> ProbTensor:
    """
    Average each symmetric label's slice with its transpose.

    Asymmetric labels pass through unchanged; cells are not renormalized.
    """
    values = p.values.copy()
    sym = ls.symmetric_ids
    if sym.size:
        sliced = p.values[:, :, sym]
        values[:, :, sym] = (sliced + sliced.transpose(1, 0, 2)) / 2.0
    return ProbTensor(values=values, labels=p.labels)


def symmetrize_backward(grad: np.ndarray, ls: LabelSpace) -> np.ndarray:
    """Gradient of `symmetrize`: each source cell receives half of both mirrored gradients."""
    out = grad.copy()
    sym = ls.symmetric_ids
    if sym.size:
        sliced = grad[:, :, sym]
        out[:, :, sym] = (sliced + sliced.transpose(1, 0, 2)) / 2.0
    return out
