"""
Tensor batch container.

Layout: magic b"URTN1", uint32 |Y|, |Y| label names (uint16 byte length +
UTF-8), uint32 tensor count, then per tensor a uint32 |s| followed by the
|s|*|s|*|Y| row-major float32 block. All integers and floats little-endian.
"""
import struct
from pathlib import Path
from typing import BinaryIO, List, Optional, Sequence, Union

import numpy as np

from label_table.exceptions import InvalidTensorError
from label_table.models import LabelSpace, ProbTensor

from .exceptions import TensorFormatError

TENSOR_MAGIC = b'URTN1'
_COUNT = struct.Struct('<I')
_NAME_LENGTH = struct.Struct('<H')
_DTYPE = np.dtype('<f4')


def write_tensors(tensors: Sequence[ProbTensor], labels: Sequence[str], target: Union[str, Path, BinaryIO]) -> None:
    labels = tuple(labels)
    for index, p in enumerate(tensors):
        if p.n_labels != len(labels):
            raise TensorFormatError(f"Tensor {index} has {p.n_labels} labels, the table declares {len(labels)}.")
    if not isinstance(target, (str, Path)):
        _write(tensors, labels, target)
        return
    with open(target, 'wb') as handle:
        _write(tensors, labels, handle)


def _write(tensors, labels, handle: BinaryIO) -> None:
    handle.write(TENSOR_MAGIC)
    handle.write(_COUNT.pack(len(labels)))
    for name in labels:
        encoded = name.encode('utf-8')
        handle.write(_NAME_LENGTH.pack(len(encoded)))
        handle.write(encoded)
    handle.write(_COUNT.pack(len(tensors)))
    for p in tensors:
        handle.write(_COUNT.pack(p.size))
        handle.write(np.ascontiguousarray(p.values, dtype=_DTYPE).tobytes())


def _read_exact(handle: BinaryIO, size: int, what: str) -> bytes:
    data = handle.read(size)
    if len(data) != size:
        raise TensorFormatError(f"Truncated tensor file while reading {what}.")
    return data


def read_tensors(source: Union[str, Path, BinaryIO], ls: Optional[LabelSpace] = None) -> List[ProbTensor]:
    """Read every tensor; with `ls`, the file's label table must equal the label space's."""
    if not isinstance(source, (str, Path)):
        return _read(source, ls)
    with open(source, 'rb') as handle:
        return _read(handle, ls)


def _read_header(handle: BinaryIO) -> tuple:
    magic = handle.read(len(TENSOR_MAGIC))
    if magic != TENSOR_MAGIC:
        raise TensorFormatError(f"Bad tensor file magic {magic!r}, expected {TENSOR_MAGIC!r}.")
    (n_labels,) = _COUNT.unpack(_read_exact(handle, _COUNT.size, 'label count'))
    labels = []
    for index in range(n_labels):
        (length,) = _NAME_LENGTH.unpack(_read_exact(handle, _NAME_LENGTH.size, f'label {index}'))
        labels.append(_read_exact(handle, length, f'label {index}').decode('utf-8'))
    return tuple(labels)


def _read(handle: BinaryIO, ls: Optional[LabelSpace]) -> List[ProbTensor]:
    labels = _read_header(handle)
    if ls is not None and labels != ls.labels:
        raise TensorFormatError(f"Tensor label table {list(labels)} does not match the label space {list(ls.labels)}.")
    (count,) = _COUNT.unpack(_read_exact(handle, _COUNT.size, 'tensor count'))
    tensors = []
    for index in range(count):
        (n,) = _COUNT.unpack(_read_exact(handle, _COUNT.size, f'tensor {index} size'))
        size = n * n * len(labels)
        raw = _read_exact(handle, size * _DTYPE.itemsize, f'tensor {index}')
        values = np.frombuffer(raw, dtype=_DTYPE).reshape(n, n, len(labels)).astype(np.float64)
        try:
            tensors.append(ProbTensor(values=values, labels=labels))
        except InvalidTensorError as exc:
            raise TensorFormatError(f"tensor {index}: {exc}") from exc
    if handle.read(1):
        raise TensorFormatError(f"Trailing bytes after {count} tensors.")
    return tensors
