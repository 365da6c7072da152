"""
Model checkpoint container.

Layout: magic b"UNIRE1", a little-endian header of five uint32
(vocab size, embedding width, hidden size d, |Y|, MLP depth), then every
parameter block of `ModelParams.named_arrays()` in declared order as raw
little-endian float64. Block shapes follow from the header.
"""
import struct
from pathlib import Path
from typing import BinaryIO, Union

import numpy as np

from .exceptions import CheckpointFormatError
from .models import ModelParams

CHECKPOINT_MAGIC = b'UNIRE1'
_HEADER = struct.Struct(
    '<'
    'I'  # vocab size
    'I'  # embedding width
    'I'  # hidden size d
    'I'  # number of labels
    'I'  # MLP depth
)
_DTYPE = np.dtype('<f8')


def _shapes(vocab_size, embedding_size, hidden_size, n_labels, mlp_depth):
    shapes = [(vocab_size, embedding_size)]
    for _side in ('head', 'tail'):
        width = embedding_size
        for _ in range(mlp_depth):
            shapes += [(width, hidden_size), (hidden_size,)]
            width = hidden_size
    shapes += [(n_labels, hidden_size, hidden_size), (n_labels, 2 * hidden_size), (n_labels,)]
    return shapes


def write_checkpoint(params: ModelParams, target: Union[str, Path, BinaryIO]) -> None:
    if not isinstance(target, (str, Path)):
        _write(params, target)
        return
    with open(target, 'wb') as handle:
        _write(params, handle)


def _write(params: ModelParams, handle: BinaryIO) -> None:
    handle.write(CHECKPOINT_MAGIC)
    handle.write(_HEADER.pack(params.vocab_size, params.embedding_size, params.hidden_size,
                              params.n_labels, params.mlp_depth))
    for _, array in params.named_arrays():
        handle.write(np.ascontiguousarray(array, dtype=_DTYPE).tobytes())


def read_checkpoint(source: Union[str, Path, BinaryIO]) -> ModelParams:
    if not isinstance(source, (str, Path)):
        return _read(source)
    with open(source, 'rb') as handle:
        return _read(handle)


def _read(handle: BinaryIO) -> ModelParams:
    magic = handle.read(len(CHECKPOINT_MAGIC))
    if magic != CHECKPOINT_MAGIC:
        raise CheckpointFormatError(f"Bad checkpoint magic {magic!r}, expected {CHECKPOINT_MAGIC!r}.")
    raw_header = handle.read(_HEADER.size)
    if len(raw_header) != _HEADER.size:
        raise CheckpointFormatError("Truncated checkpoint header.")
    vocab_size, embedding_size, hidden_size, n_labels, mlp_depth = _HEADER.unpack(raw_header)
    if min(vocab_size, embedding_size, hidden_size, n_labels, mlp_depth) < 1:
        raise CheckpointFormatError("Checkpoint header declares an empty dimension.")

    blocks = []
    for shape in _shapes(vocab_size, embedding_size, hidden_size, n_labels, mlp_depth):
        count = int(np.prod(shape))
        data = handle.read(count * _DTYPE.itemsize)
        if len(data) != count * _DTYPE.itemsize:
            raise CheckpointFormatError(f"Truncated parameter block of shape {shape}.")
        blocks.append(np.frombuffer(data, dtype=_DTYPE).astype(np.float64).reshape(shape))
    if handle.read(1):
        raise CheckpointFormatError("Trailing bytes after the last parameter block.")

    embeddings, rest = blocks[0], blocks[1:]
    per_side = 2 * mlp_depth
    head, tail = rest[:per_side], rest[per_side:2 * per_side]
    U1, U2, b = rest[2 * per_side:]
    return ModelParams(
        embeddings=embeddings,
        head_weights=head[0::2], head_biases=head[1::2],
        tail_weights=tail[0::2], tail_biases=tail[1::2],
        U1=U1, U2=U2, b=b,
    )
