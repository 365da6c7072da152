"""
Corpus, label-space, prediction and model files.

JSON goes through DRF's renderer and parser and every record is validated by
its serializer; failures surface as CorpusFormatError naming the file, the
line and the offending field.
"""
import csv
import io
import logging
from pathlib import Path
from typing import Iterable, List, Sequence, Tuple, Union

from rest_framework.exceptions import ParseError, ValidationError
from rest_framework.parsers import JSONParser
from rest_framework.renderers import JSONRenderer

from biaffine_net.checkpoint import read_checkpoint, write_checkpoint
from biaffine_net.models import ModelParams
from biaffine_net.network import BiaffineModel
from biaffine_net.vocab import Vocabulary
from common.serializers import LabelSpaceSerializer, SentenceSerializer, describe_errors
from decoder.models import ExtractionResult
from decoder.serializers import PredictionSerializer
from label_table.models import LabelSpace, SentenceAnnotation

from .exceptions import CorpusFormatError

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]
LABELS_FILE = 'labels.json'
VOCAB_SUFFIX = '.vocab.json'


def render_json(data) -> bytes:
    return JSONRenderer().render(data)


def parse_json(raw: bytes, where: str):
    try:
        return JSONParser().parse(io.BytesIO(raw))
    except ParseError as exc:
        raise CorpusFormatError(f"{where}: {exc.detail}") from exc


def _validated(serializer_class, data, where: str, **context):
    serializer = serializer_class(data=data, context=context)
    try:
        serializer.is_valid(raise_exception=True)
    except ValidationError as exc:
        raise CorpusFormatError(f"{where}: {describe_errors(exc.detail)}") from exc
    return serializer.save()


def write_jsonl(records: Iterable, target: PathLike) -> None:
    with open(target, 'wb') as handle:
        for record in records:
            handle.write(render_json(record))
            handle.write(b'\n')


def append_jsonl(record, target: PathLike) -> None:
    with open(target, 'ab') as handle:
        handle.write(render_json(record))
        handle.write(b'\n')


def read_jsonl(source: PathLike) -> List[Tuple[str, object]]:
    """(location, parsed object) per non-blank line."""
    source = Path(source)
    if not source.exists():
        raise CorpusFormatError(f"{source}: no such file.")
    records = []
    with open(source, 'rb') as handle:
        for number, line in enumerate(handle, start=1):
            if line.strip():
                where = f"{source}:{number}"
                records.append((where, parse_json(line, where)))
    return records


def labels_path_for(corpus_path: PathLike) -> Path:
    """The label-space sidecar sits next to the corpus file."""
    return Path(corpus_path).parent / LABELS_FILE


def write_label_space(ls: LabelSpace, target: PathLike) -> None:
    Path(target).write_bytes(render_json(LabelSpaceSerializer(ls).data))


def read_label_space(source: PathLike) -> LabelSpace:
    source = Path(source)
    if not source.exists():
        raise CorpusFormatError(f"{source}: no such label-space file.")
    return _validated(LabelSpaceSerializer, parse_json(source.read_bytes(), str(source)), str(source))


def write_corpus(annotations: Sequence[SentenceAnnotation], ls: LabelSpace, target: PathLike,
                 labels_path: PathLike = None) -> None:
    context = {'label_space': ls}
    write_jsonl((SentenceSerializer(a, context=context).data for a in annotations), target)
    write_label_space(ls, labels_path or labels_path_for(target))
    logger.info("Wrote %d sentences to %s", len(annotations), target)


def read_corpus(source: PathLike, labels_path: PathLike = None) -> Tuple[List[SentenceAnnotation], LabelSpace]:
    ls = read_label_space(labels_path or labels_path_for(source))
    annotations = [
        _validated(SentenceSerializer, data, where, label_space=ls)
        for where, data in read_jsonl(source)
    ]
    return annotations, ls


def write_predictions(results: Sequence[ExtractionResult], ls: LabelSpace, target: PathLike) -> None:
    context = {'label_space': ls}
    write_jsonl((PredictionSerializer(r, context=context).data for r in results), target)


def write_prediction_records(records: Iterable[dict], target: PathLike) -> None:
    write_jsonl(records, target)


def read_predictions(source: PathLike, ls: LabelSpace) -> List[ExtractionResult]:
    return [_validated(PredictionSerializer, data, where, label_space=ls) for where, data in read_jsonl(source)]


def vocab_path_for(checkpoint_path: PathLike) -> Path:
    checkpoint_path = Path(checkpoint_path)
    return checkpoint_path.with_name(checkpoint_path.name + VOCAB_SUFFIX)


def save_model(params: ModelParams, vocab: Vocabulary, target: PathLike) -> None:
    write_checkpoint(params, target)
    vocab_path_for(target).write_bytes(render_json(vocab.to_dict()))
    logger.info("Saved checkpoint %s (%d tokens in vocabulary)", target, len(vocab))


def load_model(source: PathLike) -> Tuple[BiaffineModel, Vocabulary]:
    vocab_path = vocab_path_for(source)
    if not Path(source).exists() or not vocab_path.exists():
        raise CorpusFormatError(f"{source}: checkpoint or its vocabulary sidecar {vocab_path.name} is missing.")
    params = read_checkpoint(source)
    data = parse_json(vocab_path.read_bytes(), str(vocab_path))
    if not isinstance(data, dict) or not isinstance(data.get('tokens'), list):
        raise CorpusFormatError(f"{vocab_path}: tokens: expected a list of strings.")
    vocab = Vocabulary.from_dict(data)
    if len(vocab) != params.vocab_size:
        raise CorpusFormatError(
            f"{vocab_path}: tokens: {len(vocab)} entries, checkpoint embeds {params.vocab_size}."
        )
    return BiaffineModel(params), vocab


def write_json(data, target: PathLike) -> None:
    Path(target).write_bytes(render_json(data))


def write_csv(header: Sequence[str], rows: Iterable[Sequence], target) -> None:
    """Write to a path, or to an open text stream such as a command's stdout."""
    if isinstance(target, (str, Path)):
        with open(target, 'w', newline='') as handle:
            write_csv(header, rows, handle)
        return
    writer = csv.writer(target, lineterminator='\n')
    writer.writerow(header)
    writer.writerows(rows)
