"""Argument helpers shared by the unire management commands."""
import logging
from contextlib import contextmanager

from django.conf import settings
from django.core.management.base import CommandError
from rest_framework.exceptions import ValidationError

from common.serializers import LabelSpaceSerializer, SentenceSerializer
from corpus.storage import labels_path_for, read_corpus, read_label_space
from corpus.tensor_io import read_tensors
from decoder.models import DISTANCE_MODES, DecodeConfig
from decoder.serializers import PredictionSerializer
from evaluation.models import ErrorBreakdown, EvalReport
from evaluation.serializers import ShardCountsSerializer
from evaluation.tasks import score_shard
from label_table.exceptions import TableConsistencyError

logger = logging.getLogger(__name__)

LIBRARY_ERRORS = (ValueError, ArithmeticError, OSError, TableConsistencyError, ValidationError)


def resolve_seed(seed):
    """UNIRE_SEED, when set, wins over the flag."""
    if settings.UNIRE['SEED'] is not None:
        return settings.UNIRE['SEED']
    return seed


def add_decode_options(parser):
    parser.add_argument('--alpha', type=float, default=None,
                        help='Span boundary threshold (default UNIRE_THRESHOLD).')
    parser.add_argument('--distance-mode', choices=DISTANCE_MODES, default=None,
                        help='Adjacent-row distance (default UNIRE_DISTANCE_MODE).')


def decode_config(options) -> DecodeConfig:
    try:
        return DecodeConfig.from_settings(threshold=options.get('alpha'), distance_mode=options.get('distance_mode'))
    except ValueError as exc:
        raise CommandError(str(exc))


def add_tensor_options(parser, required=True):
    parser.add_argument('--tensors', required=required, help='URTN1 tensor batch file.')
    parser.add_argument('--labels', default=None,
                        help='Label-space file (default: labels.json next to the tensor file).')


def run_sharded(task, count: int, shard_size: int = None, **kwargs) -> list:
    """Dispatch `task` over [start, stop) shards and concatenate the results in order."""
    shard_size = shard_size or settings.UNIRE['DECODE_SHARD_SIZE']
    pending = [
        task.delay(start=start, stop=min(start + shard_size, count), **kwargs)
        for start in range(0, count, shard_size)
    ]
    logger.debug("%s: %d shards of up to %d items", task.name, len(pending), shard_size)
    merged = []
    for result in pending:
        merged.extend(result.get())
    return merged


@contextmanager
def library_errors():
    """Turn library failures into CommandError (exit status 1)."""
    try:
        yield
    except LIBRARY_ERRORS as exc:
        raise CommandError(str(exc)) from exc


def score_sharded(predictions, golds, ls, shard_size: int = None):
    """Fan `evaluation.tasks.score_shard` out over aligned slices; returns (EvalReport, ErrorBreakdown)."""
    if len(predictions) != len(golds):
        raise CommandError(f"{len(predictions)} predictions for {len(golds)} gold sentences.")
    shard_size = shard_size or settings.UNIRE['DECODE_SHARD_SIZE']
    context = {'label_space': ls}
    label_space = LabelSpaceSerializer(ls).data
    pending = [
        score_shard.delay(
            [PredictionSerializer(p, context=context).data for p in predictions[start:start + shard_size]],
            [SentenceSerializer(g, context=context).data for g in golds[start:start + shard_size]],
            label_space,
        )
        for start in range(0, len(golds), shard_size)
    ]
    report, errors = EvalReport(), ErrorBreakdown()
    for result in pending:
        shard = ShardCountsSerializer(data=result.get())
        shard.is_valid(raise_exception=True)
        counts = shard.validated_data
        report = report + EvalReport.from_counts(counts)
        errors = errors + ErrorBreakdown.from_dict(counts['errors'])
    return report, errors


def read_tensor_batch(options):
    """Tensors from --tensors with the label space from --labels or the sidecar next to them."""
    ls = read_label_space(options['labels'] or labels_path_for(options['tensors']))
    return read_tensors(options['tensors'], ls), ls


def read_tensors_with_gold(options):
    tensors, ls = read_tensor_batch(options)
    golds, gold_ls = read_corpus(options['gold'], options['labels'])
    if gold_ls != ls:
        raise CommandError(f"{options['gold']}: label space differs from the tensor file's.")
    return tensors, golds, ls
