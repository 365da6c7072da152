# evaluation/tasks.py
from celery import shared_task

from common.serializers import LabelSpaceSerializer, SentenceSerializer
from decoder.serializers import PredictionSerializer

from .metrics import corpus_error_taxonomy, corpus_eval


def _load(serializer_class, rows, ls):
    items = []
    for row in rows:
        serializer = serializer_class(data=row, context={'label_space': ls})
        serializer.is_valid(raise_exception=True)
        items.append(serializer.save())
    return items


@shared_task
def score_shard(predictions, golds, label_space):
    """
    Score one shard of predictions against its gold sentences.

    Args:
        predictions (list[dict]): Prediction records.
        golds (list[dict]): Gold sentence records, aligned with predictions.
        label_space (dict): Label-space declaration.

    Returns:
        dict: entity/relation/span count triples and error-category counts,
        merged by the caller.
    """
    ls_serializer = LabelSpaceSerializer(data=label_space)
    ls_serializer.is_valid(raise_exception=True)
    ls = ls_serializer.save()
    preds = _load(PredictionSerializer, predictions, ls)
    sentences = _load(SentenceSerializer, golds, ls)
    counts = corpus_eval(preds, sentences, ls).as_counts()
    counts['errors'] = corpus_error_taxonomy(preds, sentences, ls).as_dict()
    return counts
