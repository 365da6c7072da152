# decoder/tasks.py
from celery import shared_task

from .decoding import run_decoder
from .models import DecodeConfig
from .serializers import PredictionSerializer


def _render(results, ls):
    return [PredictionSerializer(result, context={'label_space': ls}).data for result in results]


@shared_task
def decode_tensor_shard(tensor_path, labels_path, start, stop, decoder='joint', threshold=1.4,
                        distance_mode='squared'):
    """
    Decode tensors [start, stop) of a tensor batch file.

    Args:
        tensor_path (str): URTN1 tensor batch file.
        labels_path (str): Label-space sidecar matching the file's label table.
        start, stop (int): Shard bounds.
        decoder (str): joint, hard or oracle.

    Returns:
        list[dict]: One prediction record per tensor, in order.
    """
    from corpus.storage import read_label_space
    from corpus.tensor_io import read_tensors

    ls = read_label_space(labels_path)
    tensors = read_tensors(tensor_path, ls)[start:stop]
    cfg = DecodeConfig(threshold=threshold, distance_mode=distance_mode)
    return _render((run_decoder(decoder, p, ls, cfg) for p in tensors), ls)


@shared_task
def predict_corpus_shard(checkpoint_path, corpus_path, start, stop, decoder='joint', threshold=1.4,
                         distance_mode='squared', labels_path=None):
    """
    Run a trained checkpoint over corpus sentences [start, stop) and decode them.

    Returns:
        list[dict]: One prediction record per sentence, in order.
    """
    from corpus.storage import load_model, read_corpus

    annotations, ls = read_corpus(corpus_path, labels_path)
    model, vocab = load_model(checkpoint_path)
    cfg = DecodeConfig(threshold=threshold, distance_mode=distance_mode)
    results = (
        run_decoder(decoder, model.predict(vocab.lookup(sentence.tokens)), ls, cfg)
        for sentence in annotations[start:stop]
    )
    return _render(results, ls)
