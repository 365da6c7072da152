from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from corpus.storage import labels_path_for, load_model, read_corpus, read_label_space, write_prediction_records
from corpus.tensor_io import read_tensors, write_tensors
from decoder.decoding import ORACLE_MAX_LENGTH
from decoder.models import DECODER_TAGS
from decoder.tasks import decode_tensor_shard, predict_corpus_shard

from ._options import add_decode_options, decode_config, library_errors, run_sharded


class Command(BaseCommand):
    help = 'Decode model outputs (--checkpoint with --corpus) or stored tensors (--tensors) into predictions.'

    def add_arguments(self, parser):
        source = parser.add_mutually_exclusive_group(required=True)
        source.add_argument('--checkpoint', help='Trained checkpoint; needs --corpus.')
        source.add_argument('--tensors', help='URTN1 tensor batch file.')
        parser.add_argument('--corpus', help='Sentences to run the checkpoint over.')
        parser.add_argument('--labels', default=None)
        parser.add_argument('--decoder', choices=DECODER_TAGS, default='joint')
        parser.add_argument('--out', default='predictions.jsonl')
        parser.add_argument('--save-tensors', default=None, help='Also store the model tensors (URTN1).')
        parser.add_argument('--shard-size', type=int, default=None)
        add_decode_options(parser)

    def _check_oracle(self, options, lengths):
        if options['decoder'] != 'oracle':
            return
        for index, n in enumerate(lengths):
            if n > ORACLE_MAX_LENGTH:
                raise CommandError(
                    f"The oracle decoder handles sentences with |s| <= {ORACLE_MAX_LENGTH}; "
                    f"sentence {index} has |s| = {n}."
                )

    def handle(self, *args, **options):
        cfg = decode_config(options)
        shard_options = dict(decoder=options['decoder'], threshold=cfg.threshold, distance_mode=cfg.distance_mode)
        with library_errors():
            if options['checkpoint']:
                if not options['corpus']:
                    raise CommandError('--checkpoint needs --corpus.')
                annotations, ls = read_corpus(options['corpus'], options['labels'])
                self._check_oracle(options, [len(a.tokens) for a in annotations])
                model, vocab = load_model(options['checkpoint'])
                if model.params.n_labels != ls.size:
                    raise CommandError(
                        f"{options['checkpoint']}: checkpoint scores {model.params.n_labels} labels, "
                        f"the label space has {ls.size}."
                    )
                if options['save_tensors']:
                    tensors = [model.predict(vocab.lookup(a.tokens)) for a in annotations]
                    write_tensors(tensors, ls.labels, options['save_tensors'])
                records = run_sharded(
                    predict_corpus_shard, len(annotations), options['shard_size'],
                    checkpoint_path=str(Path(options['checkpoint']).resolve()),
                    corpus_path=str(Path(options['corpus']).resolve()),
                    labels_path=str(Path(options['labels']).resolve()) if options['labels'] else None,
                    **shard_options,
                )
            else:
                labels = options['labels'] or labels_path_for(options['tensors'])
                ls = read_label_space(labels)
                tensors = read_tensors(options['tensors'], ls)
                self._check_oracle(options, [p.size for p in tensors])
                records = run_sharded(
                    decode_tensor_shard, len(tensors), options['shard_size'],
                    tensor_path=str(Path(options['tensors']).resolve()),
                    labels_path=str(Path(labels).resolve()),
                    **shard_options,
                )
            write_prediction_records(records, options['out'])
        self.stdout.write(f"Wrote {len(records)} {options['decoder']} predictions to {options['out']}")
