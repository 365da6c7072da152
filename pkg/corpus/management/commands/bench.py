from django.core.management.base import BaseCommand, CommandError

from corpus.benchmark import bench_decoders, span_stage_scaling, synthetic_batch
from corpus.storage import write_csv

from ._options import (
    add_decode_options, add_tensor_options, decode_config, library_errors, read_tensor_batch, resolve_seed,
)


class Command(BaseCommand):
    help = 'Decoding throughput of joint versus hard decoding (median of --runs), or span-stage scaling.'

    def add_arguments(self, parser):
        add_tensor_options(parser, required=False)
        parser.add_argument('--count', type=int, default=500, help='Synthetic batch size when no --tensors.')
        parser.add_argument('--length', type=int, default=100, help='Synthetic sentence length.')
        parser.add_argument('--n-labels', type=int, default=8, help='Synthetic label count, null included.')
        parser.add_argument('--runs', type=int, default=5)
        parser.add_argument('--warmup', type=int, default=1)
        parser.add_argument('--seed', type=int, default=0)
        parser.add_argument('--scaling', action='store_true', help='Time the span stage across --lengths instead.')
        parser.add_argument('--lengths', default='50,100,200,400')
        add_decode_options(parser)

    def handle(self, *args, **options):
        seed = resolve_seed(options['seed'])
        with library_errors():
            if options['scaling']:
                try:
                    lengths = [int(part) for part in options['lengths'].split(',') if part.strip()]
                except ValueError:
                    raise CommandError(f"--lengths: expected comma-separated integers, got {options['lengths']!r}.")
                rows = span_stage_scaling(lengths, options['n_labels'], runs=options['runs'], seed=seed)
                write_csv(
                    ('length', 'seconds_per_sentence', 'ratio_to_previous'),
                    ([row['length'], f"{row['seconds']:.6g}", '' if row['ratio'] is None else f"{row['ratio']:.3f}"]
                     for row in rows),
                    self.stdout,
                )
                return

            if options['tensors']:
                tensors, ls = read_tensor_batch(options)
            else:
                tensors, ls = synthetic_batch(options['count'], options['length'], options['n_labels'], seed)
            table = bench_decoders(tensors, ls, decode_config(options), options['runs'], options['warmup'])
            write_csv(
                ('decoder', 'sentences', 'median_seconds', 'sentences_per_second'),
                ([row.decoder, row.sentences, f"{row.median_seconds:.6g}", f"{row.sentences_per_second:.1f}"]
                 for row in table),
                self.stdout,
            )
