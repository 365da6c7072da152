from django.core.management.base import BaseCommand

from corpus.models import NOISE_MODES, NoiseConfig
from corpus.noise import render_tensors
from corpus.storage import labels_path_for, read_corpus
from corpus.tensor_io import write_tensors

from ._options import library_errors, resolve_seed


class Command(BaseCommand):
    help = 'Render gold tables of a corpus as (smoothed, optionally corrupted) probability tensors.'

    def add_arguments(self, parser):
        parser.add_argument('--corpus', required=True)
        parser.add_argument('--labels', default=None)
        parser.add_argument('--out', required=True, help='URTN1 tensor batch file to write.')
        parser.add_argument('--epsilon', type=float, default=0.0, help='Label smoothing per non-gold label.')
        parser.add_argument('--noise', choices=NOISE_MODES, default=None)
        parser.add_argument('--sigma', type=float, default=0.0)
        parser.add_argument('--seed', type=int, default=0)

    def handle(self, *args, **options):
        with library_errors():
            annotations, ls = read_corpus(options['corpus'], options['labels'])
            noise = None
            if options['noise']:
                noise = NoiseConfig(mode=options['noise'], sigma=options['sigma'], seed=resolve_seed(options['seed']))
            tensors = render_tensors(annotations, ls, options['epsilon'], noise)
            write_tensors(tensors, ls.labels, options['out'])
        self.stdout.write(
            f"Wrote {len(tensors)} tensors to {options['out']} (labels: {options['labels'] or labels_path_for(options['corpus'])})"
        )
