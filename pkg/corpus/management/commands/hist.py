from django.core.management.base import BaseCommand

from corpus.storage import write_csv
from decoder.models import DISTANCE_MODES
from evaluation.analysis import BIN_WIDTH, distance_histogram

from ._options import add_tensor_options, decode_config, library_errors, read_tensors_with_gold


class Command(BaseCommand):
    help = 'Histogram of adjacent-row distances at gold entity boundaries versus everywhere else (CSV).'

    def add_arguments(self, parser):
        add_tensor_options(parser)
        parser.add_argument('--gold', required=True)
        parser.add_argument('--distance-mode', choices=DISTANCE_MODES, default=None,
                            help='Adjacent-row distance (default UNIRE_DISTANCE_MODE).')
        parser.add_argument('--out', default=None, help='CSV file (default stdout).')

    def handle(self, *args, **options):
        with library_errors():
            tensors, golds, ls = read_tensors_with_gold(options)
            histogram = distance_histogram(tensors, golds, ls, decode_config(options).distance_mode)
            last = len(histogram.edges) - 1
            rows = (
                [f"{low:g}", f"{low + BIN_WIDTH:g}" if index < last else 'inf', ent, non_ent]
                for index, (low, ent, non_ent) in enumerate(
                    zip(histogram.edges, histogram.ent_bound, histogram.non_ent_bound))
            )
            write_csv(('bin_low', 'bin_high', 'ent_bound', 'non_ent_bound'), rows, options['out'] or self.stdout)
