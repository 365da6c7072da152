from django.core.management.base import BaseCommand, CommandError

from corpus.storage import write_csv
from decoder.models import DISTANCE_MODES
from evaluation.analysis import DEFAULT_ALPHAS, parse_alpha_grid, threshold_sweep

from ._options import add_tensor_options, decode_config, library_errors, read_tensors_with_gold


class Command(BaseCommand):
    help = 'Re-decode a tensor batch over a grid of thresholds; CSV of span/entity/relation F1 per alpha.'

    def add_arguments(self, parser):
        add_tensor_options(parser)
        parser.add_argument('--gold', required=True)
        parser.add_argument('--alphas', default=None, help="'start:stop:step' (inclusive) or a comma list.")
        parser.add_argument('--distance-mode', choices=DISTANCE_MODES, default=None,
                            help='Adjacent-row distance (default UNIRE_DISTANCE_MODE).')
        parser.add_argument('--out', default=None, help='CSV file (default stdout).')

    def handle(self, *args, **options):
        try:
            alphas = parse_alpha_grid(options['alphas']) if options['alphas'] else DEFAULT_ALPHAS
        except ValueError as exc:
            raise CommandError(f"--alphas: {exc}")
        with library_errors():
            tensors, golds, ls = read_tensors_with_gold(options)
            rows = threshold_sweep(tensors, golds, ls, alphas, decode_config(options).distance_mode)
            write_csv(
                ('alpha', 'span_f1', 'entity_f1', 'relation_f1'),
                ([f"{r.alpha:g}", f"{r.span_f1:.6f}", f"{r.entity_f1:.6f}", f"{r.relation_f1:.6f}"] for r in rows),
                options['out'] or self.stdout,
            )
