from pathlib import Path

from django.core.management.base import BaseCommand

from corpus.storage import read_corpus, read_predictions, render_json, write_json
from evaluation.reports import REPORT_FORMATS, breakdown_text
from evaluation.serializers import ErrorBreakdownSerializer

from ._options import library_errors, score_sharded


class Command(BaseCommand):
    help = 'Break unrecovered gold relations down by error category (SSE, ENF, ETE, RNF, RTE).'

    def add_arguments(self, parser):
        parser.add_argument('--predictions', required=True)
        parser.add_argument('--gold', required=True)
        parser.add_argument('--labels', default=None)
        parser.add_argument('--format', choices=REPORT_FORMATS, default='json')
        parser.add_argument('--out', default=None)
        parser.add_argument('--shard-size', type=int, default=None)

    def handle(self, *args, **options):
        with library_errors():
            golds, ls = read_corpus(options['gold'], options['labels'])
            predictions = read_predictions(options['predictions'], ls)
            _, breakdown = score_sharded(predictions, golds, ls, options['shard_size'])
            data = ErrorBreakdownSerializer(breakdown).data
            if options['format'] == 'text':
                output = breakdown_text(data)
                if options['out']:
                    Path(options['out']).write_text(output + '\n')
            else:
                output = render_json(data).decode('utf-8')
                if options['out']:
                    write_json(data, options['out'])
        self.stdout.write(output)
