from pathlib import Path

from django.core.management.base import BaseCommand

from corpus.storage import read_corpus, read_predictions, render_json, write_json
from evaluation.reports import REPORT_FORMATS, report_text
from evaluation.serializers import EvalReportSerializer

from ._options import library_errors, score_sharded


class Command(BaseCommand):
    help = 'Score predictions against gold sentences with the strict criterion; print the report as JSON or text.'

    def add_arguments(self, parser):
        parser.add_argument('--predictions', required=True)
        parser.add_argument('--gold', required=True)
        parser.add_argument('--labels', default=None)
        parser.add_argument('--format', choices=REPORT_FORMATS, default='json')
        parser.add_argument('--out', default=None, help='Also write the report, in --format, to this file.')
        parser.add_argument('--shard-size', type=int, default=None)

    def handle(self, *args, **options):
        with library_errors():
            golds, ls = read_corpus(options['gold'], options['labels'])
            predictions = read_predictions(options['predictions'], ls)
            report, _ = score_sharded(predictions, golds, ls, options['shard_size'])
            data = EvalReportSerializer(report).data
            if options['format'] == 'text':
                output = report_text(data)
                if options['out']:
                    Path(options['out']).write_text(output + '\n')
            else:
                output = render_json(data).decode('utf-8')
                if options['out']:
                    write_json(data, options['out'])
        self.stdout.write(output)
