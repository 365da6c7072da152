from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from corpus.generator import generate_corpus
from corpus.models import GenConfig
from corpus.storage import write_corpus

from ._options import library_errors, resolve_seed


class Command(BaseCommand):
    help = 'Generate a synthetic corpus: train.jsonl, dev.jsonl and labels.json in --out.'

    def add_arguments(self, parser):
        parser.add_argument('--seed', type=int, default=0)
        parser.add_argument('--n', type=int, default=100, help='Number of sentences.')
        parser.add_argument('--out', default='.', help='Output directory.')
        parser.add_argument('--dev-fraction', type=float, default=0.2)
        parser.add_argument('--min-length', type=int)
        parser.add_argument('--max-length', type=int)
        parser.add_argument('--vocab-size', type=int)
        parser.add_argument('--entity-types', type=int, dest='n_entity_types')
        parser.add_argument('--relation-types', type=int, dest='n_relation_types')
        parser.add_argument('--symmetric-fraction', type=float)
        parser.add_argument('--max-entities', type=int)
        parser.add_argument('--max-entity-length', type=int)
        parser.add_argument('--relation-density', type=float)
        parser.add_argument('--signal', type=float)

    def handle(self, *args, **options):
        if not 0.0 <= options['dev_fraction'] < 1.0:
            raise CommandError('--dev-fraction must be in [0, 1).')
        names = ('min_length', 'max_length', 'vocab_size', 'n_entity_types', 'n_relation_types',
                 'symmetric_fraction', 'max_entities', 'max_entity_length', 'relation_density', 'signal')
        with library_errors():
            cfg = GenConfig.from_settings(seed=resolve_seed(options['seed']),
                                          **{name: options[name] for name in names})
            sentences, ls = generate_corpus(cfg, options['n'])
            n_dev = int(round(len(sentences) * options['dev_fraction']))
            if n_dev == len(sentences):
                n_dev -= 1
            out = Path(options['out'])
            out.mkdir(parents=True, exist_ok=True)
            labels = out / 'labels.json'
            write_corpus(sentences[:len(sentences) - n_dev], ls, out / 'train.jsonl', labels)
            write_corpus(sentences[len(sentences) - n_dev:], ls, out / 'dev.jsonl', labels)
        self.stdout.write(f"Wrote {len(sentences) - n_dev} train and {n_dev} dev sentences to {out}")
