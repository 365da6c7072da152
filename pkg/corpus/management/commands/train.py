from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from biaffine_net.models import TrainConfig
from corpus.storage import append_jsonl, read_corpus, save_model, write_csv, write_json
from objectives.serializers import EpochRecordSerializer, TrainingSummarySerializer
from objectives.training import TrainingCorpus, run_ablation, train

from ._options import add_decode_options, decode_config, library_errors, resolve_seed


class Command(BaseCommand):
    help = ('Train the biaffine table filler; writes the checkpoint, its vocabulary, a JSON-lines epoch log '
            'and a JSON run summary.')

    def add_arguments(self, parser):
        parser.add_argument('--train', required=True, help='Training corpus (JSON lines).')
        parser.add_argument('--dev', default=None, help='Dev corpus (default: dev.jsonl next to --train).')
        parser.add_argument('--labels', default=None)
        parser.add_argument('--checkpoint', default='model.ckpt')
        parser.add_argument('--log', default=None, help='Epoch log, one JSON line per epoch (default: <checkpoint>.log.jsonl).')
        parser.add_argument('--seed', type=int, default=0)
        parser.add_argument('--hidden-size', type=int)
        parser.add_argument('--embedding-size', type=int)
        parser.add_argument('--mlp-depth', type=int)
        parser.add_argument('--dropout', type=float, dest='logit_dropout')
        parser.add_argument('--lr', type=float, dest='learning_rate')
        parser.add_argument('--weight-decay', type=float)
        parser.add_argument('--warmup-ratio', type=float)
        parser.add_argument('--batch-size', type=int)
        parser.add_argument('--epochs', type=int, dest='max_epochs')
        parser.add_argument('--patience', type=int)
        parser.add_argument('--no-sym-loss', action='store_false', dest='use_sym_loss')
        parser.add_argument('--no-imp-loss', action='store_false', dest='use_imp_loss')
        parser.add_argument('--no-logit-dropout', action='store_false', dest='use_logit_dropout')
        parser.add_argument('--ablation', action='store_true',
                            help='Train the default and every ablated variant; print dev F1 deltas as CSV.')
        add_decode_options(parser)

    def handle(self, *args, **options):
        names = ('hidden_size', 'embedding_size', 'mlp_depth', 'logit_dropout', 'learning_rate', 'weight_decay',
                 'warmup_ratio', 'batch_size', 'max_epochs', 'patience',
                 'use_sym_loss', 'use_imp_loss', 'use_logit_dropout')
        dev_path = options['dev'] or str(Path(options['train']).with_name('dev.jsonl'))
        with library_errors():
            config = TrainConfig.from_settings(seed=resolve_seed(options['seed']),
                                               **{name: options[name] for name in names})
            train_set, ls = read_corpus(options['train'], options['labels'])
            dev_set, dev_ls = read_corpus(dev_path, options['labels'])
            if dev_ls != ls:
                raise CommandError(f"{dev_path}: label space differs from {options['train']}.")
            corpus = TrainingCorpus(train=train_set, dev=dev_set, label_space=ls)
            decoding = decode_config(options)

            if options['ablation']:
                rows = run_ablation(corpus, config, decoding)
                write_csv(
                    ('variant', 'dev_ent_f1', 'dev_rel_f1', 'ent_delta', 'rel_delta'),
                    ([name, row['dev_ent_f1'], row['dev_rel_f1'], row['ent_delta'], row['rel_delta']]
                     for name, row in rows.items()),
                    self.stdout,
                )
                return

            log_path = options['log'] or f"{options['checkpoint']}.log.jsonl"
            Path(log_path).write_bytes(b'')
            result = train(corpus, config, decoding,
                           on_epoch=lambda record: append_jsonl(EpochRecordSerializer(record).data, log_path))
            save_model(result.params, corpus.vocab, options['checkpoint'])
            summary_path = f"{options['checkpoint']}.summary.json"
            write_json(TrainingSummarySerializer({'result': result, 'config': config}).data, summary_path)
        self.stdout.write(
            f"Trained {len(result.log)} epochs; best epoch {result.best_epoch} "
            f"(dev score {result.best_score:.4f}); checkpoint {options['checkpoint']}, log {log_path}"
        )
