import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from biaffine_net.models import LogitDropout, ModelParams, TrainConfig
from biaffine_net.network import BiaffineModel
from biaffine_net.vocab import Vocabulary
from decoder.decoding import joint_decode
from decoder.models import DecodeConfig
from evaluation.metrics import corpus_eval
from label_table.models import LabelSpace, SentenceAnnotation
from label_table.tables import render_gold_table

from .exceptions import EmptyCorpusError, TrainingDivergedError
from .losses import total_loss
from .models import EpochRecord, Example, LossReport, OptimizerState, TrainingResult
from .optim import optimizer_step

logger = logging.getLogger(__name__)


@dataclass
class TrainingCorpus:
    """Train/dev splits sharing one label space; the vocabulary defaults to train tokens."""
    train: Sequence[SentenceAnnotation]
    dev: Sequence[SentenceAnnotation]
    label_space: LabelSpace
    vocab: Optional[Vocabulary] = None

    def __post_init__(self):
        if not self.train or not self.dev:
            raise EmptyCorpusError("Training needs non-empty train and dev splits.")
        if self.vocab is None:
            self.vocab = Vocabulary.build(sentence.tokens for sentence in self.train)

    def examples(self) -> List[Example]:
        return [
            Example(
                token_ids=np.asarray(self.vocab.lookup(sentence.tokens), dtype=np.int64),
                gold=render_gold_table(sentence, self.label_space),
            )
            for sentence in self.train
        ]


def evaluate_dev(model: BiaffineModel, corpus: TrainingCorpus, decode_config: DecodeConfig):
    """Joint-decode every dev sentence and score it with the strict criterion."""
    predictions = [
        joint_decode(model.predict(corpus.vocab.lookup(sentence.tokens)), corpus.label_space, decode_config)
        for sentence in corpus.dev
    ]
    return corpus_eval(predictions, corpus.dev, corpus.label_space)


class Trainer:
    """
    Mini-batch AdamW training with dev-based model selection.

    After each epoch the dev split is decoded and scored; the parameters with
    the best mean of entity and relation F1 are kept, and training stops once
    more than `patience` epochs pass without improvement.
    """

    def __init__(self, corpus: TrainingCorpus, config: TrainConfig,
                 decode_config: Optional[DecodeConfig] = None,
                 on_epoch: Optional[Callable[[EpochRecord], None]] = None):
        self.corpus = corpus
        self.config = config
        self.decode_config = decode_config or DecodeConfig()
        self.on_epoch = on_epoch
        self.rng = np.random.default_rng(config.seed)
        self.params = ModelParams.initialize(
            vocab_size=len(corpus.vocab),
            n_labels=corpus.label_space.size,
            embedding_size=config.embedding_size,
            hidden_size=config.hidden_size,
            mlp_depth=config.mlp_depth,
            rng=self.rng,
        )
        self.model = BiaffineModel(self.params)

    def _dropout(self) -> Optional[LogitDropout]:
        if not self.config.use_logit_dropout:
            return None
        return LogitDropout(self.config.logit_dropout, self.rng)

    def fit(self) -> TrainingResult:
        config = self.config
        examples = self.corpus.examples()
        batches_per_epoch = math.ceil(len(examples) / config.batch_size)
        state = OptimizerState.for_params(self.params, config.max_epochs * batches_per_epoch, config.warmup_ratio)
        result = TrainingResult(params=self.params.copy())
        stale_epochs = 0

        for epoch in range(1, config.max_epochs + 1):
            order = self.rng.permutation(len(examples))
            sentence_losses = []
            rate = 0.0
            for start in range(0, len(order), config.batch_size):
                batch = [examples[i] for i in order[start:start + config.batch_size]]
                report, grads = total_loss(
                    self.model, batch, self.corpus.label_space,
                    use_sym=config.use_sym_loss, use_imp=config.use_imp_loss, dropout=self._dropout(),
                )
                if not math.isfinite(report.total) or not grads.is_finite():
                    raise TrainingDivergedError(
                        f"Non-finite loss at epoch {epoch}, step {state.step}: "
                        f"L_entry={report.l_entry}, L_sym={report.l_sym}, L_imp={report.l_imp}."
                    )
                rate = optimizer_step(self.params, grads, state, config)
                sentence_losses.extend(report.per_sentence)

            epoch_loss = LossReport.from_sentences(sentence_losses)
            dev = evaluate_dev(self.model, self.corpus, self.decode_config)
            record = EpochRecord(
                epoch=epoch,
                l_entry=epoch_loss.l_entry,
                l_sym=epoch_loss.l_sym,
                l_imp=epoch_loss.l_imp,
                dev_ent_f1=dev.entity.f1,
                dev_rel_f1=dev.relation.f1,
                lr=rate,
            )
            result.log.append(record)
            logger.info(
                "epoch %d loss=%.6f (entry %.6f sym %.6f imp %.6f) dev ent F1=%.4f rel F1=%.4f lr=%.3g",
                epoch, epoch_loss.total, record.l_entry, record.l_sym, record.l_imp,
                record.dev_ent_f1, record.dev_rel_f1, rate,
            )
            if self.on_epoch is not None:
                self.on_epoch(record)

            if record.dev_score > result.best_score:
                result.best_score = record.dev_score
                result.best_epoch = epoch
                result.params = self.params.copy()
                stale_epochs = 0
            else:
                stale_epochs += 1
                if stale_epochs > config.patience:
                    logger.warning("Early stop at epoch %d; best epoch %d.", epoch, result.best_epoch)
                    result.stopped_early = True
                    break
        return result


def train(corpus: TrainingCorpus, config: TrainConfig, decode_config: Optional[DecodeConfig] = None,
          on_epoch: Optional[Callable[[EpochRecord], None]] = None) -> TrainingResult:
    return Trainer(corpus, config, decode_config, on_epoch=on_epoch).fit()


ABLATIONS = {
    'default': {},
    'w/o symmetry loss': {'use_sym_loss': False},
    'w/o implication loss': {'use_imp_loss': False},
    'w/o logit dropout': {'use_logit_dropout': False},
}


def run_ablation(corpus: TrainingCorpus, config: TrainConfig,
                 decode_config: Optional[DecodeConfig] = None) -> Dict[str, dict]:
    """
    Train the default model and each ablated variant with the same seed.

    Returns, per variant, the best dev entity/relation F1 and their deltas
    against the default.
    """
    rows = {}
    for name, changes in ABLATIONS.items():
        result = train(corpus, config.replace(**changes), decode_config)
        best = next(record for record in result.log if record.epoch == result.best_epoch)
        rows[name] = {'dev_ent_f1': best.dev_ent_f1, 'dev_rel_f1': best.dev_rel_f1}
    baseline = rows['default']
    for row in rows.values():
        row['ent_delta'] = row['dev_ent_f1'] - baseline['dev_ent_f1']
        row['rel_delta'] = row['dev_rel_f1'] - baseline['dev_rel_f1']
    return rows
