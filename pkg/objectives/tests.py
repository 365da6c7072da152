# objectives/tests.py
import math
from unittest import mock

import numpy as np
from django.test import SimpleTestCase

from biaffine_net.models import PAD_ID, LogitDropout, ModelParams, TrainConfig
from biaffine_net.network import BiaffineModel
from biaffine_net.tests import random_params, relative_error
from decoder.tests import ace_label_space, fixture, random_annotation
from label_table.models import GoldTable, LabelSpace, ProbTensor
from label_table.tables import one_hot_tensor, render_gold_table, symmetrize

from .exceptions import EmptyCorpusError, TrainingDivergedError
from .losses import loss_entry, loss_imp, loss_sym, table_losses, total_loss
from .models import Example, LossReport, OptimizerState, SentenceLoss
from .optim import learning_rate_at, optimizer_step
from .serializers import EpochRecordSerializer, TrainingSummarySerializer
from .training import TrainingCorpus, run_ablation, train


def tiny_label_space():
    return LabelSpace.build(['A'], ['R'], symmetric_relations=['R'])


def random_batch(rng, ls, vocab_size, count=2, max_length=4):
    batch = []
    for _ in range(count):
        n = int(rng.integers(2, max_length + 1))
        cells = rng.integers(0, ls.size, size=(n, n))
        batch.append(Example(token_ids=rng.integers(2, vocab_size, size=n), gold=GoldTable(cells=cells)))
    return batch


class LossEntryTest(SimpleTestCase):
    def test_uniform(self):
        """Test a uniform tensor over 3 labels costs ln 3."""
        p = ProbTensor(values=np.full((3, 3, 3), 1 / 3))
        term = loss_entry(p, GoldTable(cells=np.zeros((3, 3), dtype=int)))
        self.assertAlmostEqual(term.value, math.log(3), delta=1e-9)

    def test_one_hot(self):
        """Test the gold one-hot tensor costs exactly 0."""
        ls = ace_label_space()
        table = render_gold_table(fixture(ls), ls)
        self.assertEqual(loss_entry(one_hot_tensor(table, ls), table).value, 0.0)

    def test_half(self):
        """Test a single cell with gold probability 0.5 costs ln 2."""
        p = ProbTensor(values=np.array([[[0.5, 0.5]]]))
        self.assertAlmostEqual(loss_entry(p, GoldTable(cells=np.array([[1]]))).value, math.log(2), delta=1e-12)

    def test_clamped(self):
        """Test a zero gold probability is clamped and counted."""
        p = ProbTensor(values=np.array([[[1.0, 0.0]]]))
        with self.assertLogs('objectives.losses', level='WARNING'):
            term = loss_entry(p, GoldTable(cells=np.array([[1]])))
        self.assertEqual(term.clamped, 1)
        self.assertAlmostEqual(term.value, -math.log(1e-12), delta=1e-9)

    def test_size_mismatch(self):
        """Test gold and tensor sizes must agree."""
        with self.assertRaises(ValueError):
            loss_entry(ProbTensor(values=np.full((2, 2, 2), 0.5)), GoldTable(cells=np.zeros((3, 3), dtype=int)))


class LossSymTest(SimpleTestCase):
    def setUp(self):
        self.ls = tiny_label_space()
        r = self.ls.id_of('R')
        values = np.zeros((2, 2, 3))
        values[0, 0, 1] = values[1, 1, 1] = 1.0
        values[0, 1, r], values[0, 1, 0] = 0.9, 0.1
        values[1, 0, r], values[1, 0, 0] = 0.1, 0.9
        self.p = ProbTensor(values=values)
        self.r = r

    def test_value(self):
        """Test 0.9 vs 0.1 mirrored over |s|=2 costs (0.8 + 0.8) / 4 = 0.4."""
        self.assertAlmostEqual(loss_sym(self.p, self.ls).value, 0.4, delta=1e-12)

    def test_gradient(self):
        """Test both orders contribute, so the gradient at (0,1) is 2/|s|² = 0.5."""
        grad = loss_sym(self.p, self.ls).grad
        self.assertAlmostEqual(grad[0, 1, self.r], 0.5, delta=1e-12)
        self.assertAlmostEqual(grad[1, 0, self.r], -0.5, delta=1e-12)
        self.assertEqual(grad[0, 1, 0], 0.0)

    def test_symmetrized_is_zero(self):
        """Test a symmetrized tensor has no symmetry loss and zero subgradient."""
        term = loss_sym(symmetrize(self.p, self.ls), self.ls)
        self.assertEqual(term.value, 0.0)
        np.testing.assert_array_equal(term.grad, 0.0)


class LossImpTest(SimpleTestCase):
    def setUp(self):
        self.ls = tiny_label_space()

    def test_single_cell(self):
        """Test relation max 0.5 against entity max 0.3 costs 0.2."""
        p = ProbTensor(values=np.array([[[0.2, 0.3, 0.5]]]))
        term = loss_imp(p, self.ls)
        self.assertAlmostEqual(term.value, 0.2, delta=1e-12)
        np.testing.assert_allclose(term.grad[0, 0], [0.0, -1.0, 1.0])

    def test_inactive(self):
        """Test a dominant diagonal entity probability costs nothing."""
        p = ProbTensor(values=np.array([[[0.05, 0.9, 0.05]]]))
        self.assertEqual(loss_imp(p, self.ls).value, 0.0)

    def test_uniform_kink(self):
        """Test equal maxima sit at the hinge kink with zero loss and gradient."""
        term = loss_imp(ProbTensor(values=np.full((3, 3, 3), 1 / 3)), self.ls)
        self.assertEqual(term.value, 0.0)
        np.testing.assert_array_equal(term.grad, 0.0)

    def test_column_maximum(self):
        """Test the relation maximum is taken over the column as well as the row."""
        values = np.zeros((2, 2, 3))
        values[0, 0] = [0.0, 1.0, 0.0]
        values[1, 1] = [0.6, 0.4, 0.0]
        values[0, 1] = [1.0, 0.0, 0.0]
        values[1, 0] = [0.3, 0.0, 0.7]
        term = loss_imp(ProbTensor(values=values), self.ls)
        # row 1 holds 0.7 at (1,0); column 0 also holds it, so token 0 sees 0.7 - 1.0 < 0
        self.assertAlmostEqual(term.value, (0.7 - 0.4) / 2, delta=1e-12)
        self.assertAlmostEqual(term.grad[1, 0, 2], 0.5, delta=1e-12)
        self.assertAlmostEqual(term.grad[1, 1, 1], -0.5, delta=1e-12)

    def test_valid_renderings(self):
        """Test rendered annotations (smoothed below 1/|Y|) satisfy implication and symmetry."""
        ls = ace_label_space()
        rng = np.random.default_rng(0)
        for _ in range(30):
            table = render_gold_table(random_annotation(rng, ls, max_length=15), ls)
            for epsilon in (0.0, 0.05):
                p = one_hot_tensor(table, ls, epsilon)
                self.assertEqual(loss_imp(p, ls).value, 0.0)
                self.assertEqual(loss_sym(p, ls).value, 0.0)


class TotalLossTest(SimpleTestCase):
    def setUp(self):
        self.ls = tiny_label_space()

    def test_report_total(self):
        """Test components (1, 0, 0) total 1."""
        report = LossReport.from_sentences([SentenceLoss(1.0, 0.0, 0.0)])
        self.assertEqual(report.total, 1.0)

    def test_decomposition(self):
        """Test the total equals the sum of the parts on random batches."""
        rng = np.random.default_rng(1)
        model = BiaffineModel(random_params(seed=1))
        report, _ = total_loss(model, random_batch(rng, self.ls, 6, count=3), self.ls)
        self.assertAlmostEqual(report.total - (report.l_entry + report.l_sym + report.l_imp), 0.0, delta=1e-9)
        self.assertTrue(min(report.l_entry, report.l_sym, report.l_imp) >= 0.0)
        self.assertEqual(len(report.per_sentence), 3)

    def test_zero_at_gold(self):
        """Test a one-hot, symmetric, implication-satisfying table has total 0."""
        ls = ace_label_space()
        table = render_gold_table(fixture(ls), ls)
        p = one_hot_tensor(table, ls)
        loss, _, _ = table_losses(p, p, table, ls)
        self.assertEqual(loss.total, 0.0)

    def test_ablated_terms_read_zero(self):
        """Test switched-off terms report 0."""
        rng = np.random.default_rng(2)
        model = BiaffineModel(random_params(seed=2))
        report, _ = total_loss(model, random_batch(rng, self.ls, 6), self.ls, use_sym=False, use_imp=False)
        self.assertEqual((report.l_sym, report.l_imp), (0.0, 0.0))

    def test_gradient_matches_finite_differences(self):
        """Test the summed gradient against central differences on five random batches."""
        h = 1e-5
        for seed in range(5):
            rng = np.random.default_rng(100 + seed)
            params = random_params(seed=100 + seed, n_labels=self.ls.size, embedding_size=4, hidden_size=3)
            batch = random_batch(rng, self.ls, params.vocab_size, count=2, max_length=5)

            def objective():
                dropout = LogitDropout(0.2, np.random.default_rng(seed))
                return total_loss(BiaffineModel(params), batch, self.ls, dropout=dropout)

            _, analytic = objective()
            for (name, array), grad in zip(params.named_arrays(), analytic.arrays()):
                numeric = np.zeros_like(array)
                for index in np.ndindex(array.shape):
                    original = array[index]
                    array[index] = original + h
                    plus = objective()[0].total
                    array[index] = original - h
                    minus = objective()[0].total
                    array[index] = original
                    numeric[index] = (plus - minus) / (2 * h)
                self.assertLessEqual(relative_error(grad, numeric), 1e-4, msg=f'{name} (seed {seed})')

    def test_small_step_does_not_increase_loss(self):
        """Test one tiny step along the negative gradient never raises the loss."""
        for seed in range(10):
            rng = np.random.default_rng(200 + seed)
            params = random_params(seed=200 + seed, n_labels=self.ls.size)
            batch = random_batch(rng, self.ls, params.vocab_size)
            before, grads = total_loss(BiaffineModel(params), batch, self.ls)
            params.add_(grads, scale=-1e-6)
            after, _ = total_loss(BiaffineModel(params), batch, self.ls)
            self.assertLessEqual(after.total, before.total + 1e-12)


class OptimizerTest(SimpleTestCase):
    def small_params(self):
        params = ModelParams.initialize(3, 1, 1, 1, 1, rng=np.random.default_rng(0))
        params.U1[...] = 0.5
        params.U2[...] = -0.25
        params.b[...] = 2.0
        return params

    def test_schedule(self):
        """Test warmup to the base rate, linear decay, and clamping at 0."""
        self.assertEqual(learning_rate_at(0, 1.0, 10, 0.2), 0.0)
        self.assertEqual(learning_rate_at(1, 1.0, 10, 0.2), 0.5)
        self.assertEqual(learning_rate_at(2, 1.0, 10, 0.2), 1.0)
        self.assertEqual(learning_rate_at(6, 1.0, 10, 0.2), 0.5)
        self.assertEqual(learning_rate_at(10, 1.0, 10, 0.2), 0.0)
        self.assertEqual(learning_rate_at(25, 1.0, 10, 0.2), 0.0)

    def test_decay_only(self):
        """Test a zero gradient shrinks weights by (1 - rate * decay) and spares PAD."""
        params = self.small_params()
        before = params.copy()
        config = TrainConfig(learning_rate=0.1, weight_decay=0.01, warmup_ratio=0.0)
        state = OptimizerState.for_params(params, total_steps=10, warmup_ratio=0.0)
        rate = optimizer_step(params, params.zeros_like(), state, config)
        self.assertEqual(rate, 0.1)
        np.testing.assert_allclose(params.U1, before.U1 * (1 - 0.1 * 0.01), rtol=0, atol=1e-15)
        np.testing.assert_array_equal(params.embeddings[PAD_ID], before.embeddings[PAD_ID])
        np.testing.assert_allclose(params.embeddings[1:], before.embeddings[1:] * (1 - 0.001), atol=1e-15)

    def test_first_warmup_step(self):
        """Test step 0 of warmup leaves everything unchanged."""
        params = self.small_params()
        before = params.copy()
        config = TrainConfig(learning_rate=0.1, weight_decay=0.01, warmup_ratio=0.2)
        state = OptimizerState.for_params(params, total_steps=10, warmup_ratio=0.2)
        grads = params.map(np.ones_like)
        self.assertEqual(optimizer_step(params, grads, state, config), 0.0)
        for (name, a), b in zip(params.named_arrays(), before.arrays()):
            np.testing.assert_array_equal(a, b, err_msg=name)
        self.assertEqual(state.step, 1)

    def test_two_steps_by_hand(self):
        """Test two AdamW steps with a constant unit gradient against the update rule."""
        params = self.small_params()
        config = TrainConfig(learning_rate=0.1, weight_decay=0.01, warmup_ratio=0.0, beta1=0.9, beta2=0.9)
        state = OptimizerState.for_params(params, total_steps=10, warmup_ratio=0.0)
        grads = params.map(np.ones_like)
        theta = 2.0
        m = v = 0.0
        for k, rate in ((1, 0.1), (2, 0.09)):
            m = 0.9 * m + 0.1
            v = 0.9 * v + 0.1
            m_hat, v_hat = m / (1 - 0.9 ** k), v / (1 - 0.9 ** k)
            theta = theta - rate * 0.01 * theta
            theta = theta - rate * m_hat / (math.sqrt(v_hat) + 1e-8)
            self.assertAlmostEqual(optimizer_step(params, grads, state, config), rate, delta=1e-15)
        self.assertAlmostEqual(float(params.b[0]), theta, delta=1e-12)

    def test_shape_mismatch(self):
        """Test gradients of the wrong shape are rejected."""
        params = self.small_params()
        other = ModelParams.initialize(4, 1, 1, 1, 1, rng=np.random.default_rng(0))
        state = OptimizerState.for_params(params, total_steps=10, warmup_ratio=0.0)
        with self.assertRaises(ValueError):
            optimizer_step(params, other, state, TrainConfig())


class TrainTest(SimpleTestCase):
    def setUp(self):
        self.ls = ace_label_space()
        self.sentence = fixture(self.ls)

    def corpus(self):
        return TrainingCorpus(train=[self.sentence], dev=[self.sentence], label_space=self.ls)

    def config(self, **changes):
        values = dict(hidden_size=16, embedding_size=16, learning_rate=0.05, logit_dropout=0.0,
                      use_logit_dropout=False, warmup_ratio=0.1, batch_size=1, max_epochs=50, patience=50, seed=0)
        values.update(changes)
        return TrainConfig(**values)

    def test_empty_corpus(self):
        """Test empty splits are rejected."""
        with self.assertRaises(EmptyCorpusError):
            TrainingCorpus(train=[], dev=[self.sentence], label_space=self.ls)

    def test_learns_one_sentence(self):
        """Test 50 epochs on one separable sentence reach entity F1 1.0."""
        result = train(self.corpus(), self.config())
        self.assertEqual(max(record.dev_ent_f1 for record in result.log), 1.0)
        best = result.log[result.best_epoch - 1]
        self.assertEqual(best.dev_score, result.best_score)

    def test_patience_zero(self):
        """Test patience 0 stops at the first epoch without improvement."""
        result = train(self.corpus(), self.config(learning_rate=1e-9, max_epochs=10, patience=0))
        self.assertTrue(result.stopped_early)
        self.assertEqual(len(result.log), 2)
        self.assertEqual(result.best_epoch, 1)

    def test_deterministic(self):
        """Test the same seed twice gives identical logs."""
        config = self.config(max_epochs=3, use_logit_dropout=True, logit_dropout=0.2)
        first = train(self.corpus(), config).log
        second = train(self.corpus(), config).log
        self.assertEqual(first, second)

    def test_log_records(self):
        """Test each epoch logs non-negative losses and the learning rate."""
        records = []
        train(self.corpus(), self.config(max_epochs=2), on_epoch=records.append)
        self.assertEqual([record.epoch for record in records], [1, 2])
        self.assertTrue(all(record.l_entry > 0 and record.lr >= 0 for record in records))

    def test_divergence(self):
        """Test a non-finite loss aborts training with a diagnostic."""
        bad = LossReport(l_entry=float('nan'), l_sym=0.0, l_imp=0.0)
        with mock.patch('objectives.training.total_loss', return_value=(bad, random_params())):
            with self.assertRaises(TrainingDivergedError) as ctx:
                train(self.corpus(), self.config(max_epochs=1))
        self.assertIn('epoch 1', str(ctx.exception))

    def test_ablation_rows(self):
        """Test the ablation run reports every variant with zero delta for the default."""
        rows = run_ablation(self.corpus(), self.config(max_epochs=2))
        self.assertEqual(set(rows), {'default', 'w/o symmetry loss', 'w/o implication loss', 'w/o logit dropout'})
        self.assertEqual(rows['default']['ent_delta'], 0.0)


class TrainingLogSerializerTest(SimpleTestCase):
    def setUp(self):
        ls = ace_label_space()
        sentence = fixture(ls)
        self.config = TrainConfig(hidden_size=4, embedding_size=4, max_epochs=3, patience=5, use_logit_dropout=False)
        self.records = []
        self.result = train(TrainingCorpus(train=[sentence], dev=[sentence], label_space=ls), self.config,
                            on_epoch=self.records.append)

    def test_epoch_records(self):
        """Test the epoch hook sees one record per epoch and each serializes to one log line."""
        self.assertEqual([record.epoch for record in self.records], [1, 2, 3])
        data = EpochRecordSerializer(self.records[0]).data
        self.assertEqual(set(data), {'epoch', 'l_entry', 'l_sym', 'l_imp', 'dev_ent_f1', 'dev_rel_f1', 'lr'})
        self.assertEqual(data['epoch'], 1)

    def test_summary(self):
        """Test the run summary carries the config and the selection outcome."""
        data = TrainingSummarySerializer({'result': self.result, 'config': self.config}).data
        self.assertEqual(data['config']['hidden_size'], 4)
        self.assertEqual(data['epochs'], 3)
        self.assertEqual(data['best_epoch'], self.result.best_epoch)
        self.assertFalse(data['stopped_early'])
