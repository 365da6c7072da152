# biaffine_net/tests.py
import io

import numpy as np
from django.test import SimpleTestCase

from label_table.models import LabelSpace
from label_table.tables import symmetrize

from .checkpoint import read_checkpoint, write_checkpoint
from .exceptions import CheckpointFormatError, ForwardStateError, NumericError
from .models import UNK_ID, LogitDropout, ModelParams, ScoreTable, TrainConfig
from .network import BiaffineModel, biaffine, encode, gelu, gelu_grad, score_table, softmax_cells
from .vocab import Vocabulary


def random_params(seed=0, vocab_size=6, n_labels=3, embedding_size=4, hidden_size=3, mlp_depth=1):
    rng = np.random.default_rng(seed)
    params = ModelParams.initialize(vocab_size, n_labels, embedding_size, hidden_size, mlp_depth, rng=rng)
    params.U1[...] = rng.normal(size=params.U1.shape)
    params.U2[...] = rng.normal(size=params.U2.shape)
    params.b[...] = rng.normal(size=params.b.shape)
    return params


def relative_error(analytic, numeric):
    return np.linalg.norm(analytic - numeric) / (np.linalg.norm(numeric) + 1e-8)


class EncodeTest(SimpleTestCase):
    def test_zero_embeddings(self):
        """Test a zero embedding matrix encodes to zero vectors."""
        params = random_params()
        params.embeddings[...] = 0.0
        np.testing.assert_array_equal(encode([2, 3, 4], params), np.zeros((3, 4)))

    def test_same_token_same_vector(self):
        """Test repeated tokens get identical vectors (no positional signal)."""
        h = encode([2, 3, 4, 5, 2, 2], random_params())
        np.testing.assert_array_equal(h[0], h[4])

    def test_unknown_maps_to_unk(self):
        """Test out-of-vocabulary ids fall back to UNK."""
        params = random_params()
        h = encode([99, -3], params)
        np.testing.assert_array_equal(h[0], params.embeddings[UNK_ID])
        np.testing.assert_array_equal(h[1], params.embeddings[UNK_ID])

    def test_single_token(self):
        """Test a one-token sentence yields one vector."""
        self.assertEqual(encode([2], random_params()).shape, (1, 4))


class ScoreTableTest(SimpleTestCase):
    def test_bias_only(self):
        """Test zero U1/U2 makes every cell equal to b."""
        params = random_params()
        params.U1[...] = 0.0
        params.U2[...] = 0.0
        logits = score_table(encode([2, 3, 4], params), params).logits
        for i in range(3):
            for j in range(3):
                np.testing.assert_array_equal(logits[i, j], params.b)

    def test_scalar_bilinear_form(self):
        """Test d=1, |Y|=1: 3 * 2 * 4 = 24."""
        params = random_params(n_labels=1, hidden_size=1)
        params.U1[...] = 2.0
        params.U2[...] = 0.0
        params.b[...] = 0.0
        g = biaffine(np.array([[3.0]]), np.array([[4.0]]), params)
        self.assertEqual(g[0, 0, 0], 24.0)

    def test_zero_rate_dropout_is_identity(self):
        """Test dropout with p=0 leaves the logits unchanged."""
        params = random_params()
        h = encode([2, 3], params)
        plain = score_table(h, params)
        dropped = score_table(h, params, LogitDropout(0.0, np.random.default_rng(1)))
        np.testing.assert_array_equal(plain.logits, dropped.logits)
        self.assertIsNone(plain.dropout_mask)
        self.assertIsNotNone(dropped.dropout_mask)

    def test_inverted_dropout_scaling(self):
        """Test survivors are scaled by 1/(1-p) and dropped logits are zero."""
        params = random_params()
        h = encode([2, 3, 4], params)
        plain = score_table(h, params).logits
        dropped = score_table(h, params, LogitDropout(0.5, np.random.default_rng(7)))
        keep = dropped.dropout_mask
        np.testing.assert_allclose(dropped.logits[keep], plain[keep] * 2.0)
        np.testing.assert_array_equal(dropped.logits[~keep], 0.0)

    def test_non_finite_reports_location(self):
        """Test a non-finite intermediate raises a numeric error naming the stage."""
        params = random_params()
        params.head_weights[0][0, 0] = np.inf
        with self.assertRaises(NumericError) as ctx:
            score_table(encode([2, 3], params), params)
        self.assertIn('head MLP layer 0', str(ctx.exception))

    def test_deterministic(self):
        """Test a fixed seed gives bit-identical score tables."""
        first = score_table(encode([2, 3, 4], random_params(seed=11)), random_params(seed=11)).logits
        second = score_table(encode([2, 3, 4], random_params(seed=11)), random_params(seed=11)).logits
        self.assertEqual(first.tobytes(), second.tobytes())


class SoftmaxCellsTest(SimpleTestCase):
    def test_uniform(self):
        """Test equal logits give a uniform distribution."""
        p = softmax_cells(ScoreTable(logits=np.zeros((2, 2, 4))))
        np.testing.assert_allclose(p.values, 0.25)

    def test_closed_form(self):
        """Test logits (ln 1, ln 3) give (0.25, 0.75)."""
        p = softmax_cells(ScoreTable(logits=np.log(np.array([[[1.0, 3.0]]]))))
        np.testing.assert_allclose(p.values[0, 0], [0.25, 0.75])

    def test_shift_invariance(self):
        """Test adding a per-cell constant leaves probabilities unchanged."""
        rng = np.random.default_rng(2)
        logits = rng.normal(size=(3, 3, 5)) * 10
        shift = rng.normal(size=(3, 3, 1)) * 100
        a = softmax_cells(ScoreTable(logits=logits)).values
        b = softmax_cells(ScoreTable(logits=logits + shift)).values
        np.testing.assert_allclose(a, b, rtol=0, atol=1e-9)
        a_tensor = softmax_cells(ScoreTable(logits=logits))
        a_tensor.check_normalized()

    def test_large_logits_stable(self):
        """Test max-subtraction keeps huge logits finite."""
        p = softmax_cells(ScoreTable(logits=np.array([[[1000.0, 0.0, -1000.0]]])))
        self.assertTrue(np.all(np.isfinite(p.values)))


class GeluTest(SimpleTestCase):
    def test_gelu_derivative(self):
        """Test the exact GELU derivative against central differences."""
        x = np.linspace(-4, 4, 41)
        h = 1e-6
        numeric = (gelu(x + h) - gelu(x - h)) / (2 * h)
        np.testing.assert_allclose(gelu_grad(x), numeric, rtol=1e-6, atol=1e-8)


class BackwardTest(SimpleTestCase):
    def setUp(self):
        self.tokens = [2, 4]
        self.ls = LabelSpace.build(['A'], ['R'], symmetric_relations=['R'])
        rng = np.random.default_rng(5)
        self.w_logits = rng.normal(size=(2, 2, 3))
        self.w_probs = rng.normal(size=(2, 2, 3))
        self.w_sym = rng.normal(size=(2, 2, 3))

    def objective(self, model):
        forward = model.forward(self.tokens, LogitDropout(0.3, np.random.default_rng(9)))
        value = (self.w_logits * forward.dropped.logits).sum()
        value += (self.w_probs * forward.probs.values).sum()
        value += (self.w_sym * symmetrize(forward.probs, self.ls).values).sum()
        return value, forward

    def numeric_gradients(self, params, h=1e-5):
        grads = []
        for array in params.arrays():
            grad = np.zeros_like(array)
            for index in np.ndindex(array.shape):
                original = array[index]
                array[index] = original + h
                plus, _ = self.objective(BiaffineModel(params))
                array[index] = original - h
                minus, _ = self.objective(BiaffineModel(params))
                array[index] = original
                grad[index] = (plus - minus) / (2 * h)
            grads.append(grad)
        return grads

    def test_matches_finite_differences(self):
        """Test analytic gradients of every parameter against central differences."""
        for depth in (1, 2):
            params = random_params(seed=depth, mlp_depth=depth)
            model = BiaffineModel(params)
            _, forward = self.objective(model)
            analytic = model.backward(
                forward, grad_logits=self.w_logits, grad_probs=self.w_probs,
                grad_probs_symmetrized=self.w_sym, ls=self.ls,
            )
            numeric = self.numeric_gradients(params)
            for (name, grad), expected in zip(analytic.named_arrays(), numeric):
                self.assertLessEqual(relative_error(grad, expected), 1e-4, msg=f'{name} (depth {depth})')

    def test_zero_upstream_gradient(self):
        """Test zero upstream gradients give zero parameter gradients."""
        model = BiaffineModel(random_params())
        forward = model.forward(self.tokens)
        grads = model.backward(forward, grad_logits=np.zeros((2, 2, 3)))
        for name, grad in grads.named_arrays():
            np.testing.assert_array_equal(grad, 0.0, err_msg=name)

    def test_cross_entropy_at_optimum(self):
        """Test a cell already at probability one for the gold label has no gradient."""
        params = random_params(n_labels=3)
        params.U1[...] = 0.0
        params.U2[...] = 0.0
        params.b[...] = [800.0, 0.0, 0.0]
        model = BiaffineModel(params)
        forward = model.forward([2])
        gold = np.zeros((1, 1, 3))
        gold[0, 0, 0] = 1.0
        grads = model.backward(forward, grad_logits=forward.probs.values - gold)
        for name, grad in grads.named_arrays():
            np.testing.assert_allclose(grad, 0.0, atol=1e-12, err_msg=name)

    def test_backward_before_forward(self):
        """Test backward without a forward pass is a state error."""
        with self.assertRaises(ForwardStateError):
            BiaffineModel(random_params()).backward(grad_logits=np.zeros((1, 1, 3)))


class CheckpointTest(SimpleTestCase):
    def test_round_trip(self):
        """Test write then read reproduces every parameter bit for bit."""
        params = random_params(mlp_depth=2)
        buffer = io.BytesIO()
        write_checkpoint(params, buffer)
        self.assertTrue(buffer.getvalue().startswith(b'UNIRE1'))
        restored = read_checkpoint(io.BytesIO(buffer.getvalue()))
        for (name, expected), (_, actual) in zip(params.named_arrays(), restored.named_arrays()):
            self.assertEqual(expected.tobytes(), actual.tobytes(), msg=name)

    def test_bad_magic(self):
        """Test a foreign file is rejected."""
        with self.assertRaises(CheckpointFormatError):
            read_checkpoint(io.BytesIO(b'NOTUNIRE' + bytes(64)))

    def test_truncated(self):
        """Test a truncated checkpoint is rejected."""
        buffer = io.BytesIO()
        write_checkpoint(random_params(), buffer)
        with self.assertRaises(CheckpointFormatError):
            read_checkpoint(io.BytesIO(buffer.getvalue()[:-8]))


class VocabularyTest(SimpleTestCase):
    def test_reserved_ids(self):
        """Test PAD is 0, UNK is 1 and unseen tokens map to UNK."""
        vocab = Vocabulary.build([['a', 'b'], ['b', 'c']])
        self.assertEqual(vocab.lookup(['a', 'b', 'c', 'zzz']), [2, 3, 4, UNK_ID])
        self.assertEqual(len(Vocabulary.from_dict(vocab.to_dict())), 5)


class TrainConfigTest(SimpleTestCase):
    def test_defaults(self):
        """Test the documented defaults."""
        config = TrainConfig()
        self.assertEqual((config.hidden_size, config.logit_dropout, config.beta2), (150, 0.2, 0.9))

    def test_rejects_bad_dropout(self):
        """Test a dropout rate of 1 is rejected."""
        with self.assertRaises(ValueError):
            TrainConfig(logit_dropout=1.0)
