# decoder/tests.py
import numpy as np
from django.test import SimpleTestCase

from label_table.models import Entity, LabelSpace, ProbTensor, Relation, SentenceAnnotation, structure_of
from label_table.tables import one_hot_tensor, render_gold_table, symmetrize

from .decoding import (
    adjacent_distances, agreement_rate, entity_type_decode, hard_decode, joint_decode, oracle_decode,
    relation_type_decode, run_decoder, span_decode,
)
from .exceptions import OracleSizeError
from .models import DecodeConfig, ExtractionResult
from .serializers import PredictionSerializer


def ace_label_space():
    return LabelSpace.build(['PER', 'GPE'], ['PHYS', 'PER-SOC'], symmetric_relations=['PER-SOC'])


def random_annotation(rng, ls, max_length=40, max_entities=5, max_relations=4):
    """A valid annotation with non-overlapping (possibly adjacent) entities and mirrored undirected relations."""
    n = int(rng.integers(1, max_length + 1))
    cuts = sorted(rng.choice(np.arange(n + 1), size=min(n + 1, 2 * max_entities), replace=False).tolist())
    entities = []
    for start, end in zip(cuts[::2], cuts[1::2]):
        if rng.random() < 0.8:
            entities.append(Entity(start=start, end=end, label=int(rng.choice(ls.entity_ids))))
    relations, used = [], set()
    pairs = [(a, b) for a in range(len(entities)) for b in range(len(entities)) if a != b]
    rng.shuffle(pairs)
    for head, tail in pairs:
        if len(relations) >= max_relations:
            break
        if (head, tail) in used:
            continue
        label = int(rng.choice(ls.relation_ids))
        if ls.is_symmetric(label):
            if (tail, head) in used or len(relations) + 2 > max_relations:
                continue
            relations.extend([Relation(head, tail, label), Relation(tail, head, label)])
            used.update({(head, tail), (tail, head)})
        else:
            relations.append(Relation(head, tail, label))
            used.add((head, tail))
    tokens = tuple(f"w{i}" for i in range(n))
    return SentenceAnnotation(tokens=tokens, entities=tuple(entities), relations=tuple(relations)).validate(ls)


def fixture(ls):
    """'David lives Boston': PER, GPE and a directed PHYS from David to Boston."""
    per, gpe, phys = ls.id_of('PER'), ls.id_of('GPE'), ls.id_of('PHYS')
    return SentenceAnnotation(
        tokens=('David', 'lives', 'Boston'),
        entities=(Entity(0, 1, per), Entity(2, 3, gpe)),
        relations=(Relation(0, 1, phys),),
    )


def tensor_of(annotation, ls, epsilon=0.0):
    return one_hot_tensor(render_gold_table(annotation, ls), ls, epsilon)


def cells_tensor(cells, n_labels):
    cells = np.asarray(cells)
    values = np.zeros(cells.shape + (n_labels,))
    rows, cols = np.indices(cells.shape)
    values[rows, cols, cells] = 1.0
    return ProbTensor(values=values)


class DecodeConfigTest(SimpleTestCase):
    def test_defaults(self):
        """Test the default threshold and distance mode."""
        cfg = DecodeConfig()
        self.assertEqual((cfg.threshold, cfg.distance_mode), (1.4, 'squared'))

    def test_rejects_non_positive_threshold(self):
        """Test a zero threshold is rejected."""
        with self.assertRaises(ValueError):
            DecodeConfig(threshold=0.0)

    def test_rejects_unknown_mode(self):
        """Test an unknown distance mode is rejected."""
        with self.assertRaises(ValueError):
            DecodeConfig(distance_mode='cosine')


class SpanDecodeTest(SimpleTestCase):
    def setUp(self):
        self.ls = ace_label_space()

    def test_two_entities(self):
        """Test entities [0,2) and [2,3) split at 2 with the final split at 3."""
        per, gpe = self.ls.id_of('PER'), self.ls.id_of('GPE')
        ann = SentenceAnnotation(tokens=('a', 'b', 'c'), entities=(Entity(0, 2, per), Entity(2, 3, gpe)))
        p = tensor_of(ann, self.ls)
        distances = adjacent_distances(p)
        self.assertEqual(distances[0], 0.0)
        self.assertGreaterEqual(distances[1], 2.0)
        splits, spans = span_decode(p, DecodeConfig())
        self.assertEqual(splits, [2, 3])
        self.assertEqual(spans, [(0, 2), (2, 3)])

    def test_all_null(self):
        """Test an all-null table is one span."""
        ann = SentenceAnnotation(tokens=('a',) * 5)
        self.assertEqual(span_decode(tensor_of(ann, self.ls), DecodeConfig()), ([5], [(0, 5)]))

    def test_uniform(self):
        """Test a uniform tensor has zero distances and a single span."""
        p = ProbTensor(values=np.full((4, 4, self.ls.size), 1.0 / self.ls.size))
        np.testing.assert_array_equal(adjacent_distances(p), 0.0)
        self.assertEqual(span_decode(p, DecodeConfig())[1], [(0, 4)])

    def test_single_token(self):
        """Test |s|=1 yields one span without distances."""
        p = ProbTensor(values=np.full((1, 1, self.ls.size), 1.0 / self.ls.size))
        self.assertEqual(span_decode(p, DecodeConfig()), ([1], [(0, 1)]))

    def test_l2_mode(self):
        """Test the plain-norm mode averages row and column norms."""
        per = self.ls.id_of('PER')
        ann = SentenceAnnotation(tokens=('a', 'b'), entities=(Entity(0, 1, per),))
        p = tensor_of(ann, self.ls)
        # one differing cell per side, each contributing 1² + 1²
        np.testing.assert_allclose(adjacent_distances(p, 'squared'), [2.0])
        np.testing.assert_allclose(adjacent_distances(p, 'l2'), [np.sqrt(2.0)])

    def test_threshold_monotonicity(self):
        """Test raising the threshold only removes splits, and a huge one leaves a single span."""
        rng = np.random.default_rng(3)
        values = rng.dirichlet(np.ones(self.ls.size), size=(12, 12))
        p = symmetrize(ProbTensor(values=values), self.ls)
        previous = None
        for alpha in np.linspace(0.01, 3.0, 30):
            splits = set(span_decode(p, DecodeConfig(threshold=alpha))[0])
            if previous is not None:
                self.assertTrue(splits <= previous)
            previous = splits
        self.assertEqual(span_decode(p, DecodeConfig(threshold=1e9))[1], [(0, 12)])


class TypeDecodeTest(SimpleTestCase):
    def setUp(self):
        self.ls = ace_label_space()
        self.per, self.gpe = self.ls.id_of('PER'), self.ls.id_of('GPE')

    def test_one_hot_square(self):
        """Test a one-hot PER square decodes to PER and a null square to null."""
        p = cells_tensor([[self.per, 0], [0, 0]], self.ls.size)
        self.assertEqual(entity_type_decode(p, (0, 1), self.ls), self.per)
        self.assertEqual(entity_type_decode(p, (1, 2), self.ls), 0)

    def test_argmax_of_means(self):
        """Test square means PER 0.4, null 0.35, GPE 0.25 choose PER."""
        values = np.zeros((2, 2, self.ls.size))
        values[..., 0], values[..., self.per], values[..., self.gpe] = 0.35, 0.4, 0.25
        self.assertEqual(entity_type_decode(ProbTensor(values=values), (0, 2), self.ls), self.per)

    def test_relation_rectangle(self):
        """Test a PHYS rectangle decodes to PHYS and its mirror to null."""
        ls = self.ls
        p = tensor_of(fixture(ls), ls)
        self.assertEqual(relation_type_decode(p, (0, 1), (2, 3), ls), ls.id_of('PHYS'))
        self.assertEqual(relation_type_decode(p, (2, 3), (0, 1), ls), 0)

    def test_mirrored_symmetric_rectangles(self):
        """Test both orders of an undirected pair decode to PER-SOC and canonicalize to one relation."""
        ls = self.ls
        soc = ls.id_of('PER-SOC')
        ann = SentenceAnnotation(
            tokens=('a', 'b', 'c'),
            entities=(Entity(0, 1, self.per), Entity(2, 3, self.per)),
            relations=(Relation(0, 1, soc), Relation(1, 0, soc)),
        )
        p = symmetrize(tensor_of(ann, ls), ls)
        self.assertEqual(relation_type_decode(p, (0, 1), (2, 3), ls), soc)
        self.assertEqual(relation_type_decode(p, (2, 3), (0, 1), ls), soc)
        result = joint_decode(p, ls)
        self.assertEqual(len(result.relations), 2)
        self.assertEqual(len(result.structure(ls)[1]), 1)


class JointDecodeTest(SimpleTestCase):
    def setUp(self):
        self.ls = ace_label_space()

    def test_fixture_recovery(self):
        """Test exact recovery of the three-token fixture."""
        ann = fixture(self.ls)
        result = joint_decode(tensor_of(ann, self.ls), self.ls)
        self.assertEqual(result.structure(self.ls), structure_of(ann.entities, ann.relations, self.ls))
        self.assertEqual(result.decoder_tag, 'joint')
        self.assertEqual(result.split_positions, (1, 2))

    def test_fixture_with_smoothing(self):
        """Test smoothing 0.02 still recovers the fixture."""
        ann = fixture(self.ls)
        result = joint_decode(tensor_of(ann, self.ls, epsilon=0.02), self.ls)
        self.assertEqual(result.structure(self.ls), structure_of(ann.entities, ann.relations, self.ls))

    def test_random_round_trip(self):
        """Test 200 random annotations decode back to themselves."""
        rng = np.random.default_rng(0)
        for _ in range(200):
            ann = random_annotation(rng, self.ls)
            result = joint_decode(tensor_of(ann, self.ls), self.ls)
            self.assertEqual(result.structure(self.ls), structure_of(ann.entities, ann.relations, self.ls))

    def test_entities_sorted_and_disjoint(self):
        """Test decoded entities on a random tensor never overlap."""
        rng = np.random.default_rng(4)
        p = ProbTensor(values=rng.dirichlet(np.ones(self.ls.size), size=(15, 15)))
        entities = joint_decode(p, self.ls, DecodeConfig(threshold=0.05)).entities
        for left, right in zip(entities, entities[1:]):
            self.assertLessEqual(left.end, right.start)

    def test_permutation_coherence(self):
        """Test reordering entity types in the label space and tensor yields the same named output."""
        ls = self.ls
        swapped = LabelSpace.build(['GPE', 'PER'], ['PHYS', 'PER-SOC'], symmetric_relations=['PER-SOC'])
        order = [swapped.labels.index(name) for name in ls.labels]
        rng = np.random.default_rng(8)
        p = ProbTensor(values=rng.dirichlet(np.ones(ls.size), size=(10, 10)))
        permuted = np.zeros_like(p.values)
        permuted[:, :, order] = p.values
        first = joint_decode(p, ls, DecodeConfig(threshold=0.1))
        second = joint_decode(ProbTensor(values=permuted), swapped, DecodeConfig(threshold=0.1))
        self.assertEqual(
            [(e.start, e.end, ls.name_of(e.label)) for e in first.entities],
            [(e.start, e.end, swapped.name_of(e.label)) for e in second.entities],
        )
        self.assertEqual(
            [(r.head, r.tail, ls.name_of(r.label)) for r in first.relations],
            [(r.head, r.tail, swapped.name_of(r.label)) for r in second.relations],
        )


class HardDecodeTest(SimpleTestCase):
    def setUp(self):
        self.ls = ace_label_space()
        self.per, self.gpe = self.ls.id_of('PER'), self.ls.id_of('GPE')

    def test_single_square(self):
        """Test a 2x2 PER square is recovered as one entity."""
        result = hard_decode(cells_tensor([[self.per, self.per], [self.per, self.per]], self.ls.size), self.ls)
        self.assertEqual(result.entities, (Entity(0, 2, self.per),))
        self.assertEqual(result.decoder_tag, 'hard')

    def test_tie_goes_to_null_then_shrinks(self):
        """Test the 2x2 square ties toward null, so two single-token entities come out."""
        p = cells_tensor([[self.per, 0], [0, self.gpe]], self.ls.size)
        result = hard_decode(p, self.ls)
        self.assertEqual(result.entities, (Entity(0, 1, self.per), Entity(1, 2, self.gpe)))

    def test_reads_the_unsymmetrized_argmax(self):
        """Test the cell argmax is taken before any symmetrization, so a 2-2 square tie shrinks to one token."""
        values = np.zeros((2, 2, self.ls.size))
        values[0, 0, self.per] = 1.0
        values[1, 1, 0] = 1.0
        values[0, 1, [0, self.per]] = [0.6, 0.4]
        values[1, 0, [0, self.per]] = [0.1, 0.9]
        result = hard_decode(ProbTensor(values=values), self.ls)
        self.assertEqual(result.entities, (Entity(0, 1, self.per),))

    def test_relation(self):
        """Test a PHYS cell between two single-token entities is recovered."""
        phys = self.ls.id_of('PHYS')
        p = cells_tensor([[self.per, phys], [0, self.gpe]], self.ls.size)
        result = hard_decode(p, self.ls)
        self.assertEqual(result.relations, (Relation(0, 1, phys),))


class OracleDecodeTest(SimpleTestCase):
    def setUp(self):
        self.ls = ace_label_space()

    def test_one_hot_recovery(self):
        """Test the oracle recovers one-hot annotations up to length 8."""
        rng = np.random.default_rng(1)
        for _ in range(40):
            ann = random_annotation(rng, self.ls, max_length=8, max_entities=3)
            result = oracle_decode(tensor_of(ann, self.ls), self.ls)
            self.assertEqual(result.structure(self.ls), structure_of(ann.entities, ann.relations, self.ls))

    def test_uniform_tie_gives_no_entities(self):
        """Test a uniform tensor ties every structure and the tie rule picks zero entities."""
        p = ProbTensor(values=np.full((2, 2, self.ls.size), 1.0 / self.ls.size))
        self.assertEqual(oracle_decode(p, self.ls).entities, ())

    def test_scores_the_tensor_as_given(self):
        """Test candidates are scored on the unsymmetrized probabilities."""
        per = self.ls.id_of('PER')
        values = np.zeros((2, 2, self.ls.size))
        values[0, 0, per] = values[1, 1, per] = 1.0
        values[0, 1, [0, per]] = [0.1, 0.9]
        values[1, 0, 0] = 1.0
        result = oracle_decode(ProbTensor(values=values), self.ls)
        self.assertEqual(result.entities, (Entity(0, 1, per), Entity(1, 2, per)))
        self.assertEqual(result.relations, ())

    def test_refuses_long_sentences(self):
        """Test |s| > 8 is refused."""
        p = ProbTensor(values=np.full((9, 9, self.ls.size), 1.0 / self.ls.size))
        with self.assertRaises(OracleSizeError) as ctx:
            oracle_decode(p, self.ls)
        self.assertIn('8', str(ctx.exception))

    def test_agreement_without_noise(self):
        """Test joint decoding agrees with the oracle on every clean tensor."""
        rng = np.random.default_rng(2)
        tensors = [tensor_of(random_annotation(rng, self.ls, max_length=6, max_entities=3), self.ls)
                   for _ in range(50)]
        self.assertEqual(agreement_rate(tensors, self.ls, decoder='joint'), 1.0)

    def test_run_decoder_rejects_unknown(self):
        """Test an unknown decoder name is rejected."""
        with self.assertRaises(ValueError):
            run_decoder('beam', tensor_of(fixture(self.ls), self.ls), self.ls)


class PredictionSerializerTest(SimpleTestCase):
    def test_round_trip(self):
        """Test a prediction record serializes by type name and parses back."""
        ls = ace_label_space()
        result = joint_decode(tensor_of(fixture(ls), ls), ls)
        data = PredictionSerializer(result, context={'label_space': ls}).data
        self.assertEqual(data['entities'][0], {'start': 0, 'end': 1, 'type': 'PER'})
        self.assertEqual(data['decoder'], 'joint')
        serializer = PredictionSerializer(data=data, context={'label_space': ls})
        self.assertTrue(serializer.is_valid(), serializer.errors)
        self.assertEqual(serializer.save(), result)

    def test_bad_relation_index(self):
        """Test a relation pointing past the entity list is rejected."""
        ls = ace_label_space()
        data = {'entities': [], 'relations': [{'head': 0, 'tail': 1, 'type': 'PHYS'}], 'decoder': 'hard'}
        serializer = PredictionSerializer(data=data, context={'label_space': ls})
        self.assertFalse(serializer.is_valid())
        self.assertIn('relations', serializer.errors)

    def test_unknown_type(self):
        """Test an entity type outside the label space is rejected."""
        ls = ace_label_space()
        data = {'entities': [{'start': 0, 'end': 1, 'type': 'ORG'}], 'decoder': 'joint'}
        self.assertFalse(PredictionSerializer(data=data, context={'label_space': ls}).is_valid())


class ExtractionResultTest(SimpleTestCase):
    def test_rejects_unknown_tag(self):
        """Test the decoder tag is constrained."""
        with self.assertRaises(ValueError):
            ExtractionResult(decoder_tag='beam')
