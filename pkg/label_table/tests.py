# label_table/tests.py
import numpy as np
from django.test import SimpleTestCase

from .exceptions import InvalidAnnotationError, InvalidLabelSpaceError, TableConsistencyError
from .models import Entity, LabelSpace, ProbTensor, Relation, SentenceAnnotation, structure_of
from .tables import argmax_table, one_hot_tensor, render_gold_table, symmetrize


def ace_label_space():
    return LabelSpace.build(['PER', 'GPE'], ['PHYS', 'PER-SOC'], symmetric_relations=['PER-SOC'])


class LabelSpaceTest(SimpleTestCase):
    def test_null_label_pinned_at_zero(self):
        """Test the null label has id 0 and entity ids precede relation ids."""
        ls = ace_label_space()
        self.assertEqual(ls.labels[0], ls.null_label)
        self.assertEqual(ls.size, 5)
        self.assertEqual(list(ls.entity_ids), [1, 2])
        self.assertEqual(list(ls.relation_ids), [3, 4])

    def test_entity_types_are_symmetric(self):
        """Test every entity type joins the symmetric set."""
        ls = ace_label_space()
        self.assertEqual(set(ls.symmetric_ids), {1, 2, 4})
        self.assertEqual(ls.symmetric_relations, frozenset({'PER-SOC'}))

    def test_rejects_shared_names(self):
        """Test entity and relation names must be disjoint."""
        with self.assertRaises(InvalidLabelSpaceError):
            LabelSpace.build(['PER'], ['PER'])

    def test_rejects_asymmetric_entity_type(self):
        """Test a hand-built label space must list entity types as symmetric."""
        with self.assertRaises(InvalidLabelSpaceError):
            LabelSpace(entity_types=('PER',), relation_types=('PHYS',), symmetric_labels=frozenset())


class RenderGoldTableTest(SimpleTestCase):
    def setUp(self):
        self.ls = ace_label_space()
        self.per, self.gpe = self.ls.id_of('PER'), self.ls.id_of('GPE')
        self.phys, self.soc = self.ls.id_of('PHYS'), self.ls.id_of('PER-SOC')

    def test_directed_relation_fixture(self):
        """Test the three-token fixture: entity squares, one relation rectangle, null elsewhere."""
        ann = SentenceAnnotation(
            tokens=('a', 'b', 'c'),
            entities=(Entity(0, 2, self.per), Entity(2, 3, self.gpe)),
            relations=(Relation(0, 1, self.phys),),
        )
        cells = render_gold_table(ann, self.ls).cells
        expected = np.array([
            [self.per, self.per, self.phys],
            [self.per, self.per, self.phys],
            [0, 0, self.gpe],
        ])
        np.testing.assert_array_equal(cells, expected)

    def test_symmetric_relation_is_mirrored(self):
        """Test an undirected relation fills both mirrored cells."""
        ann = SentenceAnnotation(
            tokens=('his', 'wife'),
            entities=(Entity(0, 1, self.per), Entity(1, 2, self.per)),
            relations=(Relation(0, 1, self.soc), Relation(1, 0, self.soc)),
        )
        cells = render_gold_table(ann, self.ls).cells
        self.assertEqual(cells[0, 1], self.soc)
        self.assertEqual(cells[1, 0], self.soc)
        for label in self.ls.symmetric_ids:
            mask = cells == label
            np.testing.assert_array_equal(mask, mask.T)

    def test_empty_annotation(self):
        """Test a sentence without entities renders all-null."""
        cells = render_gold_table(SentenceAnnotation(tokens=('x', 'y')), self.ls).cells
        np.testing.assert_array_equal(cells, np.zeros((2, 2)))

    def test_overlapping_entities_rejected(self):
        """Test overlapping spans raise an invalid-annotation error."""
        ann = SentenceAnnotation(tokens=('a', 'b', 'c'), entities=(Entity(0, 2, self.per), Entity(1, 3, self.gpe)))
        with self.assertRaises(InvalidAnnotationError):
            render_gold_table(ann, self.ls)

    def test_missing_mirror_rejected(self):
        """Test a symmetric relation without its mirrored triplet is invalid."""
        ann = SentenceAnnotation(
            tokens=('a', 'b'),
            entities=(Entity(0, 1, self.per), Entity(1, 2, self.per)),
            relations=(Relation(0, 1, self.soc),),
        )
        with self.assertRaises(InvalidAnnotationError):
            render_gold_table(ann, self.ls)

    def test_conflicting_relations_rejected(self):
        """Test two different labels on one rectangle raise a consistency error."""
        ann = SentenceAnnotation(
            tokens=('a', 'b'),
            entities=(Entity(0, 1, self.per), Entity(1, 2, self.gpe)),
            relations=(Relation(0, 1, self.phys), Relation(0, 1, self.soc), Relation(1, 0, self.soc)),
        )
        with self.assertRaises(TableConsistencyError):
            render_gold_table(ann, self.ls)

    def test_cells_partition(self):
        """Test entity, relation and null cells cover the table exactly once."""
        ann = SentenceAnnotation(
            tokens=tuple('abcde'),
            entities=(Entity(0, 2, self.per), Entity(3, 5, self.gpe)),
            relations=(Relation(0, 1, self.phys),),
        )
        cells = render_gold_table(ann, self.ls).cells
        entity_cells = np.isin(cells, self.ls.entity_ids).sum()
        relation_cells = np.isin(cells, self.ls.relation_ids).sum()
        null_cells = (cells == 0).sum()
        self.assertEqual(entity_cells, 8)
        self.assertEqual(relation_cells, 4)
        self.assertEqual(entity_cells + relation_cells + null_cells, 25)


class OneHotTensorTest(SimpleTestCase):
    def setUp(self):
        self.ls = LabelSpace.build(['PER', 'GPE'], ['PHYS'])
        ann = SentenceAnnotation(
            tokens=('a', 'b', 'c'),
            entities=(Entity(0, 2, 1), Entity(2, 3, 2)),
            relations=(Relation(0, 1, 3),),
        )
        self.table = render_gold_table(ann, self.ls)

    def test_exact_one_hot(self):
        """Test epsilon 0 puts all mass on the gold label."""
        p = one_hot_tensor(self.table, self.ls)
        np.testing.assert_array_equal(p.values[0, 0], [0.0, 1.0, 0.0, 0.0])

    def test_smoothing_arithmetic(self):
        """Test epsilon 0.01 with four labels gives 0.97 / 0.01."""
        p = one_hot_tensor(self.table, self.ls, epsilon=0.01)
        np.testing.assert_allclose(p.values[2, 2], [0.01, 0.01, 0.97, 0.01])
        p.check_normalized()

    def test_argmax_recovers_table(self):
        """Test argmax of a smoothed tensor returns the gold table."""
        for epsilon in (0.0, 0.1, 0.24):
            p = one_hot_tensor(self.table, self.ls, epsilon=epsilon)
            np.testing.assert_array_equal(argmax_table(p).cells, self.table.cells)

    def test_epsilon_too_large(self):
        """Test epsilon * |Y| >= 1 is rejected."""
        with self.assertRaises(ValueError):
            one_hot_tensor(self.table, self.ls, epsilon=0.25)


class SymmetrizeTest(SimpleTestCase):
    def setUp(self):
        self.ls = ace_label_space()
        self.soc, self.phys = self.ls.id_of('PER-SOC'), self.ls.id_of('PHYS')
        rng = np.random.default_rng(3)
        raw = rng.random((4, 4, self.ls.size))
        self.p = ProbTensor(raw / raw.sum(axis=2, keepdims=True))

    def test_averages_symmetric_label(self):
        """Test mirrored cells of a symmetric label are averaged."""
        values = np.full((2, 2, self.ls.size), 0.1)
        values[0, 1, self.soc], values[1, 0, self.soc] = 0.8, 0.2
        out = symmetrize(ProbTensor(values), self.ls).values
        self.assertAlmostEqual(out[0, 1, self.soc], 0.5)
        self.assertAlmostEqual(out[1, 0, self.soc], 0.5)

    def test_asymmetric_label_untouched(self):
        """Test directed relation slices pass through."""
        out = symmetrize(self.p, self.ls).values
        np.testing.assert_array_equal(out[:, :, self.phys], self.p.values[:, :, self.phys])

    def test_idempotent(self):
        """Test symmetrizing twice equals symmetrizing once."""
        once = symmetrize(self.p, self.ls).values
        twice = symmetrize(symmetrize(self.p, self.ls), self.ls).values
        np.testing.assert_allclose(once, twice, rtol=0, atol=1e-15)

    def test_fixed_point(self):
        """Test an already-symmetric tensor is unchanged."""
        once = symmetrize(self.p, self.ls)
        np.testing.assert_array_equal(symmetrize(once, self.ls).values, once.values)


class StructureTest(SimpleTestCase):
    def test_symmetric_relation_counted_once(self):
        """Test mirrored triplets collapse to one canonical relation."""
        ls = ace_label_space()
        soc = ls.id_of('PER-SOC')
        entities = (Entity(2, 3, 1), Entity(0, 1, 1))
        _, relations = structure_of(entities, (Relation(0, 1, soc), Relation(1, 0, soc)), ls)
        self.assertEqual(relations, frozenset({((0, 1, 1), (2, 3, 1), soc)}))
