# evaluation/tests.py
import numpy as np
from django.test import SimpleTestCase

from corpus.generator import generate_corpus
from corpus.models import GenConfig, NoiseConfig
from corpus.noise import render_tensors
from decoder.decoding import adjacent_distances, joint_decode
from decoder.models import ExtractionResult
from decoder.tests import ace_label_space, fixture, random_annotation, tensor_of
from label_table.exceptions import InvalidAnnotationError
from label_table.models import Entity, ProbTensor, Relation, SentenceAnnotation
from label_table.tables import symmetrize

from .analysis import DEFAULT_ALPHAS, alpha_grid, distance_histogram, parse_alpha_grid, threshold_sweep
from .metrics import corpus_error_taxonomy, corpus_eval, entity_boundaries, error_taxonomy, span_f1, strict_eval
from .models import ErrorBreakdown, EvalReport, Score, SpanScore
from .reports import breakdown_text, report_text
from .serializers import ErrorBreakdownSerializer, EvalReportSerializer
from .tasks import score_shard


def prediction(entities=(), relations=(), decoder='hard', splits=()):
    return ExtractionResult(entities=tuple(entities), relations=tuple(relations), decoder_tag=decoder,
                            split_positions=tuple(splits))


class ScoreTest(SimpleTestCase):
    def test_zero_over_zero(self):
        """Test empty counts score 0 everywhere."""
        score = Score()
        self.assertEqual((score.precision, score.recall, score.f1), (0.0, 0.0, 0.0))

    def test_rejects_impossible_counts(self):
        """Test more correct than predicted is rejected."""
        with self.assertRaises(ValueError):
            Score(gold=3, predicted=1, correct=2)


class StrictEvalTest(SimpleTestCase):
    def setUp(self):
        self.ls = ace_label_space()
        self.per, self.gpe = self.ls.id_of('PER'), self.ls.id_of('GPE')
        self.phys, self.soc = self.ls.id_of('PHYS'), self.ls.id_of('PER-SOC')

    def test_identical(self):
        """Test a perfect prediction scores 1 everywhere."""
        gold = fixture(self.ls)
        report = strict_eval(joint_decode(tensor_of(gold, self.ls), self.ls), gold, self.ls)
        for score in (report.entity, report.relation, report.span):
            self.assertEqual((score.precision, score.recall, score.f1), (1.0, 1.0, 1.0))

    def test_half_the_relations(self):
        """Test one of two gold relations found, none spurious: P=1, R=0.5, F1=2/3."""
        entities = (Entity(0, 1, self.per), Entity(2, 3, self.gpe), Entity(4, 5, self.gpe))
        gold = SentenceAnnotation(tokens=tuple('abcde'), entities=entities,
                                  relations=(Relation(0, 1, self.phys), Relation(0, 2, self.phys)))
        report = strict_eval(prediction(entities, [Relation(0, 1, self.phys)]), gold, self.ls)
        self.assertEqual(report.relation.precision, 1.0)
        self.assertEqual(report.relation.recall, 0.5)
        self.assertAlmostEqual(report.relation.f1, 2 / 3, delta=1e-12)

    def test_wrong_argument_type(self):
        """Test a relation with correct spans and type but a mistyped argument is wrong."""
        gold = fixture(self.ls)
        pred = prediction([Entity(0, 1, self.gpe), Entity(2, 3, self.gpe)], [Relation(0, 1, self.phys)])
        self.assertEqual(strict_eval(pred, gold, self.ls).relation.correct, 0)

    def test_order_independence(self):
        """Test reordering predicted entities (with relation indices remapped) changes nothing."""
        gold = fixture(self.ls)
        pred = prediction([Entity(2, 3, self.gpe), Entity(0, 1, self.per)], [Relation(1, 0, self.phys)])
        self.assertEqual(strict_eval(pred, gold, self.ls).relation.correct, 1)

    def test_undirected_counted_once(self):
        """Test a mirrored undirected pair is one gold and one predicted relation."""
        entities = (Entity(0, 1, self.per), Entity(2, 3, self.per))
        relations = (Relation(0, 1, self.soc), Relation(1, 0, self.soc))
        gold = SentenceAnnotation(tokens=tuple('abc'), entities=entities, relations=relations)
        report = strict_eval(prediction(entities, relations), gold, self.ls)
        self.assertEqual(report.relation, Score(1, 1, 1))

    def test_out_of_range(self):
        """Test a predicted span past the sentence end is invalid input."""
        with self.assertRaises(InvalidAnnotationError):
            strict_eval(prediction([Entity(2, 9, self.per)]), fixture(self.ls), self.ls)

    def test_three_sentence_fixture(self):
        """Test micro counts over three sentences: entity F1 8/11, relation F1 2/5."""
        ls, per, gpe, phys, soc = self.ls, self.per, self.gpe, self.phys, self.soc
        golds, preds = [], []
        golds.append(fixture(ls))
        preds.append(prediction(fixture(ls).entities, fixture(ls).relations))
        pair = (Relation(0, 1, soc), Relation(1, 0, soc))
        golds.append(SentenceAnnotation(tokens=tuple('abcd'), entities=(Entity(0, 2, per), Entity(3, 4, per)),
                                        relations=pair))
        preds.append(prediction([Entity(0, 2, gpe), Entity(3, 4, per)], pair))
        golds.append(SentenceAnnotation(tokens=tuple('abcde'), entities=(Entity(1, 2, gpe),)))
        preds.append(prediction([Entity(1, 2, gpe), Entity(3, 4, per)], [Relation(1, 0, phys)]))

        report = corpus_eval(preds, golds, ls)
        self.assertEqual(report.entity, Score(gold=5, predicted=6, correct=4))
        self.assertEqual(report.relation, Score(gold=2, predicted=3, correct=1))
        self.assertAlmostEqual(report.entity.precision, 4 / 6, delta=1e-12)
        self.assertAlmostEqual(report.entity.recall, 4 / 5, delta=1e-12)
        self.assertAlmostEqual(report.entity.f1, 8 / 11, delta=1e-12)
        self.assertAlmostEqual(report.relation.precision, 1 / 3, delta=1e-12)
        self.assertAlmostEqual(report.relation.recall, 1 / 2, delta=1e-12)
        self.assertAlmostEqual(report.relation.f1, 2 / 5, delta=1e-12)
        self.assertEqual(len(report.per_sentence), 3)

    def test_report_serializer(self):
        """Test the JSON report carries counts and rates."""
        gold = fixture(self.ls)
        report = strict_eval(joint_decode(tensor_of(gold, self.ls), self.ls), gold, self.ls)
        data = EvalReportSerializer(report).data
        self.assertEqual(data['entity']['f1'], 1.0)
        self.assertEqual(data['relation']['gold'], 1)


class SpanF1Test(SimpleTestCase):
    def test_identical(self):
        """Test identical split sets score 1."""
        self.assertEqual(span_f1({1, 4}, {1, 4}), 1.0)

    def test_both_empty(self):
        """Test two empty split sets score 1."""
        self.assertEqual(span_f1(set(), set()), 1.0)

    def test_empty_prediction(self):
        """Test no predicted splits against gold splits scores 0."""
        self.assertEqual(span_f1(set(), {2}), 0.0)

    def test_half_overlap(self):
        """Test {2,5} against {2,7} scores 0.5."""
        self.assertEqual(span_f1({2, 5}, {2, 7}), 0.5)

    def test_corpus_span_counts(self):
        """Test a sentence without entities and without splits leaves span F1 at 1."""
        ls = ace_label_space()
        gold = SentenceAnnotation(tokens=('a', 'b'))
        report = corpus_eval([prediction(decoder='joint')], [gold], ls)
        self.assertEqual(report.span_f1, 1.0)


class ErrorTaxonomyTest(SimpleTestCase):
    def setUp(self):
        self.ls = ace_label_space()
        self.per, self.gpe = self.ls.id_of('PER'), self.ls.id_of('GPE')
        self.phys, self.soc = self.ls.id_of('PHYS'), self.ls.id_of('PER-SOC')
        self.gold = SentenceAnnotation(
            tokens=tuple('abcdef'),
            entities=(Entity(0, 3, self.per), Entity(4, 5, self.gpe)),
            relations=(Relation(0, 1, self.phys),),
        )

    def category(self, pred):
        counts = error_taxonomy(pred, self.gold, self.ls).as_dict()
        self.assertEqual(sum(counts.values()), 1)
        return next(name for name, count in counts.items() if count)

    def test_entity_not_found(self):
        """Test a missing argument entity is ENF."""
        self.assertEqual(self.category(prediction([Entity(0, 3, self.per)])), 'ENF')

    def test_span_splitting(self):
        """Test a boundary inside [0,3) is SSE."""
        pred = prediction([Entity(0, 1, self.per), Entity(1, 3, self.per), Entity(4, 5, self.gpe)])
        self.assertEqual(self.category(pred), 'SSE')

    def test_span_splitting_from_joint_splits(self):
        """Test a joint split inside an argument is SSE even without entities there."""
        pred = prediction([Entity(4, 5, self.gpe)], decoder='joint', splits=(2, 4, 5))
        self.assertEqual(self.category(pred), 'SSE')

    def test_entity_type_error(self):
        """Test a found span with the wrong type is ETE."""
        pred = prediction([Entity(0, 3, self.gpe), Entity(4, 5, self.gpe)], [Relation(0, 1, self.phys)])
        self.assertEqual(self.category(pred), 'ETE')

    def test_relation_not_found(self):
        """Test correct arguments without a relation is RNF."""
        self.assertEqual(self.category(prediction(self.gold.entities)), 'RNF')

    def test_relation_type_error(self):
        """Test correct arguments linked with the wrong type is RTE."""
        pred = prediction(self.gold.entities, [Relation(0, 1, self.soc), Relation(1, 0, self.soc)])
        self.assertEqual(self.category(pred), 'RTE')

    def test_recovered_relation_has_no_error(self):
        """Test a fully correct prediction has no errors and zero fractions."""
        breakdown = error_taxonomy(prediction(self.gold.entities, self.gold.relations), self.gold, self.ls)
        self.assertEqual(breakdown.total, 0)
        self.assertEqual(set(breakdown.fractions.values()), {0.0})

    def test_partition(self):
        """Test every unrecovered gold relation gets exactly one tag on random predictions."""
        rng = np.random.default_rng(6)
        golds, preds = [], []
        for _ in range(60):
            gold = random_annotation(rng, self.ls, max_length=20)
            p = ProbTensor(values=rng.dirichlet(np.ones(self.ls.size) * 0.3, size=(len(gold), len(gold))))
            mixed = ProbTensor(values=0.6 * tensor_of(gold, self.ls).values + 0.4 * p.values)
            golds.append(gold)
            preds.append(joint_decode(mixed, self.ls))
        report = corpus_eval(preds, golds, self.ls)
        breakdown = corpus_error_taxonomy(preds, golds, self.ls)
        self.assertEqual(breakdown.total, report.relation.gold - report.relation.correct)
        if breakdown.total:
            self.assertAlmostEqual(sum(breakdown.fractions.values()), 1.0, delta=1e-12)
        self.assertIn('RNF', ErrorBreakdownSerializer(breakdown).data['counts'])


class ReportTextTest(SimpleTestCase):
    def test_report_columns(self):
        """Test the text report aligns counts and rates under one header."""
        report = EvalReport(entity=Score(3, 3, 3), relation=Score(2, 1, 1), span=SpanScore(4, 4, 4))
        rows = report_text(EvalReportSerializer(report).data).splitlines()
        self.assertEqual(rows[0].split(), ['gold', 'pred', 'correct', 'P', 'R', 'F1'])
        self.assertEqual(rows[2].split(), ['relation', '2', '1', '1', '1.0000', '0.5000', '0.6667'])
        self.assertEqual(len({len(row) for row in rows}), 1)

    def test_breakdown_rows(self):
        """Test every category gets a row with its count and share, then the total."""
        breakdown = ErrorBreakdown.from_dict({'SSE': 1, 'RNF': 3})
        rows = breakdown_text(ErrorBreakdownSerializer(breakdown).data).splitlines()
        self.assertEqual([row.split()[0] for row in rows[1:]], ['SSE', 'ENF', 'ETE', 'RNF', 'RTE', 'total'])
        self.assertEqual(rows[4].split(), ['RNF', '3', '0.7500'])
        self.assertEqual(rows[-1].split(), ['total', '4'])


class DistanceHistogramTest(SimpleTestCase):
    def setUp(self):
        self.ls = ace_label_space()
        rng = np.random.default_rng(12)
        self.golds = [fixture(self.ls)] + [random_annotation(rng, self.ls, max_length=25) for _ in range(30)]
        self.tensors = [tensor_of(gold, self.ls) for gold in self.golds]

    def test_clean_separation(self):
        """Test clean tensors put non-boundaries in the first bin and boundaries at 2 or more."""
        hist = distance_histogram(self.tensors, self.golds, self.ls)
        self.assertEqual(len(hist.ent_bound), 51)
        self.assertEqual(sum(hist.non_ent_bound), hist.non_ent_bound[0])
        self.assertGreater(sum(hist.ent_bound), 0)
        self.assertEqual(sum(hist.ent_bound[:20]), 0)

    def test_uniform(self):
        """Test uniform tensors put both classes at zero."""
        tensors = [ProbTensor(values=np.full((len(g), len(g), self.ls.size), 1.0 / self.ls.size))
                   for g in self.golds]
        hist = distance_histogram(tensors, self.golds, self.ls)
        self.assertEqual(sum(hist.ent_bound), hist.ent_bound[0])
        self.assertEqual(sum(hist.non_ent_bound), hist.non_ent_bound[0])

    def test_length_mismatch(self):
        """Test a tensor and sentence of different lengths are rejected."""
        with self.assertRaises(ValueError):
            distance_histogram(self.tensors[:1], self.golds[1:2], self.ls)


class ThresholdSweepTest(SimpleTestCase):
    def test_default_grid(self):
        """Test 0.6:2.0:0.1 has 15 points, both ends included."""
        self.assertEqual(len(DEFAULT_ALPHAS), 15)
        self.assertEqual(parse_alpha_grid('0.6:2.0:0.1'), DEFAULT_ALPHAS)
        self.assertEqual(DEFAULT_ALPHAS[0], 0.6)
        self.assertEqual(DEFAULT_ALPHAS[-1], 2.0)
        self.assertEqual(parse_alpha_grid('1.0,1.4'), [1.0, 1.4])

    def test_bad_grid(self):
        """Test an inverted grid is rejected."""
        with self.assertRaises(ValueError):
            alpha_grid(2.0, 1.0, 0.1)

    def test_clean_corpus(self):
        """Test every threshold in [0.6, 1.9] scores 1 on clean tensors."""
        ls = ace_label_space()
        rng = np.random.default_rng(13)
        golds = [fixture(ls)] + [random_annotation(rng, ls, max_length=25) for _ in range(30)]
        tensors = [tensor_of(gold, ls) for gold in golds]
        for row in threshold_sweep(tensors, golds, ls, alpha_grid(0.6, 1.9, 0.1)):
            self.assertEqual((row.span_f1, row.entity_f1, row.relation_f1), (1.0, 1.0, 1.0), msg=row.alpha)

    def test_noisy_corpus_decays_past_the_closest_boundary(self):
        """Test F1 is perfect below the smallest gold-boundary distance and non-increasing above it."""
        sentences, ls = generate_corpus(GenConfig(seed=17), 100)
        tensors = render_tensors(sentences, ls, noise=NoiseConfig(mode='dirichlet-jitter', sigma=0.05, seed=17))
        closest = min(
            adjacent_distances(symmetrize(p, ls))[k - 1]
            for p, gold in zip(tensors, sentences)
            for k in entity_boundaries(gold.entities, p.size)
        )
        rows = threshold_sweep(tensors, sentences, ls, DEFAULT_ALPHAS)
        below = [row for row in rows if row.alpha < closest]
        above = [row for row in rows if row.alpha > closest]
        self.assertTrue(below)
        for row in below:
            self.assertEqual((row.span_f1, row.entity_f1), (1.0, 1.0), msg=row.alpha)
        for before, after in zip(above, above[1:]):
            self.assertLessEqual(after.span_f1, before.span_f1 + 1e-12, msg=after.alpha)
            self.assertLessEqual(after.entity_f1, before.entity_f1 + 1e-12, msg=after.alpha)

    def test_huge_threshold(self):
        """Test a threshold above every distance leaves one span per sentence."""
        ls = ace_label_space()
        golds = [fixture(ls)]
        row = threshold_sweep([tensor_of(golds[0], ls)], golds, ls, [1e6])[0]
        self.assertEqual(row.span_f1, 0.0)


class ScoreShardTest(SimpleTestCase):
    def test_shard_counts(self):
        """Test the scoring task returns count triples and error counts."""
        from common.serializers import LabelSpaceSerializer, SentenceSerializer
        from decoder.serializers import PredictionSerializer

        ls = ace_label_space()
        gold = fixture(ls)
        pred = prediction([Entity(0, 1, ls.id_of('PER')), Entity(2, 3, ls.id_of('GPE'))])
        context = {'label_space': ls}
        counts = score_shard(
            [PredictionSerializer(pred, context=context).data],
            [SentenceSerializer(gold, context=context).data],
            LabelSpaceSerializer(ls).data,
        )
        self.assertEqual(EvalReport.from_counts(counts).entity, Score(2, 2, 2))
        self.assertEqual(counts['errors']['RNF'], 1)
        self.assertEqual(ErrorBreakdown.from_dict(counts['errors']).total, 1)
