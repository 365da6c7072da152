# corpus/tests.py
import io
import json
import os
import tempfile
import unittest
from collections import defaultdict
from pathlib import Path

import numpy as np
from django.apps import apps
from django.conf import settings
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, override_settings

from biaffine_net.models import TrainConfig
from common.serializers import SentenceSerializer
from decoder.decoding import agreement_rate, joint_decode
from decoder.models import DecodeConfig
from label_table.models import LabelSpace, ProbTensor, structure_of
from objectives.training import TrainingCorpus, train

from .benchmark import bench_decoders, span_stage_scaling, synthetic_batch
from .exceptions import CorpusFormatError, GenerationError, TensorFormatError
from .generator import generate_corpus, label_space_for
from .models import GenConfig, NoiseConfig
from .noise import corrupt_batch, corrupt_tensor, recovery_rate, render_tensors
from .storage import read_corpus, read_predictions, render_json, write_corpus, write_predictions
from .tensor_io import read_tensors, write_tensors

SLOW = os.getenv('UNIRE_SLOW_TESTS') == '1'


def corpus_bytes(sentences, ls):
    return b'\n'.join(render_json(SentenceSerializer(s, context={'label_space': ls}).data) for s in sentences)


class GeneratorTest(SimpleTestCase):
    def test_deterministic(self):
        """Test two runs with the same seed give byte-identical corpora."""
        first, ls = generate_corpus(GenConfig(seed=7), 5)
        second, _ = generate_corpus(GenConfig(seed=7), 5)
        self.assertEqual(corpus_bytes(first, ls), corpus_bytes(second, ls))

    def test_seed_changes_output(self):
        """Test a different seed gives a different corpus."""
        first, ls = generate_corpus(GenConfig(seed=1), 5)
        second, _ = generate_corpus(GenConfig(seed=2), 5)
        self.assertNotEqual(corpus_bytes(first, ls), corpus_bytes(second, ls))

    def test_label_space(self):
        """Test generated type names and the undirected relation share."""
        ls = label_space_for(GenConfig())
        self.assertEqual(ls.entity_types, ('ENT0', 'ENT1', 'ENT2'))
        self.assertEqual(ls.relation_types, ('REL0', 'REL1'))
        self.assertFalse(ls.is_symmetric(ls.id_of('REL0')))
        self.assertTrue(ls.is_symmetric(ls.id_of('REL1')))

    def test_no_relations_at_zero_density(self):
        """Test relation density 0 yields no relations anywhere."""
        sentences, _ = generate_corpus(GenConfig(seed=3, relation_density=0.0), 50)
        self.assertTrue(all(not s.relations for s in sentences))

    def test_sentence_invariants(self):
        """Test lengths, entity gaps and mirrored undirected relations."""
        cfg = GenConfig(seed=11, relation_density=1.0)
        sentences, ls = generate_corpus(cfg, 100)
        for sentence in sentences:
            self.assertTrue(cfg.min_length <= len(sentence.tokens) <= cfg.max_length)
            self.assertLessEqual(len(sentence.entities), cfg.max_entities)
            for left, right in zip(sentence.entities, sentence.entities[1:]):
                self.assertGreaterEqual(right.start - left.end, cfg.min_gap)
            pairs = {(r.head, r.tail, r.label) for r in sentence.relations}
            for head, tail, label in pairs:
                if ls.is_symmetric(label):
                    self.assertIn((tail, head, label), pairs)

    def test_lookup_table_ceiling(self):
        """Test every token maps to a single entity label at full signal, so a lookup table is exact."""
        sentences, _ = generate_corpus(GenConfig(seed=5, signal=1.0), 300)
        seen = defaultdict(set)
        for sentence in sentences:
            labels = [0] * len(sentence.tokens)
            for entity in sentence.entities:
                labels[entity.start:entity.end] = [entity.label] * (entity.end - entity.start)
            for token, label in zip(sentence.tokens, labels):
                seen[token].add(label)
        lookup = {token: labels.pop() for token, labels in seen.items() if len(labels) == 1}
        self.assertEqual(len(lookup), len(seen))
        correct = total = 0
        for sentence in sentences:
            for entity in sentence.entities:
                total += 1
                correct += all(lookup[t] == entity.label for t in sentence.tokens[entity.start:entity.end])
        self.assertEqual(correct, total)

    def test_infeasible_config(self):
        """Test entities that can never fit raise after bounded retries."""
        cfg = GenConfig(min_length=2, max_length=2, min_entity_length=3, max_entity_length=3,
                        relation_density=1.0, max_retries=5)
        with self.assertRaises(GenerationError):
            generate_corpus(cfg, 1)

    def test_vocabulary_too_small(self):
        """Test a vocabulary too small for disjoint pools is refused."""
        with self.assertRaises(GenerationError):
            generate_corpus(GenConfig(vocab_size=20), 1)

    def test_needs_a_sentence(self):
        with self.assertRaises(ValueError):
            generate_corpus(GenConfig(), 0)

    def test_bad_config(self):
        with self.assertRaises(ValueError):
            GenConfig(signal=1.5)


class NoiseTest(SimpleTestCase):
    def setUp(self):
        self.sentences, self.ls = generate_corpus(GenConfig(seed=21), 30)
        self.tensors = render_tensors(self.sentences, self.ls)

    def test_zero_sigma_is_identity(self):
        """Test both modes leave the tensor unchanged at sigma 0."""
        for mode in ('dirichlet-jitter', 'label-flip'):
            out = corrupt_tensor(self.tensors[0], NoiseConfig(mode=mode, sigma=0.0))
            np.testing.assert_array_equal(out.values, self.tensors[0].values)

    def test_full_label_flip_breaks_every_cell(self):
        """Test sigma 1 label-flip moves every cell's argmax off the gold label."""
        p = self.tensors[0]
        out = corrupt_tensor(p, NoiseConfig(mode='label-flip', sigma=1.0, seed=4))
        self.assertTrue(np.all(np.argmax(out.values, axis=2) != np.argmax(p.values, axis=2)))
        out.check_normalized()

    def test_jitter_stays_normalized(self):
        """Test dirichlet jitter output remains a valid distribution per cell."""
        out = corrupt_tensor(self.tensors[0], NoiseConfig(mode='dirichlet-jitter', sigma=0.3, seed=4))
        out.check_normalized()
        self.assertTrue(np.all(out.values > 0))

    def test_batch_is_deterministic(self):
        cfg = NoiseConfig(mode='label-flip', sigma=0.1, seed=9)
        first, second = corrupt_batch(self.tensors, cfg), corrupt_batch(self.tensors, cfg)
        for a, b in zip(first, second):
            np.testing.assert_array_equal(a.values, b.values)

    def test_bad_noise_config(self):
        with self.assertRaises(ValueError):
            NoiseConfig(mode='blur')
        with self.assertRaises(ValueError):
            NoiseConfig(sigma=-0.1)

    def test_clean_recovery(self):
        """Test joint decoding recovers every clean generated sentence."""
        self.assertEqual(recovery_rate(self.sentences, self.ls, NoiseConfig(sigma=0.0)), 1.0)

    def test_joint_corrects_label_flips(self):
        """Test joint decoding recovers at least as many sentences as hard decoding under 5% label flips."""
        sentences, ls = generate_corpus(GenConfig(seed=8), 200)
        noise = NoiseConfig(mode='label-flip', sigma=0.05, seed=8)
        joint = recovery_rate(sentences, ls, noise, decoder='joint')
        hard = recovery_rate(sentences, ls, noise, decoder='hard')
        self.assertGreaterEqual(joint, hard)
        self.assertGreater(joint, 0.0)

    def test_oracle_agreement_under_jitter(self):
        """Test joint agrees with the oracle more often than hard decoding on short jittered tensors."""
        cfg = GenConfig(seed=13, min_length=2, max_length=6, max_entities=2, max_entity_length=2, min_gap=0)
        sentences, ls = generate_corpus(cfg, 200)
        clean = render_tensors(sentences, ls)
        self.assertEqual(agreement_rate(clean, ls), 1.0)
        noisy = render_tensors(sentences, ls, noise=NoiseConfig(mode='dirichlet-jitter', sigma=0.05, seed=13))
        self.assertEqual(agreement_rate(noisy, ls), 1.0)
        self.assertGreater(agreement_rate(noisy, ls), agreement_rate(noisy, ls, decoder='hard'))


class TensorFileTest(SimpleTestCase):
    def setUp(self):
        self.ls = LabelSpace.build(['A', 'B'], ['R'], ['R'])
        rng = np.random.default_rng(0)
        self.tensors = []
        for n in (1, 3, 7):
            values = rng.dirichlet(np.ones(self.ls.size), size=(n, n)).astype(np.float32)
            self.tensors.append(ProbTensor(values=values, labels=self.ls.labels))

    def test_round_trip_is_bit_exact(self):
        """Test writing and reading float32 tensors reproduces every value and the file bytes."""
        first, second = io.BytesIO(), io.BytesIO()
        write_tensors(self.tensors, self.ls.labels, first)
        first.seek(0)
        loaded = read_tensors(first, self.ls)
        for original, copy in zip(self.tensors, loaded):
            np.testing.assert_array_equal(original.values, copy.values)
            self.assertEqual(copy.labels, self.ls.labels)
        write_tensors(loaded, self.ls.labels, second)
        self.assertEqual(first.getvalue(), second.getvalue())

    def test_header(self):
        buffer = io.BytesIO()
        write_tensors(self.tensors[:1], self.ls.labels, buffer)
        self.assertTrue(buffer.getvalue().startswith(b'URTN1'))

    def test_label_table_mismatch(self):
        """Test reading against a different label space is refused."""
        buffer = io.BytesIO()
        write_tensors(self.tensors, self.ls.labels, buffer)
        buffer.seek(0)
        with self.assertRaises(TensorFormatError):
            read_tensors(buffer, LabelSpace.build(['A', 'C'], ['R'], ['R']))

    def test_bad_magic(self):
        with self.assertRaises(TensorFormatError):
            read_tensors(io.BytesIO(b'NOPE!' + b'\x00' * 16))

    def test_truncated(self):
        buffer = io.BytesIO()
        write_tensors(self.tensors, self.ls.labels, buffer)
        with self.assertRaises(TensorFormatError):
            read_tensors(io.BytesIO(buffer.getvalue()[:-4]))

    def test_wrong_label_count(self):
        with self.assertRaises(TensorFormatError):
            write_tensors(self.tensors, ('<null>', 'A'), io.BytesIO())


class StorageTest(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def test_corpus_round_trip(self):
        """Test writing then reading a corpus gives equal annotations and label space."""
        sentences, ls = generate_corpus(GenConfig(seed=2, relation_density=1.0), 40)
        write_corpus(sentences, ls, self.dir / 'train.jsonl')
        loaded, loaded_ls = read_corpus(self.dir / 'train.jsonl')
        self.assertEqual(loaded_ls, ls)
        self.assertEqual(loaded, sentences)

    def test_predictions_round_trip(self):
        sentences, ls = generate_corpus(GenConfig(seed=2), 10)
        results = [joint_decode(p, ls) for p in render_tensors(sentences, ls)]
        write_predictions(results, ls, self.dir / 'pred.jsonl')
        self.assertEqual(read_predictions(self.dir / 'pred.jsonl', ls), results)

    def test_bad_line_names_file_line_and_field(self):
        """Test a malformed record reports its location and offending field."""
        sentences, ls = generate_corpus(GenConfig(seed=2), 2)
        path = self.dir / 'train.jsonl'
        write_corpus(sentences, ls, path)
        with open(path, 'ab') as handle:
            handle.write(b'{"tokens": ["a", "b"], "entities": [{"start": 0, "end": 1, "type": "NOPE"}]}\n')
        with self.assertRaises(CorpusFormatError) as caught:
            read_corpus(path)
        self.assertIn('train.jsonl:3', str(caught.exception))
        self.assertIn('entities', str(caught.exception))

    def test_invalid_json(self):
        sentences, ls = generate_corpus(GenConfig(seed=2), 1)
        path = self.dir / 'train.jsonl'
        write_corpus(sentences, ls, path)
        with open(path, 'ab') as handle:
            handle.write(b'{"tokens": [\n')
        with self.assertRaises(CorpusFormatError) as caught:
            read_corpus(path)
        self.assertIn('train.jsonl:2', str(caught.exception))

    def test_missing_label_space(self):
        (self.dir / 'train.jsonl').write_text('')
        with self.assertRaises(CorpusFormatError):
            read_corpus(self.dir / 'train.jsonl')


class RoundTripRecoveryTest(SimpleTestCase):
    def test_thousand_generated_sentences(self):
        """Test 1,000 generated sentences rendered one-hot are all recovered by joint decoding at alpha 1.4."""
        cfg = GenConfig(seed=1000, min_length=1, max_length=40, max_entities=5, relation_density=0.7)
        sentences, ls = generate_corpus(cfg, 1000)
        self.assertTrue(ls.symmetric_relations)
        decode = DecodeConfig(threshold=1.4)
        for sentence, p in zip(sentences, render_tensors(sentences, ls)):
            gold = structure_of(sentence.entities, sentence.relations, ls)
            self.assertEqual(joint_decode(p, ls, decode).structure(ls), gold)


class BenchmarkTest(SimpleTestCase):
    def test_single_sentence_batch(self):
        """Test a one-sentence batch gives finite non-zero throughput for both decoders."""
        tensors, ls = synthetic_batch(1, 12, seed=3)
        table = bench_decoders(tensors, ls, runs=5, warmup=1)
        self.assertEqual([row.decoder for row in table], ['joint', 'hard'])
        for row in table:
            self.assertTrue(0 < row.sentences_per_second < float('inf'))

    def test_empty_batch(self):
        with self.assertRaises(ValueError):
            bench_decoders([], LabelSpace.build(['A']))

    def test_scaling_rows(self):
        rows = span_stage_scaling(lengths=(8, 16), count=2, runs=1)
        self.assertEqual([row['length'] for row in rows], [8, 16])
        self.assertIsNone(rows[0]['ratio'])
        self.assertGreater(rows[1]['ratio'], 0)

    @unittest.skipUnless(SLOW, 'set UNIRE_SLOW_TESTS=1 for timing runs')
    def test_joint_faster_than_hard(self):
        """Test joint decoding outpaces hard decoding on 500 sentences of 100 tokens."""
        tensors, ls = synthetic_batch(500, 100, seed=0)
        joint, hard = bench_decoders(tensors, ls)
        self.assertGreater(joint.sentences_per_second, hard.sentences_per_second)

    @unittest.skipUnless(SLOW, 'set UNIRE_SLOW_TESTS=1 for timing runs')
    def test_span_stage_is_quadratic(self):
        """Test each length doubling quadruples span-stage time within 25%."""
        rows = span_stage_scaling(lengths=(50, 100, 200, 400), count=5, runs=5)
        for row in rows[1:]:
            self.assertTrue(3.0 <= row['ratio'] <= 5.0, row)


class SettingsTest(SimpleTestCase):
    def test_installed_apps(self):
        """Test only the lab apps and DRF are installed; nothing needs auth or content types."""
        self.assertFalse(apps.is_installed('django.contrib.auth'))
        self.assertFalse(apps.is_installed('django.contrib.contenttypes'))
        for name in ('rest_framework', 'label_table', 'decoder', 'corpus'):
            self.assertTrue(apps.is_installed(name), name)


class CommandTest(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def run_command(self, *args, **options):
        out = io.StringIO()
        call_command(*args, stdout=out, **options)
        return out.getvalue()

    def generate(self, out, **options):
        options.setdefault('seed', 7)
        options.setdefault('n', 100)
        self.run_command('generate', out=str(out), **options)
        return Path(out)

    def test_generate_is_deterministic(self):
        """Test identical flags and seed give identical corpus files."""
        first, second = self.generate(self.dir / 'a'), self.generate(self.dir / 'b')
        for name in ('train.jsonl', 'dev.jsonl', 'labels.json'):
            self.assertEqual((first / name).read_bytes(), (second / name).read_bytes())
        train, _ = read_corpus(first / 'train.jsonl')
        dev, _ = read_corpus(first / 'dev.jsonl')
        self.assertEqual((len(train), len(dev)), (80, 20))

    def test_pipeline(self):
        """Test generate, train, decode and eval run end to end and print a report."""
        data = self.generate(self.dir / 'data')
        checkpoint = self.dir / 'model.ckpt'
        self.run_command('train', train=str(data / 'train.jsonl'), checkpoint=str(checkpoint),
                         hidden_size=8, embedding_size=8, max_epochs=2, batch_size=16, learning_rate=0.01)
        self.assertTrue(checkpoint.exists())
        self.assertTrue(Path(f"{checkpoint}.vocab.json").exists())
        lines = Path(f"{checkpoint}.log.jsonl").read_text().splitlines()
        records = [json.loads(line) for line in lines]
        self.assertEqual([record['epoch'] for record in records], [1, 2])
        for record in records:
            self.assertEqual(set(record), {'epoch', 'l_entry', 'l_sym', 'l_imp', 'dev_ent_f1', 'dev_rel_f1', 'lr'})
        summary = json.loads(Path(f"{checkpoint}.summary.json").read_text())
        self.assertEqual(summary['epochs'], 2)
        self.assertEqual(summary['config']['hidden_size'], 8)
        predictions = self.dir / 'pred.jsonl'
        self.run_command('decode', checkpoint=str(checkpoint), corpus=str(data / 'dev.jsonl'),
                         out=str(predictions), save_tensors=str(self.dir / 'dev.urtn'), shard_size=7)
        self.assertEqual(len(read_tensors(self.dir / 'dev.urtn')), 20)
        report = self.run_command('eval', predictions=str(predictions), gold=str(data / 'dev.jsonl'))
        for key in ('"entity"', '"relation"', '"span"', '"f1"'):
            self.assertIn(key, report)

    def test_decode_render_and_eval_gold(self):
        """Test decoding clean rendered tensors scores a perfect report with no relation errors."""
        data = self.generate(self.dir / 'data', n=50)
        tensors = data / 'dev.urtn'
        self.run_command('render', corpus=str(data / 'dev.jsonl'), out=str(tensors))
        predictions = self.dir / 'pred.jsonl'
        self.run_command('decode', tensors=str(tensors), out=str(predictions), shard_size=4)
        report = self.run_command('eval', predictions=str(predictions), gold=str(data / 'dev.jsonl'))
        scores = json.loads(report)
        self.assertEqual(scores['entity']['f1'], 1.0)
        self.assertEqual(scores['span']['f1'], 1.0)
        self.assertEqual(scores['relation']['predicted'], scores['relation']['gold'])
        self.assertEqual(scores['relation']['correct'], scores['relation']['gold'])
        errors = self.run_command('errors', predictions=str(predictions), gold=str(data / 'dev.jsonl'))
        self.assertIn('"total":0', errors)

        text = self.run_command('eval', predictions=str(predictions), gold=str(data / 'dev.jsonl'),
                                format='text', out=str(self.dir / 'report.txt'))
        rows = text.strip().splitlines()
        self.assertEqual([row.split()[0] for row in rows[1:]], ['entity', 'relation', 'span'])
        self.assertEqual(rows[1].split()[-1], '1.0000')
        self.assertEqual(len({len(row) for row in rows}), 1)
        self.assertEqual((self.dir / 'report.txt').read_text().strip(), text.strip())
        errors_text = self.run_command('errors', predictions=str(predictions), gold=str(data / 'dev.jsonl'),
                                       format='text')
        self.assertEqual(errors_text.strip().splitlines()[-1].split(), ['total', '0'])

    def test_oracle_refuses_long_sentences(self):
        """Test oracle decoding of 20-token sentences is refused with the size limit."""
        data = self.generate(self.dir / 'data', n=5, min_length=20, max_length=20)
        self.run_command('render', corpus=str(data / 'train.jsonl'), out=str(data / 'train.urtn'))
        with self.assertRaises(CommandError) as caught:
            self.run_command('decode', tensors=str(data / 'train.urtn'), decoder='oracle',
                             out=str(self.dir / 'pred.jsonl'))
        self.assertIn('|s| <= 8', str(caught.exception))

    def test_sweep_grid(self):
        """Test a 0.6:2.0:0.1 sweep over clean tensors gives 15 perfect rows."""
        data = self.generate(self.dir / 'data', n=30)
        self.run_command('render', corpus=str(data / 'dev.jsonl'), out=str(data / 'dev.urtn'))
        csv = self.run_command('sweep', tensors=str(data / 'dev.urtn'), gold=str(data / 'dev.jsonl'),
                               alphas='0.6:2.0:0.1')
        lines = csv.strip().splitlines()
        self.assertEqual(lines[0], 'alpha,span_f1,entity_f1,relation_f1')
        self.assertEqual(len(lines), 16)
        self.assertEqual(lines[1].split(',')[0], '0.6')
        self.assertEqual(lines[-1].split(',')[0], '2')
        for line in lines[1:15]:
            self.assertEqual(line.split(',')[1:], ['1.000000'] * 3)

    def test_hist(self):
        """Test the clean histogram puts every non-boundary distance in the first bin."""
        data = self.generate(self.dir / 'data', n=30)
        self.run_command('render', corpus=str(data / 'dev.jsonl'), out=str(data / 'dev.urtn'))
        lines = self.run_command('hist', tensors=str(data / 'dev.urtn'), gold=str(data / 'dev.jsonl')).splitlines()
        self.assertEqual(len(lines), 52)
        self.assertTrue(lines[-1].startswith('5,inf,'))
        self.assertTrue(all(line.endswith(',0') for line in lines[2:]))

    def test_distance_mode_follows_settings(self):
        """Test hist and sweep read the distance mode from settings when the flag is absent."""
        data = self.generate(self.dir / 'data', n=30)
        self.run_command('render', corpus=str(data / 'dev.jsonl'), out=str(data / 'dev.urtn'))
        paths = dict(tensors=str(data / 'dev.urtn'), gold=str(data / 'dev.jsonl'))
        l2 = self.run_command('hist', distance_mode='l2', **paths)
        self.assertNotEqual(l2, self.run_command('hist', distance_mode='squared', **paths))
        with override_settings(UNIRE={**settings.UNIRE, 'DISTANCE_MODE': 'l2'}):
            self.assertEqual(self.run_command('hist', **paths), l2)
            self.assertEqual(self.run_command('sweep', alphas='1.0,3.0', **paths),
                             self.run_command('sweep', alphas='1.0,3.0', distance_mode='l2', **paths))

    def test_bench(self):
        csv = self.run_command('bench', count=2, length=10, runs=1, warmup=0)
        self.assertEqual([line.split(',')[0] for line in csv.strip().splitlines()], ['decoder', 'joint', 'hard'])
        scaling = self.run_command('bench', scaling=True, lengths='8,16', runs=1)
        self.assertEqual(len(scaling.strip().splitlines()), 3)

    def test_render_with_noise(self):
        data = self.generate(self.dir / 'data', n=10)
        out = self.run_command('render', corpus=str(data / 'dev.jsonl'), out=str(data / 'dev.urtn'),
                               noise='label-flip', sigma=0.1)
        self.assertIn('Wrote 2 tensors', out)

    def test_missing_file(self):
        with self.assertRaises(CommandError):
            self.run_command('eval', predictions=str(self.dir / 'none.jsonl'), gold=str(self.dir / 'none.jsonl'))

    def test_ablation_flags_train(self):
        """Test the ablation switches train without error."""
        data = self.generate(self.dir / 'data', n=20)
        out = self.run_command('train', train=str(data / 'train.jsonl'), checkpoint=str(self.dir / 'm.ckpt'),
                               hidden_size=4, embedding_size=4, max_epochs=1, use_sym_loss=False,
                               use_imp_loss=False, use_logit_dropout=False)
        self.assertIn('best epoch 1', out)

    @unittest.skipUnless(SLOW, 'set UNIRE_SLOW_TESTS=1 for desk-scale training')
    def test_desk_scale_learning(self):
        """Test training on a separable corpus reaches entity F1 0.95 and relation F1 0.90."""
        sentences, ls = generate_corpus(GenConfig(seed=0, vocab_size=200), 600)
        corpus = TrainingCorpus(train=sentences[:500], dev=sentences[500:], label_space=ls)
        config = TrainConfig(hidden_size=32, embedding_size=32, learning_rate=0.01, warmup_ratio=0.05,
                             logit_dropout=0.1, batch_size=16, max_epochs=200, patience=20)
        result = train(corpus, config)
        best = next(record for record in result.log if record.epoch == result.best_epoch)
        self.assertGreaterEqual(best.dev_ent_f1, 0.95)
        self.assertGreaterEqual(best.dev_rel_f1, 0.90)
