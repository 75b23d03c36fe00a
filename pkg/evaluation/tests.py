import csv
import itertools
import json
import random
import tempfile
from functools import lru_cache
from io import StringIO
from pathlib import Path

import numpy as np
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, TestCase, tag
from hypothesis import given, settings
from hypothesis import strategies as st

from cipher.services import default_charset
from obfuscation_backend.config import ConfigError
from seq2seq_core.config import pipeline_config

from .exceptions import CorpusError, InsufficientData
from .models import EvalRecord, StealthRow
from .reports import write_correlation_csv, write_stealth_csv
from .services import (
    COST_VARIABLES, char_variation, correlation_matrix, cost_experiment, levenshtein,
    normalized_distance, read_corpus, stealth_benchmark, sweep_lengths, trial_seed,
)

FIXTURE_CORPUS = Path(__file__).resolve().parent / 'fixtures' / 'stealth_pairs'
ABC = st.text(alphabet='abc', max_size=5)


@lru_cache(maxsize=None)
def reference_distance(a, b):
    """Recursive edit distance straight from its definition."""
    if not a:
        return len(b)
    if not b:
        return len(a)
    return min(
        reference_distance(a[1:], b) + 1,
        reference_distance(a, b[1:]) + 1,
        reference_distance(a[1:], b[1:]) + (a[0] != b[0]),
    )


def strings_up_to(length, alphabet='abc'):
    return [''.join(p) for n in range(length + 1) for p in itertools.product(alphabet, repeat=n)]


def write_corpus(directory, pairs):
    for set_id, (source, benchmark) in pairs.items():
        (directory / f'{set_id}.deobf').write_text(source, encoding='utf-8')
        (directory / f'{set_id}.obf-benchmark').write_text(benchmark, encoding='utf-8')


def small_config(seed=0):
    return pipeline_config(8, max_decode_len=30, seed=seed)


class LevenshteinTests(SimpleTestCase):
    def test_examples(self):
        self.assertEqual(levenshtein('abc', 'abc'), 0)
        self.assertEqual(levenshtein('', 'abc'), 3)
        self.assertEqual(levenshtein('kitten', 'sitting'), 3)
        self.assertEqual(levenshtein('ab', 'ba'), 2)

    def test_matches_reference_on_all_short_strings(self):
        strings = strings_up_to(3)
        for a, b in itertools.product(strings, repeat=2):
            self.assertEqual(levenshtein(a, b), reference_distance(a, b), (a, b))

    def test_matches_reference_on_sampled_longer_strings(self):
        strings = strings_up_to(5)
        rng = random.Random(0)
        for _ in range(10_000):
            a, b = rng.choice(strings), rng.choice(strings)
            self.assertEqual(levenshtein(a, b), reference_distance(a, b), (a, b))

    @settings(deadline=None, max_examples=500)
    @given(ABC, ABC, ABC)
    def test_metric_axioms(self, a, b, c):
        self.assertGreaterEqual(levenshtein(a, b), 0)
        self.assertEqual(levenshtein(a, a), 0)
        self.assertEqual(levenshtein(a, b) == 0, a == b)
        self.assertEqual(levenshtein(a, b), levenshtein(b, a))
        self.assertLessEqual(levenshtein(a, c), levenshtein(a, b) + levenshtein(b, c))

    @settings(deadline=None)
    @given(st.text(max_size=40), st.text(max_size=40))
    def test_bounded_by_lengths(self, a, b):
        distance = levenshtein(a, b)
        self.assertGreaterEqual(distance, abs(len(a) - len(b)))
        self.assertLessEqual(distance, max(len(a), len(b)))
        self.assertLessEqual(normalized_distance(a, b), 1.0)

    def test_normalized_distance_of_empty_strings(self):
        self.assertEqual(normalized_distance('', ''), 0.0)


class CharVariationTests(SimpleTestCase):
    def test_examples(self):
        self.assertEqual(char_variation('aaa'), 1)
        self.assertEqual(char_variation(''), 0)
        self.assertEqual(char_variation(default_charset()), 95)


class CorrelationMatrixTests(SimpleTestCase):
    def records(self, n=12, seed=3):
        rng = np.random.default_rng(seed)
        return [
            EvalRecord(
                plaintext_len=int(rng.integers(1, 500)),
                lev_distance=int(rng.integers(0, 500)),
                encrypt_time_s=float(rng.random()),
                keygen_time_s=float(rng.random()),
                char_variation=int(rng.integers(0, 95)),
                ciphertext_len=int(rng.integers(0, 100)),
                seed=i,
            )
            for i in range(n)
        ]

    def test_unit_diagonal_and_symmetry(self):
        matrix = correlation_matrix(self.records())
        self.assertEqual(matrix.shape, (6, 6))
        np.testing.assert_allclose(np.diag(matrix), 1.0, atol=1e-9)
        np.testing.assert_allclose(matrix, matrix.T, atol=1e-12)

    def test_perfect_linearity(self):
        records = self.records()
        for record in records:
            record.keygen_time_s = 2.0 * record.plaintext_len
        matrix = correlation_matrix(records)
        i, j = COST_VARIABLES.index('plaintext_len'), COST_VARIABLES.index('keygen_time_s')
        self.assertAlmostEqual(matrix[i, j], 1.0, delta=1e-9)

    def test_matches_two_pass_reference(self):
        records = self.records(n=30, seed=9)
        data = [[float(getattr(r, name)) for name in COST_VARIABLES] for r in records]
        n = len(data)
        means = [sum(row[k] for row in data) / n for k in range(6)]
        cov = [[sum((row[a] - means[a]) * (row[b] - means[b]) for row in data) / n
                for b in range(6)] for a in range(6)]
        expected = [[cov[a][b] / (cov[a][a] * cov[b][b]) ** 0.5 for b in range(6)] for a in range(6)]
        np.testing.assert_allclose(correlation_matrix(records), expected, atol=1e-9)

    def test_constant_variable_is_missing(self):
        records = self.records()
        for record in records:
            record.char_variation = 7
        matrix = correlation_matrix(records)
        k = COST_VARIABLES.index('char_variation')
        self.assertTrue(np.isnan(matrix[k]).all())
        self.assertAlmostEqual(matrix[0, 0], 1.0, delta=1e-9)

    def test_needs_three_records(self):
        with self.assertRaises(InsufficientData):
            correlation_matrix(self.records(n=2))

    def test_csv_blanks_undefined_entries(self):
        records = self.records()
        for record in records:
            record.char_variation = 7
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'corr.csv'
            write_correlation_csv(correlation_matrix(records), path)
            with open(path, newline='', encoding='utf-8') as fh:
                rows = list(csv.reader(fh))
        self.assertEqual(rows[0], ['', *COST_VARIABLES])
        self.assertEqual([row[0] for row in rows[1:]], list(COST_VARIABLES))
        self.assertEqual(rows[5][1:], [''] * 6)
        self.assertAlmostEqual(float(rows[1][1]), 1.0, delta=1e-9)


class SeedTests(SimpleTestCase):
    def test_trial_seeds_are_stable_and_distinct(self):
        self.assertEqual(trial_seed(1, 0, 0), trial_seed(1, 0, 0))
        seeds = {trial_seed(1, s, t) for s in range(5) for t in range(20)}
        self.assertEqual(len(seeds), 100)
        self.assertTrue(all(0 <= s < 2 ** 64 for s in seeds))


class CorpusTests(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def test_fixture_corpus_has_five_pairs(self):
        pairs = read_corpus(FIXTURE_CORPUS)
        self.assertEqual([set_id for set_id, _, _ in pairs], ['set1', 'set2', 'set3', 'set4', 'set5'])

    def test_unpaired_file(self):
        write_corpus(self.dir, {'a': ('x = 1', 'x=1')})
        (self.dir / 'b.deobf').write_text('y = 2', encoding='utf-8')
        with self.assertRaisesMessage(CorpusError, 'b'):
            read_corpus(self.dir)

    def test_empty_and_missing_directories(self):
        with self.assertRaises(CorpusError):
            read_corpus(self.dir)
        with self.assertRaises(CorpusError):
            read_corpus(self.dir / 'missing')

    def test_empty_source(self):
        write_corpus(self.dir, {'a': ('', 'x')})
        with self.assertRaises(CorpusError):
            read_corpus(self.dir)


class StealthBenchmarkTests(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def test_rows_and_aggregates(self):
        write_corpus(self.dir, {
            'rev': ('ab', 'ba'),
            'same': ('x = 1', 'x = 1'),
            'p1': ('print(1)', 'print (1)'),
            'p2': ('a = b + c', 'a=b+c'),
        })
        report = stealth_benchmark(self.dir, trials_per_sample=3, config=small_config(), seed=1)

        rows = {row.set_id: row for row in report.rows}
        self.assertEqual(rows['rev'].benchmark_distance, 2)
        self.assertTrue(rows['same'].flagged)
        self.assertIsNone(rows['same'].ratio)
        self.assertEqual(report.ciphertext_count, 12)
        for row in report.valid_rows:
            self.assertEqual(row.trials, 3)
            self.assertAlmostEqual(row.ratio, row.proposed_mean_distance / row.benchmark_distance)

        ratios = [row.ratio for row in report.valid_rows]
        self.assertAlmostEqual(report.mean_ratio, float(np.mean(ratios)))
        self.assertAlmostEqual(report.std_ratio, float(np.std(ratios)))
        self.assertNotIn('same', report.mean_ratio_excl)
        self.assertAlmostEqual(report.mean_ratio_excl['rev'], (rows['p1'].ratio + rows['p2'].ratio) / 2)

    def test_deterministic_and_thread_count_independent(self):
        write_corpus(self.dir, {'a': ('print(1)', 'print (1)'), 'b': ('x = 2', 'x=2')})
        serial = stealth_benchmark(self.dir, 4, small_config(), seed=5, jobs=1)
        threaded = stealth_benchmark(self.dir, 4, small_config(), seed=5, jobs=3)
        self.assertEqual(
            [row.proposed_mean_distance for row in serial.rows],
            [row.proposed_mean_distance for row in threaded.rows],
        )

    def test_trials_must_be_positive(self):
        write_corpus(self.dir, {'a': ('ab', 'ba')})
        with self.assertRaises(ConfigError):
            stealth_benchmark(self.dir, 0, small_config())

    def test_csv_trailer(self):
        write_corpus(self.dir, {'a': ('ab', 'ba'), 'b': ('x', 'x')})
        report = stealth_benchmark(self.dir, 2, small_config(), seed=2)
        path = self.dir / 'out.csv'
        write_stealth_csv(report, path)
        lines = path.read_text(encoding='utf-8').splitlines()

        self.assertEqual(lines[0], 'set_id,benchmark_distance,proposed_mean_distance,ratio,trials')
        self.assertTrue(lines[2].startswith('b,0,'))
        self.assertTrue(lines[2].endswith(',,2'))
        trailer = [line for line in lines if line.startswith('#')]
        self.assertIn('# std_convention=population', trailer)
        self.assertIn('# flagged=b', trailer)
        self.assertIn('# ciphertexts=4', trailer)

    @tag('slow')
    def test_fixture_corpus_at_full_scale(self):
        report = stealth_benchmark(FIXTURE_CORPUS, 100, seed=2024)
        self.assertEqual(report.ciphertext_count, 500)
        self.assertEqual(len(report.rows), 5)
        for row in report.rows:
            self.assertFalse(row.flagged)
            self.assertGreater(row.benchmark_distance, 0)
            self.assertEqual(row.trials, 100)
            self.assertGreater(row.ratio, 0)
        self.assertGreaterEqual(report.mean_normalized_distance, 0.8)


class CostExperimentTests(SimpleTestCase):
    def test_sweep_lengths(self):
        self.assertEqual(sweep_lengths(10, 20, 2), [10, 20])
        self.assertEqual(sweep_lengths(50, 500, 10), list(range(50, 501, 50)))
        for args in ((0, 10, 3), (10, 10, 3), (10, 5, 3), (1, 10, 1)):
            with self.assertRaises(ConfigError):
                sweep_lengths(*args)

    def test_records_hold_invariants(self):
        records = cost_experiment(5, 40, 3, config=small_config(), seed=3, keygen_iterations=2)
        self.assertEqual([r.plaintext_len for r in records], [5, 22, 40])
        for record in records:
            self.assertGreaterEqual(record.lev_distance, abs(record.plaintext_len - record.ciphertext_len))
            self.assertLessEqual(record.char_variation, record.ciphertext_len)
            self.assertLessEqual(record.ciphertext_len, 30)
            self.assertGreater(record.keygen_time_s, 0)
            self.assertGreater(record.encrypt_time_s, 0)

    def test_seeded_sweep_is_repeatable(self):
        first = cost_experiment(5, 10, 2, config=small_config(), seed=8, keygen_iterations=1)
        second = cost_experiment(5, 10, 2, config=small_config(), seed=8, keygen_iterations=1)
        self.assertEqual(
            [(r.lev_distance, r.ciphertext_len, r.seed) for r in first],
            [(r.lev_distance, r.ciphertext_len, r.seed) for r in second],
        )

    @tag('slow')
    def test_keygen_time_is_linear_in_length(self):
        records = cost_experiment(50, 500, 10, seed=1, keygen_iterations=200)
        lengths = [r.plaintext_len for r in records]
        keygen = np.corrcoef(lengths, [r.keygen_time_s for r in records])[0, 1]
        self.assertGreaterEqual(keygen, 0.9)

    @tag('slow')
    def test_ciphertext_length_does_not_follow_plaintext_length(self):
        # A single ten-point sweep has a correlation standard error near 1/3,
        # so the sweep is repeated under twenty seeds and pooled.
        records = [
            record
            for seed in range(20)
            for record in cost_experiment(50, 500, 10, seed=seed, keygen_iterations=0)
        ]
        self.assertEqual(len(records), 200)
        self.assertTrue(all(r.ciphertext_len <= 100 for r in records))
        correlation = np.corrcoef(
            [r.plaintext_len for r in records], [r.ciphertext_len for r in records]
        )[0, 1]
        self.assertLessEqual(abs(np.nan_to_num(correlation)), 0.3)

    @tag('slow')
    def test_dissimilarity_grows_with_length(self):
        records = cost_experiment(200, 600, 9, seed=4, keygen_iterations=1)
        lengths = [r.plaintext_len for r in records]
        correlation = np.corrcoef(lengths, [r.lev_distance for r in records])[0, 1]
        self.assertGreaterEqual(correlation, 0.95)


class EvalCommandTests(TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def test_cost_writes_two_csvs(self):
        out = StringIO()
        call_command(
            'eval', 'cost', '--min', '5', '--max', '20', '--points', '3', '--seed', '1',
            '--hidden', '8', '--max-decode-len', '20', '--keygen-iterations', '1',
            '--output', str(self.dir / 'cost.csv'),
            '--correlation-output', str(self.dir / 'corr.csv'), '--record',
            stdout=out,
        )
        summary = json.loads(out.getvalue())
        self.assertEqual(summary['records'], 3)
        with open(self.dir / 'cost.csv', newline='', encoding='utf-8') as fh:
            rows = list(csv.DictReader(fh))
        self.assertEqual(list(rows[0]), ['plaintext_len', 'lev_distance', 'encrypt_time_s',
                                         'keygen_time_s', 'char_variation', 'ciphertext_len', 'seed'])
        self.assertEqual([row['plaintext_len'] for row in rows], ['5', '12', '20'])
        self.assertAlmostEqual(
            summary['mean_ciphertext_len'], sum(int(row['ciphertext_len']) for row in rows) / 3
        )
        self.assertTrue((self.dir / 'corr.csv').exists())
        self.assertEqual(EvalRecord.objects.count(), 3)

    def test_stealth_writes_csv(self):
        corpus = self.dir / 'pairs'
        corpus.mkdir()
        write_corpus(corpus, {'a': ('print(1)', 'print (1)')})
        out = StringIO()
        call_command(
            'eval', 'stealth', '--corpus', str(corpus), '--trials', '2', '--seed', '3',
            '--hidden', '8', '--output', str(self.dir / 'stealth.csv'), '--record', stdout=out,
        )
        summary = json.loads(out.getvalue())
        self.assertEqual(summary['ciphertexts'], 2)
        self.assertTrue((self.dir / 'stealth.csv').exists())
        self.assertEqual(StealthRow.objects.get().set_id, 'a')

    def test_missing_corpus_exits_1(self):
        with self.assertRaises(CommandError) as ctx:
            call_command('eval', 'stealth', '--corpus', str(self.dir / 'none'), '--seed', '1')
        self.assertEqual(ctx.exception.returncode, 1)

    def test_unknown_subcommand_exits_1(self):
        with self.assertRaises(CommandError) as ctx:
            call_command('eval', 'bogus')
        self.assertEqual(ctx.exception.returncode, 1)
