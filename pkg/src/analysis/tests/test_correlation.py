import numpy as np
from django.test import SimpleTestCase

from acoustics.models import HandcraftedFeatureVector
from analysis.correlation import best_dimension, correlate, pearson
from analysis.exceptions import InsufficientData, UndefinedCorrelation
from analysis.models import EmbeddingSet


def two_pass_pearson(x, y):
    mx, my = sum(x) / len(x), sum(y) / len(y)
    sxy = sum((a - mx) * (b - my) for a, b in zip(x, y))
    sxx = sum((a - mx) ** 2 for a in x)
    syy = sum((b - my) ** 2 for b in y)
    return sxy / (sxx * syy) ** 0.5


class PearsonTests(SimpleTestCase):

    def test_exact_lines(self):
        x = np.arange(10.0)
        self.assertAlmostEqual(pearson(x, x), 1.0, places=12)
        self.assertAlmostEqual(pearson(x, -2 * x + 3), -1.0, places=12)

    def test_matches_two_pass_formula_and_is_symmetric(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            x = rng.normal(size=30)
            y = 0.3 * x + rng.normal(size=30)
            self.assertAlmostEqual(pearson(x, y), two_pass_pearson(list(x), list(y)), delta=1e-12)
            self.assertEqual(pearson(x, y), pearson(y, x))

    def test_large_offsets_do_not_lose_precision(self):
        x = 1e8 + np.arange(10.0)
        self.assertAlmostEqual(pearson(x, 2 * x), 1.0, places=9)

    def test_constant_input_is_undefined(self):
        with self.assertRaises(UndefinedCorrelation):
            pearson([1.0, 1.0, 1.0], [1.0, 2.0, 3.0])

    def test_too_few_pairs(self):
        with self.assertRaises(InsufficientData):
            pearson([1.0], [2.0])

    def test_mismatched_lengths(self):
        with self.assertRaises(UndefinedCorrelation):
            pearson([1.0, 2.0], [1.0, 2.0, 3.0])


class BestDimensionTests(SimpleTestCase):

    def test_constant_columns_are_skipped(self):
        rng = np.random.default_rng(1)
        embedding = rng.normal(size=(20, 3))
        embedding[:, 0] = 5.0
        dim, r = best_dimension(embedding[:, 2] * -1.0, embedding)
        self.assertEqual(dim, 2)
        self.assertAlmostEqual(r, -1.0)


class CorrelateTests(SimpleTestCase):

    def setUp(self):
        rng = np.random.default_rng(2)
        self.ids = tuple(f'rec{i:02d}' for i in range(30))
        self.vectors = rng.normal(size=(30, 16))
        self.embeddings = EmbeddingSet(layer='head_hidden', task='COPD', recording_ids=self.ids, vectors=self.vectors)
        noise = rng.normal(size=30)
        self.values = {
            recording_id: {'planted': 2.0 * self.vectors[i, 7] + 1.0, 'noise': float(noise[i])}
            for i, recording_id in enumerate(self.ids)
        }

    def features(self, **extra):
        return {
            recording_id: HandcraftedFeatureVector({**values, **{name: column[i] for name, column in extra.items()}})
            for i, (recording_id, values) in enumerate(self.values.items())
        }

    def test_planted_feature_finds_its_dimension(self):
        report = correlate(self.embeddings, self.features(), 'COPD')
        top = report.rows[0]
        self.assertEqual((top.feature, top.best_dim, top.n), ('planted', 7, 30))
        self.assertAlmostEqual(top.r, 1.0, places=12)
        self.assertEqual([row.feature for row in report.rows], ['planted', 'noise'])
        self.assertEqual(report.layer, 'head_hidden')

    def test_constant_feature_leaves_other_rows_unchanged(self):
        base = correlate(self.embeddings, self.features(), 'COPD')
        extended = correlate(self.embeddings, self.features(flat=[3.0] * 30), 'COPD')
        self.assertEqual(extended.rows, base.rows)
        self.assertEqual(extended.skipped, ['flat'])

    def test_missing_values_drop_pairwise(self):
        gappy = [None if i % 3 == 0 else float(self.vectors[i, 4]) for i in range(30)]
        report = correlate(self.embeddings, self.features(gappy=gappy), 'COPD')
        row = next(row for row in report.rows if row.feature == 'gappy')
        self.assertEqual((row.best_dim, row.n), (4, 20))
        self.assertEqual(next(r for r in report.rows if r.feature == 'planted').n, 30)

    def test_too_few_common_recordings(self):
        features = {recording_id: vector for recording_id, vector in list(self.features().items())[:5]}
        with self.assertRaises(InsufficientData):
            correlate(self.embeddings, features, 'COPD', min_common=10)
