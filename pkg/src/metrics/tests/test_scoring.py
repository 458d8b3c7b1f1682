import itertools

import numpy as np
from django.test import SimpleTestCase

from metrics.exceptions import UndefinedMetric
from metrics.models import ScoreSet
from metrics.scoring import aggregate, auroc, participant_scores, roc_curve, trapezoid_area


def score_set(scores, labels, task='COPD'):
    return ScoreSet(task=task, recording_ids=tuple(f'r{i}' for i in range(len(scores))), scores=scores, labels=labels)


def pairwise_auroc(scores, labels):
    positives = [s for s, y in zip(scores, labels) if y == 1]
    negatives = [s for s, y in zip(scores, labels) if y == 0]
    wins = sum(1.0 if p > n else 0.5 if p == n else 0.0 for p, n in itertools.product(positives, negatives))
    return wins / (len(positives) * len(negatives))


class AurocTests(SimpleTestCase):

    def test_matches_pairwise_counting(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            size = int(rng.integers(4, 40))
            labels = rng.integers(0, 2, size)
            labels[:2] = [0, 1]
            # coarse scores so that ties occur
            scores = np.round(rng.normal(size=size), 1)
            self.assertAlmostEqual(auroc(score_set(scores, labels)), pairwise_auroc(scores, labels), places=12)

    def test_flipping_labels_mirrors_the_value(self):
        rng = np.random.default_rng(1)
        scores = rng.normal(size=30)
        labels = np.array([0, 1] * 15)
        self.assertAlmostEqual(auroc(score_set(scores, 1 - labels)), 1.0 - auroc(score_set(scores, labels)), places=12)

    def test_invariant_under_monotone_transforms(self):
        rng = np.random.default_rng(2)
        scores = rng.normal(size=25)
        labels = rng.integers(0, 2, 25)
        labels[:2] = [0, 1]
        base = auroc(score_set(scores, labels))
        self.assertAlmostEqual(auroc(score_set(np.exp(scores), labels)), base, places=12)
        self.assertAlmostEqual(auroc(score_set(3 * scores + 7, labels)), base, places=12)

    def test_extremes(self):
        self.assertEqual(auroc(score_set([0.1, 0.2, 0.8, 0.9], [0, 0, 1, 1])), 1.0)
        self.assertEqual(auroc(score_set([0.5, 0.5, 0.5, 0.5], [0, 1, 0, 1])), 0.5)

    def test_single_class_is_undefined(self):
        with self.assertRaises(UndefinedMetric):
            auroc(score_set([0.1, 0.4], [1, 1]))

    def test_non_finite_scores_are_undefined(self):
        with self.assertRaises(UndefinedMetric):
            auroc(score_set([0.1, np.nan], [0, 1]))


class RocCurveTests(SimpleTestCase):

    def test_two_point_curve(self):
        self.assertEqual(roc_curve(score_set([1.0, 0.0], [1, 0])), [(0.0, 0.0), (0.0, 1.0), (1.0, 1.0)])

    def test_area_agrees_with_auroc(self):
        rng = np.random.default_rng(3)
        scores = np.round(rng.normal(size=40), 1)
        labels = np.array([0, 1] * 20)
        scores_set = score_set(scores, labels)
        points = roc_curve(scores_set)
        self.assertEqual(points[0], (0.0, 0.0))
        self.assertEqual(points[-1], (1.0, 1.0))
        self.assertAlmostEqual(trapezoid_area(points), auroc(scores_set), places=12)


class AggregateTests(SimpleTestCase):

    def test_mean_and_sample_std_over_runs(self):
        report = aggregate([{'COPD': 0.8}, {'COPD': 0.9}])
        self.assertAlmostEqual(report.tasks['COPD'].mean, 0.85)
        self.assertAlmostEqual(report.tasks['COPD'].std, 0.0707107, places=6)
        self.assertEqual(report.tasks['COPD'].runs, [0.8, 0.9])

    def test_category_averages_its_tasks_per_run(self):
        report = aggregate([{'Asthma': 0.6, 'COPD': 0.8, 'AD/MCI': 0.9}])
        self.assertAlmostEqual(report.categories['Respiratory'].mean, 0.7)
        self.assertAlmostEqual(report.categories['Neurological'].mean, 0.9)
        self.assertNotIn('Voice', report.categories)
        self.assertAlmostEqual(report.overall.mean, (0.6 + 0.8 + 0.9) / 3)
        self.assertEqual(report.overall.std, 0.0)

    def test_category_std_is_across_run_means(self):
        report = aggregate([{'Asthma': 0.6, 'COPD': 0.8}, {'Asthma': 0.8, 'COPD': 0.8}])
        self.assertAlmostEqual(report.categories['Respiratory'].mean, 0.75)
        self.assertAlmostEqual(report.categories['Respiratory'].std, np.std([0.7, 0.8], ddof=1))


class ParticipantScoreTests(SimpleTestCase):

    def test_scores_are_averaged_per_participant(self):
        scores = ScoreSet(
            task='COPD', recording_ids=('a1', 'a2', 'b1', 'c1'),
            scores=[0.2, 0.4, 0.9, 0.1], labels=[1, 1, 0, 0], run_seed=4,
        )
        collapsed = participant_scores(scores, {'a1': 'A', 'a2': 'A', 'b1': 'B', 'c1': 'C'})
        self.assertEqual(collapsed.recording_ids, ('A', 'B', 'C'))
        np.testing.assert_allclose(collapsed.scores, [0.3, 0.9, 0.1])
        self.assertEqual(list(collapsed.labels), [1, 0, 0])
        self.assertEqual(collapsed.run_seed, 4)
