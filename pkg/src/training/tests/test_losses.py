import math
from types import SimpleNamespace

import numpy as np
import torch
from django.test import SimpleTestCase

from core.testing import tiny_network_spec
from corpus.models import Label, Side
from networks.baselines import build_model
from networks.models import ForwardOutput
from training.exceptions import EmptyClass, InternalInvariantBroken
from training.losses import class_weights_from_manifest, total_loss, weighted_bce


class WeightedBCETests(SimpleTestCase):

    def test_worked_examples(self):
        self.assertAlmostEqual(float(weighted_bce(0.0, 1)), math.log(2.0), places=12)
        self.assertAlmostEqual(float(weighted_bce(-2.0, 1, w1=3.0)), 3.0 * math.log(1.0 + math.exp(2.0)), places=10)
        self.assertAlmostEqual(float(weighted_bce(-2.0, 1, w1=3.0)), 3.0 * 2.126928, places=5)

    def test_saturated_logits_stay_finite(self):
        self.assertEqual(float(weighted_bce(-1e6, 0)), 0.0)
        self.assertEqual(float(weighted_bce(1e6, 1)), 0.0)
        self.assertAlmostEqual(float(weighted_bce(-1e3, 1)), 1e3, places=6)
        self.assertEqual(float(weighted_bce(-math.inf, 0)), 0.0)

    def test_negative_weight_applies_to_negatives_only(self):
        logits = torch.tensor([0.3, -1.2], dtype=torch.float64)
        plain = weighted_bce(logits, torch.tensor([0.0, 0.0]))
        weighted = weighted_bce(logits, torch.tensor([0.0, 0.0]), w0=2.5, w1=7.0)
        torch.testing.assert_close(weighted, 2.5 * plain)


class TotalLossTests(SimpleTestCase):

    def test_matches_a_direct_formula_on_random_batches(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            batch = int(rng.integers(6, 30))
            n_tasks = int(rng.integers(1, 5))
            task_index = np.concatenate([np.arange(n_tasks), rng.integers(0, n_tasks, batch - n_tasks)])
            logits = rng.normal(0.0, 3.0, batch)
            labels = rng.integers(0, 2, batch).astype(np.float64)
            weights = {task: tuple(rng.uniform(0.2, 4.0, 2)) for task in range(n_tasks)}

            output = ForwardOutput(logits={}, head_hidden={}, rows={})
            for task in range(n_tasks):
                rows = np.flatnonzero(task_index == task)
                output.rows[task] = torch.from_numpy(rows)
                output.logits[task] = torch.from_numpy(logits[rows])
            total, per_task = total_loss(output, torch.from_numpy(labels), weights, list(range(n_tasks)))

            expected = 0.0
            for task in range(n_tasks):
                rows = task_index == task
                s = 1.0 / (1.0 + np.exp(-logits[rows]))
                y = labels[rows]
                w0, w1 = weights[task]
                task_loss = np.mean(-(w1 * y * np.log(s) + w0 * (1 - y) * np.log(1 - s)))
                self.assertAlmostEqual(float(per_task[task]), task_loss, places=9)
                expected += task_loss
            self.assertAlmostEqual(float(total), expected, places=9)

    def test_task_without_items(self):
        output = ForwardOutput(
            logits={0: torch.zeros(2)}, head_hidden={}, rows={0: torch.arange(2)},
        )
        with self.assertRaises(InternalInvariantBroken):
            total_loss(output, torch.zeros(2), {0: (1.0, 1.0), 1: (1.0, 1.0)}, [0, 1])


def counting_manifest(positives: int, negatives: int):
    pools = {Label.POSITIVE: [object()] * positives, Label.NEGATIVE: [object()] * negatives}
    return SimpleNamespace(select=lambda task, side, label: pools[label] if side is Side.TRAIN else [])


class ClassWeightTests(SimpleTestCase):

    def test_inverse_frequencies(self):
        w0, w1 = class_weights_from_manifest(counting_manifest(30, 90), 'COPD')
        self.assertAlmostEqual(w0, 120 / 180)
        self.assertAlmostEqual(w1, 2.0)

    def test_balanced_task_gets_unit_weights(self):
        self.assertEqual(class_weights_from_manifest(counting_manifest(12, 12), 'COPD'), (1.0, 1.0))

    def test_missing_class(self):
        with self.assertRaises(EmptyClass):
            class_weights_from_manifest(counting_manifest(0, 12), 'COPD')


class GradientTests(SimpleTestCase):

    def test_backprop_matches_central_differences(self):
        torch.manual_seed(0)
        model = build_model(tiny_network_spec(dropout=0.0)).double().eval()
        generator = torch.Generator().manual_seed(1)
        mfcc = torch.randn(4, 1, 48, 20, generator=generator, dtype=torch.float64)
        spec = torch.randn(4, 1, 48, 64, generator=generator, dtype=torch.float64)
        labels = torch.tensor([1.0, 0.0, 1.0, 0.0], dtype=torch.float64)
        task_index = torch.tensor([0, 1, 2, 0])
        weights = {0: (1.0, 2.0), 1: (0.5, 1.5), 2: (1.0, 1.0)}

        def loss():
            return total_loss(model(mfcc, spec, task_index=task_index), labels, weights, [0, 1, 2])[0]

        model.zero_grad()
        loss().backward()
        parameters = [parameter for parameter in model.parameters() if parameter.requires_grad]
        rng = np.random.default_rng(2)
        h = 1e-4
        for _ in range(20):
            parameter = parameters[int(rng.integers(len(parameters)))]
            flat = parameter.data.view(-1)
            position = int(rng.integers(flat.numel()))
            analytic = float(parameter.grad.view(-1)[position])
            original = float(flat[position])
            with torch.no_grad():
                flat[position] = original + h
                upper = float(loss())
                flat[position] = original - h
                lower = float(loss())
                flat[position] = original
            numeric = (upper - lower) / (2 * h)
            self.assertLess(abs(analytic - numeric) / max(1.0, abs(analytic), abs(numeric)), 1e-4)

    def test_dropped_task_leaves_its_head_untouched(self):
        torch.manual_seed(0)
        model = build_model(tiny_network_spec(dropout=0.0)).double().eval()
        generator = torch.Generator().manual_seed(3)
        mfcc = torch.randn(6, 1, 48, 20, generator=generator, dtype=torch.float64)
        spec = torch.randn(6, 1, 48, 64, generator=generator, dtype=torch.float64)
        labels = torch.tensor([1.0, 0.0, 1.0, 0.0, 1.0, 0.0], dtype=torch.float64)
        task_index = torch.tensor([0, 1, 2, 0, 1, 2])
        weights = {0: (1.0, 2.0), 1: (0.5, 1.5), 2: (1.0, 1.0)}

        def head_gradients(tasks):
            model.zero_grad(set_to_none=True)
            total_loss(model(mfcc, spec, task_index=task_index), labels, weights, tasks)[0].backward()
            return [
                [None if parameter.grad is None else parameter.grad.clone() for parameter in head.parameters()]
                for head in model.heads.heads
            ]

        full = head_gradients([0, 1, 2])
        without_first = head_gradients([1, 2])
        for gradient in without_first[0]:
            self.assertTrue(gradient is None or not gradient.any())
        for head in (1, 2):
            for expected, actual in zip(full[head], without_first[head]):
                torch.testing.assert_close(actual, expected)
