import json
import math

from django.test import SimpleTestCase, tag

from acoustics.models import HandcraftedFeatureVector
from core.testing import TINY_TASKS, TempDirMixin, tiny_assembler, tiny_network_spec, tiny_split_corpus
from training.exceptions import NonFiniteLoss
from training.models import TrainConfig
from training.services import FINAL_CHECKPOINT, RUNLOG_FILENAME, cosine_lr, feature_matrix, run_dir_name, train


class ScheduleTests(SimpleTestCase):

    def test_cosine_schedule(self):
        self.assertAlmostEqual(cosine_lr(0, 1e-4, 40), 1e-4)
        self.assertAlmostEqual(cosine_lr(20, 1e-4, 40), 0.5e-4)
        self.assertAlmostEqual(cosine_lr(40, 1e-4, 40), 0.0)

    def test_run_directory_names(self):
        self.assertEqual(run_dir_name(3), 'run_03')


class FeatureMatrixTests(SimpleTestCase):

    def test_missing_values_are_nan(self):
        features = {
            'a': HandcraftedFeatureVector({'f0': 1.0, 'f1': 2.0}),
            'b': HandcraftedFeatureVector({'f0': None, 'f1': 3.0}),
        }
        matrix = feature_matrix(features, ['b', 'a'], ['f0', 'f1'])
        self.assertTrue(math.isnan(matrix[0, 0]))
        self.assertEqual(matrix[0, 1], 3.0)
        self.assertEqual(list(matrix[1]), [1.0, 2.0])


class TrainTests(TempDirMixin, SimpleTestCase):

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.manifest, cls.store = tiny_split_corpus()

    def train_once(self, name, **cfg):
        cfg = TrainConfig(**{'max_epochs': 2, 'runs': 1, 'lr': 1e-3, **cfg})
        assembler = tiny_assembler(self.tmp / 'cache', self.store)
        return train(tiny_network_spec(), self.manifest, cfg, assembler, self.tmp / name, run_fingerprint='fp')

    def test_run_writes_log_checkpoint_and_summary(self):
        logs = self.train_once('runs')
        self.assertEqual(len(logs), 1)
        log = logs[0]
        self.assertEqual(len(log.epochs), 2)
        self.assertTrue(all(math.isfinite(loss) for loss in log.losses()))
        run_dir = self.tmp / 'runs' / 'run_00'
        lines = (run_dir / RUNLOG_FILENAME).read_text().splitlines()
        self.assertEqual([json.loads(line)['epoch'] for line in lines], [0, 1])
        self.assertTrue((run_dir / FINAL_CHECKPOINT).exists())
        summary = json.loads((run_dir / 'run.json').read_text())
        self.assertEqual(summary['fingerprint'], 'fp')
        self.assertEqual(summary['checkpoint'], str(run_dir / FINAL_CHECKPOINT))
        self.assertEqual(tuple(summary['tasks']), TINY_TASKS)

    def test_first_epoch_uses_the_base_rate(self):
        log = self.train_once('runs')[0]
        self.assertAlmostEqual(log.epochs[0].lr, 1e-3)
        self.assertAlmostEqual(log.epochs[1].lr, cosine_lr(1, 1e-3, 2))

    @tag('slow')
    def test_same_seed_same_losses(self):
        first = self.train_once('first')[0].losses()
        second = self.train_once('second')[0].losses()
        self.assertEqual(first, second)

    def test_non_finite_loss_aborts_with_the_batch(self):
        with self.assertRaises(NonFiniteLoss):
            self.train_once('broken', class_weights={TINY_TASKS[0]: (math.inf, math.inf)})
        dump = json.loads((self.tmp / 'broken' / 'run_00' / 'nonfinite_batch.json').read_text())
        self.assertEqual((dump['epoch'], dump['batch']), (0, 0))
        self.assertTrue(dump['recording_ids'])
