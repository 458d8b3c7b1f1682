import math
from collections import Counter
from dataclasses import replace

from django.test import SimpleTestCase

from core.testing import TINY_TASKS, tiny_split_corpus
from corpus.models import Label, Side, SplitConfig, build_tasks
from corpus.splits import make_splits
from pipeline.exceptions import EmptyPool
from pipeline.sampler import BalancedTaskSampler


class BalancedTaskSamplerTests(SimpleTestCase):

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.manifest, _ = tiny_split_corpus()
        cls.tasks = build_tasks(TINY_TASKS)

    def test_every_batch_is_exactly_balanced(self):
        sampler = BalancedTaskSampler(self.manifest, self.tasks, per_class=6, seed=0)
        self.assertEqual(sampler.batch_size, 2 * 6 * 3)
        for epoch in range(3):
            for draws in sampler.epoch(epoch):
                self.assertEqual(len(draws), sampler.batch_size)
                counts = Counter((draw.task.name, draw.label) for draw in draws)
                for task in TINY_TASKS:
                    self.assertEqual(counts[(task, 1)], 6)
                    self.assertEqual(counts[(task, 0)], 6)

    def test_items_are_grouped_by_task(self):
        sampler = BalancedTaskSampler(self.manifest, self.tasks, per_class=2, seed=0)
        draws = next(sampler.epoch(0))
        self.assertEqual([draw.task.index for draw in draws], [0] * 4 + [1] * 4 + [2] * 4)

    def test_epoch_covers_every_training_recording(self):
        sampler = BalancedTaskSampler(self.manifest, self.tasks, per_class=3, seed=4)
        largest = max(len(ids) for ids in sampler.pools.values())
        self.assertEqual(sampler.epoch_length(), math.ceil(largest / 3))
        drawn = {(draw.task.name, draw.recording_id) for draws in sampler.epoch(0) for draw in draws}
        for task in TINY_TASKS:
            for recording in self.manifest.select(task, Side.TRAIN):
                self.assertIn((task, recording.recording_id), drawn)

    def test_only_training_recordings_with_their_own_labels(self):
        sampler = BalancedTaskSampler(self.manifest, self.tasks, per_class=6, seed=1)
        by_id = {recording.recording_id: recording for recording in self.manifest.recordings}
        for draws in sampler.epoch(0):
            for draw in draws:
                recording = by_id[draw.recording_id]
                self.assertIs(self.manifest.side_of(recording.participant_id), Side.TRAIN)
                self.assertEqual(recording.labels[draw.task.name].value_int, draw.label)

    def test_draws_depend_on_seed_and_epoch_only(self):
        first = list(BalancedTaskSampler(self.manifest, self.tasks, 6, seed=2).epoch(1))
        again = list(BalancedTaskSampler(self.manifest, self.tasks, 6, seed=2).epoch(1))
        other = list(BalancedTaskSampler(self.manifest, self.tasks, 6, seed=2).epoch(2))
        self.assertEqual(first, again)
        self.assertNotEqual(first, other)

    def test_validation_participants_are_never_drawn(self):
        manifest = make_splits(replace(self.manifest, train=frozenset(), test=frozenset()),
                               SplitConfig(validation_fraction=0.2))
        sampler = BalancedTaskSampler(manifest, self.tasks, per_class=6, seed=0)
        by_id = {recording.recording_id: recording.participant_id for recording in manifest.recordings}
        drawn = {by_id[draw.recording_id] for draws in sampler.epoch(0) for draw in draws}
        self.assertFalse(drawn & manifest.validation)

    def test_empty_pool(self):
        task = TINY_TASKS[1]
        recordings = tuple(
            replace(recording, labels={name: label for name, label in recording.labels.items() if name != task})
            if recording.labels.get(task) is Label.NEGATIVE
            and self.manifest.side_of(recording.participant_id) is Side.TRAIN
            else recording
            for recording in self.manifest.recordings
        )
        with self.assertRaises(EmptyPool) as caught:
            BalancedTaskSampler(replace(self.manifest, recordings=recordings), self.tasks)
        self.assertEqual(caught.exception.context['task'], task)
