from dataclasses import replace

import numpy as np
from django.test import SimpleTestCase

from core.testing import TempDirMixin, tiny_assembler, tiny_split_corpus
from corpus.models import Side, build_tasks
from pipeline.augment import augment_mfcc, augment_spec, fix_length
from pipeline.models import AugmentConfig, CropMode
from pipeline.serializers import AugmentConfigSerializer
from pipeline.services import sample_epoch

ALWAYS = AugmentConfig(
    noise_probability=1.0, mfcc_freq_mask_probability=1.0, mfcc_time_mask_probability=1.0,
    spec_freq_mask_probability=1.0, spec_time_mask_probability=1.0,
    mfcc_noise_sigma=0.0, mfcc_freq_mask_bins=4, mfcc_time_mask_frames=5, fixed_frames=40,
)
NEVER = replace(
    ALWAYS, noise_probability=0.0, mfcc_freq_mask_probability=0.0, mfcc_time_mask_probability=0.0,
    spec_freq_mask_probability=0.0, spec_time_mask_probability=0.0,
)


class FixLengthTests(SimpleTestCase):

    def setUp(self):
        self.x = np.arange(30, dtype=np.float64).reshape(10, 3)

    def test_short_inputs_are_zero_padded(self):
        out = fix_length(self.x, 14, CropMode.CENTER_CROP)
        self.assertEqual(out.shape, (14, 3))
        np.testing.assert_array_equal(out[:10], self.x)
        np.testing.assert_array_equal(out[10:], 0.0)

    def test_center_crop(self):
        np.testing.assert_array_equal(fix_length(self.x, 4, CropMode.CENTER_CROP), self.x[3:7])

    def test_pad_mode_cuts_the_end(self):
        np.testing.assert_array_equal(fix_length(self.x, 4, CropMode.PAD), self.x[:4])

    def test_random_crop_is_a_contiguous_window(self):
        out = fix_length(self.x, 4, CropMode.RANDOM_CROP, np.random.default_rng(0))
        start = int(out[0, 0]) // 3
        np.testing.assert_array_equal(out, self.x[start:start + 4])


class MaskTests(SimpleTestCase):

    def test_mfcc_masks_zero_one_band_each(self):
        x = np.ones((40, 20), dtype=np.float32)
        out = augment_mfcc(x, ALWAYS, np.random.default_rng(1))
        self.assertEqual(int(np.sum(np.all(out == 0.0, axis=0))), 4)
        self.assertEqual(int(np.sum(np.all(out == 0.0, axis=1))), 5)
        self.assertEqual(out.dtype, np.float32)

    def test_spec_masks_fill_with_the_mean(self):
        rng = np.random.default_rng(2)
        x = rng.normal(size=(40, 20))
        out = augment_spec(x, ALWAYS, np.random.default_rng(3))
        changed = out != x
        self.assertTrue(changed.any())
        np.testing.assert_allclose(out[changed], x.mean())
        # 15 % of 20 bins and of 40 frames
        self.assertEqual(int(np.sum(changed.all(axis=0))), 3)
        self.assertEqual(int(np.sum(changed.all(axis=1))), 6)

    def test_disabled_transforms_are_identity(self):
        x = np.random.default_rng(4).normal(size=(40, 20))
        np.testing.assert_array_equal(augment_mfcc(x, NEVER, np.random.default_rng(5)), x)
        np.testing.assert_array_equal(augment_spec(x, NEVER, np.random.default_rng(5)), x)

    def test_time_mask_must_fit(self):
        serializer = AugmentConfigSerializer(data={'fixed_frames': 10, 'mfcc_time_mask_frames': 10})
        self.assertFalse(serializer.is_valid())
        self.assertIn('mfcc_time_mask_frames', serializer.errors)


class BatchAssemblerTests(TempDirMixin, SimpleTestCase):

    def setUp(self):
        super().setUp()
        self.manifest, store = tiny_split_corpus()
        self.assembler = tiny_assembler(self.tmp, store, seed=9)
        self.tasks = build_tasks(self.manifest.task_names)

    def test_items_have_fixed_geometry(self):
        batch = next(sample_epoch(self.manifest, self.tasks, self.assembler, epoch=0, per_class=2))
        mfcc, spec, tasks, labels = batch.arrays()
        self.assertEqual(mfcc.shape, (12, 48, 20))
        self.assertEqual(spec.shape, (12, 48, 64))
        self.assertEqual(tasks.tolist(), [0] * 4 + [1] * 4 + [2] * 4)
        self.assertEqual(labels.tolist(), [1, 1, 0, 0] * 3)

    def test_augmentation_is_reproducible_per_item(self):
        first = next(sample_epoch(self.manifest, self.tasks, self.assembler, epoch=3, per_class=2))
        again = next(sample_epoch(self.manifest, self.tasks, self.assembler.with_seed(9), epoch=3, per_class=2))
        other = next(sample_epoch(self.manifest, self.tasks, self.assembler.with_seed(10), epoch=3, per_class=2))
        np.testing.assert_array_equal(first.arrays()[0], again.arrays()[0])
        self.assertFalse(np.array_equal(first.arrays()[0], other.arrays()[0]))

    def test_eval_inputs_are_unaugmented_center_crops(self):
        recording_id = self.manifest.select(self.manifest.task_names[0], Side.TEST)[0].recording_id
        mfcc, spec = self.assembler.eval_inputs([recording_id])
        full_mfcc, full_spec = self.assembler.representations(recording_id)
        np.testing.assert_array_equal(mfcc[0], fix_length(full_mfcc, 48, CropMode.CENTER_CROP))
        np.testing.assert_array_equal(spec[0], fix_length(full_spec, 48, CropMode.CENTER_CROP))
