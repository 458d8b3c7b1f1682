import numpy as np
from django.test import SimpleTestCase, tag

from acoustics.models import DspConfig
from acoustics.native import compute_native_features
from core.testing import TINY_TASKS, tiny_corpus, tiny_synth_spec
from corpus.models import Label
from corpus.synthesis import VoiceParams, apply_marker, generate_synthetic_corpus, marker_fidelity


class SyntheticCorpusTests(SimpleTestCase):

    def test_same_seed_gives_identical_waveforms(self):
        first_manifest, first = tiny_corpus()
        second_manifest, second = tiny_corpus()
        self.assertEqual(first_manifest.fingerprint(), second_manifest.fingerprint())
        for recording_id in first:
            np.testing.assert_array_equal(first[recording_id].samples, second[recording_id].samples)

    def test_another_seed_changes_the_audio(self):
        _, first = tiny_corpus()
        _, second = tiny_corpus(seed=1)
        self.assertFalse(np.array_equal(first['P0000_R00'].samples, second['P0000_R00'].samples))

    def test_each_task_has_balanced_classes(self):
        manifest, store = tiny_corpus()
        self.assertEqual(manifest.task_names, TINY_TASKS)
        for task in TINY_TASKS:
            self.assertEqual(len(manifest.participants_for(task, Label.POSITIVE)), 6)
            self.assertEqual(len(manifest.participants_for(task, Label.NEGATIVE)), 6)
        self.assertEqual(len(store), len(manifest.recordings))
        self.assertEqual(len(manifest.recordings), 3 * 6 * 2)

    def test_no_participant_is_both_positive_and_negative(self):
        manifest, _ = tiny_corpus(comorbidity_probability=0.5)
        for task in TINY_TASKS:
            both = set(manifest.participants_for(task, Label.POSITIVE)) & set(manifest.participants_for(task, Label.NEGATIVE))
            self.assertFalse(both)

    def test_recordings_have_the_configured_length(self):
        _, store = tiny_corpus()
        for waveform in store.values():
            self.assertEqual(len(waveform.samples), int(round(0.6 * 16000)))
            self.assertLessEqual(np.max(np.abs(waveform.samples)), 1.0)

    def test_zero_strength_leaves_parameters_untouched(self):
        params = VoiceParams()
        for marker in ('jitter', 'shimmer', 'pause', 'f2_shift'):
            self.assertEqual(apply_marker(params, marker, 0.0), params)

    def test_unknown_marker(self):
        with self.assertRaises(ValueError):
            apply_marker(VoiceParams(), 'vibrato', 0.5)


class MarkerFidelityTests(SimpleTestCase):

    @tag('slow')
    def test_strong_markers_move_their_feature(self):
        spec = tiny_synth_spec(participants_per_class=8, duration_s=1.0)
        manifest, store = generate_synthetic_corpus(spec)
        cfg = DspConfig()
        features = {rid: compute_native_features(waveform, cfg) for rid, waveform in store.items()}
        results = marker_fidelity(manifest, features, spec)
        jitter = results['Benign Lesions of the Vocal Cord']
        self.assertEqual(jitter['feature'], 'jitter_local')
        self.assertLess(jitter['p_value'], 0.01)
        self.assertGreaterEqual(jitter['median_pos'], 3.0 * jitter['median_neg'])
        self.assertLess(results['AD/MCI']['p_value'], 0.01)
