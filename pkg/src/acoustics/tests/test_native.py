import numpy as np
from django.test import SimpleTestCase, tag

from acoustics.models import DspConfig, Provenance, Waveform
from acoustics.native import NATIVE_FEATURES, compute_native_features
from core.testing import sine
from corpus.synthesis import VoiceParams, synthesize_voice


def voice(**params):
    defaults = dict(f0=130.0, duration_s=1.0, shimmer=0.0, jitter=0.0, breath_noise=0.0)
    defaults.update(params)
    return synthesize_voice(VoiceParams(**defaults), np.random.default_rng(11))


class NativeFeatureTests(SimpleTestCase):

    def test_every_declared_feature_is_present(self):
        vector = compute_native_features(voice(), DspConfig())
        self.assertEqual(vector.names, NATIVE_FEATURES)
        self.assertIs(vector.provenance, Provenance.NATIVE)

    def test_pitch_of_a_pure_tone(self):
        vector = compute_native_features(sine(200.0, duration_s=0.8), DspConfig())
        self.assertAlmostEqual(vector.get('f0_mean_hz'), 200.0, delta=4.0)
        self.assertLess(vector.get('jitter_local'), 0.002)

    def test_periodic_vowel_has_no_perturbation(self):
        # 128-sample period at 16 kHz, so every cycle is sample-identical
        vector = compute_native_features(voice(f0=125.0), DspConfig())
        self.assertAlmostEqual(vector.get('jitter_local'), 0.0, delta=1e-6)
        self.assertAlmostEqual(vector.get('shimmer_local'), 0.0, delta=1e-6)

    def test_injected_jitter_is_recovered(self):
        injected = 0.02
        measured = compute_native_features(voice(jitter=injected), DspConfig()).get('jitter_local')
        self.assertGreaterEqual(measured, 0.75 * injected)
        self.assertLessEqual(measured, 1.25 * injected)

    def test_white_noise_has_no_harmonic_energy(self):
        noise = np.random.default_rng(2).normal(0.0, 0.1, size=16000)
        vector = compute_native_features(Waveform(samples=noise, sample_rate=16000), DspConfig())
        self.assertLess(vector.get('hnr_mean_db'), 1.0)

    def test_leading_silence_leaves_perturbation_unchanged(self):
        cfg = DspConfig()
        waveform = voice(jitter=0.01, shimmer=0.04)
        padded = Waveform(np.concatenate([np.zeros(1600), waveform.samples]), waveform.sample_rate)
        plain, shifted = compute_native_features(waveform, cfg), compute_native_features(padded, cfg)
        self.assertAlmostEqual(plain.get('jitter_local'), shifted.get('jitter_local'), delta=1e-3)
        self.assertAlmostEqual(plain.get('shimmer_local'), shifted.get('shimmer_local'), delta=1e-3)

    def test_silence_marks_voicing_features_missing(self):
        vector = compute_native_features(Waveform(samples=np.zeros(8000), sample_rate=16000), DspConfig())
        for name in ('f0_mean_hz', 'jitter_local', 'shimmer_local', 'hnr_mean_db', 'mean_f2_hz', 'mfcc2_voiced_mean'):
            self.assertIsNone(vector.get(name), msg=name)
        self.assertEqual(vector.get('pause_fraction'), 1.0)

    def test_raised_second_formant_is_measured(self):
        cfg = DspConfig()
        plain = compute_native_features(voice(), cfg).get('mean_f2_hz')
        raised = compute_native_features(voice(f2_shift_hz=500.0), cfg).get('mean_f2_hz')
        self.assertGreater(raised - plain, 250.0)

    def test_quieter_voice_has_lower_intensity(self):
        cfg = DspConfig()
        loud = compute_native_features(voice(), cfg).get('mean_intensity_db')
        quiet = compute_native_features(voice(gain_db=-12.0), cfg).get('mean_intensity_db')
        self.assertAlmostEqual(loud - quiet, 12.0, delta=1.5)

    def test_pauses_raise_pause_fraction(self):
        cfg = DspConfig()
        steady = compute_native_features(voice(), cfg).get('pause_fraction')
        paused = compute_native_features(voice(pauses=4), cfg).get('pause_fraction')
        self.assertGreater(paused, steady + 0.1)

    @tag('slow')
    def test_jitter_marker_separates_classes(self):
        cfg = DspConfig()
        rng = np.random.default_rng(5)
        positives, negatives = [], []
        for _ in range(6):
            f0 = float(rng.uniform(100.0, 200.0))
            positives.append(compute_native_features(voice(f0=f0, jitter=0.003 + 0.024), cfg).get('jitter_local'))
            negatives.append(compute_native_features(voice(f0=f0, jitter=0.003), cfg).get('jitter_local'))
        self.assertGreaterEqual(np.median(positives), 3.0 * np.median(negatives))
