import numpy as np
from django.test import SimpleTestCase

from acoustics.audio import load_waveform, wav_path, write_waveform
from acoustics.cache import RepresentationCache
from acoustics.dsp import compute_representations
from acoustics.exceptions import MissingRepresentation
from acoustics.models import DspConfig
from acoustics.services import extract_corpus
from core.exceptions import FingerprintMismatch
from core.testing import TINY_DSP, TempDirMixin, sine


class RepresentationCacheTests(TempDirMixin, SimpleTestCase):

    def test_load_returns_what_was_saved(self):
        cache = RepresentationCache(self.tmp, TINY_DSP)
        spec, mfcc = compute_representations(sine(300.0), TINY_DSP)
        cache.save('r1', spec, mfcc)
        loaded_spec, loaded_mfcc = cache.load('r1')
        self.assertEqual(loaded_spec.values.dtype, spec.values.dtype)
        self.assertEqual(loaded_mfcc.values.dtype, mfcc.values.dtype)
        np.testing.assert_array_equal(loaded_spec.values, spec.values)
        np.testing.assert_array_equal(loaded_mfcc.values, mfcc.values)
        self.assertEqual(loaded_spec.frame_hop_s, spec.frame_hop_s)

    def test_load_matches_a_fresh_computation(self):
        cache = RepresentationCache(self.tmp, TINY_DSP)
        waveform = sine(180.0)
        cache.save('r1', *compute_representations(waveform, TINY_DSP))
        loaded_spec, loaded_mfcc = cache.load('r1')
        spec, mfcc = compute_representations(waveform, TINY_DSP)
        self.assertTrue(np.array_equal(loaded_spec.values, spec.values))
        self.assertTrue(np.array_equal(loaded_mfcc.values, mfcc.values))

    def test_status_tracks_the_dsp_fingerprint(self):
        cache = RepresentationCache(self.tmp, TINY_DSP)
        self.assertEqual(cache.status('r1'), 'missing')
        cache.save('r1', *compute_representations(sine(300.0), TINY_DSP))
        self.assertEqual(cache.status('r1'), 'match')
        other = RepresentationCache(self.tmp, DspConfig(mel_bins=80, n_mfcc=20))
        self.assertEqual(other.status('r1'), 'mismatch')
        with self.assertRaises(FingerprintMismatch):
            other.load('r1')

    def test_worker_count_does_not_change_the_fingerprint(self):
        self.assertEqual(DspConfig(workers=4).fingerprint(), DspConfig().fingerprint())

    def test_missing_entry(self):
        with self.assertRaises(MissingRepresentation):
            RepresentationCache(self.tmp, TINY_DSP).load('nope')


class ExtractCorpusTests(TempDirMixin, SimpleTestCase):

    def setUp(self):
        super().setUp()
        self.wav_dir = self.tmp / 'wav'
        for index, freq in enumerate((150.0, 220.0)):
            write_waveform(wav_path(self.wav_dir, f'r{index}'), sine(freq))

    def test_wav_store_round_trip_is_close(self):
        waveform = load_waveform(wav_path(self.wav_dir, 'r0'))
        np.testing.assert_allclose(waveform.samples, sine(150.0).samples, atol=1.0 / 32767)

    def test_fills_cache_and_returns_features(self):
        features = extract_corpus(['r1', 'r0'], self.wav_dir, self.tmp / 'cache', TINY_DSP,
                                  features_path=self.tmp / 'native.csv')
        self.assertEqual(sorted(features), ['r0', 'r1'])
        self.assertTrue((self.tmp / 'native.csv').exists())
        self.assertEqual(RepresentationCache(self.tmp / 'cache', TINY_DSP).status('r0'), 'match')

    def test_refuses_a_cache_from_another_config(self):
        extract_corpus(['r0'], self.wav_dir, self.tmp / 'cache', TINY_DSP)
        other = DspConfig(mel_bins=80, n_mfcc=20)
        with self.assertRaises(FingerprintMismatch):
            extract_corpus(['r0'], self.wav_dir, self.tmp / 'cache', other)
        extract_corpus(['r0'], self.wav_dir, self.tmp / 'cache', other, force=True)
        self.assertEqual(RepresentationCache(self.tmp / 'cache', other).status('r0'), 'match')
