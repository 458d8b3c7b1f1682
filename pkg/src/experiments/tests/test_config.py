import json

from django.conf import settings
from django.test import SimpleTestCase

from core.exceptions import ConfigError
from core.testing import TempDirMixin, tiny_run_config
from experiments.config import SECTION_SERIALIZERS, config_schema, load_run_config, parse_run_config


class ParseRunConfigTests(SimpleTestCase):

    def test_empty_document_takes_every_default(self):
        config = parse_run_config({})
        self.assertEqual(config.seed, 0)
        self.assertEqual(config.output_dir, 'output')
        self.assertEqual(config.model.preset, 'full')
        self.assertEqual(config.train.lr, 1e-4)
        self.assertEqual(config.dsp.n_mfcc, 60)

    def test_global_seed_reaches_seeded_sections(self):
        config = parse_run_config({'seed': 9})
        self.assertEqual((config.synth.seed, config.split.seed, config.train.seed, config.analysis.seed), (9, 9, 9, 9))

    def test_unknown_keys_are_rejected(self):
        with self.assertRaises(ConfigError):
            parse_run_config({'sed': 1})
        with self.assertRaisesMessage(ConfigError, 'dsp'):
            parse_run_config({'dsp': {'mel_bin': 64}})

    def test_out_of_range_values_name_their_section(self):
        with self.assertRaisesMessage(ConfigError, 'train'):
            parse_run_config({'train': {'max_epochs': 0}})

    def test_not_an_object(self):
        with self.assertRaises(ConfigError):
            parse_run_config([1, 2])

    def test_shipped_configs_are_valid(self):
        configs = settings.MARVEL['DEFAULT_CONFIG'].parent
        for name in ('desk.json', 'null.json', 'low_data.json'):
            with self.subTest(name):
                parse_run_config(json.loads((configs / name).read_text()))


class FingerprintTests(SimpleTestCase):

    def test_output_location_and_workers_do_not_count(self):
        base = parse_run_config(tiny_run_config('a'))
        moved = parse_run_config(tiny_run_config('b', dsp={'workers': 4}))
        self.assertEqual(base.fingerprint(), moved.fingerprint())

    def test_any_effective_value_counts(self):
        base = parse_run_config(tiny_run_config('a'))
        changed = parse_run_config(tiny_run_config('a', train={'lr': 0.01}))
        self.assertNotEqual(base.fingerprint(), changed.fingerprint())

    def test_stage_fingerprints_follow_their_sections(self):
        base = parse_run_config(tiny_run_config('a'))
        changed = parse_run_config(tiny_run_config('a', train={'lr': 0.01}))
        self.assertEqual(base.stage_fingerprint('synth', 'split'), changed.stage_fingerprint('synth', 'split'))
        self.assertNotEqual(base.stage_fingerprint('train'), changed.stage_fingerprint('train'))


class LoadRunConfigTests(TempDirMixin, SimpleTestCase):

    def write(self, document):
        path = self.tmp / 'config.json'
        path.write_text(json.dumps(document) if not isinstance(document, str) else document)
        return path

    def test_overrides_are_applied_and_recorded(self):
        loaded = load_run_config(self.write(tiny_run_config('out')), seed=5, runs=3, out='elsewhere')
        self.assertEqual(loaded.config.seed, 5)
        self.assertEqual(loaded.config.train.seed, 5)
        self.assertEqual(loaded.config.train.runs, 3)
        self.assertEqual(loaded.config.output_dir, 'elsewhere')
        self.assertEqual(loaded.validated.seed, 0)
        self.assertEqual(loaded.overrides, {'seed': 5, 'runs': 3, 'output_dir': 'elsewhere'})
        self.assertEqual(loaded.fingerprint, loaded.config.fingerprint())

    def test_runs_override_must_be_positive(self):
        with self.assertRaises(ConfigError):
            load_run_config(self.write(tiny_run_config('out')), runs=0)

    def test_missing_and_malformed_files(self):
        with self.assertRaises(ConfigError):
            load_run_config(self.tmp / 'absent.json')
        with self.assertRaises(ConfigError):
            load_run_config(self.write('{"seed": '))


class SchemaTests(SimpleTestCase):

    def test_every_section_is_described(self):
        schema = config_schema()
        self.assertFalse(schema['additionalProperties'])
        self.assertEqual(set(schema['properties']), {'seed', 'output_dir', *SECTION_SERIALIZERS})
        dsp = schema['properties']['dsp']['properties']
        self.assertEqual(dsp['n_mfcc']['default'], 60)
        self.assertIn('choices', schema['properties']['model']['properties']['preset'])
