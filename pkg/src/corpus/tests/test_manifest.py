from django.test import SimpleTestCase

from core.exceptions import MissingPrerequisite
from core.files import read_json, write_json
from core.testing import TempDirMixin, tiny_split_corpus
from corpus.exceptions import ManifestError
from corpus.models import category_of, slugify_task
from corpus.services import load_manifest, save_manifest


class ManifestFileTests(TempDirMixin, SimpleTestCase):

    def test_saved_manifest_loads_back_equal(self):
        manifest, _ = tiny_split_corpus()
        path = save_manifest(self.tmp / 'manifest.json', manifest, run_fingerprint='abc')
        self.assertEqual(read_json(path)['fingerprint'], 'abc')
        loaded = load_manifest(path)
        self.assertEqual(loaded.fingerprint(), manifest.fingerprint())
        self.assertEqual(loaded.test, manifest.test)

    def test_unknown_keys_are_rejected(self):
        manifest, _ = tiny_split_corpus()
        path = save_manifest(self.tmp / 'manifest.json', manifest)
        document = read_json(path)
        document['extra'] = 1
        write_json(path, document)
        with self.assertRaises(ManifestError):
            load_manifest(path)

    def test_unsupported_version(self):
        manifest, _ = tiny_split_corpus()
        path = save_manifest(self.tmp / 'manifest.json', manifest)
        document = read_json(path)
        document['version'] = 99
        write_json(path, document)
        with self.assertRaises(ManifestError):
            load_manifest(path)

    def test_missing_file_names_the_producer(self):
        with self.assertRaises(MissingPrerequisite) as caught:
            load_manifest(self.tmp / 'absent.json')
        self.assertIn('synth', str(caught.exception))


class TaskNamingTests(SimpleTestCase):

    def test_slugs_are_file_safe(self):
        self.assertEqual(slugify_task("Parkinson's"), 'parkinsons')
        self.assertEqual(slugify_task('AD/MCI'), 'ad_mci')
        self.assertEqual(slugify_task('Spasmodic Dysphonia/Laryngeal Tremor'), 'spasmodic_dysphonia_laryngeal_tremor')

    def test_categories(self):
        self.assertEqual(category_of('COPD'), 'Respiratory')
        self.assertEqual(category_of('AD/MCI'), 'Neurological')
        self.assertIsNone(category_of('Unknown'))
