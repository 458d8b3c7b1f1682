from django.test import SimpleTestCase

from acoustics.exceptions import DuplicateKey, ParseError
from acoustics.models import FeatureSchema, HandcraftedFeatureVector, Provenance
from acoustics.tables import ingest_feature_table, merge_feature_tables, write_feature_table
from core.testing import TempDirMixin


class FeatureTableTests(TempDirMixin, SimpleTestCase):

    def write(self, text):
        path = self.tmp / 'features.csv'
        path.write_text(text, encoding='utf-8')
        return path

    def test_ingest_marks_empty_cells_missing(self):
        path = self.write('recording_id,jitter_local,hnr_mean_db\nr1,0.01,\nr2,0.02,12.5\n')
        table = ingest_feature_table(path, FeatureSchema(names=('jitter_local',)))
        self.assertIsNone(table['r1'].get('hnr_mean_db'))
        self.assertEqual(table['r2'].get('hnr_mean_db'), 12.5)
        self.assertIs(table['r1'].provenance, Provenance.INGESTED)

    def test_duplicate_recording_is_rejected(self):
        path = self.write('recording_id,jitter_local\nr1,0.01\nr1,0.02\n')
        with self.assertRaises(DuplicateKey) as caught:
            ingest_feature_table(path, FeatureSchema())
        self.assertEqual(caught.exception.context['row'], 2)

    def test_non_numeric_cell_names_row_and_column(self):
        path = self.write('recording_id,jitter_local\nr1,0.01\nr2,abc\n')
        with self.assertRaises(ParseError) as caught:
            ingest_feature_table(path, FeatureSchema())
        self.assertEqual(caught.exception.context['row'], 2)
        self.assertEqual(caught.exception.context['column'], 'jitter_local')

    def test_infinite_cell_is_rejected(self):
        path = self.write('recording_id,jitter_local\nr1,inf\n')
        with self.assertRaises(ParseError):
            ingest_feature_table(path, FeatureSchema())

    def test_declared_column_must_exist(self):
        path = self.write('recording_id,jitter_local\nr1,0.01\n')
        with self.assertRaises(ParseError):
            ingest_feature_table(path, FeatureSchema(names=('shimmer_local',)))

    def test_export_keeps_full_precision_and_sorts_rows(self):
        vectors = {
            'r2': HandcraftedFeatureVector({'a': 0.1 + 0.2, 'b': None}),
            'r1': HandcraftedFeatureVector({'a': 1e-300, 'b': -3.0}),
        }
        path = write_feature_table(self.tmp / 'out.csv', vectors)
        lines = path.read_text(encoding='utf-8').splitlines()
        self.assertEqual(lines[0], 'recording_id,a,b')
        self.assertTrue(lines[1].startswith('r1,'))
        table = ingest_feature_table(path, FeatureSchema(names=('a', 'b')))
        self.assertEqual(table['r2'].get('a'), 0.1 + 0.2)
        self.assertIsNone(table['r2'].get('b'))

    def test_merge_prefers_later_tables(self):
        native = {'r1': HandcraftedFeatureVector({'a': 1.0, 'b': 2.0})}
        ingested = {'r1': HandcraftedFeatureVector({'b': 5.0, 'c': 6.0}, Provenance.INGESTED)}
        merged = merge_feature_tables(native, ingested)
        self.assertEqual(merged['r1'].values, {'a': 1.0, 'b': 5.0, 'c': 6.0})
