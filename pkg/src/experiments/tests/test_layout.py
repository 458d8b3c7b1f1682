from django.test import SimpleTestCase

from core.exceptions import FingerprintMismatch, MissingPrerequisite
from core.testing import TempDirMixin
from experiments.layout import OutputLayout, check_stage, read_stamp, require, stamp_stage, verify_stage


class StageStampTests(TempDirMixin, SimpleTestCase):

    def setUp(self):
        super().setUp()
        self.layout = OutputLayout(self.tmp)
        stamp_stage(self.layout.splits_dir, 'split', 'aaa', 'run', seeds=3)

    def test_stamp_round_trip(self):
        self.assertEqual(read_stamp(self.layout.splits_dir), {
            'stage': 'split', 'fingerprint': 'aaa', 'run_fingerprint': 'run', 'seeds': 3,
        })
        self.assertEqual(read_stamp(self.layout.corpus_dir), {})

    def test_same_configuration_may_overwrite(self):
        check_stage(self.layout.splits_dir, 'split', 'aaa')
        check_stage(self.layout.corpus_dir, 'synth', 'anything')

    def test_other_configuration_is_refused_unless_forced(self):
        with self.assertRaises(FingerprintMismatch) as ctx:
            check_stage(self.layout.splits_dir, 'split', 'bbb')
        self.assertEqual(ctx.exception.exit_code, 2)
        self.assertEqual(ctx.exception.context['recorded'], 'aaa')
        check_stage(self.layout.splits_dir, 'split', 'bbb', force=True)

    def test_consumed_stage_must_exist_and_match(self):
        verify_stage(self.layout.splits_dir, 'split', 'aaa')
        with self.assertRaises(FingerprintMismatch):
            verify_stage(self.layout.splits_dir, 'split', 'bbb')
        with self.assertRaisesMessage(MissingPrerequisite, 'run the synth command first') as ctx:
            verify_stage(self.layout.corpus_dir, 'synth', 'aaa')
        self.assertEqual(ctx.exception.exit_code, 3)

    def test_require_names_the_producer(self):
        with self.assertRaisesMessage(MissingPrerequisite, 'run the extract command first'):
            require(self.layout.feature_table, 'extract')

    def test_layout_paths(self):
        self.assertEqual(self.layout.runs_dir('mlp'), self.tmp / 'runs' / 'mlp')
        self.assertEqual(self.layout.eval_dir('marvel'), self.tmp / 'eval' / 'marvel')
        self.assertEqual(self.layout.split_manifest.parent, self.tmp / 'splits')
