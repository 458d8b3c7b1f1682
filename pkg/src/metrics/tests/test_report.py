import json

from django.test import SimpleTestCase

from core.testing import TempDirMixin
from metrics.report import format_summary, render_comparison, render_report, report_tables
from metrics.scoring import aggregate


def sample_report(model='marvel', shift=0.0):
    report = aggregate(
        [{'COPD': 0.8 + shift, 'AD/MCI': 0.7 + shift}, {'COPD': 0.9 + shift, 'AD/MCI': 0.75 + shift}],
        model=model,
    )
    report.roc = {'COPD': [(0.0, 0.0), (0.0, 1.0), (1.0, 1.0)]}
    report.designated_run = 1
    return report


class ReportTableTests(SimpleTestCase):

    def test_rows_follow_category_order(self):
        category_table, task_table = report_tables([sample_report()])
        self.assertEqual([row[0] for row in category_table.rows], ['Respiratory', 'Neurological', 'All'])
        self.assertEqual([row[0] for row in task_table.rows], ['COPD', 'AD/MCI'])
        self.assertEqual(task_table.rows[0][1], format_summary(sample_report().tasks['COPD']))

    def test_best_model_of_each_row_is_bold(self):
        _, task_table = report_tables([sample_report('marvel'), sample_report('rn_s', shift=0.05)])
        self.assertEqual(task_table.header, ['Disorder', 'marvel', 'rn_s'])
        self.assertEqual(task_table.bold, {(0, 2), (1, 2)})

    def test_single_model_has_no_bold(self):
        category_table, _ = report_tables([sample_report()])
        self.assertEqual(category_table.bold, set())


class RenderTests(TempDirMixin, SimpleTestCase):

    def test_report_artifacts(self):
        written = render_report(sample_report(), self.tmp / 'eval', fingerprint='abc')
        self.assertEqual(set(written), {'report.json', 'report.md', 'report.pdf', 'roc_copd.png'})
        document = json.loads(written['report.json'].read_text())
        self.assertEqual(document['fingerprint'], 'abc')
        self.assertEqual(document['designated_run'], 1)
        self.assertAlmostEqual(document['tasks']['COPD']['mean'], 0.85)
        self.assertIn('`abc`', written['report.md'].read_text())
        self.assertTrue(written['report.pdf'].read_bytes().startswith(b'%PDF'))
        self.assertTrue(written['roc_copd.png'].read_bytes().startswith(b'\x89PNG'))

    def test_comparison_artifacts(self):
        reports = [sample_report('marvel'), sample_report('mlp', shift=-0.1)]
        written = render_comparison(reports, self.tmp, fingerprint='abc')
        document = json.loads(written['comparison.json'].read_text())
        self.assertEqual(document['models'], ['marvel', 'mlp'])
        markdown = written['comparison.md'].read_text()
        self.assertIn('| Disorder | marvel | mlp |', markdown)
        self.assertIn('**0.850 ± 0.071**', markdown)
