from experiments.base import ExperimentCommand
from experiments.workflow import evaluate_models
from metrics.report import format_summary
from networks.models import ModelKind


class Command(ExperimentCommand):
    help = 'Score test splits with trained checkpoints and render AUROC reports.'

    def add_stage_arguments(self, parser):
        parser.add_argument(
            '--model', action='append', choices=[kind.value for kind in ModelKind],
            help='Model to evaluate; repeatable. Defaults to eval.models from the config.',
        )

    def run(self, loaded, layout, options):
        kinds = options['model'] or list(loaded.config.eval.models)
        for report in evaluate_models(loaded, layout, kinds, options['force']):
            self.stdout.write(f'{report.model}: overall AUROC {format_summary(report.overall)}')
