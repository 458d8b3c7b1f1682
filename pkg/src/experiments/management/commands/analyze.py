from experiments.base import ExperimentCommand
from experiments.workflow import analyze


class Command(ExperimentCommand):
    help = 'Embedding correlation, t-SNE projections and Shapley attribution.'

    def add_stage_arguments(self, parser):
        parser.add_argument('--checkpoint', help='Multi-task checkpoint; defaults to the designated evaluation run.')

    def run(self, loaded, layout, options):
        results = analyze(loaded, layout, options['force'], options['checkpoint'])
        self.stdout.write(self.style.SUCCESS(
            f'Correlated {len(results["correlations"])} task(s); outputs in {layout.analysis_dir}'
        ))
