from experiments.base import ExperimentCommand
from experiments.workflow import train_model
from networks.models import ModelKind


class Command(ExperimentCommand):
    help = 'Train the multi-task model or one of the single-task baselines.'

    def add_stage_arguments(self, parser):
        parser.add_argument('--model', default=ModelKind.MARVEL.value, choices=[kind.value for kind in ModelKind])

    def run(self, loaded, layout, options):
        train_model(loaded, layout, options['model'], options['force'])
        self.stdout.write(self.style.SUCCESS(f'Trained {options["model"]} into {layout.runs_dir(options["model"])}'))
