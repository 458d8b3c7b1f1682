from experiments.base import ExperimentCommand
from experiments.workflow import split


class Command(ExperimentCommand):
    help = 'Assign participant-level train/test splits per task.'

    def run(self, loaded, layout, options):
        split(loaded, layout, options['force'])
        self.stdout.write(self.style.SUCCESS(f'Wrote {layout.split_manifest}'))
