from experiments.base import ExperimentCommand
from experiments.workflow import reproduce


class Command(ExperimentCommand):
    help = 'Run every stage and write summary.md with the acceptance checks.'

    def run(self, loaded, layout, options):
        checks = reproduce(loaded, layout, options['force'])
        self.stdout.write(self.style.SUCCESS(f'{len(checks)} checks written to {layout.summary}'))
