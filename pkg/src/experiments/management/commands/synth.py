from experiments.base import ExperimentCommand
from experiments.workflow import synthesize


class Command(ExperimentCommand):
    help = 'Generate the synthetic-pathology corpus: WAV store plus manifest.'

    def run(self, loaded, layout, options):
        manifest = synthesize(loaded, layout, options['force'])
        self.stdout.write(self.style.SUCCESS(
            f'Wrote {len(manifest.recordings)} recordings to {layout.corpus_dir}'
        ))
