from experiments.base import ExperimentCommand
from experiments.workflow import extract


class Command(ExperimentCommand):
    help = 'Fill the representation cache and write the native feature table.'

    def add_stage_arguments(self, parser):
        parser.add_argument('--ingest', help='External feature table (CSV) merged with the native features.')

    def run(self, loaded, layout, options):
        features = extract(loaded, layout, options['force'], options['ingest'])
        self.stdout.write(self.style.SUCCESS(f'Extracted {len(features)} recordings into {layout.features_dir}'))
