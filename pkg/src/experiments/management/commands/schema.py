from pathlib import Path

from django.conf import settings
from django.core.management.base import BaseCommand

from core.files import write_json
from experiments.config import config_schema


class Command(BaseCommand):
    help = 'Write the run config schema document.'

    def add_arguments(self, parser):
        parser.add_argument('--out', default=str(settings.MARVEL['SCHEMA_PATH']))

    def handle(self, *args, **options):
        path = write_json(Path(options['out']), config_schema())
        self.stdout.write(self.style.SUCCESS(f'Wrote {path}'))
