import logging
from pathlib import Path

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from core.exceptions import MarvelError
from core.files import OutputLock
from .config import LoadedConfig, load_run_config
from .layout import OutputLayout
from .workflow import write_config_echo

logger = logging.getLogger(__name__)


class ExperimentCommand(BaseCommand):
    """
    Shared surface of the stage commands: a run config plus seed, runs and
    output overrides. The output directory is locked for the duration of the
    command and MarvelError subclasses exit with their own code.
    """

    def add_arguments(self, parser):
        parser.add_argument('--config', required=True, help='Run config JSON file, e.g. configs/desk.json.')
        parser.add_argument('--out', help='Output directory (overrides output_dir).')
        parser.add_argument('--seed', type=int, help='Global seed override.')
        parser.add_argument('--runs', type=int, help='Independent training runs override.')
        parser.add_argument('--force', action='store_true', help='Replace outputs built under another config.')
        self.add_stage_arguments(parser)

    def add_stage_arguments(self, parser):
        pass

    def handle(self, *args, **options):
        try:
            loaded = load_run_config(options['config'], options['seed'], options['runs'], options['out'])
            layout = OutputLayout(Path(loaded.config.output_dir))
            with OutputLock(layout.root, settings.MARVEL['LOCK_FILENAME']):
                write_config_echo(loaded, layout)
                logger.info(f'{self.stage_name()} with config fingerprint {loaded.fingerprint}')
                self.run(loaded, layout, options)
        except MarvelError as exc:
            raise CommandError(str(exc), returncode=exc.exit_code)

    def stage_name(self) -> str:
        return self.__module__.rsplit('.', 1)[-1]

    def run(self, loaded: LoadedConfig, layout: OutputLayout, options: dict):
        raise NotImplementedError
