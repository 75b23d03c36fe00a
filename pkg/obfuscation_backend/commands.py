"""Base class for the pipeline management commands.

Implements the exit-code contract: 0 success, 1 IO or usage error,
2 key generation failure, 3 verification failure.
"""
import json
import logging
import sys

from django.core.management.base import BaseCommand, CommandError
from django.db import DatabaseError

from .config import load_config_file, resolve_option, resolve_seed
from .exceptions import ObfuscationError

logger = logging.getLogger(__name__)


class PipelineCommand(BaseCommand):
    """Shared option handling and error translation."""

    requires_system_checks = []

    def create_parser(self, prog_name, subcommand, **kwargs):
        parser = super().create_parser(prog_name, subcommand, **kwargs)
        # Usage errors raise CommandError (exit 1) instead of argparse's exit 2
        parser.called_from_command_line = False
        return parser

    def run_from_argv(self, argv):
        try:
            super().run_from_argv(argv)
        except CommandError as exc:
            # Only argument parsing errors escape the base implementation
            self.stderr.write(self.create_parser(argv[0], argv[1]).format_usage().rstrip())
            self.stderr.write(str(exc))
            sys.exit(exc.returncode)

    def add_config_arguments(self, parser):
        parser.add_argument('--config', help='TOML file with option defaults')
        parser.add_argument('--seed', help='64-bit seed (default: DOBF_SEED or OS entropy)')
        parser.add_argument(
            '--record', action='store_true',
            help='Also save the produced records to the run ledger database',
        )

    def handle(self, *args, **options):
        self._file_values = None
        try:
            return self.run(**options)
        except ObfuscationError as exc:
            raise CommandError(str(exc), returncode=exc.exit_code) from exc
        except OSError as exc:
            target = f'{exc.filename}: ' if exc.filename else ''
            raise CommandError(f'{target}{exc.strerror or exc}', returncode=1) from exc
        except DatabaseError as exc:
            raise CommandError(
                f'ledger database unavailable ({exc}); run "manage.py migrate" first',
                returncode=1,
            ) from exc

    def run(self, **options):
        raise NotImplementedError('subclasses of PipelineCommand must provide a run() method')

    def file_values(self, options):
        if self._file_values is None:
            self._file_values = load_config_file(options.get('config'))
        return self._file_values

    def option(self, name, options, flag=None):
        return resolve_option(name, options.get(flag or name), self.file_values(options))

    def seed(self, options):
        seed, drawn = resolve_seed(options.get('seed'), self.file_values(options))
        if drawn:
            self.stderr.write(f'seed: {seed}')
        return seed

    def emit_json(self, data):
        self.stdout.write(json.dumps(data, sort_keys=True))
