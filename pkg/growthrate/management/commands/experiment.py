import logging

from django.core.management.base import BaseCommand, CommandError

from core.exceptions import GrowthRateError
from experiments.config import CHECKS, CSV, EXPERIMENTS, JSON, VALIDATE
from experiments.exceptions import IncompleteRun, ValidationFailed
from experiments.runners import RUNNERS
from experiments.utils import load_config
from experiments.validation import run_validate
from experiments.writers import write_result
from monodromy.propagators import LOSS_SCHEMES

logger = logging.getLogger(__name__)


def _checks(value: str):
    names = [name.strip() for name in value.split(',') if name.strip()]
    unknown = [name for name in names if name not in CHECKS]
    if unknown:
        raise CommandError(f'Unknown check(s) {", ".join(unknown)}; expected names from {", ".join(CHECKS)}')
    return names


class Command(BaseCommand):
    help = """
    Runs a growth-rate experiment and writes its tables next to the given
    output prefix: floquet, perron, sweep-a, chrono or validate.
    """

    def add_arguments(self, parser):
        parser.add_argument('experiment', choices=EXPERIMENTS)
        parser.add_argument('--config', dest='config', help='JSON configuration document')
        parser.add_argument('--out', dest='out', help='output path prefix')
        parser.add_argument('--format', dest='format', choices=[CSV, JSON])
        parser.add_argument('--jobs', dest='jobs', type=int, help='worker pool size for sweeps')
        parser.add_argument('--nt', dest='nt', type=int, help='time steps per period')
        parser.add_argument('--tol', dest='tol', type=float, help='power iteration tolerance')
        parser.add_argument('--loss-scheme', dest='loss_scheme', choices=LOSS_SCHEMES)
        parser.add_argument('--seed', dest='seed', type=int)
        parser.add_argument('--checks', dest='checks', type=_checks, help='comma separated validation checks')

    def _overrides(self, options) -> dict:
        return {
            ('experiment',): options['experiment'],
            ('output', 'prefix'): options.get('out'),
            ('output', 'format'): options.get('format'),
            ('solver', 'jobs'): options.get('jobs'),
            ('solver', 'tol'): options.get('tol'),
            ('solver', 'loss_scheme'): options.get('loss_scheme'),
            ('grid', 'n_time'): options.get('nt'),
            ('seed',): options.get('seed'),
            ('checks',): options.get('checks'),
        }

    def handle(self, *args, **options):
        try:
            config = load_config(options.get('config'), self._overrides(options))
            if config.experiment == VALIDATE:
                result = run_validate(config)
            else:
                result = RUNNERS[config.experiment](config)
            written = write_result(result, config)
            for path in written:
                self.stdout.write(path)
            if result.failures:
                summary = f'{len(result.failures)} failure(s): ' + '; '.join(result.failures)
                if config.experiment == VALIDATE:
                    raise ValidationFailed(summary)
                raise IncompleteRun(summary)
        except GrowthRateError as e:
            logger.error(e.detail)
            raise CommandError(e.detail, returncode=e.exit_code)
