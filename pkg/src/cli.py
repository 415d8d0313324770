import logging
import sys

import click
from click.core import ParameterSource

from src.engine.bench import METHODS, BenchConfig, run_benchmark, write_csv
from src.engine.config import DEFAULT_BUDGET_BYTES, DEFAULT_MU, DEFAULT_SEED
from src.engine.errors import BiQGemmError
from src.engine.verify import VerifyConfig, verify

logger = logging.getLogger(__name__)


class IntList(click.ParamType):
    """Comma-separated integers, e.g. ``1024,2048,4096``."""
    name = 'int-list'

    def convert(self, value, param, ctx):
        if isinstance(value, tuple):
            return value
        try:
            return tuple(int(v, 0) for v in str(value).split(',') if v.strip())
        except ValueError:
            self.fail(f"{value!r} is not a comma-separated list of integers", param, ctx)


INT_LIST = IntList()


@click.command('bench')
@click.option('--m', 'm', type=INT_LIST, default='1024', show_default=True, help='Output sizes.')
@click.option('--n', 'n', type=INT_LIST, default='1024', show_default=True, help='Input sizes.')
@click.option('--b', 'b', type=INT_LIST, default='32', show_default=True, help='Batch sizes.')
@click.option('--beta', type=INT_LIST, default='1', show_default=True, help='Quantization bits.')
@click.option('--mu', type=INT_LIST, default=str(DEFAULT_MU), show_default=True,
              help='LUT-units. --verify checks 1,2,4,8 unless given.')
@click.option('--threads', type=INT_LIST, default='1', show_default=True, help='Kernel workers.')
@click.option('--method', 'methods', type=click.Choice(METHODS + ('all',)), multiple=True,
              default=('all',), show_default=True)
@click.option('--repeats', type=int, default=10, show_default=True)
@click.option('--warmup', type=int, default=3, show_default=True)
@click.option('--seed', type=int, default=DEFAULT_SEED, show_default=True)
@click.option('--budget-bytes', type=int, default=DEFAULT_BUDGET_BYTES, show_default=True)
@click.option('--deterministic', is_flag=True, help='Fixed reduction order in the kernel.')
@click.option('--precision', type=click.Choice(['32', '64']), default='32', show_default=True)
@click.option('--csv', 'csv_path', type=click.File('w'), default='-', show_default=True)
@click.option('--verify', 'run_verify', is_flag=True, help='Run the acceptance checks instead.')
@click.option('--log-level', type=click.Choice(['DEBUG', 'INFO', 'WARNING', 'ERROR']),
              default='INFO', show_default=True)
@click.pass_context
def bench_command(ctx, m, n, b, beta, mu, threads, methods, repeats, warmup, seed, budget_bytes,
                  deterministic, precision, csv_path, run_verify, log_level):
    """Benchmark BiQGEMM against the GEMM baselines and write CSV records."""
    logging.basicConfig(stream=sys.stderr)
    logging.getLogger().setLevel(getattr(logging, log_level))

    if run_verify:
        try:
            if ctx.get_parameter_source('mu') is ParameterSource.DEFAULT:
                config = VerifyConfig(seed=seed)
            else:
                config = VerifyConfig(seed=seed, mus=mu)
            report = verify(config)
        except BiQGemmError as e:
            raise click.BadParameter(str(e), param_hint='--mu')
        for check in report.checks:
            status = 'PASS' if check.passed else 'FAIL'
            click.echo(f"{status} {check.name}: {check.detail}")
        if not report.passed:
            sys.exit(1)
        return

    if 'all' in methods:
        methods = METHODS
    try:
        config = BenchConfig(m=m, n=n, b=b, beta=beta, mu=mu, threads=threads, methods=methods,
                             repeats=repeats, warmup=warmup, seed=seed, budget_bytes=budget_bytes,
                             deterministic=deterministic, precision=int(precision))
        records = run_benchmark(config)
    except BiQGemmError as e:
        raise click.ClickException(str(e))
    write_csv(records, csv_path)


if __name__ == '__main__':
    bench_command()
