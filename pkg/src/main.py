"""
Command-line entry point for MNPCA.

Subcommands:
    simulate     Generate a checkerboard sample with labels
    fit          Fit MNPCA to a sample and save the model
    transform    Map a sample to latent matrices with a saved model
    scree        Print or save the eigenvalue table of an MNPCA model
    benchmark    Run a replicated classification experiment from a JSON config
    summarize    Aggregate an accuracy table per method and bandwidth
    convergence  Monte Carlo study of the top eigenvalue of P1

Exit codes: 0 on success, 2 on usage errors, 1 on runtime errors.
"""

import argparse
import sys
from typing import List, Optional

import numpy as np

from src.evaluation.convergence import convergence_ratio, convergence_study
from src.evaluation.experiment import load_config, run_experiment, summarize
from src.evaluation.simulation import generate_checkerboard
from src.methods.baselines import K2dpcaModel, TwoDPcaModel, transform_2d2pca, transform_k2dpca
from src.methods.kernels import BaseKernel, KernelSpec, Parity
from src.methods.mnpca import MnpcaModel, eigen_report, fit, gaussian_pair, latents, transform_sample
from src.methods.svd_features import InverseMode, truncate_all
from src.storage.model_store import load_model, save_model
from src.storage.sample_store import read_sample, read_table, write_labeled, write_latents, write_table
from src.utils.config import RESULTS_DIR
from src.utils.constants import DEFAULT_EPS, DEFAULT_M, DEFAULT_R, DEFAULT_SEED, FLOAT_FORMAT, TIE_TOL
from src.utils.errors import InvalidParameterError, MnpcaError
from src.utils.logger import setup_logger

logger = setup_logger(__name__)


def cmd_simulate(args: argparse.Namespace) -> None:
    data = generate_checkerboard(args.n, args.alpha, args.seed)
    write_labeled(args.out, data)


def _kernels(args: argparse.Namespace, svds) -> tuple:
    """Left and right kernels from the fit flags; --sigma2-auto uses the shared default bandwidth."""
    base = BaseKernel(args.kernel)
    if args.parity is not None:
        parity = Parity(args.parity)
    else:
        parity = Parity.LINEAR_RAW if base is BaseKernel.LINEAR else Parity.ODD

    if base is not BaseKernel.GAUSSIAN:
        spec = KernelSpec(base, parity, degree=args.degree, offset=args.offset)
        return spec, spec
    if args.sigma2 is not None:
        spec = KernelSpec.gaussian(args.sigma2, parity)
        return spec, spec

    k1, k2 = gaussian_pair(svds, parity)
    logger.info(f"Default bandwidth: {k1.sigma2:.6g}")
    return k1, k2


def cmd_fit(args: argparse.Namespace) -> None:
    sample = read_sample(args.data)
    svds = truncate_all(sample, args.r, TIE_TOL)
    k1, k2 = _kernels(args, svds)
    dims = None if args.scree or args.d1 is None else (args.d1, args.d2)

    model = fit(
        sample, k1, k2,
        r=args.r,
        m=args.m,
        eps=args.eps,
        dims=dims,
        inverse_mode=InverseMode(args.inverse),
        svds=svds,
    )
    save_model(args.out_model, model)
    if args.latents_out:
        write_latents(args.latents_out, latents(model))


def cmd_transform(args: argparse.Namespace) -> None:
    model = load_model(args.model)
    sample = read_sample(args.data)
    if isinstance(model, MnpcaModel):
        Z = transform_sample(model, sample)
    elif isinstance(model, TwoDPcaModel):
        Z = np.stack([transform_2d2pca(model, X) for X in sample])
    elif isinstance(model, K2dpcaModel):
        Z = np.stack([transform_k2dpca(model, X) for X in sample])
    else:
        raise InvalidParameterError(f"Unsupported model {type(model).__name__}")
    write_latents(args.out, Z)


def _emit(table, out: Optional[str]) -> None:
    if out:
        write_table(out, table)
    else:
        sys.stdout.write(table.to_csv(index=False, float_format=FLOAT_FORMAT))


def cmd_scree(args: argparse.Namespace) -> None:
    model = load_model(args.model)
    if not isinstance(model, MnpcaModel):
        raise InvalidParameterError("scree needs an MNPCA model file")
    _emit(eigen_report(model), args.out)


def cmd_benchmark(args: argparse.Namespace) -> None:
    config = load_config(args.config).with_overrides(
        replicates=args.replicates,
        seed=args.seed,
        n_train=args.n_train,
        n_test=args.n_test,
    )
    table = run_experiment(config, jobs=args.jobs)
    write_table(args.out, table)
    if args.summary_out:
        write_table(args.summary_out, summarize(table))


def cmd_summarize(args: argparse.Namespace) -> None:
    _emit(summarize(read_table(args.table)), args.out)


def cmd_convergence(args: argparse.Namespace) -> None:
    table = convergence_study(args.sizes, args.replicates, args.alpha, args.seed)
    ratios = convergence_ratio(table)
    for row in ratios.itertuples(index=False):
        logger.info(
            f"sd(n={row.n_large}) / sd(n={row.n_small}) = {row.ratio:.4f} "
            f"(1/sqrt rule gives {np.sqrt(row.n_small / row.n_large):.4f})"
        )
    write_table(args.out, table)
    if args.ratio_out:
        write_table(args.ratio_out, ratios)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='mnpca',
        description='Non-linear two-sided PCA for matrix-valued data.',
    )
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('simulate', help='Generate a checkerboard sample')
    p.add_argument('--n', type=int, required=True, help='Number of images (even)')
    p.add_argument('--alpha', type=float, default=0.125, help='Frequency shift between groups')
    p.add_argument('--seed', type=int, default=DEFAULT_SEED, help='Random seed')
    p.add_argument('--out', type=str, required=True, help='Output sample CSV')
    p.set_defaults(handler=cmd_simulate)

    p = sub.add_parser('fit', help='Fit MNPCA to a sample')
    p.add_argument('--data', type=str, required=True, help='Sample CSV (with JSON sidecar)')
    p.add_argument('--kernel', choices=[b.value for b in BaseKernel], default=BaseKernel.GAUSSIAN.value)
    p.add_argument('--parity', choices=[Parity.ODD.value, Parity.EVEN.value, Parity.LINEAR_RAW.value])
    bandwidth = p.add_mutually_exclusive_group()
    bandwidth.add_argument('--sigma2', type=float, help='Gaussian bandwidth')
    bandwidth.add_argument('--sigma2-auto', action='store_true', help='Default bandwidth from the left singular vectors')
    p.add_argument('--degree', type=int, help='Polynomial degree')
    p.add_argument('--offset', type=float, default=0.0, help='Polynomial offset')
    p.add_argument('--r', type=int, default=DEFAULT_R, help='Truncation rank')
    p.add_argument('--m', type=int, default=DEFAULT_M, help='Singular spaces per observation')
    p.add_argument('--eps', type=float, default=DEFAULT_EPS, help='Regularization strength')
    p.add_argument('--d1', type=int, help='Left latent dimension')
    p.add_argument('--d2', type=int, help='Right latent dimension')
    p.add_argument('--scree', action='store_true', help='Choose dimensions by the scree rule')
    p.add_argument('--inverse', choices=[mode.value for mode in InverseMode], default=InverseMode.REGULARIZED.value)
    p.add_argument('--out-model', type=str, required=True, help='Output model JSON')
    p.add_argument('--latents-out', type=str, help='Also write fit-time latents to this CSV')
    p.set_defaults(handler=cmd_fit)

    p = sub.add_parser('transform', help='Latent matrices of a sample')
    p.add_argument('--model', type=str, required=True)
    p.add_argument('--data', type=str, required=True)
    p.add_argument('--out', type=str, required=True)
    p.set_defaults(handler=cmd_transform)

    p = sub.add_parser('scree', help='Eigenvalue table of an MNPCA model')
    p.add_argument('--model', type=str, required=True)
    p.add_argument('--out', type=str, help='Output CSV (stdout when omitted)')
    p.set_defaults(handler=cmd_scree)

    p = sub.add_parser('benchmark', help='Replicated classification experiment')
    p.add_argument('--config', type=str, required=True, help='Experiment JSON')
    p.add_argument('--replicates', type=int)
    p.add_argument('--seed', type=int)
    p.add_argument('--n-train', type=int)
    p.add_argument('--n-test', type=int)
    p.add_argument('--jobs', type=int, default=1, help='Worker processes')
    p.add_argument('--out', type=str, default=str(RESULTS_DIR / 'accuracy.csv'))
    p.add_argument('--summary-out', type=str)
    p.set_defaults(handler=cmd_benchmark)

    p = sub.add_parser('summarize', help='Mean accuracy per method and bandwidth')
    p.add_argument('--table', type=str, required=True)
    p.add_argument('--out', type=str, help='Output CSV (stdout when omitted)')
    p.set_defaults(handler=cmd_summarize)

    p = sub.add_parser('convergence', help='Top eigenvalue spread across sample sizes')
    p.add_argument('--sizes', type=int, nargs='+', default=[50, 200])
    p.add_argument('--replicates', type=int, default=200)
    p.add_argument('--alpha', type=float, default=0.125)
    p.add_argument('--seed', type=int, default=DEFAULT_SEED)
    p.add_argument('--out', type=str, default=str(RESULTS_DIR / 'convergence.csv'))
    p.add_argument('--ratio-out', type=str)
    p.set_defaults(handler=cmd_convergence)

    return parser


def _check_usage(parser: argparse.ArgumentParser, args: argparse.Namespace) -> None:
    """Flag combinations argparse cannot express; parser.error exits with code 2."""
    if args.command == 'fit':
        if (args.d1 is None) != (args.d2 is None):
            parser.error("--d1 and --d2 must be given together")
        if args.scree and args.d1 is not None:
            parser.error("--scree cannot be combined with --d1/--d2")
        if args.kernel == BaseKernel.POLYNOMIAL.value and args.degree is None:
            parser.error("--kernel polynomial needs --degree")
        if args.kernel != BaseKernel.GAUSSIAN.value and (args.sigma2 is not None or args.sigma2_auto):
            parser.error("--sigma2/--sigma2-auto only apply to the gaussian kernel")
        if args.parity == Parity.LINEAR_RAW.value and args.kernel != BaseKernel.LINEAR.value:
            parser.error("--parity linear-raw needs --kernel linear")
    if args.command == 'benchmark' and args.jobs < 1:
        parser.error("--jobs must be at least 1")


def main(argv: Optional[List[str]] = None) -> int:
    """Run the CLI and return its exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _check_usage(parser, args)
    except SystemExit as e:
        return int(e.code or 0)

    try:
        args.handler(args)
    except (MnpcaError, OSError) as e:
        logger.error(f"{args.command} failed: {type(e).__name__}: {e}")
        print(f"{type(e).__name__}: {e}", file=sys.stderr)
        return 1
    except Exception as e:
        logger.error(f"{args.command} failed: {str(e)}", exc_info=True)
        print(f"{type(e).__name__}: {e}", file=sys.stderr)
        return 1

    logger.info(f"{args.command} completed successfully")
    return 0


if __name__ == "__main__":
    sys.exit(main())
