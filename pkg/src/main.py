import argparse
import logging
import sys
from typing import Callable, Dict, List, Optional, Sequence

from pydantic import ValidationError

from . import get_version, setup_logger
from .asymptotics import DEFAULT_CHECK_N, build_report
from .closedforms import gf_by_name
from .config import OUTPUT_FORMATS, Config, get_config
from .dpcount import (
    build_table,
    count,
    count_all_levels,
    height_distribution,
    layer_counts,
    marked_distribution,
)
from .errors import SkewMotzkinError, VerificationError
from .export import (
    Document,
    count_table_document,
    height_profile_document,
    layer_counts_document,
    marked_distribution_document,
    paths_document,
    render,
    report_document,
    samples_document,
    series_document,
    value_document,
    verification_document,
)
from .paths import enumerate_paths
from .sampler import SamplerSpec, sample_statistics, sample_uniform
from .verify import DEFAULT_MAX_LENGTH, run_verification

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFICATION = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(f"{self.prog}: error: {message}")


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", dest="format", choices=OUTPUT_FORMATS, help="output format")
    common.add_argument("--oracle-limit", dest="oracle_limit", type=int, metavar="N")
    common.add_argument("--workers", dest="workers", type=int, metavar="W")
    common.add_argument("--log-level", dest="log_level", metavar="LEVEL")
    common.add_argument(
        "--save-config", dest="save_config", action="store_true",
        help="write the effective non-default settings to .env",
    )
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = _Parser(prog="skew-motzkin", description="Exact enumeration of skew Motzkin paths")
    parser.add_argument("--version", action="version", version=f"%(prog)s {get_version()}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("count", parents=[common], help="DP counts")
    p.add_argument("--length", type=int, required=True, metavar="N")
    p.add_argument("--level", type=int, default=0, metavar="J")
    p.add_argument("--max-height", dest="max_height", type=int, metavar="H")
    p.add_argument("--all-levels", dest="all_levels", action="store_true")
    p.add_argument("--by-layer", dest="by_layer", action="store_true")
    p.add_argument("--table", action="store_true", help="full table of counts for lengths 0..N")

    p = sub.add_parser("series", parents=[common], help="closed-form coefficients")
    p.add_argument("--gf", required=True, metavar="NAME",
                   help="sm | total | marked | level:<j> | bounded:<H> | layer:<F|G|H|K>:<j>")
    p.add_argument("--order", type=int, metavar="N")

    p = sub.add_parser("enumerate", parents=[common], help="brute-force listing")
    p.add_argument("--length", type=int, required=True, metavar="N")
    p.add_argument("--level", type=int, metavar="J")
    p.add_argument("--print", dest="listing", action="store_true")

    p = sub.add_parser("heights", parents=[common], help="height profile of return paths")
    p.add_argument("--length", type=int, required=True, metavar="N")
    p.add_argument("--expected", action="store_true")

    p = sub.add_parser("stats", parents=[common], help="(flats, lefts) distribution")
    p.add_argument("--length", type=int, required=True, metavar="N")
    p.add_argument("--level", type=int, default=0, metavar="J")

    p = sub.add_parser("asymptotics", parents=[common], help="constants and estimates")
    p.add_argument("--digits", type=int, metavar="D")
    p.add_argument("--check-n", dest="check_n", type=int, nargs="+", metavar="N")

    p = sub.add_parser("sample", parents=[common], help="uniform random paths")
    p.add_argument("--length", type=int, required=True, metavar="N")
    p.add_argument("--level", type=int, metavar="J")
    p.add_argument("--count", type=int, required=True, metavar="M")
    p.add_argument("--seed", type=int, required=True, metavar="S")
    p.add_argument("--stats", action="store_true")

    p = sub.add_parser("verify", parents=[common], help="run the cross-check battery")
    p.add_argument("--max-length", dest="max_length", type=int, default=DEFAULT_MAX_LENGTH, metavar="N")
    return parser


class SkewMotzkinCLI:
    def __init__(self, config: Config):
        self.config = config
        self.commands: Dict[str, Callable[[argparse.Namespace], Document]] = {
            "count": self.count,
            "series": self.series,
            "enumerate": self.enumerate,
            "heights": self.heights,
            "stats": self.stats,
            "asymptotics": self.asymptotics,
            "sample": self.sample,
            "verify": self.verify,
        }

    def dispatch(self, args: argparse.Namespace) -> Document:
        return self.commands[args.command](args)

    def count(self, args: argparse.Namespace) -> Document:
        n = args.length
        if n < 0:
            raise UsageError("--length cannot be negative")
        if args.table:
            return count_table_document(build_table(n, height_cap=args.max_height))
        if args.by_layer:
            counts = layer_counts(n, args.level, height_cap=args.max_height)
            return layer_counts_document(n, args.level, counts)
        if args.all_levels:
            if args.max_height is not None:
                total = build_table(n, height_cap=args.max_height).count_all_levels(n)
            else:
                total = count_all_levels(n)
            return value_document("count", "count", total, {"n": n, "max_height": args.max_height})
        value = count(n, args.level, height_cap=args.max_height)
        return value_document(
            "count", "count", value, {"n": n, "j": args.level, "max_height": args.max_height}
        )

    def series(self, args: argparse.Namespace) -> Document:
        return series_document(args.gf, gf_by_name(args.gf, self.config.ORDER))

    def enumerate(self, args: argparse.Namespace) -> Document:
        paths = enumerate_paths(
            args.length,
            final_level=args.level,
            limit=self.config.ORACLE_LIMIT,
            parallel=self.config.MAX_WORKERS > 1,
        )
        return paths_document(args.length, args.level, paths, args.listing)

    def heights(self, args: argparse.Namespace) -> Document:
        profile = height_distribution(args.length, workers=self.config.MAX_WORKERS)
        return height_profile_document(profile, expected=args.expected)

    def stats(self, args: argparse.Namespace) -> Document:
        dist = marked_distribution(args.length, level=args.level)
        return marked_distribution_document(args.length, args.level, dist)

    def asymptotics(self, args: argparse.Namespace) -> Document:
        check_n = args.check_n or DEFAULT_CHECK_N
        if min(check_n) < 1:
            raise UsageError("--check-n values must be >= 1")
        return report_document(build_report(self.config.DIGITS, check_n))

    def sample(self, args: argparse.Namespace) -> Document:
        try:
            spec = SamplerSpec(n=args.length, final_level=args.level, seed=args.seed, count=args.count)
        except ValueError as e:
            raise UsageError(str(e)) from e
        samples = sample_uniform(spec, workers=self.config.MAX_WORKERS)
        stats = sample_statistics(samples) if args.stats and samples else None
        return samples_document(spec, samples, stats)

    def verify(self, args: argparse.Namespace) -> Document:
        report = run_verification(args.max_length, oracle_limit=self.config.ORACLE_LIMIT)
        doc = verification_document(report)
        if not report.passed:
            failure = report.first_failure
            raise _VerificationFailed(doc, failure.error)
        return doc


class _VerificationFailed(Exception):
    def __init__(self, doc: Document, error: Optional[VerificationError]):
        super().__init__(str(error))
        self.doc = doc
        self.error = error


def _config_from_args(args: argparse.Namespace) -> Config:
    return get_config(
        ORDER=getattr(args, "order", None),
        DIGITS=getattr(args, "digits", None),
        ORACLE_LIMIT=args.oracle_limit,
        FORMAT=args.format,
        MAX_WORKERS=args.workers,
        LOG_LEVEL=args.log_level,
    )


def run(argv: Optional[Sequence[str]] = None) -> int:
    """
    Parse ``argv``, run one subcommand and print its result.

    Returns:
        int: 0 on success, 1 on usage or input errors, 2 on a verification failure.
    """
    argv: List[str] = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        config = _config_from_args(args)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        print(e, file=sys.stderr)
        return EXIT_USAGE
    except ValidationError as e:
        print(f"Invalid configuration: {e}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as e:
        # --help, --version
        return int(e.code or 0)

    setup_logger(config.LOG_LEVEL)
    if args.save_config:
        config.save_to_env_file()
        logger.info("Configuration saved to .env")

    cli = SkewMotzkinCLI(config)
    try:
        doc = cli.dispatch(args)
        print(render(doc, config.FORMAT))
    except _VerificationFailed as e:
        print(render(e.doc, config.FORMAT))
        err = e.error
        if err is not None:
            print(
                f"verification failed: {err.check}: generator={err.generator} n={err.n} "
                f"j={err.j} expected={err.expected} got={err.got}",
                file=sys.stderr,
            )
        return EXIT_VERIFICATION
    except VerificationError as e:
        logger.error(f"Verification error: {e}")
        print(f"verification failed: {e}", file=sys.stderr)
        return EXIT_VERIFICATION
    except (UsageError, ValueError, SkewMotzkinError) as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
