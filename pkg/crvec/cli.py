"""
CLI code for crvec.
"""
import argparse
import json
import sys

try:
    import multiprocessing
    multiprocessing.set_start_method("forkserver")
except Exception:
    # multiprocessing may not be available
    multiprocessing = None

from .reporter import get_reporter
from .exceptions import TableMismatchError, TimerResolutionError
from .fp.rounding import RoundingMode, ALL_MODES, DIRECTED_MODES
from .kernels import KERNELS, FAST_PATHS, ORACLE_IDS
from .coeffgen import GenerationOptions, gen_all_tables, write_tables, verify_tables, default_artifact_path
from .oracle import hardest_case_search
from .verify import (
    exhaustive_f32, SweepOptions, corpus_check, default_corpus_path, callout_stats,
    consistency_check, value_range_to_patterns,
)
from .verify.sweep import F32_FUNCTIONS, DIRECTED_DEFAULT_STRIDE
from .verify.corpus import CO_RESIDENT_RANGES
from .bench import BenchOptions, run_bench, report_tables, DEFAULT_RANGES, DEFAULT_ELEMENTS, MIN_ELEMENTS
from .util import parse_interval, parse_int


F64_FUNCTIONS = tuple(sorted(FAST_PATHS))
# seeded random inputs added to directed mode sweeps by default
DIRECTED_DEFAULT_RANDOM = 1 << 20


def _modes_from_ns(ns):
    """
    Return the rounding modes selected in the argparse namespace.

    @param ns: namespace containing arguments
    @type ns: L{argparse.Namespace}
    @return: the rounding modes
    @rtype: L{list} of L{crvec.fp.rounding.RoundingMode}
    """
    if getattr(ns, "all_modes", False) or ns.mode == "all":
        return list(ALL_MODES)
    return [RoundingMode.from_name(ns.mode)]


def _sweep_options_from_ns(ns):
    """
    Generate the sweep options from the argparse namespace.

    @param ns: namespace containing arguments
    @type ns: L{argparse.Namespace}
    @return: the sweep options
    @rtype: L{crvec.verify.sweep.SweepOptions}
    """
    return SweepOptions(
        jobs=ns.jobs,
        chunk_bits=ns.chunk_bits,
        log_directory=ns.log_directory,
        mismatch_cap=ns.mismatch_cap,
        backend=ns.backend,
    )


def _generation_options_from_ns(ns):
    """
    Generate the table generation options from the argparse namespace.

    @param ns: namespace containing arguments
    @type ns: L{argparse.Namespace}
    @return: the generation options
    @rtype: L{crvec.coeffgen.tables.GenerationOptions}
    """
    return GenerationOptions(
        grid_bits=ns.grid_bits,
        certify=ns.certify,
    )


def _bench_options_from_ns(ns):
    """
    Generate the benchmark options from the argparse namespace.

    @param ns: namespace containing arguments
    @type ns: L{argparse.Namespace}
    @return: the benchmark options
    @rtype: L{crvec.bench.throughput.BenchOptions}
    """
    return BenchOptions(
        n_elements=ns.n,
        slow_elements=ns.slow_n,
        repetitions=ns.reps,
        warmup=ns.warmup,
        large_buffers=ns.large_buffers,
        seed=ns.seed,
        mode=RoundingMode.from_name(ns.mode),
    )


def _write_json(path, text):
    """
    Write a JSON document into a file, "-" meaning stdout.
    """
    if path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8") as fout:
        fout.write(text)


def run_gen_tables(ns):
    """
    Run the gen-tables command.

    @param ns: namespace containing arguments
    @type ns: L{argparse.Namespace}
    @return: the exit code
    @rtype: L{int}
    """
    reporter = get_reporter(ns.verbose)
    path = (ns.out if ns.out is not None else default_artifact_path())
    tables = gen_all_tables(options=_generation_options_from_ns(ns), reporter=reporter)
    print(tables.render())
    if ns.check:
        try:
            verify_tables(path, tables=tables)
        except TableMismatchError as e:
            print(e)
            return 1
        except FileNotFoundError:
            print("No table artifact at '{}'.".format(path))
            return 1
        print("Tables match '{}'.".format(path))
        return 0
    write_tables(tables, path)
    reporter.msg("Tables written to '{}'.".format(path))
    return 0


def run_verify(ns):
    """
    Run the verify command.

    @param ns: namespace containing arguments
    @type ns: L{argparse.Namespace}
    @return: the exit code
    @rtype: L{int}
    """
    reporter = get_reporter(ns.verbose)
    modes = _modes_from_ns(ns)
    stride = ns.stride
    boundaries = ns.boundaries
    extra_random = ns.random
    if stride is None:
        if any(m in DIRECTED_MODES for m in modes):
            # directed modes default to the stratified sweep
            stride = DIRECTED_DEFAULT_STRIDE
            boundaries = True
            if extra_random is None:
                extra_random = DIRECTED_DEFAULT_RANDOM
        else:
            stride = 1
    ranges = None
    if ns.ranges:
        ranges = [parse_interval(r) for r in ns.ranges]
    report = exhaustive_f32(
        ns.fn,
        modes,
        stride=stride,
        ranges=ranges,
        boundaries=boundaries,
        radius=ns.radius,
        extra_random=(extra_random or 0),
        seed=ns.seed,
        options=_sweep_options_from_ns(ns),
        reporter=reporter,
    )
    print(report.render())
    if ns.report is not None:
        _write_json(ns.report, report.dumps(timing=False))
    return (0 if report.passed else 1)


def run_corpus(ns):
    """
    Run the corpus command.

    @param ns: namespace containing arguments
    @type ns: L{argparse.Namespace}
    @return: the exit code
    @rtype: L{int}
    """
    reporter = get_reporter(ns.verbose)
    path = (ns.file if ns.file is not None else default_corpus_path(ns.fn))
    report = corpus_check(
        path,
        ns.fn,
        _modes_from_ns(ns),
        fs_url=ns.fs_url,
        width=ns.width,
        seed=ns.seed,
        backend=ns.backend,
        mismatch_cap=ns.mismatch_cap,
        reporter=reporter,
    )
    print(report.render())
    if ns.report is not None:
        _write_json(ns.report, report.dumps(timing=False))
    return (0 if report.passed else 1)


def run_callouts(ns):
    """
    Run the callouts command.

    @param ns: namespace containing arguments
    @type ns: L{argparse.Namespace}
    @return: the exit code
    @rtype: L{int}
    """
    reporter = get_reporter(ns.verbose)
    if ns.uniform is not None:
        lo, hi = parse_interval(ns.uniform)
    else:
        lo, hi = CO_RESIDENT_RANGES[ns.fn]
    stats = callout_stats(
        ns.fn,
        lo,
        hi,
        ns.n,
        seed=ns.seed,
        mode=RoundingMode.from_name(ns.mode),
        width=ns.width,
        backend=ns.backend,
        reporter=reporter,
    )
    print(stats.render())
    if ns.json is not None:
        _write_json(ns.json, stats.dumps(timing=False))
    return 0


def run_consistency(ns):
    """
    Run the consistency command.

    @param ns: namespace containing arguments
    @type ns: L{argparse.Namespace}
    @return: the exit code
    @rtype: L{int}
    """
    reporter = get_reporter(ns.verbose)
    report = consistency_check(
        ns.fn,
        ns.n,
        seed=ns.seed,
        modes=_modes_from_ns(ns),
        backend=ns.backend,
        scalar_lanes=ns.scalar_lanes,
        mismatch_cap=ns.mismatch_cap,
        reporter=reporter,
    )
    print(report.render())
    if ns.report is not None:
        _write_json(ns.report, report.dumps(timing=False))
    return (0 if report.passed else 1)


def run_hardcases(ns):
    """
    Run the hardcases command.

    @param ns: namespace containing arguments
    @type ns: L{argparse.Namespace}
    @return: the exit code
    @rtype: L{int}
    """
    reporter = get_reporter(ns.verbose)
    lo, hi = parse_interval(ns.range)
    ranked = []
    exact = []
    for start, stop in value_range_to_patterns(lo, hi):
        reporter.msg("Searching patterns 0x{:08x}-0x{:08x}...".format(start, stop - 1))
        range_ranked, range_exact = hardest_case_search(ORACLE_IDS[ns.fn], start, stop - 1)
        ranked += range_ranked
        exact += range_exact
    ranked.sort(key=lambda case: case.distance)
    top = ranked[:ns.top]

    print("Hardest cases of {} in [{}, {}] ({} inputs, {} exact):".format(ns.fn, lo, hi, len(ranked) + len(exact), len(exact)))
    for case in top:
        print("    {:<18} 0x{:08x} distance {}".format(case.input.hex(), case.input.bits, case.distance))
    for case in exact:
        print("    {:<18} 0x{:08x} exact".format(case.input.hex(), case.input.bits))
    if ns.json is not None:
        data = {
            "function": ns.fn,
            "range": [lo, hi],
            "ranked": [case.to_dict() for case in top],
            "exact": [case.to_dict() for case in exact],
        }
        _write_json(ns.json, json.dumps(data, indent=2, sort_keys=True) + "\n")
    return 0


def run_bench_command(ns):
    """
    Run the bench command.

    @param ns: namespace containing arguments
    @type ns: L{argparse.Namespace}
    @return: the exit code
    @rtype: L{int}
    """
    reporter = get_reporter(ns.verbose)
    variants = [v for v in ns.variants.split(",") if v.strip()]
    if len(variants) < 2:
        print("At least two variants are needed for a ratio table, got: {}".format(ns.variants), file=sys.stderr)
        return 2
    if ns.uniform is not None:
        lo, hi = parse_interval(ns.uniform)
    else:
        lo, hi = DEFAULT_RANGES[ns.fn]
    try:
        options = _bench_options_from_ns(ns)
        report = run_bench(ns.fn, variants, lo, hi, options=options, reporter=reporter)
    except (ValueError, TimerResolutionError) as e:
        print("Error: {}".format(e), file=sys.stderr)
        return 2
    print(report_tables([report]))
    if ns.json is not None:
        _write_json(ns.json, report.dumps())
    return (0 if report.passed else 1)


def _add_common_arguments(parser, functions, default_mode="rne", all_modes_flag=True):
    """
    Add the arguments shared by the verification commands.
    """
    parser.add_argument(
        "--fn",
        action="store",
        required=True,
        choices=functions,
        help="function to check",
    )
    parser.add_argument(
        "--mode",
        action="store",
        default=default_mode,
        choices=["rne", "rz", "ru", "rd"] + (["all"] if all_modes_flag else []),
        help="rounding mode",
    )
    parser.add_argument(
        "--seed",
        action="store",
        type=int,
        default=0,
        help="seed of random inputs",
    )
    parser.add_argument(
        "--backend",
        action="store",
        default="vectorized",
        choices=["vectorized", "reference"],
        help="lane backend the kernels run on",
    )
    parser.add_argument(
        "--mismatch-cap",
        action="store",
        type=int,
        dest="mismatch_cap",
        default=100,
        help="store at most this many mismatches in the report",
    )


def main():
    """
    The main function.
    """
    # general argparse setup
    parser = argparse.ArgumentParser(
        description="Correctly rounded lane-parallel exp2 and log: table generation, verification and benchmarks",
    )
    parser.add_argument(
        "-v",
        "--verbose",
        action="count",
        default=0,
        help="be more verbose",
    )
    subparsers = parser.add_subparsers(
        dest="command",
        help="command to execute",
    )

    # parser for the table generator
    gen_parser = subparsers.add_parser(
        "gen-tables",
        help="generate the lookup tables and coefficients",
    )
    gen_parser.add_argument(
        "--out",
        action="store",
        default=None,
        help="path of the table artifact, defaults to the one shipped in the package",
    )
    gen_parser.add_argument(
        "--check",
        action="store_true",
        help="regenerate and compare with the artifact instead of writing it",
    )
    gen_parser.add_argument(
        "--grid-bits",
        action="store",
        type=int,
        dest="grid_bits",
        default=20,
        help="log2 of the number of certification grid intervals",
    )
    gen_parser.add_argument(
        "--no-certify",
        action="store_false",
        dest="certify",
        help="skip the certification of the fits",
    )

    # parser for binary32 sweeps
    verify_parser = subparsers.add_parser(
        "verify",
        help="verify a binary32 kernel against the oracle",
    )
    _add_common_arguments(verify_parser, list(F32_FUNCTIONS))
    verify_parser.add_argument(
        "--stride",
        action="store",
        type=parse_int,
        default=None,
        help="test every n-th pattern (accepts 2^8), defaults to 1 (2^8 for directed modes)",
    )
    verify_parser.add_argument(
        "--range",
        action="append",
        dest="ranges",
        default=[],
        help="restrict the sweep to the values in lo:hi, may be given multiple times",
    )
    verify_parser.add_argument(
        "--boundaries",
        action="store_true",
        help="add the neighborhoods of the exponent boundaries",
    )
    verify_parser.add_argument(
        "--radius",
        action="store",
        type=int,
        default=256,
        help="radius of the boundary neighborhoods",
    )
    verify_parser.add_argument(
        "--random",
        action="store",
        type=parse_int,
        default=None,
        help="add this many seeded random patterns",
    )
    verify_parser.add_argument(
        "--jobs",
        action="store",
        type=int,
        default=0,
        help="number of worker processes, 0 to run in this process, -1 for one per core",
    )
    verify_parser.add_argument(
        "--chunk-bits",
        action="store",
        type=int,
        dest="chunk_bits",
        default=20,
        help="chunks hold at most 2^n patterns",
    )
    verify_parser.add_argument(
        "--log-directory",
        action="store",
        default=None,
        help="enable logging and write worker logs into this directory",
    )
    verify_parser.add_argument(
        "--report",
        action="store",
        default=None,
        help="write the JSON report to this path",
    )

    # parser for the hard-case corpus
    corpus_parser = subparsers.add_parser(
        "corpus",
        help="replay a hard-case corpus through the full kernel",
    )
    _add_common_arguments(corpus_parser, sorted(KERNELS))
    corpus_parser.add_argument(
        "--file",
        action="store",
        default=None,
        help="corpus file or directory, defaults to the shipped corpus",
    )
    corpus_parser.add_argument(
        "--fs-url",
        action="store",
        dest="fs_url",
        default=None,
        help="pyfilesystem2 URL of the filesystem holding the corpus",
    )
    corpus_parser.add_argument(
        "--all-modes",
        action="store_true",
        dest="all_modes",
        help="check all four rounding modes",
    )
    corpus_parser.add_argument(
        "--width",
        action="store",
        type=int,
        default=8,
        help="batch width",
    )
    corpus_parser.add_argument(
        "--report",
        action="store",
        default=None,
        help="write the JSON report to this path",
    )

    # parser for the callout statistics
    callout_parser = subparsers.add_parser(
        "callouts",
        help="measure how often the binary64 fast path calls out",
    )
    _add_common_arguments(callout_parser, list(F64_FUNCTIONS), all_modes_flag=False)
    callout_parser.add_argument(
        "--uniform",
        action="store",
        default=None,
        help="draw inputs uniformly from lo:hi",
    )
    callout_parser.add_argument(
        "--n",
        action="store",
        type=parse_int,
        default=10 ** 6,
        help="number of inputs",
    )
    callout_parser.add_argument(
        "--width",
        action="store",
        type=int,
        default=8,
        help="batch width",
    )
    callout_parser.add_argument(
        "--json",
        action="store",
        default=None,
        help="write the JSON statistics to this path",
    )

    # parser for the consistency check
    consistency_parser = subparsers.add_parser(
        "consistency",
        help="check backends, widths and scalar entry points for bit identity",
    )
    _add_common_arguments(consistency_parser, sorted(KERNELS))
    consistency_parser.add_argument(
        "--n",
        action="store",
        type=parse_int,
        default=10 ** 5,
        help="number of random inputs",
    )
    consistency_parser.add_argument(
        "--scalar-lanes",
        action="store",
        type=parse_int,
        dest="scalar_lanes",
        default=1024,
        help="number of inputs also run through the scalar entry point",
    )
    consistency_parser.add_argument(
        "--report",
        action="store",
        default=None,
        help="write the JSON report to this path",
    )

    # parser for the hard case search
    hardcases_parser = subparsers.add_parser(
        "hardcases",
        help="rank binary32 inputs by the distance of their value to a rounding boundary",
    )
    hardcases_parser.add_argument(
        "--fn",
        action="store",
        required=True,
        choices=list(F32_FUNCTIONS),
        help="function to search",
    )
    hardcases_parser.add_argument(
        "--range",
        action="store",
        required=True,
        help="search the values in lo:hi",
    )
    hardcases_parser.add_argument(
        "--top",
        action="store",
        type=int,
        default=10,
        help="show this many cases",
    )
    hardcases_parser.add_argument(
        "--json",
        action="store",
        default=None,
        help="write the cases as JSON to this path",
    )

    # parser for the benchmark
    bench_parser = subparsers.add_parser(
        "bench",
        help="measure the reciprocal throughput of kernel variants",
    )
    bench_parser.add_argument(
        "--fn",
        action="store",
        required=True,
        choices=sorted(KERNELS),
        help="function to measure",
    )
    bench_parser.add_argument(
        "--variants",
        action="store",
        default="scalar,batch8",
        help="comma separated variants: scalar, batch<W>, reference<W>, main<W>",
    )
    bench_parser.add_argument(
        "--uniform",
        action="store",
        default=None,
        help="draw inputs uniformly from lo:hi",
    )
    bench_parser.add_argument(
        "--n",
        action="store",
        type=parse_int,
        default=DEFAULT_ELEMENTS,
        help="number of elements per repetition of the batch and main variants",
    )
    bench_parser.add_argument(
        "--slow-n",
        action="store",
        dest="slow_n",
        type=parse_int,
        default=MIN_ELEMENTS,
        help="number of elements per repetition of the scalar and reference variants",
    )
    bench_parser.add_argument(
        "--reps",
        action="store",
        type=int,
        default=15,
        help="number of timed repetitions",
    )
    bench_parser.add_argument(
        "--warmup",
        action="store",
        type=int,
        default=1,
        help="number of untimed passes",
    )
    bench_parser.add_argument(
        "--large-buffers",
        action="store_true",
        dest="large_buffers",
        help="size the inputs to exceed the last level cache",
    )
    bench_parser.add_argument(
        "--mode",
        action="store",
        default="rne",
        choices=["rne", "rz", "ru", "rd"],
        help="rounding mode",
    )
    bench_parser.add_argument(
        "--seed",
        action="store",
        type=int,
        default=0,
        help="seed of the inputs",
    )
    bench_parser.add_argument(
        "--json",
        action="store",
        default=None,
        help="write the JSON report to this path",
    )

    ns = parser.parse_args()

    if ns.command == "gen-tables":
        # generate and certify the tables
        code = run_gen_tables(ns)
    elif ns.command == "verify":
        # sweep a binary32 kernel
        code = run_verify(ns)
    elif ns.command == "corpus":
        # replay a corpus
        code = run_corpus(ns)
    elif ns.command == "callouts":
        # fast path statistics
        code = run_callouts(ns)
    elif ns.command == "consistency":
        # backend and width consistency
        code = run_consistency(ns)
    elif ns.command == "hardcases":
        # hard case search
        code = run_hardcases(ns)
    elif ns.command == "bench":
        # throughput measurement
        code = run_bench_command(ns)
    else:
        parser.print_help()
        code = 2
    sys.exit(code)


if __name__ == "__main__":
    main()
