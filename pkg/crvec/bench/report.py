"""
Benchmark sessions and their reports.

A session measures several variants of one function on the same inputs,
runs a verification spot-check and collects what is known about the host.
Ratios are computed from the medians, relative to the first batch
variant of the session (lower is faster).
"""
import json

from ..coeffgen import load_tables, table_sizes
from ..renderer import TextRenderer
from ..reporter import VoidReporter
from ..util import describe_host
from .throughput import BenchOptions, parse_variant, throughput, spot_check, timer_info, SPOT_CHECK_INPUTS


CYCLE_COUNTER_NOTE = "no cycle counter is available, times are wall clock nanoseconds"
TIMING_LOOP_NOTE = "independent pre-generated inputs, whole repetitions timed, warmup excluded"


class BenchReport(object):
    """
    The report of a benchmark session of one function.

    @ivar function_id: the function
    @type function_id: L{str}
    @ivar results: the measured variants, in measurement order
    @type results: L{list} of L{crvec.bench.throughput.BenchResult}
    @ivar spot_check: the tuple (inputs checked, mismatches) of the spot-check
    @type spot_check: L{tuple} of L{int}
    @ivar timer: the tuple (name, resolution in seconds)
    @type timer: L{tuple}
    @ivar host: description of the host
    @type host: L{dict}
    @ivar table_sizes: byte sizes of the lookup tables per function
    @type table_sizes: L{dict}
    """
    def __init__(self, function_id, results, spot_check=(0, 0), timer=None, host=None, table_sizes=None):
        self.function_id = function_id
        self.results = list(results)
        self.spot_check = spot_check
        self.timer = (timer if timer is not None else timer_info())
        self.host = (host if host is not None else {})
        self.table_sizes = (table_sizes if table_sizes is not None else {})

    def __repr__(self):
        return "BenchReport({}, {})".format(self.function_id, [r.variant.name for r in self.results])

    @property
    def passed(self):
        """Whether the spot-check found no mismatch."""
        return self.spot_check[1] == 0

    @property
    def baseline(self):
        """The result all ratios are relative to."""
        for result in self.results:
            if result.variant.kind == "batch":
                return result
        return (self.results[0] if self.results else None)

    @property
    def table_size(self):
        """Byte size of the lookup tables of the function."""
        return self.table_sizes.get(self.function_id)

    def ratios(self):
        """
        Return the median of every variant relative to the baseline.

        @return: a list of (variant name, ratio)
        @rtype: L{list} of L{tuple}
        """
        baseline = self.baseline
        if baseline is None or baseline.median <= 0:
            return [(r.variant.name, None) for r in self.results]
        return [(r.variant.name, r.median / baseline.median) for r in self.results]

    def to_dict(self):
        """
        Return a dict describing this report, raw samples included.

        @return: a json-serializable dict
        @rtype: L{dict}
        """
        baseline = self.baseline
        return {
            "function": self.function_id,
            "baseline": (baseline.variant.name if baseline is not None else None),
            "results": [r.to_dict() for r in self.results],
            "ratios": {name: ratio for name, ratio in self.ratios()},
            "spot_check": {"inputs": self.spot_check[0], "mismatches": self.spot_check[1]},
            "timer": {"name": self.timer[0], "resolution": self.timer[1], "note": CYCLE_COUNTER_NOTE},
            "timing_loop": TIMING_LOOP_NOTE,
            "host": self.host,
            "table_sizes": self.table_sizes,
        }

    def dumps(self):
        """
        Serialize this report as JSON.

        @return: the JSON document
        @rtype: L{str}
        """
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def write(self, path):
        """
        Write this report as JSON into a file.

        @param path: path to write to
        @type path: L{str}
        """
        with open(path, "w", encoding="utf-8") as fout:
            fout.write(self.dumps())


def report_tables(reports):
    """
    Render the ratio tables of benchmark reports.

    @param reports: the reports, one per function
    @type reports: iterable of L{BenchReport}
    @return: the text
    @rtype: L{str}
    @raises ValueError: if a report has fewer than two variants
    """
    reports = list(reports)
    for report in reports:
        if len(report.results) < 2:
            raise ValueError("A ratio table of {} needs at least two variants, got {}".format(report.function_id, len(report.results)))
    renderer = TextRenderer("crvec.bench")
    return renderer.render(
        "bench.txt.jinja",
        reports=reports,
        cycle_counter_note=CYCLE_COUNTER_NOTE,
        timing_loop_note=TIMING_LOOP_NOTE,
    )


def run_bench(f_id, variants, lo, hi, options=None, reporter=None):
    """
    Run a benchmark session: the spot-check, then every variant in turn.

    @param f_id: the function
    @type f_id: L{str}
    @param variants: variant names or variants
    @type variants: L{list}
    @param lo: lower bound of the uniform inputs
    @type lo: L{float}
    @param hi: upper bound of the uniform inputs
    @type hi: L{float}
    @param options: benchmark options
    @type options: L{crvec.bench.throughput.BenchOptions} or L{None}
    @param reporter: reporter for progress
    @type reporter: L{crvec.reporter.BaseReporter} or L{None}
    @return: the report
    @rtype: L{BenchReport}
    """
    if options is None:
        options = BenchOptions()
    if reporter is None:
        reporter = VoidReporter()
    variants = [(parse_variant(v, f_id) if isinstance(v, str) else v) for v in variants]

    reporter.msg("Spot-checking {} on {} inputs...".format(f_id, SPOT_CHECK_INPUTS))
    checked = spot_check(f_id, lo, hi, seed=options.seed, mode=options.mode)
    if checked[1] > 0:
        reporter.warn("Spot-check of {} found {} mismatches!".format(f_id, checked[1]))

    results = []
    with reporter.with_progress("Measuring {}".format(f_id), max=len(variants), unit="variants") as bar:
        for variant in variants:
            results.append(throughput(f_id, variant, lo, hi, options=options))
            bar.advance(1)
    return BenchReport(
        f_id,
        results,
        spot_check=checked,
        timer=timer_info(),
        host=describe_host(),
        table_sizes=table_sizes(load_tables()),
    )
