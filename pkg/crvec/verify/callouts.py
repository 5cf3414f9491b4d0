"""
Statistics of the binary64 fast path: how often the rounding test fails
and how the failures spread over the batches.
"""
import json
import time

import numpy as np

from ..kernels import FAST_PATHS
from ..fp.rounding import RoundingMode
from ..renderer import TextRenderer
from ..reporter import VoidReporter
from ..vlanes import LaneBatch, KIND_F64


BLOCK_LANES = 1 << 16


class CalloutStats(object):
    """
    Callout statistics of a binary64 kernel.

    @ivar function_id: the function
    @type function_id: L{str}
    @ivar distribution: description of the input distribution
    @type distribution: L{str}
    @ivar mode: the rounding mode
    @type mode: L{crvec.fp.rounding.RoundingMode}
    @ivar width: the batch width
    @type width: L{int}
    @ivar n: number of lanes evaluated
    @type n: L{int}
    @ivar undecided: number of lanes the rounding test did not decide
    @type undecided: L{int}
    @ivar histogram: maps the number of undecided lanes in a batch to the number of such batches
    @type histogram: L{dict}
    @ivar wall_time: seconds the run took
    @type wall_time: L{float}
    """
    def __init__(self, function_id, distribution, mode, width):
        self.function_id = function_id
        self.distribution = distribution
        self.mode = mode
        self.width = width
        self.n = 0
        self.undecided = 0
        self.histogram = {}
        self.wall_time = 0.0

    def __repr__(self):
        return "CalloutStats({}, n={}, undecided={})".format(self.function_id, self.n, self.undecided)

    @property
    def rate(self):
        """The fraction of undecided lanes."""
        return (self.undecided / self.n if self.n else 0.0)

    @property
    def disrupted_batches(self):
        """The number of batches with at least one undecided lane."""
        return sum(count for k, count in self.histogram.items() if k > 0)

    def add(self, mask):
        """
        Account the decided mask of a stack of batches.

        @param mask: the decided lanes
        @type mask: L{crvec.vlanes.batch.LaneMask}
        """
        undecided = (~mask).per_batch_counts()
        self.n += len(mask)
        self.undecided += int(undecided.sum())
        values, counts = np.unique(undecided, return_counts=True)
        for k, c in zip(values.tolist(), counts.tolist()):
            self.histogram[k] = self.histogram.get(k, 0) + c

    def to_dict(self, timing=True):
        """
        Return a dict describing these statistics.

        @param timing: whether to include the wall time
        @type timing: L{bool}
        @return: a json-serializable dict
        @rtype: L{dict}
        """
        data = {
            "function": self.function_id,
            "distribution": self.distribution,
            "mode": self.mode.short_name,
            "width": self.width,
            "n": self.n,
            "undecided": self.undecided,
            "rate": self.rate,
            "histogram": {str(k): v for k, v in sorted(self.histogram.items())},
        }
        if timing:
            data["wall_time"] = self.wall_time
        return data

    def dumps(self, timing=True):
        """
        Serialize these statistics as JSON.

        @return: the JSON document
        @rtype: L{str}
        """
        return json.dumps(self.to_dict(timing=timing), indent=2, sort_keys=True) + "\n"

    def render(self):
        """
        Render these statistics as human readable text.

        @return: the text
        @rtype: L{str}
        """
        return TextRenderer("crvec.verify").render("callouts.txt.jinja", stats=self)


def callout_stats_values(f_id, values, mode=RoundingMode.NEAREST_EVEN, width=8, backend="vectorized", distribution="explicit", reporter=None):
    """
    Measure the callouts of a kernel on given inputs.

    @param f_id: "exp2" or "log"
    @type f_id: L{str}
    @param values: the inputs
    @type values: L{numpy.ndarray} of float64
    @param mode: the rounding mode
    @type mode: L{crvec.fp.rounding.RoundingMode}
    @param width: the batch width
    @type width: L{int}
    @param backend: name of the lane backend
    @type backend: L{str}
    @param distribution: description of where the values came from
    @type distribution: L{str}
    @param reporter: reporter for progress
    @type reporter: L{crvec.reporter.BaseReporter} or L{None}
    @return: the statistics
    @rtype: L{CalloutStats}
    """
    if f_id not in FAST_PATHS:
        raise KeyError("No fast path for '{}', choose one of {}".format(f_id, ", ".join(sorted(FAST_PATHS))))
    if reporter is None:
        reporter = VoidReporter()
    fast_path = FAST_PATHS[f_id]
    values = np.ascontiguousarray(values, dtype=np.float64).reshape(-1)
    # incomplete trailing batch is dropped
    values = values[:len(values) - len(values) % width]
    stats = CalloutStats(f_id, distribution, mode, width)
    start_time = time.time()
    block = BLOCK_LANES - BLOCK_LANES % width
    with reporter.with_progress("Measuring callouts", max=len(values), unit="lanes", secondary_unit="undecided") as bar:
        for start in range(0, len(values), block):
            batch = LaneBatch.from_floats(values[start:start + block], width, KIND_F64)
            outcome = fast_path(batch, mode, backend=backend)
            before = stats.undecided
            stats.add(outcome.decided)
            bar.advance(len(batch), secondary=stats.undecided - before)
    stats.wall_time = time.time() - start_time
    return stats


def callout_stats(f_id, lo, hi, n, seed=0, mode=RoundingMode.NEAREST_EVEN, width=8, backend="vectorized", reporter=None):
    """
    Measure the callouts of a kernel on seeded uniform inputs.

    @param f_id: "exp2" or "log"
    @type f_id: L{str}
    @param lo: lower bound of the distribution
    @type lo: L{float}
    @param hi: upper bound of the distribution
    @type hi: L{float}
    @param n: number of inputs, rounded down to whole batches
    @type n: L{int}
    @param seed: the seed
    @type seed: L{int}
    @return: the statistics
    @rtype: L{CalloutStats}
    """
    assert n >= 1
    rng = np.random.default_rng(seed)
    values = rng.uniform(lo, hi, size=n)
    distribution = "uniform({}, {}), seed {}".format(lo, hi, seed)
    return callout_stats_values(f_id, values, mode=mode, width=width, backend=backend, distribution=distribution, reporter=reporter)
