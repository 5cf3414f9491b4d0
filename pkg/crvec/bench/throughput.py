"""
Reciprocal throughput measurement of the kernels.

Every variant evaluates the same pre-generated, independent inputs. The
batch variants receive their inputs as one stacked L{LaneBatch}, the
scalar variant calls the width-1 entry point once per element. A warmup
pass is excluded; each repetition is timed as a whole and divided by the
number of elements actually evaluated. The scalar and reference variants
run on a prefix of the same inputs, as a full pass of them takes
minutes. Results are folded into a sink so that no evaluation can be
skipped.
"""
import os
import re
import time

import numpy as np

from ..exceptions import TimerResolutionError
from ..fp.bits import BINARY32, BINARY64, Binary32, Binary64
from ..fp.rounding import RoundingMode
from ..kernels import get_kernel, FAST_PATHS, ORACLE_IDS
from ..kernels.f32 import cr_exp2f_scalar, cr_log2f_scalar
from ..kernels.f64 import cr_exp2_scalar, cr_log_scalar
from ..oracle import ziv_correctly_round
from ..vlanes import LaneBatch, WIDTHS, KIND_F32, KIND_F64
from ..verify.report import results_match


MIN_ELEMENTS = 1 << 16
DEFAULT_ELEMENTS = 1 << 20
# variants evaluating one element per python call
SLOW_KINDS = ("scalar", "reference")
MIN_REPETITIONS = 9
SPOT_CHECK_INPUTS = 10 ** 4
# a measurement has to last this many timer ticks
MIN_TICKS = 1000
UNKNOWN_CACHE_BUFFER = 256 * 1024 * 1024

DEFAULT_RANGES = {
    "exp2f": (-20.0, 20.0),
    "log2f": (0.125, 8.0),
    "exp2": (-20.0, 20.0),
    "log": (0.125, 8.0),
}

SCALAR_ENTRIES = {
    "exp2f": cr_exp2f_scalar,
    "log2f": cr_log2f_scalar,
    "exp2": cr_exp2_scalar,
    "log": cr_log_scalar,
}

_VARIANT_RE = re.compile(r"^(scalar|batch|reference|main)(\d*)$")


class BenchOptions(object):
    """
    Options for benchmarks.

    @ivar n_elements: number of inputs per repetition
    @type n_elements: L{int}
    @ivar slow_elements: cap on the inputs per repetition of the scalar and reference variants
    @type slow_elements: L{int}
    @ivar repetitions: number of timed repetitions
    @type repetitions: L{int}
    @ivar warmup: number of untimed passes before measuring
    @type warmup: L{int}
    @ivar large_buffers: if nonzero, size the inputs to exceed the last level cache
    @type large_buffers: L{bool}
    @ivar seed: seed of the inputs
    @type seed: L{int}
    @ivar mode: rounding mode the kernels are measured in
    @type mode: L{crvec.fp.rounding.RoundingMode}
    """
    def __init__(self, n_elements=DEFAULT_ELEMENTS, repetitions=15, warmup=1, large_buffers=False, seed=0, mode=RoundingMode.NEAREST_EVEN, slow_elements=MIN_ELEMENTS):
        """
        The default constructor.

        @raises ValueError: if n_elements, slow_elements or repetitions are too small for a stable median
        """
        if n_elements < MIN_ELEMENTS:
            raise ValueError("n_elements must be at least {}, got {}".format(MIN_ELEMENTS, n_elements))
        if slow_elements < MIN_ELEMENTS:
            raise ValueError("slow_elements must be at least {}, got {}".format(MIN_ELEMENTS, slow_elements))
        if repetitions < MIN_REPETITIONS:
            raise ValueError("repetitions must be at least {}, got {}".format(MIN_REPETITIONS, repetitions))
        assert warmup >= 0
        self.n_elements = n_elements
        self.slow_elements = slow_elements
        self.repetitions = repetitions
        self.warmup = warmup
        self.large_buffers = large_buffers
        self.seed = seed
        self.mode = mode


class Variant(object):
    """
    A measured variant of a kernel.

    @ivar kind: "scalar", "batch", "reference" or "main"
    @type kind: L{str}
    @ivar width: the batch width (1 for scalar)
    @type width: L{int}
    """
    def __init__(self, kind, width):
        assert kind in ("scalar", "batch", "reference", "main")
        assert width in WIDTHS
        self.kind = kind
        self.width = width

    @property
    def name(self):
        """The name of the variant as given on the command line."""
        return ("scalar" if self.kind == "scalar" else "{}{}".format(self.kind, self.width))

    @property
    def description(self):
        """A human readable description."""
        return {
            "scalar": "scalar CR, one call per element",
            "batch": "batch CR, vectorized backend",
            "reference": "batch CR, reference backend",
            "main": "main path only, no callout",
        }[self.kind]

    def __repr__(self):
        return "Variant({})".format(self.name)


def parse_variant(name, f_id):
    """
    Parse a variant name like "scalar", "batch8", "reference16" or "main8".

    @param name: the name
    @type name: L{str}
    @param f_id: the function the variant is measured for
    @type f_id: L{str}
    @return: the variant
    @rtype: L{Variant}
    @raises ValueError: if the name is invalid for the function
    """
    match = _VARIANT_RE.match(name.strip().lower())
    if match is None:
        raise ValueError("Unknown variant '{}'".format(name))
    kind, width = match.group(1), match.group(2)
    if kind == "scalar":
        if width:
            raise ValueError("The scalar variant takes no width")
        return Variant("scalar", 1)
    if not width:
        width = ("16" if f_id.endswith("f") else "8")
    width = int(width)
    if width not in WIDTHS:
        raise ValueError("Unsupported width {} in variant '{}'".format(width, name))
    if kind == "main" and f_id not in FAST_PATHS:
        raise ValueError("Variant '{}' needs a function with a fast path ({})".format(name, ", ".join(sorted(FAST_PATHS))))
    return Variant(kind, width)


class BenchResult(object):
    """
    The measurement of one variant.

    @ivar function_id: the function
    @type function_id: L{str}
    @ivar variant: the variant
    @type variant: L{Variant}
    @ivar distribution: description of the inputs
    @type distribution: L{str}
    @ivar n_elements: number of elements per repetition
    @type n_elements: L{int}
    @ivar samples: nanoseconds per element of every repetition
    @type samples: L{list} of L{float}
    @ivar sink: xor of all result patterns
    @type sink: L{int}
    """
    def __init__(self, function_id, variant, distribution, n_elements, samples, sink):
        self.function_id = function_id
        self.variant = variant
        self.distribution = distribution
        self.n_elements = n_elements
        self.samples = list(samples)
        self.sink = sink

    def __repr__(self):
        return "BenchResult({}, {}, median={:.1f}ns)".format(self.function_id, self.variant.name, self.median)

    @property
    def median(self):
        """Median nanoseconds per element."""
        return float(np.median(self.samples))

    @property
    def spread(self):
        """Relative interquartile range of the samples."""
        q1, q3 = np.percentile(self.samples, [25, 75])
        return float((q3 - q1) / self.median) if self.median > 0 else 0.0

    @property
    def elements_per_iteration(self):
        """Number of elements one kernel call evaluates."""
        return self.variant.width

    def to_dict(self):
        """
        Return a dict describing this result.

        @return: a json-serializable dict
        @rtype: L{dict}
        """
        return {
            "function": self.function_id,
            "variant": self.variant.name,
            "description": self.variant.description,
            "distribution": self.distribution,
            "n_elements": self.n_elements,
            "elements_per_iteration": self.elements_per_iteration,
            "median_ns": self.median,
            "spread": self.spread,
            "samples_ns": self.samples,
        }


def last_level_cache_bytes():
    """
    Return the size of the last level cache of this host, if known.

    @return: the size in bytes or L{None}
    @rtype: L{int} or L{None}
    """
    base = "/sys/devices/system/cpu/cpu0/cache"
    if not os.path.isdir(base):
        return None
    best = None
    for entry in sorted(os.listdir(base)):
        fn = os.path.join(base, entry, "size")
        if not os.path.exists(fn):
            continue
        with open(fn, "r") as fin:
            text = fin.read().strip().upper()
        match = re.match(r"^(\d+)([KMG]?)$", text)
        if match is None:
            continue
        size = int(match.group(1)) * {"": 1, "K": 1 << 10, "M": 1 << 20, "G": 1 << 30}[match.group(2)]
        best = max(best or 0, size)
    return best


def element_count(f_id, options, variant=None):
    """
    Return the number of elements to generate for a variant.

    @param f_id: the function
    @type f_id: L{str}
    @param options: the options
    @type options: L{BenchOptions}
    @param variant: the variant, L{None} for a batch variant
    @type variant: L{Variant} or L{None}
    @return: the element count
    @rtype: L{int}
    """
    if variant is not None and variant.kind in SLOW_KINDS:
        return min(options.n_elements, options.slow_elements)
    if not options.large_buffers:
        return options.n_elements
    itemsize = (4 if f_id.endswith("f") else 8)
    cache = last_level_cache_bytes()
    target = (4 * cache if cache is not None else UNKNOWN_CACHE_BUFFER)
    return max(options.n_elements, target // itemsize)


def generate_inputs(f_id, lo, hi, n, seed):
    """
    Generate the uniformly distributed inputs of a benchmark.

    @return: the inputs
    @rtype: L{numpy.ndarray} of float32 or float64
    """
    rng = np.random.default_rng(seed)
    values = rng.uniform(lo, hi, size=n)
    return values.astype(np.float32 if f_id.endswith("f") else np.float64)


def timer_info():
    """
    Return the name and resolution (seconds) of the timer used.

    @return: the tuple (name, resolution)
    @rtype: L{tuple}
    """
    info = time.get_clock_info("perf_counter")
    return (info.implementation, info.resolution)


def _prepare(f_id, variant, inputs, mode):
    """
    Return a callable running one pass of a variant over the inputs, and
    the number of elements one pass evaluates.
    """
    kind = (KIND_F32 if f_id.endswith("f") else KIND_F64)
    if variant.kind == "scalar":
        entry = SCALAR_ENTRIES[f_id]
        cls = (Binary32 if kind == KIND_F32 else Binary64)
        values = [cls(int(b)) for b in inputs.view(np.uint32 if kind == KIND_F32 else np.uint64)]

        def run():
            sink = 0
            for v in values:
                sink ^= entry(v, mode).bits
            return sink
        return run, len(values)

    n = len(inputs) - len(inputs) % variant.width
    batch = LaneBatch.from_floats(inputs[:n], variant.width, kind)
    if variant.kind == "main":
        fast_path = FAST_PATHS[f_id]

        def run():
            return int(np.bitwise_xor.reduce(fast_path(batch, mode).fast_result.data))
        return run, n

    kernel, _ = get_kernel(f_id)
    backend = ("reference" if variant.kind == "reference" else "vectorized")

    def run():
        return int(np.bitwise_xor.reduce(kernel(batch, mode, backend=backend).data))
    return run, n


def throughput(f_id, variant, lo, hi, options=None):
    """
    Measure the reciprocal throughput of a kernel variant.

    @param f_id: the function
    @type f_id: L{str}
    @param variant: the variant or its name
    @type variant: L{Variant} or L{str}
    @param lo: lower bound of the uniform inputs
    @type lo: L{float}
    @param hi: upper bound of the uniform inputs
    @type hi: L{float}
    @param options: benchmark options
    @type options: L{BenchOptions} or L{None}
    @return: the measurement
    @rtype: L{BenchResult}
    @raises TimerResolutionError: if a repetition is too short to be timed reliably
    """
    if options is None:
        options = BenchOptions()
    if isinstance(variant, str):
        variant = parse_variant(variant, f_id)
    inputs = generate_inputs(f_id, lo, hi, element_count(f_id, options, variant), options.seed)
    run, n = _prepare(f_id, variant, inputs, options.mode)
    _, resolution = timer_info()

    sink = 0
    for _ in range(options.warmup):
        sink ^= run()
    samples = []
    for _ in range(options.repetitions):
        start = time.perf_counter()
        sink ^= run()
        elapsed = time.perf_counter() - start
        if elapsed < MIN_TICKS * resolution:
            raise TimerResolutionError(
                "A repetition of {} {} took {:.3g}s, below {} timer ticks; raise the number of elements.".format(
                    f_id, variant.name, elapsed, MIN_TICKS,
                ),
            )
        samples.append(elapsed * 1e9 / n)
    distribution = "uniform({}, {})".format(lo, hi)
    return BenchResult(f_id, variant, distribution, n, samples, sink)


def spot_check(f_id, lo, hi, n=SPOT_CHECK_INPUTS, seed=0, mode=RoundingMode.NEAREST_EVEN):
    """
    Compare the batch kernel with the oracle on seeded inputs.

    @param f_id: the function
    @type f_id: L{str}
    @param lo: lower bound of the uniform inputs
    @type lo: L{float}
    @param hi: upper bound of the uniform inputs
    @type hi: L{float}
    @param n: number of inputs
    @type n: L{int}
    @param seed: the seed
    @type seed: L{int}
    @param mode: the rounding mode
    @type mode: L{crvec.fp.rounding.RoundingMode}
    @return: the tuple (inputs checked, mismatches)
    @rtype: L{tuple} of L{int}
    """
    kernel, kind = get_kernel(f_id)
    width = (16 if kind == KIND_F32 else 8)
    n = n - n % width
    inputs = generate_inputs(f_id, lo, hi, n, seed + 1)
    batch = LaneBatch.from_floats(inputs, width, kind)
    results = kernel(batch, mode)
    fmt = (BINARY32 if kind == KIND_F32 else BINARY64)
    mismatches = 0
    for i in range(n):
        x = batch.lane(i)
        expected = ziv_correctly_round(ORACLE_IDS[f_id], x, target=fmt, mode=mode).rounded
        if not results_match(results.lane(i), expected):
            mismatches += 1
    return n, mismatches
