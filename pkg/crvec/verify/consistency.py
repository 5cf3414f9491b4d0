"""
Consistency checks: the kernels have to give bit-identical lanes on every
backend, at every batch width and through the scalar entry points.

The reference backend is the reference here, no oracle is involved.
"""
import time

import numpy as np

from ..fp.rounding import RoundingMode
from ..kernels import get_kernel
from ..reporter import VoidReporter
from ..vlanes import LaneBatch, WIDTHS, KIND_F32
from .corpus import CO_RESIDENT_RANGES
from .report import VerifyReport, Mismatch


SPECIALS_F32 = [0.0, -0.0, 1.0, -1.0, np.inf, -np.inf, np.nan, 2.0 ** -149, -(2.0 ** -149), 128.0, -150.0, 3.4028234663852886e+38]
SPECIALS_F64 = [0.0, -0.0, 1.0, -1.0, np.inf, -np.inf, np.nan, 2.0 ** -1074, 1024.0, -1075.0, -1076.5, 1.7976931348623157e+308]

DEFAULT_SCALAR_LANES = 1024


def random_inputs(f_id, n, seed):
    """
    Return seeded inputs for a kernel: the special values followed by
    random bit patterns and uniform values of the typical range, mixed
    half and half.

    @param f_id: the function
    @type f_id: L{str}
    @param n: number of random inputs
    @type n: L{int}
    @param seed: the seed
    @type seed: L{int}
    @return: the input patterns
    @rtype: L{numpy.ndarray} (uint32 for binary32 functions, uint64 otherwise)
    """
    rng = np.random.default_rng(seed)
    lo, hi = CO_RESIDENT_RANGES[f_id]
    if f_id.endswith("f"):
        ftype, utype, specials = np.float32, np.uint32, SPECIALS_F32
    else:
        ftype, utype, specials = np.float64, np.uint64, SPECIALS_F64
    n_bits = n // 2
    patterns = rng.integers(0, np.iinfo(utype).max, size=n_bits, dtype=utype, endpoint=True)
    uniform = rng.uniform(lo, hi, size=n - n_bits).astype(ftype).view(utype)
    mixed = np.concatenate([patterns, uniform])
    rng.shuffle(mixed)
    return np.concatenate([np.array(specials, dtype=ftype).view(utype), mixed])


def _padded(patterns):
    n = len(patterns)
    out = np.zeros(-(-n // 16) * 16, dtype=patterns.dtype)
    out[:n] = patterns
    return out


def _compare(report, mode, inputs, got, expected, kind):
    # bit identity, NaN payloads included
    value_type = report.value_type
    for i in np.flatnonzero(got != expected).tolist():
        report.add_mismatch(Mismatch(value_type(int(inputs[i])), mode, value_type(int(got[i])), value_type(int(expected[i]))))
    report.inputs_tested += len(inputs)
    report.coverage.setdefault("checks", [])
    if kind not in report.coverage["checks"]:
        report.coverage["checks"].append(kind)


def consistency_check(f_id, n, seed=0, modes=(RoundingMode.NEAREST_EVEN, ), backend="vectorized", scalar_lanes=DEFAULT_SCALAR_LANES, mismatch_cap=100, reporter=None):
    """
    Check a kernel for backend, width and scalar consistency.

    @param f_id: the function
    @type f_id: L{str}
    @param n: number of random inputs (special values are always added)
    @type n: L{int}
    @param seed: the seed
    @type seed: L{int}
    @param modes: the rounding modes
    @type modes: iterable of L{crvec.fp.rounding.RoundingMode}
    @param backend: the backend compared against the reference backend
    @type backend: L{str}
    @param scalar_lanes: number of leading inputs also run through the scalar entry point
    @type scalar_lanes: L{int}
    @param mismatch_cap: max number of stored differences
    @type mismatch_cap: L{int}
    @param reporter: reporter for progress
    @type reporter: L{crvec.reporter.BaseReporter} or L{None}
    @return: the report, each difference is stored as a mismatch with the reference as expected value
    @rtype: L{crvec.verify.report.VerifyReport}
    """
    if reporter is None:
        reporter = VoidReporter()
    kernel, kind = get_kernel(f_id)
    modes = sorted(set(RoundingMode(m) for m in modes))
    start_time = time.time()
    inputs = _padded(random_inputs(f_id, n, seed))
    n_scalar = min(scalar_lanes, len(inputs))
    report = VerifyReport(
        f_id, modes,
        coverage={"kind": "consistency", "lanes": len(inputs), "scalar_lanes": n_scalar, "seed": seed, "backend": backend},
        mismatch_cap=mismatch_cap,
    )

    steps = len(modes) * (2 + len(WIDTHS))
    with reporter.with_progress("Checking {}".format(f_id), max=steps, unit="checks", secondary_unit="differences") as bar:
        for mode in modes:
            native_width = (16 if kind == KIND_F32 else 8)
            batch = LaneBatch(inputs, native_width, kind)
            reference = kernel(batch, mode, backend="reference").data

            before = report.mismatch_count
            got = kernel(batch, mode, backend=backend).data
            _compare(report, mode, inputs, got, reference, "backend")
            bar.advance(1, secondary=report.mismatch_count - before)

            for width in WIDTHS:
                before = report.mismatch_count
                got = kernel(batch.regroup(width), mode, backend=backend).data
                _compare(report, mode, inputs, got, reference, "width")
                bar.advance(1, secondary=report.mismatch_count - before)

            before = report.mismatch_count
            scalar = np.array(
                [kernel(batch.take([i]), mode, backend=backend).data[0] for i in range(n_scalar)],
                dtype=inputs.dtype,
            )
            _compare(report, mode, inputs[:n_scalar], scalar, reference[:n_scalar], "scalar")
            bar.advance(1, secondary=report.mismatch_count - before)
    report.wall_time = time.time() - start_time
    return report
