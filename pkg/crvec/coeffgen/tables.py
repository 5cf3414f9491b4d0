"""
The lookup tables and polynomial coefficients of all kernels.

Every value is derived from the oracle: table entries are correctly
rounded function values, polynomials are minimax fits of oracle samples
(see L{crvec.coeffgen.remez}). Generation is deterministic and
single-threaded.

@var BUDGETS: the error budgets of the fits, by fit name
@type BUDGETS: L{dict}
"""
from fractions import Fraction

import mpmath
import numpy as np
from mpmath import mp

from ..fp.bits import BINARY64, Binary64, float_to_bits, bits_to_float
from ..fp.rounding import RoundingMode
from ..oracle import correctly_rounded_bits, eval_hp
from ..renderer import TextRenderer
from ..reporter import VoidReporter
from ..exceptions import BudgetError
from .remez import fit_minimax, certify, uniform_points
from .targets import get_target, to_mpf, ORACLE_PRECISION


EPS32_EXP2 = 2.0 ** -57
EPS32_LOG2 = 2.0 ** -50
EPS64 = 2.0 ** -66
# the binary64 fast paths leave most of their budget to table and
# double-double rounding errors
EPS64_MARGIN = 16

BUDGETS = {
    "exp2f": EPS32_EXP2,
    "log2f": EPS32_LOG2,
    "exp2d": EPS64 / EPS64_MARGIN,
    "logd": EPS64 / EPS64_MARGIN,
}

EXP2F_INTERVAL = (-2.0 ** -4, 2.0 ** -4)
EXP2F_DEGREE = 6
LOG2F_DEGREE = 9
LOG2F_SUBINTERVALS = 8
EXP2D_INTERVAL = (-2.0 ** -13, 2.0 ** -13)
LOGD_BINS = 128
RCP_BITS = 7
# bins of [1, 1 + 2^-7) and [1 - 2^-8, 1)
ONE_BINS = (0, LOGD_BINS - 1)
# candidate degrees when searching the smallest sufficient one
EXP2D_DEGREES = range(2, 9)
LOGD_DEGREES = range(3, 13)


class GenerationOptions(object):
    """
    Options for table generation.

    @ivar grid_bits: log2 of the number of certification grid intervals
    @type grid_bits: L{int}
    @ivar certify: whether to certify the fits on the dense grid
    @type certify: L{bool}
    """
    def __init__(self, grid_bits=20, certify=True):
        """
        The default constructor.

        @param grid_bits: log2 of the number of certification grid intervals
        @type grid_bits: L{int}
        @param certify: whether to certify the fits on the dense grid
        @type certify: L{bool}
        """
        assert isinstance(grid_bits, int) and grid_bits >= 1
        self.grid_bits = grid_bits
        self.certify = certify


def _u64(values):
    return np.array([float_to_bits(v) for v in values], dtype=np.uint64)


class Exp2fTables(object):
    """
    Tables of the binary32 exp2 kernel.

    @ivar T: T[k] = RN(2^(k/8)), k = 0..7
    @type T: L{list} of L{float}
    @ivar c: coefficients of poly(R) ~ (2^R - 1)/R, constant term first
    @type c: L{list} of L{float}
    """
    def __init__(self, T, c):
        assert len(T) == 8 and len(c) == EXP2F_DEGREE + 1
        self.T = list(T)
        self.c = list(c)
        self.T_bits = _u64(self.T)

    def records(self):
        """
        Return the artifact records of these tables.

        @return: list of (key, patterns)
        @rtype: L{list} of L{tuple}
        """
        out = [("exp2f.T.{}".format(k), (float_to_bits(v), )) for k, v in enumerate(self.T)]
        out += [("exp2f.c.{}".format(d), (float_to_bits(v), )) for d, v in enumerate(self.c)]
        return out

    @classmethod
    def from_records(cls, records):
        """
        Build the tables from artifact records.

        @param records: dict mapping keys to patterns
        @type records: L{dict}
        @return: the tables
        @rtype: L{Exp2fTables}
        """
        T = [bits_to_float(records["exp2f.T.{}".format(k)][0]) for k in range(8)]
        c = [bits_to_float(records["exp2f.c.{}".format(d)][0]) for d in range(EXP2F_DEGREE + 1)]
        return cls(T, c)

    def size(self):
        """The table size in bytes."""
        return 8 * (len(self.T) + len(self.c))


class Log2fTables(object):
    """
    Tables of the binary32 log2 kernel.

    @ivar c: c[j][d] is coefficient d of the polynomial on sub-interval j
    @type c: L{list} of L{list} of L{float}
    @ivar planes: planes[d] holds coefficient d of all sub-intervals (8 patterns)
    @type planes: L{list} of L{numpy.ndarray}
    """
    def __init__(self, c):
        assert len(c) == LOG2F_SUBINTERVALS
        assert all(len(row) == LOG2F_DEGREE + 1 for row in c)
        self.c = [list(row) for row in c]
        self.planes = [_u64([row[d] for row in self.c]) for d in range(LOG2F_DEGREE + 1)]

    def records(self):
        """
        Return the artifact records of these tables.

        @return: list of (key, patterns)
        @rtype: L{list} of L{tuple}
        """
        out = []
        for d in range(LOG2F_DEGREE + 1):
            for j in range(LOG2F_SUBINTERVALS):
                out.append(("log2f.c{}.{}".format(d, j), (float_to_bits(self.c[j][d]), )))
        return out

    @classmethod
    def from_records(cls, records):
        """
        Build the tables from artifact records.

        @param records: dict mapping keys to patterns
        @type records: L{dict}
        @return: the tables
        @rtype: L{Log2fTables}
        """
        c = [
            [bits_to_float(records["log2f.c{}.{}".format(d, j)][0]) for d in range(LOG2F_DEGREE + 1)]
            for j in range(LOG2F_SUBINTERVALS)
        ]
        return cls(c)

    def size(self):
        """The table size in bytes."""
        return 8 * LOG2F_SUBINTERVALS * (LOG2F_DEGREE + 1)


class Exp2dTables(object):
    """
    Tables of the binary64 exp2 kernel.

    @ivar T1: (hi, lo) pairs of 2^(i/16)
    @type T1: L{list} of L{tuple}
    @ivar T2: (hi, lo) pairs of 2^(i/256)
    @type T2: L{list} of L{tuple}
    @ivar T3: (hi, lo) pairs of 2^(i/4096)
    @type T3: L{list} of L{tuple}
    @ivar c: coefficients of q(R) ~ (2^R - 1)/R; c[0] is a (hi, lo) pair
    @type c: L{list}
    """
    def __init__(self, T1, T2, T3, c):
        assert len(T1) == len(T2) == len(T3) == 16
        assert isinstance(c[0], tuple)
        self.T1 = list(T1)
        self.T2 = list(T2)
        self.T3 = list(T3)
        self.c = list(c)

    def planes(self, name):
        """
        Return the hi and lo planes of a table.

        @param name: "T1", "T2" or "T3"
        @type name: L{str}
        @return: the tuple (hi patterns, lo patterns)
        @rtype: L{tuple} of L{numpy.ndarray}
        """
        table = getattr(self, name)
        return _u64([p[0] for p in table]), _u64([p[1] for p in table])

    def records(self):
        """
        Return the artifact records of these tables.

        @return: list of (key, patterns)
        @rtype: L{list} of L{tuple}
        """
        out = []
        for name in ("T1", "T2", "T3"):
            for i, (hi, lo) in enumerate(getattr(self, name)):
                out.append(("exp2d.{}.{}".format(name, i), (float_to_bits(hi), float_to_bits(lo))))
        out.append(("exp2d.c.0", (float_to_bits(self.c[0][0]), float_to_bits(self.c[0][1]))))
        out += [("exp2d.c.{}".format(d), (float_to_bits(v), )) for d, v in enumerate(self.c) if d > 0]
        return out

    @classmethod
    def from_records(cls, records):
        """
        Build the tables from artifact records.

        @param records: dict mapping keys to patterns
        @type records: L{dict}
        @return: the tables
        @rtype: L{Exp2dTables}
        """
        def pair(key):
            hi, lo = records[key]
            return (bits_to_float(hi), bits_to_float(lo))

        tables = [[pair("exp2d.{}.{}".format(name, i)) for i in range(16)] for name in ("T1", "T2", "T3")]
        c = [pair("exp2d.c.0")]
        d = 1
        while "exp2d.c.{}".format(d) in records:
            c.append(bits_to_float(records["exp2d.c.{}".format(d)][0]))
            d += 1
        return cls(tables[0], tables[1], tables[2], c)

    def size(self):
        """The table size in bytes."""
        return 3 * 16 * 16 + 16 + 8 * (len(self.c) - 1)


class LogdTable(object):
    """
    Tables of the binary64 log kernel.

    @ivar rcp: the short reciprocals, one per mantissa bin
    @type rcp: L{list} of L{float}
    @ivar L: (hi, lo) pairs of -log(rcp[i])
    @type L: L{list} of L{tuple}
    @ivar c: coefficients of q(r) ~ (log1p(r) - r + r^2/2) / r^3
    @type c: L{list} of L{float}
    @ivar ln2: (hi, lo) pair of ln(2)
    @type ln2: L{tuple} of L{float}
    """
    def __init__(self, rcp, L, c, ln2):
        assert len(rcp) == len(L) == LOGD_BINS
        self.rcp = list(rcp)
        self.L = list(L)
        self.c = list(c)
        self.ln2 = tuple(ln2)
        self.L_hi_array = _u64([p[0] for p in self.L]).view(np.int64)
        self.L_lo_array = _u64([p[1] for p in self.L]).view(np.int64)
        self.rcp_array = _u64(self.rcp).view(np.int64)

    def records(self):
        """
        Return the artifact records of these tables.

        @return: list of (key, patterns)
        @rtype: L{list} of L{tuple}
        """
        out = [("logd.L.{}".format(i), (float_to_bits(hi), float_to_bits(lo))) for i, (hi, lo) in enumerate(self.L)]
        out += [("logd.rcp.{}".format(i), (float_to_bits(v), )) for i, v in enumerate(self.rcp)]
        out += [("logd.c.{}".format(d), (float_to_bits(v), )) for d, v in enumerate(self.c)]
        out.append(("logd.ln2", (float_to_bits(self.ln2[0]), float_to_bits(self.ln2[1]))))
        return out

    @classmethod
    def from_records(cls, records):
        """
        Build the tables from artifact records.

        @param records: dict mapping keys to patterns
        @type records: L{dict}
        @return: the tables
        @rtype: L{LogdTable}
        """
        L = []
        for i in range(LOGD_BINS):
            hi, lo = records["logd.L.{}".format(i)]
            L.append((bits_to_float(hi), bits_to_float(lo)))
        rcp = [bits_to_float(records["logd.rcp.{}".format(i)][0]) for i in range(LOGD_BINS)]
        c = []
        d = 0
        while "logd.c.{}".format(d) in records:
            c.append(bits_to_float(records["logd.c.{}".format(d)][0]))
            d += 1
        hi, lo = records["logd.ln2"]
        return cls(rcp, L, c, (bits_to_float(hi), bits_to_float(lo)))

    def size(self):
        """The table size in bytes."""
        return 8 * (3 * LOGD_BINS + len(self.c)) + 16


class TableSet(object):
    """
    All tables, plus the certification of their fits.

    @ivar exp2f: binary32 exp2 tables
    @type exp2f: L{Exp2fTables}
    @ivar log2f: binary32 log2 tables
    @type log2f: L{Log2fTables}
    @ivar exp2d: binary64 exp2 tables
    @type exp2d: L{Exp2dTables}
    @ivar logd: binary64 log tables
    @type logd: L{LogdTable}
    @ivar fits: the fits the coefficients came from (empty when loaded from an artifact)
    @type fits: L{list} of L{crvec.coeffgen.remez.FitResult}
    """
    def __init__(self, exp2f, log2f, exp2d, logd, fits=None):
        self.exp2f = exp2f
        self.log2f = log2f
        self.exp2d = exp2d
        self.logd = logd
        self.fits = (fits if fits is not None else [])

    def records(self):
        """
        Return the artifact records of all tables, in artifact order.

        @return: list of (key, patterns)
        @rtype: L{list} of L{tuple}
        """
        return self.exp2f.records() + self.log2f.records() + self.exp2d.records() + self.logd.records()

    def render(self):
        """
        Render the certification of the fits as human readable text.

        @return: the text
        @rtype: L{str}
        """
        rows = [(fit, BUDGETS[fit.name.partition("[")[0]]) for fit in self.fits]
        return TextRenderer("crvec.coeffgen").render("certification.txt.jinja", rows=rows, sizes=table_sizes(self))

    @classmethod
    def from_records(cls, records):
        """
        Build all tables from artifact records.

        @param records: dict mapping keys to patterns
        @type records: L{dict}
        @return: the tables
        @rtype: L{TableSet}
        """
        return cls(
            Exp2fTables.from_records(records),
            Log2fTables.from_records(records),
            Exp2dTables.from_records(records),
            LogdTable.from_records(records),
        )


def table_sizes(tables):
    """
    Return the size in bytes of the tables of each kernel.

    @param tables: the tables
    @type tables: L{TableSet}
    @return: dict mapping kernel names to sizes
    @rtype: L{dict}
    """
    return {
        "exp2f": tables.exp2f.size(),
        "log2f": tables.log2f.size(),
        "exp2": tables.exp2d.size(),
        "log": tables.logd.size(),
    }


# ================ table entries ================


def exp2_pair(numerator, denominator):
    """
    Return the (hi, lo) pair of 2^(numerator/denominator).

    @param numerator: the numerator
    @type numerator: L{int}
    @param denominator: the denominator, a power of two
    @type denominator: L{int}
    @return: hi = RN(2^q), lo = RN(2^q - hi)
    @rtype: L{tuple} of L{float}
    """
    x = Binary64.from_float(numerator / denominator)
    hi = bits_to_float(correctly_rounded_bits("exp2", x, RoundingMode.NEAREST_EVEN, BINARY64))
    with mp.workprec(ORACLE_PRECISION + 64):
        lo = float(to_mpf(eval_hp("exp2", x, ORACLE_PRECISION)) - mpmath.mpf(hi))
    return (hi, lo)


def round_to_bits(value, bits):
    """
    Round a positive rational to a number of significant bits, ties to even.

    @param value: the value
    @type value: L{fractions.Fraction}
    @param bits: number of significant bits
    @type bits: L{int}
    @return: the rounded value
    @rtype: L{float}
    """
    assert value > 0
    e = value.numerator.bit_length() - value.denominator.bit_length()
    if Fraction(2) ** e > value:
        e -= 1
    scale = Fraction(2) ** (bits - 1 - e)
    n = round(value * scale)
    return float(Fraction(n) / scale)


def bin_midpoint(i):
    """
    Return the midpoint of mantissa bin i of [0.75, 1.5).

    Bins 0..63 cover [1, 1.5) in steps of 2^-7, bins 64..127 cover
    [0.75, 1) in steps of 2^-8: the bin is given by the top 7 bits of the
    mantissa field of the normalized value.

    @param i: the bin index
    @type i: L{int}
    @return: the midpoint
    @rtype: L{fractions.Fraction}
    """
    assert 0 <= i < LOGD_BINS
    if i < 64:
        return 1 + Fraction(2 * i + 1, 256)
    return Fraction(1, 2) + Fraction(2 * i + 1, 512)


def rcp_rule(i):
    """
    Return the short reciprocal of mantissa bin i.

    The two bins next to 1 get exactly 1, so that inputs close to 1 have
    L = 0 and a result with no cancellation.

    @param i: the bin index
    @type i: L{int}
    @return: 1/midpoint rounded to 7 significant bits
    @rtype: L{float}
    """
    if i in ONE_BINS:
        return 1.0
    return round_to_bits(1 / bin_midpoint(i), RCP_BITS)


def neg_log_pair(rcp):
    """
    Return the (hi, lo) pair of -log(rcp).

    @param rcp: the reciprocal
    @type rcp: L{float}
    @return: hi = RN(-log(rcp)), lo = RN(-log(rcp) - hi)
    @rtype: L{tuple} of L{float}
    """
    if rcp == 1.0:
        return (0.0, 0.0)
    x = Binary64.from_float(rcp)
    hi = -bits_to_float(correctly_rounded_bits("log", x, RoundingMode.NEAREST_EVEN, BINARY64))
    with mp.workprec(ORACLE_PRECISION + 64):
        lo = float(-to_mpf(eval_hp("log", x, ORACLE_PRECISION)) - mpmath.mpf(hi))
    return (hi, lo)


def logd_r_interval(rcp):
    """
    Return the hull of r = rcp * mx - 1 over all bins.

    @param rcp: the reciprocals
    @type rcp: L{list} of L{float}
    @return: the tuple (lo, hi) of 1 + r, widened to binary64
    @rtype: L{tuple} of L{float}
    """
    lo = 0
    hi = 0
    for i, c in enumerate(rcp):
        half = (Fraction(1, 256) if i < 64 else Fraction(1, 512))
        mid = bin_midpoint(i)
        lo = min(lo, Fraction(c) * (mid - half) - 1)
        hi = max(hi, Fraction(c) * (mid + half) - 1)
    return (float(1 + lo) - 2.0 ** -52, float(1 + hi) + 2.0 ** -52)


def log2f_interval(j):
    """
    Return the mx interval of log2 sub-interval j.

    @param j: the sub-interval, as given by the top 3 mantissa bits of x
    @type j: L{int}
    @return: the tuple (lo, hi)
    @rtype: L{tuple} of L{float}
    """
    assert 0 <= j < LOG2F_SUBINTERVALS
    if j < 4:
        return (1.0 + j / 8.0, 1.0 + (j + 1) / 8.0)
    return (0.5 + j / 16.0, 0.5 + (j + 1) / 16.0)


# ================ generation ================


def _fit(target_id, interval, degree, options, budget, leading_pair=False):
    grid_bits = (options.grid_bits if options.certify else None)
    return fit_minimax(
        get_target(target_id),
        interval,
        degree,
        grid_bits=grid_bits,
        budget=budget,
        leading_pair=leading_pair,
    )


def _fit_smallest(name, target_id, interval, degrees, options, budget, leading_pair=False):
    """
    Fit with the smallest degree whose fit uses at most half the budget
    on the fitting grid, leaving room for the certification safety factor.
    """
    target = get_target(target_id)
    last = None
    for degree in degrees:
        fit = fit_minimax(target, interval, degree, leading_pair=leading_pair)
        last = fit
        if fit.fit_error <= budget / 2:
            break
    fit = last
    fit.name = name
    if options.certify:
        certify(fit, target.samples(uniform_points(interval[0], interval[1], options.grid_bits)), budget=budget)
    elif fit.fit_error > budget:
        raise BudgetError(name, fit.fit_error, budget)
    return fit


def gen_exp2f(options, fits):
    """
    Generate the binary32 exp2 tables.

    @param options: generation options
    @type options: L{GenerationOptions}
    @param fits: list the fits are appended to
    @type fits: L{list}
    @return: the tables
    @rtype: L{Exp2fTables}
    """
    T = [exp2_pair(k, 8)[0] for k in range(8)]
    fit = _fit("exp2_q", EXP2F_INTERVAL, EXP2F_DEGREE, options, BUDGETS["exp2f"])
    fit.name = "exp2f"
    fits.append(fit)
    return Exp2fTables(T, fit.coefficients)


def gen_log2f(options, fits):
    """
    Generate the binary32 log2 tables.

    @param options: generation options
    @type options: L{GenerationOptions}
    @param fits: list the fits are appended to
    @type fits: L{list}
    @return: the tables
    @rtype: L{Log2fTables}
    """
    c = []
    for j in range(LOG2F_SUBINTERVALS):
        fit = _fit("log2_q", log2f_interval(j), LOG2F_DEGREE, options, BUDGETS["log2f"])
        fit.name = "log2f[{}]".format(j)
        fits.append(fit)
        c.append(fit.coefficients)
    return Log2fTables(c)


def gen_exp2d(options, fits):
    """
    Generate the binary64 exp2 tables.

    @param options: generation options
    @type options: L{GenerationOptions}
    @param fits: list the fits are appended to
    @type fits: L{list}
    @return: the tables
    @rtype: L{Exp2dTables}
    """
    T1 = [exp2_pair(i, 16) for i in range(16)]
    T2 = [exp2_pair(i, 256) for i in range(16)]
    T3 = [exp2_pair(i, 4096) for i in range(16)]
    fit = _fit_smallest("exp2d", "exp2_q", EXP2D_INTERVAL, EXP2D_DEGREES, options, BUDGETS["exp2d"], leading_pair=True)
    fits.append(fit)
    return Exp2dTables(T1, T2, T3, fit.coefficients)


def gen_logd(options, fits):
    """
    Generate the binary64 log tables.

    @param options: generation options
    @type options: L{GenerationOptions}
    @param fits: list the fits are appended to
    @type fits: L{list}
    @return: the tables
    @rtype: L{LogdTable}
    """
    rcp = [rcp_rule(i) for i in range(LOGD_BINS)]
    L = [neg_log_pair(v) for v in rcp]
    with mp.workprec(ORACLE_PRECISION):
        ln2_hi = float(mpmath.ln2)
        ln2_lo = float(mpmath.ln2 - mpmath.mpf(ln2_hi))
    fit = _fit_smallest("logd", "log1p_q", logd_r_interval(rcp), LOGD_DEGREES, options, BUDGETS["logd"])
    fits.append(fit)
    return LogdTable(rcp, L, fit.coefficients, (ln2_hi, ln2_lo))


def gen_all_tables(options=None, reporter=None):
    """
    Generate all tables.

    @param options: generation options, defaults to certification on a 2^20 grid
    @type options: L{GenerationOptions} or L{None}
    @param reporter: reporter for progress
    @type reporter: L{crvec.reporter.BaseReporter} or L{None}
    @return: the tables and their fits
    @rtype: L{TableSet}
    @raises BudgetError: if any fit exceeds its budget
    """
    if options is None:
        options = GenerationOptions()
    if reporter is None:
        reporter = VoidReporter()
    steps = (
        ("exp2f", gen_exp2f),
        ("log2f", gen_log2f),
        ("exp2", gen_exp2d),
        ("log", gen_logd),
    )
    fits = []
    results = []
    with reporter.with_progress("Generating tables", max=len(steps), unit="kernels") as bar:
        for name, generator in steps:
            reporter.msg("Generating tables for {}...".format(name))
            results.append(generator(options, fits))
            bar.advance(1)
    return TableSet(*results, fits=fits)
