"""
Functions approximated by the kernel polynomials.

Each target maps a binary64 grid point to a L{crvec.coeffgen.remez.Sample}
(polynomial variable, value, weight). Values come from the oracle; mpmath
only carries out the remaining exact or near-exact arithmetic. The weights
turn the error of the polynomial into the error of the reconstruction the
kernel actually computes.
"""
import mpmath
from mpmath import mp, mpf

from ..fp.bits import Binary64
from ..oracle import eval_hp
from .remez import Sample, FIT_PRECISION


ORACLE_PRECISION = 256


def to_mpf(approx):
    """
    Convert an oracle approximation to an mpf at the current precision.

    @param approx: the approximation
    @type approx: L{crvec.oracle.bigfixed.BigFixed}
    @return: the value
    @rtype: L{mpmath.mpf}
    """
    m = (-approx.mantissa if approx.sign else approx.mantissa)
    return mpmath.ldexp(mpf(m), approx.exponent)


def _oracle(f_id, x):
    return to_mpf(eval_hp(f_id, Binary64.from_float(x), ORACLE_PRECISION))


class Target(object):
    """
    Base class for fit targets.

    @cvar name: the target id
    @type name: L{str}
    """
    name = None

    def sample(self, point):
        """
        Compute the sample for a grid point.

        @param point: the binary64 grid point
        @type point: L{float}
        @return: the sample
        @rtype: L{crvec.coeffgen.remez.Sample}
        """
        raise NotImplementedError("Not implemented!")

    def samples(self, points):
        """
        Compute the samples for a list of grid points.

        @param points: the binary64 grid points
        @type points: L{list} of L{float}
        @return: the samples
        @rtype: L{list} of L{crvec.coeffgen.remez.Sample}
        """
        with mp.workprec(FIT_PRECISION + 64):
            return [self.sample(p) for p in points]


class Exp2Quotient(Target):
    """
    (2^R - 1) / R, so that 1 + R * poly(R) approximates 2^R.

    The weight |R| / 2^R makes the weighted error the relative error
    of the reconstruction.
    """
    name = "exp2_q"

    def sample(self, point):
        t = mpf(point)
        if point == 0.0:
            return Sample(point, t, +mpmath.ln2, mpf(0))
        p = _oracle("exp2", point)
        return Sample(point, t, (p - 1) / t, abs(t) / p)


class Log2Quotient(Target):
    """
    (log2(mx) - R) / R with R = 1.5 (mx - 1), on grid points mx.

    The weight |R| gives the absolute error of R + R * poly(R).
    """
    name = "log2_q"

    def sample(self, point):
        t = mpf("1.5") * (mpf(point) - 1)
        if t == 0:
            return Sample(point, t, 1 / (mpf("1.5") * mpmath.ln2) - 1, mpf(0))
        value = _oracle("log2", point)
        return Sample(point, t, (value - t) / t, abs(t))


class Log1pQuotient(Target):
    """
    (log1p(r) - r + r^2/2) / r^3 on grid points m = 1 + r.

    The weight |r^3 / log1p(r)| gives the relative error of
    r - r^2/2 + r^3 * poly(r).
    """
    name = "log1p_q"

    def sample(self, point):
        t = mpf(point) - 1
        if t == 0:
            return Sample(point, t, mpf(1) / 3, mpf(0))
        value = _oracle("log", point)
        return Sample(point, t, (value - t + t * t / 2) / t ** 3, abs(t ** 3 / value))


_TARGETS = {cls.name: cls for cls in (Exp2Quotient, Log2Quotient, Log1pQuotient)}


def get_target(name):
    """
    Return the target with the given id.

    @param name: the target id
    @type name: L{str}
    @return: the target
    @rtype: L{Target}
    @raises KeyError: if the target is unknown
    """
    if name not in _TARGETS:
        raise KeyError("No target named '{}'!".format(name))
    return _TARGETS[name]()
