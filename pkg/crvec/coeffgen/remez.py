"""
Weighted minimax polynomial fitting.

Fits are computed by the Remez exchange algorithm on a fixed discrete grid
of Chebyshev nodes, with all arithmetic in mpmath at FIT_PRECISION bits.
Coefficients are rounded to binary64 one at a time from the lowest degree
up, refitting the remaining coefficients after each rounding.

@var FIT_PRECISION: working precision of the fits in bits
@type FIT_PRECISION: L{int}
@var FIT_POINTS: number of nodes of the fitting grid
@type FIT_POINTS: L{int}
"""
import mpmath
from mpmath import mp, mpf

from ..exceptions import BudgetError
from ..fp.bits import float_to_bits


FIT_PRECISION = 192
FIT_POINTS = 2048
MAX_ITERATIONS = 100
CERTIFICATION_SAFETY = 2


class Sample(object):
    """
    One node of a fit: polynomial variable, target value and weight.

    @ivar point: the binary64 grid point the sample was derived from
    @type point: L{float}
    @ivar t: the polynomial variable
    @type t: L{mpmath.mpf}
    @ivar value: the target value
    @type value: L{mpmath.mpf}
    @ivar weight: the error weight
    @type weight: L{mpmath.mpf}
    """
    __slots__ = ("point", "t", "value", "weight")

    def __init__(self, point, t, value, weight):
        self.point = point
        self.t = t
        self.value = value
        self.weight = weight


class FitResult(object):
    """
    The result of a fit.

    @ivar name: name of the fitted quantity
    @type name: L{str}
    @ivar coefficients: the coefficients, constant term first; the first
        one may be a (hi, lo) pair
    @type coefficients: L{list}
    @ivar fit_error: weighted sup error over the fitting grid
    @type fit_error: L{float}
    @ivar certified_error: the certified error bound, or None if not certified
    @type certified_error: L{float} or L{None}
    """
    def __init__(self, name, coefficients, fit_error, certified_error=None):
        self.name = name
        self.coefficients = coefficients
        self.fit_error = fit_error
        self.certified_error = certified_error

    def __repr__(self):
        return "FitResult({}, degree={}, fit_error={})".format(self.name, self.degree, self.fit_error)

    @property
    def degree(self):
        """The polynomial degree."""
        return len(self.coefficients) - 1

    def exact_coefficients(self):
        """
        Return the stored coefficients as exact mpf values.

        @return: the coefficients, constant term first
        @rtype: L{list} of L{mpmath.mpf}
        """
        out = []
        for c in self.coefficients:
            if isinstance(c, tuple):
                out.append(mpf(c[0]) + mpf(c[1]))
            else:
                out.append(mpf(c))
        return out

    def to_dict(self):
        """
        Return a dict describing this fit for reports.

        @return: a json-serializable dict
        @rtype: L{dict}
        """
        return {
            "name": self.name,
            "degree": self.degree,
            "fit_error": float(self.fit_error).hex(),
            "certified_error": (float(self.certified_error).hex() if self.certified_error is not None else None),
        }


def chebyshev_points(lo, hi, n):
    """
    Return n Chebyshev nodes of the first kind in (lo, hi), rounded to binary64.

    @param lo: lower end of the interval
    @type lo: L{float}
    @param hi: upper end of the interval
    @type hi: L{float}
    @param n: number of nodes
    @type n: L{int}
    @return: the nodes in ascending order, without duplicates
    @rtype: L{list} of L{float}
    """
    with mp.workprec(FIT_PRECISION):
        mid = (mpf(lo) + mpf(hi)) / 2
        rad = (mpf(hi) - mpf(lo)) / 2
        points = set()
        for i in range(n):
            points.add(float(mid - rad * mpmath.cos((2 * i + 1) * mpmath.pi / (2 * n))))
    return sorted(points)


def uniform_points(lo, hi, bits):
    """
    Return 2^bits + 1 equally spaced points covering [lo, hi], rounded to binary64.

    @param lo: lower end of the interval
    @type lo: L{float}
    @param hi: upper end of the interval
    @type hi: L{float}
    @param bits: log2 of the number of grid intervals
    @type bits: L{int}
    @return: the points in ascending order, without duplicates
    @rtype: L{list} of L{float}
    """
    n = 1 << bits
    with mp.workprec(FIT_PRECISION):
        step = (mpf(hi) - mpf(lo)) / n
        points = sorted(set(float(mpf(lo) + i * step) for i in range(n + 1)))
    return points


def _poly(coefficients, powers, t):
    total = mpf(0)
    for c, p in zip(coefficients, powers):
        total += c * t ** p
    return total


def _solve_reference(samples, targets, powers, reference):
    """
    Solve for the coefficients levelling the weighted error on the reference.

    @return: the tuple (coefficients, levelled error)
    @rtype: L{tuple}
    """
    size = len(powers) + 1
    matrix = mpmath.matrix(size, size)
    rhs = mpmath.matrix(size, 1)
    for row, idx in enumerate(reference):
        s = samples[idx]
        for col, p in enumerate(powers):
            matrix[row, col] = s.t ** p
        matrix[row, size - 1] = (-1) ** row / s.weight
        rhs[row] = targets[idx]
    solution = mpmath.lu_solve(matrix, rhs)
    return [solution[i] for i in range(len(powers))], solution[size - 1]


def _exchange(reference, z, errors):
    """
    Insert the index z into the reference, keeping the error signs alternating.

    @return: the new reference
    @rtype: L{list} of L{int}
    """
    sign = mpmath.sign(errors[z])
    ref = list(reference)
    if z < ref[0]:
        if mpmath.sign(errors[ref[0]]) == sign:
            ref[0] = z
        else:
            ref = [z] + ref[:-1]
    elif z > ref[-1]:
        if mpmath.sign(errors[ref[-1]]) == sign:
            ref[-1] = z
        else:
            ref = ref[1:] + [z]
    else:
        for k in range(len(ref) - 1):
            if ref[k] < z < ref[k + 1]:
                if mpmath.sign(errors[ref[k]]) == sign:
                    ref[k] = z
                else:
                    ref[k + 1] = z
                break
    return ref


def remez(samples, targets, powers):
    """
    Weighted minimax fit of targets by a polynomial with the given monomials.

    @param samples: the fit nodes, sorted by polynomial variable
    @type samples: L{list} of L{Sample}
    @param targets: the values to approximate, one per sample
    @type targets: L{list} of L{mpmath.mpf}
    @param powers: the exponents of the monomials to use
    @type powers: L{list} of L{int}
    @return: the tuple (coefficients, sup of the weighted error over the samples)
    @rtype: L{tuple} of (L{list} of L{mpmath.mpf}, L{mpmath.mpf})
    """
    n = len(samples)
    m = len(powers) + 1
    assert n >= m, "Not enough fit nodes"
    reference = sorted(set(int(round(k * (n - 1) / float(m - 1))) for k in range(m)))
    assert len(reference) == m
    coefficients = None
    worst = None
    for _ in range(MAX_ITERATIONS):
        coefficients, levelled = _solve_reference(samples, targets, powers, reference)
        errors = [s.weight * (_poly(coefficients, powers, s.t) - f) for s, f in zip(samples, targets)]
        z = max(range(n), key=lambda i: abs(errors[i]))
        worst = abs(errors[z])
        if z in reference or worst <= abs(levelled) * (1 + mpf(2) ** -20):
            break
        reference = _exchange(reference, z, errors)
    return coefficients, worst


def _round_coefficient(c, as_pair):
    hi = float(c)
    if not as_pair:
        return hi, mpf(hi)
    lo = float(c - mpf(hi))
    return (hi, lo), mpf(hi) + mpf(lo)


def weighted_error(samples, coefficients):
    """
    Return the weighted sup error of exact coefficients over samples.

    @param samples: the nodes
    @type samples: L{list} of L{Sample}
    @param coefficients: the coefficients, constant term first
    @type coefficients: L{list} of L{mpmath.mpf}
    @return: the sup error
    @rtype: L{mpmath.mpf}
    """
    powers = list(range(len(coefficients)))
    return max(abs(s.weight * (_poly(coefficients, powers, s.t) - s.value)) for s in samples)


def fit_samples(name, samples, degree, leading_pair=False, budget=None):
    """
    Fit binary64 coefficients of the given degree to sampled targets.

    @param name: name of the fitted quantity (for errors and reports)
    @type name: L{str}
    @param samples: the fit nodes
    @type samples: L{list} of L{Sample}
    @param degree: the polynomial degree
    @type degree: L{int}
    @param leading_pair: whether the constant term is stored as a (hi, lo) pair
    @type leading_pair: L{bool}
    @param budget: the error budget for the fitting grid, if any
    @type budget: L{float} or L{None}
    @return: the fit
    @rtype: L{FitResult}
    @raises BudgetError: if the rounded fit exceeds the budget
    """
    assert degree >= 0
    with mp.workprec(FIT_PRECISION):
        samples = sorted(samples, key=lambda s: s.t)
        targets = [s.value for s in samples]
        stored = []
        exact = []
        for k in range(degree + 1):
            coefficients, _ = remez(samples, targets, list(range(k, degree + 1)))
            value, exact_value = _round_coefficient(coefficients[0], leading_pair and k == 0)
            stored.append(value)
            exact.append(exact_value)
            targets = [f - exact_value * s.t ** k for f, s in zip(targets, samples)]
        achieved = weighted_error(samples, exact)
    if budget is not None and achieved > budget:
        raise BudgetError(name, float(achieved), budget)
    return FitResult(name, stored, float(achieved))


def certify(fit, samples, budget=None):
    """
    Certify a fit on a dense grid: the bound is the sup of the weighted
    error over the grid times the safety factor.

    @param fit: the fit to certify (updated in place)
    @type fit: L{FitResult}
    @param samples: the dense certification grid, including the interval ends
    @type samples: L{list} of L{Sample}
    @param budget: the error budget, if any
    @type budget: L{float} or L{None}
    @return: the certified bound
    @rtype: L{float}
    @raises BudgetError: if the certified bound exceeds the budget
    """
    with mp.workprec(FIT_PRECISION):
        bound = float(weighted_error(samples, fit.exact_coefficients()) * CERTIFICATION_SAFETY)
    fit.certified_error = bound
    if budget is not None and bound > budget:
        raise BudgetError(fit.name, bound, budget)
    return bound


def fit_minimax(target, interval, degree, grid_bits=None, budget=None, leading_pair=False, n_points=FIT_POINTS):
    """
    Fit a registered target function on an interval.

    @param target: the target function
    @type target: L{crvec.coeffgen.targets.Target}
    @param interval: the interval of grid points (in the target's point domain)
    @type interval: L{tuple} of (L{float}, L{float})
    @param degree: the polynomial degree
    @type degree: L{int}
    @param grid_bits: if given, certify on a grid of 2^grid_bits + 1 points
    @type grid_bits: L{int} or L{None}
    @param budget: the error budget, if any
    @type budget: L{float} or L{None}
    @param leading_pair: whether the constant term is stored as a (hi, lo) pair
    @type leading_pair: L{bool}
    @param n_points: number of fit nodes
    @type n_points: L{int}
    @return: the fit, with certified_error set when certified
    @rtype: L{FitResult}
    @raises BudgetError: if the fit or its certification exceeds the budget
    """
    lo, hi = interval
    assert lo < hi, "Degenerate interval"
    samples = target.samples(chebyshev_points(lo, hi, n_points))
    fit = fit_samples(target.name, samples, degree, leading_pair=leading_pair, budget=budget)
    if grid_bits is not None:
        certify(fit, target.samples(uniform_points(lo, hi, grid_bits)), budget=budget)
    return fit


def coefficient_bits(fit):
    """
    Return the binary64 patterns of the coefficients of a fit.

    @param fit: the fit
    @type fit: L{FitResult}
    @return: one pattern per coefficient, or a pair of patterns for split ones
    @rtype: L{list}
    """
    out = []
    for c in fit.coefficients:
        if isinstance(c, tuple):
            out.append((float_to_bits(c[0]), float_to_bits(c[1])))
        else:
            out.append(float_to_bits(c))
    return out
