"""
Search for the binary32 inputs whose function value lies closest to a
rounding boundary.

Boundaries of all rounding modes together form the grid of binary32
half-ulps (midpoints and representable values), so a single distance per
input covers every mode.
"""
from ..fp.bits import BINARY32, Binary32, is_finite
from .evaluate import eval_hp


SEARCH_PRECISION = 160


class HardCase(object):
    """
    An input together with the distance of its function value to the
    nearest binary32 rounding boundary.

    @ivar input: the argument
    @type input: L{crvec.fp.bits.Binary32}
    @ivar distance: the distance in units of 2^-160 relative to the result's binade
    @type distance: L{int}
    @ivar exact: whether the function value is exact (and thus on a boundary)
    @type exact: L{bool}
    """
    __slots__ = ("input", "distance", "exact")

    def __init__(self, input, distance, exact=False):
        self.input = input
        self.distance = distance
        self.exact = exact

    def __repr__(self):
        return "HardCase({}, distance={}{})".format(self.input.hex(), self.distance, (", exact" if self.exact else ""))

    def to_dict(self):
        """
        Return a dict describing this hard case.

        @return: a json-serializable dict
        @rtype: L{dict}
        """
        return {
            "input": self.input.hex(),
            "bits": "0x{:08x}".format(self.input.bits),
            "distance": self.distance,
            "exact": self.exact,
        }


def _in_domain(f_id, x):
    if not is_finite(x.bits, BINARY32):
        return False
    if f_id == "exp2":
        # results outside the binary32 range are saturated, not hard
        return -151.0 < x.to_float() < 128.0
    return x.to_float() > 0.0


def boundary_distance(approx, prec=SEARCH_PRECISION):
    """
    Return the distance of a high-precision value to the nearest binary32 half-ulp grid point.

    @param approx: the value
    @type approx: L{crvec.oracle.bigfixed.BigFixed}
    @param prec: the unit of the distance is 2^-prec relative to the binade
    @type prec: L{int}
    @return: the distance
    @rtype: L{int}
    """
    top = max(approx.top_exponent, BINARY32.emin)
    half_ulp = top - BINARY32.precision
    unit = top - prec
    # value in units of 2^unit
    shift = approx.exponent - unit
    m = (approx.mantissa << shift) if shift >= 0 else (approx.mantissa >> -shift)
    grid = 1 << (half_ulp - unit)
    r = m % grid
    return min(r, grid - r)


def hardest_case_search(f_id, lo_bits, hi_bits, prec=SEARCH_PRECISION):
    """
    Rank all binary32 inputs in a pattern range by boundary distance.

    @param f_id: "exp2" or "log2"
    @type f_id: L{str}
    @param lo_bits: first binary32 pattern of the range
    @type lo_bits: L{int}
    @param hi_bits: last binary32 pattern of the range (inclusive)
    @type hi_bits: L{int}
    @param prec: precision of the distance unit
    @type prec: L{int}
    @return: the tuple (ranked, exact) of inexact hard cases sorted by
        ascending distance (ties in input order) and inputs with exact values
    @rtype: L{tuple} of (L{list} of L{HardCase}, L{list} of L{HardCase})
    """
    ranked = []
    exact = []
    for bits in range(lo_bits, hi_bits + 1):
        x = Binary32(bits)
        if not _in_domain(f_id, x):
            continue
        approx = eval_hp(f_id, x, prec + 32)
        if approx.exact:
            exact.append(HardCase(x, 0, exact=True))
            continue
        ranked.append(HardCase(x, boundary_distance(approx, prec)))
    ranked.sort(key=lambda case: case.distance)
    return ranked, exact
