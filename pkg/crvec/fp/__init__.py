"""
This subpackage contains the bit-level IEEE-754 helpers: value types,
exact rounding into binary32/binary64 and the software arithmetic used by
the reference lane backend.
"""
from .bits import BINARY32, BINARY64, Binary32, Binary64, INCOMPARABLE
from .bits import decompose, compose, ulp32_distance, ulp_distance
from .rounding import RoundingMode, ALL_MODES, DIRECTED_MODES
from .rounding import round_scaled, convert_f64_to_f32, parse_hex_exact
