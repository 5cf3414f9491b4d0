"""
This subpackage contains the arbitrary-precision oracle: high-precision
evaluation, the Ziv correct rounder and the hard case search.
"""
from .bigfixed import BigFixed
from .evaluate import eval_hp, ln2, FUNCTIONS
from .ziv import ziv_correctly_round, correctly_rounded_bits, ZivResult, LADDER
from .hardcases import hardest_case_search, HardCase
