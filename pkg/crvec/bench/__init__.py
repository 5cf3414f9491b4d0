"""
Reciprocal throughput benchmarks of the kernels.
"""
from .throughput import (
    BenchOptions, BenchResult, Variant, parse_variant, throughput, spot_check,
    DEFAULT_RANGES, DEFAULT_ELEMENTS, MIN_ELEMENTS, MIN_REPETITIONS,
)
from .report import BenchReport, report_tables, run_bench
