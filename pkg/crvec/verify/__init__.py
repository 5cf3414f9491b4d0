"""
This subpackage contains the verification harness: sweeps of the binary32
kernels against the oracle, hard-case corpus replay, callout statistics
and consistency checks.
"""
from .report import VerifyReport, Mismatch, results_match
from .sweep import exhaustive_f32, SweepOptions, make_chunks, boundary_patterns, value_range_to_patterns
from .corpus import corpus_check, read_corpus, parse_corpus, HardCaseRecord, default_corpus_path
from .callouts import callout_stats, callout_stats_values, CalloutStats
from .consistency import consistency_check
