"""
Tests for the verification harness.
"""
import json
import os
import zipfile

import numpy as np
import pytest

from crvec.fp import Binary32, Binary64, RoundingMode, ALL_MODES
from crvec.verify import (
    VerifyReport, Mismatch, results_match, exhaustive_f32, SweepOptions, make_chunks, boundary_patterns,
    value_range_to_patterns, corpus_check, read_corpus, parse_corpus, default_corpus_path,
    callout_stats, callout_stats_values, consistency_check,
)
from crvec.verify.report import MISMATCH_CORPUS
from crvec.verify.consistency import random_inputs
from crvec.kernels import FAST_PATHS, get_kernel
from crvec.oracle import correctly_rounded_bits
from crvec.vlanes import LaneBatch, KIND_F64


RNE = RoundingMode.NEAREST_EVEN
RD = RoundingMode.TOWARD_NEGATIVE


def _f32(value):
    return Binary32.from_float(value)


def _mismatch(x, mode=RNE, kind="kernel"):
    return Mismatch(_f32(x), mode, _f32(1.0), _f32(2.0), kind=kind)


# ================ reports ================


def test_results_match():
    nan_a = Binary64(0x7ff8000000000000)
    nan_b = Binary64(0x7ff8000000000123)
    assert results_match(nan_a, nan_b)
    assert not results_match(Binary64.from_float(0.0), Binary64.from_float(-0.0))
    assert results_match(Binary64.from_float(1.5), Binary64.from_float(1.5))
    assert not results_match(nan_a, Binary64.from_float(1.5))


def test_mismatch_dict():
    m = Mismatch(_f32(0.5), RD, _f32(1.0), Binary32(0x3f800001))
    d = m.to_dict()
    assert d["mode"] == "rd"
    assert d["distance"] == 1
    assert d["kind"] == "kernel"
    loaded = Mismatch.from_dict(d, Binary32)
    assert (loaded.input, loaded.mode, loaded.got, loaded.expected) == (m.input, m.mode, m.got, m.expected)
    nan = Mismatch(_f32(0.5), RNE, Binary32(0x7fc00000), _f32(1.0))
    assert nan.to_dict()["distance"] is None


def test_report_cap_and_order():
    report = VerifyReport("exp2f", [RNE], mismatch_cap=3)
    for x in (4.0, 1.0, 3.0, 2.0, 0.5):
        report.add_mismatch(_mismatch(x))
    assert report.mismatch_count == 5
    assert [m.input.to_float() for m in report.mismatches] == [0.5, 1.0, 2.0]
    assert not report.passed


def test_report_merge_is_order_independent():
    parts = []
    for i, xs in enumerate([(1.0, 8.0), (2.0, ), (0.25, 4.0)]):
        r = VerifyReport("exp2f", [RNE], mismatch_cap=4)
        r.inputs_tested = 10
        for x in xs:
            r.add_mismatch(_mismatch(x))
        r.add_precision(96)
        r.diagnostics.append("chunk {}".format(i))
        parts.append(r)
    merged = []
    for order in ([0, 1, 2], [2, 0, 1]):
        total = VerifyReport("exp2f", [RNE], mismatch_cap=4)
        for i in order:
            total.merge(parts[i])
        merged.append(total)
    a, b = merged
    assert a.inputs_tested == b.inputs_tested == 30
    assert a.mismatch_count == b.mismatch_count == 5
    assert [m.input for m in a.mismatches] == [m.input for m in b.mismatches]
    assert [m.input.to_float() for m in a.mismatches] == [0.25, 1.0, 2.0, 4.0]
    assert a.precision_histogram == {96: 3}
    assert sorted(a.diagnostics) == sorted(b.diagnostics)


def test_report_merge_modes():
    a = VerifyReport("log2f", [RNE])
    b = VerifyReport("log2f", [RD])
    a.merge(b)
    assert a.modes == sorted([RNE, RD])


def test_report_dict_roundtrip():
    report = VerifyReport("exp2f", [RNE, RD], coverage={"kind": "stride", "stride": 4})
    report.inputs_tested = 1234
    report.add_mismatch(_mismatch(1.0))
    report.add_mismatch(_mismatch(3.0, kind=MISMATCH_CORPUS))
    report.add_precision(0)
    report.add_precision(160)
    report.diagnostics.append("line 3: bad")
    report.wall_time = 1.5

    d = report.to_dict()
    assert d["wall_time"] == 1.5
    assert "wall_time" not in report.to_dict(timing=False)
    assert d["modes"] == [m.short_name for m in sorted([RNE, RD])]
    assert d["precision_histogram"] == {"0": 1, "160": 1}
    loaded = VerifyReport.from_dict(json.loads(report.dumps()))
    assert loaded.to_dict() == d
    assert loaded.disagreement_count == 1
    assert loaded.mismatch_count == 1
    assert not loaded.passed


def test_report_write_and_render(tmp_path):
    report = VerifyReport("log2f", [RNE])
    report.add_mismatch(_mismatch(1.0))
    path = str(tmp_path / "report.json")
    report.write(path)
    with open(path, "r", encoding="utf-8") as fin:
        assert json.load(fin)["mismatch_count"] == 1
    text = report.render()
    assert "log2f" in text
    assert "FAIL" in text


# ================ corpus ================


def test_parse_corpus_diagnostics():
    lines = [
        "# comment",
        "",
        "0x1p+0,0x1p+1",
        "0x1.8p+0  # trailing comment",
        "0x1.00000000000001p+0",
        "1.5",
        "0x1p+0,0x1p+1,0x1p+2",
        "0x1p+0,",
        "-0x1.0c8p+10",
    ]
    records, diagnostics = parse_corpus(lines, "exp2")
    assert [r.lineno for r in records] == [3, 4, 9]
    assert records[0].expected == Binary64.from_float(2.0)
    assert records[1].expected is None
    assert records[1].input.to_float() == 1.5
    assert len(diagnostics) == 4
    assert diagnostics[0].startswith("line 5:")


def test_parse_corpus_binary32():
    records, diagnostics = parse_corpus(["0x1.000002p+0", "0x1.000001p+0"], "exp2f")
    assert len(records) == 1 and isinstance(records[0].input, Binary32)
    assert len(diagnostics) == 1


def test_read_corpus_directory_and_zip(tmp_path):
    corpus_dir = tmp_path / "corpus"
    corpus_dir.mkdir()
    (corpus_dir / "a.txt").write_text("0x1p+0\n0x1.8p+1\n", encoding="utf-8")
    (corpus_dir / "b.txt").write_text("bogus\n-0x1p-1\n", encoding="utf-8")
    (corpus_dir / "ignored.dat").write_text("0x1p+5\n", encoding="utf-8")

    records, diagnostics = read_corpus(str(corpus_dir), "exp2")
    assert [r.input.to_float() for r in records] == [1.0, 3.0, -0.5]
    assert len(diagnostics) == 1 and "b.txt" in diagnostics[0]

    records, diagnostics = read_corpus(str(corpus_dir / "a.txt"), "exp2")
    assert len(records) == 2 and diagnostics == []

    archive = str(tmp_path / "corpus.zip")
    with zipfile.ZipFile(archive, "w") as zf:
        zf.writestr("hard/exp2.txt", "0x1p-1,0x1.6a09e667f3bcdp+0\n")
    records, diagnostics = read_corpus("hard/exp2.txt", "exp2", fs_url="zip://" + archive)
    assert len(records) == 1
    assert records[0].expected.bits == 0x3ff6a09e667f3bcd


@pytest.mark.parametrize("f_id", ["exp2", "log"])
def test_shipped_corpus_passes(f_id):
    path = default_corpus_path(f_id)
    assert os.path.exists(path)
    report = corpus_check(path, f_id, [RNE, RD])
    assert report.diagnostics == []
    assert report.passed, report.render()
    assert report.inputs_tested == 2 * report.coverage["records"]
    assert sum(report.precision_histogram.values()) == report.inputs_tested
    assert 0 in report.precision_histogram
    # the constructed hard cases go through the oracle
    assert sum(v for k, v in report.precision_histogram.items() if k > 0) >= 4


# results lying far inside the fast path's error radius of a rounding boundary
CONSTRUCTED_HARD_CASES = [
    ("exp2", "0x1.71547652b82fep-53", RNE),
    ("exp2", "-0x1.71547652b82fep-54", RNE),
    ("exp2", "0x1.71547652b82fep-52", RoundingMode.TOWARD_ZERO),
    ("exp2", "-0x1.71547652b82fep-53", RoundingMode.TOWARD_POSITIVE),
    ("log", "0x1.0000000010100p+0", RNE),
    ("log", "0x1.0000000015500p+0", RNE),
    ("log", "0x1.000000001ff00p+0", RNE),
    ("log", "0x1.ffffffffdfe00p-1", RNE),
    ("log", "0x1.0000000001000p+0", RD),
]


@pytest.mark.parametrize("f_id, text, mode", CONSTRUCTED_HARD_CASES)
def test_hard_cases_reach_the_callout(tables, f_id, text, mode):
    records, _ = read_corpus(default_corpus_path(f_id), f_id)
    x = float.fromhex(text)
    assert x in [r.input.to_float() for r in records]
    batch = LaneBatch.from_floats(np.full(8, x), 8, KIND_F64)
    assert FAST_PATHS[f_id](batch, mode, tables=tables).decided.count() == 0
    kernel, _ = get_kernel(f_id)
    expected = correctly_rounded_bits(f_id, Binary64.from_float(x), mode=mode)
    assert kernel(batch, mode, tables=tables).to_bits() == [expected] * 8


def test_corpus_disagreement_is_reported_separately(tmp_path):
    path = str(tmp_path / "exp2.txt")
    with open(path, "w", encoding="utf-8") as fout:
        # exp2(1) is 2, not 3
        fout.write("0x1p+0,0x1.8p+1\n0x1p-1,0x1.6a09e667f3bcdp+0\n")
    report = corpus_check(path, "exp2", ALL_MODES)
    assert report.mismatch_count == 0
    assert report.disagreement_count == 1
    assert report.mismatches[0].kind == MISMATCH_CORPUS
    assert not report.passed


def test_corpus_with_only_diagnostics(tmp_path, capsys):
    path = str(tmp_path / "log.txt")
    with open(path, "w", encoding="utf-8") as fout:
        fout.write("not a number\n")
    report = corpus_check(path, "log", [RNE])
    assert report.inputs_tested == 0
    assert len(report.diagnostics) == 1
    assert report.passed
    # skipped lines are shown even without a reporter
    assert "WARNING: Corpus line skipped" in capsys.readouterr().err


# ================ sweeps ================


def test_value_range_to_patterns():
    assert value_range_to_patterns(1.0, 2.0) == [(0x3f800000, 0x40000001)]
    assert value_range_to_patterns(-2.0, -1.0) == [(0xbf800000, 0xc0000001)]
    assert value_range_to_patterns(-1.0, 1.0) == [(0x00000000, 0x3f800001), (0x80000000, 0xbf800001)]
    # bounds are rounded inward
    start, stop = value_range_to_patterns(0.1, 0.2)[0]
    assert Binary32(start).to_float() >= 0.1 and Binary32(stop - 1).to_float() <= 0.2
    # binary32(0.2) lies above 0.2, binary32(0.7) below 0.7
    assert stop == 0x3e4ccccd
    assert value_range_to_patterns(0.7, 1.0) == [(0x3f333334, 0x3f800001)]
    assert value_range_to_patterns(-0.2, -0.1) == [(0xbdcccccd, 0xbe4ccccd)]


def test_boundary_patterns():
    patterns = boundary_patterns("exp2f", radius=2)
    zero = _f32(0.0).bits
    assert set(range(zero, zero + 3)) <= set(patterns.tolist())
    assert len(patterns) == len(np.unique(patterns))
    assert np.all(np.diff(patterns.astype(np.int64)) > 0)
    log_patterns = boundary_patterns("log2f", radius=1)
    assert _f32(2.0).bits in log_patterns.tolist()


def test_make_chunks():
    chunks = make_chunks("exp2f", [RNE], stride=16, ranges=[(1.0, 2.0)], boundaries=True, radius=1, extra_random=100, chunk_bits=16)
    strided = [c for c in chunks if isinstance(c.patterns, range)]
    explicit = [c for c in chunks if not isinstance(c.patterns, range)]
    assert sum(len(c) for c in strided) == len(range(0x3f800000, 0x40000001, 16))
    assert all(len(c) <= 1 << 16 for c in chunks)
    assert sum(len(c) for c in explicit) == len(boundary_patterns("exp2f", 1)) + 100
    assert [c.index for c in chunks] == list(range(len(chunks)))
    assert strided[0].pattern_array()[1] == 0x3f800010


def test_sweep_with_stride():
    options = SweepOptions(jobs=0, chunk_bits=10)
    report = exhaustive_f32("exp2f", [RNE, RD], stride=1 << 20, ranges=[(-4.0, 4.0)], options=options)
    n = sum(len(range(a, b, 1 << 20)) for a, b in value_range_to_patterns(-4.0, 4.0))
    assert report.inputs_tested == 2 * n
    assert report.coverage["kind"] == "stride"
    assert report.passed, report.render()


def test_sweep_boundaries_and_random():
    report = exhaustive_f32("log2f", [RNE], stride=1 << 24, boundaries=True, radius=2, extra_random=256, seed=3)
    assert report.coverage["random"] == 256
    assert report.coverage["boundary_radius"] == 2
    assert report.passed, report.render()


def test_sweep_worker_logs(tmp_path):
    options = SweepOptions(jobs=0, log_directory=str(tmp_path))
    report = exhaustive_f32("exp2f", [RNE], stride=1 << 26, options=options)
    assert report.passed
    logs = os.listdir(str(tmp_path))
    assert logs == ["log_worker_0.txt"]


@pytest.mark.slow
def test_sweep_in_worker_processes():
    options = SweepOptions(jobs=2, chunk_bits=12)
    report = exhaustive_f32("log2f", ALL_MODES, stride=1 << 16, options=options)
    assert report.inputs_tested == 4 * (1 << 16)
    assert report.passed, report.render()


# ================ callouts ================


def test_callout_stats_uniform():
    stats = callout_stats("exp2", -20.0, 20.0, 4100, seed=1, width=8)
    assert stats.n == 4096
    assert sum(stats.histogram.values()) == 512
    assert stats.rate < 2.0 ** -8
    d = stats.to_dict(timing=False)
    assert "wall_time" not in d and d["n"] == 4096
    assert json.loads(stats.dumps())["function"] == "exp2"
    assert "exp2" in stats.render()


def test_callout_stats_subnormal_results():
    stats = callout_stats_values("exp2", np.full(16, -1030.5), width=8)
    assert stats.undecided == 16
    assert stats.histogram == {8: 2}
    assert stats.disrupted_batches == 2
    assert stats.rate == 1.0


def test_callout_stats_log_and_errors():
    stats = callout_stats("log", 0.5, 2.0, 1024, width=4)
    assert stats.n == 1024 and stats.rate < 2.0 ** -8
    with pytest.raises(KeyError):
        callout_stats_values("exp2f", np.ones(8))


def test_callout_stats_log_near_one():
    stats = callout_stats("log", 0.96, 1.04, 4096, seed=3, width=8)
    assert stats.undecided <= 4


@pytest.mark.slow
@pytest.mark.parametrize("f_id, lo, hi", [
    ("exp2", -20.0, 20.0),
    ("log", 0.5, 2.0),
    ("log", 0.125, 8.0),
])
def test_callout_rate_at_scale(f_id, lo, hi):
    # eps = 2^-66 leaves between 2^-13 and 2^-12 of the lanes undecided
    stats = callout_stats(f_id, lo, hi, 1 << 18, seed=4, width=8)
    assert stats.rate < 2.0 ** -11


# ================ consistency ================


def test_random_inputs_are_seeded():
    a = random_inputs("exp2f", 100, 5)
    b = random_inputs("exp2f", 100, 5)
    assert a.dtype == np.uint32
    assert np.array_equal(a, b)
    assert random_inputs("log", 10, 5).dtype == np.uint64


@pytest.mark.parametrize("f_id", ["exp2f", "log2f", "exp2", "log"])
def test_consistency(f_id):
    report = consistency_check(f_id, 48, seed=2, modes=[RNE, RD], scalar_lanes=16)
    assert report.passed, report.render()
    assert sorted(report.coverage["checks"]) == ["backend", "scalar", "width"]
    assert report.coverage["scalar_lanes"] == 16
