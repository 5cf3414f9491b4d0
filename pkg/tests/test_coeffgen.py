"""
Tests for the table generator and the table artifact.
"""
import math
import warnings
from fractions import Fraction

import mpmath
import pytest

from crvec.coeffgen import (
    GenerationOptions, table_sizes, BUDGETS, read_tables, write_tables, verify_tables, gen_all_tables, load_tables_from,
    default_artifact_path,
)
from crvec.coeffgen import artifact
from crvec.coeffgen.artifact import dumps_tables, parse_records, compare_records, HEADER_PREFIX
from crvec.coeffgen.remez import FIT_PRECISION, Sample, fit_samples, certify, chebyshev_points, uniform_points, coefficient_bits
from crvec.coeffgen.tables import (
    exp2_pair, round_to_bits, bin_midpoint, rcp_rule, neg_log_pair, log2f_interval, LOGD_BINS, RCP_BITS, ONE_BINS,
)
from crvec.exceptions import BudgetError, TableMismatchError, MissingArtifactWarning
from crvec.fp.bits import float_to_bits


def _constant_samples(value, points):
    return [Sample(p, mpmath.mpf(p), mpmath.mpf(value), mpmath.mpf(1)) for p in points]


def test_generation_options_defaults():
    options = GenerationOptions()
    assert options.grid_bits == 20
    assert options.certify


def test_fit_degree_zero_of_constant():
    fit = fit_samples("const", _constant_samples(3, chebyshev_points(-1.0, 1.0, 16)), 0)
    assert fit.degree == 0
    assert fit.coefficients == [3.0]
    assert fit.fit_error == 0.0


def test_fit_recovers_exact_polynomial():
    points = chebyshev_points(-0.5, 0.5, 64)
    # p^2/4 needs more than 53 bits
    with mpmath.workprec(FIT_PRECISION):
        samples = [Sample(p, mpmath.mpf(p), 1 + 2 * mpmath.mpf(p) - mpmath.mpf(p) ** 2 / 4, mpmath.mpf(1)) for p in points]
    fit = fit_samples("quad", samples, 2)
    assert fit.coefficients == [1.0, 2.0, -0.25]
    assert fit.fit_error == 0.0


def test_fit_budget_exceeded():
    points = chebyshev_points(0.0, 1.0, 64)
    samples = [Sample(p, mpmath.mpf(p), mpmath.exp(mpmath.mpf(p)), mpmath.mpf(1)) for p in points]
    with pytest.raises(BudgetError) as excinfo:
        fit_samples("exp", samples, 1, budget=2.0 ** -30)
    assert excinfo.value.budget == 2.0 ** -30
    assert excinfo.value.achieved > 2.0 ** -30


def test_fit_leading_pair():
    points = chebyshev_points(-0.1, 0.1, 64)
    with mpmath.workprec(FIT_PRECISION):
        third = mpmath.mpf(1) / 3
        samples = _constant_samples(third, points)
    fit = fit_samples("third", samples, 0, leading_pair=True)
    hi, lo = fit.coefficients[0]
    assert hi == float(third)
    assert lo != 0.0
    assert len(coefficient_bits(fit)[0]) == 2


def test_certify_sets_bound():
    samples = _constant_samples(2, chebyshev_points(-1.0, 1.0, 16))
    fit = fit_samples("const", samples, 0)
    bound = certify(fit, _constant_samples(2, uniform_points(-1.0, 1.0, 6)))
    assert bound == 0.0
    assert fit.certified_error == 0.0
    data = fit.to_dict()
    assert data["degree"] == 0 and data["certified_error"] == "0x0.0p+0"


def test_grid_points():
    points = uniform_points(-1.0, 1.0, 3)
    assert len(points) == 9
    assert points[0] == -1.0 and points[-1] == 1.0
    nodes = chebyshev_points(0.0, 1.0, 10)
    assert len(nodes) == 10
    assert all(0.0 < p < 1.0 for p in nodes)


def test_exp2_pair():
    hi, lo = exp2_pair(8, 16)
    assert float_to_bits(hi) == 0x3ff6a09e667f3bcd
    assert abs(lo) <= math.ulp(hi) / 2
    assert exp2_pair(0, 16) == (1.0, 0.0)


def test_round_to_bits():
    assert round_to_bits(Fraction(1, 3), 2) == 0.375
    assert round_to_bits(Fraction(5, 4), 7) == 1.25
    # ties to even
    assert round_to_bits(Fraction(9, 8), 3) == 1.0


def test_reciprocal_rule():
    assert bin_midpoint(0) == 1 + Fraction(1, 256)
    assert bin_midpoint(64) == Fraction(1, 2) + Fraction(129, 512)
    for i in range(LOGD_BINS):
        rcp = rcp_rule(i)
        # at most 7 significant bits
        assert (math.frexp(rcp)[0] * 2 ** RCP_BITS).is_integer()
        assert abs(Fraction(rcp) * bin_midpoint(i) - 1) < Fraction(1, 64)
    # the bins holding 1 - 2^-53 and 1 + 2^-52
    assert ONE_BINS == (0, LOGD_BINS - 1)
    assert rcp_rule(0) == rcp_rule(LOGD_BINS - 1) == 1.0


def test_neg_log_pair():
    assert neg_log_pair(1.0) == (0.0, 0.0)
    hi, lo = neg_log_pair(0.5)
    assert float_to_bits(hi) == 0x3fe62e42fefa39ef
    with mpmath.workprec(200):
        assert abs(mpmath.mpf(hi) + mpmath.mpf(lo) - mpmath.ln2) < mpmath.ldexp(1, -106)
    # rcp above 1 in [0.75, 1)
    hi, lo = neg_log_pair(rcp_rule(64))
    assert rcp_rule(64) == 85 / 64
    assert hi < 0.0 and abs(lo) <= math.ulp(hi) / 2


def test_log2f_intervals_cover_binade():
    ends = sorted(log2f_interval(j) for j in range(8))
    assert ends[0][0] == 0.75 and ends[-1][1] == 1.5
    for (_, a), (b, _) in zip(ends, ends[1:]):
        assert a == b


def test_tables_content(tables):
    T = tables.exp2f.T
    assert T[0] == 1.0
    assert all(a < b for a, b in zip(T, T[1:]))
    assert float_to_bits(tables.exp2d.T1[8][0]) == 0x3ff6a09e667f3bcd
    for name in ("T1", "T2", "T3"):
        for hi, lo in getattr(tables.exp2d, name):
            assert abs(lo) <= math.ulp(hi) / 2
    assert tables.exp2d.T1[0] == (1.0, 0.0)
    assert tables.logd.L[0] == tables.logd.L[-1] == (0.0, 0.0)
    assert tables.logd.rcp[0] == 1.0
    hi, lo = tables.logd.ln2
    with mpmath.workprec(200):
        assert abs(mpmath.mpf(hi) + mpmath.mpf(lo) - mpmath.ln2) < mpmath.ldexp(1, -104)


def test_table_sizes(tables):
    sizes = table_sizes(tables)
    assert sizes["exp2f"] == 8 * 8 + 7 * 8
    assert sizes["log2f"] == 8 * 8 * 10
    assert set(sizes) == {"exp2f", "log2f", "exp2", "log"}


def test_budgets():
    assert BUDGETS["exp2f"] == 2.0 ** -57
    assert BUDGETS["log2f"] == 2.0 ** -50


def test_artifact_roundtrip(tables, tmp_path):
    path = str(tmp_path / "tables.txt")
    write_tables(tables, path)
    with open(path, "r", encoding="ascii") as fin:
        text = fin.read()
    assert text.startswith(HEADER_PREFIX)
    assert text == dumps_tables(tables)
    loaded = read_tables(path)
    assert loaded.records() == tables.records()
    assert verify_tables(path, tables=tables)


def test_missing_artifact_warns(tables, tmp_path, monkeypatch):
    monkeypatch.setattr(artifact, "gen_all_tables", lambda options: tables)
    with pytest.warns(MissingArtifactWarning, match="not found"):
        assert load_tables_from(str(tmp_path / "missing.txt")) is tables


def test_present_artifact_is_read_quietly(tables, tmp_path, monkeypatch):
    monkeypatch.setattr(artifact, "gen_all_tables", None)
    path = str(tmp_path / "tables.txt")
    write_tables(tables, path)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert load_tables_from(path).records() == tables.records()


def test_artifact_hash_mismatch(tables):
    text = dumps_tables(tables)
    header, _, body = text.partition("\n")
    tampered = header + "\n" + body.replace("exp2f.T.0 3ff0000000000000", "exp2f.T.0 3ff0000000000001")
    with pytest.raises(ValueError):
        parse_records(tampered)
    assert parse_records(tampered, check_hash=False)[0] == ("exp2f.T.0", (0x3ff0000000000001, ))
    with pytest.raises(ValueError):
        parse_records(body)


def test_compare_records():
    expected = [("a", (1, )), ("b", (2, 3))]
    assert compare_records(expected, expected) == []
    differences = compare_records(expected, [("a", (1, )), ("b", (2, 4)), ("c", (5, ))])
    assert differences == [
        ("b", "0000000000000002 0000000000000003", "0000000000000002 0000000000000004"),
        ("c", None, "0000000000000005"),
    ]


def test_verify_tables_detects_corruption(tables, tmp_path):
    path = str(tmp_path / "tables.txt")
    text = dumps_tables(tables)
    with open(path, "w", encoding="ascii") as fout:
        fout.write(text.replace("exp2f.T.0 3ff0000000000000", "exp2f.T.0 3ff0000000000001"))
    with pytest.raises(TableMismatchError) as excinfo:
        verify_tables(path, tables=tables)
    assert excinfo.value.differences[0][0] == "exp2f.T.0"


def test_render_certification(tables):
    text = tables.render()
    assert "exp2f" in text


@pytest.mark.slow
def test_generation_is_deterministic_and_certifies():
    a = gen_all_tables(GenerationOptions(grid_bits=10))
    b = gen_all_tables(GenerationOptions(grid_bits=12, certify=False))
    assert a.records() == b.records()
    for fit in a.fits:
        assert fit.certified_error is not None
        assert fit.certified_error <= BUDGETS[fit.name.partition("[")[0]]
    assert "log2f[7]" in a.render()


@pytest.mark.slow
def test_checked_in_artifact_is_current():
    assert verify_tables(default_artifact_path())
