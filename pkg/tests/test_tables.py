import io
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from symlab.tables import (
    FunctionTable,
    GeneratorSpec,
    build_generator,
    convolve_with_ones,
    divisor_sum_oracle,
    sieve_standard,
)


def brute_divisor_k(k: int, n: int) -> int:
    """Count ordered k-tuples with product n by nested enumeration."""
    if k == 1:
        return 1
    total = 0
    for q in range(1, n + 1):
        if n % q == 0:
            total += brute_divisor_k(k - 1, n // q)
    return total


# ---------------------------------------------------------------------------
# generators

def test_delta_one_generator():
    g = build_generator(GeneratorSpec("delta_one"), 5)
    assert list(g.values[1:]) == [1, 0, 0, 0, 0]
    assert g.exact


def test_moebius_generator_values():
    g = build_generator(GeneratorSpec("moebius"), 6)
    assert list(g.values[1:]) == [1, -1, -1, 0, -1, 1]


def test_neg_moebius_log_generator():
    g = build_generator(GeneratorSpec("neg_moebius_log"), 4)
    assert g.values[1] == 0.0
    assert g.values[2] == pytest.approx(math.log(2), abs=0)
    assert g.values[3] == pytest.approx(math.log(3), abs=0)
    assert g.values[4] == 0.0  # squareful index drops out
    assert not g.exact


def test_delta_at_generator_respects_support():
    g = build_generator(GeneratorSpec("delta_at", q0=7), 5)
    assert not np.any(g.values)  # target above the support bound
    g = build_generator(GeneratorSpec("delta_at", q0=3), 5)
    assert g.values[3] == 1.0 and g.values.sum() == 1.0


def test_divisor_k_minus_1_generator():
    unit = build_generator(GeneratorSpec("divisor_k_minus_1", k=1), 6)
    assert list(unit.values[1:]) == [1, 0, 0, 0, 0, 0]
    g = build_generator(GeneratorSpec("divisor_k_minus_1", k=3), 8)
    d = sieve_standard("d", 8)
    assert np.array_equal(g.values, d.values)


def test_generator_spec_parsing():
    assert GeneratorSpec.parse("ones").kind == "ones"
    assert GeneratorSpec.parse("delta_at:5").q0 == 5
    assert GeneratorSpec.parse("divisor_k_minus_1:3").k == 3
    with pytest.raises(ValueError):
        GeneratorSpec.parse("ones:3")
    with pytest.raises(ValueError):
        GeneratorSpec.parse("no_such_kind")
    with pytest.raises(ValueError):
        GeneratorSpec.parse("delta_at:x")


def test_build_generator_rejects_bad_support():
    with pytest.raises(ValueError):
        build_generator(GeneratorSpec("ones"), 0)


# ---------------------------------------------------------------------------
# convolution

def test_ones_convolution_is_divisor_count():
    g = build_generator(GeneratorSpec("ones"), 10)
    f = convolve_with_ones(g, 10)
    assert f[6] == 4.0
    assert f[1] == 1.0


def test_moebius_convolution_is_unit():
    g = build_generator(GeneratorSpec("moebius"), 10)
    f = convolve_with_ones(g, 10)
    assert list(f.values[1:]) == [1, 0, 0, 0, 0, 0, 0, 0, 0, 0]


def test_two_term_generator_convolution():
    g = build_generator(GeneratorSpec("ones"), 2)
    f = convolve_with_ones(g, 10)
    for n in range(1, 11):
        assert f[n] == 1 + (n % 2 == 0)
    assert f[6] == 2.0 and f[7] == 1.0


@pytest.mark.parametrize("kind", ["ones", "moebius", "neg_moebius_log", "delta_one"])
def test_convolution_matches_pointwise_oracle(kind):
    g = build_generator(GeneratorSpec(kind), 60)
    f = convolve_with_ones(g, 400)
    for n in range(1, 401):
        expected = divisor_sum_oracle(n, g)
        if g.exact:
            assert f[n] == expected
        else:
            assert abs(f[n] - expected) <= 1e-12 * (1.0 + abs(f[n]))


@given(
    st.lists(st.integers(min_value=-9, max_value=9), min_size=1, max_size=30),
    st.integers(min_value=1, max_value=200),
)
def test_convolution_oracle_property(gen_values, M):
    vals = np.zeros(len(gen_values) + 1)
    vals[1:] = gen_values
    g = FunctionTable("hyp", vals, exact=True)
    f = convolve_with_ones(g, M)
    for n in (1, M // 2 + 1, M):
        assert f[n] == divisor_sum_oracle(n, g)


# ---------------------------------------------------------------------------
# standard sieves

def test_divisor_triple_count_matches_bruteforce():
    d3 = sieve_standard("d_3", 40)
    assert d3[4] == 6.0 == brute_divisor_k(3, 4)
    for n in range(1, 41):
        assert d3[n] == brute_divisor_k(3, n)


def test_von_mangoldt_values():
    lam = sieve_standard("Lambda", 16)
    assert lam[8] == pytest.approx(math.log(2), abs=0)
    assert lam[6] == 0.0
    assert lam[13] == pytest.approx(math.log(13), abs=0)
    assert lam[1] == 0.0
    assert not lam.exact


def test_moebius_sieve_values():
    mu = sieve_standard("moebius", 30)
    assert mu[6] == 1.0  # two distinct prime factors
    assert mu[30] == -1.0
    assert mu[12] == 0.0


def test_moebius_sq_is_squarefree_indicator():
    musq = sieve_standard("moebius_sq", 50)
    mu = sieve_standard("moebius", 50)
    assert np.array_equal(musq.values, mu.values * mu.values)


def test_d_2_equals_d():
    assert np.array_equal(
        sieve_standard("d_2", 500).values, sieve_standard("d", 500).values
    )


def test_d_0_rejected():
    with pytest.raises(ValueError):
        sieve_standard("d_0", 10)
    with pytest.raises(ValueError):
        sieve_standard("nonsense", 10)


def test_chebyshev_identity_to_1e4():
    # sum of the prime-power table over divisors of n recovers log n
    M = 10_000
    lam = sieve_standard("Lambda", M)
    summed = convolve_with_ones(lam, M)
    ns = np.arange(1, M + 1, dtype=np.float64)
    assert np.max(np.abs(summed.values[1:] - np.log(ns))) <= 1e-9


def test_lambda_sieve_matches_generator_route():
    M = 10_000
    lam = sieve_standard("Lambda", M)
    g = build_generator(GeneratorSpec("neg_moebius_log"), M)
    routed = convolve_with_ones(g, M)
    assert np.max(np.abs(routed.values - lam.values)) <= 1e-9


def test_moebius_divisor_sums_detect_one():
    M = 10_000
    mu = sieve_standard("moebius", M)
    summed = convolve_with_ones(mu, M)
    assert summed[1] == 1.0
    assert not np.any(summed.values[2:])


# ---------------------------------------------------------------------------
# table mechanics

def test_table_is_immutable_and_validated():
    t = sieve_standard("d", 10)
    with pytest.raises(ValueError):
        t.values[3] = 99.0
    with pytest.raises(ValueError):
        FunctionTable("bad", np.array([0.0, 1.5]), exact=True)
    with pytest.raises(ValueError):
        FunctionTable("empty", np.array([0.0]), exact=True)
    with pytest.raises(IndexError):
        t.value(0)
    assert t.length == 10
    assert t.max_abs == 4.0


def test_table_csv_export():
    t = sieve_standard("d", 4)
    out = io.StringIO()
    t.write_csv(out)
    assert out.getvalue() == "n,value\n1,1.0\n2,2.0\n3,2.0\n4,3.0\n"


def test_custom_generator_roundtrip(tmp_path):
    path = tmp_path / "gen.txt"
    path.write_text("# comment\n2 1.5\n5 -2\n\n9 0.25\n")
    g = build_generator(GeneratorSpec("custom", path=str(path)), 6)
    assert list(g.values[1:]) == [0.0, 1.5, 0.0, 0.0, -2.0, 0.0]  # 9 > Q dropped
    assert not g.exact

    # CSV emitted by the package reads back in
    table_csv = tmp_path / "table.csv"
    with open(table_csv, "w") as fh:
        sieve_standard("d", 5).write_csv(fh)
    g2 = build_generator(GeneratorSpec("custom", path=str(table_csv)), 5)
    assert np.array_equal(g2.values, sieve_standard("d", 5).values)
    assert g2.exact


@pytest.mark.parametrize(
    "body, fragment",
    [
        ("1 2 3\n", "expected"),
        ("x 2\n", "bad index"),
        ("2 abc\n", "bad value"),
        ("0 1\n", "index must be >= 1"),
        ("2 1\n2 3\n", "duplicate"),
        ("2 inf\n", "finite"),
    ],
)
def test_custom_generator_rejects_malformed(tmp_path, body, fragment):
    path = tmp_path / "bad.txt"
    path.write_text(body)
    with pytest.raises(ValueError, match=fragment):
        build_generator(GeneratorSpec("custom", path=str(path)), 10)
