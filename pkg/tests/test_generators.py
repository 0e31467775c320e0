import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from palincf.cf_core import convergent_table
from palincf.generators import (
    ApproxOrderFunction, BakerSpec, SpecParseError, TableExhausted, baker_spec_from_runs, baker_word,
    corrupt_large_quotient, extend_stage, misplace_large_quotient, parse_spec, run_length_decode,
    run_length_encode, theorem5_word, thue_morse_word, truncate,
)
from palincf.words import palindromic_prefix_lengths


def tm_oracle(a, b, N):
    # a at positions n = 1..N whose binary digit sum is odd
    return [a if sum(map(int, format(n, "b"))) % 2 else b for n in range(1, N + 1)]


@pytest.mark.parametrize("a,b,N", [(1, 2, 8), (2, 1, 33), (3, 7, 1000)])
def test_thue_morse_matches_digit_sum(a, b, N):
    assert thue_morse_word(a, b, N) == tm_oracle(a, b, N)


def test_thue_morse_prefix_example():
    assert thue_morse_word(1, 2, 8) == [1, 1, 2, 1, 2, 2, 1, 1]


def test_thue_morse_palindromic_prefixes():
    w = thue_morse_word(1, 2, 4 ** 7)
    assert palindromic_prefix_lengths(w) == [1] + [4 ** k - 2 for k in range(1, 8)]


@given(st.lists(st.integers(1, 4), max_size=60))
def test_run_length_round_trip(w):
    runs = run_length_encode(w)
    assert run_length_decode(runs) == w
    assert all(runs[i][0] != runs[i + 1][0] for i in range(len(runs) - 1))


def test_baker_word_explicit():
    spec = BakerSpec(1, 2, lambdas=(2, 3, 1))
    assert baker_word(spec, 6) == [1, 1, 2, 2, 2, 1]
    assert baker_word(spec, 4) == [1, 1, 2, 2]
    with pytest.raises(ValueError):
        baker_word(spec, 7)


def test_baker_gamma_terms():
    assert BakerSpec(1, 2, gamma=Fraction(3, 2)).lambda_terms(8) == [1, 2, 3, 5, 8, 12, 18, 27]
    assert BakerSpec(1, 2, gamma=Fraction(1)).lambda_terms(4) == [1, 1, 1, 1]
    assert BakerSpec(1, 2, gamma=2, seed=3).lambda_terms(4) == [3, 6, 12, 24]


@given(st.lists(st.integers(1, 9), min_size=2, max_size=12))
def test_baker_spec_from_runs_round_trip(lams):
    spec = BakerSpec(3, 5, lambdas=tuple(lams))
    w = baker_word(spec, sum(lams))
    assert baker_spec_from_runs(w) == spec


@pytest.mark.parametrize("kw", [dict(a=1, b=1, gamma=2), dict(a=1, b=2), dict(a=1, b=2, gamma=0),
                                dict(a=1, b=2, lambdas=(1, 0)), dict(a=0, b=2, gamma=2)])
def test_baker_spec_rejects_bad_input(kw):
    with pytest.raises(ValueError):
        BakerSpec(**kw)


# approximation-order functions

def test_power_family_validation():
    with pytest.raises(ValueError):
        ApproxOrderFunction.power(1, 2)
    with pytest.raises(ValueError):
        ApproxOrderFunction.power(0, 3)


@settings(max_examples=80)
@given(st.integers(1, 10**12), st.sampled_from([(1, 3), (Fraction(1, 2), Fraction(5, 2)), (3, 4)]))
def test_ceil_inv_psi_matches_high_precision(q, cs):
    c, s = cs
    phi = ApproxOrderFunction.power(c, s)
    mpmath.mp.prec = 300
    psi = mpmath.mpf(Fraction(c).numerator) / Fraction(c).denominator * mpmath.mpf(q) ** (
        2 - mpmath.mpf(Fraction(s).numerator) / Fraction(s).denominator)
    b = phi.ceil_inv_psi(q)
    eps = mpmath.mpf(2) ** -250  # oracle rounding; 1/Psi is often an exact integer
    assert b - 1 < 1 / psi + eps and 1 / psi - eps <= b


@given(st.fractions(min_value=1, max_value=10**6, max_denominator=1000),
       st.fractions(min_value=Fraction(1, 1000), max_value=10, max_denominator=1000))
def test_psi_at_most_is_exact(x, bound):
    phi = ApproxOrderFunction.power(2, 3)
    assert phi.psi_at_most(x, bound) == (2 / x <= bound)


def test_table_function():
    phi = ApproxOrderFunction.from_table([(1, 1), (10, Fraction(1, 1000)), (100, Fraction(1, 10**6))])
    assert phi.psi_enclosure(10).contains(Fraction(1, 10))
    iv = phi.phi_enclosure(50)
    assert iv.lo <= Fraction(1, 50 ** 3) * 10 and iv.hi >= Fraction(1, 50 ** 3)
    with pytest.raises(TableExhausted):
        phi.phi_enclosure(1000)
    with pytest.raises(ValueError):
        ApproxOrderFunction.from_table([(1, Fraction(1, 10)), (2, 1)])


# construction oracle: float-free re-run of the stated rules with mpmath

def construction_oracle(c, s, stages):
    mpmath.mp.prec = 600
    c, s = mpmath.mpf(c), mpmath.mpf(s)

    def psi(x):
        return c * mpmath.mpf(x) ** (2 - s)

    def least(lower, bound):
        n = lower + 1
        # Psi non-increasing: Psi((3/2)^(n-1)) <= bound covers every index >= n - 1
        while psi((mpmath.mpf(3) / 2) ** (n - 1)) > bound:
            n += 1
        return n

    b = []
    checkpoints = []
    for j in range(stages):
        if j == 0:
            n = least(5, mpmath.mpf(1) / 10)
        else:
            lower = checkpoints[0] if j == 1 else 2 * checkpoints[-1]
            n = least(lower, 1 / (10 * mpmath.mpf(b[checkpoints[-1] - 1])))
        b += [1] * (n - 1 - len(b))
        q = convergent_table(b).q[-1]
        b.append(int(mpmath.ceil(1 / psi(q))))
        checkpoints.append(n)
        if j >= 1:
            b += b[:n - 1][::-1]
    return b, checkpoints


def test_cubic_anchor_values():
    st5 = theorem5_word(ApproxOrderFunction.power(1, 3), 3)
    assert st5.checkpoints == (7, 14, 29)
    assert st5.completions == (27, 57)
    assert [st5.large(j) for j in (1, 2, 3)] == [13, 2405, 22488231481]
    assert st5.q_before[0] == 13
    # q_6 of six ones is 13, so b_7 = ceil(13^3 / 13^2) = 13
    assert convergent_table([1] * 6).q[-1] == 13


@pytest.mark.parametrize("c,s,stages", [(1, 3, 3), (1, 4, 3), (Fraction(1, 3), Fraction(7, 2), 3), (5, 3, 2)])
def test_construction_matches_oracle(c, s, stages):
    st5 = theorem5_word(ApproxOrderFunction.power(c, s), stages)
    b, cps = construction_oracle(mpmath.mpf(Fraction(c).numerator) / Fraction(c).denominator,
                                 mpmath.mpf(Fraction(s).numerator) / Fraction(s).denominator, stages)
    assert list(st5.checkpoints) == cps
    assert list(st5.quotients) == b


@pytest.mark.parametrize("c,s", [(1, 3), (1, 5), (Fraction(1, 2), Fraction(5, 2))])
def test_construction_invariants(c, s):
    st5 = theorem5_word(ApproxOrderFunction.power(c, s), 3)
    pals = set(palindromic_prefix_lengths(st5.quotients))
    assert all(m in pals for m in st5.completions)
    assert all(m == 2 * n - 1 for m, n in zip(st5.completions, st5.checkpoints[1:]))
    larges = [st5.large(j) for j in range(1, st5.stages + 1)]
    assert larges[0] >= 10
    assert all(larges[i + 1] >= 10 * larges[i] for i in range(len(larges) - 1))
    n = st5.checkpoints
    assert n[0] >= 6 and n[1] > n[0] and all(n[j + 1] > 2 * n[j] for j in range(1, len(n) - 1))
    t = convergent_table(st5.quotients)
    assert st5.tail == (t.p[-2], t.q[-2], t.p[-1], t.q[-1])
    assert list(st5.q_before) == [t.q[m - 1] for m in n]


def test_extend_and_truncate():
    phi = ApproxOrderFunction.power(1, 3)
    two = theorem5_word(phi, 2)
    three = extend_stage(two)
    assert three.quotients[:two.length] == two.quotients
    assert truncate(two, 100) == list(theorem5_word(phi, 4).quotients[:100])
    with pytest.raises(ValueError):
        theorem5_word(phi, 0)


def test_negative_control_helpers():
    st5 = theorem5_word(ApproxOrderFunction.power(1, 3), 3)
    q = corrupt_large_quotient(st5, 2)
    assert q[13] == 2404 and q[:13] == st5.quotients[:13]
    m = misplace_large_quotient(st5, 2)
    assert m[13] == 1 and m[14] == 2405


def test_table_construction_runs_out():
    rows = [(Fraction(3, 2) ** k, Fraction(2, 3) ** (3 * k)) for k in range(0, 40)]
    phi = ApproxOrderFunction.from_table(rows)
    with pytest.raises(TableExhausted, match="largest completed stage"):
        theorem5_word(phi, 4)


# spec grammar

@pytest.mark.parametrize("text,canonical,first", [
    ("explicit:[1,2,3]", "explicit:[1,2,3]", [1, 2, 3]),
    ("runs:1^3,2^2", "runs:1^3,2^2", [1, 1, 1, 2, 2]),
    (" tm( 1 , 2 ) ", "tm(1,2)", [1, 1, 2, 1]),
    ("baker(1,2;lambdas=2,3,5)", "baker(1,2;lambdas=2,3,5)", [1, 1, 2, 2, 2]),
    ("baker(1,2;gamma=3/2,seed=2)", "baker(1,2;gamma=3/2,seed=2)", [1, 1, 2, 2, 2]),
    ("thm5(1,3)", "thm5(1,3)", [1, 1, 1, 1, 1, 1, 13]),
])
def test_parse_spec(text, canonical, first):
    spec = parse_spec(text)
    assert spec.canonical() == canonical
    assert parse_spec(spec.canonical()).canonical() == canonical
    assert spec.word(N=len(first)) == first


@pytest.mark.parametrize("text,pos", [
    ("tm(1,1)", 5), ("explicit:[1,0]", 12), ("runs:1^0", 7), ("baker(1,2;beta=2)", 10),
    ("foo(1)", 0), ("tm(1,2", 6), ("thm5(1,2)", None),
])
def test_parse_errors_report_position(text, pos):
    with pytest.raises((SpecParseError, ValueError)) as exc:
        parse_spec(text)
    if pos is not None:
        assert isinstance(exc.value, SpecParseError)
        assert exc.value.pos == pos


def test_finite_spec_length_limit():
    spec = parse_spec("runs:1^3,2^2")
    assert spec.finite_length == 5
    with pytest.raises(ValueError):
        spec.word(N=6)
    assert parse_spec("tm(1,2)").finite_length is None


def test_thm5_spec_stages():
    w = parse_spec("thm5(1,3)").word(stages=2)
    assert len(w) == 27 and w == w[::-1]
    assert math.isclose(len(parse_spec("thm5(1,3)").word(N=40)), 40)
