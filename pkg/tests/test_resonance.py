import itertools
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from germlin import ExactComplex, Spectrum, classify_level_s, enumerate_resonances, in_K1, in_K2
from germlin.resonance import make_spectrum

from helpers import cmul, cpow


def spectrum_of(values, s=None):
    return Spectrum(tuple(ExactComplex(v) for v in values), s)


def pairs_of(report_pairs):
    return {(p.k, p.j) for p in report_pairs}


def brute_resonances(values, N):
    """Every ``(k, j)`` with ``2 <= |k| <= N`` and ``lambda^k == lambda_j``."""
    fr = [(Fraction(v), Fraction(0)) if not isinstance(v, tuple) else v for v in values]
    n = len(fr)
    out = set()
    for k in itertools.product(range(N + 1), repeat=n):
        if not 2 <= sum(k) <= N:
            continue
        pk = (Fraction(1), Fraction(0))
        for p in range(n):
            pk = cmul(pk, cpow(fr[p], k[p]))
        for j, v in enumerate(fr, 1):
            if pk == v:
                out.add((k, j))
    return out


def test_no_resonances_for_two():
    assert enumerate_resonances(spectrum_of([2]), 5) == []


def test_two_four():
    assert pairs_of(enumerate_resonances(spectrum_of([2, 4]), 3)) == {((2, 0), 2)}


def test_two_one_classes():
    got = {(p.k, p.j, p.cls) for p in enumerate_resonances(spectrum_of([2, 1], 1), 3)}
    assert got == {((1, 1), 1, "K1"), ((1, 2), 1, "K1"), ((0, 2), 2, "K2"), ((0, 3), 2, "K2")}
    assert pairs_of(enumerate_resonances(spectrum_of([2, 1], 1), 3)) == brute_resonances([2, 1], 3)


def test_level_s_verdicts():
    assert classify_level_s(spectrum_of([2, 1], 1), 6).level_s_ok
    bad = classify_level_s(spectrum_of([2, 4], 2), 4)
    assert not bad.level_s_ok
    assert (bad.violations[0].k, bad.violations[0].j) == ((2, 0), 2)
    assert classify_level_s(spectrum_of([2, 3], 2), 8).level_s_ok


@pytest.mark.parametrize("s", [1, 2])
def test_two_four_fails_for_every_split(s):
    report = classify_level_s(spectrum_of([2, 4], s), 4)
    assert not report.level_s_ok
    assert ((2, 0), 2) in {(v.k, v.j) for v in report.violations}


def test_sign_flip_mu_has_only_level_one_resonances():
    # mu = -1: K1 needs even y-degree, K2 needs odd y-degree
    report = classify_level_s(spectrum_of([3, -1], 1), 4)
    assert report.level_s_ok
    found = pairs_of(report.pairs)
    assert ((1, 2), 1) in found and ((1, 1), 1) not in found
    assert ((0, 3), 2) in found and ((0, 2), 2) not in found


def test_membership_examples():
    sp = spectrum_of([2, 1], 1)
    assert in_K1((1, 4), sp)
    assert in_K2((0, 2), sp) == (True, 1)
    assert not in_K1((1, 1), spectrum_of([2, 3], 1))


def test_membership_requires_degree_two():
    with pytest.raises(ValueError):
        in_K1((1, 0), spectrum_of([2, 1], 1))


def test_spectrum_validation():
    with pytest.raises(ValueError):
        spectrum_of([2, 0])
    with pytest.raises(ValueError):
        spectrum_of([2, 1], 3)
    assert make_spectrum(["1/2", 3], 1).lambdas == (ExactComplex("1/2"),)


def test_floating_near_resonance_flagged():
    sp = Spectrum((2.0 + 0j, 4.0 + 1e-12j), 2)
    pairs = enumerate_resonances(sp, 2, eps_res=1e-10)
    assert [(p.k, p.j, p.near) for p in pairs] == [((2, 0), 2, True)]


small_values = st.sampled_from([-2, -1, 1, 2, 3, 4, Fraction(1, 2), Fraction(1, 4), 8])


@given(st.lists(small_values, min_size=1, max_size=3), st.integers(2, 5), st.integers(0, 3))
def test_enumeration_matches_brute_force_and_is_monotone(values, N, extra):
    sp = spectrum_of(values)
    small = pairs_of(enumerate_resonances(sp, N))
    assert small == brute_resonances(values, N)
    big = enumerate_resonances(sp, N + extra)
    assert {(p.k, p.j) for p in big if sum(p.k) <= N} == small


@given(st.lists(small_values, min_size=1, max_size=3), st.integers(2, 5))
def test_full_split_means_no_resonances(values, N):
    sp = spectrum_of(values)
    assert classify_level_s(sp, N).level_s_ok == (not enumerate_resonances(sp, N))


@given(st.lists(small_values, min_size=1, max_size=3), st.integers(2, 5))
def test_reported_residuals_vanish(values, N):
    sp = spectrum_of(values)
    for p in enumerate_resonances(sp, N):
        lam = sp.values
        pk = ExactComplex(1)
        for v, e in zip(lam, p.k):
            pk = pk * v**e
        assert pk == lam[p.j - 1]
        assert p.residual == 0


@given(st.lists(small_values, min_size=2, max_size=3), st.data())
def test_violations_follow_the_definition(values, data):
    s = data.draw(st.integers(1, len(values)))
    report = classify_level_s(spectrum_of(values, s), 4)
    mus = [Fraction(v) for v in values[s:]]
    for p in report.pairs:
        mu_pow = Fraction(1)
        for m, e in zip(mus, p.k[s:]):
            mu_pow *= m**e
        xdeg = sum(p.k[:s])
        if p.j <= s:
            allowed = xdeg == 1 and mu_pow == 1
        else:
            allowed = xdeg == 0 and mu_pow in mus
        assert (p in report.violations) == (not allowed)
    assert not report.missing
