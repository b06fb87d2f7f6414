import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from critexp import prox
from critexp.automaton import GroupWord, builtin_f2_abc, builtin_f2_standard, enumerate_cycles, evaluate_path
from critexp.pressure import BudgetExceeded, NonPositiveWeight
from critexp.rep import (Representation, approximating_exponents, busemann_depth_k_exponent,
                         certified_epsilon_range, certify_separation, counting_fit, cycle_lengths,
                         cycle_matrix, depth_k_potential, exponent_bounds, generator_values,
                         generator_weights, length_phi, limit_cone_deviation, orbit_lengths,
                         periodic_exponent, schottky_sl2, thurston_estimate)
from critexp.weyl import functional_from_roots, r_epsilon, simple_root

from conftest import pants_at, random_sl

PHI = functional_from_roots(1, 1)
ALPHA = simple_root(1, 2)
ABC = builtin_f2_abc()
STD = builtin_f2_standard()


def test_representation_basics():
    rep = Representation({"a": 2 * np.eye(2) @ np.diag([3, 1 / 3]), "b": [[1, 1], [0, 1]]})
    assert rep.symbols == ("a", "b")
    assert set(rep.all_symbols) == {"a", "a'", "b", "b'"}
    assert np.allclose(rep.normalized("a"), np.diag([3, 1 / 3]))
    assert np.allclose(rep.normalized("a'"), np.diag([1 / 3, 3]))
    assert rep.max_inverse_defect() < 1e-14
    with pytest.raises(KeyError):
        rep.matrix("z")
    with pytest.raises(ValueError):
        Representation({"a'": np.eye(2)})
    with pytest.raises(ValueError):
        Representation({"a": np.eye(2), "b": np.eye(3)})
    with pytest.raises(ValueError):
        Representation({"a": np.eye(4)})
    with pytest.raises(ValueError):
        Representation({"a": [[np.nan, 0], [0, 1]]})
    again = Representation.from_json('{"n": 2, "generators": {"a": [[3, 0], [0, 0.3333333333333333]]}}')
    assert again.n == 2
    with pytest.raises(ValueError):
        Representation.from_dict({"n": 3, "generators": {"a": [[1, 0], [0, 1]]}})
    with pytest.raises(ValueError):
        Representation.from_dict({})


@given(st.integers(0, 2**32 - 1), st.lists(st.sampled_from(["a", "b", "a'", "b'"]), max_size=8))
def test_evaluate_matches_plain_product(seed, word):
    rng = np.random.default_rng(seed)
    a, b = random_sl(3, rng), random_sl(3, rng)
    rep = Representation({"a": a, "b": b})
    plain = np.eye(3)
    table = {"a": a, "b": b, "a'": np.linalg.inv(a), "b'": np.linalg.inv(b)}
    for s in word:
        plain = plain @ table[s]
    assert np.allclose(rep.evaluate(word).to_array(), plain, rtol=1e-8, atol=1e-8 * np.abs(plain).max())


def test_schottky_generators():
    rep = schottky_sl2(10.0)
    vals = generator_values(rep, ALPHA)
    assert all(v == pytest.approx(10.0, abs=1e-12) for v in vals.values())
    hk, hl = approximating_exponents(rep, ALPHA, STD)
    assert hk == pytest.approx(math.log(3) / 10, abs=1e-12)
    assert hl == pytest.approx(math.log(3) / 10, abs=1e-12)


def test_generator_weight_convention():
    rep = pants_at(4.0).rep
    w = generator_weights(rep, PHI, ABC)
    for e in ABC.edges:
        expected = PHI(prox.cartan_projection(np.linalg.inv(rep.raw[e.label[0]])
                                              if not e.label.endswith("'") else rep.raw[e.label[0]]))
        assert w[e.id] == pytest.approx(expected, rel=1e-9)
    with pytest.raises(NonPositiveWeight):
        generator_weights(rep, functional_from_roots(-1, 0), ABC)
    with pytest.raises(ValueError):
        generator_values(rep, PHI, kind="iwasawa")


def test_cycle_matrix_is_inverse_of_evaluation():
    rep = pants_at(0.5).rep
    for c in enumerate_cycles(ABC, 3):
        word = evaluate_path(ABC, c.edges)
        lhs = cycle_matrix(rep, ABC, c.edges).to_array()
        rhs = np.linalg.inv(rep.evaluate(word).to_array())
        assert np.allclose(lhs, rhs, rtol=1e-6, atol=1e-6 * np.abs(rhs).max())


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=30)
def test_conjugation_invariance(seed):
    rng = np.random.default_rng(seed)
    rep = pants_at(3.0).rep
    h = random_sl(3, rng)
    conj = rep.conjugate(h)
    w = ["a", "b'", "c", "a"]
    assert length_phi(conj, PHI, w) == pytest.approx(length_phi(rep, PHI, w), rel=1e-6)
    c = next(iter(enumerate_cycles(ABC, 5)))
    assert cycle_lengths(conj, PHI, ABC, [c])[0][1] == pytest.approx(cycle_lengths(rep, PHI, ABC, [c])[0][1], rel=1e-6)


def test_certification_examples():
    fail0 = certify_separation(pants_at(0.0).rep, ABC, 0.1)
    assert not fail0.passed and "not proximal" in fail0.failure
    ok = certify_separation(pants_at(6.0).rep, ABC, 0.1)
    assert ok.passed and ok.failure is None
    assert ok.min_pair_distance >= 0.2
    # each vertex has one in-label and four out-labels, checked in both representations
    assert len(ok.pair_distances) == 6 * 1 * 4 * 2
    d = ok.to_dict()
    assert d["passed"] and d["certified_range"][0] < 0.1 < d["certified_range"][1]


def test_certification_threshold_monotone():
    passed = [certify_separation(pants_at(float(t)).rep, ABC, 0.1).passed for t in range(10)]
    assert passed == [False, False, False] + [True] * 7


@pytest.mark.parametrize("t", [3.0, 5.0, 8.0])
def test_epsilon_range_is_exact(t):
    rep = pants_at(t).rep
    lo, hi = certified_epsilon_range(rep, ABC)
    assert 0 < lo < hi
    assert certify_separation(rep, ABC, lo).passed
    assert certify_separation(rep, ABC, 0.5 * (lo + hi)).passed
    assert not certify_separation(rep, ABC, lo * (1 - 1e-9)).passed
    assert not certify_separation(rep, ABC, hi).passed


def test_pair_check_failure_message():
    rep = pants_at(3.0).rep
    lo, hi = certified_epsilon_range(rep, ABC)
    cert = certify_separation(rep, ABC, min(hi * 1.01, math.pi / 4 - 1e-9))
    assert not cert.passed and cert.failure


def test_schottky_certification():
    lo, hi = certified_epsilon_range(schottky_sl2(100.0), STD)
    assert lo < 1e-7 and hi == pytest.approx(math.pi / 8)


@pytest.mark.parametrize("t", [4.0, 6.0, 8.0])
def test_exponent_bounds_bracket_depth_estimates(t):
    rep = pants_at(t).rep
    rpt = exponent_bounds(rep, PHI, ABC, 0.1)
    assert rpt.certified and rpt.valid and rpt.valid_lambda
    assert rpt.phi_r_eps == pytest.approx(PHI(r_epsilon(0.1)))
    depths = [busemann_depth_k_exponent(rep, PHI, ABC, k) for k in (1, 2, 3)]
    assert abs(depths[2] - depths[1]) < 1e-8 * depths[1]
    assert abs(depths[0] - depths[1]) < 1e-4 * depths[1]
    assert rpt.lower <= depths[1] <= rpt.upper
    assert rpt.h_lambda <= rpt.upper_lambda


def test_exponent_bounds_uncertified():
    rpt = exponent_bounds(pants_at(1.0).rep, PHI, ABC, 0.1)
    assert not rpt.certified and rpt.upper is None and rpt.upper_lambda is None
    assert rpt.to_dict()["lower"] == rpt.h_kappa


def test_depth_potential_shapes():
    bg, weights = depth_k_potential(pants_at(6.0).rep, PHI, ABC, 2)
    assert bg.k == 3 and weights.shape == (bg.size,) == (24 * 16,)
    assert np.all(weights > 0)
    with pytest.raises(ValueError):
        depth_k_potential(pants_at(6.0).rep, PHI, ABC, 0)
    with pytest.raises(BudgetExceeded):
        busemann_depth_k_exponent(pants_at(6.0).rep, PHI, ABC, 3, node_budget=50)


def test_depth_estimate_schottky_approaches_diagonal_value():
    est = [busemann_depth_k_exponent(schottky_sl2(m), ALPHA, STD, 2) * m / math.log(3) for m in (20.0, 100.0)]
    assert 1 < est[1] < est[0] < 1.03
    assert est[1] < 1.005


# 60-digit references for the length-4 periodic estimate, shear family at X = (1, 1)
@pytest.mark.parametrize("t,value", [(6.0, 0.05783164620948758), (8.0, 0.04338160820868497)])
def test_periodic_exponent_reference(t, value):
    assert periodic_exponent(pants_at(t).rep, PHI, ABC, 4) == pytest.approx(value, rel=1e-8)


def test_periodic_exponent_converges_to_depth_estimate():
    rep = pants_at(6.0).rep
    depth = busemann_depth_k_exponent(rep, PHI, ABC, 2)
    errs = [abs(periodic_exponent(rep, PHI, ABC, n) - depth) for n in (4, 6, 8)]
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 1e-5


@pytest.mark.parametrize("t", [6.0])
def test_cycle_sandwich(t):
    rep = pants_at(t).rep
    eps = 0.1
    slack = PHI(r_epsilon(eps))
    kap = generator_weights(rep, PHI, ABC)
    for n in range(1, 6):
        for c, ell in cycle_lengths(rep, PHI, ABC, enumerate_cycles(ABC, n)):
            upper = sum(kap[i] for i in c.edges)
            assert upper - 2 * n * slack <= ell <= upper + 1e-9


def test_orbit_lengths_schottky_levels():
    rep = schottky_sl2(100.0)
    lengths = orbit_lengths(rep, ALPHA, STD, 350.0)
    assert lengths.size == 4 + 12 + 36
    assert np.all(np.diff(lengths) >= 0)
    assert lengths[:4] == pytest.approx(np.full(4, 100.0))
    with pytest.raises(BudgetExceeded):
        orbit_lengths(rep, ALPHA, STD, 350.0, budget=10)


def test_orbit_lengths_match_direct_svd():
    rep = pants_at(3.0).rep
    lengths = orbit_lengths(rep, PHI, ABC, 40.0)
    direct = []
    stack = [(ABC.start, ())]
    while stack:
        v, labels = stack.pop()
        for e in ABC.out_edges(v):
            lab = labels + (e.label,)
            val = PHI(prox.cartan_projection(rep.evaluate(GroupWord(reversed(lab)))))
            if val <= 40.0:
                direct.append(val)
                stack.append((e.target, lab))
    assert lengths == pytest.approx(np.sort(direct), rel=1e-9)


@given(st.floats(0.2, 3.0))
@settings(max_examples=20)
def test_counting_fit_recovers_exponential_growth(h):
    # N(T) = e^{hT} exactly
    t_max = 12 / h
    lengths = np.log(np.arange(1, int(math.exp(h * t_max)) + 1)) / h
    fit = counting_fit(lengths[1:], t_max)
    assert fit.slope == pytest.approx(h, rel=0.02)


def test_counting_fit_needs_data():
    with pytest.raises(ValueError):
        counting_fit(np.array([5.0]), 6.0)


def test_limit_cone():
    assert limit_cone_deviation(pants_at(3.0).rep, ABC, 4) == pytest.approx(0, abs=1e-12)
    assert limit_cone_deviation(schottky_sl2(5.0), STD, 3) == 0.0


def test_thurston_estimate_identity_and_conjugate():
    rep = pants_at(4.0).rep
    same = thurston_estimate(rep, rep, PHI, ABC, 4, h1=0.05, h2=0.05)
    assert same.value == pytest.approx(0, abs=1e-12)
    conj = rep.conjugate(random_sl(3, np.random.default_rng(1)))
    assert thurston_estimate(rep, conj, PHI, ABC, 4, h1=0.05, h2=0.05).value == pytest.approx(0, abs=1e-6)
    other = thurston_estimate(rep, pants_at(4.0, 2.0, 3.0).rep, PHI, ABC, 4)
    assert other.value > 0 and len(other.word) >= 1
    assert other.to_dict()["cycle"] == list(other.cycle)


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=25)
def test_lambda_exponent_dominates_kappa_exponent(seed):
    from critexp.pants import FGParams, holonomy
    from critexp.weyl import functional_from_weights
    rng = np.random.default_rng(seed)
    p = FGParams(tuple(np.exp(rng.uniform(-1, 1, 2))), tuple(np.exp(rng.uniform(2, 6, 3))),
                 tuple(np.exp(rng.uniform(2, 6, 3))))
    phi = functional_from_weights(*rng.uniform(0.05, 2, 2))
    hk, hl = approximating_exponents(holonomy(p).rep, phi, ABC)
    assert hl >= hk * (1 - 1e-12)


def test_diagonal_generator_lengths():
    rep = Representation({"a": np.diag([math.e, 1 / math.e])})
    assert length_phi(rep, ALPHA, ["a"]) == pytest.approx(2)
    assert generator_values(rep, ALPHA, "kappa") == pytest.approx({"a": 2.0, "a'": 2.0})
    assert generator_values(rep, ALPHA, "lambda") == pytest.approx(generator_values(rep, ALPHA, "kappa"))
