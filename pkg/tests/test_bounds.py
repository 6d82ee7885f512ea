import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mielab import bounds


def test_holographic_threshold():
    t = bounds.holographic_threshold()
    assert t["S_crit_nats"] == pytest.approx(1.94)
    assert t["S_crit_bits"] == pytest.approx(2.7988, abs=1e-4)
    assert t["chi_crit"] == 7
    assert math.log(6) <= t["S_crit_nats"] < math.log(7)


def test_crude_thresholds():
    assert bounds.crude_threshold("fourlocal_d2") == 667
    assert bounds.crude_threshold("brickwork_d4") == 419479
    assert not bounds.brickwork_constants(419478).threshold_met
    assert bounds.brickwork_constants(419479).threshold_met


def test_fourlocal_threshold_by_linear_scan():
    first = next(q for q in range(2, 2000) if bounds.fourlocal_constants(q).threshold_met)
    assert first == bounds.crude_threshold("fourlocal_d2")


@given(st.integers(2, 10**6))
def test_cell_factors_decrease_in_q(q):
    for table in (bounds.fourlocal_constants, bounds.brickwork_constants):
        assert table(q + 1).per_cell_factor <= table(q).per_cell_factor


def test_advantage_premise():
    ok = bounds.advantage_premise_check(6)
    assert ok["pass"]
    assert ok["lhs"] == pytest.approx(2.07944, abs=1e-5)
    assert ok["rhs"] == pytest.approx(2.06861, abs=1e-5)
    assert ok["nu"] == pytest.approx(0.32974, abs=1e-5)
    bad = bounds.advantage_premise_check(5)
    assert not bad["pass"] and bad["lhs"] == pytest.approx(1.73287, abs=1e-5)
    assert bounds.minimal_advantage_m() == 6


def test_thresholds_report_keys():
    rep = bounds.thresholds_report()
    assert (rep["S_crit_bits"], rep["chi_crit"], rep["brickwork_crude_q"], rep["advantage_m"]) == (2.8, 7, 419479, 6)


def test_mie_bound_at_f_equal_two():
    rep = bounds.mie_lower_bound(math.exp(-2.0))
    assert rep.valid and rep.d_prime == 14
    assert rep.mie_lower_nats == pytest.approx(0.6137, abs=1e-4)
    assert rep.mie_lower_bits == pytest.approx(rep.mie_lower_nats / math.log(2))


def test_mie_bound_invalid_below_two():
    rep = bounds.mie_lower_bound(0.5)
    assert not rep.valid and rep.d_prime == 1 and rep.mie_lower_nats == 0.0
    with pytest.raises(ValueError):
        bounds.mie_lower_bound(0.0)


@given(st.floats(2.0, 40.0))
def test_mie_lower_bound_grows_with_F(F):
    a = bounds.mie_lower_bound(math.exp(-F))
    b = bounds.mie_lower_bound(math.exp(-F - 0.5))
    assert b.mie_lower_nats >= a.mie_lower_nats
    assert a.mie_lower_nats >= 0


def test_binary_entropy():
    assert bounds.binary_entropy(0.5) == pytest.approx(math.log(2))
    assert bounds.binary_entropy(0.0) == 0.0
    with pytest.raises(ValueError):
        bounds.binary_entropy(1.5)


@given(st.floats(0.0, 1.0))
def test_binary_entropy_symmetric(p):
    assert bounds.binary_entropy(p) == pytest.approx(bounds.binary_entropy(1 - p), abs=1e-12)


@given(st.integers(2, 6), st.integers(0, 2**32 - 1))
def test_entropy_bound_against_random_states(d, seed):
    """Entropy of any state dominates the bound evaluated at its distance from maximally mixed."""
    rng = np.random.default_rng(seed)
    k = int(rng.integers(1, 2 * d))
    g = rng.standard_normal((d, k)) + 1j * rng.standard_normal((d, k))
    rho = g @ g.conj().T
    rho /= np.trace(rho).real
    ev = np.clip(np.linalg.eigvalsh(rho), 0, None)
    S = -sum(p * math.log(p) for p in ev if p > 0)
    eps = float(np.abs(np.linalg.eigvalsh(rho - np.eye(d) / d)).sum())
    assert S >= bounds.distillation_entropy_bound(min(eps, 2.0), d) - 1e-12


@given(st.floats(0.0, 2.0), st.floats(0.0, 2.0))
def test_entropy_bound_monotone(e1, e2):
    lo, hi = sorted((e1, e2))
    if hi <= 1.0:
        assert bounds.distillation_entropy_bound(hi, 8) <= bounds.distillation_entropy_bound(lo, 8) + 1e-12


def test_markov_clamped_and_checked():
    assert bounds.markov_concentration(5.0, 100, 1.0) == 1.0
    assert bounds.markov_concentration(0.01, 4, 2.0) == pytest.approx(0.005 * math.log(4) / (2 - math.log(2)))
    with pytest.raises(ValueError):
        bounds.markov_concentration(0.1, 4, 0.5)


@given(st.floats(1e-6, 5.0))
def test_wall_error_form(Z):
    assert bounds.wall_error_bound(Z, 4) == pytest.approx(2 * Z * bounds.f_ratio(Z), rel=1e-12)


def test_wall_route_beats_triangle_route_for_small_Z():
    Z = 1e-3
    assert bounds.wall_error_bound(Z, 4) < bounds.triangle_route_error_bound(4, Z)


def test_f_ratio_at_zero():
    assert bounds.f_ratio(0.0) == 1.0
    assert bounds.f_ratio(1e-8) == pytest.approx(1.0)


def _projectors(basis):
    return [np.outer(v, v.conj()) for v in basis]


def test_contractivity_computational_basis():
    assert bounds.contractivity_lambda(_projectors(np.eye(2))) == pytest.approx(math.sqrt(2))


def test_contractivity_trivial_povm():
    assert bounds.contractivity_lambda([np.eye(2)]) == pytest.approx(0.0, abs=1e-12)


def test_contractivity_two_designs():
    s = 1 / math.sqrt(2)
    paulis = []
    for basis in (np.eye(2), [[s, s], [s, -s]], [[s, 1j * s], [s, -1j * s]]):
        paulis += [p / 3 for p in _projectors(np.array(basis, dtype=complex))]
    assert bounds.contractivity_lambda(paulis) <= 1 + 1e-9
    w = np.exp(2j * math.pi / 3)
    tet = [np.array([0, 1]), np.array([math.sqrt(2 / 3), math.sqrt(1 / 3)]),
           np.array([math.sqrt(2 / 3), w * math.sqrt(1 / 3)]), np.array([math.sqrt(2 / 3), w * w * math.sqrt(1 / 3)])]
    sic = [np.outer(v, v.conj()) / 2 for v in tet]
    assert bounds.contractivity_lambda(sic) <= 1 + 1e-9


def test_contractivity_rejects_incomplete_povm():
    with pytest.raises(ValueError):
        bounds.contractivity_lambda([np.diag([1.0, 0.0])])
