import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mielab import statevec as sv
from mielab.lattice import block_cells, build_lattice, strip_partition

LN2 = math.log(2)


def bell_state():
    amps = np.zeros(4, dtype=complex)
    amps[0] = amps[3] = 1 / math.sqrt(2)
    return sv.PureState((2, 2), amps)


@given(st.integers(1, 8), st.integers(0, 2**32 - 1))
def test_haar_unitary_is_unitary(d, seed):
    U = sv.haar_unitary(d, np.random.default_rng(seed))
    assert np.allclose(U.conj().T @ U, np.eye(d), atol=1e-12)


def test_haar_second_moment(rng):
    d = 3
    vals = [abs(sv.haar_unitary(d, rng)[0, 0]) ** 2 for _ in range(4000)]
    # E|U_00|^2 = 1/d, E|U_00|^4 = 2/(d(d+1))
    assert np.mean(vals) == pytest.approx(1 / d, abs=4 * math.sqrt(2 / (d * (d + 1)) / 4000))


def test_haar_isometries_are_isometries(rng):
    W = sv.haar_isometries(6, 3, 5, rng)
    for w in W:
        assert np.allclose(w.conj().T @ w, np.eye(3), atol=1e-12)
    with pytest.raises(ValueError):
        sv.haar_isometries(2, 3, 1, rng)


def test_apply_unitary_matches_dense_kron(rng):
    dims = (2, 3, 2)
    psi = sv.random_state(dims, rng)
    U = sv.haar_unitary(6, rng)
    # U on sites (1, 2) as a dense operator
    full = np.kron(np.eye(2), U)
    assert np.allclose(sv.apply_unitary(psi, U, [1, 2]).amps, full @ psi.amps)
    # reversed site order swaps the tensor factors
    swap = np.zeros((6, 6))
    for a, b in itertools.product(range(3), range(2)):
        swap[b * 3 + a, a * 2 + b] = 1
    V = sv.haar_unitary(6, rng)
    out = sv.apply_unitary(psi, V, [2, 1]).amps
    assert np.allclose(out, np.kron(np.eye(2), swap.T @ V @ swap) @ psi.amps)


def test_bell_and_product_entropies():
    assert sv.entropy(bell_state(), [0]) == pytest.approx(LN2)
    assert sv.entropy(bell_state(), [0], "renyi2") == pytest.approx(LN2)
    assert sv.entropy(sv.product_state((2, 3)), [1]) == 0.0
    with pytest.raises(ValueError):
        sv.entropy(bell_state(), [0, 1])


@given(st.lists(st.integers(2, 3), min_size=2, max_size=5), st.integers(0, 2**32 - 1), st.data())
def test_entropy_complement_symmetry(dims, seed, data):
    psi = sv.random_state(tuple(dims), np.random.default_rng(seed))
    n = len(dims)
    region = data.draw(st.sets(st.integers(0, n - 1), min_size=1, max_size=n - 1))
    rest = set(range(n)) - region
    assert sv.entropy(psi, region) == pytest.approx(sv.entropy(psi, rest), abs=1e-10)
    assert sv.entropy(psi, region, "renyi2") <= sv.entropy(psi, region) + 1e-10
    rho = sv.reduced_density(psi, region)
    assert np.trace(rho).real == pytest.approx(1.0)
    assert np.allclose(rho, rho.conj().T)
    assert sv.purity(psi, region) == pytest.approx(np.trace(rho @ rho).real)


def _holographic(Lx, Ly, chi, bond_state="maximal"):
    return sv.CircuitSpec("holographic", build_lattice("square", Lx, Ly), chi=chi, bond_state=bond_state)


@given(st.integers(0, 2**32 - 1), st.data())
def test_holographic_renyi2_is_min_cut(seed, data):
    """Bond states make S2(R) the summed bond entropy of edges leaving R, before and after site unitaries."""
    spec = _holographic(2, 3, 2, bond_state=[math.sqrt(0.8), 0, 0, math.sqrt(0.2)])
    region = data.draw(st.sets(st.integers(0, 5), min_size=1, max_size=5))
    cut = sum(s for (i, j), s in spec.bond_renyi2().items() if (i in region) != (j in region))
    bare = sv.holographic_bond_state(spec)
    full = sv.prepare(spec, np.random.default_rng(seed))
    assert -math.log(sv.purity(bare, region)) == pytest.approx(cut, abs=1e-10)
    assert -math.log(sv.purity(full, region)) == pytest.approx(cut, abs=1e-10)


def test_site_dims_and_per_edge_chi():
    spec = _holographic(2, 2, 3)
    assert spec.site_dims() == (9, 9, 9, 9)
    lat = build_lattice("square", 2, 2)
    mixed = sv.CircuitSpec("holographic", lat, chi={(0, 2): 8, (1, 3): 8})
    assert mixed.site_dims() == (8, 8, 8, 8)
    assert sv.prepare(mixed, np.random.default_rng(0)).check_norm()


def test_circuit_spec_errors():
    lat = build_lattice("square", 2, 2)
    with pytest.raises(ValueError):
        sv.CircuitSpec("random", lat)
    with pytest.raises(ValueError):
        sv.CircuitSpec("holographic", lat, bond_state=[1.0, 1.0, 0, 0])
    with pytest.raises(ValueError):
        sv.prepare(sv.CircuitSpec("holographic", lat, chi=4, cap=1000), np.random.default_rng(0))


@pytest.mark.parametrize("family,depth", [("plaquette_4local", 2), ("brickwork", 4)])
def test_gate_layers_are_disjoint(family, depth, rng):
    spec = sv.CircuitSpec(family, build_lattice("square", 4, 4), q=2, d_C=depth)
    layers = sv.build_circuit(spec, rng)
    assert len(layers) == depth
    for layer in layers:
        sites = [s for g in layer for s in g.sites]
        assert len(sites) == len(set(sites))
    if family == "plaquette_4local":
        assert sorted(s for g in layers[0] for s in g.sites) == list(range(16))


def test_measure_region_exhaustive(rng):
    spec = _holographic(2, 3, 2)
    psi = sv.prepare(spec, rng)
    part = strip_partition(spec.lattice)
    A, B, C = part.as_lists()
    ens = sv.measure_region(psi, B, exhaustive=True)
    assert sum(s.probability for s in ens) == pytest.approx(1.0)
    assert all(s.post_state.check_norm() for s in ens)
    direct = sum(s.probability * sv.entropy(s.post_state, [0, 1]) for s in ens)
    assert sv.exact_mean_mie(psi, part) == pytest.approx(direct, abs=1e-10)
    with pytest.raises(ValueError):
        sv.measure_region(psi, B)


def test_swap_moments_match_outcome_loop(rng):
    spec = _holographic(2, 3, 2)
    psi = sv.prepare(spec, rng)
    part = strip_partition(spec.lattice)
    _, B, _ = part.as_lists()
    num = den = 0.0
    for s in sv.measure_region(psi, B, exhaustive=True):
        rho = sv.reduced_density(s.post_state, [0, 1])
        num += s.probability**2 * np.trace(rho @ rho).real
        den += s.probability**2
    got = sv.swap_moments_exact(psi, part)
    assert got == pytest.approx((num, den), rel=1e-10)


def test_distill_unitary_case_is_deterministic(rng):
    # d' = d_A: every isometry is unitary and the error is || psi psi^+ - I/d ||_1 = 2(1 - 1/d)
    psi = sv.product_state((3, 2))
    res = sv.distill(psi, [0], 3, 20, rng)
    assert res["eps_estimate"] == pytest.approx(2 * (1 - 1 / 3))
    assert res["stderr"] == pytest.approx(0.0, abs=1e-12)


def test_distill_maximally_entangled_has_no_error(rng):
    res = sv.distill(bell_state(), [0], 2, 10, rng)
    assert res["eps_estimate"] == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ValueError):
        sv.distill(bell_state(), [0], 3, 10, rng)


def test_distillation_guarantee_formula():
    assert sv.distillation_guarantee(bell_state(), [0], 2) == pytest.approx(1.0)
    assert sv.distillation_guarantee(sv.product_state((2, 2)), [0], 2) == pytest.approx(math.sqrt(2))


def test_mie_monte_carlo_close_to_exact(rng):
    spec = _holographic(2, 2, 2)
    part = strip_partition(spec.lattice)
    res = sv.mie_monte_carlo(spec, part, 3, 4, rng)
    # nothing is measured on a 2x2 strip, so every sample is the full bond entropy 2 ln 2
    assert res["mean"] == pytest.approx(2 * LN2)


def test_cone_density_matches_statevector(rng):
    spec = sv.CircuitSpec("plaquette_4local", build_lattice("square", 4, 3), q=2, d_C=2)
    layers = sv.build_circuit(spec, rng)
    psi = sv.product_state(spec.site_dims())
    for layer in layers:
        for g in layer:
            psi = sv.apply_unitary(psi, g.U, g.sites)
    for targets in ([0], [5], [0, 11], [3, 4]):
        assert np.allclose(sv.cone_reduced_density(layers, targets, 2), sv.reduced_density(psi, targets), atol=1e-12)


def test_light_cone_growth():
    spec = sv.CircuitSpec("plaquette_4local", build_lattice("square", 8, 8), q=2, d_C=2)
    layers = sv.build_circuit(spec, np.random.default_rng(1))
    cone, gates = sv.light_cone(layers, [27])
    assert len(cone) == 16 and len(gates) == 5


def test_aligned_cells_are_certified(rng):
    lat = build_lattice("square", 8, 4)
    spec = sv.CircuitSpec("plaquette_4local", lat, q=2, d_C=1)
    cells = block_cells(lat, 1)
    res = sv.strict_locality_check(spec, cells, rng, n_probes=2)
    assert res["all_certified"] and res["max_deviation"] == 0.0
    assert res["probe_max"] < 1e-12
