"""Replica-2 quasientropy as a ratio of Ising partition functions.

Each measured site carries a spin; spins on A and C are pinned by the
boundary condition.  A configuration costs ``H = S2(rho^I)``, the Rényi-2
entropy of the spin-down set ``I``.  With Haar-random site measurements,

    E_U sum_s Tr[(rho~^A_s)^2] = prod_{i in B} 1/(d_i + 1) * Z_-+
    E_U sum_s p_s^2            = prod_{i in B} 1/(d_i + 1) * Z_++
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

from . import statevec

MAX_FREE_SPINS = 24


@dataclass
class IsingInstance:
    """Spins on ``free`` sites with A and C pinned; ``renyi2(region)`` gives the energy of a spin-down set."""

    A: frozenset
    C: frozenset
    free: tuple
    renyi2: Callable
    dims: dict = field(default_factory=dict)
    _memo: dict = field(default_factory=dict, repr=False)

    def energy(self, down):
        key = frozenset(down)
        if key not in self._memo:
            self._memo[key] = float(self.renyi2(key))
        return self._memo[key]

    def prefactor(self):
        return math.prod(1.0 / (self.dims[i] + 1) for i in self.free) if self.dims else 1.0


def holographic_instance(lattice, partition, bond_entropy, dims=None):
    """Nearest-neighbour rule: each anti-aligned edge costs its bond Rényi-2 entropy."""
    costs = dict(bond_entropy)

    def renyi2(down):
        return sum(s for (i, j), s in costs.items() if (i in down) != (j in down))

    return IsingInstance(partition.A, partition.C, tuple(sorted(partition.B)), renyi2, dict(dims or {}))


def general_instance(state, partition):
    """Energies from purities of the reference state, memoised by spin-down set."""

    def renyi2(down):
        return -math.log(statevec.purity(state, down))

    dims = {i: state.dims[i] for i in partition.B}
    return IsingInstance(partition.A, partition.C, tuple(sorted(partition.B)), renyi2, dims)


def Z_boundary(inst, tau_A, tau_C):
    """Exact ``sum_sigma exp(-H)`` with A pinned to ``tau_A`` and C to ``tau_C`` (each +-1)."""
    n = len(inst.free)
    if n > MAX_FREE_SPINS:
        raise ValueError(f"{n} free spins exceed the enumeration limit {MAX_FREE_SPINS}")
    fixed = set()
    if tau_A == -1:
        fixed |= inst.A
    if tau_C == -1:
        fixed |= inst.C
    terms = []
    for mask in range(1 << n):
        down = set(fixed)
        down.update(inst.free[k] for k in range(n) if mask >> k & 1)
        terms.append(math.exp(-inst.energy(down)))
    return math.fsum(terms)


def Q2(inst):
    """``ln(Z_++ / Z_-+)``."""
    return math.log(Z_boundary(inst, 1, 1) / Z_boundary(inst, -1, 1))


def replica_moments(inst):
    """Predicted circuit-averaged numerator and denominator of the replica ratio."""
    zpp, zmp = Z_boundary(inst, 1, 1), Z_boundary(inst, -1, 1)
    pref = inst.prefactor()
    return {"Z_pp": zpp, "Z_mp": zmp, "numerator": pref * zmp, "denominator": pref * zpp, "Q2": math.log(zpp / zmp)}
