"""Closed-form entanglement bounds and threshold constants.

All entropies are in nats; ``bits = nats / ln 2`` only when formatting.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

LN2 = math.log(2.0)

# Upper bound on the log connective constant of the square lattice (nats).
LOG_MU_SQUARE_UPPER = 0.97
# Exact connective constant of the honeycomb lattice.
MU_HEX = math.sqrt(2.0 + math.sqrt(2.0))


def binary_entropy(p):
    """``h2(p)`` in nats, with ``0 ln 0 = 0``."""
    if p < 0.0 or p > 1.0:
        raise ValueError(f"probability out of range: {p}")
    if p == 0.0 or p == 1.0:
        return 0.0
    return -p * math.log(p) - (1.0 - p) * math.log1p(-p)


def distillation_entropy_bound(eps, d_prime):
    """Entropy lower bound from a distillation error ``eps`` into dimension ``d_prime``.

    ``S >= (1 - eps/2) ln d' - h2(eps/2)`` (continuity of entropy in trace distance).
    """
    if not 0.0 <= eps <= 2.0:
        raise ValueError(f"eps must lie in [0, 2], got {eps}")
    if d_prime < 1:
        raise ValueError("d_prime must be >= 1")
    return (1.0 - eps / 2.0) * math.log(d_prime) - binary_entropy(eps / 2.0)


def markov_concentration(eps_bar, d_prime, delta):
    """Upper bound on ``Pr[S < ln d' - delta]`` given the mean distillation error."""
    if delta <= LN2:
        raise ValueError("delta must exceed ln 2")
    return min(1.0, 0.5 * eps_bar * math.log(d_prime) / (delta - LN2))


def f_ratio(x):
    """``(e^x - 1) / x`` with ``f(0) = 1``."""
    return 1.0 if x == 0.0 else math.expm1(x) / x


def wall_error_bound(Z_upper, d_prime):
    """Mean distillation error bound ``sqrt(d') Z f(Z) = sqrt(d') (e^Z - 1)``."""
    if Z_upper <= 0.0:
        raise ValueError("Z_upper must be positive")
    return math.sqrt(d_prime) * math.expm1(Z_upper)


@dataclass(frozen=True)
class BoundReport:
    Z_upper: float
    F_saw: float
    d_prime: int
    mie_lower_nats: float
    eps_upper: float
    valid: bool

    @property
    def mie_lower_bits(self):
        return self.mie_lower_nats / LN2

    def to_dict(self):
        d = asdict(self)
        d["mie_lower_bits"] = self.mie_lower_bits
        return d


def optimal_d_prime(F):
    return max(1, math.ceil(math.exp(2.0 * F) / F**2))


def mie_lower_bound(Z_upper):
    """Mean post-measurement entropy bound ``2F - 2 ln(e F)`` with ``F = -ln Z``; needs ``F >= 2``."""
    if Z_upper <= 0.0:
        raise ValueError("Z_upper must be positive")
    F = -math.log(Z_upper)
    if F < 2.0:
        return BoundReport(Z_upper, F, 1, 0.0, wall_error_bound(Z_upper, 1), False)
    d = optimal_d_prime(F)
    bound = 2.0 * F - 2.0 * math.log(math.e * F)
    return BoundReport(Z_upper, F, d, bound, wall_error_bound(Z_upper, d), True)


def bound_from_partition(saw_partition):
    """:class:`BoundReport` from a certified partition function, or ``None`` without a certificate."""
    z = saw_partition.total_upper
    if not math.isfinite(z):
        return None
    if z == 0.0:
        # no separating wall at all: nothing to certify with this route
        return BoundReport(0.0, math.inf, 1, 0.0, 0.0, False)
    return mie_lower_bound(z)


def holographic_threshold(log_mu_upper=LOG_MU_SQUARE_UPPER):
    """Critical bond entropy and the smallest bond dimension beyond it."""
    s_crit = 2.0 * log_mu_upper
    chi = 2
    while math.log(chi) <= s_crit:
        chi += 1
    return {"S_crit_nats": s_crit, "S_crit_bits": s_crit / LN2, "chi_crit": chi, "log_mu_upper": log_mu_upper}


# ---------------------------------------------------------------------------
# per-cell factors for plaquette and brickwork circuits


@dataclass(frozen=True)
class CellFactorTable:
    architecture: str
    q: int
    c1: float
    c2: float
    per_cell_factor: float
    threshold_met: bool

    def to_dict(self):
        return asdict(self)


def fourlocal_constants(q, mu=MU_HEX):
    if q < 2:
        raise ValueError("q must be >= 2")
    q = int(q)
    c1 = math.sqrt(q * (q * q + 1) / (q**4 + 1))
    c2 = math.sqrt(2 * q * q / (q**4 + 1))
    factor = 255 * c2
    return CellFactorTable("fourlocal_d2", q, c1, c2, factor, factor < 1.0 / mu)


def brickwork_constants(q, mu=MU_HEX):
    if q < 2:
        raise ValueError("q must be >= 2")
    q = int(q)
    c1 = math.sqrt(q * (q**4 + 6 * q * q + 1) / (q * q + 1) ** 3)
    c2 = 2 * q / (q * q + 1)
    factor = math.sqrt(3.0) * (2**16 - 1) * c2
    return CellFactorTable("brickwork_d4", q, c1, c2, factor, factor < 1.0 / mu)


def crude_threshold(architecture, mu=MU_HEX, q_hi=1 << 24):
    """Smallest ``q >= 2`` whose crude per-cell factor beats ``1/mu`` (bisection on a monotone factor)."""
    table = {"fourlocal_d2": fourlocal_constants, "brickwork_d4": brickwork_constants}[architecture]
    if not table(q_hi, mu).threshold_met:
        raise ValueError(f"no threshold below q = {q_hi}")
    lo, hi = 2, q_hi
    if table(lo, mu).threshold_met:
        return lo
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if table(mid, mu).threshold_met:
            hi = mid
        else:
            lo = mid
    return hi


# ---------------------------------------------------------------------------
# POVM contractivity


def _vec(op):
    return np.asarray(op, dtype=complex).reshape(-1, order="F")


def povm_second_moment(povm):
    """``Phi = d * sum_s |F_s>><<F_s| / Tr F_s`` on column-stacked operators."""
    ops = [np.asarray(F, dtype=complex) for F in povm]
    d = ops[0].shape[0]
    total = sum(ops)
    if not np.allclose(total, np.eye(d), atol=1e-10):
        raise ValueError("POVM elements do not sum to the identity")
    phi = np.zeros((d * d, d * d), dtype=complex)
    for F in ops:
        tr = np.trace(F).real
        if tr <= 1e-15:
            continue
        v = _vec(F)
        phi += d * np.outer(v, v.conj()) / tr
    return phi


def contractivity_lambda(povm):
    """Square root of the norm of the second-moment map on traceless operators."""
    phi = povm_second_moment(povm)
    d = int(round(math.sqrt(phi.shape[0])))
    vi = _vec(np.eye(d))
    p0 = np.eye(d * d) - np.outer(vi, vi.conj()) / d
    return float(math.sqrt(np.linalg.norm(p0 @ phi @ p0, 2)))


def triangle_route_error_bound(d_prime, Z_minus_plus):
    """Error bound from the triangle-inequality route, ``sqrt(d' Z_-+)``."""
    if d_prime <= 0 or Z_minus_plus <= 0:
        raise ValueError("inputs must be positive")
    return math.sqrt(d_prime * Z_minus_plus)


def advantage_premise_check(m, log_mu_upper=LOG_MU_SQUARE_UPPER):
    """Ordered-phase condition for the loop gas of ``m``-qubit Clifford qudits."""
    if m < 1:
        raise ValueError("m must be >= 1")
    beta = 0.5 * m * LN2
    nu = math.exp(log_mu_upper - beta)
    rhs = math.log(3.0) + log_mu_upper
    return {"m": m, "beta": beta, "nu": nu, "lhs": beta, "rhs": rhs, "pass": beta >= rhs and nu <= 1.0 / 3.0}


def minimal_advantage_m(log_mu_upper=LOG_MU_SQUARE_UPPER):
    m = 1
    while not advantage_premise_check(m, log_mu_upper)["pass"]:
        m += 1
    return m


def thresholds_report(log_mu_upper=LOG_MU_SQUARE_UPPER, mu_hex=MU_HEX):
    """Every threshold constant in one mapping (nats unless the key says bits)."""
    holo = holographic_threshold(log_mu_upper)
    m = minimal_advantage_m(log_mu_upper)
    return {
        "S_crit_nats": round(holo["S_crit_nats"], 2),
        "S_crit_bits": round(holo["S_crit_bits"], 2),
        "S_crit_bits_full": holo["S_crit_bits"],
        "chi_crit": holo["chi_crit"],
        "fourlocal_crude_q": crude_threshold("fourlocal_d2", mu_hex),
        "brickwork_crude_q": crude_threshold("brickwork_d4", mu_hex),
        "advantage_m": m,
        "advantage_check": advantage_premise_check(m, log_mu_upper),
        "advantage_check_previous": advantage_premise_check(m - 1, log_mu_upper) if m > 1 else None,
        "log_mu_square_upper": log_mu_upper,
        "mu_hexagonal": mu_hex,
    }
