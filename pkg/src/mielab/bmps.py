"""Boundary-MPS contraction of planar grid networks and SEBD sampling of holographic circuits.

Grid tensors are indexed ``grid[y][x]`` with legs ``(left, right, down, up)``;
legs on the open boundary have dimension 1.  A boundary MPS carries one
tensor per row with legs ``(bond_below, physical, bond_above)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import statevec

# ---------------------------------------------------------------------------
# truncation bookkeeping


@dataclass(frozen=True)
class TruncationPolicy:
    chi_max: int = 64
    cutoff: float = 0.0
    abort_tol: float = 1e-3

    def __post_init__(self):
        if self.chi_max < 1:
            raise ValueError("chi_max must be >= 1")
        if self.cutoff < 0:
            raise ValueError("cutoff must be >= 0")


@dataclass
class BoundaryMPS:
    tensors: list
    discarded: float = 0.0
    canonical: str = "none"
    log_scale: float = 0.0

    @property
    def bond_dims(self):
        return [t.shape[2] for t in self.tensors[:-1]]


def _truncate(s, policy):
    """Number of singular values to keep, demanded rank and relative discarded weight."""
    w = s**2
    total = w.sum()
    if total == 0.0:
        return 1, 1, 0.0
    demanded = int(np.sum(s > policy.cutoff * s[0])) if policy.cutoff > 0 else int(np.sum(w > total * 1e-28))
    demanded = max(demanded, 1)
    keep = min(demanded, policy.chi_max)
    return keep, demanded, float(w[keep:].sum() / total)


def compress(mps, policy, entropy_bond=None):
    """Left-canonicalise by QR, then truncate right-to-left by SVD.

    Returns ``(demanded_max, discarded_weight_sum, entropy)`` where ``entropy``
    is the Schmidt entropy (nats) at bond ``entropy_bond`` (between row
    ``entropy_bond - 1`` and ``entropy_bond``) of the truncated state.
    """
    T = mps.tensors
    n = len(T)
    for k in range(n - 1):
        a, p, b = T[k].shape
        q, r = np.linalg.qr(T[k].reshape(a * p, b))
        T[k] = q.reshape(a, p, -1)
        T[k + 1] = np.tensordot(r, T[k + 1], axes=(1, 0))
    nrm = np.linalg.norm(T[-1])
    if nrm > 0:
        T[-1] = T[-1] / nrm
        mps.log_scale += math.log(nrm)
    demanded_max, disc, ent = 1, 0.0, 0.0
    for k in range(n - 1, 0, -1):
        a, p, b = T[k].shape
        u, s, vh = np.linalg.svd(T[k].reshape(a, p * b), full_matrices=False)
        keep, demanded, dw = _truncate(s, policy)
        demanded_max = max(demanded_max, demanded)
        disc += dw
        s_keep = s[:keep]
        if k == entropy_bond:
            pr = s_keep**2 / np.sum(s_keep**2)
            ent = statevec.spectrum_entropy(pr)
        s_keep = s_keep / np.linalg.norm(s_keep)
        T[k] = vh[:keep].reshape(keep, p, b)
        T[k - 1] = np.tensordot(T[k - 1], u[:, :keep] * s_keep[None, :], axes=(2, 0))
    mps.discarded += disc
    mps.canonical = "right"
    return demanded_max, disc, ent


# ---------------------------------------------------------------------------
# random networks


def _grid_dims(Lx, Ly, chi_h, chi_v):
    def dims(x, y):
        return (
            chi_h if x > 0 else 1,
            chi_h if x < Lx - 1 else 1,
            chi_v if y > 0 else 1,
            chi_v if y < Ly - 1 else 1,
        )

    return dims


def sample_random_tn(lattice, chi, mode, rng, bond_spectrum=None, spec=None):
    """Random grid network on ``lattice``.

    ``gaussian``: i.i.d. complex Gaussian entries; an optional ``bond_spectrum``
    ``lambda`` inserts ``diag(sqrt(lambda))`` on every bond.
    ``exact``: a holographic circuit from :mod:`statevec` with a Born-sampled
    outcome on every site; the contraction equals the outcome amplitude.
    Returns ``{"grid", "mode", ...}``.
    """
    Lx, Ly = lattice.width, lattice.height
    if mode == "gaussian":
        dims = _grid_dims(Lx, Ly, chi, chi)
        grid = []
        for y in range(Ly):
            row = []
            for x in range(Lx):
                shp = dims(x, y)
                t = (rng.standard_normal(shp) + 1j * rng.standard_normal(shp)) / math.sqrt(2.0)
                row.append(t)
            grid.append(row)
        if bond_spectrum is not None:
            lam = np.sqrt(np.asarray(bond_spectrum, dtype=float))
            for y in range(Ly):
                for x in range(Lx):
                    t = grid[y][x]
                    if x > 0:
                        t = t * lam[:, None, None, None]
                    if y > 0:
                        t = t * lam[None, None, :, None]
                    grid[y][x] = t
        return {"grid": grid, "mode": "gaussian"}
    if mode == "exact":
        if spec is None:
            spec = statevec.CircuitSpec("holographic", lattice, chi=chi)
        state, unitaries = statevec.prepare(spec, rng, return_gates=True)
        probs = np.abs(state.amps) ** 2
        k = int(rng.choice(len(probs), p=probs / probs.sum()))
        outcome = tuple(int(v) for v in np.unravel_index(k, state.dims))
        grid = holographic_tensors(spec, unitaries, outcome)
        return {"grid": grid, "mode": "exact", "outcome": outcome, "probability": float(probs[k]),
                "amplitude": complex(state.amps[k])}
    raise ValueError(f"unknown mode {mode!r}")


def _leg_layout(lattice, chis):
    """Per site: list of (neighbour, direction, dim) in neighbour-index order."""
    out = []
    for i in range(lattice.n_vertices):
        x, y = lattice.coords(i)
        legs = []
        for j in lattice.neighbors(i):
            e = (min(i, j), max(i, j))
            c = chis[e]
            if c == 1:
                continue
            xj, yj = lattice.coords(j)
            direction = {(0, -1): "d", (-1, 0): "l", (1, 0): "r", (0, 1): "u"}[(xj - x, yj - y)]
            legs.append((j, direction, c))
        out.append(legs)
    return out


def holographic_tensors(spec, unitaries, outcome):
    """Grid tensors ``<s_i| U_i`` with bond states absorbed, for a fully measured holographic state."""
    lat = spec.lattice
    chis = spec.edge_chi()
    layout = _leg_layout(lat, chis)
    grid = [[None] * lat.width for _ in range(lat.height)]
    for i in range(lat.n_vertices):
        x, y = lat.coords(i)
        legs = layout[i]
        row = unitaries[i][outcome[i]] if legs else np.ones(1, dtype=complex) * unitaries[i][outcome[i], 0]
        t = row.reshape([c for _, _, c in legs]) if legs else row.reshape(())
        # absorb the bond state into the higher-index endpoint
        for k, (j, direction, c) in enumerate(legs):
            if j < i:
                omega = spec.bond_vector(c).reshape(c, c)
                t = np.moveaxis(np.tensordot(omega, t, axes=(1, k)), 0, k)
        full = {"l": 1, "r": 1, "d": 1, "u": 1}
        order = []
        for j, direction, c in legs:
            full[direction] = c
            order.append(direction)
        # reorder to (l, r, d, u) inserting unit legs
        perm = [order.index(dname) for dname in "lrdu" if dname in order]
        t = np.transpose(t, perm) if order else t
        grid[y][x] = t.reshape(full["l"], full["r"], full["d"], full["u"])
    return grid


# ---------------------------------------------------------------------------
# contraction


def brute_force_contract(grid):
    """Exact contraction by a single einsum (small networks only)."""
    Ly, Lx = len(grid), len(grid[0])
    letters = iter("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ")
    h = {(x, y): next(letters) for y in range(Ly) for x in range(Lx - 1)}
    v = {(x, y): next(letters) for y in range(Ly - 1) for x in range(Lx)}
    subs, ops = [], []
    for y in range(Ly):
        for x in range(Lx):
            legs = [
                h[(x - 1, y)] if x > 0 else next(letters),
                h[(x, y)] if x < Lx - 1 else next(letters),
                v[(x, y - 1)] if y > 0 else next(letters),
                v[(x, y)] if y < Ly - 1 else next(letters),
            ]
            subs.append("".join(legs))
            ops.append(grid[y][x])
    return complex(np.einsum(",".join(subs) + "->", *ops, optimize="greedy"))


def flip_horizontal(grid):
    return [[np.transpose(t, (1, 0, 2, 3)) for t in reversed(row)] for row in grid]


@dataclass
class ContractionResult:
    amplitude: complex
    log_abs: float
    aborted: bool
    profile: list = field(default_factory=list)

    def to_rows(self):
        return self.profile


def contract_bmps(grid, policy=TruncationPolicy()):
    """Column-by-column contraction with a truncated boundary MPS.

    ``profile`` has one record per column: ``t``, ``chi_used``, ``discarded``,
    ``half_chain_entropy`` (nats, middle bond) and ``aborted``.
    """
    Ly, Lx = len(grid), len(grid[0])
    mps = BoundaryMPS([np.ones((1, 1, 1), dtype=complex) for _ in range(Ly)])
    mid = Ly // 2
    profile = []
    for x in range(Lx):
        new = []
        for y in range(Ly):
            B = mps.tensors[y]  # (a, l, b)
            T = grid[y][x]  # (l, r, d, u)
            t = np.tensordot(B, T, axes=(1, 0))  # (a, b, r, d, u)
            a, b, r, d, u = t.shape
            t = np.transpose(t, (0, 3, 2, 1, 4)).reshape(a * d, r, b * u)
            new.append(t)
        mps.tensors = new
        demanded, disc, ent = compress(mps, policy, entropy_bond=mid if Ly > 1 else None)
        aborted = demanded > policy.chi_max and disc > policy.abort_tol
        profile.append({"t": x + 1, "chi_used": max(mps.bond_dims, default=1), "discarded": disc,
                        "half_chain_entropy": ent, "aborted": aborted})
        if aborted:
            return ContractionResult(complex("nan"), float("nan"), True, profile)
    val = mps.tensors[0]
    for t in mps.tensors[1:]:
        val = np.tensordot(val, t, axes=(val.ndim - 1, 0))
    scalar = complex(val.reshape(-1)[0])
    log_abs = mps.log_scale + (math.log(abs(scalar)) if scalar != 0 else -math.inf)
    amp = scalar * math.exp(mps.log_scale) if mps.log_scale < 700 else complex("inf")
    return ContractionResult(amp, log_abs, False, profile)


# ---------------------------------------------------------------------------
# SEBD sampling


@dataclass
class SebdResult:
    outcomes: list
    log_prob: float
    aborted: bool
    profile: list


def sebd_sample(spec, policy, rng, unitaries=None, forced=None):
    """Sample every site of a holographic circuit column by column.

    ``outcomes[y][x]`` is the computational-basis outcome of site ``(x, y)``;
    ``forced`` (same layout) fixes outcomes and returns their exact
    probability through ``log_prob`` (``-inf`` when impossible).
    """
    lat = spec.lattice
    Lx, Ly = lat.width, lat.height
    chis = spec.edge_chi()
    layout = _leg_layout(lat, chis)
    if unitaries is None:
        unitaries = [statevec.haar_unitary(d, rng) for d in spec.site_dims()]

    def hchi(x, y):
        return chis[(lat.index(x, y), lat.index(x + 1, y))] if x < Lx - 1 else 1

    def vchi(x, y):
        return chis[(lat.index(x, y), lat.index(x, y + 1))] if y < Ly - 1 else 1

    # boundary state: legs (bond_below, left-leg of the current column, bond_above)
    phi = [np.ones((1, 1, 1), dtype=complex) for _ in range(Ly)]
    outcomes = [[None] * Lx for _ in range(Ly)]
    log_prob, profile, mid = 0.0, [], Ly // 2
    for x in range(Lx):
        cols = []
        for y in range(Ly):
            i = lat.index(x, y)
            cl = phi[y].shape[1]
            cd = vchi(x, y - 1) if y > 0 else 1
            cu, cr = vchi(x, y), hchi(x, y)
            # site legs: d, l, r, u (unit dims dropped later by reshape); right bond gives (r, r')
            F = phi[y]  # (a, l, b)
            wr = spec.bond_vector(cr).reshape(cr, cr) if cr > 1 else np.ones((1, 1), complex)
            wu = np.eye(cu, dtype=complex)  # lower half of the vertical bond: (u, k)
            t = np.einsum("alb,rs,uk->albrsuk", F, wr, wu)
            if y > 0:
                wd = spec.bond_vector(cd).reshape(cd, cd) if cd > 1 else np.ones((1, 1), complex)
                # incoming bond index k' pairs with this site's down leg d via omega[k', d]
                t = np.einsum("albrsuk,jd->ajdlbrsuk", t, wd)
            else:
                t = t[:, None, None]
            # t: (a, j, d, l, b, r, s, u, k) -> left bond (a, j), site (d, l, r, u), r' = s, right bond (b, k)
            a, j, d, l, b, r, s, u, k = t.shape
            t = np.transpose(t, (0, 1, 2, 3, 5, 7, 6, 4, 8)).reshape(a * j, d * l * r * u, s, b * k)
            U = unitaries[i]
            t = np.einsum("pq,aqsb->apsb", U, t)
            cols.append(t)
        # right-canonicalise from the top
        for y in range(Ly - 1, 0, -1):
            a, p, s, b = cols[y].shape
            q_, r_ = np.linalg.qr(cols[y].reshape(a, p * s * b).T)
            cols[y] = q_.T.reshape(-1, p, s, b)
            cols[y - 1] = np.tensordot(cols[y - 1], r_.T, axes=(3, 0))
        R = np.ones((1, 1), dtype=complex)
        new_phi = []
        for y in range(Ly):
            N = np.tensordot(R, cols[y], axes=(1, 0))  # (k, p, s, b)
            w = np.einsum("kpsb,kpsb->p", N, N.conj()).real
            tot = w.sum()
            pr = w / tot
            if forced is not None:
                o = int(forced[y][x])
            else:
                o = int(rng.choice(len(pr), p=pr))
            outcomes[y][x] = o
            if pr[o] <= 0.0:
                return SebdResult(outcomes, -math.inf, False, profile)
            log_prob += math.log(pr[o])
            M = N[:, o] / math.sqrt(w[o])
            kk, s, b = M.shape
            q_, R = np.linalg.qr(M.reshape(kk * s, b))
            new_phi.append(q_.reshape(kk, s, -1))
        phi = new_phi
        mps = BoundaryMPS(phi)
        demanded, disc, ent = compress(mps, policy, entropy_bond=mid if Ly > 1 else None)
        phi = mps.tensors
        aborted = demanded > policy.chi_max and disc > policy.abort_tol
        profile.append({"t": x + 1, "chi_used": max(mps.bond_dims, default=1), "discarded": disc,
                        "half_chain_entropy": ent, "aborted": aborted})
        if aborted:
            return SebdResult(outcomes, log_prob, True, profile)
    return SebdResult(outcomes, log_prob, False, profile)


def sebd_distribution(spec, policy, unitaries):
    """Probability of every full outcome string under SEBD (forced-outcome enumeration)."""
    import itertools

    lat = spec.lattice
    dims = spec.site_dims()
    probs = np.zeros(math.prod(dims))
    for flat, combo in enumerate(itertools.product(*[range(d) for d in dims])):
        forced = [[combo[lat.index(x, y)] for x in range(lat.width)] for y in range(lat.height)]
        res = sebd_sample(spec, policy, None, unitaries=unitaries, forced=forced)
        probs[flat] = math.exp(res.log_prob) if math.isfinite(res.log_prob) else 0.0
    return probs
