"""Stabilizer tableaux, random Cliffords and tripartite entanglement shapes.

A Pauli row is ``i^p X^x Z^z`` with ``p`` mod 4 and bit vectors ``x``, ``z``.
The tableau keeps ``n`` destabilizer rows followed by ``n`` stabilizer rows.
Entropies are returned in ebits (multiples of ``ln 2``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# ---------------------------------------------------------------------------
# GF(2) linear algebra on bit rows packed into Python integers


def _pack(rows):
    rows = np.asarray(rows, dtype=np.uint8)
    if rows.size == 0:
        return []
    weights = [1 << k for k in range(rows.shape[1])]
    return [sum(w for w, b in zip(weights, r) if b) for r in rows]


def gf2_rank(rows):
    """Rank over GF(2) of a 0/1 matrix."""
    pivots = {}
    rank = 0
    for r in _pack(rows):
        while r:
            top = r.bit_length() - 1
            if top in pivots:
                r ^= pivots[top]
            else:
                pivots[top] = r
                rank += 1
                break
    return rank


def gf2_nullspace(mat):
    """Basis (rows) of ``{c : c @ mat = 0 mod 2}``."""
    mat = np.asarray(mat, dtype=np.uint8) % 2
    n = mat.shape[0]
    # augment with the identity and eliminate on the left block
    aug = np.concatenate([mat, np.eye(n, dtype=np.uint8)], axis=1)
    r = 0
    for col in range(mat.shape[1]):
        piv = next((i for i in range(r, n) if aug[i, col]), None)
        if piv is None:
            continue
        aug[[r, piv]] = aug[[piv, r]]
        for i in range(n):
            if i != r and aug[i, col]:
                aug[i] ^= aug[r]
        r += 1
    return aug[r:, mat.shape[1]:]


def symplectic_form(a, b):
    n = len(a) // 2
    return int((np.dot(a[:n], b[n:]) + np.dot(a[n:], b[:n])) % 2)


# ---------------------------------------------------------------------------
# Clifford elements


@dataclass(frozen=True)
class Clifford:
    """Images of ``X_1..X_k, Z_1..Z_k`` under conjugation, as Pauli rows."""

    k: int
    x: np.ndarray
    z: np.ndarray
    p: np.ndarray

    def key(self):
        return (self.x.tobytes(), self.z.tobytes(), self.p.tobytes())

    def symplectic(self):
        return np.concatenate([self.x, self.z], axis=1)


def identity_clifford(k):
    eye = np.eye(k, dtype=np.uint8)
    zero = np.zeros((k, k), dtype=np.uint8)
    return Clifford(k, np.concatenate([eye, zero]), np.concatenate([zero, eye]), np.zeros(2 * k, dtype=np.int64))


def random_symplectic(n, rng):
    """Uniform element of Sp(2n, 2) as a ``2n x 2n`` matrix whose rows are images of X_j, Z_j.

    Pairs ``(v_j, w_j)`` with ``omega(v_j, w_j) = 1`` are drawn one at a time from
    the symplectic complement of the previous pairs.
    """
    basis = [row for row in np.eye(2 * n, dtype=np.uint8)]
    vs, ws = [], []
    for _ in range(n):
        B = np.array(basis, dtype=np.uint8)
        while True:
            c = rng.integers(0, 2, len(basis), dtype=np.uint8)
            if c.any():
                break
        v = (c @ B) % 2
        while True:
            w = (rng.integers(0, 2, len(basis), dtype=np.uint8) @ B) % 2
            if symplectic_form(v, w) == 1:
                break
        vs.append(v)
        ws.append(w)
        proj = [(u + symplectic_form(u, w) * v + symplectic_form(u, v) * w) % 2 for u in basis]
        basis = _independent(proj)
    return np.array(vs + ws, dtype=np.uint8)


def _independent(vectors):
    out, pivots = [], {}
    for v in vectors:
        r = int("".join(str(int(b)) for b in v[::-1]), 2) if len(v) else 0
        while r:
            top = r.bit_length() - 1
            if top in pivots:
                r ^= pivots[top]
            else:
                pivots[top] = r
                out.append(v)
                break
    return out


def random_clifford(n, rng):
    """Uniformly random ``n``-qubit Clifford (modulo global phase)."""
    if n > 64:
        raise ValueError("random_clifford supports at most 64 qubits")
    S = random_symplectic(n, rng)
    x, z = S[:, :n].copy(), S[:, n:].copy()
    signs = rng.integers(0, 2, 2 * n)
    p = (np.sum(x.astype(np.int64) * z, axis=1) + 2 * signs) % 4
    return Clifford(n, x, z, p)


# ---------------------------------------------------------------------------
# tableau


class Tableau:
    """Stabilizer state on ``n`` qubits with destabilizers (Aaronson-Gottesman layout)."""

    def __init__(self, n):
        self.n = n
        self.x = np.zeros((2 * n, n), dtype=np.uint8)
        self.z = np.zeros((2 * n, n), dtype=np.uint8)
        self.p = np.zeros(2 * n, dtype=np.int64)
        self.x[np.arange(n), np.arange(n)] = 1
        self.z[n + np.arange(n), np.arange(n)] = 1

    def copy(self):
        t = Tableau.__new__(Tableau)
        t.n, t.x, t.z, t.p = self.n, self.x.copy(), self.z.copy(), self.p.copy()
        return t

    @property
    def stabilizers(self):
        n = self.n
        return self.x[n:], self.z[n:], self.p[n:]

    def generator_matrix(self):
        return np.concatenate([self.x[self.n :], self.z[self.n :]], axis=1)

    # -- gates

    def apply_clifford(self, cliff, qubits):
        qubits = list(qubits)
        if len(qubits) != cliff.k:
            raise ValueError("qubit count does not match the Clifford")
        bits = np.concatenate([self.x[:, qubits], self.z[:, qubits]], axis=1).astype(np.int64)
        nx = (bits @ cliff.x) % 2
        nz = (bits @ cliff.z) % 2
        cross = np.triu((cliff.z.astype(np.int64) @ cliff.x.T.astype(np.int64)) % 2, 1)
        phase = bits @ cliff.p + 2 * np.einsum("ra,ab,rb->r", bits, cross, bits)
        self.p = (self.p + phase) % 4
        self.x[:, qubits] = nx
        self.z[:, qubits] = nz
        return self

    def h(self, a):
        return self.apply_clifford(Clifford(1, np.array([[0], [1]], np.uint8), np.array([[1], [0]], np.uint8), np.zeros(2, np.int64)), [a])

    def cnot(self, c, t):
        x = np.array([[1, 1], [0, 1], [0, 0], [0, 0]], np.uint8)
        z = np.array([[0, 0], [0, 0], [1, 0], [1, 1]], np.uint8)
        return self.apply_clifford(Clifford(2, x, z, np.zeros(4, np.int64)), [c, t])

    # -- row algebra

    def _rowmul(self, h, i):
        """Row ``h`` <- row ``i`` times row ``h``."""
        ph = self.p[i] + self.p[h] + 2 * int(np.dot(self.z[i].astype(np.int64), self.x[h]))
        self.p[h] = ph % 4
        self.x[h] ^= self.x[i]
        self.z[h] ^= self.z[i]

    def measure_z(self, a, rng=None, forced=None):
        """Measure qubit ``a`` in the Z basis; returns ``(bit, probability)``."""
        n = self.n
        hits = np.nonzero(self.x[n:, a])[0]
        if hits.size:
            prow = n + int(hits[0])
            for i in range(2 * n):
                if i != prow and self.x[i, a]:
                    self._rowmul(i, prow)
            self.x[prow - n], self.z[prow - n], self.p[prow - n] = self.x[prow], self.z[prow], self.p[prow]
            bit = int(forced) if forced is not None else int(rng.integers(0, 2))
            self.x[prow] = 0
            self.z[prow] = 0
            self.z[prow, a] = 1
            self.p[prow] = 2 * bit
            return bit, 0.5
        sx = np.zeros(n, dtype=np.uint8)
        sz = np.zeros(n, dtype=np.uint8)
        sp = 0
        for i in np.nonzero(self.x[:n, a])[0]:
            r = n + int(i)
            sp = sp + self.p[r] + 2 * int(np.dot(self.z[r].astype(np.int64), sx))
            sx ^= self.x[r]
            sz ^= self.z[r]
        bit = (sp % 4) // 2
        if forced is not None and int(forced) != bit:
            raise ValueError("forced outcome has zero probability")
        return int(bit), 1.0

    # -- checks and entropies

    def check(self):
        G = self.generator_matrix()
        n = self.n
        omega = (G[:, :n].astype(np.int64) @ G[:, n:].T + G[:, n:].astype(np.int64) @ G[:, :n].T) % 2
        if omega.any():
            raise AssertionError("stabilizer rows do not commute")
        if gf2_rank(G) != n:
            raise AssertionError("stabilizer rows are not independent")
        if np.any((self.p[n:] - np.sum(self.x[n:].astype(np.int64) * self.z[n:], axis=1)) % 2):
            raise AssertionError("stabilizer rows are not Hermitian")
        return True

    def region_entropy(self, region):
        """Entanglement entropy of ``region`` in ebits."""
        region = sorted(set(region))
        if not region or len(region) >= self.n:
            return 0
        G = self.generator_matrix()
        cols = region + [self.n + r for r in region]
        return gf2_rank(G[:, cols]) - len(region)

    def subgroup_on(self, region):
        """Coefficient vectors of stabilizers supported inside ``region``."""
        outside = [q for q in range(self.n) if q not in set(region)]
        G = self.generator_matrix()
        cols = outside + [self.n + q for q in outside]
        return gf2_nullspace(G[:, cols])


def pauli_on_vector(x, z, p, vec):
    """``i^p X^x Z^z`` applied to a dense vector (qubit 0 is the most significant bit)."""
    n = len(x)
    idx = np.arange(1 << n)
    weights = 1 << (n - 1 - np.arange(n))
    zmask = int(np.dot(z, weights))
    xmask = int(np.dot(x, weights))
    parity = np.array([bin(v).count("1") & 1 for v in (idx & zmask)]) if zmask else np.zeros(1 << n, int)
    u = vec * (1 - 2 * parity)
    out = np.empty_like(u)
    out[idx ^ xmask] = u
    return (1j ** (p % 4)) * out


def tableau_to_state(tab, rng):
    """Dense amplitudes of the stabilizer state (projection of a random vector)."""
    n = tab.n
    v = rng.standard_normal(1 << n) + 1j * rng.standard_normal(1 << n)
    X, Z, P = tab.stabilizers
    for r in range(n):
        v = 0.5 * (v + pauli_on_vector(X[r], Z[r], P[r], v))
    return v / np.linalg.norm(v)


# ---------------------------------------------------------------------------
# tripartite shapes


@dataclass(frozen=True)
class TripartiteShape:
    g: int
    e_HI: int
    e_HJ: int
    e_IJ: int
    local_H: int
    local_I: int
    local_J: int

    def entropy(self, parts):
        """Entropy in ebits that the shape assigns to a union of parts from ``{"H", "I", "J"}``."""
        parts = set(parts)
        if not parts or parts == {"H", "I", "J"}:
            return 0
        if len(parts) == 2:
            parts = {"H", "I", "J"} - parts
        (X,) = parts
        bell = {"H": self.e_HI + self.e_HJ, "I": self.e_HI + self.e_IJ, "J": self.e_HJ + self.e_IJ}
        return self.g + bell[X]


def tripartite_shape(tab, H, I, J):
    """GHZ and Bell-pair counts of a pure stabilizer state split into qubit sets H, I, J."""
    H, I, J = sorted(H), sorted(I), sorted(J)
    if sorted(H + I + J) != list(range(tab.n)):
        raise ValueError("H, I, J must partition the qubits")
    vecs = [tab.subgroup_on(H + I), tab.subgroup_on(H + J), tab.subgroup_on(I + J)]
    stacked = np.concatenate([v for v in vecs if v.size] or [np.zeros((0, tab.n), np.uint8)])
    g = tab.n - gf2_rank(stacked)
    sH, sI, sJ = tab.region_entropy(H), tab.region_entropy(I), tab.region_entropy(J)
    twice = {"HI": sH + sI - sJ - g, "HJ": sH + sJ - sI - g, "IJ": sI + sJ - sH - g}
    if any(v < 0 or v % 2 for v in twice.values()):
        raise ValueError(f"inconsistent entropies {sH, sI, sJ} with g = {g}")
    e = {k: v // 2 for k, v in twice.items()}
    loc = {
        "H": len(H) - g - e["HI"] - e["HJ"],
        "I": len(I) - g - e["HI"] - e["IJ"],
        "J": len(J) - g - e["HJ"] - e["IJ"],
    }
    if any(v < 0 for v in loc.values()):
        raise ValueError("negative local rank")
    return TripartiteShape(g, e["HI"], e["HJ"], e["IJ"], loc["H"], loc["I"], loc["J"])


def ghz_tableau(n):
    t = Tableau(n)
    t.h(0)
    for k in range(1, n):
        t.cnot(0, k)
    return t


def bell_pairs_tableau(n, pairs):
    t = Tableau(n)
    for a, b in pairs:
        t.h(a)
        t.cnot(a, b)
    return t


# ---------------------------------------------------------------------------
# holographic Clifford experiment


def holographic_layout(lattice, m):
    """Qubit indices per site: ``m`` qubits for every incident edge, plus the bond pairs."""
    site_qubits = [[] for _ in range(lattice.n_vertices)]
    pairs = []
    n = 0
    for i, j in lattice.edges:
        for _ in range(m):
            site_qubits[i].append(n)
            site_qubits[j].append(n + 1)
            pairs.append((n, n + 1))
            n += 2
    return n, site_qubits, pairs


def tripartite_mie_experiment(m, lattice, triple, n_samples, rng, c2=0.75, bonds="maximal", cliffords="random"):
    """Frequency of tripartite entanglement among sites ``triple = (H, I, J)`` after measuring the rest.

    Returns the site-level premise (all three site entropies at least one ebit),
    the qubit-level rate (one random qubit per site, all purities below ``c2``),
    Wilson intervals for both, and per-sample shapes.
    """
    H, I, J = triple
    n, site_qubits, pairs = holographic_layout(lattice, m)
    rest = [q for s in range(lattice.n_vertices) if s not in (H, I, J) for q in site_qubits[s]]
    keep = site_qubits[H] + site_qubits[I] + site_qubits[J]
    site_hits = qubit_hits = 0
    rows = []
    for k in range(n_samples):
        tab = Tableau(n)
        if bonds == "maximal":
            for a, b in pairs:
                tab.h(a)
                tab.cnot(a, b)
        for s in range(lattice.n_vertices):
            if not site_qubits[s] or cliffords == "identity":
                continue
            tab.apply_clifford(random_clifford(len(site_qubits[s]), rng), site_qubits[s])
        for q in rest:
            tab.measure_z(q, rng)
        sH, sI, sJ = (tab.region_entropy(site_qubits[x]) for x in (H, I, J))
        site_ok = min(sH, sI, sJ) >= 1
        probes = [int(rng.choice(site_qubits[x])) for x in (H, I, J)]
        purities = [2.0 ** (-tab.region_entropy([qb])) for qb in probes]
        qubit_ok = all(pu < c2 for pu in purities)
        site_hits += site_ok
        qubit_hits += qubit_ok
        sub = _restrict_tableau(tab, keep)
        shape = tripartite_shape(sub, *(_positions(keep, site_qubits[x]) for x in (H, I, J)))
        rows.append({"sample": k, "S_H": sH, "S_I": sI, "S_J": sJ, "g": shape.g, "e_HI": shape.e_HI,
                     "e_HJ": shape.e_HJ, "e_IJ": shape.e_IJ, "pass": bool(site_ok)})
    return {
        "site_premise": site_hits / n_samples,
        "site_premise_ci": wilson_interval(site_hits, n_samples),
        "qubit_rate": qubit_hits / n_samples,
        "qubit_rate_ci": wilson_interval(qubit_hits, n_samples),
        "c2": c2,
        "samples": rows,
    }


def _positions(keep, qubits):
    pos = {q: k for k, q in enumerate(keep)}
    return [pos[q] for q in qubits]


def _restrict_tableau(tab, keep):
    """Pure state on ``keep`` after every other qubit has been measured (those factor out)."""
    keep = list(keep)
    others = [q for q in range(tab.n) if q not in set(keep)]
    G = tab.generator_matrix()
    cols_out = others + [tab.n + q for q in others]
    null = gf2_nullspace(G[:, cols_out])
    X, Z, P = tab.stabilizers
    sub = Tableau(len(keep))
    rows_x, rows_z, rows_p = [], [], []
    for c in null:
        x = np.zeros(tab.n, np.uint8)
        z = np.zeros(tab.n, np.uint8)
        p = 0
        for r in np.nonzero(c)[0]:
            p = p + P[r] + 2 * int(np.dot(z.astype(np.int64), X[r]))
            x ^= X[r]
            z ^= Z[r]
        rows_x.append(x[keep])
        rows_z.append(z[keep])
        rows_p.append(p % 4)
    if len(rows_x) != len(keep):
        raise ValueError("kept qubits are entangled with the measured ones")
    sub.x[len(keep):] = np.array(rows_x)
    sub.z[len(keep):] = np.array(rows_z)
    sub.p[len(keep):] = np.array(rows_p)
    return sub


def wilson_interval(k, n, z=1.959963984540054):
    if n == 0:
        return (0.0, 1.0)
    ph = k / n
    den = 1 + z * z / n
    centre = (ph + z * z / (2 * n)) / den
    half = z * math.sqrt(ph * (1 - ph) / n + z * z / (4 * n * n)) / den
    return (max(0.0, centre - half), min(1.0, centre + half))
