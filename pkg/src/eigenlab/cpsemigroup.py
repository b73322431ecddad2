"""CP semigroups on matrix algebras.

Generators are kept in Lindblad form.  Superoperators act on row-major
vectorisations, where ``vec(A X B) = (A kron B^T) vec(X)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.linalg import expm
from scipy.sparse.csgraph import connected_components

from .densop import (
    DensityOperator,
    as_density,
    as_hermitian,
    matrix_from_json,
    matrix_to_json,
    random_density,
    support_isometry,
    support_projection,
    trace_norm_distance,
)
from .eigenlist import EigenvalueList
from .errors import BadDim, DimMismatch, NotFaithful, NotInvariant, NotUnital

DIM_CAP = 8
UNITAL_TOL = 1e-12
INVARIANCE_TOL = 1e-9
JITTER = 1e-8


@dataclass(frozen=True)
class LindbladGenerator:
    """``L(x) = i[H, x] + sum_j (v_j* x v_j - {v_j* v_j, x}/2)`` in the Heisenberg picture."""

    dim: int
    hamiltonian: np.ndarray
    jumps: tuple

    def __post_init__(self):
        if self.dim < 1:
            raise BadDim("generator dimension must be positive")
        h = as_hermitian(self.hamiltonian)
        if h.shape != (self.dim, self.dim):
            raise DimMismatch(f"Hamiltonian must be {self.dim}x{self.dim}")
        jumps = tuple(np.asarray(v, dtype=complex) for v in self.jumps)
        for v in jumps:
            if v.shape != (self.dim, self.dim):
                raise DimMismatch(f"jump operator has shape {v.shape}")
        object.__setattr__(self, "hamiltonian", h)
        object.__setattr__(self, "jumps", jumps)
        dev = float(np.max(np.abs(self.heisenberg(np.eye(self.dim)))))
        if dev > UNITAL_TOL:
            raise NotUnital(f"L(1) deviates from 0 by {dev:.3g}")

    def heisenberg(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=complex)
        h = self.hamiltonian
        out = 1j * (h @ x - x @ h)
        for v in self.jumps:
            vd = v.conj().T
            vdv = vd @ v
            out = out + vd @ x @ v - 0.5 * (vdv @ x + x @ vdv)
        return out

    def schrodinger(self, rho) -> np.ndarray:
        rho = np.asarray(rho, dtype=complex)
        h = self.hamiltonian
        out = -1j * (h @ rho - rho @ h)
        for v in self.jumps:
            vd = v.conj().T
            vdv = vd @ v
            out = out + v @ rho @ vd - 0.5 * (vdv @ rho + rho @ vdv)
        return out

    def heisenberg_matrix(self) -> np.ndarray:
        n = self.dim
        eye = np.eye(n)
        h = self.hamiltonian
        sup = 1j * (np.kron(h, eye) - np.kron(eye, h.T))
        for v in self.jumps:
            vd = v.conj().T
            vdv = vd @ v
            sup = sup + np.kron(vd, v.T) - 0.5 * (np.kron(vdv, eye) + np.kron(eye, vdv.T))
        return sup

    def schrodinger_matrix(self) -> np.ndarray:
        n = self.dim
        eye = np.eye(n)
        h = self.hamiltonian
        sup = -1j * (np.kron(h, eye) - np.kron(eye, h.T))
        for v in self.jumps:
            vd = v.conj().T
            vdv = vd @ v
            sup = sup + np.kron(v, vd.T) - 0.5 * (np.kron(vdv, eye) + np.kron(eye, vdv.T))
        return sup

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "hamiltonian": matrix_to_json(self.hamiltonian),
            "jumps": [matrix_to_json(v) for v in self.jumps],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "LindbladGenerator":
        return cls(
            int(obj["dim"]),
            matrix_from_json(obj["hamiltonian"]),
            tuple(matrix_from_json(v) for v in obj["jumps"]),
        )


@dataclass(frozen=True)
class CPSemigroup:
    generator: LindbladGenerator
    heisenberg_sup: np.ndarray = field(init=False, repr=False, compare=False)
    schrodinger_sup: np.ndarray = field(init=False, repr=False, compare=False)
    dim_cap: int = DIM_CAP

    def __post_init__(self):
        if self.generator.dim > self.dim_cap:
            raise BadDim(f"dimension {self.generator.dim} exceeds cap {self.dim_cap}")
        hs = self.generator.heisenberg_matrix()
        ss = self.generator.schrodinger_matrix()
        hs.setflags(write=False)
        ss.setflags(write=False)
        object.__setattr__(self, "heisenberg_sup", hs)
        object.__setattr__(self, "schrodinger_sup", ss)

    @property
    def dim(self) -> int:
        return self.generator.dim

    def heisenberg_map(self, t: float) -> np.ndarray:
        """Superoperator matrix of ``phi_t``."""
        if t < 0:
            raise ValueError("t must be nonnegative")
        return expm(t * self.heisenberg_sup)

    def predual_map(self, t: float) -> np.ndarray:
        if t < 0:
            raise ValueError("t must be nonnegative")
        return expm(t * self.schrodinger_sup)


def build_detailed_balance_generator(
    omega, rate_scale: float = 1.0, dephasing: float = 0.0, dim: int | None = None
) -> LindbladGenerator:
    """Generator with ``diag(omega)`` invariant.

    Jumps are ``sqrt(g_ij) e_ij`` for ``i != j`` with ``g_ij = rate_scale *
    sqrt(omega_i / omega_j)``, so ``g_ij omega_j = g_ji omega_i``; with
    ``e_ij = |i><j|`` population flows from ``j`` to ``i`` at rate ``g_ij``.
    Optional dephasing adds ``sqrt(dephasing) e_ii``.
    """
    raw = np.asarray(omega.values if isinstance(omega, EigenvalueList) else omega, dtype=float)
    r = raw.size if dim is None else int(dim)
    if raw.size < r or np.any(raw[:r] <= 0):
        raise NotFaithful("invariant state must have strictly positive weights on every level")
    if raw.size > r:
        raise BadDim(f"{raw.size} weights given for dimension {r}")
    if r < 2:
        raise BadDim("need at least two levels")
    if abs(raw.sum() - 1.0) > 1e-10:
        raise NotFaithful(f"weights sum to {raw.sum()!r}, not 1")
    if rate_scale <= 0 or dephasing < 0:
        raise ValueError("rate_scale must be positive and dephasing nonnegative")
    jumps = []
    for i in range(r):
        for j in range(r):
            if i == j:
                continue
            v = np.zeros((r, r), dtype=complex)
            v[i, j] = np.sqrt(rate_scale * np.sqrt(raw[i] / raw[j]))
            jumps.append(v)
    if dephasing > 0:
        for i in range(r):
            v = np.zeros((r, r), dtype=complex)
            v[i, i] = np.sqrt(dephasing)
            jumps.append(v)
    return LindbladGenerator(r, np.zeros((r, r)), tuple(jumps))


def jump_rate(gen: LindbladGenerator, i: int, j: int) -> float:
    """Total rate ``sum |v[i, j]|**2`` carried by the jumps from ``j`` to ``i``."""
    return float(sum(abs(v[i, j]) ** 2 for v in gen.jumps))


def invariance_deviation(gen: LindbladGenerator, omega) -> float:
    """``max |L_*(Omega)|``, i.e. how far ``omega o L`` is from zero."""
    return float(np.max(np.abs(gen.schrodinger(np.asarray(omega, dtype=complex)))))


def _vec(x) -> np.ndarray:
    return np.asarray(x, dtype=complex).ravel()


def evolve_state(sg: CPSemigroup, rho, t: float) -> DensityOperator:
    r = as_density(rho)
    if r.dim != sg.dim:
        raise DimMismatch(f"state has dim {r.dim}, semigroup has {sg.dim}")
    if t == 0:
        return r
    out = (sg.predual_map(t) @ _vec(r.matrix)).reshape(sg.dim, sg.dim)
    return DensityOperator(out)


def heisenberg_apply(sg: CPSemigroup, x, t: float) -> np.ndarray:
    x = np.asarray(x, dtype=complex)
    if x.shape != (sg.dim, sg.dim):
        raise DimMismatch(f"observable must be {sg.dim}x{sg.dim}")
    return (sg.heisenberg_map(t) @ _vec(x)).reshape(sg.dim, sg.dim)


def choi_matrix(sg: CPSemigroup, t: float) -> np.ndarray:
    """``sum_ab E_ab (x) phi_t(E_ab)``; PSD exactly when ``phi_t`` is CP."""
    n = sg.dim
    phi = sg.heisenberg_map(t)
    out = np.zeros((n * n, n * n), dtype=complex)
    for col in range(n * n):
        a, b = divmod(col, n)
        unit = np.zeros((n, n))
        unit[a, b] = 1.0
        out += np.kron(unit, (phi[:, col]).reshape(n, n))
    return out


def is_strongly_connected(gen: LindbladGenerator, tol: float = 1e-14) -> bool:
    adj = np.zeros((gen.dim, gen.dim))
    for v in gen.jumps:
        adj += np.abs(v) ** 2
    np.fill_diagonal(adj, 0.0)
    n, _ = connected_components(adj > tol, directed=True, connection="strong")
    return n == 1


@dataclass(frozen=True)
class AbsorbingTrial:
    seed: int
    distances: list
    final: float
    monotone: bool


@dataclass(frozen=True)
class AbsorbingReport:
    ergodic: bool
    t_grid: list
    trials: list

    @property
    def worst_final(self) -> float:
        return max((tr.final for tr in self.trials), default=0.0)


def verify_absorbing(
    sg: CPSemigroup,
    omega,
    trials: int = 20,
    t_grid: Sequence[float] = (0.0, 1.0, 5.0, 10.0, 50.0),
    seed: int = 0,
    initial: Sequence | None = None,
) -> AbsorbingReport:
    """Trace distance to ``omega`` along ``t_grid`` for random initial states.

    A disconnected jump graph is reported through ``ergodic`` rather than
    raised; convergence is then not guaranteed.
    """
    om = as_density(omega)
    dev = invariance_deviation(sg.generator, om.matrix)
    if dev > INVARIANCE_TOL:
        raise NotInvariant(f"omega is not invariant: deviation {dev:.3g}")
    grid = [float(t) for t in t_grid]
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("t_grid must be strictly increasing")
    maps = [sg.predual_map(t) for t in grid]
    if initial is None:
        starts = [(seed + i, random_density(sg.dim, seed=seed + i)) for i in range(trials)]
    else:
        starts = [(i, as_density(r)) for i, r in enumerate(initial)]
    out = []
    for s, rho in starts:
        v = _vec(rho.matrix)
        dists = [
            trace_norm_distance((m @ v).reshape(sg.dim, sg.dim), om.matrix) for m in maps
        ]
        mono = all(b <= a + JITTER for a, b in zip(dists, dists[1:]))
        out.append(AbsorbingTrial(s, dists, dists[-1], mono))
    return AbsorbingReport(is_strongly_connected(sg.generator), grid, out)


def semigroup_property_check(sg: CPSemigroup, s_t_pairs: Sequence[tuple[float, float]]) -> float:
    """Largest spectral-norm gap between ``phi_s o phi_t`` and ``phi_{s+t}``."""
    worst = 0.0
    for s, t in s_t_pairs:
        gap = sg.heisenberg_map(s) @ sg.heisenberg_map(t) - sg.heisenberg_map(s + t)
        worst = max(worst, float(np.linalg.norm(gap, 2)))
    return worst


# -- compression of a unital CP map to the support of an invariant state ----


def kraus_heisenberg(kraus: Sequence[np.ndarray], x) -> np.ndarray:
    """``Phi(x) = sum K* x K``."""
    x = np.asarray(x, dtype=complex)
    return sum(k.conj().T @ x @ k for k in kraus)


def kraus_predual(kraus: Sequence[np.ndarray], rho) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    return sum(k @ rho @ k.conj().T for k in kraus)


@dataclass(frozen=True)
class CompressionReport:
    projection: np.ndarray
    isometry: np.ndarray
    monotone: bool
    compressed_kraus: tuple
    corner_deviation: float
    invariance_deviation: float

    def compressed(self, x) -> np.ndarray:
        """Apply the compressed map to an operator on the support."""
        return kraus_heisenberg(self.compressed_kraus, x)


def compress_unital_cp(
    kraus: Sequence, omega, trials: int = 16, seed: int = 0, tol: float = INVARIANCE_TOL
) -> CompressionReport:
    """Compress ``Phi`` to the corner cut out by the support of ``omega``.

    Invariance gives ``Phi(P) >= P``; for a CP map this forces
    ``P_perp K P = 0`` for every Kraus operator, which is what makes
    ``P Phi(A) P = P Phi(P A P) P`` hold.
    """
    kraus = tuple(np.asarray(k, dtype=complex) for k in kraus)
    om = as_density(omega)
    n = om.dim
    if any(k.shape != (n, n) for k in kraus):
        raise DimMismatch(f"Kraus operators must be {n}x{n}")
    unit_dev = float(np.max(np.abs(kraus_heisenberg(kraus, np.eye(n)) - np.eye(n))))
    if unit_dev > tol:
        raise NotUnital(f"sum K*K deviates from 1 by {unit_dev:.3g}")
    inv_dev = float(np.max(np.abs(kraus_predual(kraus, om.matrix) - om.matrix)))
    if inv_dev > tol:
        raise NotInvariant(f"omega o Phi deviates from omega by {inv_dev:.3g}")

    p = support_projection(om)
    gap = as_hermitian(kraus_heisenberg(kraus, p) - p, tol=1e-8)
    monotone = bool(np.linalg.eigvalsh(gap)[0] >= -tol)

    rng = np.random.default_rng(seed)
    corner = 0.0
    for _ in range(trials):
        a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        lhs = p @ kraus_heisenberg(kraus, a) @ p
        rhs = p @ kraus_heisenberg(kraus, p @ a @ p) @ p
        corner = max(corner, float(np.max(np.abs(lhs - rhs))))

    v = support_isometry(om)
    comp = tuple(v.conj().T @ k @ v for k in kraus)
    om_c = v.conj().T @ om.matrix @ v
    comp_dev = float(np.max(np.abs(kraus_predual(comp, om_c) - om_c)))
    return CompressionReport(p, v, monotone, comp, corner, comp_dev)
