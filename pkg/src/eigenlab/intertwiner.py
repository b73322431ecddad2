"""Unital *-endomorphisms at finite dimension and the identities built on them.

The endomorphism maps ``B(H0)`` into ``B(E (x) H0)`` through the isometries
``v_i(eta) = e_i (x) eta``.  Hilbert-Schmidt operators ``H0 -> H`` are
flattened row-major, i.e. in the basis of matrix units ``e_a e_b*``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .densop import (
    DensityOperator,
    as_density,
    partial_trace,
    random_unitary,
    sqrt_psd,
    trace_norm_distance,
)
from .eigenlist import EigenvalueList, l1_distance
from .errors import DimMismatch, SpanDeficient, TraceMismatch

ISO_TOL = 1e-12


@dataclass(frozen=True)
class IntertwinerModel:
    k: int
    d: int
    isometries: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.k < 1 or self.d < 1:
            raise DimMismatch("k and d must be positive")
        eye = np.eye(self.d)
        vs = []
        for i in range(self.k):
            e = np.zeros((self.k, 1))
            e[i, 0] = 1.0
            v = np.kron(e, eye).astype(complex)
            v.setflags(write=False)
            vs.append(v)
        object.__setattr__(self, "isometries", tuple(vs))
        self._check_relations()

    @property
    def dim(self) -> int:
        return self.k * self.d

    def _check_relations(self) -> None:
        eye = np.eye(self.d)
        for i, vi in enumerate(self.isometries):
            for j, vj in enumerate(self.isometries):
                target = eye if i == j else 0.0
                if np.max(np.abs(vj.conj().T @ vi - target)) > ISO_TOL:
                    raise AssertionError(f"v_{j}* v_{i} is not {'1' if i == j else '0'}")
        total = sum(v @ v.conj().T for v in self.isometries)
        if np.max(np.abs(total - np.eye(self.dim))) > ISO_TOL:
            raise AssertionError("sum of v_i v_i* is not the identity")


def _square(x, n: int, what: str) -> np.ndarray:
    x = np.asarray(x.matrix if isinstance(x, DensityOperator) else x, dtype=complex)
    if x.shape != (n, n):
        raise DimMismatch(f"{what} must be {n}x{n}, got {x.shape}")
    return x


def endomorphism_apply(m: IntertwinerModel, x) -> np.ndarray:
    """``sum_i v_i x v_i*``; accepts any ``d x d`` matrix, not only Hermitian ones."""
    x = _square(x, m.d, "x")
    return sum(v @ x @ v.conj().T for v in m.isometries)


def _state_matrix(m: IntertwinerModel, rho) -> np.ndarray:
    rho = as_density(rho)
    if rho.dim != m.dim:
        raise DimMismatch(f"state has dim {rho.dim}, model needs {m.dim}")
    return rho.matrix


def correlation_operator(m: IntertwinerModel, rho) -> DensityOperator:
    """The ``k x k`` matrix ``A`` with ``<A e_i, e_j> = rho(v_i v_j*)``.

    Entry ``A[j, i]`` is ``trace(R v_i v_j*)``.
    """
    r = _state_matrix(m, rho)
    a = np.empty((m.k, m.k), dtype=complex)
    for i, vi in enumerate(m.isometries):
        for j, vj in enumerate(m.isometries):
            a[j, i] = np.trace(r @ vi @ vj.conj().T)
    return DensityOperator(a)


@dataclass(frozen=True)
class CommutantReport:
    correlation_list: EigenvalueList
    restriction_list: EigenvalueList
    distance: float


def verify_lemma_4_3(m: IntertwinerModel, rho) -> CommutantReport:
    """Compare the correlation operator with the state restricted to ``B(E) (x) 1``."""
    corr = correlation_operator(m, rho).eigenlist()
    restricted = partial_trace(as_density(rho), (m.k, m.d), keep=[0]).eigenlist()
    return CommutantReport(corr, restricted, l1_distance(corr, restricted))


def defect_operator(m: IntertwinerModel, rho) -> np.ndarray:
    """``L`` with column ``j`` equal to ``R^{1/2} v_j`` flattened row-major.

    Shape is ``(k*d*d, k)``: rows index matrix units of ``L2(H0, H)``.
    """
    r_half = sqrt_psd(_state_matrix(m, rho))
    return np.stack([(r_half @ v).ravel() for v in m.isometries], axis=1)


def verify_4_6_1(m: IntertwinerModel, rho) -> float:
    """Largest gap between ``<L*L e_i, e_j>`` and ``rho(v_i v_j*)``."""
    r = _state_matrix(m, rho)
    l = defect_operator(m, rho)
    gram = l.conj().T @ l
    worst = 0.0
    for i, vi in enumerate(m.isometries):
        for j, vj in enumerate(m.isometries):
            direct = np.trace(r @ vi @ vj.conj().T)
            worst = max(worst, abs(gram[j, i] - direct))
    return float(worst)


def rank_one(x, y) -> np.ndarray:
    """The operator ``w -> <w, y> x``."""
    return np.outer(np.asarray(x, dtype=complex), np.asarray(y, dtype=complex).conj())


def verify_4_6_2(m: IntertwinerModel, rho, xi1, xi2, eta1, eta2) -> float:
    """Gap between the two sides of the ``LL*`` bilinear identity.

    ``xi1``, ``eta1`` live in ``H = E (x) H0``; ``xi2``, ``eta2`` live in ``H0``
    because rank-one operators ``xi1 x xi2-bar`` map ``H0`` into ``H``.
    """
    xi1, eta1 = (np.asarray(v, dtype=complex) for v in (xi1, eta1))
    xi2, eta2 = (np.asarray(v, dtype=complex) for v in (xi2, eta2))
    if xi1.shape != (m.dim,) or eta1.shape != (m.dim,):
        raise DimMismatch(f"xi1 and eta1 must have length {m.dim}")
    if xi2.shape != (m.d,) or eta2.shape != (m.d,):
        raise DimMismatch(f"xi2 and eta2 must have length {m.d}")
    r_half = sqrt_psd(_state_matrix(m, rho))
    l = defect_operator(m, rho)
    src = rank_one(xi1, xi2).ravel()
    dst = rank_one(eta1, eta2).ravel()
    lhs = np.vdot(dst, l @ (l.conj().T @ src))
    rhs = np.vdot(r_half @ eta1, endomorphism_apply(m, rank_one(eta2, xi2)) @ (r_half @ xi1))
    return float(abs(lhs - rhs))


def sandwich_operator(a, b) -> np.ndarray:
    """Matrix of ``T -> A T B`` on Hilbert-Schmidt space, built column by column."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimMismatch(f"sandwich needs equal square shapes, got {a.shape}, {b.shape}")
    n = a.shape[0]
    out = np.empty((n * n, n * n), dtype=complex)
    unit = np.zeros((n, n), dtype=complex)
    for col in range(n * n):
        p, q = divmod(col, n)
        unit[p, q] = 1.0
        out[:, col] = (a @ unit @ b).ravel()
        unit[p, q] = 0.0
    return out


@dataclass(frozen=True)
class ConvergenceRow:
    index: int
    weak_deviation: float
    trace_distance: float
    envelope: float


def weak_to_trace_convergence_check(
    family: Sequence, b, spanning, trace_tol: float = 1e-10
) -> list[ConvergenceRow]:
    """Weak deviations on ``spanning`` next to trace-norm distances.

    ``spanning`` holds vectors as columns.  ``envelope`` bounds the trace
    distance by ``n * |S| / s_min(S)**2`` times the weak deviation, a
    finite-dimensional constant that turns weak control into trace-norm control.
    """
    b = np.asarray(b, dtype=complex)
    n = b.shape[0]
    s = np.asarray(spanning, dtype=complex)
    if s.ndim != 2 or s.shape[0] != n:
        raise DimMismatch(f"spanning set must be an {n} x m array of column vectors")
    sv = np.linalg.svd(s, compute_uv=False)
    if sv.size < n or sv[n - 1] <= 1e-12 * max(sv[0], 1.0):
        raise SpanDeficient(f"spanning set has rank below {n}")
    const = n * s.shape[1] / sv[n - 1] ** 2
    tr_b = np.trace(b).real
    rows = []
    for idx, a in enumerate(family):
        a = np.asarray(a, dtype=complex)
        if a.shape != b.shape:
            raise DimMismatch(f"family member {idx} has shape {a.shape}")
        if abs(np.trace(a).real - tr_b) > trace_tol:
            raise TraceMismatch(f"family member {idx} has trace {np.trace(a).real!r}, B has {tr_b!r}")
        weak = float(np.max(np.abs(s.conj().T @ (a - b) @ s)))
        rows.append(ConvergenceRow(idx, weak, trace_norm_distance(a, b), const * weak))
    return rows


def mixing_family(b, times: Sequence[float], seed: int = 0) -> list[np.ndarray]:
    """``(1 - e^-t) B + e^-t U B U*`` for one fixed Haar unitary ``U``.

    Each member has the trace of ``B`` and the trace distance to ``B`` is
    ``e^-t * trace|U B U* - B|``, strictly decreasing in ``t``.
    """
    b = np.asarray(b, dtype=complex)
    u = random_unitary(b.shape[0], np.random.default_rng(seed))
    rotated = u @ b @ u.conj().T
    return [(1 - np.exp(-t)) * b + np.exp(-t) * rotated for t in times]


def product_limit_operator(r, omega) -> np.ndarray:
    """``R o Omega`` on Hilbert-Schmidt space, the weak limit of ``L_t L_t*``."""
    return sandwich_operator(np.asarray(r), np.asarray(omega))
