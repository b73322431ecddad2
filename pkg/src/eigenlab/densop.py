"""Finite-dimensional density operators and trace-class positives.

Matrices are plain complex ``numpy`` arrays validated by :func:`as_hermitian`;
states are wrapped in :class:`DensityOperator` so their invariants are
checked once, at construction.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .eigenlist import EigenvalueList, l1_distance
from .errors import (
    BadSpectrum,
    DimMismatch,
    NotAState,
    NotHermitian,
    NotPSD,
    ParseError,
    ShapeMismatch,
)

HERM_TOL = 1e-12
PSD_TOL = 1e-10
TRACE_TOL = 1e-10
RANK_TOL = 1e-10
WEYL_SLACK = 1e-9


def as_hermitian(a, tol: float = HERM_TOL) -> np.ndarray:
    """Return ``(a + a*)/2`` after checking ``a`` is Hermitian within ``tol``."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimMismatch(f"expected a square matrix, got shape {m.shape}")
    dev = float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0
    if dev > tol:
        raise NotHermitian(f"Hermitian deviation {dev:.3g} exceeds {tol:g}")
    return (m + m.conj().T) / 2


def _eigvalsh(a) -> np.ndarray:
    return np.linalg.eigvalsh(as_hermitian(a))


class DensityOperator:
    """Hermitian PSD trace-one matrix; the finite model of a normal state."""

    __slots__ = ("_m",)

    def __init__(self, matrix, psd_tol: float = PSD_TOL, trace_tol: float = TRACE_TOL):
        m = as_hermitian(matrix)
        tr = float(np.trace(m).real)
        if abs(tr - 1.0) > trace_tol:
            raise NotAState(f"trace {tr!r} differs from 1 by more than {trace_tol:g}")
        lo = float(np.linalg.eigvalsh(m)[0]) if m.size else 0.0
        if lo < -psd_tol:
            raise NotPSD(f"smallest eigenvalue {lo:.3g} below -{psd_tol:g}")
        m.setflags(write=False)
        self._m = m

    @property
    def matrix(self) -> np.ndarray:
        return self._m

    @property
    def dim(self) -> int:
        return self._m.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self._m if dtype is None else self._m.astype(dtype)

    def expect(self, x) -> complex:
        return complex(np.trace(self._m @ np.asarray(x)))

    def eigenlist(self) -> EigenvalueList:
        return eigenlist_of(self._m)

    def __repr__(self) -> str:
        return f"DensityOperator(dim={self.dim})"


def _mat(a) -> np.ndarray:
    return a.matrix if isinstance(a, DensityOperator) else np.asarray(a, dtype=complex)


def as_density(r) -> DensityOperator:
    return r if isinstance(r, DensityOperator) else DensityOperator(r)


def eigenlist_of(a, require_psd: bool = True, psd_tol: float = PSD_TOL) -> EigenvalueList:
    """Eigenvalue list of a Hermitian matrix.

    With ``require_psd=False`` negative eigenvalues are dropped, i.e. the list
    of the positive part is returned.
    """
    w = _eigvalsh(_mat(a))
    if require_psd:
        if w.size and w[0] < -psd_tol:
            raise NotPSD(f"eigenvalue {w[0]:.3g} below -{psd_tol:g}")
        return EigenvalueList(w, neg_tol=psd_tol)
    return EigenvalueList(np.clip(w, 0.0, None))


def _same_dim(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise DimMismatch(f"shapes {a.shape} and {b.shape} differ")


def trace_norm_distance(a, b) -> float:
    """``trace|A - B|`` for Hermitian ``A``, ``B``."""
    a, b = _mat(a), _mat(b)
    _same_dim(a, b)
    return float(np.abs(_eigvalsh(a - b)).sum())


@dataclass(frozen=True)
class WeylReport:
    lhs: float
    rhs: float
    holds: bool


def _check_psd(a: np.ndarray, name: str) -> None:
    lo = _eigvalsh(a)[0]
    if lo < -PSD_TOL:
        raise NotPSD(f"{name} has eigenvalue {lo:.3g}")


def check_weyl(a, b, slack: float = WEYL_SLACK) -> WeylReport:
    """Compare ``||Lambda(A) - Lambda(B)||_1`` against ``trace|A - B|``."""
    a, b = _mat(a), _mat(b)
    _same_dim(a, b)
    _check_psd(a, "A")
    _check_psd(b, "B")
    lhs = l1_distance(eigenlist_of(a), eigenlist_of(b))
    rhs = trace_norm_distance(a, b)
    return WeylReport(lhs, rhs, lhs <= rhs + slack)


def _check_shape(dims: Sequence[int], dim: int) -> tuple[int, ...]:
    dims = tuple(int(x) for x in dims)
    if not dims or any(x < 1 for x in dims):
        raise ShapeMismatch(f"factor dims must be positive, got {dims}")
    if int(np.prod(dims)) != dim:
        raise ShapeMismatch(f"factors {dims} do not multiply to {dim}")
    return dims


def partial_trace(r, shape: Sequence[int], keep) -> DensityOperator | np.ndarray:
    """Trace out every factor of ``shape`` not listed in ``keep``.

    Kept factors stay in their original order.  A :class:`DensityOperator`
    input yields a :class:`DensityOperator`; a bare matrix yields a matrix.
    """
    m = _mat(r)
    dims = _check_shape(shape, m.shape[0])
    keep = sorted(set(int(k) for k in keep))
    if not keep or keep[0] < 0 or keep[-1] >= len(dims):
        raise ShapeMismatch(f"keep={keep} is not a nonempty subset of 0..{len(dims) - 1}")
    n = len(dims)
    t = m.reshape(dims + dims)
    letters = "abcdefghijklmnopqrstuvwxyz"
    if 2 * n > len(letters):
        raise ShapeMismatch("too many tensor factors")
    row = list(letters[:n])
    col = list(letters[n : 2 * n])
    for i in range(n):
        if i not in keep:
            col[i] = row[i]
    out_sub = "".join(row[i] for i in keep) + "".join(col[i] for i in keep)
    reduced = np.einsum("".join(row) + "".join(col) + "->" + out_sub, t)
    kd = int(np.prod([dims[i] for i in keep]))
    reduced = reduced.reshape(kd, kd)
    if isinstance(r, DensityOperator):
        return DensityOperator(reduced)
    return reduced


def tensor_states(r, s) -> DensityOperator:
    return DensityOperator(np.kron(_mat(r), _mat(s)))


@dataclass(frozen=True)
class SingularListReport:
    gram: EigenvalueList
    outer: EigenvalueList
    equal: bool


def singular_list_check(l, tol: float = 1e-10) -> SingularListReport:
    """Nonzero spectra of ``L*L`` and ``LL*`` must coincide."""
    l = np.asarray(l, dtype=complex)
    if l.ndim == 1:
        l = l[:, None]
    gram = eigenlist_of(l.conj().T @ l)
    outer = eigenlist_of(l @ l.conj().T)
    return SingularListReport(gram, outer, l1_distance(gram, outer) <= tol)


def support_projection(r, rank_tol: float = RANK_TOL) -> np.ndarray:
    m = as_hermitian(_mat(r))
    w, v = np.linalg.eigh(m)
    cols = v[:, w > rank_tol]
    return cols @ cols.conj().T


def support_isometry(r, rank_tol: float = RANK_TOL) -> np.ndarray:
    """Columns form an orthonormal basis of the support of ``r``."""
    w, v = np.linalg.eigh(as_hermitian(_mat(r)))
    return v[:, w > rank_tol][:, ::-1]


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar unitary via QR of a complex Ginibre matrix with phase correction."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, rr = np.linalg.qr(z)
    d = np.diag(rr)
    return q * (d / np.abs(d))


def random_psd(dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    rank = dim if rank is None else rank
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    return g @ g.conj().T


def random_density(dim: int, spectrum=None, seed: int = 0) -> DensityOperator:
    """Deterministic random state; a given ``spectrum`` is conjugated by a Haar unitary."""
    if dim < 1:
        raise BadSpectrum("dim must be positive")
    rng = np.random.default_rng(seed)
    if spectrum is None:
        p = random_psd(dim, rng)
        return DensityOperator(p / np.trace(p).real)
    spec = spectrum if isinstance(spectrum, EigenvalueList) else EigenvalueList(spectrum)
    if spec.support > dim:
        raise BadSpectrum(f"spectrum has {spec.support} nonzero entries but dim is {dim}")
    if abs(spec.total() - 1.0) > TRACE_TOL:
        raise BadSpectrum(f"spectrum sums to {spec.total()!r}")
    u = random_unitary(dim, rng)
    diag = spec.padded(dim)[:dim]
    return DensityOperator((u * diag) @ u.conj().T)


def matrix_to_json(a) -> dict:
    m = _mat(a)
    return {
        "dim": int(m.shape[0]),
        "entries": [[float(z.real), float(z.imag)] for z in m.ravel()],
    }


def matrix_from_json(obj) -> np.ndarray:
    if isinstance(obj, str):
        obj = json.loads(obj)
    try:
        dim = int(obj["dim"])
        entries = obj["entries"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"matrix JSON needs 'dim' and 'entries': {exc}") from None
    if dim < 1 or len(entries) != dim * dim:
        raise ParseError(f"expected {dim * dim} entries, got {len(entries)}")
    try:
        flat = np.array([complex(float(re), float(im)) for re, im in entries])
    except (TypeError, ValueError) as exc:
        raise ParseError(f"entries must be [re, im] pairs: {exc}") from None
    return flat.reshape(dim, dim)


def sqrt_psd(r) -> np.ndarray:
    """Spectral square root; tiny negative eigenvalues are clamped to zero."""
    w, v = np.linalg.eigh(as_hermitian(_mat(r)))
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T
