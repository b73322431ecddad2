"""Eigenvalue lists and their calculus.

An eigenvalue list is a nonincreasing sequence of nonnegative reals with
finite sum, padded conceptually by an infinite run of zeros.  Only the
entries above ``TRIM`` are stored; everything else is an implicit zero.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import NegativeEntry, NotAState, SizeCapExceeded

TRIM = 1e-14
NEG_TOL = 1e-12
EAGER_CAP = 2**20
STATE_TOL = 1e-9

__all__ = [
    "EigenvalueList",
    "CertifiedPrefix",
    "SquareReport",
    "list_from_values",
    "l1_distance",
    "direct_sum",
    "tensor",
    "tensor_top_k",
    "l1_distance_certified",
    "moment",
    "moments",
    "equal_by_moments",
    "tensor_square_equality_implies_equality",
    "uniform",
]


def _canonical(raw, neg_tol: float) -> np.ndarray:
    x = np.asarray(raw, dtype=float).ravel()
    if x.size == 0:
        return np.zeros(0)
    if not np.all(np.isfinite(x)):
        raise NegativeEntry("eigenvalue list entries must be finite")
    lowest = x.min()
    if lowest < -neg_tol:
        raise NegativeEntry(f"entry {lowest!r} is below -{neg_tol:g}")
    x = np.where(x < 0, 0.0, x)
    # stable sort keeps equal entries in input order
    x = -np.sort(-x, kind="stable")
    keep = int(np.count_nonzero(x >= TRIM))
    return x[:keep]


class EigenvalueList:
    """Immutable canonical eigenvalue list.

    >>> EigenvalueList([0.25, 0.75])
    EigenvalueList([0.75, 0.25])
    """

    __slots__ = ("_values",)

    def __init__(self, values: Iterable[float] = (), neg_tol: float = NEG_TOL):
        v = _canonical(list(values) if not isinstance(values, np.ndarray) else values, neg_tol)
        v.setflags(write=False)
        self._values = v

    @classmethod
    def _trusted(cls, sorted_values: np.ndarray) -> "EigenvalueList":
        # caller guarantees nonincreasing, nonnegative input
        obj = cls.__new__(cls)
        keep = int(np.count_nonzero(sorted_values >= TRIM))
        v = np.array(sorted_values[:keep], dtype=float)
        v.setflags(write=False)
        obj._values = v
        return obj

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def support(self) -> int:
        return self._values.size

    def total(self) -> float:
        return float(self._values.sum())

    def is_state(self, tol: float = STATE_TOL) -> bool:
        return abs(self.total() - 1.0) <= tol

    def padded(self, n: int) -> np.ndarray:
        out = np.zeros(max(n, self.support))
        out[: self.support] = self._values
        return out

    def __len__(self) -> int:
        return self.support

    def __iter__(self):
        return iter(self._values.tolist())

    def __getitem__(self, i):
        return self._values[i]

    def __eq__(self, other) -> bool:
        if not isinstance(other, EigenvalueList):
            return NotImplemented
        return self._values.shape == other._values.shape and bool(
            np.all(self._values == other._values)
        )

    def __hash__(self) -> int:
        return hash(self._values.tobytes())

    def __repr__(self) -> str:
        return f"EigenvalueList({self._values.tolist()})"

    def allclose(self, other: "EigenvalueList", tol: float = 1e-10) -> bool:
        return l1_distance(self, other) <= tol


@dataclass(frozen=True)
class CertifiedPrefix:
    """The first entries of a longer list plus the exact mass left out."""

    prefix: EigenvalueList
    tail_mass_bound: float

    @property
    def complete(self) -> bool:
        return self.tail_mass_bound == 0.0

    def total(self) -> float:
        return self.prefix.total() + self.tail_mass_bound


def _as_list(x) -> EigenvalueList:
    return x if isinstance(x, EigenvalueList) else EigenvalueList(x)


def list_from_values(raw: Sequence[float], neg_tol: float = NEG_TOL) -> EigenvalueList:
    return EigenvalueList(raw, neg_tol=neg_tol)


def uniform(p: int) -> EigenvalueList:
    """``1/p`` repeated ``p`` times."""
    return EigenvalueList._trusted(np.full(p, 1.0 / p))


def l1_distance(a, b) -> float:
    a, b = _as_list(a), _as_list(b)
    n = max(a.support, b.support)
    return float(np.abs(a.padded(n) - b.padded(n)).sum())


def direct_sum(a, b) -> EigenvalueList:
    a, b = _as_list(a), _as_list(b)
    merged = np.concatenate([a.values, b.values])
    return EigenvalueList._trusted(-np.sort(-merged, kind="stable"))


def tensor(a, b, cap: int = EAGER_CAP) -> EigenvalueList:
    """All pairwise products, sorted.  Ties keep row-major ``(i, j)`` order."""
    a, b = _as_list(a), _as_list(b)
    if a.support * b.support > cap:
        raise SizeCapExceeded(
            f"{a.support}x{b.support} products exceed the eager cap {cap}; use tensor_top_k"
        )
    prods = np.multiply.outer(a.values, b.values).ravel()
    return EigenvalueList._trusted(-np.sort(-prods, kind="stable"))


def tensor_top_k(a, b, k: int) -> CertifiedPrefix:
    """Largest ``k`` products of two sorted lists via a heap frontier.

    The frontier never holds more than ``O(k)`` cells.  Heap keys are
    ``(-value, i, j)``; a cell's predecessors ``(i-1, j)`` and ``(i, j-1)``
    always carry strictly smaller keys, so cells pop in exact key order and
    the output coincides with the stable eager sort.
    """
    if k < 1:
        raise ValueError("k must be a positive integer")
    a, b = _as_list(a), _as_list(b)
    av, bv = a.values, b.values
    na, nb = av.size, bv.size
    full_total = a.total() * b.total()
    if na == 0 or nb == 0:
        return CertifiedPrefix(EigenvalueList(), 0.0)
    heap = [(-(av[0] * bv[0]), 0, 0)]
    seen = {(0, 0)}
    out = []
    while heap and len(out) < k:
        negv, i, j = heapq.heappop(heap)
        out.append(-negv)
        for ni, nj in ((i + 1, j), (i, j + 1)):
            if ni < na and nj < nb and (ni, nj) not in seen:
                seen.add((ni, nj))
                heapq.heappush(heap, (-(av[ni] * bv[nj]), ni, nj))
    prefix = EigenvalueList._trusted(np.array(out))
    if len(out) == na * nb:
        return CertifiedPrefix(prefix, 0.0)
    bound = max(full_total - float(np.sum(out)), 0.0)
    return CertifiedPrefix(prefix, bound)


def _known_length(c: CertifiedPrefix) -> float:
    return np.inf if c.tail_mass_bound == 0.0 else c.prefix.support


def l1_distance_certified(a: CertifiedPrefix, b: CertifiedPrefix) -> tuple[float, float]:
    """Interval ``(lo, hi)`` containing the distance of the underlying lists.

    Positions below ``u`` are known on both sides.  Beyond ``u`` only the
    masses ``ma`` and ``mb`` are certain, so that part contributes something
    in ``[|ma - mb|, ma + mb]``.  The width is ``2 * min(ma, mb)``.
    """
    ka, kb = _known_length(a), _known_length(b)
    u = min(ka, kb)
    if u == np.inf:
        d = l1_distance(a.prefix, b.prefix)
        return d, d
    u = int(u)
    n = max(a.prefix.support, b.prefix.support, u)
    pa, pb = a.prefix.padded(n), b.prefix.padded(n)
    known = float(np.abs(pa[:u] - pb[:u]).sum())
    ma = float(pa[u:].sum()) + a.tail_mass_bound
    mb = float(pb[u:].sum()) + b.tail_mass_bound
    return known + abs(ma - mb), known + ma + mb


def moment(a, n: int) -> float:
    if n < 1:
        raise ValueError("moment order must be >= 1")
    return float(np.sum(_as_list(a).values ** n))


def moments(a, n_max: int) -> np.ndarray:
    """Power sums of orders ``1..n_max``."""
    v = _as_list(a).values
    return np.array([np.sum(v**n) for n in range(1, n_max + 1)], dtype=float)


def equal_by_moments(a, b, n_max: int | None = None, tol: float = 1e-9) -> bool:
    """Compare power sums up to ``n_max``.

    Lists with at most ``N`` nonzero entries are fixed by their first ``N``
    power sums, so the default ``n_max`` is the larger support.
    """
    a, b = _as_list(a), _as_list(b)
    if n_max is None:
        n_max = max(a.support, b.support, 1)
    return bool(np.all(np.abs(moments(a, n_max) - moments(b, n_max)) <= tol))


@dataclass(frozen=True)
class SquareReport:
    squares_equal: bool
    lists_equal: bool
    square_moments_a: np.ndarray
    square_moments_b: np.ndarray


def tensor_square_equality_implies_equality(
    a, b, tol: float = 1e-12, list_tol: float = 1e-9
) -> SquareReport:
    """Check the tensor-square injectivity mechanism on two state lists.

    ``moment_n(a (x) a) = moment_n(a)**2`` for every ``n``, so equal
    tensor squares force equal power sums of the factors (take the
    nonnegative square root), hence equal lists.
    """
    a, b = _as_list(a), _as_list(b)
    for name, x in (("a", a), ("b", b)):
        if not x.is_state():
            raise NotAState(f"list {name} sums to {x.total()!r}, not 1")
    n_max = max(a.support, b.support) ** 2
    sq_a = moments(a, n_max) ** 2
    sq_b = moments(b, n_max) ** 2
    squares_equal = bool(np.all(np.abs(sq_a - sq_b) <= tol))
    lists_equal = l1_distance(a, b) <= list_tol
    return SquareReport(squares_equal, lists_equal, sq_a, sq_b)
