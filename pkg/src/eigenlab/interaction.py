"""Two-sided product-state chain model of an interaction.

Sites are integers.  The global state puts ``past`` on every site left of
the core, the core density on its ``m`` contiguous sites, and ``future`` on
every site to its right.  The shift moves an observable on window ``I`` to
``I + t``.  The invariant extensions of the past and future states are the
homogeneous product states ``past^{(x)Z}`` and ``future^{(x)Z}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import reduce
from itertools import combinations_with_replacement

import numpy as np

from .densop import DensityOperator, as_density, partial_trace, sqrt_psd, trace_norm_distance
from .eigenlist import (
    EigenvalueList,
    l1_distance,
    tensor,
    tensor_square_equality_implies_equality,
    uniform,
)
from .errors import BadArgs, DimMismatch, NotAState, SizeCapExceeded, WindowOutOfRange

DENSE_CAP = 2**14
DIAG_TOL = 1e-14
MONO_TOL = 1e-10
FLOOR_TOL = 1e-9
LIST_TOL = 1e-9


@dataclass(frozen=True)
class ChainInteractionModel:
    d: int
    past: DensityOperator
    future: DensityOperator
    core: DensityOperator | None = None
    core_start: int = 0
    extent: tuple[int, int] | None = None
    core_sites: int = field(init=False)

    def __post_init__(self):
        past = as_density(self.past)
        future = as_density(self.future)
        if past.dim != self.d or future.dim != self.d:
            raise DimMismatch(f"site states must be {self.d}x{self.d}")
        core = past if self.core is None else as_density(self.core)
        m = round(math.log(core.dim, self.d)) if self.d > 1 else 1
        if self.d ** m != core.dim:
            raise DimMismatch(f"core dim {core.dim} is not a power of {self.d}")
        object.__setattr__(self, "past", past)
        object.__setattr__(self, "future", future)
        object.__setattr__(self, "core", core)
        object.__setattr__(self, "core_sites", m)

    @classmethod
    def diagonal(cls, past_probs, future_probs, **kw) -> "ChainInteractionModel":
        """Model with diagonal site states; shorter vectors are zero padded."""
        d = max(len(past_probs), len(future_probs))
        p = np.zeros(d)
        q = np.zeros(d)
        p[: len(past_probs)] = past_probs
        q[: len(future_probs)] = future_probs
        return cls(d, DensityOperator(np.diag(p)), DensityOperator(np.diag(q)), **kw)

    @property
    def core_stop(self) -> int:
        return self.core_start + self.core_sites

    def is_diagonal(self) -> bool:
        return all(
            np.max(np.abs(s.matrix - np.diag(np.diag(s.matrix)))) <= DIAG_TOL
            for s in (self.past, self.future)
        )


@dataclass(frozen=True)
class LocalObservable:
    """Operator on the sites ``start .. start + length - 1``."""

    start: int
    length: int
    matrix: np.ndarray

    def __post_init__(self):
        if self.length < 1:
            raise WindowOutOfRange("window must contain at least one site")
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimMismatch("observable must be a square matrix")
        object.__setattr__(self, "matrix", m)

    @property
    def stop(self) -> int:
        return self.start + self.length

    def shift(self, t: int) -> "LocalObservable":
        return LocalObservable(self.start + t, self.length, self.matrix)


def _power(state: np.ndarray, n: int) -> np.ndarray:
    return reduce(np.kron, [state] * n) if n > 0 else np.ones((1, 1), dtype=complex)


def _check_dense(d: int, sites: int, cap: int = DENSE_CAP) -> None:
    if d**sites > cap:
        raise SizeCapExceeded(f"{d}^{sites} exceeds the dense dimension cap {cap}")


def window_state(m: ChainInteractionModel, start: int, length: int, which: str = "global") -> DensityOperator:
    """Restriction of a state to the sites ``start .. start + length - 1``.

    ``which`` is ``"global"`` for the model's state, or ``"past"``/``"future"``
    for the invariant extensions.
    """
    _check_dense(m.d, length)
    if which in ("past", "future"):
        site = (m.past if which == "past" else m.future).matrix
        return DensityOperator(_power(site, length))
    if which != "global":
        raise BadArgs(f"unknown state {which!r}")
    stop = start + length
    lo, hi = max(start, m.core_start), min(stop, m.core_stop)
    left = max(0, min(stop, m.core_start) - start)
    right = max(0, stop - max(start, m.core_stop))
    blocks = [_power(m.past.matrix, left)]
    if lo < hi:
        keep = list(range(lo - m.core_start, hi - m.core_start))
        core = m.core.matrix
        if len(keep) < m.core_sites:
            core = partial_trace(core, [m.d] * m.core_sites, keep)
        blocks.append(core)
    blocks.append(_power(m.future.matrix, right))
    return DensityOperator(reduce(np.kron, blocks))


def local_restriction(m: ChainInteractionModel, side: str, n: int) -> DensityOperator:
    """Invariant extension of ``side`` restricted to the ``2n`` sites ``-n .. n-1``."""
    if n < 1:
        raise BadArgs("window half-width must be >= 1")
    if side not in ("past", "future"):
        raise BadArgs(f"side must be 'past' or 'future', got {side!r}")
    return window_state(m, -n, 2 * n, which=side)


def _type_terms(p: np.ndarray, q: np.ndarray, sites: int):
    """Yield ``(counts, log multiplicity, P, Q)`` per occupation type of ``sites`` draws."""
    d = p.size
    lp = np.log(np.where(p > 0, p, 1.0))
    lq = np.log(np.where(q > 0, q, 1.0))
    lf = [math.lgamma(c + 1) for c in range(sites + 1)]
    for combo in combinations_with_replacement(range(d), sites):
        counts = np.bincount(combo, minlength=d)
        logmult = lf[sites] - sum(lf[c] for c in counts)
        used = counts > 0
        pz = np.any(p[used] == 0)
        qz = np.any(q[used] == 0)
        pv = 0.0 if pz else math.exp(logmult + float(counts @ lp))
        qv = 0.0 if qz else math.exp(logmult + float(counts @ lq))
        yield counts, logmult, pv, qv


def product_l1(p, q, sites: int) -> float:
    """``|| p^{(x)N} - q^{(x)N} ||_1`` summed over occupation types, never materialised."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    return float(sum(abs(pv - qv) for _, _, pv, qv in _type_terms(p, q, sites)))


def _runs(p: np.ndarray, sites: int) -> list[tuple[float, int]]:
    """Sorted ``(value, multiplicity)`` runs of the list of ``p^{(x)N}``."""
    p = p[p > 0]
    if p.size == 0:
        return []
    lp = np.log(p)
    out = []
    for combo in combinations_with_replacement(range(p.size), sites):
        counts = np.bincount(combo, minlength=p.size)
        mult = math.factorial(sites)
        for c in counts:
            mult //= math.factorial(int(c))
        out.append((math.exp(float(counts @ lp)), mult))
    out.sort(key=lambda vm: -vm[0])
    return out


def runs_l1(a: list[tuple[float, int]], b: list[tuple[float, int]]) -> float:
    """l1 distance of two run-length encoded nonincreasing lists."""
    i = j = 0
    ra = a[0][1] if a else 0
    rb = b[0][1] if b else 0
    total = 0.0
    while i < len(a) or j < len(b):
        va = a[i][0] if i < len(a) else 0.0
        vb = b[j][0] if j < len(b) else 0.0
        if i >= len(a):
            step = rb
        elif j >= len(b):
            step = ra
        else:
            step = min(ra, rb)
        total += step * abs(va - vb)
        if i < len(a):
            ra -= step
            if ra == 0:
                i += 1
                ra = a[i][1] if i < len(a) else 0
        if j < len(b):
            rb -= step
            if rb == 0:
                j += 1
                rb = b[j][1] if j < len(b) else 0
    return total


def local_norm_distance(m: ChainInteractionModel, n: int, method: str = "auto") -> float:
    """Trace distance of the two invariant extensions on the ``2n``-site window.

    ``method="combinatorial"`` requires diagonal site states and sums over
    occupation types; ``"dense"`` builds both ``d^{2n}`` matrices.
    """
    if n < 1:
        raise BadArgs("window half-width must be >= 1")
    if method == "auto":
        method = "combinatorial" if m.is_diagonal() else "dense"
    if method == "combinatorial":
        if not m.is_diagonal():
            raise BadArgs("combinatorial path needs diagonal site states")
        p = np.diag(m.past.matrix).real
        q = np.diag(m.future.matrix).real
        return product_l1(p, q, 2 * n)
    if method != "dense":
        raise BadArgs(f"unknown method {method!r}")
    _check_dense(m.d, 2 * n)
    return trace_norm_distance(local_restriction(m, "past", n), local_restriction(m, "future", n))


def _state_list(lam) -> EigenvalueList:
    lam = lam if isinstance(lam, EigenvalueList) else EigenvalueList(lam)
    if not lam.is_state():
        raise NotAState(f"list sums to {lam.total()!r}, not 1")
    return lam


def theorem_b_rhs(past_list, future_list) -> float:
    """``|| Lambda_- (x) Lambda_- - Lambda_+ (x) Lambda_+ ||_1``."""
    a = _state_list(past_list)
    b = _state_list(future_list)
    return l1_distance(tensor(a, a), tensor(b, b))


@dataclass(frozen=True)
class Corollary2Row:
    p: int
    q: int
    formula_value: float
    eigenlist_value: float
    match: bool


def corollary_2_crosscheck(p: int, q: int, tol: float = 1e-12) -> Corollary2Row:
    if not (isinstance(p, int) and isinstance(q, int)) or p < 1 or q <= p:
        raise BadArgs(f"need integers 1 <= p < q, got p={p!r}, q={q!r}")
    formula = 2.0 - 2.0 * p * p / (q * q)
    value = theorem_b_rhs(uniform(p), uniform(q))
    return Corollary2Row(p, q, formula, value, abs(formula - value) <= tol)


def fidelity(r, s) -> float:
    """Root fidelity ``trace|sqrt(R) sqrt(S)|``."""
    prod = sqrt_psd(as_density(r).matrix) @ sqrt_psd(as_density(s).matrix)
    return float(np.linalg.svd(prod, compute_uv=False).sum())


@dataclass(frozen=True)
class TheoremBRow:
    n: int
    lhs: float
    floor: float
    lower: float
    upper: float


@dataclass(frozen=True)
class TheoremBReport:
    d: int
    past_list: EigenvalueList
    future_list: EigenvalueList
    rows: list
    rhs: float
    fidelity: float
    limit: float
    lhs_monotone: bool
    floors_hold: bool
    brackets_hold: bool
    inequality_at_sup: bool

    @property
    def certified_norm(self) -> float:
        return max([self.limit] + [r.lhs for r in self.rows])


def _floor(m: ChainInteractionModel, sites: int) -> float:
    if m.is_diagonal():
        p = np.diag(m.past.matrix).real
        q = np.diag(m.future.matrix).real
        return runs_l1(_runs(p, sites), _runs(q, sites))
    a = m.past.eigenlist()
    b = m.future.eigenlist()
    return l1_distance(reduce(tensor, [a] * sites), reduce(tensor, [b] * sites))


def verify_theorem_b(m: ChainInteractionModel, n_max: int) -> TheoremBReport:
    """Window distances, their Weyl floors, and the fidelity-certified limit.

    On ``N`` sites Fuchs-van de Graaf gives
    ``2(1 - F^N) <= lhs <= 2 sqrt(1 - F^{2N})`` with ``F`` the site fidelity,
    so the supremum over windows is 2 unless the site states agree.
    """
    if n_max < 1:
        raise BadArgs("n_max must be >= 1")
    if not m.is_diagonal():
        _check_dense(m.d, 2 * n_max)
    f = min(fidelity(m.past, m.future), 1.0)
    rows = []
    for n in range(1, n_max + 1):
        sites = 2 * n
        lhs = local_norm_distance(m, n)
        rows.append(
            TheoremBRow(
                n,
                lhs,
                _floor(m, sites),
                2.0 * (1.0 - f**sites),
                2.0 * math.sqrt(max(0.0, 1.0 - f ** (2 * sites))),
            )
        )
    past_list = m.past.eigenlist()
    future_list = m.future.eigenlist()
    rhs = theorem_b_rhs(past_list, future_list)
    states_equal = trace_norm_distance(m.past, m.future) <= LIST_TOL
    limit = 0.0 if states_equal else 2.0
    mono = all(b.lhs >= a.lhs - MONO_TOL for a, b in zip(rows, rows[1:]))
    floors = all(r.lhs >= r.floor - FLOOR_TOL for r in rows)
    brackets = all(r.lower - FLOOR_TOL <= r.lhs <= r.upper + FLOOR_TOL for r in rows)
    sup = max([limit] + [r.lhs for r in rows])
    return TheoremBReport(
        m.d, past_list, future_list, rows, rhs, f, limit, mono, floors, brackets,
        sup >= rhs - FLOOR_TOL,
    )


def invariant_expectation(m: ChainInteractionModel, side: str, x: LocalObservable) -> complex:
    """Expectation of ``x`` in the invariant extension of ``side``."""
    if side not in ("past", "future"):
        raise BadArgs(f"side must be 'past' or 'future', got {side!r}")
    return _expect(window_state(m, x.start, x.length, which=side), x)


def _expect(state: DensityOperator, x: LocalObservable) -> complex:
    if x.matrix.shape[0] != state.dim:
        raise DimMismatch(f"observable has dim {x.matrix.shape[0]}, window needs {state.dim}")
    return complex(np.trace(state.matrix @ x.matrix))


def shifted_expectation(m: ChainInteractionModel, x: LocalObservable, t: int) -> float:
    """Global-state expectation of ``x`` moved to the window ``I + t``."""
    moved = x.shift(t)
    if m.extent is not None and (moved.start < m.extent[0] or moved.stop > m.extent[1]):
        raise WindowOutOfRange(
            f"window [{moved.start}, {moved.stop}) leaves extent [{m.extent[0]}, {m.extent[1]})"
        )
    if x.matrix.shape[0] != m.d**x.length:
        raise DimMismatch(f"observable must be {m.d**x.length}-dimensional")
    return _expect(window_state(m, moved.start, moved.length), moved).real


@dataclass(frozen=True)
class TrivialityReport:
    lists_equal: bool
    tensor_squares_equal: bool
    verdict: str


def triviality_witness(m: ChainInteractionModel) -> TrivialityReport:
    """``"nontrivial"`` whenever the site lists differ; never claims the converse."""
    a = m.past.eigenlist()
    b = m.future.eigenlist()
    sq = tensor_square_equality_implies_equality(a, b)
    lists_equal = l1_distance(a, b) <= LIST_TOL
    return TrivialityReport(
        lists_equal, sq.squares_equal, "inconclusive" if lists_equal else "nontrivial"
    )


def uniform_model(p: int, q: int, d: int | None = None) -> ChainInteractionModel:
    """Diagonal model with ``1/p`` on ``p`` levels in the past, ``1/q`` on ``q`` in the future."""
    d = max(p, q) if d is None else d
    if d < max(p, q):
        raise BadArgs(f"site dimension {d} cannot hold {max(p, q)} levels")
    return ChainInteractionModel.diagonal(uniform(p).padded(d), uniform(q).padded(d))
