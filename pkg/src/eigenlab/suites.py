"""Randomised verification sweeps.

Every sweep is deterministic in ``seed``: trial ``i`` draws from
``default_rng([seed, i])`` so trials are independent of each other and of
evaluation order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import cpsemigroup as cps
from .densop import (
    DensityOperator,
    check_weyl,
    eigenlist_of,
    random_psd,
    singular_list_check,
)
from .eigenlist import l1_distance
from .interaction import corollary_2_crosscheck, uniform_model, verify_theorem_b
from .intertwiner import (
    IntertwinerModel,
    defect_operator,
    sandwich_operator,
    verify_4_6_1,
    verify_4_6_2,
    verify_lemma_4_3,
)

TOLERANCES = {
    "weyl": 1e-9,
    "lemma43": 1e-9,
    "lemma46_gram": 1e-10,
    "lemma46_bilinear": 1e-10,
    "lemma48": 1e-9,
    "singular": 1e-9,
    "invariance": 1e-10,
    "absorbing": 1e-6,
    "semigroup": 1e-9,
    "choi": 1e-8,
    "floor": 1e-9,
    "monotone": 1e-10,
    "corollary2": 1e-12,
}

SUITES = ("weyl", "lemma43", "lemma46", "lemma48", "semigroup", "theoremb")

DEFAULT_TRIALS = {
    "weyl": 1000,
    "lemma43": 200,
    "lemma46": 20,
    "lemma48": 200,
    "semigroup": 20,
    "theoremb": 1,
}


@dataclass
class SuiteResult:
    suite: str
    passed: bool
    worst: dict
    trials: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {"suite": self.suite, "passed": self.passed, "worst": self.worst}
        out.update(self.extra)
        out["trials"] = self.trials
        return out


def _tol(overrides: dict | None) -> dict:
    t = dict(TOLERANCES)
    t.update(overrides or {})
    return t


def _rng(seed: int, i: int) -> np.random.Generator:
    return np.random.default_rng([seed, i])


def _random_state(dim: int, rng: np.random.Generator) -> DensityOperator:
    rank = int(rng.integers(1, dim + 1))
    p = random_psd(dim, rng, rank=rank)
    return DensityOperator(p / np.trace(p).real)


def weyl_suite(trials: int = 1000, seed: int = 7, tol: dict | None = None) -> SuiteResult:
    slack = _tol(tol)["weyl"]
    rows = []
    worst = -np.inf
    for i in range(trials):
        rng = _rng(seed, i)
        dim = int(rng.integers(1, 17))
        a = random_psd(dim, rng, rank=int(rng.integers(1, dim + 1))) * rng.uniform(0.1, 3.0)
        b = random_psd(dim, rng, rank=int(rng.integers(1, dim + 1))) * rng.uniform(0.1, 3.0)
        rep = check_weyl(a, b, slack=slack)
        worst = max(worst, rep.lhs - rep.rhs)
        rows.append({"trial": i, "dim": dim, "lhs": rep.lhs, "rhs": rep.rhs, "holds": rep.holds})
    passed = all(r["holds"] for r in rows)
    return SuiteResult("weyl", passed, {"lhs_minus_rhs": float(worst)}, rows)


def _model_and_state(rng: np.random.Generator, kmax: int = 6, dmax: int = 6):
    k = int(rng.integers(1, kmax + 1))
    d = int(rng.integers(1, dmax + 1))
    return IntertwinerModel(k, d), _random_state(k * d, rng)


def lemma43_suite(trials: int = 200, seed: int = 7, tol: dict | None = None) -> SuiteResult:
    limit = _tol(tol)["lemma43"]
    rows = []
    for i in range(trials):
        m, rho = _model_and_state(_rng(seed, i))
        rep = verify_lemma_4_3(m, rho)
        rows.append({"trial": i, "k": m.k, "d": m.d, "distance": rep.distance})
    worst = max(r["distance"] for r in rows) if rows else 0.0
    return SuiteResult("lemma43", worst <= limit, {"distance": worst}, rows)


def _gaussian(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)


def lemma46_suite(
    trials: int = 20, seed: int = 7, tol: dict | None = None, quadruples: int = 100
) -> SuiteResult:
    t = _tol(tol)
    rows = []
    for i in range(trials):
        rng = _rng(seed, i)
        m, rho = _model_and_state(rng)
        gram = verify_4_6_1(m, rho)
        bil = 0.0
        for _ in range(quadruples):
            xi1, eta1 = _gaussian(rng, m.dim), _gaussian(rng, m.dim)
            xi2, eta2 = _gaussian(rng, m.d), _gaussian(rng, m.d)
            bil = max(bil, verify_4_6_2(m, rho, xi1, xi2, eta1, eta2))
        rows.append({"trial": i, "k": m.k, "d": m.d, "gram": gram, "bilinear": bil})
    wg = max((r["gram"] for r in rows), default=0.0)
    wb = max((r["bilinear"] for r in rows), default=0.0)
    passed = wg <= t["lemma46_gram"] and wb <= t["lemma46_bilinear"]
    return SuiteResult("lemma46", passed, {"gram": wg, "bilinear": wb}, rows)


def lemma48_suite(trials: int = 200, seed: int = 7, tol: dict | None = None) -> SuiteResult:
    t = _tol(tol)
    rows = []
    for i in range(trials):
        rng = _rng(seed, i)
        n = int(rng.integers(1, 7))
        a = _random_state(n, rng).matrix
        b = _random_state(n, rng).matrix
        sw = eigenlist_of(sandwich_operator(a, b))
        kr = eigenlist_of(np.kron(a, b))
        m, rho = _model_and_state(rng)
        sing = singular_list_check(defect_operator(m, rho), tol=t["singular"])
        rows.append({
            "trial": i,
            "n": n,
            "sandwich": l1_distance(sw, kr),
            "k": m.k,
            "d": m.d,
            "singular": l1_distance(sing.gram, sing.outer),
        })
    ws = max((r["sandwich"] for r in rows), default=0.0)
    wl = max((r["singular"] for r in rows), default=0.0)
    passed = ws <= t["lemma48"] and wl <= t["singular"]
    return SuiteResult("lemma48", passed, {"sandwich": ws, "singular": wl}, rows)


INVARIANCE_GRID = tuple(round(0.1 * j, 10) for j in range(1, 101))


def semigroup_suite(
    trials: int = 20,
    seed: int = 7,
    tol: dict | None = None,
    omega=(0.75, 0.25),
    rate_scale: float = 1.0,
    dephasing: float = 0.5,
) -> SuiteResult:
    t = _tol(tol)
    gen = cps.build_detailed_balance_generator(omega, rate_scale=rate_scale, dephasing=dephasing)
    sg = cps.CPSemigroup(gen)
    w = np.diag(np.asarray(omega, dtype=float)).astype(complex)

    inv = 0.0
    rng = _rng(seed, 2**31)
    for s in INVARIANCE_GRID:
        inv = max(inv, float(np.max(np.abs(cps.evolve_state(sg, w, s).matrix - w))))
    for _ in range(10):
        x = rng.standard_normal((sg.dim, sg.dim)) + 1j * rng.standard_normal((sg.dim, sg.dim))
        inv = max(inv, abs(complex(np.trace(w @ gen.heisenberg(x)))))

    t_end = 50.0 / rate_scale
    grid = (0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, t_end)
    absorbing = cps.verify_absorbing(sg, w, trials=trials, t_grid=grid, seed=seed)

    pairs = [tuple(rng.uniform(0, 10, size=2)) for _ in range(20)] + [(0.0, 3.0), (10.0, 10.0)]
    semi = cps.semigroup_property_check(sg, pairs)

    choi_min = min(
        float(np.linalg.eigvalsh(cps.choi_matrix(sg, s))[0]) for s in (0.1, 1.0, 10.0)
    )

    rows = [
        {"trial": tr.seed, "final": tr.final, "monotone": tr.monotone, "distances": tr.distances}
        for tr in absorbing.trials
    ]
    passed = (
        inv <= t["invariance"]
        and absorbing.worst_final <= t["absorbing"]
        and all(tr.monotone for tr in absorbing.trials)
        and semi <= t["semigroup"]
        and choi_min >= -t["choi"]
    )
    worst = {
        "invariance": inv,
        "absorbing_final": absorbing.worst_final,
        "semigroup": semi,
        "choi_min_eigenvalue": choi_min,
    }
    extra = {
        "generator": gen.to_json(),
        "ergodic": absorbing.ergodic,
        "grid": list(absorbing.t_grid),
    }
    return SuiteResult("semigroup", passed, worst, rows, extra)


def theoremb_suite(
    trials: int = 1, seed: int = 7, tol: dict | None = None, p: int = 1, q: int = 2, n_max: int = 5
) -> SuiteResult:
    t = _tol(tol)
    rep = verify_theorem_b(uniform_model(p, q), n_max)
    cc = corollary_2_crosscheck(p, q, tol=t["corollary2"])
    rows = [{"n": r.n, "lhs": r.lhs, "floor": r.floor, "lower": r.lower, "upper": r.upper} for r in rep.rows]
    mono = all(b["lhs"] >= a["lhs"] - t["monotone"] for a, b in zip(rows, rows[1:]))
    floors = all(r["lhs"] >= r["floor"] - t["floor"] for r in rows)
    passed = mono and floors and rep.inequality_at_sup and rep.brackets_hold and cc.match
    worst = {
        "floor_margin": min((r["lhs"] - r["floor"] for r in rows), default=0.0),
    }
    extra = {
        "p": p,
        "q": q,
        "rhs": rep.rhs,
        "formula": cc.formula_value,
        "limit": rep.limit,
        "fidelity": rep.fidelity,
        "monotone": mono,
    }
    return SuiteResult("theoremb", passed, worst, rows, extra)


RUNNERS = {
    "weyl": weyl_suite,
    "lemma43": lemma43_suite,
    "lemma46": lemma46_suite,
    "lemma48": lemma48_suite,
    "semigroup": semigroup_suite,
    "theoremb": theoremb_suite,
}


def run_suite(name: str, trials: int | None = None, seed: int = 7, tol: dict | None = None, **kw) -> SuiteResult:
    if name not in RUNNERS:
        raise KeyError(name)
    n = DEFAULT_TRIALS[name] if trials is None else trials
    return RUNNERS[name](trials=n, seed=seed, tol=tol, **kw)
