"""Command line front end.

Exit codes: 0 success, 1 a verification assertion failed (report still
written), 2 bad configuration or unreadable input (nothing written).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field

from .eigenlist import tensor, tensor_top_k
from .errors import EigenlabError
from .interaction import ChainInteractionModel, corollary_2_crosscheck, triviality_witness, uniform_model, verify_theorem_b
from .io import atomic_write, format_list_csv, read_list_csv
from .suites import SUITES, TOLERANCES, run_suite

SCHEMA = 1
DEFAULT_SEED = 7


@dataclass
class RunConfig:
    command: str
    seed: int = DEFAULT_SEED
    tolerances: dict = field(default_factory=dict)
    out: str | None = None
    format: str = "json"

    def __post_init__(self):
        unknown = set(self.tolerances) - set(TOLERANCES)
        if unknown:
            raise ValueError(f"unknown tolerance names: {sorted(unknown)}")

    def to_json(self) -> dict:
        return {
            "command": self.command,
            "seed": self.seed,
            "tolerances": {**TOLERANCES, **self.tolerances},
            "format": self.format,
        }


class ConfigError(Exception):
    pass


def _report(cfg: RunConfig, config: dict, results) -> str:
    doc = {"schema": SCHEMA, "command": cfg.command, "config": {**cfg.to_json(), **config}, "results": results}
    return json.dumps(doc, indent=2) + "\n"


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.out:
        atomic_write(cfg.out, text)
    else:
        sys.stdout.write(text)


def _rows_csv(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=columns, extrasaction="ignore", lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in r.items()})
    return buf.getvalue()


def cmd_tensor(cfg: RunConfig, list_a: str, list_b: str, k: int | None = None) -> int:
    a = read_list_csv(list_a)
    b = read_list_csv(list_b)
    if k is not None and k < 1:
        raise ConfigError("--k must be a positive integer")
    config = {"list_a": list_a, "list_b": list_b, "k": k}
    if k is None:
        lst, bound = tensor(a, b), None
    else:
        cp = tensor_top_k(a, b, k)
        lst, bound = cp.prefix, cp.tail_mass_bound
    if cfg.format == "csv":
        text = format_list_csv(lst, None if bound is None else {"tail_mass_bound": bound})
    else:
        results = {"values": [float(x) for x in lst]}
        if bound is not None:
            results["tail_mass_bound"] = bound
        text = _report(cfg, config, results)
    _emit(cfg, text)
    return 0


def cmd_verify(cfg: RunConfig, suite: str, trials: int | None, **kw) -> int:
    if suite not in SUITES:
        raise ConfigError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    res = run_suite(suite, trials=trials, seed=cfg.seed, tol=cfg.tolerances, **kw)
    if cfg.format == "csv":
        rows = res.trials
        columns = [c for c in (rows[0].keys() if rows else []) if c != "distances"]
        text = _rows_csv(rows, columns)
    else:
        text = _report(cfg, {"suite": suite, "trials": trials, **kw}, res.to_json())
    _emit(cfg, text)
    return 0 if res.passed else 1


def _interaction_results(model: ChainInteractionModel, n_max: int) -> dict:
    rep = verify_theorem_b(model, n_max)
    wit = triviality_witness(model)
    return {
        "d": rep.d,
        "past_list": list(rep.past_list),
        "future_list": list(rep.future_list),
        "rows": [{"n": r.n, "lhs": r.lhs, "floor": r.floor, "lower": r.lower, "upper": r.upper} for r in rep.rows],
        "rhs": rep.rhs,
        "fidelity": rep.fidelity,
        "limit": rep.limit,
        "lhs_monotone": rep.lhs_monotone,
        "floors_hold": rep.floors_hold,
        "inequality_at_sup": rep.inequality_at_sup,
        "verdict": wit.verdict,
    }


def cmd_interaction(
    cfg: RunConfig,
    p: int | None,
    q: int | None,
    past: str | None,
    future: str | None,
    n_max: int,
    dim: int | None,
) -> int:
    if n_max < 1:
        raise ConfigError("--n-max must be >= 1")
    config = {"n_max": n_max, "dim": dim}
    if p is not None or q is not None:
        if p is None or q is None or past or future:
            raise ConfigError("give both --p and --q, or both --past and --future")
        cross = corollary_2_crosscheck(p, q, tol=cfg.tolerances.get("corollary2", TOLERANCES["corollary2"]))
        model = uniform_model(p, q, dim)
        config.update(p=p, q=q)
    elif past and future:
        a, b = read_list_csv(past), read_list_csv(future)
        d = dim or max(a.support, b.support)
        if d < max(a.support, b.support):
            raise ConfigError(f"--dim {d} is smaller than the list supports")
        model = ChainInteractionModel.diagonal(a.padded(d)[:d], b.padded(d)[:d])
        cross = None
        config.update(past=past, future=future)
    else:
        raise ConfigError("give --p/--q or --past/--future")
    results = _interaction_results(model, n_max)
    if cross is not None:
        results["corollary_2"] = {
            "p": cross.p,
            "q": cross.q,
            "formula_value": cross.formula_value,
            "eigenlist_value": cross.eigenlist_value,
            "match": cross.match,
        }
    if cfg.format == "csv":
        text = _rows_csv(results["rows"], ["n", "lhs", "floor", "lower", "upper"])
    else:
        text = _report(cfg, config, results)
    _emit(cfg, text)
    ok = results["lhs_monotone"] and results["floors_hold"] and results["inequality_at_sup"]
    if cross is not None:
        ok = ok and cross.match
    return 0 if ok else 1


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--out", default=None, help="output path (default stdout)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    for name, value in TOLERANCES.items():
        common.add_argument(f"--tol.{name}", dest=f"tol_{name}", type=float, default=None,
                            metavar="X", help=f"default {value:g}")

    parser = _Parser(prog="eigenlab", description="Eigenvalue-list calculus and interaction checks.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    t = sub.add_parser("tensor", parents=[common], help="tensor product of two CSV lists")
    t.add_argument("list_a")
    t.add_argument("list_b")
    t.add_argument("--k", type=int, default=None, help="only the largest k products")

    v = sub.add_parser("verify", parents=[common], help="run a verification suite")
    v.add_argument("suite")
    v.add_argument("--trials", type=int, default=None)
    v.add_argument("--p", type=int, default=1, help="theoremb: past list size")
    v.add_argument("--q", type=int, default=2, help="theoremb: future list size")
    v.add_argument("--n-max", type=int, default=5, help="theoremb: largest window half-width")

    i = sub.add_parser("interaction", parents=[common], help="interaction inequality report")
    i.add_argument("--p", type=int)
    i.add_argument("--q", type=int)
    i.add_argument("--past", help="CSV list of the past site state")
    i.add_argument("--future", help="CSV list of the future site state")
    i.add_argument("--n-max", type=int, default=4)
    i.add_argument("--dim", type=int, default=None)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        tols = {name: getattr(args, f"tol_{name}") for name in TOLERANCES}
        cfg = RunConfig(
            args.command,
            seed=args.seed,
            tolerances={k: v for k, v in tols.items() if v is not None},
            out=args.out,
            format=args.format,
        )
        if args.command == "tensor":
            return cmd_tensor(cfg, args.list_a, args.list_b, args.k)
        if args.command == "verify":
            kw = {}
            if args.suite == "theoremb":
                kw = {"p": args.p, "q": args.q, "n_max": args.n_max}
            return cmd_verify(cfg, args.suite, args.trials, **kw)
        return cmd_interaction(cfg, args.p, args.q, args.past, args.future, args.n_max, args.dim)
    except (ConfigError, EigenlabError, ValueError) as exc:
        print(f"eigenlab: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
