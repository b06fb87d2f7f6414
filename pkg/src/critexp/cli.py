"""Command-line front end.

Every command reads a JSON config (``--config``) and writes JSON or CSV to
stdout or ``--out``.  Exit codes: 0 success, 2 input error, 3 numeric error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Any, Callable, Sequence

import numpy as np

from . import prox
from .automaton import LabeledGraph, load_coding, validate_strong_markov
from .pants import (FGParams, boundary_jordan_closed_form, holonomy, is_admissible,
                    shear_family, sl3_scalar_residual, sl3_transfer_root)
from .pressure import BudgetExceeded, NonPositiveWeight, ReducibleMatrix, pressure_edge_weighted
from .rep import (Representation, approximating_exponents, brute_force_exponent,
                  busemann_depth_k_exponent, certify_separation, exponent_bounds,
                  periodic_exponent, thurston_estimate)
from .weyl import Functional, functional_from_config, parse_phi

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3
NUMERIC_ERRORS = (NonPositiveWeight, ReducibleMatrix, BudgetExceeded, prox.NotProximal,
                  prox.SingularMatrix, ArithmeticError, np.linalg.LinAlgError)
SWEEP_COLUMNS = ("t", "h_kappa", "h_lambda", "transfer_root", "periodic_n", "depth_k",
                 "brute_force", "cert_epsilon", "thurston_vs_base", "error")


class InputError(ValueError):
    pass


# --- config helpers ----------------------------------------------------------

def load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read config {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON in {path!r}: {exc}") from exc
    if not isinstance(data, dict):
        raise InputError("config must be a JSON object")
    return data


def resolve_phi(args, cfg: dict, n: int) -> Functional:
    if args.phi:
        phi = parse_phi(args.phi)
    elif "phi" in cfg:
        spec = cfg["phi"]
        phi = parse_phi(spec) if isinstance(spec, str) else functional_from_config(spec)
    else:
        phi = parse_phi("roots:1,1" if n == 3 else "roots:1")
    if phi.n != n:
        raise InputError(f"functional acts on R^{phi.n} but the representation is {n}-dimensional")
    return phi


def resolve_epsilon(args, cfg: dict, default: float = 0.1) -> float:
    eps = args.epsilon if args.epsilon is not None else float(cfg.get("epsilon", default))
    if not 0 < eps <= math.pi / 2:
        raise InputError(f"epsilon must lie in (0, pi/2], got {eps}")
    return eps


def resolve_rep(cfg: dict, key: str = "rep", pants_key: str = "pants") -> Representation:
    if key in cfg:
        return Representation.from_dict(cfg[key])
    if pants_key in cfg:
        return holonomy(FGParams.from_dict(cfg[pants_key])).rep
    if "generators" in cfg:
        return Representation.from_dict(cfg)
    if {"X", "Z", "W"} <= cfg.keys():
        return holonomy(FGParams.from_dict(cfg)).rep
    raise InputError(f"config needs a {key!r} representation or {pants_key!r} parameters")


def resolve_coding(cfg: dict, default: str) -> LabeledGraph:
    return load_coding(cfg.get("coding", default))


def fmt(x: Any) -> str:
    if isinstance(x, float):
        return f"{x:.17g}"
    return "" if x is None else str(x)


def _check_finite(record: dict) -> None:
    for k, v in record.items():
        if isinstance(v, float) and not math.isfinite(v):
            raise ArithmeticError(f"non-finite value for {k}")


def emit(args, payload: Any, csv_rows: Sequence[dict] | None = None,
         columns: Sequence[str] | None = None) -> None:
    if args.format == "csv":
        rows = csv_rows if csv_rows is not None else [
            {k: v for k, v in payload.items() if not isinstance(v, (dict, list))}]
        cols = list(columns) if columns else list(rows[0].keys()) if rows else []
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(cols)
        for r in rows:
            writer.writerow([fmt(r.get(c)) for c in cols])
        text = buf.getvalue()
    else:
        text = json.dumps(payload, indent=2, sort_keys=False, default=_json_default) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, tuple):
        return list(o)
    raise TypeError(f"cannot serialize {type(o).__name__}")


# --- commands ------------------------------------------------------------------

def _edge_weights(g: LabeledGraph, spec) -> dict[int, float]:
    if spec is None:
        return {e.id: 0.0 for e in g.edges}
    if isinstance(spec, (int, float)):
        return {e.id: float(spec) for e in g.edges}
    if isinstance(spec, dict) and "labels" in spec:
        labels = spec["labels"]
        missing = {e.label for e in g.edges} - set(labels)
        if missing:
            raise InputError(f"no weight given for labels {sorted(missing)}")
        return {e.id: float(labels[e.label]) for e in g.edges}
    if isinstance(spec, dict) and "edges" in spec:
        vals = spec["edges"]
        if isinstance(vals, list):
            if len(vals) != len(g.edges):
                raise InputError(f"expected {len(g.edges)} edge weights, got {len(vals)}")
            return {e.id: float(vals[e.id]) for e in g.edges}
        return {e.id: float(vals.get(str(e.id), vals.get(e.id))) for e in g.edges}
    raise InputError("weights must be a number, {'labels': {...}} or {'edges': [...]}")


def cmd_pressure(args) -> int:
    cfg = load_config(args.config)
    g = resolve_coding(cfg, "abc")
    res = pressure_edge_weighted(g, _edge_weights(g, cfg.get("weights")))
    emit(args, res.to_dict())
    return EXIT_OK


def _boundary_records(p: FGParams) -> dict:
    x1, x2 = p.X
    z1, z2, z3 = p.Z
    w1, w2, w3 = p.W
    # rho(s^-1) up to conjugation, rightmost block first
    blocks = {
        "a'": [(z2, w2, x1), (w3, z3, x2)],
        "b'": [(z3, w3, x1), (w1, z1, x2)],
        "c'": [(z1, w1, x1), (w2, z2, x2)],
    }
    out = {}
    for name, blk in blocks.items():
        bj = boundary_jordan_closed_form(blk)
        out[name] = {"hypothesis": bj.hypothesis_holds,
                     "closed_form": [bj.alpha1, bj.alpha2],
                     "numeric": list(bj.numeric_roots)}
    return out


def pants_record(p: FGParams, phi: Functional, eps: float, depth: int) -> dict:
    g = load_coding("abc")
    hol = holonomy(p)
    adm = is_admissible(p)
    rec: dict[str, Any] = {"params": p.to_dict(), "admissible": adm.admissible,
                           "min_slack": adm.min_slack, "phi": list(phi.coeffs), "epsilon": eps}
    if adm.admissible:
        rec["boundary_closed_forms"] = _boundary_records(p)
    tr = sl3_transfer_root(p, phi)
    cert = certify_separation(hol.rep, g, eps)
    rep = exponent_bounds(hol.rep, phi, g, eps, cert)
    rec.update({
        "transfer_root": tr,
        "h_kappa": rep.h_kappa,
        "h_lambda": rep.h_lambda,
        "depth": depth,
        "depth_k": busemann_depth_k_exponent(hol.rep, phi, g, depth),
        "lower": rep.lower,
        "upper": rep.upper,
        "upper_lambda": rep.upper_lambda,
        "bounds_valid": rep.valid,
        "certified": cert.passed,
        "certificate": {"passed": cert.passed, "failure": cert.failure,
                        "certified_range": cert.to_dict()["certified_range"],
                        "min_pair_distance": cert.to_dict()["min_pair_distance"]},
        "scalar_residual": sl3_scalar_residual(tr, p, phi),
    })
    return rec


def cmd_pants_exponent(args) -> int:
    cfg = load_config(args.config)
    p = FGParams.from_dict(cfg.get("params", cfg.get("pants", cfg)))
    phi = resolve_phi(args, cfg, 3)
    rec = pants_record(p, phi, resolve_epsilon(args, cfg), int(cfg.get("depth", 2)))
    emit(args, rec)
    return EXIT_OK


def sweep_grid(cfg: dict) -> list[float]:
    if "t" in cfg:
        ts = [float(t) for t in cfg["t"]]
    elif "grid" in cfg:
        gr = cfg["grid"]
        steps = int(gr.get("steps", 0))
        if steps < 1:
            raise InputError("grid needs steps >= 1")
        ts = [float(t) for t in np.linspace(float(gr["t0"]), float(gr["t1"]), steps)]
    else:
        raise InputError("sweep config needs 't' or 'grid'")
    if not ts:
        raise InputError("empty sweep grid")
    return ts


def sweep_row(t: float, cfg: dict, phi: Functional, eps: float, budget: int | None) -> dict:
    g = load_coding("abc")
    base = FGParams.from_dict(cfg["base"])
    p = shear_family(t, base)
    rep = holonomy(p).rep
    depth = int(cfg.get("depth", 2))
    hk, hl = approximating_exponents(rep, phi, g)
    row: dict[str, Any] = {
        "t": t, "h_kappa": hk, "h_lambda": hl,
        "transfer_root": sl3_transfer_root(p, phi),
        "periodic_n": periodic_exponent(rep, phi, g, int(cfg.get("periodic_n", 6))),
        "depth_k": busemann_depth_k_exponent(rep, phi, g, depth),
    }
    if budget:
        t_max = math.log(budget / 4) / hk
        row["brute_force"] = brute_force_exponent(rep, phi, g, t_max, budget)
    lo, hi = certify_separation(rep, g, eps).epsilon_range
    row["cert_epsilon"] = lo if lo < hi else 0.0
    if "thurston_base" in cfg:
        other = holonomy(shear_family(t, FGParams.from_dict(cfg["thurston_base"]))).rep
        est = thurston_estimate(other, rep, phi, g, int(cfg.get("thurston_max_len", 6)), depth,
                                h2=row["depth_k"])
        row["thurston_vs_base"] = est.value
    _check_finite(row)
    return row


def cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    ts = sweep_grid(cfg)
    if "base" not in cfg:
        raise InputError("sweep config needs a 'base' parameter object")
    FGParams.from_dict(cfg["base"])
    phi = resolve_phi(args, cfg, 3)
    eps = resolve_epsilon(args, cfg)
    budget = args.budget if args.budget is not None else cfg.get("brute_force_budget")
    if budget is not None and int(budget) <= 0:
        raise InputError("budget must be positive")
    rows = []
    for t in ts:
        try:
            rows.append(sweep_row(t, cfg, phi, eps, int(budget) if budget else None))
        except NUMERIC_ERRORS + (ValueError,) as exc:
            rows.append({"t": t, "error": f"{type(exc).__name__}: {exc}"})
    if args.format == "json":
        emit(args, rows)
    else:
        emit(args, None, rows, SWEEP_COLUMNS)
    return EXIT_OK if any("error" not in r for r in rows) else EXIT_NUMERIC


def contraction_check(rep: Representation, eps: float, seed: int, samples: int = 1000) -> dict:
    """Sample directions away from each repeller and test the norm lower bound."""
    rng = np.random.default_rng(seed)
    out = {}
    for s in rep.all_symbols:
        m = rep.matrix(s)
        try:
            pd = prox.proximal_data(m)
        except prox.NotProximal:
            continue
        vs = prox.sample_outside_repeller(pd, eps, samples, rng)
        ratios = np.linalg.norm(vs @ m.mat.T, axis=1) / np.linalg.norm(m.mat, 2)
        out[s] = int(np.sum((ratios < math.sin(eps) ** 2 * (1 - 1e-12)) | (ratios > 1 + 1e-12)))
    return out


def cmd_certify(args) -> int:
    cfg = load_config(args.config)
    rep = resolve_rep(cfg)
    g = resolve_coding(cfg, "abc" if rep.n == 3 and set(rep.symbols) == {"a", "b", "c"} else "standard")
    eps = resolve_epsilon(args, cfg)
    cert = certify_separation(rep, g, eps)
    payload = cert.to_dict()
    if cert.passed:
        payload["sampled_bound_violations"] = contraction_check(rep, eps, args.seed)
        payload["seed"] = args.seed
    emit(args, payload)
    return EXIT_OK


def cmd_thurston(args) -> int:
    cfg = load_config(args.config)
    r1 = resolve_rep(cfg, "rep1", "pants1")
    r2 = resolve_rep(cfg, "rep2", "pants2")
    if r1.n != r2.n or set(r1.symbols) != set(r2.symbols):
        raise InputError("the two representations must share dimension and generators")
    g = resolve_coding(cfg, "abc" if set(r1.symbols) == {"a", "b", "c"} else "standard")
    phi = resolve_phi(args, cfg, r1.n)
    est = thurston_estimate(r1, r2, phi, g, int(cfg.get("max_len", 6)), int(cfg.get("depth", 2)))
    emit(args, est.to_dict())
    return EXIT_OK


def cmd_validate_coding(args) -> int:
    cfg = load_config(args.config)
    g = load_coding(cfg["coding"] if "coding" in cfg else cfg)
    depth = int(cfg.get("depth", 8)) if args.depth is None else args.depth
    report = validate_strong_markov(g, depth)
    emit(args, report.to_dict())
    return EXIT_OK if report.passed else EXIT_INPUT


COMMANDS: dict[str, tuple[Callable, str]] = {
    "pressure": (cmd_pressure, "pressure of an edge potential on a coding"),
    "pants-exponent": (cmd_pants_exponent, "exponent estimates for one pants holonomy"),
    "sweep": (cmd_sweep, "estimates along a shear family"),
    "certify": (cmd_certify, "separation certificate for a representation"),
    "thurston": (cmd_thurston, "asymmetric metric estimate between two representations"),
    "validate-coding": (cmd_validate_coding, "bounded check of a coding"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="critexp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (fn, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--out", help="output path (default: stdout)")
        p.add_argument("--format", choices=("csv", "json"),
                       default="csv" if name == "sweep" else "json")
        p.add_argument("--epsilon", type=float, help="separation scale in radians")
        p.add_argument("--phi", help="functional, e.g. roots:1,1 or weights:1,0 or raw:1,0,-1")
        p.add_argument("--budget", type=int, help="element budget; enables brute-force counting in sweeps")
        p.add_argument("--seed", type=int, default=0, help="seed for sampled checks")
        p.add_argument("--depth", type=int, help="validation depth (validate-coding)")
        p.set_defaults(func=fn)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        return args.func(args)
    except NUMERIC_ERRORS as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (InputError, ValueError, KeyError, TypeError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
