"""Command line entry point.

Every subcommand prints one report: a header (command, seed, budgets) and
either a table of rows or a single record.  Floats are written in full
precision (``.17g``) with a rounded ``*_r`` companion column.

Exit status: 0 ok, 1 numerical failure (precision or bracket), 2 usage or
input error, 3 resource budget exceeded.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Any, Sequence

import numpy as np

from . import __version__
from ._accel import set_workers
from .config import all_budgets
from .errors import BracketError, InputError, PrecisionError, ResourceError

STOCHASTIC = {"levy", "entropy", "urysohn"}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


# ---------------------------------------------------------------------------
# serialization


def _plain(v: Any) -> Any:
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, np.ndarray):
        return [_plain(x) for x in v.tolist()]
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if math.isfinite(v) else repr(v)
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if hasattr(v, "value") and not isinstance(v, (int, str)):
        return v.value
    return v


def _rounded(d: dict) -> dict:
    out = {}
    for k, v in d.items():
        out[k] = v
        if isinstance(v, float) and not isinstance(v, bool):
            out[f"{k}_r"] = float(f"{v:.6g}")
    return out


def _flatten(d: dict, prefix: str = "") -> dict:
    out = {}
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        else:
            out[key] = v
    return out


def _cell(v: Any, rounded: bool = False) -> str:
    if isinstance(v, bool) or v is None:
        return str(v).lower() if v is not None else ""
    if isinstance(v, float):
        return format(v, ".6g" if rounded else ".17g")
    if isinstance(v, (list, tuple)):
        return json.dumps(v, separators=(",", ":"))
    return str(v)


def _emit(header: dict, fmt: str, rows: list[dict] | None = None, record: dict | None = None) -> str:
    if rows is not None:
        rows = [_rounded(_plain(r)) for r in rows]
    if record is not None:
        record = _plain(record)
    if fmt == "json":
        body = {"header": _plain(header)}
        if rows is not None:
            body["rows"] = rows
        if record is not None:
            body["report"] = record
            flat = {k: v for k, v in _flatten(record).items() if isinstance(v, float)}
            body["rounded"] = {k: float(f"{v:.6g}") for k, v in flat.items()}
        return json.dumps(body, indent=2, sort_keys=True) + "\n"
    buf = io.StringIO()
    for k, v in _flatten(_plain(header)).items():
        buf.write(f"# {k}={_cell(v)}\n")
    table = rows if rows is not None else [_rounded(_flatten(record))]
    if table:
        cols = list(table[0])
        for r in table[1:]:
            cols += [c for c in r if c not in cols]
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for r in table:
            w.writerow([_cell(r.get(c), c.endswith("_r")) for c in cols])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# argument helpers


def _float(text: str) -> float:
    t = text.strip().lower()
    if t in ("inf", "infinity", "oo"):
        return math.inf
    try:
        if "/" in t:
            a, b = t.split("/")
            return float(a) / float(b)
        return float(t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _floats(text: str) -> list[float]:
    return [_float(t) for t in text.split(",") if t.strip()]


def _ints(text: str) -> list[int]:
    """``a,b,c`` or ``a:b`` (inclusive) or ``a:b:step``."""
    try:
        if ":" in text:
            parts = [int(t) for t in text.split(":")]
            step = parts[2] if len(parts) > 2 else 1
            return list(range(parts[0], parts[1] + 1, step))
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad integer list {text!r}") from None


def _window(text: str) -> tuple[int, int]:
    vals = _ints(text)
    if len(vals) != 2:
        raise argparse.ArgumentTypeError("window is M1,M2")
    return vals[0], vals[1]


def _common(p: argparse.ArgumentParser, seed: bool = False):
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--workers", type=int, default=None, help="internal threads; output does not depend on it")
    if seed:
        p.add_argument("--seed", type=int, default=None, help="required")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="vilentropy", description="Vilenkin systems and entropy-number bounds.")
    ap.add_argument("--version", action="version", version=f"vilentropy {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("vilenkin-table", help="per-index digits, inverse and class with the real basis names")
    p.add_argument("--radix", required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--start", type=int, default=0)
    p.add_argument("--ordering", choices=("z", "ztilde"), default="z")
    _common(p)

    p = sub.add_parser("classify", help="K/L/M class by both rules")
    p.add_argument("--radix", required=True)
    p.add_argument("--n", type=_ints, required=True, help="list a,b,c or range a:b")
    _common(p)

    p = sub.add_parser("lattice", help="layer counts and the layer-size check")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--mode", choices=("euclid", "max"), default="euclid")
    p.add_argument("--lmax", type=int, required=True)
    _common(p)

    p = sub.add_parser("project", help="spherical partial sum of a JSON coefficient vector")
    p.add_argument("--R", type=_float, required=True)
    p.add_argument("--mode", choices=("euclid", "max"), default="euclid")
    p.add_argument("--input", default="-", help="file with the vector, '-' for stdin")
    _common(p)

    def levy_args(p):
        p.add_argument("--window", type=_window, required=True, help="M1,M2")
        p.add_argument("--d", type=int, default=1)
        p.add_argument("--norm", choices=("euclid", "max"), default="max")
        p.add_argument("--system", default=None, help="e.g. walsh*trig; default Walsh in every axis")
        p.add_argument("--p", type=_float, required=True)
        p.add_argument("--samples", type=int, default=100000)
        _common(p, seed=True)

    levy_args(sub.add_parser("levy", help="Monte-Carlo Levy mean of a window norm"))

    b = sub.add_parser("bounds", help="bound expressions and rate constants")
    bsub = b.add_subparsers(dest="kind", required=True, parser_class=_Parser)
    for kind in ("lower", "upper", "chi", "constants"):
        p = bsub.add_parser(kind)
        p.add_argument("--multiplier", required=True, help="finite:gamma=G,xi=X or exp:gamma=G,r=R")
        p.add_argument("--norm", choices=("euclid", "max"), default="euclid")
        p.add_argument("--d", type=int, required=True)
        if kind != "constants":
            p.add_argument("--k", type=_float, required=True)
            p.add_argument("--q", type=_float, default=2.0)
        if kind in ("lower", "upper"):
            p.add_argument("--p", type=_float, default=2.0)
            p.add_argument("--N", type=int, default=None)
        if kind == "upper":
            p.add_argument("--eps", type=_float, default=0.5)
        if kind == "chi":
            p.add_argument("--volume-mode", choices=("surrogate", "montecarlo"), default="surrogate")
            p.add_argument("--samples", type=int, default=20000)
            _common(p, seed=True)
        else:
            _common(p)
    levy_args(bsub.add_parser("levy"))

    p = sub.add_parser("entropy", help="entropy-number bracket of a diagonal operator")
    p.add_argument("--diag", type=_floats, required=True)
    p.add_argument("--p", type=_float, default=2.0)
    p.add_argument("--q", type=_float, default=2.0)
    p.add_argument("--k", type=_ints, required=True, help="one k, a comma list or a range a:b")
    p.add_argument("--budget", type=int, default=20000)
    p.add_argument("--volume-samples", type=int, default=100000)
    _common(p, seed=True)

    p = sub.add_parser("urysohn", help="Monte-Carlo check of Urysohn's inequality")
    p.add_argument("--body", choices=("euclid", "sup", "one"), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--samples", type=int, default=100000)
    _common(p, seed=True)

    p = sub.add_parser("keps", help="evidence for membership in K_eps,p")
    p.add_argument("--multiplier", required=True)
    p.add_argument("--norm", choices=("euclid", "max"), default="euclid")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--eps", type=_float, required=True)
    p.add_argument("--p", type=_float, required=True)
    p.add_argument("--N", type=_ints, required=True, help="range a:b[:step] or list")
    _common(p)
    return ap


# ---------------------------------------------------------------------------
# handlers


def _header(args, **extra) -> dict:
    h = {"command": args.command, "version": __version__, "budgets": all_budgets()}
    if getattr(args, "kind", None):
        h["command"] = f"{args.command} {args.kind}"
    h["seed"] = getattr(args, "seed", None)
    h.update(extra)
    return h


def _cmd_vilenkin_table(args):
    from .radix_group import parse_radix
    from .vilenkin_basis import vilenkin_table

    if args.count < 1 or args.start < 0:
        raise InputError("need count >= 1 and start >= 0")
    radix = parse_radix(args.radix)
    rows = vilenkin_table(radix, args.count, args.start)
    for r in rows:
        r["digits"] = "".join(str(x) for x in reversed(r["digits"])) or "0"
        r["basis"] = r["Z"] if args.ordering == "z" else r["Ztilde"]
    return _header(args, radix=list(radix.pattern), ordering=args.ordering), rows, None


def _cmd_classify(args):
    from .radix_group import classify, neg, parse_radix

    radix = parse_radix(args.radix)
    rows = []
    for n in args.n:
        if n < 0:
            raise InputError("n must be >= 0")
        direct, fast = classify(n, radix, "direct"), classify(n, radix, "fast")
        rows.append({"n": n, "neg": neg(n, radix), "direct": direct.value, "fast": fast.value, "agree": direct is fast})
    return _header(args, radix=list(radix.pattern)), rows, None


def _cmd_lattice(args):
    from .index_lattice import layer_table, proposition_check

    table = layer_table(args.d, args.mode, args.lmax)
    extra = {"d": args.d, "mode": args.mode}
    if args.d >= 2 and args.lmax >= 1:
        extra["proposition"] = proposition_check(args.d, args.lmax, args.mode).as_dict()
    return _header(args, **extra), table.rows(), None


def _cmd_project(args):
    from .product_system import CoefficientVector, spherical_partial_sum

    text = sys.stdin.read() if args.input == "-" else open(args.input, encoding="utf-8").read()
    f = CoefficientVector.from_json(text)
    g = spherical_partial_sum(f, args.R, args.mode)
    rows = [{"index": k.key(), "value": v} for k, v in g.sorted_items()]
    return _header(args, R=args.R, mode=args.mode, d=f.d, l2=g.l2()), rows, None


def _cmd_levy(args):
    from .bounds import levy_mean_estimate
    from .product_system import LayerWindow, ProductSpec

    system = ProductSpec.parse(args.system) if args.system else ProductSpec.walsh(args.d)
    if system.d != args.d:
        raise InputError("--system dimension does not match --d")
    w = LayerWindow(args.window[0], args.window[1], args.norm)
    est = levy_mean_estimate(w, system, args.p, args.samples, args.seed)
    rec = est.as_dict()
    if args.p == math.inf and est.n > 1:
        rec["ratio_to_sqrt_log2n"] = est.estimate / math.sqrt(math.log2(est.n))
    return _header(args), None, rec


def _cmd_bounds(args):
    from . import bounds
    from .multiplier import MultiplierSpec

    if args.kind == "levy":
        return _cmd_levy(args)
    spec = MultiplierSpec.parse(args.multiplier, args.norm)
    if args.kind == "constants":
        if spec.family != "exp":
            raise InputError("rate constants exist for the exponential family only")
        c = bounds.constants(args.d, spec.r, spec.gamma)
        return _header(args, constants_normalized=False), None, {
            "d": c.d, "r": c.r, "gamma": c.gamma, "C": c.C, "C_star": c.C_star,
        }
    if args.kind == "lower":
        rep = bounds.lower_bound_expr(spec, args.k, args.p, args.q, args.d, args.N)
    elif args.kind == "upper":
        rep = bounds.upper_bound_expr(spec, args.k, args.p, args.q, args.d, args.eps, args.N)
    else:
        rep = bounds.chi_k(spec, args.k, args.q, args.d, args.volume_mode, args.samples, args.seed)
    return _header(args, constants_normalized=True), None, rep.as_dict()


def _cmd_entropy(args):
    from .entropy_oracle import entropy_estimate

    out = entropy_estimate(args.diag, args.p, args.q, args.k, args.budget, args.seed, args.volume_samples)
    rows = [b.as_dict() for b in out]
    return _header(args, diag=args.diag, p=args.p, q=args.q, budget=args.budget), rows, None


def _cmd_urysohn(args):
    from .entropy_oracle import urysohn_check

    rep = urysohn_check(args.body, args.n, args.samples, args.seed)
    return _header(args), None, rep.as_dict()


def _cmd_keps(args):
    from .multiplier import K_eps_check, MultiplierSpec

    spec = MultiplierSpec.parse(args.multiplier, args.norm)
    rep = K_eps_check(spec, args.eps, args.p, args.d, args.N)
    rows = [{"N": r[0], "theta1": r[1], "M": r[2], "ratio": r[3], "C_eps": r[4]} for r in rep.rows]
    head = _header(
        args, multiplier=spec.describe(), eps=args.eps, p=args.p, d=args.d,
        sup_ratio=rep.sup_ratio, trend_bounded=rep.trend_bounded, approximate=rep.approximate,
    )
    return head, rows, None


HANDLERS = {
    "vilenkin-table": _cmd_vilenkin_table,
    "classify": _cmd_classify,
    "lattice": _cmd_lattice,
    "project": _cmd_project,
    "levy": _cmd_levy,
    "bounds": _cmd_bounds,
    "entropy": _cmd_entropy,
    "urysohn": _cmd_urysohn,
    "keps": _cmd_keps,
}


def _needs_seed(args) -> bool:
    if args.command in STOCHASTIC:
        return True
    if args.command == "bounds":
        return args.kind == "levy" or (args.kind == "chi" and args.volume_mode == "montecarlo")
    return False


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(exc, file=stderr)
        return 2
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    if _needs_seed(args) and getattr(args, "seed", None) is None:
        print(f"vilentropy {args.command}: --seed is required for stochastic commands", file=stderr)
        return 2
    if args.workers:
        set_workers(args.workers)
    try:
        header, rows, record = HANDLERS[args.command](args)
    except InputError as exc:
        print(f"vilentropy: input error: {exc}", file=stderr)
        return 2
    except ResourceError as exc:
        print(f"vilentropy: resource budget exceeded: {exc}", file=stderr)
        return 3
    except (PrecisionError, BracketError) as exc:
        print(f"vilentropy: numerical failure: {exc}", file=stderr)
        return 1
    stdout.write(_emit(header, args.format, rows, record))
    return 0


def main(argv: Sequence[str] | None = None) -> None:
    sys.exit(run(argv))
