"""Command-line harness: ``shl-lab verify | eval | asep | list | schema``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from . import asep, identities, shl, vertex_model
from .kernel import LabError, parse_scalar
from .signatures import ParameterSet, Signature

SCHEMA_VERSION = 1
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class ConfigError(LabError, ValueError):
    pass


# ---------------------------------------------------------------------------
# serialization


def encode(value):
    """JSON-safe form: rationals as "p/q", complex as [re, im], non-finite floats as null."""
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        return str(value) if value.denominator != 1 else f"{value.numerator}"
    if isinstance(value, complex):
        return [encode(value.real), encode(value.imag)]
    if isinstance(value, float):
        return value if math.isfinite(value) else None
    if isinstance(value, Signature):
        return list(value)
    if isinstance(value, dict):
        return {str(k): encode(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [encode(v) for v in value]
    return str(value)


def decode_rational(text: str) -> Fraction:
    return Fraction(text)


REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "shl-lab verification report",
    "type": "object",
    "required": ["schema_version", "config", "reports"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "config": {"type": "object"},
        "reports": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "N", "index", "seed", "point", "lhs", "rhs", "truncation", "abs_err", "rel_err",
                             "verdict", "tolerance_class", "error"],
                "properties": {
                    "id": {"enum": list(identities.IDS)},
                    "N": {"type": "integer", "minimum": 1},
                    "index": {"type": "integer", "minimum": 0},
                    "seed": {"type": ["integer", "null"]},
                    "point": {"type": "object"},
                    "lhs": {"$ref": "#/$defs/scalar"},
                    "rhs": {"$ref": "#/$defs/scalar"},
                    "truncation": {"type": "integer", "minimum": 0},
                    "abs_err": {"type": ["number", "null"]},
                    "rel_err": {"type": ["number", "null"]},
                    "verdict": {"enum": ["ExactMatch", "WithinTolerance", "Fail"]},
                    "tolerance_class": {"enum": ["Exact", "Truncated", "Quadrature"]},
                    "error": {"type": ["string", "null"]},
                    "runtime_ms": {"type": "number"},
                },
            },
        },
    },
    "$defs": {
        "scalar": {
            "oneOf": [
                {"type": "string", "pattern": r"^-?\d+(/\d+)?$"},
                {"type": "array", "items": {"type": ["number", "null"]}, "minItems": 2, "maxItems": 2},
                {"type": "null"},
            ]
        }
    },
}


# ---------------------------------------------------------------------------
# verify


@dataclass(frozen=True)
class RunConfig:
    suite: tuple
    ns: tuple
    count: int
    seed: int
    tolerances: dict
    out: str | None
    fmt: str
    timings: bool


def parse_suite(text: str) -> tuple:
    if text == "all":
        return identities.IDS
    ids = tuple(t.strip() for t in text.split(",") if t.strip())
    unknown = [i for i in ids if i not in identities.REGISTRY]
    if unknown or not ids:
        raise ConfigError(f"unknown identity ids: {', '.join(unknown) or '(none given)'}")
    return ids


def parse_ns(text: str) -> tuple:
    out = []
    for part in text.split(","):
        m = re.fullmatch(r"\s*(\d+)\s*(?:-\s*(\d+)\s*)?", part)
        if not m:
            raise ConfigError(f"bad N range {text!r}")
        lo, hi = int(m.group(1)), int(m.group(2) or m.group(1))
        out.extend(range(lo, hi + 1))
    if not out or min(out) < 1:
        raise ConfigError("N must be a positive integer")
    return tuple(sorted(set(out)))


def parse_points(text: str) -> tuple[int, int]:
    if text == "fixed":
        return 1, 0
    m = re.fullmatch(r"random:(\d+):(-?\d+)", text)
    if not m or int(m.group(1)) < 1:
        raise ConfigError(f"bad point strategy {text!r}; use 'fixed' or 'random:COUNT:SEED'")
    return int(m.group(1)), int(m.group(2))


def parse_tolerances(items) -> dict:
    out = {}
    for item in items or ():
        name, _, value = item.partition("=")
        if name not in (identities.TRUNCATED, identities.QUADRATURE):
            raise ConfigError(f"tolerance override must name Truncated or Quadrature, got {name!r}")
        try:
            out[name] = float(value)
        except ValueError:
            raise ConfigError(f"bad tolerance value {value!r}") from None
    return out


def plan(config: RunConfig):
    """(cases, skipped ids) in deterministic order."""
    cases, skipped = [], []
    for id in config.suite:
        limit = identities.N_LIMITS.get(id)
        for N in config.ns:
            if limit is not None and N > limit:
                skipped.append((id, N))
                continue
            for index in range(config.count):
                cases.append((id, N, index))
    return cases, skipped


def _run_one(job):
    (id, N, index), seed, tolerances, timings = job
    try:
        case = identities.random_case(id, N, seed, index)
    except Exception as exc:
        return index, identities.VerificationReport(id, N, seed, {}, None, None, 0, float("nan"), float("nan"),
                                                    identities.Verdict.FAIL, identities.REGISTRY[id].tolerance_class,
                                                    error=f"{type(exc).__name__}: {exc}")
    return index, identities.verify(case, timings=timings, tolerances=tolerances)


def thread_count() -> int:
    raw = os.environ.get("SHL_LAB_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ConfigError(f"SHL_LAB_THREADS must be an integer, got {raw!r}") from None


def execute(config: RunConfig, workers: int = 1):
    cases, skipped = plan(config)
    jobs = [(c, config.seed, config.tolerances, config.timings) for c in cases]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_one, jobs))
    else:
        results = [_run_one(j) for j in jobs]
    # merge by (id order in the suite, N, index) regardless of completion order
    order = {id: k for k, id in enumerate(config.suite)}
    results.sort(key=lambda r: (order[r[1].id], r[1].N, r[0]))
    return results, skipped


def report_record(index: int, r: identities.VerificationReport, timings: bool) -> dict:
    rec = {
        "id": r.id,
        "N": r.N,
        "index": index,
        "seed": r.seed,
        "point": encode(r.point),
        "lhs": encode(r.lhs),
        "rhs": encode(r.rhs),
        "truncation": r.truncation,
        "abs_err": encode(r.abs_err),
        "rel_err": encode(r.rel_err),
        "verdict": r.verdict,
        "tolerance_class": r.tolerance_class,
        "error": r.error,
    }
    if timings and r.runtime_ms is not None:
        rec["runtime_ms"] = r.runtime_ms
    return rec


def render(config: RunConfig, records: list, skipped: list) -> str:
    if config.fmt == "csv":
        buf = io.StringIO()
        fields = ["id", "N", "index", "seed", "verdict", "tolerance_class", "truncation", "abs_err", "rel_err", "lhs",
                  "rhs", "error", "point"] + (["runtime_ms"] if config.timings else [])
        w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
        w.writeheader()
        for rec in records:
            row = {k: rec.get(k) for k in fields}
            for k in ("lhs", "rhs", "point"):
                row[k] = json.dumps(rec[k])
            w.writerow(row)
        return buf.getvalue()
    doc = {
        "schema_version": SCHEMA_VERSION,
        "config": {
            "suite": list(config.suite),
            "n": list(config.ns),
            "points": {"count": config.count, "seed": config.seed},
            "tolerances": {**identities.TOLERANCES, **config.tolerances},
            "skipped": [list(s) for s in skipped],
        },
        "reports": records,
    }
    return json.dumps(doc, indent=2) + "\n"


def cmd_verify(args) -> int:
    count, seed = parse_points(args.points)
    config = RunConfig(parse_suite(args.suite), parse_ns(args.n), count, seed, parse_tolerances(args.tol), args.out,
                       args.format, args.timings)
    results, skipped = execute(config, thread_count())
    records = [report_record(i, r, config.timings) for i, r in results]
    text = render(config, records, skipped)
    if config.out:
        with open(config.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    failed = [rec for rec in records if rec["verdict"] == identities.Verdict.FAIL]
    for rec in failed:
        detail = rec["error"] or f"rel_err={rec['rel_err']}"
        print(f"FAIL {rec['id']} N={rec['N']} index={rec['index']}: {detail}", file=sys.stderr)
    note = f", {len(skipped)} (id, N) pairs skipped beyond their N limit" if skipped else ""
    print(f"verified {len(records)} cases: {len(records) - len(failed)} passed, {len(failed)} failed{note}")
    return EXIT_FAIL if failed else EXIT_OK


# ---------------------------------------------------------------------------
# eval


def scalars(text: str | None) -> list:
    if text is None:
        return []
    try:
        return [parse_scalar(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise ConfigError(f"cannot parse scalar list {text!r}") from None


def one_scalar(text: str | None, default=None):
    if text is None:
        if default is None:
            raise ConfigError("missing required scalar")
        return default
    vals = scalars(text)
    if len(vals) != 1:
        raise ConfigError(f"expected a single scalar, got {text!r}")
    return vals[0]


def signature(text: str | None) -> Signature:
    if text is None:
        raise ConfigError("--lambda is required")
    try:
        return Signature([int(t) for t in text.split(",") if t.strip()])
    except ValueError as exc:
        raise ConfigError(f"bad signature {text!r}: {exc}") from None


def eval_params(args) -> ParameterSet:
    q = one_scalar(args.q)
    s = scalars(args.s) or [Fraction(0)]
    xi = scalars(args.xi) or [Fraction(1)]
    gamma = one_scalar(args.gamma, Fraction(1))
    return ParameterSet(q, s, xi, gamma)


def _eval_value(args):
    name = args.function
    if name in ("schur", "hlP", "hlQ", "iHLF"):
        lam, us = signature(args.lam), scalars(args.u)
        if name == "schur":
            return shl.schur(lam, us)
        t = one_scalar(args.t if args.t is not None else args.q)
        return {"hlP": shl.hl_P, "hlQ": shl.hl_Q, "iHLF": shl.iHL_F}[name](lam, us, t)
    params = eval_params(args)
    if name in ("Z", "ikdet"):
        us, vs = scalars(args.u), scalars(args.v)
        if name == "Z":
            a = int(args.a) if args.a is not None else None
            return vertex_model.pf_Z(us, vs, params, a)
        return identities.ik_det_rhs(us, vs, params)
    lam = signature(args.lam)
    table = {
        "F": lambda: shl.F(lam, scalars(args.u), params),
        "Fstar": lambda: shl.Fstar(lam, scalars(args.v), params),
        "Gstar": lambda: shl.Gstar(lam, scalars(args.v), params),
        "pfF": lambda: vertex_model.pf_F(lam, scalars(args.u), params),
        "pfFstar": lambda: vertex_model.pf_Fstar(lam, scalars(args.v), params),
        "pfGstar": lambda: vertex_model.pf_Gstar(lam, scalars(args.v), params),
    }
    return table[name]()


EVAL_FUNCTIONS = ("F", "Fstar", "Gstar", "pfF", "pfFstar", "pfGstar", "Z", "ikdet", "schur", "hlP", "hlQ", "iHLF")


def format_scalar(x) -> str:
    enc = encode(x)
    return json.dumps(enc) if isinstance(enc, list) else str(enc)


def cmd_eval(args) -> int:
    try:
        value = _eval_value(args)
    except (ConfigError, ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from None
    except ZeroDivisionError as exc:
        print(f"error: pole at this point ({exc})", file=sys.stderr)
        return EXIT_FAIL
    print(format_scalar(value))
    return EXIT_OK


# ---------------------------------------------------------------------------
# asep


def ints(text: str | None, what: str) -> list[int]:
    if text is None:
        raise ConfigError(f"--{what} is required")
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise ConfigError(f"bad integer list for --{what}: {text!r}") from None


def floats(text: str, what: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise ConfigError(f"bad number list for --{what}: {text!r}") from None


def parse_oracles(text: str | None) -> list[tuple]:
    out = []
    for item in (text or "").split(","):
        item = item.strip()
        if not item:
            continue
        if item == "ctmc":
            out.append(("ctmc",))
            continue
        m = re.fullmatch(r"mc(?::(\d+)(?::(-?\d+))?)?", item)
        if not m:
            raise ConfigError(f"unknown oracle {item!r}; use ctmc or mc:REPLICATES:SEED")
        out.append(("mc", int(m.group(1) or 100_000), int(m.group(2) or 0)))
    return out


def _initial(args) -> asep.ASEPConfig:
    if args.x is not None:
        x = ints(args.x, "x")
        if args.n is not None and len(x) != args.n:
            raise ConfigError("--x and --n disagree")
    else:
        x = [2 * i for i in range(args.n or 1)]
    try:
        return asep.ASEPConfig(x)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def cmd_asep(args) -> int:
    q = float(args.q)
    if not 0 <= q < 1:
        raise ConfigError("--q must lie in [0, 1)")
    x = _initial(args)
    if args.kind == "two-time":
        times, ks = floats(args.t, "t"), ints(args.k, "k")
        if len(times) != 2 or len(ks) != 2:
            raise ConfigError("--t and --k take two comma-separated values")
        try:
            spec = asep.SimSpec(x, q, tuple(times), tuple(ks))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        value = asep.two_time_prob(spec, nodes=args.nodes)
        result = {"integral": value.value, "imag_residual": value.imag_residual, "oracles": {}}
        for oracle in parse_oracles(args.oracle):
            if oracle[0] == "ctmc":
                c = asep.ctmc_oracle(spec)
                result["oracles"]["ctmc"] = {"value": c.two_time, "delta": value.value - c.two_time,
                                             "escaped_mass": c.escaped}
            else:
                mc = asep.mc_simulate(asep.SimSpec(x, q, tuple(times), tuple(ks), replicates=oracle[1],
                                                   seed=oracle[2]))
                key = f"mc:{oracle[1]}:{oracle[2]}"
                result["oracles"][key] = {"value": mc.estimate, "stderr": mc.stderr,
                                          "delta": value.value - mc.estimate,
                                          "z_score": (value.value - mc.estimate) / mc.stderr if mc.stderr else None}
    elif args.kind == "transition":
        y = asep.ASEPConfig(ints(args.y, "y"))
        t = floats(args.t, "t")
        if len(t) != 1:
            raise ConfigError("--t takes one value for transition")
        v = asep.transition_prob_detail(x, y, t[0], q)
        result = {"integral": v.value, "imag_residual": v.imag_residual, "oracles": {}}
        if any(o[0] == "ctmc" for o in parse_oracles(args.oracle)):
            c = asep.ctmc_oracle(asep.SimSpec(x, q, (t[0], t[0]), (y[0], y[0])))
            exact = c.single_time.get(y.positions, 0.0)
            result["oracles"]["ctmc"] = {"value": exact, "delta": v.value - exact}
    else:
        y = asep.ASEPConfig(ints(args.y, "y"))
        v = asep.plancherel_check(x, y, q)
        result = {"integral": [v.real, v.imag], "expected": 1 if x == y else 0}
    print(json.dumps(result, indent=2))
    return EXIT_OK


# ---------------------------------------------------------------------------
# list / schema


def cmd_list(args) -> int:
    rows = [
        {"id": s.id, "tolerance_class": s.tolerance_class, "max_N": identities.N_LIMITS.get(s.id), "title": s.title}
        for s in identities.REGISTRY.values()
    ]
    if args.json:
        print(json.dumps(rows, indent=2))
    else:
        for r in rows:
            limit = f"N<={r['max_N']}" if r["max_N"] is not None else "any N"
            print(f"{r['id']:<22} {r['tolerance_class']:<11} {limit:<6} {r['title']}")
    return EXIT_OK


def cmd_schema(args) -> int:
    print(json.dumps(REPORT_SCHEMA, indent=2))
    return EXIT_OK


# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="shl-lab", description="Exact verification of spin Hall-Littlewood identities and ASEP formulas.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", help="run registry identities at sampled points")
    v.add_argument("--suite", default="all", help="'all' or comma-separated identity ids")
    v.add_argument("--n", default="1-3", help="N values, e.g. 2 or 1-3 or 1,3")
    v.add_argument("--points", default="random:5:42", help="'fixed' or random:COUNT:SEED")
    v.add_argument("--tol", action="append", metavar="CLASS=VALUE", help="override Truncated or Quadrature bound")
    v.add_argument("--out", help="write the report here")
    v.add_argument("--format", choices=("json", "csv"), default="json")
    v.add_argument("--timings", action="store_true", help="record runtime_ms (makes reports non-reproducible)")
    v.set_defaults(func=cmd_verify)

    e = sub.add_parser("eval", help="evaluate one function at an exact point")
    e.add_argument("function", choices=EVAL_FUNCTIONS)
    e.add_argument("--lambda", dest="lam")
    e.add_argument("--u")
    e.add_argument("--v")
    e.add_argument("--q")
    e.add_argument("--s", help="s_0,s_1,...; the last value repeats")
    e.add_argument("--xi", help="xi_0,xi_1,...; the last value repeats")
    e.add_argument("--gamma")
    e.add_argument("--t", help="Hall-Littlewood parameter (defaults to --q)")
    e.add_argument("--a", help="arrow count for Z")
    e.set_defaults(func=cmd_eval)

    a = sub.add_parser("asep", help="ASEP contour integrals and oracles")
    a.add_argument("kind", choices=("two-time", "transition", "plancherel"))
    a.add_argument("--q", required=True)
    a.add_argument("--n", type=int)
    a.add_argument("--x", help="initial positions (default 0,2,4,...)")
    a.add_argument("--y", help="final positions for transition / plancherel")
    a.add_argument("--t", default="1.0")
    a.add_argument("--k", default="0,0")
    a.add_argument("--nodes", type=int, help="quadrature nodes per axis")
    a.add_argument("--oracle", help="comma-separated: ctmc, mc:REPLICATES:SEED")
    a.set_defaults(func=cmd_asep)

    lp = sub.add_parser("list", help="list registry identities")
    lp.add_argument("--json", action="store_true")
    lp.set_defaults(func=cmd_list)

    s = sub.add_parser("schema", help="print the JSON schema of verification reports")
    s.set_defaults(func=cmd_schema)
    return p


_NEGATIVE_VALUE = re.compile(r"^-\d")


def _attach_negative_values(argv: list[str]) -> list[str]:
    """Turn ``--k -1,-2`` into ``--k=-1,-2`` so argparse does not read the value as a flag."""
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok.startswith("--") and "=" not in tok and i + 1 < len(argv) and _NEGATIVE_VALUE.match(argv[i + 1]):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_attach_negative_values(argv))
    except SystemExit as exc:
        # usage errors and --help
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"shl-lab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
