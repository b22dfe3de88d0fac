"""Command-line front end: ``gwcache curve | simulate | trace``.

Exit codes: 0 on success, 1 when a simulated invariant is violated,
2 for invalid input.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import schemes
from .allocator import lattice, rate_theorem1
from .bounds import gap_certificate, tilde_tuple
from .gray_wyner import RateTuple, request_sets
from .harness import Simulation, sweep
from .source_model import (
    PmfSource,
    SourceSpec,
    SpecError,
    entropy_profile_pmf,
    entropy_profile_structured,
    load_source,
    make_structured_library,
)

CURVE_HEADER = ["M", "R_ach", "R_lb", "gap", "gap_bound", "regime"]
CONFIG_KEYS = {"c0", "cp", "cv", "q", "pmf", "source", "seed", "grid", "M", "demand", "out", "tuple"}


class UsageError(Exception):
    pass


def fmt(x) -> str:
    """Stable text for a bit count: integers verbatim, others to 6 decimals."""
    if x is None:
        return "NA"
    if isinstance(x, Fraction) and x.denominator == 1:
        return str(x.numerator)
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    text = f"{float(x):.6f}".rstrip("0").rstrip(".")
    return "0" if text in ("-0", "") else text


def _number(text) -> Fraction:
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a number: {text!r}") from None


def _write_csv(rows, header, out):
    lines = [",".join(header)] + [",".join(fmt(v) for v in row) for row in rows]
    text = "\n".join(lines) + "\n"
    if out:
        Path(out).write_text(text, newline="\n")
    else:
        sys.stdout.write(text)


# -- configuration ---------------------------------------------------------


def _merge_config(args) -> dict:
    cfg = {}
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(data, dict):
            raise UsageError("config must be a JSON object")
        unknown = set(data) - CONFIG_KEYS
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(data)
    for key in CONFIG_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = value
    return cfg


def _source(cfg):
    structured = any(cfg.get(k) is not None for k in ("c0", "cp", "cv"))
    defined = [structured, cfg.get("pmf") is not None, cfg.get("source") is not None]
    if sum(defined) != 1:
        raise UsageError("give exactly one source: --c0/--cp/--cv, --pmf or a source file")
    try:
        if structured:
            q = int(cfg.get("q") or 4)
            return SourceSpec(int(cfg.get("c0") or 0), int(cfg.get("cp") or 0), int(cfg.get("cv") or 0), q)
        src = load_source(cfg.get("pmf") or cfg.get("source"))
        if isinstance(src, SourceSpec) and cfg.get("q") is not None:
            src = SourceSpec(src.c0, src.cp, src.cv, int(cfg["q"]))
        return src
    except (OSError, json.JSONDecodeError, TypeError) as exc:
        raise UsageError(f"cannot load source: {exc}") from None


def _tuple_for(src, cfg) -> tuple[RateTuple, bool]:
    if cfg.get("tuple") is not None:
        parts = [_number(x) for x in str(cfg["tuple"]).split(",")]
        if len(parts) != 3:
            raise UsageError("--tuple needs rho0,rho_pair,rho_priv")
        try:
            return RateTuple(*parts), False
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    if isinstance(src, SourceSpec):
        return tilde_tuple(src), True
    # all-common point: always achievable, private rate not maximal
    h = entropy_profile_pmf(src)
    return RateTuple(Fraction(h.h_triple), 0, 0), False


def _grid(cfg, t: RateTuple, q: int) -> list[Fraction]:
    spec = cfg.get("grid") or "auto"
    if isinstance(spec, list):
        values = [_number(x) for x in spec]
    elif spec == "auto":
        values = lattice(t, q)
    elif str(spec).startswith("per:"):
        try:
            n = int(str(spec)[4:])
        except ValueError:
            raise UsageError(f"bad grid spec {spec!r}") from None
        if n < 1:
            raise UsageError("per:N needs N >= 1")
        values = lattice(t, n)
    else:
        values = [_number(x) for x in str(spec).split(",") if x.strip()]
    if not values:
        raise UsageError("empty grid")
    for M in values:
        if M < 0 or M > t.sum_rate():
            raise UsageError(f"grid value {M} outside [0, {t.sum_rate()}]")
    return sorted(set(values))


def _demand(text):
    try:
        d = tuple(int(x) for x in str(text).split(","))
        request_sets(d)
    except ValueError:
        raise UsageError(f"demand must be d1,d2 with entries in 1..3, got {text!r}") from None
    return d


def _nearest(M, t, q) -> str:
    pts = lattice(t, q)
    below = [x for x in pts if x < M]
    above = [x for x in pts if x > M]
    near = ([below[-1]] if below else []) + ([above[0]] if above else [])
    return ", ".join(fmt(x) for x in near)


# -- commands ----------------------------------------------------------------


def cmd_curve(cfg) -> int:
    src = _source(cfg)
    t, certify = _tuple_for(src, cfg)
    h = entropy_profile_structured(src) if isinstance(src, SourceSpec) else entropy_profile_pmf(src)
    q = src.granularity_q if isinstance(src, SourceSpec) else int(cfg.get("q") or 4)
    rows = []
    for M in _grid(cfg, t, q):
        cert = gap_certificate(M, t, h, rho_maximal=certify)
        _, regime = rate_theorem1(M, t)
        rows.append([M, cert.achievable, cert.lower_bound, cert.gap, cert.theorem3_bound, regime])
    _write_csv(rows, CURVE_HEADER, cfg.get("out"))
    return 0


def _flip_first_bit(demand, codewords):
    out = dict(codewords)
    for name, cw in codewords.items():
        if cw.units:
            first = cw.units[0]
            payload = first.payload.copy()
            payload[0] ^= 1
            out[name] = schemes.MulticastCodeword((schemes.CacheUnit(payload, first.composition),) + cw.units[1:])
            break
    return out


def cmd_simulate(cfg, tamper=None) -> int:
    src = _source(cfg)
    if isinstance(src, PmfSource):
        raise UsageError(
            "simulate needs a structured source (--c0/--cp/--cv); a joint pmf only supports the curve command"
        )
    t = tilde_tuple(src)
    grid = _grid(cfg, t, src.granularity_q)
    seed = int(cfg.get("seed") or 0)
    library = make_structured_library(src, seed)
    for M in grid:
        try:
            Simulation(library, M)
        except schemes.OffGridError:
            raise UsageError(
                f"M={fmt(M)} is not on the quantization grid; nearest representable: {_nearest(M, t, src.granularity_q)}"
            ) from None
    points, verdict = sweep(src, seed, grid, tamper)
    rows = [[p.M, p.achievable, p.lower_bound, p.gap, p.gap_bound, p.regime_id, p.measured] for p in points]
    _write_csv(rows, CURVE_HEADER + ["R_measured"], cfg.get("out"))
    print(verdict.line())
    for v in verdict.violations:
        print(f"  {v}")
    return 0 if verdict.passed else 1


def trace_lines(spec: SourceSpec, M, demand, seed: int = 0, sep: str = schemes.XOR) -> list[str]:
    """Text rendering of allocation, caches, codeword and decoding for one demand."""
    library = make_structured_library(spec, seed)
    sim = Simulation(library, M)
    req = request_sets(demand)
    a = sim.allocation
    t = sim.tuple
    pat = req.l2_pattern
    lines = [
        f"tuple: rho0={fmt(t.rho0)} rho_pair={fmt(t.rho_pair)} rho_priv={fmt(t.rho_priv)}",
        f"M={fmt(sim.M)} demand=({demand[0]},{demand[1]})",
        f"allocation: m1={fmt(a.m1)} m2={fmt(a.m2)} m3={fmt(a.m3)} regime={a.regime_id}",
    ]
    if pat.kind == "DISTINCT":
        lines.append(f"L2 pattern: DISTINCT common=W{pat.common} r1-only=W{pat.only_r1} r2-only=W{pat.only_r2}")
    else:
        lines.append(f"L2 pattern: EQUAL both want W{pat.only_r1}, W{pat.only_r2}")
    result = sim.run_demand(req.demand)
    for name in ("L3", "L2", "L1"):
        caches = sim.caches[name]
        cw = result.codewords[name]
        plan = ", ".join(
            f"{seg.scheme.name}[{seg.start}:{seg.stop}]" + (f" as segment {seg.name}" if seg.name else "")
            for seg in caches.segments
        )
        lines.append(f"[{name}] budget={fmt(caches.budget)} plan: {plan or 'empty sublibrary'}")
        for k in (1, 2):
            units = caches.units(k)
            body = ", ".join(u.label(sep) for u in units) if units else "(empty)"
            lines.append(f"  Z_r{k} = {body}")
        if cw.units:
            lines.append("  Y = {" + ", ".join(cw.labels(sep)) + "}" + f"  ({cw.total_bits} bits)")
        else:
            lines.append("  Y = {}  (empty codeword)")
        for k in (1, 2):
            for step in schemes.decode_steps(k, caches, cw, sep):
                lines.append(f"  r{k}: {step}")
    lines.append(f"codeword: {result.bits} bits" + (" (empty codeword)" if result.bits == 0 else ""))
    for k in (1, 2):
        status = "success" if result.success[k - 1] else f"FAILED: {result.detail[k - 1]}"
        lines.append(f"decode r{k}: X{demand[k - 1]} {status}")
    return lines


def cmd_trace(cfg, ascii_xor: bool = False) -> int:
    src = _source(cfg)
    if isinstance(src, PmfSource):
        raise UsageError("trace needs a structured source (--c0/--cp/--cv)")
    if cfg.get("M") is None or cfg.get("demand") is None:
        raise UsageError("trace needs --M and --demand")
    M = _number(cfg["M"])
    t = tilde_tuple(src)
    if not 0 <= M <= t.sum_rate():
        raise UsageError(f"M={fmt(M)} outside [0, {fmt(t.sum_rate())}]")
    demand = _demand(cfg["demand"])
    try:
        lines = trace_lines(src, M, demand, int(cfg.get("seed") or 0), "+" if ascii_xor else schemes.XOR)
    except schemes.OffGridError:
        raise UsageError(
            f"M={fmt(M)} is not on the quantization grid; nearest representable: {_nearest(M, t, src.granularity_q)}"
        ) from None
    text = "\n".join(lines) + "\n"
    if cfg.get("out"):
        Path(cfg["out"]).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gwcache", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("curve", "analytic rate, lower bound and gap table (CSV)"),
        ("simulate", "bit-level simulation over all demands (CSV + verdict)"),
        ("trace", "step-by-step rendering of one demand"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="JSON config; command-line flags take precedence")
        p.add_argument("--c0", type=int, help="bits of the component shared by all files")
        p.add_argument("--cp", type=int, help="bits of each pairwise component")
        p.add_argument("--cv", type=int, help="bits of each private component")
        p.add_argument("--q", type=int, help="memory-sharing granularity (default 4)")
        p.add_argument("--pmf", help="JSON source file (joint pmf or structured spec)")
        p.add_argument("--seed", type=int)
        p.add_argument("--grid", help="auto | per:N | comma-separated cache sizes")
        p.add_argument("--M", help="cache size in bits (trace)")
        p.add_argument("--demand", help="d1,d2 (trace)")
        p.add_argument("--out", help="output path (default: stdout)")
        p.add_argument("--tuple", help="rho0,rho_pair,rho_priv override (curve)")
        if name == "trace":
            p.add_argument("--ascii", action="store_true", help="write XOR as '+'")
        if name == "simulate":
            p.add_argument("--tamper", action="store_true", help=argparse.SUPPRESS)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        cfg = _merge_config(args)
        if args.command == "curve":
            return cmd_curve(cfg)
        if args.command == "simulate":
            return cmd_simulate(cfg, _flip_first_bit if args.tamper else None)
        return cmd_trace(cfg, args.ascii)
    except (UsageError, SpecError, ValueError) as exc:
        print(f"gwcache: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
