"""Command-line entry point: operator catalogues, targeted verifications,
model reports, and the orchestrated verification suites.

Exit codes: 0 all checks pass, 1 at least one failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction

from . import __version__
from .expr import Binding, ExprError
from .parser import parse, to_string, ParseError
from .diffop import pretty
from .families import monomial_family, literature_ops, build_J, build_K
from .invariance import SamplePlan, check_invariant
from .models import build_example, verify_susy_conditions, algebraic_spectrum
from .numerics import Grid, fd_spectrum, normalizability_probe
from .suites import SUITES, seed_basis, partner_basis


class ConfigError(Exception):
    pass


@dataclass
class SuiteConfig:
    suites: list = field(default_factory=lambda: list(SUITES))
    seed: int = 7
    tol: float = 1e-9
    bindings: dict = field(default_factory=dict)
    fmt: str = "json"

    def __post_init__(self):
        unknown = [s for s in self.suites if s not in SUITES]
        if unknown:
            raise ConfigError(f"unknown suites: {unknown}")

    def plan(self) -> SamplePlan:
        return SamplePlan(seed=self.seed, tol=self.tol)


@dataclass
class Report:
    config: SuiteConfig
    checks: list

    @property
    def summary(self) -> dict:
        out = {"pass": 0, "fail": 0, "skipped": 0}
        for c in self.checks:
            key = c["verdict"] if c["verdict"] in out else "fail"
            out[key] += 1
        out["total"] = len(self.checks)
        return out

    def to_json(self, include_timing: bool = True) -> str:
        checks = sorted(self.checks, key=lambda c: c["id"])
        if not include_timing:
            checks = [{k: v for k, v in c.items() if k != "millis"} for c in checks]
        doc = {
            "meta": {
                "seed": self.config.seed,
                "version": __version__,
                "config": {
                    "suites": self.config.suites,
                    "tol": self.config.tol,
                    "bindings": self.config.bindings,
                },
            },
            "checks": checks,
            "summary": self.summary,
        }
        return json.dumps(doc, indent=2, sort_keys=True)

    def to_markdown(self) -> str:
        lines = [f"# verification report (seed {self.config.seed})", ""]
        s = self.summary
        lines.append(f"**{s['pass']} pass / {s['fail']} fail / "
                     f"{s['skipped']} skipped** of {s['total']}")
        lines.append("")
        lines.append("| check | anchor | verdict | residual |")
        lines.append("|---|---|---|---|")
        for c in sorted(self.checks, key=lambda c: c["id"]):
            res = "" if c["residual"] is None else f"{c['residual']:.2e}"
            lines.append(f"| `{c['id']}` | {c['anchor']} | {c['verdict']} | {res} |")
        lines.append("")
        return "\n".join(lines)


def run_suite(config: SuiteConfig) -> Report:
    plan = config.plan()
    checks = []
    for name in config.suites:
        checks.extend(SUITES[name](plan))
    return Report(config, checks)


def emit_report(report: Report, fmt: str) -> str:
    if fmt == "json":
        return report.to_json()
    if fmt in ("md", "markdown"):
        return report.to_markdown()
    raise ConfigError(f"unknown report format {fmt!r}")


# ---------------------------------------------------------------------------
# argument plumbing

def _parse_bindings(text: str | None) -> dict:
    out = {}
    if not text:
        return out
    for piece in text.split(","):
        piece = piece.strip()
        if not piece:
            continue
        if "=" not in piece:
            raise ConfigError(f"binding {piece!r} is not of the form name=value")
        k, v = piece.split("=", 1)
        try:
            out[k.strip()] = float(Fraction(v.strip()))
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"bad binding value {v!r}") from exc
    return out


def _read_config_file(path: str) -> dict:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"bad config line {raw.rstrip()!r}")
            k, v = (s.strip() for s in line.split("=", 1))
            out[k] = v
    return out


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"bad rational {text!r}") from exc


def _write_or_print(text: str, path: str | None):
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        print(text)


# ---------------------------------------------------------------------------
# subcommands

def _cmd_catalog(args) -> int:
    lam = _fraction(args.exponent) if args.exponent else None
    fam = monomial_family(args.family, lam)
    entries = {}
    for kind in ("J", "K"):
        for i, op in enumerate(fam[kind], start=1):
            entries[f"{kind}{i}"] = pretty(op, "tex" if args.format == "tex" else "text")
    side = {"minus": "minus", "plus": "plus"}
    for s in side:
        try:
            for name, op in literature_ops(args.family, s, lam).items():
                entries[f"catalogued:{s}:{name}"] = pretty(
                    op, "tex" if args.format == "tex" else "text")
        except ExprError:
            pass
    if args.format == "json":
        print(json.dumps(entries, indent=2, sort_keys=True))
    else:
        for name in sorted(entries):
            print(f"{name}: {entries[name]}")
    return 0


def _cmd_verify(args) -> int:
    plan = SamplePlan(seed=args.seed, tol=args.tol)
    checks = []
    if args.what == "invariance":
        f = parse(args.f)
        ops = args.ops.split(",") if args.ops else [f"J{i}" for i in range(1, 9)]
        V = seed_basis(f)
        Vk = partner_basis(f)
        for name in ops:
            name = name.strip()
            idx = int(name[1:])
            t0 = time.monotonic()
            if name.startswith("J"):
                v = check_invariant(build_J(idx, f), V, plan)
            elif name.startswith("K"):
                v = check_invariant(build_K(idx, f), Vk, plan)
            else:
                raise ConfigError(f"unknown operator {name!r}")
            checks.append({"id": f"verify:{name}", "anchor": f"invariance of {name}",
                           "verdict": "pass" if v.passed else "fail",
                           "residual": max(v.residuals),
                           "millis": round(1000 * (time.monotonic() - t0), 3)})
    elif args.what == "commutators":
        from .invariance import verify_commutator_table

        for rec in verify_commutator_table(parse(args.f), plan):
            checks.append({"id": f"verify:{rec['id']}", "anchor": rec["id"],
                           "verdict": "pass" if rec["passed"] else "fail",
                           "residual": rec["residual"], "millis": 0.0})
    else:
        raise ConfigError(f"unknown verification target {args.what!r}")
    cfg = SuiteConfig(suites=[], seed=args.seed, tol=args.tol)
    report = Report(cfg, checks)
    _write_or_print(emit_report(report, "json"), args.json)
    return 0 if report.summary["fail"] == 0 else 1


def _cmd_model(args) -> int:
    bindings = _parse_bindings(args.bind)
    model = build_example(args.example, Binding(params=bindings))
    plan = SamplePlan(seed=args.seed)
    res = verify_susy_conditions(model, plan)
    doc = {
        "example": args.example,
        "bindings": bindings,
        "functions": {
            "z(q)": to_string(model.z_of_q),
            "E": to_string(model.E),
            "F": to_string(model.F),
            "W": to_string(model.W),
            "V-": to_string(model.V_minus),
            "V+": to_string(model.V_plus),
        },
        "residuals": {
            "cond2": res.cond2, "cond3": res.cond3,
            "first-integral-match": max(res.f1_match, res.f2_match),
            "intertwining": res.intertwining,
        },
        "spectrum": {},
        "normalizable": {},
    }
    for side in ("minus", "plus"):
        sp = algebraic_spectrum(model, side, plan)
        doc["spectrum"][side] = [
            {"re": ev.real, "im": ev.imag, "residual": r}
            for ev, r in zip(sp.eigenvalues, sp.residuals)
        ]
        sector = model.sector_minus if side == "minus" else model.sector_plus
        flags = []
        if model.family == "example1":
            dom = (0.0, float("inf"))
        elif model.family == "example2":
            dom = (float("-inf"), float("inf"))
        else:
            dom = model.sample_intervals[0]
        for b in sector.elements:
            flags.append(normalizability_probe(b, dom, model.binding))
        doc["normalizable"][side] = flags
    if args.report == "json":
        _write_or_print(json.dumps(doc, indent=2, sort_keys=True), args.out)
    else:
        lines = [f"# model report: example {args.example}", ""]
        lines.append(f"bindings: `{bindings}`")
        lines.append("")
        for k, v in doc["functions"].items():
            lines.append(f"- {k} = `{v}`")
        lines.append("")
        lines.append("| residual | value |")
        lines.append("|---|---|")
        for k, v in doc["residuals"].items():
            lines.append(f"| {k} | {v:.3e} |")
        lines.append("")
        for side in ("minus", "plus"):
            evs = ", ".join(f"{e['re']:.6g}{e['im']:+.2g}i" if e["im"] else f"{e['re']:.6g}"
                            for e in doc["spectrum"][side])
            lines.append(f"- {side} spectrum: {evs}")
            lines.append(f"- {side} sector normalizability: {doc['normalizable'][side]}")
        _write_or_print("\n".join(lines), args.out)
    worst = max(doc["residuals"].values())
    return 0 if worst < 1e-7 else 1


def _cmd_x2(args) -> int:
    from .x2 import verify_x2_identities

    if args.action != "verify":
        raise ConfigError(f"unknown x2 action {args.action!r}")
    plan = SamplePlan(seed=args.seed)
    sides = {"both": ("minus", "plus"), "minus": ("minus",),
             "plus": ("plus",)}[args.side]
    recs = verify_x2_identities(_fraction(args.alpha), plan, sides=sides)
    checks = [{"id": r["id"], "anchor": r["id"],
               "verdict": {"passed": "pass", "failed": "fail",
                           "skipped": "skipped"}[r["status"]],
               "residual": r.get("residual"), "millis": 0.0} for r in recs]
    cfg = SuiteConfig(suites=[], seed=args.seed)
    report = Report(cfg, checks)
    _write_or_print(emit_report(report, "json"), args.json)
    return 0 if report.summary["fail"] == 0 else 1


def _cmd_spectrum(args) -> int:
    bindings = _parse_bindings(args.bind)
    if args.example:
        model = build_example(args.example, Binding(params=bindings))
        if model.fd_domain is None:
            raise ConfigError("this model family has no designated grid domain")
        lo, hi = model.fd_domain
        ev = fd_spectrum(model.V_minus, Grid(lo, hi, args.grid), args.k, model.binding)
        sp = algebraic_spectrum(model, "minus", SamplePlan(seed=args.seed))
        doc = {"grid": [lo, hi, args.grid],
               "fd": list(map(float, ev)),
               "algebraic": [{"re": e.real, "im": e.imag} for e in sp.eigenvalues]}
    else:
        V = parse(args.potential, "q")
        ev = fd_spectrum(V, Grid(args.lo, args.hi, args.grid), args.k,
                         Binding(params=bindings))
        doc = {"grid": [args.lo, args.hi, args.grid], "fd": list(map(float, ev))}
    print(json.dumps(doc, indent=2))
    return 0


def _cmd_suite(args) -> int:
    overrides = {}
    if args.config:
        overrides = _read_config_file(args.config)
    suites = args.suites.split(",") if args.suites else \
        overrides.get("suites", "").split(",") if overrides.get("suites") else list(SUITES)
    suites = [s.strip() for s in suites if s.strip()]
    seed = args.seed if args.seed is not None else int(overrides.get("seed", 7))
    tol = args.tol if args.tol is not None else float(overrides.get("tol", 1e-9))
    bindings = _parse_bindings(args.bind or overrides.get("bind"))
    config = SuiteConfig(suites=suites, seed=seed, tol=tol, bindings=bindings)
    report = run_suite(config)
    if args.json:
        _write_or_print(report.to_json(), args.json)
    if args.md:
        _write_or_print(report.to_markdown(), args.md)
    if not args.json and not args.md:
        print(report.to_markdown())
    s = report.summary
    print(f"[qsusy] {s['pass']} pass / {s['fail']} fail / {s['skipped']} skipped",
          file=sys.stderr)
    return 0 if s["fail"] == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qsusy",
                                 description="quasi-solvable operator toolkit")
    ap.add_argument("--version", action="version", version=f"qsusy {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("catalog", help="dump an operator family")
    c.add_argument("--family", required=True, choices=["A", "B", "C"])
    c.add_argument("--lambda", dest="exponent", default=None,
                   help="exponent for family C, e.g. 5/2")
    c.add_argument("--format", default="text", choices=["text", "json", "tex"])
    c.set_defaults(func=_cmd_catalog)

    v = sub.add_parser("verify", help="targeted verification")
    v.add_argument("what", choices=["invariance", "commutators"])
    v.add_argument("--f", required=True, help="generating function, e.g. 'exp(z)'")
    v.add_argument("--ops", default=None, help="comma list like J1,J2,K3")
    v.add_argument("--seed", type=int, default=7)
    v.add_argument("--tol", type=float, default=1e-9)
    v.add_argument("--json", default=None, help="write the JSON report here")
    v.set_defaults(func=_cmd_verify)

    m = sub.add_parser("model", help="build and report a closed-form model")
    m.add_argument("--example", type=int, required=True, choices=[1, 2, 3])
    m.add_argument("--bind", required=True, help="alpha=1,nu=1,b0=0.5")
    m.add_argument("--report", default="md", choices=["md", "json"])
    m.add_argument("--out", default=None)
    m.add_argument("--seed", type=int, default=7)
    m.set_defaults(func=_cmd_model)

    x = sub.add_parser("x2", help="exceptional-subspace verifications")
    x.add_argument("action", choices=["verify"])
    x.add_argument("--alpha", required=True)
    x.add_argument("--side", default="both", choices=["both", "minus", "plus"])
    x.add_argument("--seed", type=int, default=7)
    x.add_argument("--json", default=None)
    x.set_defaults(func=_cmd_x2)

    s = sub.add_parser("spectrum", help="finite-difference cross-check")
    s.add_argument("--example", type=int, default=None, choices=[1, 2, 3])
    s.add_argument("--potential", default=None, help="potential in q, e.g. 'q^2/2'")
    s.add_argument("--lo", type=float, default=-12.0)
    s.add_argument("--hi", type=float, default=12.0)
    s.add_argument("--grid", type=int, default=4000)
    s.add_argument("--k", type=int, default=6)
    s.add_argument("--bind", default=None)
    s.add_argument("--seed", type=int, default=7)
    s.set_defaults(func=_cmd_spectrum)

    r = sub.add_parser("suite", help="run verification suites")
    r.add_argument("--suites", default=None,
                   help=f"comma list from {sorted(SUITES)}")
    r.add_argument("--seed", type=int, default=None)
    r.add_argument("--tol", type=float, default=None)
    r.add_argument("--bind", default=None)
    r.add_argument("--config", default=None, help="key = value overrides file")
    r.add_argument("--json", default=None)
    r.add_argument("--md", default=None)
    r.set_defaults(func=_cmd_suite)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
        return args.func(args)
    except (ConfigError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ExprError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
