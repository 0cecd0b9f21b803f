"""Command-line verification campaigns.

    finslab <command> [--a R] [--m R] [--n R] [--r R] [--s R] [--seed N]
                      [--samples N] [--tol NAME=R] [--out PATH] [--csv PATH]

Exit codes: 0 all checks pass (findings allowed), 2 a check failed,
1 configuration or usage error.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import hashlib
import io
import json
import sys
import time
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .diffcore import ConstantField, FlatMetric
from .finsler import (
    EmptyDomain,
    constancy_scan,
    einstein_check,
    sample_flags,
    sample_pairs,
    scan_values,
)
from .killing import U_s, UnderdeterminedSampling, V_r, W_mn, classify_killing, hopf_dual_field
from .riemann import TaubNutMetric, curvature_report, make_rng, sample_ball
from .zermelo import (
    NavigationData,
    randers_from_navigation,
    wind_norm_closed_Us,
    wind_norm_closed_Vr,
    wind_norm_direct,
)

EXIT_OK, EXIT_CONFIG, EXIT_FAIL = 0, 1, 2

DEFAULT_TOLERANCES = {
    "verify-ricci-flat": {"ricci": 1e-8, "nonflat": 1e-3},
    "classify-killing": {"pattern": 1e-9, "svd": 1e-9},
    "verify-einstein": {"einstein": 1e-6, "K": 1e-7, "c": 1e-9, "spread": 1e-4},
    "crosscheck-norms": {"us": 1e-10, "vr": 1e-10, "hopf": 1e-10},
    "scan-flag-curvature": {"spread": 1e-4, "flat": 1e-9},
}
DEFAULT_SAMPLES = {
    "verify-ricci-flat": 100,
    "classify-killing": 20,
    "verify-einstein": 20,
    "crosscheck-norms": 1000,
    "scan-flag-curvature": 100,
}
FLAT_WIND = (0.3, -0.2, 0.1, 0.0)


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    a: float = 1.0
    m: float = 0.5
    n: float = 0.5
    r: float = 1.0
    s: float = 0.25
    seed: int = 0
    samples: int = 0
    flags: int = 100
    field: str = "vr"
    flat: bool = False
    tolerances: dict = dataclasses.field(default_factory=dict)
    out: str | None = None
    csv: str | None = None

    def validate(self) -> None:
        if self.samples < 1:
            raise ConfigError(f"--samples must be >= 1, got {self.samples}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("--seed must be a 64-bit unsigned integer")
        if not self.flat and not self.a > 0:
            raise ConfigError(f"--a must be > 0 for Taub-NUT commands, got {self.a}")
        if self.flags < 2 and self.command == "verify-einstein":
            raise ConfigError("--flags must be >= 2")
        known = DEFAULT_TOLERANCES[self.command]
        for name in self.tolerances:
            if name not in known:
                raise ConfigError(f"unknown tolerance {name!r} for {self.command}; known: {sorted(known)}")

    def tol(self, name: str) -> float:
        return self.tolerances.get(name, DEFAULT_TOLERANCES[self.command][name])


class Report:
    def __init__(self, config: RunConfig):
        self.config = config
        self.checks: list[dict] = []
        self.findings: list[dict] = []
        self._start = time.perf_counter()

    def check(self, name: str, ok: bool, value, threshold, status: str | None = None) -> None:
        self.checks.append(
            {
                "name": name,
                "status": status or ("pass" if ok else "fail"),
                "value": _plain(value),
                "threshold": _plain(threshold),
            }
        )

    def finding(self, name: str, **detail) -> None:
        self.findings.append({"name": name, **{k: _plain(v) for k, v in detail.items()}})

    @property
    def failed(self) -> bool:
        return any(c["status"] == "fail" for c in self.checks)

    def to_dict(self) -> dict:
        cfg = asdict(self.config)
        cfg["tolerances"] = {k: cfg["tolerances"][k] for k in sorted(cfg["tolerances"])}
        return {
            "command": self.config.command,
            "config": cfg,
            "checks": self.checks,
            "findings": self.findings,
            "version": __version__,
            "duration_ms": round(1000 * (time.perf_counter() - self._start), 3),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"


def _plain(v):
    if isinstance(v, np.ndarray):
        return [_plain(t) for t in v.tolist()]
    if isinstance(v, (list, tuple)):
        return [_plain(t) for t in v]
    if isinstance(v, (np.floating, float)):
        return float(v)
    if isinstance(v, (np.integer, int)) and not isinstance(v, bool):
        return int(v)
    return v


def report_digest(text: str) -> str:
    """SHA-256 of a report with the wall-clock field removed."""
    body = json.loads(text)
    body.pop("duration_ms", None)
    return hashlib.sha256(json.dumps(body, sort_keys=False).encode()).hexdigest()


# -- commands -----------------------------------------------------------------


def cmd_verify_ricci_flat(cfg: RunConfig) -> Report:
    rep = Report(cfg)
    g = TaubNutMetric(cfg.a)
    pts = sample_ball(make_rng(cfg.seed), cfg.samples)
    reports = [curvature_report(g, p) for p in pts]
    ric = max(r.ricci_max_abs for r in reports)
    k = int(np.argmax([r.riemann_max_abs for r in reports]))
    riem = reports[k].riemann_max_abs
    rep.check("ricci_max_abs", ric < cfg.tol("ricci"), ric, cfg.tol("ricci"))
    rep.check("riemann_max_abs", riem > cfg.tol("nonflat"), riem, cfg.tol("nonflat"))
    rep.finding("most_curved_point", point=pts[k], riemann_max_abs=riem)
    return rep


def cmd_classify_killing(cfg: RunConfig) -> Report:
    rep = Report(cfg)
    metric = FlatMetric() if cfg.flat else TaubNutMetric(cfg.a)
    pts = sample_ball(make_rng(cfg.seed), cfg.samples)
    try:
        result = classify_killing(metric, pts, seed=cfg.seed, tolerance=cfg.tol("svd"))
    except UnderdeterminedSampling as exc:
        raise ConfigError(str(exc)) from exc
    expected = 10 if cfg.flat else 4
    rep.check("solution_dimension", result.dimension == expected, result.dimension, expected)
    if not cfg.flat:
        pr = result.pattern_residual
        rep.check("pattern_residual", pr < cfg.tol("pattern"), pr, cfg.tol("pattern"))
    rep.finding("basis", vectors=np.round(result.basis, 12), points_used=result.n_points)
    return rep


def _navigation(cfg: RunConfig) -> NavigationData:
    if cfg.flat:
        return NavigationData(FlatMetric(), ConstantField(FLAT_WIND))
    wind = {"vr": lambda: V_r(cfg.r), "us": lambda: U_s(cfg.s), "wmn": lambda: W_mn(cfg.m, cfg.n)}
    if cfg.field not in wind:
        raise ConfigError(f"--field must be one of {sorted(wind)}, got {cfg.field!r}")
    return NavigationData(TaubNutMetric(cfg.a), wind[cfg.field]())


def cmd_verify_einstein(cfg: RunConfig) -> Report:
    rep = Report(cfg)
    nav = _navigation(cfg)
    F = randers_from_navigation(nav)
    rng = make_rng(cfg.seed)
    try:
        pairs = sample_pairs(nav, rng, cfg.samples)
        flags = sample_flags(nav, rng, cfg.flags)
    except EmptyDomain as exc:
        rep.finding("empty-domain", detail=str(exc))
        return rep
    er = einstein_check(F, nav, pairs)
    rep.check("einstein_relative_residual", er.max_relative_residual < cfg.tol("einstein"),
              er.max_relative_residual, cfg.tol("einstein"))
    rep.check("K", abs(er.K) < cfg.tol("K"), er.K, cfg.tol("K"))
    rep.check("K_fit", abs(er.K_fit) < cfg.tol("K"), er.K_fit, cfg.tol("K"))
    rep.check("c", abs(er.c) < cfg.tol("c"), er.c, cfg.tol("c"))
    lo, hi, spread = constancy_scan(F, flags)
    if cfg.flat:
        rep.check("flag_curvature_spread", spread < DEFAULT_TOLERANCES["scan-flag-curvature"]["flat"],
                  spread, DEFAULT_TOLERANCES["scan-flag-curvature"]["flat"])
    else:
        rep.check("flag_curvature_spread", spread > cfg.tol("spread"), spread, cfg.tol("spread"))
    rep.finding(
        "einstein_fit",
        K_fit=er.K_fit,
        K_pointwise_spread=er.K_pointwise_spread,
        homothety_residual=er.homothety_residual,
        base_einstein_constant=er.base_einstein_constant,
        base_einstein_residual=er.base_einstein_residual,
        max_abs_residual=er.max_residual,
    )
    rep.finding("flag_curvature_range", min=lo, max=hi, spread=spread)
    return rep


def cmd_crosscheck_norms(cfg: RunConfig) -> Report:
    rep = Report(cfg)
    g = TaubNutMetric(cfg.a)
    pts = sample_ball(make_rng(cfg.seed), cfg.samples)
    comparisons = [
        ("us", NavigationData(g, U_s(cfg.s)), lambda p: wind_norm_closed_Us(cfg.a, cfg.s, p)),
        ("vr", NavigationData(g, V_r(cfg.r)), lambda p: wind_norm_closed_Vr(cfg.a, cfg.r, p)),
        ("hopf", NavigationData(g, hopf_dual_field(cfg.r)), lambda p: wind_norm_closed_Vr(cfg.a, cfg.r, p)),
    ]
    for name, nav, closed in comparisons:
        diffs = np.array([abs(closed(p) - wind_norm_direct(nav, p)) for p in pts])
        k = int(np.argmax(diffs))
        ok = diffs[k] < cfg.tol(name)
        rep.check(f"{name}_closed_vs_direct", ok, diffs[k], cfg.tol(name), None if ok or name != "vr" else "finding")
        if not ok:
            rep.finding(
                f"{name}_closed_form_mismatch",
                worst_point=pts[k],
                closed=closed(pts[k]),
                direct=wind_norm_direct(nav, pts[k]),
                mismatched_points=int(np.sum(diffs >= cfg.tol(name))),
                of=len(pts),
            )
    probe = np.array([1.0, 0.0, 0.0, 0.0])
    rep.finding(
        "vr_probe",
        point=probe,
        closed=wind_norm_closed_Vr(cfg.a, cfg.r, probe),
        direct=wind_norm_direct(NavigationData(g, V_r(cfg.r)), probe),
        hopf_direct=wind_norm_direct(NavigationData(g, hopf_dual_field(cfg.r)), probe),
    )
    return rep


def cmd_scan_flag_curvature(cfg: RunConfig) -> Report:
    rep = Report(cfg)
    nav = _navigation(cfg)
    F = randers_from_navigation(nav)
    try:
        flags = sample_flags(nav, make_rng(cfg.seed), cfg.samples)
    except EmptyDomain as exc:
        rep.finding("empty-domain", detail=str(exc))
        return rep
    values = scan_values(F, flags)
    good = [v for v in values if v is not None]
    if not good:
        rep.check("valid_flags", False, 0, 1)
        return rep
    lo, hi = min(good), max(good)
    if cfg.flat:
        worst = max(abs(v) for v in good)
        rep.check("flat_flag_curvature", worst < cfg.tol("flat"), worst, cfg.tol("flat"))
    else:
        rep.check("flag_curvature_spread", hi - lo > cfg.tol("spread"), hi - lo, cfg.tol("spread"))
    rep.finding("summary", min=lo, max=hi, spread=hi - lo, flags=len(values), degenerate=len(values) - len(good))
    if cfg.csv:
        write_scan_csv(Path(cfg.csv), flags, values, (lo, hi, hi - lo))
    return rep


def write_scan_csv(path: Path, flags, values, summary=None) -> None:
    """One row per flag; an optional trailing row ``summary,min,max,spread``."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"x{i}" for i in range(1, 5)] + [f"y{i}" for i in range(1, 5)] + [f"u{i}" for i in range(1, 5)] + ["K"])
    for fl, k in zip(flags, values):
        row = [f"{v:.17g}" for v in (*fl.x, *fl.y, *fl.u)]
        w.writerow(row + ["" if k is None else f"{k:.17g}"])
    if summary is not None:
        w.writerow(["summary"] + [f"{v:.17g}" for v in summary] + [""] * 9)
    path.write_text(buf.getvalue(), encoding="utf-8", newline="")


COMMANDS = {
    "verify-ricci-flat": cmd_verify_ricci_flat,
    "classify-killing": cmd_classify_killing,
    "verify-einstein": cmd_verify_einstein,
    "crosscheck-norms": cmd_crosscheck_norms,
    "scan-flag-curvature": cmd_scan_flag_curvature,
}


# -- argument handling --------------------------------------------------------


def _tolerance(text: str) -> tuple[str, float]:
    name, sep, value = text.partition("=")
    if not sep or not name:
        raise argparse.ArgumentTypeError(f"expected NAME=VALUE, got {text!r}")
    try:
        return name, float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"tolerance {name!r} is not a number: {value!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--a", type=float, default=1.0, help="Taub-NUT parameter (> 0)")
    for p, d in (("m", 0.5), ("n", 0.5), ("r", 1.0), ("s", 0.25)):
        common.add_argument(f"--{p}", type=float, default=d)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--samples", type=int, default=None)
    common.add_argument("--tol", type=_tolerance, action="append", default=[], metavar="NAME=R")
    common.add_argument("--out", default=None, help="write the JSON report here instead of stdout")
    common.add_argument("--csv", default=None, help="CSV side file (scan-flag-curvature)")
    common.add_argument("--field", choices=("vr", "us", "wmn"), default="vr")
    common.add_argument("--flags", type=int, default=100, help="flags in the constancy scan")
    common.add_argument("--flat", action="store_true", help="diagnostic mode on the flat metric")

    parser = argparse.ArgumentParser(prog="finslab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"finslab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(
        command=ns.command,
        a=ns.a,
        m=ns.m,
        n=ns.n,
        r=ns.r,
        s=ns.s,
        seed=ns.seed,
        samples=DEFAULT_SAMPLES[ns.command] if ns.samples is None else ns.samples,
        flags=ns.flags,
        field=ns.field,
        flat=ns.flat,
        tolerances=dict(ns.tol),
        out=ns.out,
        csv=ns.csv,
    )
    if cfg.command == "classify-killing" and cfg.samples < 10:
        raise ConfigError(f"classify-killing needs >= 10 sample points, got {cfg.samples}")
    cfg.validate()
    return cfg


def run(cfg: RunConfig) -> tuple[Report, int]:
    rep = COMMANDS[cfg.command](cfg)
    return rep, EXIT_FAIL if rep.failed else EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        cfg = config_from_args(ns)
        rep, code = run(cfg)
    except ConfigError as exc:
        print(f"finslab: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    text = rep.dumps()
    if cfg.out:
        Path(cfg.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
