"""
Command-line interface: ``compute``, ``verify``, ``render`` and ``list``.

Exit codes: 0 success, 1 a verification mismatch, 2 bad input (unknown
companion, malformed companion file, invalid parameters), 3 an engine
error, 4 a filesystem error while writing output.
"""

from __future__ import annotations

import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import click

from . import closed_forms as cf
from .alpha_curve import CurveError
from .beta_curve import BetaCurveError
from .cfk_core import (
    BUILTIN_COMPANIONS,
    ComplexError,
    CompanionSpec,
    InvariantReport,
    invariant_report,
    load_companion,
)
from .pairing_engine import PairingError, render_svg, satellite_complex, satellite_diagram
from .torus_geometry import GeometryError

REPORT_SCHEMA = 1
ALL_CHECKS = ("genus", "tau", "epsilon", "fibered", "thin", "toprank", "ordv")
ENGINE_ERRORS = (PairingError, GeometryError, CurveError, BetaCurveError, ComplexError)

# (tau, epsilon, genus, rank of HFK-hat) expected for each built-in companion
EXPECTED_COMPANIONS: Dict[str, Tuple[int, int, int, int]] = {
    "unknot": (0, 0, 0, 1),
    "T23": (1, 1, 1, 3),
    "mT23": (-1, -1, 1, 3),
    "fig8": (0, 0, 1, 5),
    "T25": (2, 1, 2, 5),
}


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _companion(name: str) -> CompanionSpec:
    try:
        return load_companion(name)
    except OSError as e:
        _fail(2, f"cannot read companion {name!r}: {e.strerror or e}")
    except ComplexError as e:
        _fail(2, f"invalid companion {name!r}: {e}")


def _check_params(i: int, j: int):
    if i < 0:
        _fail(2, "--i must be nonnegative")
    if j < 1:
        _fail(2, "--j must be at least 1")


def _range(text: str) -> List[int]:
    """Parse ``"a..b"``, ``"a,b,c"`` or a single integer."""
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            values = list(range(int(lo), int(hi) + 1))
        else:
            values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise click.BadParameter(f"not an integer range: {text!r}")
    if not values:
        raise click.BadParameter(f"empty range: {text!r}")
    return values


def report_document(spec: CompanionSpec, i: int, j: int, n: int, r: InvariantReport, ms: int) -> dict:
    return {
        "schema": REPORT_SCHEMA,
        "companion": spec.name,
        "i": i,
        "j": j,
        "n": n,
        "genus": r.genus,
        "tau": r.tau,
        "epsilon": r.epsilon,
        "fibered": r.fibered,
        "thin": r.thin,
        "ord_v_lower": r.ord_v_lower,
        "ranks": [{"A": e.alexander, "delta": e.delta, "rank": e.rank} for e in r.rank_table],
        "timing_ms": ms,
    }


def _text_report(doc: dict) -> str:
    lines = [f"Q^{{{doc['i']},{doc['j']}}}_{doc['n']}({doc['companion']})"]
    for key in ("genus", "tau", "epsilon", "fibered", "thin", "ord_v_lower"):
        lines.append(f"  {key:<12}{doc[key]}")
    lines.append("  ranks (A, delta: rank)")
    for e in doc["ranks"]:
        delta = "?" if e["delta"] is None else e["delta"]
        lines.append(f"    {e['A']:>4} {delta!s:>4}: {e['rank']}")
    lines.append(f"  time        {doc['timing_ms']} ms")
    return "\n".join(lines)


@click.group()
def main():
    """Knot Floer invariants of generalized Mazur satellites Q^{i,j}_n(K)."""


@main.command()
@click.option("--companion", required=True, help="built-in name or companion file")
@click.option("--i", "i", type=int, default=0, show_default=True, help="clasp twists")
@click.option("--j", "j", type=int, default=1, show_default=True, help="winding number")
@click.option("--n", "n", type=int, default=0, show_default=True, help="meridional twists")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text", show_default=True)
def compute(companion: str, i: int, j: int, n: int, fmt: str):
    """Invariants of one satellite."""
    spec = _companion(companion)
    _check_params(i, j)
    start = time.perf_counter()
    try:
        c = satellite_complex(spec, i, j, n)
        r = invariant_report(c)
    except ENGINE_ERRORS as e:
        _fail(3, f"engine failure for ({spec.name}, {i}, {j}, {n}): {type(e).__name__}: {e}")
    ms = round((time.perf_counter() - start) * 1000)
    doc = report_document(spec, i, j, n, r, ms)
    click.echo(json.dumps(doc, indent=2) if fmt == "json" else _text_report(doc))


@dataclass(frozen=True)
class SweepConfig:
    companions: Tuple[str, ...]
    i_range: Tuple[int, ...]
    j_range: Tuple[int, ...]
    n_range: Tuple[int, ...]
    checks: Tuple[str, ...]
    parallelism: int = 1

    def __post_init__(self):
        if not (self.companions and self.i_range and self.j_range and self.n_range and self.checks):
            raise ValueError("every sweep range must be nonempty")
        if min(self.j_range) < 1 or min(self.i_range) < 0:
            raise ValueError("need i >= 0 and j >= 1")
        if self.parallelism < 1:
            raise ValueError("parallelism must be positive")


def compare_case(spec: CompanionSpec, i: int, j: int, n: int, checks: Sequence[str]) -> List[Tuple[str, object, object]]:
    """Failed checks of one case as ``(check, engine value, expected)``."""
    meta = cf.CompanionMeta.from_spec(spec)
    r = invariant_report(satellite_complex(spec, i, j, n))
    failures = []

    def expect(name: str, got, want, ok=None):
        if not (got == want if ok is None else ok):
            failures.append((name, got, want))

    for check in checks:
        if check == "genus":
            expect(check, r.genus, cf.genus_formula(meta, i, j, n))
        elif check == "tau":
            expect(check, r.tau, cf.tau_formula(meta, i, j, n))
        elif check == "epsilon":
            expect(check, r.epsilon, cf.epsilon_formula(meta, i, j, n))
        elif check == "fibered" and meta.fibered and not meta.trivial:
            expect(check, r.fibered, cf.fibered_formula(meta, i, j, n))
        elif check == "thin":
            expect(check, r.thin, cf.thin_formula(meta, i, j, n))
        elif check == "toprank" and spec.name == "T23":
            expect(check, r.top_rank, cf.top_rank_formula(i, j, n))
        elif check == "ordv":
            bound = cf.ordv_lower_bound(meta, j, n)
            expect(check, r.ord_v_lower, f">= {bound}", r.ord_v_lower >= bound)
    return failures


def _run_case(args):
    name, i, j, n, checks = args
    spec = load_companion(name)
    try:
        return compare_case(spec, i, j, n, checks)
    except ENGINE_ERRORS as e:
        return [("engine", f"{type(e).__name__}: {e}", "no error")]


@main.command()
@click.option("--companion", "companions", multiple=True, help="repeatable; default: all built-ins")
@click.option("--i-range", default="0..2", show_default=True)
@click.option("--j-range", default="1..3", show_default=True)
@click.option("--n-range", default="-3..3", show_default=True)
@click.option("--checks", default=",".join(ALL_CHECKS), show_default=True, help="comma-separated subset")
@click.option("--parallelism", type=int, default=None, help="worker processes [env SATELLITE_HFK_PARALLELISM, else 1]")
def verify(companions, i_range, j_range, n_range, checks, parallelism):
    """Compare the engine against the closed-form predictions over a grid."""
    try:
        if parallelism is None:
            parallelism = int(os.environ.get("SATELLITE_HFK_PARALLELISM", "1"))
        chosen = tuple(c.strip() for c in checks.split(",") if c.strip())
        unknown = [c for c in chosen if c not in ALL_CHECKS]
        if unknown:
            raise ValueError(f"unknown checks {unknown}; choose from {ALL_CHECKS}")
        cfg = SweepConfig(
            tuple(companions) or BUILTIN_COMPANIONS,
            tuple(_range(i_range)),
            tuple(_range(j_range)),
            tuple(_range(n_range)),
            chosen,
            parallelism,
        )
    except (ValueError, click.BadParameter) as e:
        _fail(2, str(e))
    # load every companion before starting, so a bad file fails fast
    names = list(cfg.companions)
    for c in names:
        _companion(c)
    cases = [(c, i, j, n, cfg.checks) for c in names for i in cfg.i_range for j in cfg.j_range for n in cfg.n_range]
    if cfg.parallelism > 1:
        with ProcessPoolExecutor(cfg.parallelism) as pool:
            results = list(pool.map(_run_case, cases))
    else:
        results = [_run_case(case) for case in cases]
    failed = 0
    for (c, i, j, n, _), failures in zip(cases, results):
        for check, got, want in failures:
            click.echo(f"FAIL ({c}, {i}, {j}, {n}, {check}): engine {got}, expected {want}")
        failed += bool(failures)
    click.echo(f"{len(cases) - failed}/{len(cases)} cases passed")
    sys.exit(1 if failed else 0)


@main.command()
@click.option("--companion", required=True)
@click.option("--i", "i", type=int, default=0, show_default=True)
@click.option("--j", "j", type=int, default=1, show_default=True)
@click.option("--n", "n", type=int, default=0, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
def render(companion: str, i: int, j: int, n: int, out_path: str):
    """Write an SVG of the reduced pairing diagram."""
    spec = _companion(companion)
    _check_params(i, j)
    try:
        svg = render_svg(satellite_diagram(spec, i, j, n))
    except ENGINE_ERRORS as e:
        _fail(3, f"engine failure: {type(e).__name__}: {e}")
    try:
        with open(out_path, "w", encoding="utf-8", newline="\n") as f:
            f.write(svg)
    except OSError as e:
        _fail(4, f"cannot write {out_path}: {e.strerror or e}")
    click.echo(out_path)


def companion_rows() -> List[dict]:
    rows = []
    for name in BUILTIN_COMPANIONS:
        spec = load_companion(name)
        rows.append({"name": name, "tau": spec.tau, "epsilon": spec.epsilon, "genus": spec.genus, "hat_rank": spec.hat_rank})
    return rows


@main.command(name="list")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text", show_default=True)
@click.option("--verify", "check", is_flag=True, help="compare recomputed invariants with the expected table")
def list_companions(fmt: str, check: bool):
    """Built-in companion knots with (tau, epsilon, genus, rank)."""
    rows = companion_rows()
    if fmt == "json":
        click.echo(json.dumps(rows, indent=2))
    else:
        click.echo(f"{'name':<8}{'tau':>5}{'eps':>5}{'genus':>7}{'rank':>6}")
        for r in rows:
            click.echo(f"{r['name']:<8}{r['tau']:>5}{r['epsilon']:>5}{r['genus']:>7}{r['hat_rank']:>6}")
    if check:
        bad = [r for r in rows if (r["tau"], r["epsilon"], r["genus"], r["hat_rank"]) != EXPECTED_COMPANIONS[r["name"]]]
        for r in bad:
            click.echo(f"MISMATCH {r['name']}: expected {EXPECTED_COMPANIONS[r['name']]}", err=True)
        sys.exit(1 if bad else 0)


if __name__ == "__main__":
    main()
