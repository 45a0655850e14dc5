"""Command-line driver: cumulant tables, boundary sweeps, simulations.

Every command writes a table, either CSV with a leading ``#`` JSON meta
line or a JSON document.  Options can come from a ``key=value`` config
file (``--config``); explicit flags win over the file.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .core import (
    BoundaryKind,
    BoundaryTarget,
    ExponentPair,
    LinearCombo,
    classify_boundary,
    cross_covariance,
    mu3,
    normalization_A,
    require_interior,
)
from .cumulants import kappa_m
from .errors import BudgetError, ConvergenceWarning, NormalizationWarning, RosenblattError
from .limit_laws import (
    LawKind,
    LimitLaw,
    dw_bound_edge,
    m_statistic,
    rate_corner,
    rate_diag,
    sample_limit,
)
from .paths import _json_default
from .simulator import LatticeConfig, simulate_paths
from .studies import SweepSpec, no_l2_table, run_sweep

EXIT_DOMAIN = 2
EXIT_BUDGET = 3

DEFAULTS = {
    "gamma1": -0.7,
    "gamma2": -0.65,
    "alpha1": -0.6,
    "alpha2": -0.6,
    "rho": 0.5,
    "offsets": None,
    "m": [2, 3, 4],
    "combo": "1:1",
    "budget": None,
    "n_grid": 256,
    "trunc": None,
    "paths": 10_000,
    "horizon": 1.0,
    "record": None,
    "jobs": 1,
    "out": None,
    "format": "csv",
    "strict": False,
    "kind": "edge",
    "r": [1 / 9, 1 / 4, 1 / 2, 1.0],
    "h": 1e-3,
    "law": "product-fbm",
    "stats": ["k3", "k4"],
    "max_paths": None,
}

SWEEP_OFFSETS = {
    "sweep-diag": [0.08, 0.04, 0.02, 0.01],
    "sweep-edge": [0.02, 0.01, 0.005],
    "sweep-corner1": [0.02, 0.01, 0.005],
    "sweep-corner2": [0.02, 0.01, 0.005],
}


def _floats(text: str) -> list[float]:
    out = []
    for part in text.split(","):
        part = part.strip()
        if "/" in part:
            num, den = part.split("/")
            out.append(float(num) / float(den))
        elif part:
            out.append(float(part))
    return out


def _ints(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _strs(text: str) -> list[str]:
    return [x.strip() for x in text.split(",") if x.strip()]


def _bool(text: str) -> bool:
    return text.strip().lower() in ("1", "true", "yes", "on")


def _default_seed() -> int:
    return int(os.environ.get("ROSENBLATT_LAB_SEED", "0"))


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="key=value file; flags override it")
    p.add_argument("--gamma1", type=float)
    p.add_argument("--gamma2", type=float)
    p.add_argument("--seed", type=int, help="default: $ROSENBLATT_LAB_SEED or 0")
    p.add_argument("--jobs", type=int)
    p.add_argument("--out", type=Path, help="output file (default stdout)")
    p.add_argument("--format", choices=["csv", "json"])
    p.add_argument("--strict", action="store_const", const=True, help="treat accuracy warnings as failures")
    p.add_argument("--budget", type=int, help="quadrature budget per cumulant")


def _lattice_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n-grid", dest="n_grid", type=int)
    p.add_argument("--trunc", type=int)
    p.add_argument("--paths", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rosenblatt-lab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cumulants", help="kappa_m of a linear combination of Z(t)")
    _common(p)
    p.add_argument("--m", type=_ints, help="orders, e.g. 2,3,4")
    p.add_argument("--combo", help="c:t pairs, e.g. 1:1,-0.5:0.5")

    p = sub.add_parser("moments", help="normalizer, closed-form mu3 and boundary info")
    _common(p)

    p = sub.add_parser("cross-cov", help="E[Z_a(1) Z_g(1)] for two exponent pairs")
    _common(p)
    p.add_argument("--alpha1", type=float)
    p.add_argument("--alpha2", type=float)

    for name in SWEEP_OFFSETS:
        p = sub.add_parser(name, help=f"boundary sweep ({name.split('-')[1]})")
        _common(p)
        _lattice_flags(p)
        p.add_argument("--rho", type=float)
        p.add_argument("--offsets", type=_floats, help="strictly decreasing offsets")
        p.add_argument("--stats", type=_strs, help="subset of k3,k4,k6,cf,w1")

    p = sub.add_parser("no-l2", help="cross-covariance limits 2 sqrt(r)/(1+r)")
    _common(p)
    p.add_argument("--kind", choices=["edge", "corner"])
    p.add_argument("--r", type=_floats, help="ratios in (0, 1]")
    p.add_argument("--h", type=float)

    p = sub.add_parser("simulate", help="lattice paths of the normalized process")
    _common(p)
    _lattice_flags(p)
    p.add_argument("--horizon", type=float)
    p.add_argument("--record", type=int, help="stored grid points per unit time")
    p.add_argument("--max-paths", dest="max_paths", type=int, help="paths written to the table")

    p = sub.add_parser("sample-limit", help="paths of a boundary limit law")
    _common(p)
    _lattice_flags(p)
    p.add_argument("--law", choices=["brownian", "product-fbm", "corner-x", "corner-y"], help="product-fbm uses --gamma2 as its edge exponent")
    p.add_argument("--rho", type=float)
    p.add_argument("--horizon", type=float)
    p.add_argument("--max-paths", dest="max_paths", type=int)

    p = sub.add_parser("rates", help="rate predictions and cumulant-based bounds at a point")
    _common(p)
    return parser


def _read_config(path: Path) -> dict[str, str]:
    out = {}
    for line in path.read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise RosenblattError(f"config line without '=': {line!r}")
        key, value = line.split("=", 1)
        out[key.strip().replace("-", "_")] = value.strip()
    return out


def _converter(parser: argparse.ArgumentParser, command: str, key: str):
    sub = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    for action in sub.choices[command]._actions:
        if action.dest == key:
            if action.const is True:
                return _bool
            return action.type or str
    return None


def resolve(parser: argparse.ArgumentParser, args: argparse.Namespace) -> argparse.Namespace:
    """Fill unset options from the config file, then from the defaults."""
    values = vars(args)
    if args.config is not None:
        for key, raw in _read_config(args.config).items():
            conv = _converter(parser, args.command, key)
            if conv is None:
                raise RosenblattError(f"unknown config key {key!r} for {args.command}")
            if values.get(key) is None:
                values[key] = conv(raw)
    if args.command in SWEEP_OFFSETS:
        # sweeps are analytic unless paths are requested
        if values.get("paths") is None:
            values["paths"] = 0
        if values.get("offsets") is None:
            values["offsets"] = SWEEP_OFFSETS[args.command]
    for key, default in DEFAULTS.items():
        if key in values and values[key] is None:
            values[key] = default
    if values.get("seed") is None:
        values["seed"] = _default_seed()
    return argparse.Namespace(**values)


def _pair(args) -> ExponentPair:
    return ExponentPair(args.gamma1, args.gamma2)


def _lattice(args, n_paths=None) -> LatticeConfig:
    return LatticeConfig(
        n_grid=args.n_grid,
        trunc=args.trunc,
        n_paths=args.paths if n_paths is None else n_paths,
        seed=args.seed,
        jobs=args.jobs,
        record_per_unit=getattr(args, "record", None),
    )


def _meta(args, **extra) -> dict:
    skip = {"config", "jobs", "out", "format", "strict"}
    meta = {k: v for k, v in sorted(vars(args).items()) if k not in skip}
    meta["version"] = __version__
    meta["numpy"] = np.__version__
    meta.update(extra)
    return meta


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (float, np.floating)):
        return repr(float(v) + 0.0)
    return str(v)


def format_table(rows: list[dict], meta: dict, fmt: str) -> str:
    if fmt == "json":
        doc = {"meta": meta, "rows": rows}
        return json.dumps(doc, indent=2, sort_keys=True, default=_json_default) + "\n"
    columns = []
    for row in rows:
        for key in row:
            if key not in columns:
                columns.append(key)
    lines = ["# " + json.dumps(meta, sort_keys=True, default=_json_default), ",".join(columns)]
    for row in rows:
        lines.append(",".join(_cell(row.get(c)) for c in columns))
    return "\n".join(lines) + "\n"


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


def cmd_cumulants(args):
    p = _pair(args)
    combo = LinearCombo.parse(args.combo)
    rows = []
    for m in args.m:
        res = kappa_m(p, combo, m, args.budget, args.seed, jobs=args.jobs)
        rows.append(
            {
                "m": m,
                "kappa": res.value,
                "std_error": res.std_error,
                "method": res.method,
                "n": res.n_samples,
                "converged": res.converged,
            }
        )
    return rows, _meta(args)


def cmd_moments(args):
    p = _pair(args)
    require_interior(p)
    info = classify_boundary(p)
    row = {
        "gamma1": p.gamma1,
        "gamma2": p.gamma2,
        "hurst": p.hurst(),
        "A": normalization_A(p),
        "variance": 1.0,
        "mu3": mu3(p),
        "boundary": info.target.kind.value,
        "boundary_gamma": info.target.gamma,
        "boundary_rho": info.target.rho,
        "boundary_distance": info.distance,
    }
    return [row], _meta(args)


def cmd_cross_cov(args):
    a = ExponentPair(args.alpha1, args.alpha2)
    g = _pair(args)
    row = {"alpha1": a.gamma1, "alpha2": a.gamma2, "gamma1": g.gamma1, "gamma2": g.gamma2}
    row["cross_cov"] = cross_covariance(a, g)
    return [row], _meta(args)


def _sweep_target(args) -> BoundaryTarget:
    cmd = args.command
    if cmd == "sweep-diag":
        return BoundaryTarget(BoundaryKind.DIAGONAL_D)
    if cmd == "sweep-edge":
        return BoundaryTarget(BoundaryKind.EDGE_E1, gamma=args.gamma2)
    if cmd == "sweep-corner1":
        return BoundaryTarget(BoundaryKind.CORNER_HALF_ONE, rho=args.rho)
    return BoundaryTarget(BoundaryKind.CORNER_HALF_HALF, rho=args.rho)


def cmd_sweep(args):
    lattice = _lattice(args) if args.paths > 0 else None
    spec = SweepSpec(
        _sweep_target(args), args.offsets, args.stats, args.budget, args.seed, args.jobs, lattice
    )
    return run_sweep(spec), _meta(args)


def cmd_no_l2(args):
    return no_l2_table(args.kind, args.r, args.h, args.gamma2), _meta(args)


def _paths_rows(ens, max_paths):
    k = ens.n_paths if max_paths is None else min(max_paths, ens.n_paths)
    rows = []
    for j, t in enumerate(ens.grid):
        row = {"t": float(t)}
        row.update({f"path_{i}": float(ens.paths[i, j]) for i in range(k)})
        rows.append(row)
    return rows


def cmd_simulate(args):
    ens = simulate_paths(_pair(args), args.horizon, _lattice(args))
    var1 = float(np.var(ens.at(min(1.0, args.horizon)), ddof=1)) if ens.n_paths > 1 else math.nan
    return _paths_rows(ens, args.max_paths), _meta(args, simulation=ens.meta, variance_at_1=var1)


_LAWS = {
    "brownian": LawKind.BROWNIAN_MOTION,
    "product-fbm": LawKind.PRODUCT_FBM,
    "corner-x": LawKind.CORNER_X,
    "corner-y": LawKind.CORNER_Y,
}


def cmd_sample_limit(args):
    kind = _LAWS[args.law]
    law = LimitLaw(
        kind,
        gamma=args.gamma2 if kind is LawKind.PRODUCT_FBM else None,
        rho=args.rho if kind in (LawKind.CORNER_X, LawKind.CORNER_Y) else None,
    )
    steps = int(round(args.horizon * args.n_grid))
    grid = np.arange(steps + 1) / args.n_grid
    ens = sample_limit(law, grid, args.paths, args.seed)
    return _paths_rows(ens, args.max_paths), _meta(args, sampler=ens.meta)


def cmd_rates(args):
    p = _pair(args)
    combo = LinearCombo.unit()
    kap = {m: kappa_m(p, combo, m, args.budget, args.seed, jobs=args.jobs).value for m in (3, 4, 6)}
    try:
        corner = rate_corner(p)
    except RosenblattError:
        corner = math.nan
    row = {
        "gamma1": p.gamma1,
        "gamma2": p.gamma2,
        "rate_diag": rate_diag(p),
        "rate_corner": corner,
        "k3": kap[3],
        "k4": kap[4],
        "k6": kap[6],
        "m_statistic": m_statistic(kap[3], kap[4]),
        "dw_bound_edge": dw_bound_edge(kap[3], kap[4], kap[6]),
    }
    return [row], _meta(args)


COMMANDS = {
    "cumulants": cmd_cumulants,
    "moments": cmd_moments,
    "cross-cov": cmd_cross_cov,
    "no-l2": cmd_no_l2,
    "simulate": cmd_simulate,
    "sample-limit": cmd_sample_limit,
    "rates": cmd_rates,
    **{name: cmd_sweep for name in SWEEP_OFFSETS},
}


def main(argv=None) -> int:
    parser = build_parser()
    raw = parser.parse_args(argv)
    try:
        args = resolve(parser, raw)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", ConvergenceWarning)
            warnings.simplefilter("always", NormalizationWarning)
            rows, meta = COMMANDS[args.command](args)
    except BudgetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (RosenblattError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    relevant = [w for w in caught if issubclass(w.category, (ConvergenceWarning, NormalizationWarning))]
    for w in relevant:
        print(f"warning: {w.message}", file=sys.stderr)
    for w in caught:
        if w not in relevant:
            warnings.showwarning(w.message, w.category, w.filename, w.lineno)
    _emit(format_table(rows, meta, args.format), args.out)
    if args.strict and relevant:
        return EXIT_BUDGET
    return 0


if __name__ == "__main__":
    sys.exit(main())
