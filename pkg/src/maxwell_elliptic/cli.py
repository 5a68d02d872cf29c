"""Command line front end: ``solve``, ``convergence`` and ``symbol-check``."""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

from . import symbol_check as sc
from .config import ConfigError, RunConfig, load_config
from .geometry import GeometryError
from .runner import CSV_COLUMNS, convergence_table, run_single
from .vtk_io import write_structured_points

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_NOT_ELLIPTIC = 0, 1, 2, 3

log = logging.getLogger("maxwell_elliptic")


def _overrides(pairs):
    out = {}
    for item in pairs or []:
        if "=" not in item:
            raise ConfigError(f"--set expects section.key=value, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def _load(args) -> RunConfig:
    overrides = _overrides(args.set)
    if getattr(args, "n_cells", None):
        overrides["geometry.n_cells"] = ",".join(str(n) for n in args.n_cells)
    if getattr(args, "output", None):
        overrides["output.directory"] = args.output
    if args.config is None:
        from .config import parse_config
        return parse_config("", overrides)
    return load_config(args.config, overrides)


def _json_default(o):
    if isinstance(o, complex):
        return [o.real, o.imag]
    if hasattr(o, "item"):
        return o.item()
    raise TypeError(type(o))


def _write_report(path: Path, payload: dict):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True, default=_json_default) + "\n")


def run_solve(cfg: RunConfig, require_refinement: bool = False) -> int:
    outdir = Path(cfg.output.directory)
    outdir.mkdir(parents=True, exist_ok=True)
    ncs = list(cfg.geometry.n_cells)
    if require_refinement and len(ncs) < 2:
        raise ConfigError("convergence needs at least two n_cells values")
    results = []
    for n in ncs:
        res = run_single(cfg, n)
        results.append(res)
        log.info("n_cells=%d error=%.3e iterations=%d", n, res.field_error,
                 res.report["solve"]["iterations"])
        if cfg.output.vtk:
            write_structured_points(outdir / f"fields_n{n}.vtk", res.grid, res.state,
                                    title=f"{res.report['case']} n_cells={n}")
    payload = {"config": cfg.as_dict(), "runs": [r.report for r in results]}
    ok = all(r.solver_ok for r in results)
    payload["verdict"] = {
        "solver_converged": ok,
        "data_compatible": all(r.report["verdicts"]["data_compatible"] for r in results),
        "medium_admissible": all(r.report["verdicts"]["medium_admissible"] for r in results),
    }
    if len(results) > 1:
        rows = convergence_table(results)
        payload["convergence"] = rows
        with open(outdir / cfg.output.csv, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
            w.writeheader()
            for row in rows:
                w.writerow({k: (f"{v:.12e}" if isinstance(v, float) else v) for k, v in row.items()})
    _write_report(outdir / cfg.output.report, payload)
    return EXIT_OK if ok else EXIT_SOLVER


def run_symbol_check(samples: int, seed: int, surface: str, resolution: int,
                     outdir: Path, isotropic: bool = False) -> int:
    if samples < 1:
        raise ConfigError("--samples must be at least 1")
    if resolution < 1:
        raise ConfigError("--sigma-resolution must be at least 1")
    surfaces = {"interface": (sc.INTERFACE,), "boundary": (sc.BOUNDARY,),
                "both": (sc.INTERFACE, sc.BOUNDARY)}[surface]
    media = [sc.isotropic_media()] * samples if isotropic else None
    rep = sc.media_sweep(samples, seed, n_sigma=resolution, surfaces=surfaces, media=media)
    outdir.mkdir(parents=True, exist_ok=True)
    rep.write_csv(outdir / "symbol_check.csv")
    summary = {
        "samples": samples, "seed": seed, "surface": surface, "sigma_resolution": resolution,
        "isotropic": isotropic, "min_singular_value": rep.min_singular_value,
        "stable_dims_ok": rep.dims_ok, "threshold": sc.KERNEL_THRESHOLD,
        "verdict": rep.verdict(),
    }
    _write_report(outdir / "symbol_check.json", summary)
    print(f"verdict: {rep.verdict()} (min singular value {rep.min_singular_value:.6e})")
    return EXIT_OK if rep.elliptic else EXIT_NOT_ELLIPTIC


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="maxwell-elliptic", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("solve", "convergence"):
        q = sub.add_parser(name)
        q.add_argument("config", nargs="?", help="INI config file (defaults used if omitted)")
        q.add_argument("--n-cells", type=int, nargs="+")
        q.add_argument("--output", help="output directory")
        q.add_argument("--set", action="append", metavar="SECTION.KEY=VALUE")
    q = sub.add_parser("symbol-check")
    q.add_argument("--samples", type=int, default=100)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--surface", choices=("interface", "boundary", "both"), default="both")
    q.add_argument("--sigma-resolution", type=int, default=64)
    q.add_argument("--isotropic", action="store_true", help="use eps = mu = 1 for every sample")
    q.add_argument("--output", default="out")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "symbol-check":
            return run_symbol_check(args.samples, args.seed, args.surface,
                                    args.sigma_resolution, Path(args.output), args.isotropic)
        cfg = _load(args)
        return run_solve(cfg, require_refinement=args.command == "convergence")
    except (ConfigError, GeometryError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
