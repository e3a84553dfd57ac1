"""Command-line interface: ``qse-xxz {scan,mesh,plot,oracle}``.

Exit codes: 0 success, 1 usage error, 2 at least one record failed to
compute, 3 file I/O failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import tolerances as tol

EXIT_OK, EXIT_USAGE, EXIT_COMPUTE, EXIT_IO = 0, 1, 2, 3

log = logging.getLogger("qse_xxz")

_DEFAULTS = {
    "delta_min": -1.5,
    "delta_max": 3.0,
    "step": 0.01,
    "out_dir": ".",
    "oracle_n": None,
    "tolerance": tol.SHAPE_TOL,
    "seed": 0,
    "outputs": "csv,svg-semiaxes,svg-volume",
    "deltas": None,
    "workers": 1,
    "sizes": "8,10,12",
    "method": "richardson",
    "resolution": "64x32",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in str(text).replace(" ", "").split(",") if v]
    except ValueError as exc:
        raise UsageError(f"cannot parse number list {text!r}") from exc


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in str(text).replace(" ", "").split(",") if v]
    except ValueError as exc:
        raise UsageError(f"cannot parse integer list {text!r}") from exc


def _resolution(text: str) -> tuple[int, int]:
    try:
        lon, lat = (int(v) for v in str(text).lower().split("x"))
    except ValueError as exc:
        raise UsageError(f"resolution must look like 64x32, got {text!r}") from exc
    return lon, lat


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qse-xxz", description="Steering-ellipsoid analysis of the XXZ ground state.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--config", help="JSON file of option values; command-line flags take precedence")
        sp.add_argument("--out-dir", default=None)
        sp.add_argument("--seed", type=int, default=None)

    def grid(sp):
        sp.add_argument("--delta-min", type=float, default=None)
        sp.add_argument("--delta-max", type=float, default=None)
        sp.add_argument("--step", type=float, default=None)
        sp.add_argument("--tolerance", type=float, default=None, help="relative shape tolerance")

    s = sub.add_parser("scan", help="sweep Delta and write CSV/JSON/SVG/mesh outputs")
    common(s)
    grid(s)
    s.add_argument("--outputs", default=None, help="comma list from csv,json,svg-semiaxes,svg-volume,mesh")
    s.add_argument("--oracle-n", type=int, default=None, help="append ED columns for this ring size")
    s.add_argument("--deltas", default=None, help="comma list of mesh snapshots")
    s.add_argument("--workers", type=int, default=None)

    m = sub.add_parser("mesh", help="export OBJ meshes of the ellipsoid at given Delta values")
    common(m)
    m.add_argument("--deltas", default=None, required=False)
    m.add_argument("--resolution", default=None, help="LONxLAT, default 64x32")

    pl = sub.add_parser("plot", help="render SVG plots from a scan CSV")
    common(pl)
    pl.add_argument("input", help="CSV written by 'scan'")
    pl.add_argument("--outputs", default=None)

    o = sub.add_parser("oracle", help="compare exact diagonalization with the Bethe-ansatz pipeline")
    common(o)
    o.add_argument("--deltas", default=None)
    o.add_argument("--sizes", default=None)
    o.add_argument("--oracle-n", type=int, default=None, help="single ring size (overrides --sizes)")
    o.add_argument("--method", choices=("richardson", "fit"), default=None)
    return p


def _merge(args: argparse.Namespace) -> dict:
    opts = dict(_DEFAULTS)
    if getattr(args, "config", None):
        try:
            with open(args.config, encoding="utf-8") as fh:
                cfg = json.load(fh)
        except OSError as exc:
            raise OSError(f"cannot read config {args.config}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise UsageError(f"config {args.config} is not valid JSON: {exc}") from exc
        if not isinstance(cfg, dict):
            raise UsageError("config file must hold a JSON object")
        for key, value in cfg.items():
            key = key.replace("-", "_")
            if key == "shape_tolerance":
                key = "tolerance"
            if key not in opts:
                raise UsageError(f"unknown config key {key!r}")
            if isinstance(value, list):
                value = ",".join(str(v) for v in value)
            opts[key] = value
    for key, value in vars(args).items():
        if value is not None and key in opts:
            opts[key] = value
    return opts


def _cmd_scan(o: dict) -> int:
    from .mesh import export_mesh
    from .scan import ScanConfig, records_to_csv, records_to_jsonl, run_scan, write_text
    from .svgplot import render_plots

    outputs = frozenset(v for v in str(o["outputs"]).replace(" ", "").split(",") if v)
    try:
        cfg = ScanConfig(
            delta_min=float(o["delta_min"]),
            delta_max=float(o["delta_max"]),
            step=float(o["step"]),
            outputs=outputs,
            oracle_n=int(o["oracle_n"]) if o["oracle_n"] else None,
            shape_tolerance=float(o["tolerance"]),
            seed=int(o["seed"]),
            mesh_deltas=tuple(_float_list(o["deltas"])) if o["deltas"] else (),
            out_dir=str(o["out_dir"]),
            workers=int(o["workers"]),
        )
        if cfg.oracle_n:
            from .ed_oracle import SpinChainSpec

            SpinChainSpec(cfg.oracle_n, 0.0)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from exc

    records = run_scan(cfg)
    out = Path(cfg.out_dir)
    with_oracle = cfg.oracle_n is not None
    if "csv" in outputs:
        write_text(out / "scan.csv", records_to_csv(records, with_oracle))
    if "json" in outputs:
        write_text(out / "scan.jsonl", records_to_jsonl(records, with_oracle))
    good = [r for r in records if not r.failed]
    kinds = outputs & {"svg-semiaxes", "svg-volume"}
    if kinds:
        if len(good) < 2:
            raise UsageError("plots need at least two successfully computed records")
        render_plots(good, out, sorted(kinds))
    if "mesh" in outputs:
        export_mesh(cfg.mesh_deltas, out)
    failed = [r for r in records if r.failed]
    for r in failed:
        log.error("Delta=%r: %s", r.delta, r.critical_point_note)
    log.info("%d records, %d failed", len(records), len(failed))
    return EXIT_COMPUTE if failed else EXIT_OK


def _cmd_mesh(o: dict) -> int:
    from .mesh import export_mesh

    if not o["deltas"]:
        raise UsageError("mesh needs --deltas")
    deltas = _float_list(o["deltas"])
    try:
        paths = export_mesh(deltas, o["out_dir"], _resolution(o["resolution"]))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    for p in paths:
        print(p)
    return EXIT_OK


def _cmd_plot(o: dict, input_path: str) -> int:
    from .scan import read_csv
    from .svgplot import render_plots

    records = [r for r in read_csv(input_path) if not r.failed]
    outputs = {v for v in str(o["outputs"]).split(",") if v.startswith("svg-")} or {"svg-semiaxes", "svg-volume"}
    try:
        paths = render_plots(records, o["out_dir"], sorted(outputs))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    for p in paths:
        print(p)
    return EXIT_OK


def _cmd_oracle(o: dict) -> int:
    from .ed_oracle import SpinChainSpec, oracle_sequence
    from .scan import write_text
    from .xxz_model import correlators, ground_energy

    deltas = _float_list(o["deltas"]) if o["deltas"] else [0.0, 0.5, 1.0, 2.0]
    sizes = [int(o["oracle_n"])] if o["oracle_n"] else _int_list(o["sizes"])
    try:
        for n in sizes:
            SpinChainSpec(n, 0.0)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    header = ["delta", "quantity", "pipeline"] + [f"ed_n{n}" for n in sizes] + ["ed_extrapolated", "abs_diff"]
    lines = [",".join(header)]
    for d in deltas:
        seq = oracle_sequence(d, sizes, o["method"]) if len(sizes) > 1 else None
        if seq is None:
            from .ed_oracle import correlators as ed_corr
            from .ed_oracle import ground_state

            sol = ground_state(SpinChainSpec(sizes[0], d))
            c = ed_corr(sol)
            rows = [{"e": sol.energy_per_site, "xx": c.xx, "zz": c.zz}]
        else:
            rows = seq["rows"]
        pc = correlators(d)
        pipe = {"e": ground_energy(d), "xx": pc.xx, "zz": pc.zz}
        for q in ("e", "xx", "zz"):
            ext = seq[f"{q}_inf"] if seq else rows[0][q]
            vals = [repr(d), q, repr(pipe[q])] + [repr(r[q]) for r in rows] + [repr(ext), repr(abs(ext - pipe[q]))]
            lines.append(",".join(vals))
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    write_text(Path(o["out_dir"]) / "oracle.csv", text)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        opts = _merge(args)
        if args.command == "scan":
            return _cmd_scan(opts)
        if args.command == "mesh":
            return _cmd_mesh(opts)
        if args.command == "plot":
            return _cmd_plot(opts, args.input)
        return _cmd_oracle(opts)
    except UsageError as exc:
        print(f"qse-xxz: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"qse-xxz: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
