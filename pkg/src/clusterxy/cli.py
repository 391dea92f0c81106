"""Command-line front end: spectrum dumps, gap scans, entanglement scans,
thermodynamic-limit densities, and oracle cross-checks, emitted as CSV or
JSON tables.

Every emitted row carries the fully resolved model (as compact JSON), sweep
endpoints are inclusive, floats are printed with 17 significant digits, and
identical requests produce byte-identical output.

Exit codes: 0 success, 2 validation error, 3 numerical failure,
4 oracle-check failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from . import model as mdl
from .freefermion import Sector, ground_and_gap, sector_states
from .entanglement import (
    EvenVacuumError,
    QuadratureError,
    maximize_block,
    maximize_site,
    maximize_site_af,
    scan_derivative,
    theta_function,
    thermo_block_density,
)
from .crosscheck import CHECK_PRESETS, run_checks

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3
EXIT_CHECK_FAILED = 4

ENT_KINDS = ("ent_site", "ent_block", "ent_af")
_ENT_FUNCS = {
    "ent_site": maximize_site,
    "ent_block": maximize_block,
    "ent_af": maximize_site_af,
}

#: preset name -> (parameter names consumed, description)
PRESETS: dict[str, tuple[tuple[str, ...], str]] = {
    "free": (("h",), "non-interacting spins in a transverse field"),
    "xy": (("r", "h"), "standard XY chain (anisotropy r, field h)"),
    "xzy": (("r", "h"), "XY chain with one mediating Z per interaction"),
    "xny": (("n", "m", "r", "h"), "XY chain with n (and m) mediating Z's"),
    "halfway-xy": (("r", "h"), "XY chain with interactions spanning half the ring"),
    "ghz-cluster": (("g",), "rotated GHZ-cluster chain"),
    "spt-afm": (("lambda", "halfway"), "cluster term competing with an AFM YY coupling"),
    "spt-afm-halfway": (("lambda",), "spt-afm with the halfway-span cluster term"),
}


@dataclass(frozen=True)
class ScanRequest:
    """A fully resolved CLI request (echoed into every output file)."""

    command: str
    model: dict
    sites: tuple[int, ...]
    sweep: tuple[str, float, float, float] | None
    quantities: tuple[str, ...] = ()
    levels: int = 2
    jobs: int = 1
    fmt: str = "csv"
    output: str | None = None
    extras: dict = field(default_factory=dict)

    def echo(self) -> dict:
        # jobs is an execution detail, not part of the request identity
        data = {
            "command": self.command,
            "model": self.model,
            "sites": list(self.sites),
            "format": self.fmt,
        }
        if self.sweep is not None:
            param, start, stop, step = self.sweep
            data["sweep"] = {"parameter": param, "start": start, "stop": stop, "step": step}
        if self.quantities:
            data["quantities"] = list(self.quantities)
        if self.command == "spectrum":
            data["levels"] = self.levels
        data.update(self.extras)
        return data


# --- model resolution ---------------------------------------------------------

def _build_preset(name: str, params: dict, sites: int) -> mdl.ModelSpec:
    if name == "free":
        return mdl.preset_free(params["h"], sites)
    if name == "xy":
        return mdl.preset_xny(0, params["r"], params["h"], sites)
    if name == "xzy":
        return mdl.preset_xny(1, params["r"], params["h"], sites)
    if name == "xny":
        n = params["n"]
        m = params["m"] if params.get("m") is not None else n
        if params.get("halfway"):
            n = m = sites // 2 - 1
        return mdl.preset_xnmy(int(n), int(m), params["r"], params["h"], sites)
    if name == "halfway-xy":
        return mdl.preset_halfway_xy(params["r"], params["h"], sites)
    if name == "ghz-cluster":
        return mdl.preset_ghz_cluster(params["g"], sites)
    if name == "spt-afm":
        return mdl.preset_spt_afm(params["lambda"], sites, halfway=bool(params.get("halfway")))
    if name == "spt-afm-halfway":
        return mdl.preset_spt_afm(params["lambda"], sites, halfway=True)
    raise ValueError(f"unknown preset {name!r}; see `clusterxy presets`")


class ModelSource:
    """Builds ModelSpecs for sweep points, either from a preset plus its
    parameters or from a model-definition file."""

    def __init__(self, args):
        self.preset = args.model
        self.path = args.model_file
        if (self.preset is None) == (self.path is None):
            raise ValueError("exactly one of --model or --model-file is required")
        self.params = {
            "r": args.r,
            "h": args.h,
            "g": args.g,
            "lambda": args.lambda_,
            "n": args.n,
            "m": args.m,
            "halfway": args.halfway,
        }
        if self.path is not None:
            self.base = mdl.load_model(self.path)
        else:
            if self.preset not in PRESETS:
                raise ValueError(f"unknown preset {self.preset!r}; see `clusterxy presets`")
            self.base = None

    def describe(self) -> dict:
        if self.path is not None:
            return {"file": str(self.path), "definition": mdl.model_to_dict(self.base)}
        used, _ = PRESETS[self.preset]
        return {
            "preset": self.preset,
            "parameters": {key: self.params[key] for key in used},
        }

    def default_sites(self) -> int | None:
        return self.base.sites if self.base is not None else None

    def sweepable(self) -> tuple[str, ...]:
        if self.path is not None:
            return ("h", "field")
        used, _ = PRESETS[self.preset]
        return tuple(p for p in used if p != "halfway") + (("field",) if "h" in used else ())

    def build(self, sites: int, override: tuple[str, float] | None = None) -> mdl.ModelSpec:
        if self.path is not None:
            field_value = self.base.field
            if override is not None:
                field_value = override[1]
            return mdl.make_model(sites, field_value, self.base.blocks)
        params = dict(self.params)
        if override is not None:
            key = "h" if override[0] == "field" else override[0]
            params[key] = override[1]
        return _build_preset(self.preset, params, sites)


# --- sweep handling -----------------------------------------------------------

def parse_sweep(text: str) -> tuple[str, float, float, float]:
    parts = text.split(":")
    if len(parts) != 4:
        raise ValueError(f"sweep must be param:start:stop:step, got {text!r}")
    param = parts[0]
    try:
        start, stop, step = (float(x) for x in parts[1:])
    except ValueError as exc:
        raise ValueError(f"malformed sweep {text!r}: {exc}") from exc
    if step <= 0.0:
        raise ValueError("sweep step must be > 0")
    if not start < stop:
        raise ValueError("sweep start must be < stop")
    return param, start, stop, step


def sweep_points(start: float, stop: float, step: float) -> list[float]:
    """Inclusive sweep grid: start + i*step, with the final point clamped to
    ``stop`` when it lies within step/2 of it."""
    points = []
    i = 0
    while True:
        value = start + i * step
        if value > stop + step / 2.0:
            break
        points.append(value)
        i += 1
    if points and abs(points[-1] - stop) <= step / 2.0:
        points[-1] = stop
    return points


def _parse_sites(text: str) -> tuple[int, ...]:
    try:
        sites = tuple(int(tok) for tok in text.split(",") if tok)
    except ValueError as exc:
        raise ValueError(f"malformed --sites {text!r}") from exc
    if not sites or any(n < 2 for n in sites):
        raise ValueError("--sites needs a comma-separated list of integers >= 2")
    return sites


# --- output -------------------------------------------------------------------

def _fmt_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def render_table(request: ScanRequest, columns: list[str], rows: list[list]) -> str:
    if request.fmt == "json":
        payload = {"request": request.echo(), "columns": columns, "rows": rows}
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"
    buf = io.StringIO()
    buf.write(f"# clusterxy {request.command}\n")
    buf.write("# request: " + json.dumps(request.echo(), sort_keys=True) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt_cell(cell) for cell in row])
    return buf.getvalue()


def write_output(request: ScanRequest, columns: list[str], rows: list[list]) -> None:
    text = render_table(request, columns, rows)
    if request.output is None:
        sys.stdout.write(text)
    else:
        with open(request.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _run_jobs(worker, items, jobs: int) -> list:
    if jobs <= 1:
        return [worker(item) for item in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(worker, items))


def _model_json(spec: mdl.ModelSpec) -> str:
    return json.dumps(mdl.model_to_dict(spec), sort_keys=True, separators=(",", ":"))


# --- verbs --------------------------------------------------------------------

def cmd_spectrum(source: ModelSource, request: ScanRequest) -> tuple[list[str], list[list]]:
    param = request.sweep[0]
    points = sweep_points(*request.sweep[1:])
    items = [(n, value) for n in request.sites for value in points]

    def worker(item):
        n, value = item
        spec = source.build(n, (param, value))
        rows = []
        for sector in (Sector.ODD, Sector.EVEN):
            for level, (energy, occ) in enumerate(sector_states(spec, sector, request.levels)):
                rows.append([value, n, sector.value, level, energy, len(occ), _model_json(spec)])
        return rows

    nested = _run_jobs(worker, items, request.jobs)
    columns = ["sweep_value", "sites", "sector", "level", "energy", "occupation_size", "model"]
    return columns, [row for rows in nested for row in rows]


def cmd_gap_scan(source: ModelSource, request: ScanRequest) -> tuple[list[str], list[list]]:
    param = request.sweep[0]
    points = sweep_points(*request.sweep[1:])
    items = [(n, value) for n in request.sites for value in points]

    def worker(item):
        n, value = item
        spec = source.build(n, (param, value))
        report = ground_and_gap(spec)
        return [value, n, report.gap, _model_json(spec)]

    rows = _run_jobs(worker, items, request.jobs)
    return ["sweep_value", "sites", "gap", "model"], rows


def cmd_ent_scan(source: ModelSource, request: ScanRequest) -> tuple[list[str], list[list]]:
    param = request.sweep[0]
    points = sweep_points(*request.sweep[1:])
    kinds = [q for q in request.quantities if q in ENT_KINDS]
    want_derivative = "derivative" in request.quantities
    want_gap = "gap" in request.quantities

    def worker(item):
        n, value = item
        spec = source.build(n, (param, value))
        densities: dict[str, float | None] = {}
        flagged = False
        degenerate = False
        for kind in kinds:
            try:
                result = _ENT_FUNCS[kind](spec)
            except EvenVacuumError:
                flagged = True
                densities[kind] = None
            else:
                densities[kind] = result.density
                degenerate = degenerate or result.ground_degenerate
        gap = ground_and_gap(spec).gap if want_gap else None
        return value, n, flagged, degenerate, densities, gap, _model_json(spec)

    items = [(n, value) for n in request.sites for value in points]
    results = _run_jobs(worker, items, request.jobs)

    columns = ["sweep_value", "sites", "even_vacuum", "degenerate"]
    columns += kinds
    if want_gap:
        columns.append("gap")
    if want_derivative:
        columns += [f"d_{kind}" for kind in kinds]
    columns.append("model")

    derivatives: dict[tuple[int, str], list[float | None]] = {}
    if want_derivative:
        for n in request.sites:
            chunk = [res for res in results if res[1] == n]
            for kind in kinds:
                series = [res[4][kind] for res in chunk]
                if len(series) >= 3 and all(v is not None for v in series):
                    derivatives[(n, kind)] = list(scan_derivative(points, series))
                else:
                    derivatives[(n, kind)] = [None] * len(series)

    rows = []
    index_in_site = {n: 0 for n in request.sites}
    for value, n, flagged, degenerate, densities, gap, model_json in results:
        row = [value, n, not flagged, degenerate]
        row += [densities[kind] for kind in kinds]
        if want_gap:
            row.append(gap)
        if want_derivative:
            idx = index_in_site[n]
            row += [derivatives[(n, kind)][idx] for kind in kinds]
        index_in_site[n] += 1
        row.append(model_json)
        rows.append(row)
    return columns, rows


def cmd_thermo(source: ModelSource, request: ScanRequest) -> tuple[list[str], list[list]]:
    if source.preset in ("halfway-xy", "spt-afm-halfway") or (
        source.preset == "xny" and source.params.get("halfway")
    ):
        raise ValueError(
            "halfway interactions have no fixed thermodynamic-limit angle "
            "(the mediator count grows with the system size)"
        )
    param = request.sweep[0]
    points = sweep_points(*request.sweep[1:])
    nominal_sites = request.sites[0]

    def worker(value):
        spec = source.build(nominal_sites, (param, value))
        try:
            density = thermo_block_density(theta_function(spec))
        except QuadratureError as exc:
            raise QuadratureError(f"at {param}={value}: {exc}") from exc
        return [value, density, _model_json(spec)]

    rows = _run_jobs(worker, points, request.jobs)
    return ["sweep_value", "thermo_block_density", "model"], rows


def cmd_check(request: ScanRequest, sites: int, points: int, presets, flip_theta_sign: bool):
    rows = run_checks(
        sites=(sites,),
        presets=presets,
        points=points,
        flip_theta_sign=flip_theta_sign,
    )
    table = [
        [r.preset, r.sites, r.parameter, r.check, r.error, r.tolerance, "pass" if r.passed else "FAIL"]
        for r in rows
    ]
    columns = ["preset", "sites", "parameter", "check", "error", "tolerance", "status"]
    failures = sum(1 for r in rows if not r.passed)
    if request.output is not None or request.fmt == "json":
        write_output(request, columns, table)
    if request.output is not None or request.fmt != "json":
        sys.stdout.write(f"checks: {len(rows) - failures} passed, {failures} failed\n")
        for r in rows:
            if not r.passed:
                sys.stdout.write(
                    f"FAIL {r.preset} sites={r.sites} {r.check} at parameter="
                    f"{format(r.parameter, '.17g')}: error {r.error:.3e} > {r.tolerance:.1e}\n"
                )
    return EXIT_CHECK_FAILED if failures else EXIT_OK


def cmd_presets() -> int:
    sys.stdout.write("available presets:\n")
    for name, (params, description) in PRESETS.items():
        flags = ", ".join(f"--{p}" for p in params)
        sys.stdout.write(f"  {name:16s} {description} ({flags})\n")
    sys.stdout.write("model files: JSON with fields sites, field, blocks[kind,strength,mediators]\n")
    return EXIT_OK


# --- argument parsing -----------------------------------------------------------

def _add_model_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--model", help="preset name (see `clusterxy presets`)")
    parser.add_argument("--model-file", help="path to a JSON model definition")
    parser.add_argument("--r", type=float, default=1.0, help="anisotropy (XY-family presets)")
    parser.add_argument("--h", type=float, default=0.0, help="transverse field")
    parser.add_argument("--g", type=float, default=0.0, help="GHZ-cluster parameter")
    parser.add_argument("--lambda", dest="lambda_", type=float, default=0.0, help="AFM coupling")
    parser.add_argument("--n", type=int, default=0, help="X-block mediator count (xny)")
    parser.add_argument("--m", type=int, default=None, help="Y-block mediator count (xny; defaults to n)")
    parser.add_argument("--halfway", action="store_true", help="use half-ring interaction spans")
    parser.add_argument("--sites", default=None, help="comma-separated system sizes")
    parser.add_argument("--out", default=None, help="output path (default: stdout)")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument("--jobs", type=int, default=1, help="concurrent sweep evaluations")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="clusterxy",
        description="exact spectra, gaps, and geometric entanglement of cluster-XY chains",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_spec = sub.add_parser("spectrum", help="lowest levels per sector along a sweep")
    _add_model_args(p_spec)
    p_spec.add_argument("--sweep", required=True, help="param:start:stop:step")
    p_spec.add_argument("--levels", type=int, default=2, help="levels per sector")

    p_gap = sub.add_parser("gap-scan", help="ground-state gap along a sweep")
    _add_model_args(p_gap)
    p_gap.add_argument("--sweep", required=True, help="param:start:stop:step")

    p_ent = sub.add_parser("ent-scan", help="entanglement densities along a sweep")
    _add_model_args(p_ent)
    p_ent.add_argument("--sweep", required=True, help="param:start:stop:step")
    p_ent.add_argument(
        "--quantities",
        default="ent_site",
        help="comma list from ent_site,ent_block,ent_af,gap,derivative",
    )

    p_thermo = sub.add_parser("thermo", help="thermodynamic-limit block density")
    _add_model_args(p_thermo)
    p_thermo.add_argument("--sweep", required=True, help="param:start:stop:step")

    p_check = sub.add_parser("check", help="oracle-equivalence suite")
    p_check.add_argument("--sites", type=int, default=8)
    p_check.add_argument("--points", type=int, default=11)
    p_check.add_argument("--presets", default=None, help="comma list (default: all)")
    p_check.add_argument("--out", default=None)
    p_check.add_argument("--format", choices=("csv", "json"), default="csv")
    p_check.add_argument("--corrupt-theta-sign", action="store_true", help=argparse.SUPPRESS)

    sub.add_parser("presets", help="list preset families")
    return parser


def _scan_request(args, source: ModelSource, quantities=(), extras=None) -> ScanRequest:
    sweep = parse_sweep(args.sweep)
    if args.sites is not None:
        sites = _parse_sites(args.sites)
    elif source.default_sites() is not None:
        sites = (source.default_sites(),)
    else:
        sites = (8,)
    if sweep[0] not in source.sweepable():
        raise ValueError(
            f"cannot sweep {sweep[0]!r} for this model; valid parameters: "
            f"{', '.join(source.sweepable())}"
        )
    if args.jobs < 1:
        raise ValueError("--jobs must be >= 1")
    return ScanRequest(
        command=args.command,
        model=source.describe(),
        sites=sites,
        sweep=sweep,
        quantities=tuple(quantities),
        levels=getattr(args, "levels", 2),
        jobs=args.jobs,
        fmt=args.format,
        output=args.out,
        extras=extras or {},
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "presets":
            return cmd_presets()
        if args.command == "check":
            presets = args.presets.split(",") if args.presets else None
            request = ScanRequest(
                command="check",
                model={"presets": presets or sorted(CHECK_PRESETS)},
                sites=(args.sites,),
                sweep=None,
                fmt=args.format,
                output=args.out,
                extras={"points": args.points},
            )
            return cmd_check(request, args.sites, args.points, presets, args.corrupt_theta_sign)

        source = ModelSource(args)
        if args.command == "spectrum":
            if args.levels < 1:
                raise ValueError("--levels must be >= 1")
            request = _scan_request(args, source)
            columns, rows = cmd_spectrum(source, request)
        elif args.command == "gap-scan":
            request = _scan_request(args, source)
            columns, rows = cmd_gap_scan(source, request)
        elif args.command == "ent-scan":
            quantities = tuple(q for q in args.quantities.split(",") if q)
            allowed = set(ENT_KINDS) | {"gap", "derivative"}
            unknown = set(quantities) - allowed
            if unknown:
                raise ValueError(f"unknown quantities {sorted(unknown)}; allowed: {sorted(allowed)}")
            if not any(q in ENT_KINDS for q in quantities):
                raise ValueError("ent-scan needs at least one of ent_site, ent_block, ent_af")
            request = _scan_request(args, source, quantities=quantities)
            if any(n % 2 for n in request.sites):
                raise ValueError("entanglement scans require even system sizes")
            columns, rows = cmd_ent_scan(source, request)
        elif args.command == "thermo":
            request = _scan_request(args, source)
            columns, rows = cmd_thermo(source, request)
        else:  # pragma: no cover - argparse enforces the choices
            raise ValueError(f"unknown command {args.command!r}")
        write_output(request, columns, rows)
        return EXIT_OK
    except QuadratureError as exc:
        sys.stderr.write(f"numerical failure: {exc}\n")
        return EXIT_NUMERICAL
    except (ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
