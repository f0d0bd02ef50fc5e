"""Command-line pipeline: generate, evolve, measure, analyze, render.

All flags are long-form.  The only environment variable honoured is
OUTPUT_DIR, which prefixes every relative output path.  Outputs are
deterministic: identical inputs and flags give byte-identical files.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import analysis, serialize
from .analysis import CalibrationConfig, CalibrationResult, build_regime_report
from .errors import (
    DomainError,
    FractalwalkError,
    InputFileError,
    NotFoundError,
    NumericalError,
    ShapeError,
    StructuralError,
)
from .evolution import (
    GRID_PRESETS,
    evolve_classical,
    evolve_quantum,
    spectral_decompose,
    time_grid,
)
from .hamiltonian import build_classical_generator, build_hamiltonian
from .lattice import FRACTAL_KINDS, LatticeKind, generate, resolve_input
from .observables import build_observable_table
from .render import RenderSpec, pgm_bytes, render_frame

EXIT_CODES = {
    InputFileError: 3,
    ShapeError: 4,
    DomainError: 5,
    StructuralError: 6,
    NumericalError: 7,
    NotFoundError: 8,
}

_EPILOG = """\
exit codes:
  0  success
  2  usage error (unknown flag or missing argument)
  3  input file missing or malformed
  4  dimension mismatch between inputs
  5  parameter outside its allowed domain
  6  input lacks required structure (e.g. analyzing a void-free lattice)
  7  numerical routine out of tolerance
  8  requested event or anchor not present in the data

Relative output paths are created under $OUTPUT_DIR when that variable is set.
"""


def _outpath(path: str) -> str:
    base = os.environ.get("OUTPUT_DIR", "")
    if base and not os.path.isabs(path):
        return os.path.join(base, path)
    return path


def _load_pair(args):
    lattice = serialize.read_lattice(args.lattice)
    series = serialize.read_series(args.series)
    if series.n_sites != lattice.n_sites:
        raise ShapeError(
            f"series has {series.n_sites} sites but lattice has {lattice.n_sites}"
        )
    return lattice, series


def _grid_for(args, kind: LatticeKind):
    tau_max, steps = GRID_PRESETS[kind]
    if args.tau_max is not None:
        tau_max = args.tau_max
    if args.steps is not None:
        steps = args.steps
    return time_grid(tau_max, steps, args.tau_min)


# ---------------------------------------------------------------------------
# subcommand implementations


def cmd_lattice(args) -> int:
    lattice = generate(args.kind, args.generation)
    out = _outpath(args.out)
    serialize.write_lattice(lattice, out)
    print(f"{lattice.kind.value} generation {lattice.generation}: "
          f"{lattice.n_sites} sites, {lattice.n_edges} edges -> {out}")
    return 0


def cmd_evolve(args) -> int:
    lattice = serialize.read_lattice(args.lattice)
    input_site = resolve_input(lattice, args.input)
    h = build_hamiltonian(lattice, beta=args.beta, coupling=args.coupling)
    series = evolve_quantum(spectral_decompose(h), input_site, _grid_for(args, lattice.kind))
    out = _outpath(args.out)
    serialize.write_series(series, out)
    if args.binary_out:
        serialize.write_series_binary(series, _outpath(args.binary_out))
    if args.dump_hamiltonian:
        serialize.write_matrix_triplets(h.matrix, _outpath(args.dump_hamiltonian))
    print(f"quantum series: input {input_site}, {series.times.size} times -> {out}")
    return 0


def cmd_classical(args) -> int:
    lattice = serialize.read_lattice(args.lattice)
    input_site = resolve_input(lattice, args.input)
    gen = build_classical_generator(lattice, rate=args.rate)
    series = evolve_classical(gen, input_site, _grid_for(args, lattice.kind))
    out = _outpath(args.out)
    serialize.write_series(series, out)
    if args.dump_generator:
        serialize.write_matrix_triplets(gen.matrix, _outpath(args.dump_generator))
    print(f"classical series: input {input_site}, {series.times.size} times -> {out}")
    return 0


def cmd_observables(args) -> int:
    lattice, series = _load_pair(args)
    table = build_observable_table(series, lattice)
    out = _outpath(args.out)
    serialize.write_observables(table, out)
    print(f"observables: {table.times.size} rows -> {out}")
    return 0


def cmd_analyze(args) -> int:
    lattice, series = _load_pair(args)
    report = build_regime_report(
        lattice, series,
        epsilon=args.epsilon,
        slope_window=args.slope_window,
        band=args.band,
        delta=args.delta,
        min_span=args.min_span,
    )
    out = _outpath(args.out)
    serialize.write_report(report, out)
    events = ", ".join(f"{k}={v:.4g}" for k, v in report.event_taus().items()) or "none"
    print(f"report: events [{events}] -> {out}")
    return 0


def cmd_render(args) -> int:
    lattice, series = _load_pair(args)
    spec = RenderSpec(
        pixels_per_spacing=args.pixels_per_spacing,
        spot_sigma=args.spot_sigma,
        margin=args.margin,
        gamma=args.gamma,
    )
    out_dir = _outpath(args.out_dir)
    for index in args.time_index:
        image = render_frame(series, lattice, index, spec)
        path = os.path.join(out_dir, f"{args.run}_t{index}.pgm")
        serialize.write_bytes(path, pgm_bytes(image))
        print(f"frame {index} ({image.shape[1]}x{image.shape[0]}) -> {path}")
    return 0


def cmd_calibrate(args) -> int:
    doc = serialize.read_report_document(args.report)
    events = {
        name: float(doc[key])
        for name, key in (
            ("first_void", "first_void_tau"),
            ("l_f", "l_f_tau"),
            ("farthest", "farthest_tau"),
            ("saturation", "saturation_tau"),
        )
        if doc.get(key) is not None
    }
    config = CalibrationConfig(anchor_event=args.anchor_event, anchor_mm=args.anchor_mm)
    anchor_tau = events.get(config.anchor_event)
    if anchor_tau is None or anchor_tau <= 0:
        raise NotFoundError(
            f"anchor event {config.anchor_event!r} not present in {args.report}"
        )
    scale = config.anchor_mm / anchor_tau
    result = CalibrationResult(
        anchor_event=config.anchor_event,
        anchor_mm=config.anchor_mm,
        anchor_tau=anchor_tau,
        scale_s=scale,
        events_mm={name: scale * tau for name, tau in events.items()},
    )
    doc["calibration"] = {
        "anchor_event": result.anchor_event,
        "anchor_mm": result.anchor_mm,
        "anchor_tau": result.anchor_tau,
        "scale_mm_per_tau": result.scale_s,
        "events_mm": result.events_mm,
    }
    out = _outpath(args.out)
    serialize.write_text(out, serialize.json_dumps(doc) + "\n")
    predicted = ", ".join(f"{k}={v:.3f}mm" for k, v in result.events_mm.items())
    print(f"calibration: scale {result.scale_s:.4f} mm/tau; {predicted} -> {out}")
    return 0


def _parse_instances(text: str) -> list[tuple[LatticeKind, int]]:
    instances = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        try:
            kind_name, gen_text = chunk.split(":")
            kind = LatticeKind.parse(kind_name)
            generation = int(gen_text)
        except (ValueError, TypeError):
            raise DomainError(
                f"bad instance {chunk!r}; expected kind:generation like sg:4"
            ) from None
        if kind not in FRACTAL_KINDS:
            raise DomainError(
                f"sweep runs the void-based analysis and needs fractal kinds; "
                f"got {kind.value!r}"
            )
        instances.append((kind, generation))
    if not instances:
        raise DomainError("no instances given")
    return instances


def cmd_sweep(args) -> int:
    instances = _parse_instances(args.instances)
    out_dir = _outpath(args.out_dir)
    artifacts = []
    for kind, generation in instances:
        lattice = generate(kind, generation)
        input_site = resolve_input(lattice, args.input)
        tau_max, steps = GRID_PRESETS[kind]
        if args.tau_max is not None:
            tau_max = args.tau_max
        if args.steps is not None:
            steps = args.steps
        series = evolve_quantum(
            spectral_decompose(build_hamiltonian(lattice)),
            input_site,
            time_grid(tau_max, steps),
        )
        table = build_observable_table(series, lattice)
        report = build_regime_report(lattice, series, table=table, epsilon=args.epsilon)
        stem = f"{kind.value}{generation}"
        paths = {
            "lattice": os.path.join(out_dir, f"{stem}.lattice.json"),
            "series": os.path.join(out_dir, f"{stem}.series.json"),
            "observables": os.path.join(out_dir, f"{stem}.observables.csv"),
            "report": os.path.join(out_dir, f"{stem}.report.json"),
        }
        serialize.write_lattice(lattice, paths["lattice"])
        serialize.write_series(series, paths["series"])
        serialize.write_observables(table, paths["observables"])
        serialize.write_report(report, paths["report"])
        artifacts.extend(paths.values())
        events = ", ".join(f"{k}={v:.4g}" for k, v in report.event_taus().items()) or "none"
        print(f"{stem}: {lattice.n_sites} sites, events [{events}]")
    manifest_path = os.path.join(out_dir, "manifest.json")
    serialize.write_manifest(artifacts, out_dir, manifest_path)
    print(f"manifest: {len(artifacts)} artifacts -> {manifest_path}")
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fractalwalk",
        description="Continuous-time quantum walks on Sierpinski photonic lattices.",
        epilog=_EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("lattice", help="generate a lattice and write it as JSON")
    p.add_argument("--kind", required=True,
                   choices=[k.value for k in LatticeKind])
    p.add_argument("--generation", required=True, type=int,
                   help="generation (fractals) or rows/side (baselines)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_lattice)

    def add_grid_flags(p):
        p.add_argument("--tau-min", type=float, default=0.0)
        p.add_argument("--tau-max", type=float, default=None,
                       help="default: per-kind preset")
        p.add_argument("--steps", type=int, default=None,
                       help="number of grid samples (default: per-kind preset)")

    p = sub.add_parser("evolve", help="quantum evolution over a time grid")
    p.add_argument("--lattice", required=True)
    p.add_argument("--input", default="auto",
                   help="site id, or apex/top-left/auto (default auto)")
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--coupling", type=float, default=1.0)
    add_grid_flags(p)
    p.add_argument("--out", required=True)
    p.add_argument("--binary-out", default=None,
                   help="also write the probability matrix as a binary dump")
    p.add_argument("--dump-hamiltonian", default=None,
                   help="write the Hamiltonian as triplet text (row col value)")
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("classical", help="classical (heat-kernel) evolution")
    p.add_argument("--lattice", required=True)
    p.add_argument("--input", default="auto")
    p.add_argument("--rate", type=float, default=1.0)
    add_grid_flags(p)
    p.add_argument("--out", required=True)
    p.add_argument("--dump-generator", default=None,
                   help="write the Laplacian as triplet text (row col value)")
    p.set_defaults(func=cmd_classical)

    p = sub.add_parser("observables", help="variance, return probability, Polya CSV")
    p.add_argument("--series", required=True)
    p.add_argument("--lattice", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_observables)

    p = sub.add_parser("analyze", help="regime report for a fractal run")
    p.add_argument("--series", required=True)
    p.add_argument("--lattice", required=True)
    p.add_argument("--epsilon", type=float, default=analysis.DEFAULT_EPSILON,
                   help="event-detection probability mass (default 0.02)")
    p.add_argument("--slope-window", type=int, default=analysis.DEFAULT_SLOPE_WINDOW)
    p.add_argument("--band", type=float, default=analysis.DEFAULT_BAND,
                   help="fractal-onset exponent band around d_f (default 0.15)")
    p.add_argument("--delta", type=float, default=analysis.DEFAULT_DELTA,
                   help="Polya plateau flatness (default 0.002)")
    p.add_argument("--min-span", type=int, default=analysis.DEFAULT_MIN_SPAN)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("render", help="write Gaussian-spot PGM frames")
    p.add_argument("--series", required=True)
    p.add_argument("--lattice", required=True)
    p.add_argument("--run", required=True, help="frame name prefix")
    p.add_argument("--time-index", required=True, type=int, action="append",
                   help="time index to render; repeatable")
    p.add_argument("--out-dir", default=".")
    p.add_argument("--pixels-per-spacing", type=int, default=24)
    p.add_argument("--spot-sigma", type=float, default=0.35)
    p.add_argument("--margin", type=float, default=1.0)
    p.add_argument("--gamma", type=float, default=0.5)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("calibrate", help="anchor a report's events to mm")
    p.add_argument("--report", required=True)
    p.add_argument("--anchor-event", required=True, choices=["first_void", "farthest"])
    p.add_argument("--anchor-mm", required=True, type=float)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("sweep", help="full pipeline over fractal instances")
    p.add_argument("--instances", required=True,
                   help="comma list of kind:generation, e.g. sg:4,sc:3,dsc:2")
    p.add_argument("--input", default="auto")
    p.add_argument("--epsilon", type=float, default=analysis.DEFAULT_EPSILON)
    p.add_argument("--tau-max", type=float, default=None)
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_sweep)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FractalwalkError as exc:
        for klass, code in EXIT_CODES.items():
            if isinstance(exc, klass):
                print(f"error: {exc}", file=sys.stderr)
                return code
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
