"""Command-line interface tying the library together.

Commands: correlate, simulate, render, analyze, bench, info.

Exit codes: 0 success, 1 usage error, 2 data error (parsing, validation, axis
mismatches), 3 numeric error (non-finite results, zero-variance scaling,
memory limits).  Every failure message names the pipeline stage that raised
it.

Each correlate run writes a ``<stem>.meta.json`` sidecar recording every
applied decision (reference kind, resampling, scaling exponent, normalization
constant, engine, workers, tool version).  The sidecar is a complete replay
recipe: ``corrtwo correlate --from-meta <sidecar> --out <stem>`` reproduces
the output files byte for byte.

``CORRTWO_WORKERS`` provides the default for ``--workers``; otherwise the
machine core count is used.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import find_peaks
from .bench import run_bench
from .dataset import (
    LONG_FORM,
    MATRIX_PAIR,
    CorrelationSpectra,
    load_correlation,
    load_dataset,
    save_correlation,
    save_dataset,
)
from .engine_core import NormalizationSpec
from .errors import CorrtwoError, DataError, NumericError
from .fourier import correlate_ft
from .hilbert import correlate_ht
from .preprocess import (
    InterpolantKind,
    PreprocessSpec,
    ReferenceSpec,
    ResampleSpec,
    preprocess_dataset,
    resample_to_axis,
)
from .render import PlotSpec, render_plot
from .simulate import default_bands, default_kinetics, default_spectral_axis, sim2ddata


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _stage(name, fn, *args, **kwargs):
    """Run one pipeline stage; failures carry the stage name."""
    try:
        return fn(*args, **kwargs)
    except DataError as exc:
        raise DataError(f"{name}: {exc}") from None
    except NumericError as exc:
        raise NumericError(f"{name}: {exc}") from None
    except MemoryError:
        raise NumericError(f"{name}: out of memory") from None


def _default_workers() -> int:
    env = os.environ.get("CORRTWO_WORKERS")
    if env:
        try:
            value = int(env)
            if value >= 1:
                return value
        except ValueError:
            pass
        raise UsageError(f"CORRTWO_WORKERS must be a positive integer, got {env!r}")
    return os.cpu_count() or 1


def _pair(text: str, flag: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise UsageError(f"{flag} expects LO,HI, got {text!r}")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError:
        raise UsageError(f"{flag} expects two numbers, got {text!r}") from None


def _sizes(text: str) -> list[tuple[int, int]]:
    out = []
    for token in text.split(","):
        try:
            m, n = token.lower().split("x")
            out.append((int(m), int(n)))
        except ValueError:
            raise UsageError(f"--sizes expects MxN[,MxN...], got {token!r}") from None
    return out


def _int_list(text: str, flag: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"{flag} expects comma-separated integers, got {text!r}") from None


def build_parser() -> _Parser:
    parser = _Parser(prog="corrtwo", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"corrtwo {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add_plot_flags(p):
        p.add_argument("--levels", type=int, default=16,
                       help="requested contour/image level count (forced odd)")
        p.add_argument("--cutout", default=None, metavar="LO,HI",
                       help="value band around 0 not drawn")
        p.add_argument("--xlim", default=None, metavar="A,B")
        p.add_argument("--ylim", default=None, metavar="A,B")
        p.add_argument("--zlim", default=None, metavar="A,B")
        p.add_argument("--mode", choices=("contour", "image"), default="contour")
        p.add_argument("--no-legend", action="store_true")

    c = sub.add_parser("correlate", help="compute 2D correlation spectra")
    c.add_argument("--input", help="dataset file (homo correlation)")
    c.add_argument("--input2", default=None, help="second dataset (hetero correlation)")
    c.add_argument("--reference", default="mean",
                   help="'mean' or 'file:PATH' with a reference spectrum")
    c.add_argument("--resample", type=int, default=None, metavar="N",
                   help="resample each input to N equidistant perturbation values")
    c.add_argument("--resample-to-common", type=int, default=None, metavar="N",
                   help="resample both inputs onto one common N-point axis")
    c.add_argument("--interpolant", choices=("linear", "spline"), default="spline")
    c.add_argument("--alpha", type=float, default=0.0,
                   help="variance-scaling exponent in [0, 1]")
    c.add_argument("--engine", choices=("fourier", "hilbert", "both"), default="fourier")
    c.add_argument("--norm", default=None,
                   help="noda | unit | custom:C (default: noda for fourier, unit for hilbert)")
    c.add_argument("--workers", type=int, default=None)
    c.add_argument("--out", default=None, metavar="STEM")
    c.add_argument("--format", choices=(MATRIX_PAIR, LONG_FORM), default=MATRIX_PAIR)
    c.add_argument("--delimiter", default=",")
    c.add_argument("--plot", choices=("sync", "async"), default=None,
                   help="also render this matrix to <stem>.<which>.svg")
    c.add_argument("--from-meta", default=None, metavar="PATH",
                   help="replay a previous run from its metadata sidecar")
    add_plot_flags(c)

    s = sub.add_parser("simulate", help="simulate a consecutive-reaction dataset")
    s.add_argument("--out", required=True, metavar="STEM")
    s.add_argument("--n", type=int, default=301, help="spectral point count")
    s.add_argument("--m", type=int, default=100, help="perturbation point count")
    s.add_argument("--k1", type=float, default=0.2)
    s.add_argument("--k2", type=float, default=0.8)
    s.add_argument("--t-max", type=float, default=10.0)
    s.add_argument("--noise-sd", type=float, default=0.0)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--delimiter", default=",")

    r = sub.add_parser("render", help="render a stored correlation result to SVG")
    r.add_argument("--input", required=True, metavar="STEM",
                   help="correlation stem written by 'correlate'")
    r.add_argument("--which", choices=("sync", "async"), default="sync")
    r.add_argument("--out", default=None, metavar="FILE")
    r.add_argument("--no-diagonal", action="store_true")
    add_plot_flags(r)

    a = sub.add_parser("analyze", help="extract and classify peaks")
    a.add_argument("--input", required=True, metavar="STEM")
    a.add_argument("--threshold", type=float, default=0.1,
                   help="peak threshold as a fraction of the matrix maximum")
    a.add_argument("--eps", type=float, default=None,
                   help="dead band for sign rules (default 1e-3 of the maximum)")
    a.add_argument("--out", default=None, metavar="STEM")

    b = sub.add_parser("bench", help="worker-scaling benchmark")
    b.add_argument("--sizes", default="20x200,100x400", metavar="MxN[,MxN...]")
    b.add_argument("--workers-list", default=None, metavar="W[,W...]")
    b.add_argument("--repeats", type=int, default=10)
    b.add_argument("--engine", choices=("fourier", "hilbert"), default="fourier")
    b.add_argument("--seed", type=int, default=17)
    b.add_argument("--out", default=None, metavar="FILE", help="also write the table here")

    i = sub.add_parser("info", help="summarize a dataset file")
    i.add_argument("--input", required=True)
    i.add_argument("--delimiter", default=",")

    return parser


# ---------------------------------------------------------------------------
# correlate
# ---------------------------------------------------------------------------

def _load_reference(spec_text: str) -> ReferenceSpec:
    if spec_text == "mean":
        return ReferenceSpec.mean()
    if spec_text.startswith("file:"):
        path = spec_text[5:]
        try:
            raw = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise DataError(f"cannot read reference {path}: {exc}") from None
        tokens = raw.replace(",", " ").split()
        try:
            return ReferenceSpec.provided(np.array([float(t) for t in tokens]))
        except ValueError:
            raise DataError(f"reference file {path} contains non-numeric data") from None
    raise DataError(f"unknown reference {spec_text!r} (use 'mean' or 'file:PATH')")


def _correlate_config(args) -> dict:
    if args.from_meta:
        try:
            meta = json.loads(Path(args.from_meta).read_text(encoding="utf-8"))
        except OSError as exc:
            raise DataError(f"cannot read metadata {args.from_meta}: {exc}") from None
        except json.JSONDecodeError as exc:
            raise DataError(f"malformed metadata {args.from_meta}: {exc}") from None
        config = meta.get("config")
        if not isinstance(config, dict):
            raise DataError(f"metadata {args.from_meta} carries no config section")
        if args.out:
            config = dict(config)
            config["out"] = args.out
        return config
    if not args.input:
        raise UsageError("correlate: --input is required (or --from-meta)")
    return {
        "input": args.input,
        "input2": args.input2,
        "delimiter": args.delimiter,
        "reference": args.reference,
        "resample": args.resample,
        "resample_to_common": args.resample_to_common,
        "interpolant": args.interpolant,
        "alpha": args.alpha,
        "engine": args.engine,
        "norm": args.norm,
        "workers": args.workers if args.workers is not None else _default_workers(),
        "out": args.out or (Path(args.input).stem + ".corr2d"),
        "format": args.format,
        "plot": None if args.plot is None else {
            "which": args.plot,
            "mode": args.mode,
            "levels": args.levels,
            "cutout": args.cutout,
            "xlim": args.xlim,
            "ylim": args.ylim,
            "zlim": args.zlim,
            "legend": not args.no_legend,
        },
    }


def _plot_spec_from(plot_cfg: dict, diagonal: bool | None = None) -> PlotSpec:
    def pair(key):
        value = plot_cfg.get(key)
        if value is None:
            return None
        if isinstance(value, str):
            return _pair(value, f"--{key}")
        return (float(value[0]), float(value[1]))

    return PlotSpec(
        which=plot_cfg["which"],
        mode=plot_cfg.get("mode", "contour"),
        level_count=int(plot_cfg.get("levels", 16)),
        xlim=pair("xlim"),
        ylim=pair("ylim"),
        zlim=pair("zlim"),
        cutout=pair("cutout"),
        legend=bool(plot_cfg.get("legend", True)),
        diagonal=diagonal,
    )


def _frobenius_delta(a: np.ndarray, b: np.ndarray) -> float:
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 and nb == 0:
        return 0.0
    if na == 0 or nb == 0:
        return 1.0
    return float(np.linalg.norm(a / na - b / nb))


def cmd_correlate(args) -> int:
    config = _correlate_config(args)
    workers = int(config.get("workers") or 1)
    if workers < 1:
        raise UsageError("correlate: --workers must be >= 1")

    ds1 = _stage("parse", load_dataset, config["input"], config["delimiter"])
    ds2 = None
    if config.get("input2"):
        ds2 = _stage("parse", load_dataset, config["input2"], config["delimiter"])

    interpolant = InterpolantKind.from_name(config.get("interpolant", "spline"))
    reference = _stage("preprocess", _load_reference, config.get("reference", "mean"))

    common = config.get("resample_to_common")
    if common is not None and ds2 is not None:
        lo = max(ds1.perturbation_axis[0], ds2.perturbation_axis[0])
        hi = min(ds1.perturbation_axis[-1], ds2.perturbation_axis[-1])
        if not lo < hi:
            raise DataError("preprocess: perturbation ranges do not overlap")
        axis = np.linspace(lo, hi, int(common))
        ds1 = _stage("preprocess", resample_to_axis, ds1, axis, interpolant)
        ds2 = _stage("preprocess", resample_to_axis, ds2, axis, interpolant)

    prespec = PreprocessSpec(
        reference=reference,
        resample=None if config.get("resample") is None
        else ResampleSpec(int(config["resample"]), interpolant),
        scaling_exponent=float(config.get("alpha", 0.0)),
    )
    dyn1 = _stage("preprocess", preprocess_dataset, ds1, prespec)
    dyn2 = _stage("preprocess", preprocess_dataset, ds2, prespec) if ds2 is not None else None

    engine = config.get("engine", "fourier")
    norm_text = config.get("norm")
    engines = ("fourier", "hilbert") if engine == "both" else (engine,)
    results: dict[str, CorrelationSpectra] = {}
    constants: dict[str, float] = {}
    for name in engines:
        if norm_text:
            norm = NormalizationSpec.parse(norm_text)
        else:
            norm = NormalizationSpec.noda() if name == "fourier" else NormalizationSpec.unit()
        fn = correlate_ft if name == "fourier" else correlate_ht
        results[name] = _stage("correlate", fn, dyn1, dyn2, norm=norm, workers=workers)
        constants[name] = results[name].normalization

    stem = config["out"]
    fmt = config.get("format", MATRIX_PAIR)
    outputs: list[str] = []
    for name, result in results.items():
        result_stem = stem if len(results) == 1 else f"{stem}.{name}"
        for path in _stage("write", save_correlation, result, result_stem, fmt):
            outputs.append(str(path))

    comparison = None
    if len(results) == 2:
        comparison = {
            "sync_normalized_frobenius_delta":
                _frobenius_delta(results["fourier"].sync, results["hilbert"].sync),
            "async_normalized_frobenius_delta":
                _frobenius_delta(results["fourier"].asyn, results["hilbert"].asyn),
        }

    plot_cfg = config.get("plot")
    if plot_cfg:
        first = results[engines[0]]
        plot_spec = _stage("render", _plot_spec_from, plot_cfg)
        svg = _stage("render", render_plot, first, plot_spec)
        plot_path = Path(f"{stem}.{plot_cfg['which']}.svg")
        _stage("write", plot_path.write_bytes, svg)
        outputs.append(str(plot_path))

    first = results[engines[0]]
    meta = {
        "tool": "corrtwo",
        "version": __version__,
        "command": "correlate",
        "config": config,
        "applied": {
            "reference_kind": reference.kind,
            "scaling_exponent": first.scaling_exponent,
            "normalization_constant": constants,
            "m": int(dyn1.m),
            "n1": int(first.n1),
            "n2": int(first.n2),
            "is_homo": bool(first.is_homo),
            "engines": list(engines),
        },
        "comparison": comparison,
        "outputs": outputs,
    }
    meta_path = Path(f"{stem}.meta.json")
    _stage("write", meta_path.write_text,
           json.dumps(meta, indent=2, sort_keys=True) + "\n", "utf-8")

    print(f"correlated {dyn1.m} x {dyn1.n} -> {first.n1} x {first.n2} "
          f"({', '.join(engines)}); reference: {reference.kind}")
    if comparison:
        print(f"engine comparison: sync delta "
              f"{comparison['sync_normalized_frobenius_delta']:.3e}, async delta "
              f"{comparison['async_normalized_frobenius_delta']:.3e}")
    for path in outputs + [str(meta_path)]:
        print(f"wrote {path}")
    return 0


# ---------------------------------------------------------------------------
# other commands
# ---------------------------------------------------------------------------

def cmd_simulate(args) -> int:
    kinetics = _stage("simulate", default_kinetics, args.m, args.t_max, args.k1, args.k2)
    axis = _stage("simulate", default_spectral_axis, args.n)
    ds = _stage("simulate", sim2ddata, kinetics, default_bands(), axis,
                args.noise_sd, args.seed)
    path = Path(args.out + ".csv")
    _stage("write", save_dataset, ds, path, args.delimiter)
    meta = {
        "tool": "corrtwo",
        "version": __version__,
        "command": "simulate",
        "config": {
            "n": args.n, "m": args.m, "k1": args.k1, "k2": args.k2,
            "t_max": args.t_max, "noise_sd": args.noise_sd, "seed": args.seed,
            "bands": [
                {"center": b.center, "width": b.width, "shape": b.shape,
                 "species": b.species, "amplitude": b.amplitude}
                for b in default_bands()
            ],
            "rng": "numpy default_rng (PCG64)",
        },
        "outputs": [str(path)],
    }
    meta_path = Path(args.out + ".meta.json")
    _stage("write", meta_path.write_text,
           json.dumps(meta, indent=2, sort_keys=True) + "\n", "utf-8")
    print(f"wrote {path}")
    print(f"wrote {meta_path}")
    return 0


def cmd_render(args) -> int:
    corr = _stage("read", load_correlation, args.input)
    plot_cfg = {
        "which": args.which, "mode": args.mode, "levels": args.levels,
        "cutout": args.cutout, "xlim": args.xlim, "ylim": args.ylim,
        "zlim": args.zlim, "legend": not args.no_legend,
    }
    diagonal = False if args.no_diagonal else None
    spec = _stage("render", _plot_spec_from, plot_cfg, diagonal)
    svg = _stage("render", render_plot, corr, spec)
    out = Path(args.out) if args.out else Path(f"{args.input}.{args.which}.svg")
    _stage("write", out.write_bytes, svg)
    print(f"wrote {out}")
    return 0


def cmd_analyze(args) -> int:
    corr = _stage("read", load_correlation, args.input)
    report = _stage("analyze", find_peaks, corr, args.threshold, args.eps)
    out = Path((args.out or args.input) + ".peaks.csv")
    _stage("write", out.write_bytes, report.to_long_form())
    sys.stdout.write(report.to_table())
    print(f"wrote {out}")
    return 0


def cmd_bench(args) -> int:
    sizes = _sizes(args.sizes)
    if args.workers_list:
        workers_list = _int_list(args.workers_list, "--workers-list")
    else:
        cores = _default_workers()
        workers_list = [1] if cores == 1 else sorted({1, 2, cores})
    report = _stage("bench", run_bench, sizes, workers_list,
                    repeats=args.repeats, engine=args.engine, seed=args.seed)
    table = report.to_table()
    sys.stdout.write(table)
    if args.out:
        _stage("write", Path(args.out).write_text, table, "utf-8")
        print(f"wrote {args.out}")
    return 0


def _spacing_stats(axis: np.ndarray) -> tuple[float, float]:
    gaps = np.abs(np.diff(axis))
    ratio = float(gaps.max() / gaps.min())
    mean = gaps.mean()
    deviation = float(np.abs(gaps - mean).max() / mean)
    return ratio, deviation


def cmd_info(args) -> int:
    ds = _stage("parse", load_dataset, args.input, args.delimiter)
    t_ratio, t_dev = _spacing_stats(ds.perturbation_axis)
    nu_ratio, nu_dev = _spacing_stats(ds.spectral_axis)
    direction = "increasing" if ds.spectral_axis[1] > ds.spectral_axis[0] else "decreasing"
    print(f"m = {ds.m} perturbation values, n = {ds.n} spectral values")
    print(f"perturbation axis ({ds.axis_labels[1]}): "
          f"{ds.perturbation_axis[0]:g} .. {ds.perturbation_axis[-1]:g}, "
          f"strictly increasing")
    print(f"  spacing: max/min gap ratio = {t_ratio:g}, "
          f"max relative deviation from equidistant = {t_dev:g}")
    print(f"spectral axis ({ds.axis_labels[0]}): "
          f"{ds.spectral_axis[0]:g} .. {ds.spectral_axis[-1]:g}, "
          f"strictly {direction}")
    print(f"  spacing: max/min gap ratio = {nu_ratio:g}, "
          f"max relative deviation from equidistant = {nu_dev:g}")
    if t_dev > 1e-9:
        print("note: perturbation spacing is uneven; consider --resample")
    return 0


_COMMANDS = {
    "correlate": cmd_correlate,
    "simulate": cmd_simulate,
    "render": cmd_render,
    "analyze": cmd_analyze,
    "bench": cmd_bench,
    "info": cmd_info,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 3
    except CorrtwoError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
