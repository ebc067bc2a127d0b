"""Command line front end: ``lrjs generate|sample|recover|evaluate|sweep``.

Every command accepts ``--config FILE`` (flat ``key = value``); explicit flags
win over config values, config values over built-in defaults.

Exit codes: 0 success/converged, 1 usage or I/O error, 2 iteration cap
reached, 3 solver divergence.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import matio
from .config import (
    STANDARD_PHANTOM_FS,
    STANDARD_PHANTOM_M,
    phantom_from_kv,
    phantom_to_kv,
    read_kv,
    write_kv,
)
from .imaging import DEFAULT_DYNAMIC_RANGE_DB, RegionSpec, write_pgm
from .model import FourierSupport, RfFrame, SamplingPattern, Scheme, SolverConfig, Termination
from .operators import measure
from .pipeline import MODES, evaluate, recover
from .solver import SolverDiverged
from .synth import DEFAULT_RMS, STANDARD_SYNTH, cyst_regions, gen_lowrank_jointsparse, gen_pattern, gen_phantom_rf

log = logging.getLogger("lrjs")

EXIT_OK, EXIT_USAGE, EXIT_MAX_ITERS, EXIT_DIVERGED = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


class _Opts:
    """Flag > config file > default lookup."""

    def __init__(self, args):
        self.args = args
        self.kv = read_kv(args.config) if getattr(args, "config", None) else {}

    def get(self, name, conv=str, default=None, key=None):
        val = getattr(self.args, name, None)
        if val is not None:
            return val
        key = key or name
        if key in self.kv and self.kv[key] != "":
            return conv(self.kv[key])
        return default


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _solver_config(o: _Opts, nuclear_weight=None) -> SolverConfig:
    d = SolverConfig()
    return SolverConfig(
        gamma=o.get("gamma", float, d.gamma),
        alpha=o.get("alpha", float, d.alpha),
        mu=o.get("mu", float, d.mu),
        max_iters=o.get("max_iters", int, d.max_iters),
        tol=o.get("tol", float, d.tol),
        nuclear_weight=nuclear_weight if nuclear_weight is not None
        else o.get("nuclear_weight", float, d.nuclear_weight),
    )


def _load_frame(o: _Opts, path_attr="frame") -> RfFrame:
    path = o.get(path_attr)
    if path is None:
        raise UsageError(f"--{path_attr} is required")
    data = matio.read_matrix(path)
    if np.iscomplexobj(data):
        raise UsageError(f"{path}: expected a real RF frame")
    return RfFrame(data, fs=o.get("fs", float, 25e6), fc=o.get("fc", float, 3.5e6))


def _regions(o: _Opts, required=False):
    text = o.get("regions")
    if text is None:
        if required:
            raise UsageError("--regions is required (target;background as r0,c0,rows,cols)")
        return None
    return RegionSpec.parse(text)


# -- generate ---------------------------------------------------------------

def cmd_generate(args) -> int:
    o = _Opts(args)
    out = Path(o.get("out", Path, Path("out")))
    out.mkdir(parents=True, exist_ok=True)
    kind = o.get("kind", str, "synthetic")
    seed = o.get("seed", int, 0)
    rms = o.get("rms", float, DEFAULT_RMS)
    if kind == "synthetic":
        m = o.get("m", int, STANDARD_SYNTH["m"])
        n = o.get("n", int, STANDARD_SYNTH["n"])
        fc = o.get("fc", float, STANDARD_SYNTH["fc"])
        fs = o.get("fs", float, STANDARD_SYNTH["fs"])
        support = FourierSupport.from_band(m, fc, fs)
        x, d0 = gen_lowrank_jointsparse(
            m, n, support, o.get("rank", int, STANDARD_SYNTH["rank"]),
            o.get("ksparse", int, STANDARD_SYNTH["row_sparsity"]), seed=seed, rms=rms)
        matio.write_matrix(out / "frame.lrjs", x.data)
        matio.write_matrix(out / "truth_d.lrjs", d0.data)
        meta = {"kind": kind, "m": m, "n": n, "fc": fc, "fs": fs, "k": support.k,
                "rank": o.get("rank", int, STANDARD_SYNTH["rank"]),
                "ksparse": o.get("ksparse", int, STANDARD_SYNTH["row_sparsity"]),
                "seed": seed, "rms": rms}
    elif kind == "phantom":
        kv = dict(o.kv)
        if getattr(args, "spec", None):
            kv.update(read_kv(args.spec))
        if args.seed is not None:
            kv["seed"] = str(args.seed)
        spec = phantom_from_kv(kv)
        fs = o.get("fs", float, float(kv.get("fs", STANDARD_PHANTOM_FS)))
        m = o.get("m", int, int(kv.get("m", STANDARD_PHANTOM_M)))
        rms_kv = kv.get("rms")
        rms = args.rms if args.rms is not None else float(rms_kv) if rms_kv else DEFAULT_RMS
        x = gen_phantom_rf(spec, fs, m, rms=rms)
        matio.write_matrix(out / "frame.lrjs", x.data)
        meta = {"kind": kind, "m": m, "n": spec.n_elements, "fs": fs, "rms": rms, **phantom_to_kv(spec)}
        if spec.cysts:
            try:
                meta["regions"] = cyst_regions(spec, fs, m).format()
            except ValueError as exc:
                log.warning("no CNR regions: %s", exc)
    else:
        raise UsageError(f"unknown --kind {kind!r}")
    write_kv(out / "frame.cfg", {k: _fmt(v) for k, v in meta.items()})
    log.info("wrote %s", out)
    return EXIT_OK


# -- sample -----------------------------------------------------------------

def cmd_sample(args) -> int:
    o = _Opts(args)
    x = _load_frame(o)
    out = Path(o.get("out", Path, Path("out")))
    out.mkdir(parents=True, exist_ok=True)
    sr = o.get("sr", float)
    if sr is None:
        raise UsageError("--sr is required")
    scheme = o.get("scheme", str, Scheme.UNIFORM_PER_CHANNEL.value)
    seed = o.get("seed", int, 0, key="sample_seed")
    sigma = o.get("sigma", float, 0.0)
    pattern = gen_pattern(x.m, x.n, sr, scheme=scheme, seed=seed)
    b = measure(x, pattern, sigma=sigma, seed=seed)
    matio.write_matrix(out / "pattern.lrjs", pattern.mask().astype(float))
    matio.write_matrix(out / "measurements.lrjs", b.values[None, :])
    write_kv(out / "sample.cfg", {"sr": _fmt(sr), "scheme": scheme, "sample_seed": seed,
                                  "sigma": _fmt(sigma), "count": pattern.size})
    return EXIT_OK


# -- recover ----------------------------------------------------------------

def _recover_to(out: Path, x: RfFrame, cfg: SolverConfig, sr, pattern, scheme, seed, sigma):
    """Run one recovery, write its files, return (exit code, summary dict)."""
    out.mkdir(parents=True, exist_ok=True)
    summary = {"sr": sr if pattern is None else pattern.rate, "scheme": scheme,
               "sample_seed": seed, "sigma": sigma, "gamma": cfg.gamma, "alpha": cfg.alpha,
               "mu": cfg.mu, "nuclear_weight": cfg.nuclear_weight, "tol": cfg.tol,
               "max_iters": cfg.max_iters}
    try:
        res = recover(x, cfg, sr=sr, pattern=pattern, scheme=scheme, seed=seed, sigma=sigma)
    except SolverDiverged as exc:
        exc.trace.to_csv(out / "trace.csv")
        summary.update(terminated_by="diverged", iterations=len(exc.trace))
        write_kv(out / "summary.cfg", {k: _fmt(v) for k, v in summary.items()})
        log.error("%s", exc)
        return EXIT_DIVERGED, summary, None
    matio.write_matrix(out / "xhat.lrjs", res.frame.data)
    matio.write_matrix(out / "dhat.lrjs", res.d.data)
    res.trace.to_csv(out / "trace.csv")
    summary.update(
        terminated_by=res.trace.terminated_by.value,
        iterations=res.trace.iterations,
        wall_time_s=round(res.wall_time_s, 6),
        objective_init=res.objective_init,
        objective_final=res.objective_final,
        imag_norm=res.imag_norm,
    )
    write_kv(out / "summary.cfg", {k: _fmt(v) for k, v in summary.items()})
    code = EXIT_OK if res.trace.terminated_by is Termination.TOL else EXIT_MAX_ITERS
    return code, summary, res


def cmd_recover(args) -> int:
    o = _Opts(args)
    x = _load_frame(o)
    out = Path(o.get("out", Path, Path("out")))
    pattern = None
    if args.pattern:
        mask = matio.read_matrix(args.pattern)
        if mask.shape != x.shape:
            raise UsageError(f"pattern shape {mask.shape} does not match frame {x.shape}")
        pattern = SamplingPattern.from_mask(mask.real)
        sr = None
    else:
        sr = o.get("sr", float)
        if sr is None:
            raise UsageError("either --sr or --pattern is required")
    code, summary, res = _recover_to(
        out, x, _solver_config(o), sr, pattern,
        o.get("scheme", str, Scheme.UNIFORM_PER_CHANNEL.value),
        o.get("seed", int, 0, key="sample_seed"), o.get("sigma", float, 0.0))
    if res is not None:
        from .imaging import relative_error

        log.info("%s after %d iterations, relative error %.3e",
                 summary["terminated_by"], summary["iterations"], relative_error(res.frame, x))
    return code


# -- evaluate ---------------------------------------------------------------

METRIC_FIELDS = ["sr", "cnr_db", "relative_error", "iterations", "wall_time_s",
                 "reference_cnr_db", "delta_cnr_db"]


def cmd_evaluate(args) -> int:
    o = _Opts(args)
    regions = _regions(o, required=True)
    ref = _load_frame(o, "reference")
    rec = _load_frame(o, "reconstruction")
    out = Path(o.get("out", Path, Path("out")))
    out.mkdir(parents=True, exist_ok=True)
    dr = o.get("dynamic_range", float, DEFAULT_DYNAMIC_RANGE_DB)
    ev = evaluate(ref, rec, regions, dr)
    write_pgm(out / "reference.pgm", ev.reference_image)
    write_pgm(out / "reconstruction.pgm", ev.image)
    summary = read_kv(args.summary) if args.summary else {}
    row = {
        "sr": summary.get("sr", ""),
        "cnr_db": _fmt(ev.cnr_db),
        "relative_error": _fmt(ev.relative_error),
        "iterations": summary.get("iterations", ""),
        "wall_time_s": summary.get("wall_time_s", ""),
        "reference_cnr_db": _fmt(ev.reference_cnr_db),
        "delta_cnr_db": _fmt(ev.delta_cnr_db),
    }
    with open(out / "metrics.csv", "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=METRIC_FIELDS, lineterminator="\n")
        w.writeheader()
        w.writerow(row)
    return EXIT_OK


# -- sweep ------------------------------------------------------------------

RESULT_FIELDS = ["mode", "sr", "scheme", "sample_seed", "nuclear_weight", "relative_error",
                 "cnr_db", "reference_cnr_db", "delta_cnr_db", "iterations", "terminated_by"]


def _sweep_cell(task):
    out, x, cfg, sr, scheme, seed, sigma, regions, dr, mode = task
    code, summary, res = _recover_to(out, x, cfg, sr, None, scheme, seed, sigma)
    row = {"mode": mode, "sr": sr, "scheme": scheme, "sample_seed": seed,
           "nuclear_weight": cfg.nuclear_weight, "iterations": summary["iterations"],
           "terminated_by": summary["terminated_by"]}
    timing = {"mode": mode, "sr": sr, "wall_time_s": summary.get("wall_time_s", "")}
    if res is not None:
        ev = evaluate(x, res.frame, regions, dr)
        write_pgm(out / "reconstruction.pgm", ev.image)
        row.update(relative_error=ev.relative_error, cnr_db=ev.cnr_db,
                   reference_cnr_db=ev.reference_cnr_db, delta_cnr_db=ev.delta_cnr_db)
    return row, timing


def cmd_sweep(args) -> int:
    o = _Opts(args)
    x = _load_frame(o)
    out = Path(o.get("out", Path, Path("out")))
    out.mkdir(parents=True, exist_ok=True)
    sr_text = o.get("sr_list", str, "0.05,0.1,0.2,0.3")
    sr_list = [float(v) for v in sr_text.split(",") if v.strip()]
    if any(not 0 < v <= 1 for v in sr_list):
        raise UsageError("--sr-list entries must lie in (0, 1]")
    modes = [m.strip() for m in o.get("modes", str, "full,sparse").split(",") if m.strip()]
    for m in modes:
        if m not in MODES:
            raise UsageError(f"unknown mode {m!r} (choose from {', '.join(MODES)})")
    scheme = o.get("scheme", str, Scheme.UNIFORM_PER_CHANNEL.value)
    seed = o.get("seed", int, 0, key="sample_seed")
    sigma = o.get("sigma", float, 0.0)
    regions = _regions(o)
    dr = o.get("dynamic_range", float, DEFAULT_DYNAMIC_RANGE_DB)
    tasks = [
        (out / mode / f"sr_{sr:g}", x, _solver_config(o, nuclear_weight=MODES[mode]),
         sr, scheme, seed, sigma, regions, dr, mode)
        for mode in modes for sr in sr_list
    ]
    jobs = o.get("jobs", int, 1)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_sweep_cell, tasks))
    else:
        results = [_sweep_cell(t) for t in tasks]

    with open(out / "results.csv", "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=RESULT_FIELDS, lineterminator="\n")
        w.writeheader()
        for row, _ in results:
            w.writerow({k: _fmt(row.get(k)) for k in RESULT_FIELDS})
    with open(out / "timings.csv", "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=["mode", "sr", "wall_time_s"], lineterminator="\n")
        w.writeheader()
        for _, t in results:
            w.writerow({k: _fmt(v) for k, v in t.items()})
    lines = [f"{'mode':<8}{'sr':>6}{'rel_error':>12}{'dCNR_dB':>10}{'iters':>7}  stop"]
    for row, _ in results:
        err = row.get("relative_error")
        dc = row.get("delta_cnr_db")
        lines.append(
            f"{row['mode']:<8}{row['sr']:>6g}{(f'{err:.3e}' if err is not None else '-'):>12}"
            f"{(f'{dc:+.2f}' if dc is not None else '-'):>10}{row['iterations']:>7}  {row['terminated_by']}"
        )
    (out / "summary.txt").write_text("\n".join(lines) + "\n")
    print("\n".join(lines))
    return EXIT_OK


# -- parser -----------------------------------------------------------------

def _add_solver_flags(p):
    g = p.add_argument_group("solver")
    g.add_argument("--gamma", type=float)
    g.add_argument("--alpha", type=float)
    g.add_argument("--mu", type=float)
    g.add_argument("--max-iters", type=int)
    g.add_argument("--tol", type=float)
    g.add_argument("--nuclear-weight", type=float, choices=[0.0, 1.0])


def _add_frame_flags(p, name="frame"):
    p.add_argument(f"--{name}", help="LRJS file holding the RF frame")
    p.add_argument("--fc", type=float, help="center frequency in Hz (default 3.5e6)")
    p.add_argument("--fs", type=float, help="sampling frequency in Hz (default 25e6)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lrjs", description=__doc__.split("\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("generate", help="write a synthetic or phantom RF frame")
    p.add_argument("--config")
    p.add_argument("--kind", choices=["synthetic", "phantom"])
    p.add_argument("--spec", help="phantom key=value file")
    p.add_argument("--m", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--rank", type=int)
    p.add_argument("--ksparse", type=int)
    p.add_argument("--fc", type=float)
    p.add_argument("--fs", type=float)
    p.add_argument("--rms", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("sample", help="draw a sampling pattern and measurements")
    p.add_argument("--config")
    _add_frame_flags(p)
    p.add_argument("--sr", type=float)
    p.add_argument("--scheme", choices=[s.value for s in Scheme])
    p.add_argument("--seed", type=int)
    p.add_argument("--sigma", type=float)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("recover", help="sample a frame and reconstruct it")
    p.add_argument("--config")
    _add_frame_flags(p)
    p.add_argument("--sr", type=float)
    p.add_argument("--pattern", help="LRJS 0/1 mask instead of --sr")
    p.add_argument("--scheme", choices=[s.value for s in Scheme])
    p.add_argument("--seed", type=int)
    p.add_argument("--sigma", type=float)
    _add_solver_flags(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_recover)

    p = sub.add_parser("evaluate", help="B-mode images and metrics for a reconstruction")
    p.add_argument("--config")
    p.add_argument("--reference")
    p.add_argument("--reconstruction")
    p.add_argument("--fc", type=float)
    p.add_argument("--fs", type=float)
    p.add_argument("--regions", help="target;background, each r0,c0,rows,cols")
    p.add_argument("--dynamic-range", type=float)
    p.add_argument("--summary", help="summary.cfg written by recover")
    p.add_argument("--out")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("sweep", help="recover over sampling rates and model variants")
    p.add_argument("--config")
    _add_frame_flags(p)
    p.add_argument("--sr-list")
    p.add_argument("--modes", help="comma list of full,sparse")
    p.add_argument("--scheme", choices=[s.value for s in Scheme])
    p.add_argument("--seed", type=int)
    p.add_argument("--sigma", type=float)
    p.add_argument("--regions")
    p.add_argument("--dynamic-range", type=float)
    p.add_argument("--jobs", type=int)
    _add_solver_flags(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"lrjs {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError) as exc:
        # includes malformed LRJS files (LrjsFormatError is a ValueError)
        print(f"lrjs {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
