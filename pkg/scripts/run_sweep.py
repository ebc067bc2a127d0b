#!/usr/bin/env python3
"""Error vs sampling rate on the standard synthetic instance, over several seeds.

Writes one CSV row per (instance seed, mode, sr). Example:

    python3 scripts/run_sweep.py --seeds 1 2 3 --sr 0.05 0.1 0.2 0.3 --out sweep.csv
"""

import argparse
import csv
import sys

from lrjs.model import Scheme, SolverConfig
from lrjs.pipeline import MODES, recover
from lrjs.imaging import relative_error
from lrjs.synth import standard_instance


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, nargs="+", default=[1, 2, 3, 4])
    ap.add_argument("--sr", type=float, nargs="+", default=[0.05, 0.1, 0.2, 0.3])
    ap.add_argument("--modes", nargs="+", default=list(MODES), choices=list(MODES))
    ap.add_argument("--scheme", default=Scheme.UNIFORM_PER_CHANNEL.value,
                    choices=[s.value for s in Scheme])
    ap.add_argument("--max-iters", type=int, default=1000)
    ap.add_argument("--out", default="-")
    args = ap.parse_args(argv)

    fh = sys.stdout if args.out == "-" else open(args.out, "w", newline="")
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["seed", "mode", "sr", "scheme", "relative_error", "iterations", "terminated_by"])
    for seed in args.seeds:
        x, _ = standard_instance(seed=seed)
        for mode in args.modes:
            cfg = SolverConfig(max_iters=args.max_iters, nuclear_weight=MODES[mode])
            for sr in args.sr:
                res = recover(x, cfg, sr=sr, scheme=args.scheme, seed=seed)
                w.writerow([seed, mode, sr, args.scheme, f"{relative_error(res.frame, x):.4e}",
                            res.trace.iterations, res.trace.terminated_by.value])
                fh.flush()
    if fh is not sys.stdout:
        fh.close()


if __name__ == "__main__":
    main()
