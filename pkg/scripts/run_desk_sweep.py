#!/usr/bin/env python3
"""Desk-scale convergence sweeps for the three derivative families.

Writes one CSV per (law, scheme) cell into --outdir.  The default grid tops
out at n = 1600, which keeps the dense eigenvalue cost around ten minutes on
a laptop; pass --full for n = 3200 if you have the patience.
"""
import argparse
import math
import pathlib
import time

from circle_derivs.experiments import (ExperimentConfig, SzNagyRandom,
                                       rows_to_csv, run_convergence)
from circle_derivs.laws import ArcLaw, SeedSpec, UniformLaw
from circle_derivs.polys import Ordinary, Polar

CELLS = [
    ("uniform_ordinary_k1", UniformLaw(), Ordinary(), 1),
    ("uniform_ordinary_k2", UniformLaw(), Ordinary(), 2),
    ("arc_ordinary_k1", ArcLaw(0.0, math.pi), Ordinary(), 1),
    ("arc_polar3", ArcLaw(0.0, math.pi), Polar(3.0), 1),
    ("arc_sznagy", ArcLaw(0.0, math.pi), SzNagyRandom(4.0), 1),
]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--outdir", default="sweep_out")
    ap.add_argument("--seed", type=int, default=20260808)
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--target-atoms", type=int, default=1024)
    ap.add_argument("--full", action="store_true", help="extend the grid to n = 3200")
    args = ap.parse_args()

    outdir = pathlib.Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    grid = (50, 100, 200, 400, 800, 1600) + ((3200,) if args.full else ())
    seeds = tuple(SeedSpec(args.seed, s) for s in range(args.seeds))

    for name, law, scheme, k in CELLS:
        config = ExperimentConfig(law=law, scheme=scheme, k=k, n_list=grid,
                                  seeds=seeds, p_max=4,
                                  target_atoms=args.target_atoms)
        t0 = time.time()
        rows = run_convergence(config)
        path = outdir / f"{name}.csv"
        path.write_text(rows_to_csv(config, rows), encoding="utf-8")
        bad = sum(1 for r in rows if getattr(r, "error", ""))
        print(f"{name}: {len(rows)} rows ({bad} errors) in {time.time()-t0:.1f}s -> {path}")


if __name__ == "__main__":
    main()
