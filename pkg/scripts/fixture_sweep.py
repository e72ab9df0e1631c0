#!/usr/bin/env python3
"""Run the full analysis on the named fixtures and a few large meshes, with timings."""

from __future__ import annotations

import argparse
import time

from morse_lefschetz.fixtures import NAMED, FixtureSpec, gen_fixture
from morse_lefschetz.report import AnalyzeConfig, analyze_mesh

LARGE = [FixtureSpec("disk", 64), FixtureSpec("annulus", 64), FixtureSpec("mobius", 64),
         FixtureSpec("genus", 32, genus=2, holes=1)]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--large", action="store_true", help="also run the resolution 32/64 meshes")
    ap.add_argument("--cross-check", action="store_true")
    args = ap.parse_args()
    specs = list(NAMED.items()) + ([(s.name, s) for s in LARGE] if args.large else [])
    cfg = AnalyzeConfig(cross_check=args.cross_check)
    print(f"{'fixture':18s} {'cells':>7s} {'crit':>5s} {'secs':>7s}  verdict")
    for name, spec in specs:
        mesh, fld = gen_fixture(spec)
        t0 = time.perf_counter()
        rep = analyze_mesh(mesh, fld, cfg)
        secs = time.perf_counter() - t0
        cells = mesh.n_vertices + len(mesh.edges) + len(mesh.tris)
        c = rep["census"]
        crit = sum(c["interior"].values()) + sum(sum(b.values()) for b in c["boundary"].values())
        failed = [k for k, v in rep["verdicts"].items() if v == "fail"]
        print(f"{name:18s} {cells:7d} {crit:5d} {secs:7.2f}  "
              + ("PASS" if rep["passed"] else "FAIL " + ",".join(failed)))


if __name__ == "__main__":
    main()
