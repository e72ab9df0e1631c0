#!/usr/bin/env python3
"""Count how often each structural invariant holds over random small meshes."""

from __future__ import annotations

import argparse
import random
from collections import Counter

from morse_lefschetz.fixtures import gen_fixture, random_spec
from morse_lefschetz.morse_model import hat_extension, verify_theorem1
from morse_lefschetz.pl_engine.extract import euler_audit, extract_morse_data, tangent_block_violations


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("-n", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    held = Counter()
    for _ in range(args.n):
        mesh, fld = gen_fixture(random_spec(rng))
        x = extract_morse_data(mesh, fld)
        d = x.data
        rv = d.remark_violations()
        held["euler audit"] += all(euler_audit(d, mesh).values())
        held["tangent boundary block"] += not tangent_block_violations(x)
        held["hat extension"] += verify_theorem1(d, hat_extension(d)).passed
        held["N- has no (- -> interior)"] += not rv["minus_into_interior"]
        held["N+ has no (interior -> +)"] += not rv["interior_into_plus"]
    for name, k in held.items():
        print(f"{name:28s} {k:4d}/{args.n}")


if __name__ == "__main__":
    main()
