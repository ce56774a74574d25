"""Regenerate the synthetic fixtures and freeze their exact optima.

    python3 tools/make_fixtures.py [--out src/ails_hfvrp/data/fixtures]

Tiny fixtures (4-7 customers) get their optimum from the exhaustive oracle;
the 50- and 150-customer instances are for invariant and timing checks only.
"""

import argparse
import json
import random
from pathlib import Path

from ails_hfvrp.io import serialize_instance
from ails_hfvrp.model import Instance, Variant, VehicleType, normalize_fleet
from ails_hfvrp.oracle import exact_solve

VARIANTS = list(Variant)


def random_instance(name, n, h, variant, rng, spread=100):
    coords = [(spread / 2, spread / 2)] + [(rng.randint(0, spread), rng.randint(0, spread))
                                           for _ in range(n)]
    demands = [0] + [rng.randint(1, 10) for _ in range(n)]
    total = sum(demands)
    base = max(max(demands), rng.randint(total // 4, total // 2))
    types = []
    for k in range(h):
        cap = base * (1 + k) + rng.randint(0, 3)
        fixed = round(cap * rng.uniform(1.5, 3.0))
        unit = round(1.0 + 0.3 * k + rng.uniform(0, 0.2), 2)
        types.append([cap, fixed, unit, 0])
    # limited fleets: enough capacity in total, but not much to spare
    while True:
        for t in types:
            t[3] = rng.randint(1, 2)
        if sum(t[0] * t[3] for t in types) >= 1.2 * total:
            break
    fleet = tuple(VehicleType(*t) for t in types)
    return Instance(name, tuple(coords), tuple(demands), fleet, variant)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", type=Path,
                    default=Path(__file__).resolve().parents[1] / "src/ails_hfvrp/data/fixtures")
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    manifest = {}
    rng = random.Random(20240611)
    for k in range(25):
        variant = VARIANTS[k % 5]
        n = 4 + k % 4
        h = 2 + (k // 5) % 2
        name = f"tiny{k + 1:02d}"
        while True:
            inst = random_instance(name, n, h, variant, rng)
            try:
                cost, _ = exact_solve(normalize_fleet(inst))
                break
            except RuntimeError:
                continue
        path = args.out / f"{name}.txt"
        path.write_text(serialize_instance(inst))
        manifest[name] = {"file": path.name, "variant": variant.value, "n": n, "h": h,
                          "optimum": cost}
        print(f"{name} {variant.value:6s} n={n} h={h} optimum={cost:.6f}")
    for name, n, variant in (("mid50", 50, Variant.FSMFD), ("large150", 150, Variant.HVRPFD)):
        inst = random_instance(name, n, 3, variant, random.Random(n))
        (args.out / f"{name}.txt").write_text(serialize_instance(inst))
    (args.out / "oracle.json").write_text(json.dumps(manifest, indent=1, sort_keys=True) + "\n")


if __name__ == "__main__":
    main()
