import json
import random
from importlib import resources

import pytest

from ails_hfvrp.io import read_instance
from ails_hfvrp.model import Instance, Variant, VehicleType, normalize_fleet

FIXTURES = resources.files("ails_hfvrp") / "data" / "fixtures"


def make_instance(coords, demands, types, variant=Variant.FSMFD, name="t", normalize=True):
    inst = Instance(name, tuple(coords), tuple(demands),
                    tuple(VehicleType(*t) for t in types), Variant(variant))
    return normalize_fleet(inst) if normalize else inst


def random_instance(seed, n, variant=Variant.FSMFD, h=2, limited_slack=2.0):
    rng = random.Random(seed)
    coords = [(50.0, 50.0)] + [(rng.uniform(0, 100), rng.uniform(0, 100)) for _ in range(n)]
    demands = [0] + [rng.randint(1, 20) for _ in range(n)]
    total = sum(demands)
    types = []
    for k in range(h):
        cap = 40 + 40 * k
        count = max(1, int(limited_slack * total / (cap * h)) + 1)
        types.append((cap, 30 + 50 * k, 1.0 + 0.2 * k, count))
    return make_instance(coords, demands, types, variant, name=f"rand{seed}")


def oracle_manifest():
    return json.loads((FIXTURES / "oracle.json").read_text())


def load_fixture(name):
    return normalize_fleet(read_instance(FIXTURES / f"{name}.txt"))


@pytest.fixture(scope="session")
def mid50():
    return load_fixture("mid50")
