"""Randomized initial solution: seed routes, greedy insertion, then repair."""

from __future__ import annotations

import random
from typing import Optional

import numpy as np

from .model import Instance, max_routes, min_routes
from .perturb import insert_by_distance, new_route_type
from .search import feasibility
from .solution import Solution, is_feasible

MAX_ATTEMPTS = 1000


class InfeasibleInstance(RuntimeError):
    """No feasible starting solution could be built."""


def build_initial(instance: Instance, rng: random.Random,
                  neighbors: Optional[np.ndarray] = None,
                  max_attempts: int = MAX_ATTEMPTS) -> Solution:
    """Seed ``min_routes`` single-customer routes with available vehicle types,
    insert the remaining customers in random order next to their nearest
    placed vertex (capacity ignored), and repair. Retries until feasible."""
    if neighbors is None:
        from .model import build_neighbors
        neighbors = build_neighbors(instance.dist, instance.n)
    m_lo = min_routes(instance)
    m_hi = max_routes(instance)
    for _ in range(max_attempts):
        pending = list(range(1, instance.n + 1))
        s = Solution(instance)
        for _ in range(m_lo):
            t = new_route_type(s, rng) if instance.variant.limited_fleet \
                else rng.randrange(instance.h)
            if t is None or not pending:
                break
            v = pending.pop(rng.randrange(len(pending)))
            k = s.add_route(t)
            s.insert(v, k, 0)
        if not s.routes:
            s.add_route(rng.randrange(instance.h))
        rng.shuffle(pending)
        for v in pending:
            positions = [(k, p) for k, r in enumerate(s.routes)
                         for p in range(len(r.customers) + 1)]
            insert_by_distance(s, v, positions)
        s.drop_empty_routes()
        feasibility(s, neighbors=neighbors, max_routes=m_hi, rng=rng,
                    new_route_type=new_route_type)
        if is_feasible(s):
            return s
    raise InfeasibleInstance(
        f"no feasible initial solution for {instance.name} after {max_attempts} attempts")
