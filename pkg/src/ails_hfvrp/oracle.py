"""Exhaustive solver for tiny instances, used as ground truth in tests.

Customers are split into every set partition (restricted-growth strings),
each block is routed optimally by trying all orderings, and vehicle types are
assigned to blocks by a memoized search that respects the fleet limits.
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .model import Instance, max_routes
from .solution import Solution, tour_length, total_cost

MAX_CUSTOMERS = 8


def set_partitions(n: int) -> Iterator[List[int]]:
    """Restricted-growth strings of length ``n``: a[0] = 0, a[i] <= max(a[:i]) + 1."""
    if n == 0:
        yield []
        return
    a = [0] * n
    top = [0] * n  # top[i] = max(a[:i + 1])
    while True:
        yield a[:]
        i = n - 1
        while i > 0 and a[i] > top[i - 1]:
            i -= 1
        if i == 0:
            return
        a[i] += 1
        top[i] = max(top[i - 1], a[i])
        for j in range(i + 1, n):
            a[j] = 0
            top[j] = top[i]


def best_tour(customers: Sequence[int], dist_rows) -> Tuple[float, Tuple[int, ...]]:
    """Shortest closed tour from the depot through ``customers``.

    Orderings and their reversals have the same length, so only orderings
    whose first customer is smaller than the last are tried.
    """
    customers = tuple(customers)
    if len(customers) <= 2:
        return tour_length(customers, dist_rows), customers
    best_len = float("inf")
    best = customers
    for perm in itertools.permutations(customers):
        if perm[0] > perm[-1]:
            continue
        length = tour_length(perm, dist_rows)
        if length < best_len:
            best_len = length
            best = perm
    return best_len, best


def exact_solve(instance: Instance) -> Tuple[float, Solution]:
    """Optimal (cost, solution) of a fleet-normalized instance with n <= 8.

    Raises ValueError for larger instances and RuntimeError when no feasible
    solution exists.
    """
    n = instance.n
    if n > MAX_CUSTOMERS:
        raise ValueError(f"exact_solve handles at most {MAX_CUSTOMERS} customers, got {n}")
    types = instance.vehicle_types
    d = instance.dist_rows
    demands = instance.demands
    limited = instance.variant.limited_fleet
    m_hi = max_routes(instance)

    tours: Dict[int, Tuple[float, Tuple[int, ...]]] = {}

    def block_tour(mask: int) -> Tuple[float, Tuple[int, ...]]:
        hit = tours.get(mask)
        if hit is None:
            members = [c for c in range(1, n + 1) if mask >> (c - 1) & 1]
            hit = tours[mask] = best_tour(members, d)
        return hit

    def block_costs(mask: int) -> List[Optional[float]]:
        length, _ = block_tour(mask)
        load = sum(demands[c] for c in range(1, n + 1) if mask >> (c - 1) & 1)
        return [vt.fixed_cost + vt.unit_cost * length if load <= vt.capacity else None
                for vt in types]

    costs_cache: Dict[int, List[Optional[float]]] = {}

    def costs_of(mask: int) -> List[Optional[float]]:
        hit = costs_cache.get(mask)
        if hit is None:
            hit = costs_cache[mask] = block_costs(mask)
        return hit

    def assign(masks: Tuple[int, ...]) -> Tuple[float, Tuple[int, ...]]:
        """Cheapest type per block within the fleet limits."""
        if not limited:
            total = 0.0
            chosen = []
            for mask in masks:
                options = [(c, t) for t, c in enumerate(costs_of(mask)) if c is not None]
                if not options:
                    return float("inf"), ()
                c, t = min(options)
                total += c
                chosen.append(t)
            return total, tuple(chosen)

        @lru_cache(maxsize=None)
        def search(k: int, left: Tuple[int, ...]) -> Tuple[float, Tuple[int, ...]]:
            if k == len(masks):
                return 0.0, ()
            best = (float("inf"), ())
            for t, c in enumerate(costs_of(masks[k])):
                if c is None or left[t] == 0:
                    continue
                rest = left[:t] + (left[t] - 1,) + left[t + 1:]
                sub_cost, sub_types = search(k + 1, rest)
                if c + sub_cost < best[0]:
                    best = (c + sub_cost, (t,) + sub_types)
            return best

        return search(0, tuple(vt.count for vt in types))

    best_cost = float("inf")
    best_plan = None
    for labels in set_partitions(n):
        blocks = max(labels) + 1
        if blocks > m_hi:
            continue
        masks = [0] * blocks
        for c, b in enumerate(labels, start=1):
            masks[b] |= 1 << (c - 1)
        cost, chosen = assign(tuple(masks))
        if cost < best_cost:
            best_cost = cost
            best_plan = (tuple(masks), chosen)

    if best_plan is None:
        raise RuntimeError(f"instance {instance.name} has no feasible solution")
    masks, chosen = best_plan
    routes = [list(block_tour(mask)[1]) for mask in masks]
    solution = Solution.from_lists(instance, routes, list(chosen))
    return total_cost(solution), solution
