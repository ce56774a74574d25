"""Routes, solutions, the objective and the edge-set distance between solutions."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .model import Instance

Edge = Tuple[int, int]

COST_TOL = 1e-6


class Route:
    """A closed tour from the depot served by one vehicle type.

    ``customers`` holds the interior of the tour; the depot is implicit at
    both ends. ``load`` and ``length`` are caches kept in step with it.
    """

    __slots__ = ("vehicle_type", "customers", "load", "length")

    def __init__(self, vehicle_type: int, customers: Iterable[int] = (),
                 instance: Optional[Instance] = None):
        self.vehicle_type = vehicle_type
        self.customers: List[int] = list(customers)
        self.load = 0.0
        self.length = 0.0
        if instance is not None:
            self.refresh(instance)

    def refresh(self, instance: Instance) -> None:
        self.load = float(sum(instance.demands[c] for c in self.customers))
        self.length = tour_length(self.customers, instance.dist_rows)

    def copy(self) -> "Route":
        r = Route(self.vehicle_type)
        r.customers = self.customers[:]
        r.load = self.load
        r.length = self.length
        return r

    def __len__(self) -> int:
        return len(self.customers)

    def __repr__(self) -> str:
        return f"Route(type={self.vehicle_type}, customers={self.customers})"


def tour_length(customers: Sequence[int], d) -> float:
    prev = 0
    total = 0.0
    for c in customers:
        total += d[prev][c]
        prev = c
    return total + d[prev][0]


def route_cost(route: Route, instance: Instance) -> float:
    """Cost of operating ``route``: fixed cost plus unit cost times length.

    This is the vehicle's cost even when the route is empty; the solution
    objective only counts routes that serve customers.
    """
    vt = instance.vehicle_types[route.vehicle_type]
    return vt.fixed_cost + vt.unit_cost * route.length


def objective_term(route: Route, instance: Instance) -> float:
    if not route.customers:
        return 0.0
    return route_cost(route, instance)


class Solution:
    """A set of routes over one instance with cached cost and membership.

    ``where[c]`` is ``(route index, position)`` of customer ``c`` or ``None``
    while ``c`` is detached (during perturbation).
    """

    def __init__(self, instance: Instance, routes: Iterable[Route] = ()):
        self.instance = instance
        self.routes: List[Route] = list(routes)
        self.where: List[Optional[Tuple[int, int]]] = [None] * (instance.n + 1)
        self.cost = 0.0
        self.reindex()
        self.cost = self.recompute_cost()

    @classmethod
    def from_lists(cls, instance: Instance, routes: Sequence[Sequence[int]],
                   types: Sequence[int]) -> "Solution":
        return cls(instance, [Route(t, r, instance) for r, t in zip(routes, types)])

    def copy(self) -> "Solution":
        s = Solution.__new__(Solution)
        s.instance = self.instance
        s.routes = [r.copy() for r in self.routes]
        s.where = self.where[:]
        s.cost = self.cost
        return s

    @property
    def m(self) -> int:
        return len(self.routes)

    def reindex(self, start: int = 0) -> None:
        for k in range(start, len(self.routes)):
            for p, c in enumerate(self.routes[k].customers):
                self.where[c] = (k, p)

    def recompute_cost(self) -> float:
        return sum(objective_term(r, self.instance) for r in self.routes)

    def refresh(self) -> None:
        """Rebuild every cache from the route sequences."""
        for r in self.routes:
            r.refresh(self.instance)
        self.where = [None] * (self.instance.n + 1)
        self.reindex()
        self.cost = self.recompute_cost()

    def neighbors_of(self, c: int) -> Tuple[int, int]:
        k, p = self.where[c]
        seq = self.routes[k].customers
        pred = seq[p - 1] if p > 0 else 0
        succ = seq[p + 1] if p + 1 < len(seq) else 0
        return pred, succ

    def remove(self, c: int) -> Tuple[int, int, int]:
        """Detach customer ``c``; returns (route index, former pred, former succ)."""
        k, p = self.where[c]
        route = self.routes[k]
        seq = route.customers
        d = self.instance.dist_rows
        pred = seq[p - 1] if p > 0 else 0
        succ = seq[p + 1] if p + 1 < len(seq) else 0
        old = objective_term(route, self.instance)
        del seq[p]
        route.load -= self.instance.demands[c]
        if seq:
            route.length += d[pred][succ] - d[pred][c] - d[c][succ]
        else:
            route.length = 0.0
            route.load = 0.0
        self.cost += objective_term(route, self.instance) - old
        self.where[c] = None
        for q in range(p, len(seq)):
            self.where[seq[q]] = (k, q)
        return k, pred, succ

    def insert(self, c: int, k: int, p: int) -> None:
        """Insert customer ``c`` into route ``k`` so it lands at position ``p``."""
        route = self.routes[k]
        seq = route.customers
        d = self.instance.dist_rows
        pred = seq[p - 1] if p > 0 else 0
        succ = seq[p] if p < len(seq) else 0
        old = objective_term(route, self.instance)
        seq.insert(p, c)
        route.load += self.instance.demands[c]
        route.length += d[pred][c] + d[c][succ] - d[pred][succ]
        self.cost += objective_term(route, self.instance) - old
        for q in range(p, len(seq)):
            self.where[seq[q]] = (k, q)

    def add_route(self, vehicle_type: int) -> int:
        self.routes.append(Route(vehicle_type))
        return len(self.routes) - 1

    def delete_route(self, k: int) -> None:
        route = self.routes[k]
        if route.customers:
            raise ValueError(f"route {k} still serves customers")
        del self.routes[k]
        self.reindex(k)

    def set_type(self, k: int, vehicle_type: int) -> None:
        route = self.routes[k]
        old = objective_term(route, self.instance)
        route.vehicle_type = vehicle_type
        self.cost += objective_term(route, self.instance) - old

    def drop_empty_routes(self) -> None:
        if all(r.customers for r in self.routes):
            return
        self.routes = [r for r in self.routes if r.customers]
        self.reindex()

    def type_counts(self) -> List[int]:
        counts = [0] * self.instance.h
        for r in self.routes:
            if r.customers:
                counts[r.vehicle_type] += 1
        return counts

    def as_lists(self) -> List[List[int]]:
        return [r.customers[:] for r in self.routes]

    def __repr__(self) -> str:
        return f"Solution(m={self.m}, cost={self.cost:.4f})"


def total_cost(solution: Solution, instance: Optional[Instance] = None) -> float:
    """Objective recomputed from scratch: every non-empty route's cost."""
    instance = instance or solution.instance
    d = instance.dist_rows
    total = 0.0
    for r in solution.routes:
        if r.customers:
            vt = instance.vehicle_types[r.vehicle_type]
            total += vt.fixed_cost + vt.unit_cost * tour_length(r.customers, d)
    return total


@dataclass
class Feasibility:
    overloads: Dict[int, float] = field(default_factory=dict)
    count_excess: Dict[int, int] = field(default_factory=dict)

    @property
    def feasible(self) -> bool:
        return not self.overloads and not self.count_excess

    def __bool__(self) -> bool:
        return self.feasible


def is_feasible(solution: Solution, instance: Optional[Instance] = None) -> Feasibility:
    instance = instance or solution.instance
    report = Feasibility()
    for k, r in enumerate(solution.routes):
        load = sum(instance.demands[c] for c in r.customers)
        cap = instance.vehicle_types[r.vehicle_type].capacity
        if load > cap + 1e-9:
            report.overloads[k] = load - cap
    for t, used in enumerate(solution.type_counts()):
        limit = instance.vehicle_types[t].count
        if used > limit:
            report.count_excess[t] = used - limit
    return report


def violation(solution: Solution) -> float:
    """Overload summed over routes plus fleet excess weighted by total demand."""
    inst = solution.instance
    over = sum(max(0.0, r.load - inst.vehicle_types[r.vehicle_type].capacity)
               for r in solution.routes)
    excess = sum(max(0, used - inst.vehicle_types[t].count)
                 for t, used in enumerate(solution.type_counts()))
    return over + inst.total_demand * excess


def edge_set(solution: Solution) -> FrozenSet[Edge]:
    edges = set()
    for r in solution.routes:
        prev = 0
        for c in r.customers:
            edges.add((prev, c) if prev < c else (c, prev))
            prev = c
        if r.customers:
            edges.add((0, prev))
    return frozenset(edges)


def solution_distance(a: Solution, b: Solution) -> int:
    """Number of undirected edges used by exactly one of the two solutions."""
    return len(edge_set(a) ^ edge_set(b))


def validate(solution: Solution, instance: Optional[Instance] = None) -> List[str]:
    """Structural diagnostics; an empty list means the solution is consistent."""
    instance = instance or solution.instance
    problems = []
    seen: Dict[int, int] = {}
    for k, r in enumerate(solution.routes):
        if not 0 <= r.vehicle_type < instance.h:
            problems.append(f"route {k}: unknown vehicle type {r.vehicle_type}")
        for p, c in enumerate(r.customers):
            if not 1 <= c <= instance.n:
                problems.append(f"route {k}: invalid vertex {c}")
                continue
            if c in seen:
                problems.append(f"duplicate customer {c} in routes {seen[c]} and {k}")
            else:
                seen[c] = k
            if solution.where[c] != (k, p):
                problems.append(f"membership index stale for customer {c}: "
                                f"{solution.where[c]} != {(k, p)}")
        load = sum(instance.demands[c] for c in r.customers if 1 <= c <= instance.n)
        if abs(load - r.load) > 1e-9 * max(1.0, abs(load)):
            problems.append(f"route {k}: load cache drift ({r.load} vs {load})")
        length = tour_length([c for c in r.customers if 0 <= c <= instance.n],
                             instance.dist_rows)
        if abs(length - r.length) > COST_TOL:
            problems.append(f"route {k}: length cache drift ({r.length} vs {length})")
    missing = [c for c in range(1, instance.n + 1) if c not in seen]
    if missing:
        problems.append(f"customers not served: {missing}")
    expected = total_cost(solution, instance)
    if abs(expected - solution.cost) > COST_TOL:
        problems.append(f"cost cache drift ({solution.cost} vs {expected})")
    return problems
