"""Perturbation: removal heuristics, reinsertion, route-count and fleet mutation.

Vertices are removed one at a time and immediately reinserted. A reinserted
vertex may not end up next to either of its former neighbors unless no other
position exists.
"""

from __future__ import annotations

import enum
import random
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .model import Instance, Variant
from .solution import Route, Solution

Position = Tuple[int, int]  # (route index, insertion index in route.customers)


class RemovalKind(enum.Enum):
    CONCENTRIC = "concentric"
    RANDOM = "random"
    SEQUENCE = "sequence"


class InsertionKind(enum.Enum):
    BY_DISTANCE = "distance"
    BY_COST = "cost"


ForbiddenAdjacency = Dict[int, Tuple[int, int]]


def _clamp(omega: int, n: int) -> int:
    return max(1, min(int(omega), n))


def _detach(solution: Solution, v: int, forbidden: Optional[ForbiddenAdjacency]) -> int:
    k, pred, succ = solution.remove(v)
    if forbidden is not None:
        forbidden[v] = (pred, succ)
    return k


# --- insertion ---------------------------------------------------------------

def candidate_positions(solution: Solution, v: int,
                        forbidden: Optional[ForbiddenAdjacency] = None) -> List[Position]:
    """Insertion positions for ``v`` avoiding its former neighbors.

    Falls back to every position when the restriction leaves nothing.
    """
    banned = forbidden.get(v) if forbidden else None
    every: List[Position] = []
    allowed: List[Position] = []
    for k, route in enumerate(solution.routes):
        seq = route.customers
        left = 0
        for p in range(len(seq) + 1):
            right = seq[p] if p < len(seq) else 0
            every.append((k, p))
            if banned is None or (left not in banned and right not in banned):
                allowed.append((k, p))
            left = right
    return allowed if allowed else every


def _endpoints(solution: Solution, pos: Position) -> Tuple[int, int]:
    k, p = pos
    seq = solution.routes[k].customers
    left = seq[p - 1] if p > 0 else 0
    right = seq[p] if p < len(seq) else 0
    return left, right


def insert_by_distance(solution: Solution, v: int, positions: Sequence[Position]) -> Position:
    """Insert ``v`` right after the candidate vertex closest to it."""
    if not positions:
        raise ValueError("no insertion positions")
    d = solution.instance.dist_rows[v]
    best = None
    best_d = float("inf")
    for pos in positions:
        left, _ = _endpoints(solution, pos)
        if d[left] < best_d:
            best_d = d[left]
            best = pos
    solution.insert(v, *best)
    return best


def insert_by_cost(solution: Solution, v: int, positions: Sequence[Position]) -> Position:
    """Insert ``v`` where the detour, priced at the route's unit cost, is least."""
    if not positions:
        raise ValueError("no insertion positions")
    inst = solution.instance
    d = inst.dist_rows
    dv = d[v]
    best = None
    best_c = float("inf")
    for pos in positions:
        left, right = _endpoints(solution, pos)
        r = inst.vehicle_types[solution.routes[pos[0]].vehicle_type].unit_cost
        c = r * (dv[left] + dv[right] - d[left][right])
        if c < best_c:
            best_c = c
            best = pos
    solution.insert(v, *best)
    return best


INSERTIONS: Dict[InsertionKind, Callable] = {
    InsertionKind.BY_DISTANCE: insert_by_distance,
    InsertionKind.BY_COST: insert_by_cost,
}


def reinsert(solution: Solution, v: int, insertion: InsertionKind,
             forbidden: Optional[ForbiddenAdjacency] = None) -> Position:
    """Insert ``v`` by ``insertion`` over :func:`candidate_positions`.

    Same choice as ``INSERTIONS[insertion](solution, v, candidate_positions(...))``
    but scored in a single pass.
    """
    inst = solution.instance
    d = inst.dist_rows
    dv = d[v]
    by_cost = insertion is InsertionKind.BY_COST
    banned = forbidden.get(v) if forbidden else None
    best = best_any = None
    best_c = best_any_c = float("inf")
    for k, route in enumerate(solution.routes):
        seq = route.customers
        r = inst.vehicle_types[route.vehicle_type].unit_cost
        left = 0
        for p in range(len(seq) + 1):
            right = seq[p] if p < len(seq) else 0
            if by_cost:
                c = r * (dv[left] + dv[right] - d[left][right])
            else:
                c = dv[left]
            if banned is None or (left not in banned and right not in banned):
                if c < best_c:
                    best_c = c
                    best = (k, p)
            elif c < best_any_c:
                best_any_c = c
                best_any = (k, p)
            left = right
    if best is None:
        best = best_any
    if best is None:
        raise ValueError("no insertion positions")
    solution.insert(v, *best)
    return best


# --- removal -----------------------------------------------------------------

def concentric_targets(solution: Solution, omega: int, rng: random.Random,
                       center: Optional[int] = None) -> List[int]:
    """A random customer (or ``center``) and its ``omega - 1`` nearest customers."""
    inst = solution.instance
    omega = _clamp(omega, inst.n)
    if center is None:
        center = rng.randint(1, inst.n)
    return [center] + inst.by_distance[center][:omega - 1]


def random_targets(solution: Solution, omega: int, rng: random.Random) -> List[int]:
    inst = solution.instance
    return rng.sample(range(1, inst.n + 1), _clamp(omega, inst.n))


class SequenceWalk:
    """Walks a route forward (cyclically, skipping the depot) from a random
    customer; when the route is used up it moves to another random route."""

    def __init__(self, solution: Solution, rng: random.Random,
                 keep: Optional[Route] = None, start: Optional[int] = None):
        self.rng = rng
        self.keep = keep
        self.route: Optional[Route] = None
        self.pending: List[int] = []
        if start is None:
            start = self.rng.randint(1, solution.instance.n)
        self._start(solution, start)

    def _start(self, solution: Solution, v: int) -> None:
        k, p = solution.where[v]
        self.route = solution.routes[k]
        seq = self.route.customers
        self.pending = seq[p:] + seq[:p]
        self.pending.reverse()

    def _next_route(self, solution: Solution) -> None:
        others = [r for r in solution.routes if r.customers and r is not self.route]
        if not others:
            others = [r for r in solution.routes if r.customers]
        route = others[self.rng.randrange(len(others))]
        start = route.customers[self.rng.randrange(len(route.customers))]
        self._start(solution, start)

    def next(self, solution: Solution) -> int:
        if not self.pending:
            self._next_route(solution)
        return self.pending.pop()

    def after_removal(self, solution: Solution) -> None:
        route = self.route
        if not route.customers and route is not self.keep and solution.m > 1:
            solution.delete_route(solution.routes.index(route))


def remove_concentric(solution: Solution, omega: int, rng: random.Random,
                      forbidden: Optional[ForbiddenAdjacency] = None,
                      center: Optional[int] = None) -> List[int]:
    removed = concentric_targets(solution, omega, rng, center)
    for v in removed:
        _detach(solution, v, forbidden)
    return removed


def remove_random(solution: Solution, omega: int, rng: random.Random,
                  forbidden: Optional[ForbiddenAdjacency] = None) -> List[int]:
    removed = random_targets(solution, omega, rng)
    for v in removed:
        _detach(solution, v, forbidden)
    return removed


def remove_sequence(solution: Solution, omega: int, rng: random.Random,
                    forbidden: Optional[ForbiddenAdjacency] = None,
                    start: Optional[int] = None) -> List[int]:
    """Remove ``omega`` route-consecutive customers, deleting emptied routes."""
    omega = _clamp(omega, solution.instance.n)
    walk = SequenceWalk(solution, rng, start=start)
    removed = []
    for _ in range(omega):
        v = walk.next(solution)
        _detach(solution, v, forbidden)
        removed.append(v)
        route = walk.route
        if not route.customers:
            solution.delete_route(solution.routes.index(route))
            if len(removed) < omega:
                walk.pending = []
    return removed


# --- fleet and route-count mutation ----------------------------------------

def type_probabilities(solution: Solution) -> List[float]:
    """P(t) = (routes of type t + 1) / (m + h)."""
    h = solution.instance.h
    counts = [0] * h
    for r in solution.routes:
        counts[r.vehicle_type] += 1
    total = solution.m + h
    return [(c + 1) / total for c in counts]


def _sample_type(solution: Solution, rng: random.Random) -> int:
    h = solution.instance.h
    counts = [1] * h
    for r in solution.routes:
        counts[r.vehicle_type] += 1
    return rng.choices(range(h), weights=counts)[0]


def new_route_type(solution: Solution, rng: random.Random) -> Optional[int]:
    """Vehicle type for a freshly opened route, or None if the fleet is exhausted."""
    inst = solution.instance
    if inst.variant.limited_fleet:
        used = [0] * inst.h
        for r in solution.routes:
            used[r.vehicle_type] += 1
        free = [t for t, vt in enumerate(inst.vehicle_types) if used[t] < vt.count]
        if not free:
            return None
        return free[rng.randrange(len(free))]
    return _sample_type(solution, rng)


def mutate_route_count(solution: Solution, alpha: float, m_lo: int, m_hi: int,
                       insertion: InsertionKind, rng: random.Random) -> Optional[Route]:
    """With probability ``alpha`` add an empty route or dissolve a random one.

    Returns the new empty route when one was added.
    """
    if rng.random() >= alpha:
        return None
    m = solution.m
    can_up = m + 1 <= m_hi
    can_down = m - 1 >= m_lo and m >= 2
    if can_up and can_down:
        up = rng.random() < 0.5
    elif can_up or can_down:
        up = can_up
    else:
        return None
    if up:
        t = new_route_type(solution, rng)
        if t is None:
            return None
        k = solution.add_route(t)
        return solution.routes[k]
    k = rng.randrange(m)
    orphans = solution.routes[k].customers[:]
    for v in orphans:
        solution.remove(v)
    solution.delete_route(k)
    for v in orphans:
        reinsert(solution, v, insertion)
    return None


def mutate_fleet(solution: Solution, alpha: float, variant: Variant,
                 rng: random.Random) -> None:
    """With probability ``alpha`` change the vehicle types of two random routes.

    Limited fleets swap the two types; unlimited fleets redraw each type from
    :func:`type_probabilities`. With a single route under an unlimited fleet
    that route's type is redrawn.
    """
    if rng.random() >= alpha:
        return
    m = solution.m
    if m < 2:
        if m == 1 and not variant.limited_fleet:
            solution.set_type(0, _sample_type(solution, rng))
        return
    a, b = rng.sample(range(m), 2)
    if variant.limited_fleet:
        ta = solution.routes[a].vehicle_type
        solution.set_type(a, solution.routes[b].vehicle_type)
        solution.set_type(b, ta)
        return
    h = solution.instance.h
    weights = [1] * h
    for r in solution.routes:
        weights[r.vehicle_type] += 1
    ta, tb = rng.choices(range(h), weights=weights, k=2)
    solution.set_type(a, ta)
    solution.set_type(b, tb)


# --- the perturbation -----------------------------------------------------------

def perturb(reference: Solution, removal: RemovalKind, omega: int, alpha: float,
            m_lo: int, m_hi: int, rng: random.Random) -> Solution:
    """Perturbed copy of ``reference``; the result may violate capacities."""
    s = reference.copy()
    inst = s.instance
    omega = _clamp(omega, inst.n)
    insertion = InsertionKind.BY_DISTANCE if rng.random() < 0.5 else InsertionKind.BY_COST

    extra = mutate_route_count(s, alpha, m_lo, m_hi, insertion, rng)
    mutate_fleet(s, alpha, inst.variant, rng)

    forbidden: ForbiddenAdjacency = {}
    if removal is RemovalKind.SEQUENCE:
        walk = SequenceWalk(s, rng, keep=extra)
        for _ in range(omega):
            v = walk.next(s)
            _detach(s, v, forbidden)
            walk.after_removal(s)
            reinsert(s, v, insertion, forbidden)
    else:
        pick = concentric_targets if removal is RemovalKind.CONCENTRIC else random_targets
        for v in pick(s, omega, rng):
            _detach(s, v, forbidden)
            reinsert(s, v, insertion, forbidden)
    s.drop_empty_routes()
    return s
