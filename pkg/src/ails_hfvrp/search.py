"""Local search and feasibility repair over 1-interchange and 2-opt* moves.

Both procedures use best improvement over moves that make a customer ``v``
adjacent to one of its nearest neighbors ``u`` (in another route). The scan
itself runs in :mod:`ails_hfvrp._kernels`; this module converts between
:class:`Solution` objects and the kernel's arrays.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from . import _kernels as K
from .model import Instance
from .solution import Route, Solution, violation

MAX_MOVES = 1_000_000


class MoveKind(enum.IntEnum):
    SHIFT = K.SHIFT
    SWAP = K.SWAP
    CROSS = K.CROSS
    CROSS_R = K.CROSS_R


@dataclass(frozen=True)
class Move:
    """A move between routes ``a`` and ``b``.

    Positions are 1-based customer positions (0 is the leading depot), as in
    the kernel. For SHIFT, ``pos_b`` is the position the customer follows.
    """
    kind: MoveKind
    route_a: int
    pos_a: int
    route_b: int
    pos_b: int
    delta_cost: float = 0.0
    delta_violation: float = 0.0


class _Arrays:
    """Kernel view of a solution. Built once per call; cheap for our sizes."""

    def __init__(self, solution: Solution, extra_routes: int = 0):
        inst = solution.instance
        data = instance_arrays(inst)
        self.cap, self.unit, self.fixed, self.limit, self.demand, self.dist = data
        R = solution.m + extra_routes
        self.seq = np.zeros((max(R, 1), inst.n + 2), dtype=np.int64)
        self.size = np.zeros(max(R, 1), dtype=np.int64)
        self.rtype = np.zeros(max(R, 1), dtype=np.int64)
        for k, r in enumerate(solution.routes):
            s = len(r.customers)
            self.seq[k, 1:s + 1] = r.customers
            self.size[k] = s
            self.rtype[k] = r.vehicle_type
        self.big_b = float(inst.total_demand)

    def routes(self, instance: Instance) -> List[Route]:
        out = []
        for k in range(self.seq.shape[0]):
            s = int(self.size[k])
            out.append(Route(int(self.rtype[k]), self.seq[k, 1:s + 1].tolist(), instance))
        return out


_ARRAY_CACHE: dict = {}


def instance_arrays(inst: Instance):
    key = id(inst)
    hit = _ARRAY_CACHE.get(key)
    if hit is not None and hit[0] is inst:
        return hit[1]
    vts = inst.vehicle_types
    data = (
        np.array([vt.capacity for vt in vts], dtype=np.float64),
        np.array([vt.unit_cost for vt in vts], dtype=np.float64),
        np.array([vt.fixed_cost for vt in vts], dtype=np.float64),
        np.array([vt.count for vt in vts], dtype=np.int64),
        np.asarray(inst.demands, dtype=np.float64),
        np.ascontiguousarray(inst.dist),
    )
    if len(_ARRAY_CACHE) > 64:
        _ARRAY_CACHE.clear()
    _ARRAY_CACHE[key] = (inst, data)
    return data


def _descend(solution: Solution, neighbors: np.ndarray, mode: int) -> int:
    arr = _Arrays(solution)
    work = K.workspace(arr.seq.shape[0], arr.seq.shape[1], arr.demand.shape[0],
                       arr.cap.shape[0])
    moved = K.descend(arr.seq, arr.size, arr.rtype, arr.cap, arr.unit, arr.fixed,
                      arr.limit, arr.demand, arr.dist, neighbors, mode, arr.big_b,
                      MAX_MOVES, *work)
    if moved:
        solution.routes = arr.routes(solution.instance)[:solution.m]
        solution.refresh()
    return moved


def local_search(solution: Solution, instance: Optional[Instance] = None,
                 neighbors: Optional[np.ndarray] = None) -> Solution:
    """Descend to a local optimum in place (capacity-feasible moves only)."""
    _check_neighbors(neighbors)
    _descend(solution, neighbors, K.MODE_SEARCH)
    solution.drop_empty_routes()
    return solution


def feasibility(solution: Solution, instance: Optional[Instance] = None,
                neighbors: Optional[np.ndarray] = None, max_routes: Optional[int] = None,
                rng=None, new_route_type=None) -> Solution:
    """Try to remove capacity and fleet violations, in place.

    Moves are ranked by violation change, then cost change. When no move
    helps and the solution is still infeasible, an empty route is appended
    (type chosen by ``new_route_type(solution, rng)``) while fewer than
    ``max_routes`` routes exist. The result may still be infeasible.
    """
    _check_neighbors(neighbors)
    inst = solution.instance
    if max_routes is None:
        from .model import max_routes as _mr
        max_routes = _mr(inst)
    if violation(solution) <= K.LOAD_EPS:
        return solution
    while True:
        _descend(solution, neighbors, K.MODE_REPAIR)
        if violation(solution) <= K.LOAD_EPS:
            break
        if solution.m >= max_routes or new_route_type is None:
            break
        t = new_route_type(solution, rng)
        if t is None:
            break
        solution.add_route(t)
    solution.drop_empty_routes()
    return solution


def _check_neighbors(neighbors):
    if neighbors is None:
        raise ValueError("neighbor lists are required")


# --- move-level access, used by tests and diagnostics ---------------------

def evaluate_move(solution: Solution, move: Move) -> Tuple[float, float]:
    """(delta cost, delta violation) of ``move`` as the kernel computes them."""
    arr = _Arrays(solution)
    work = K.workspace(arr.seq.shape[0], arr.seq.shape[1], arr.demand.shape[0],
                       arr.cap.shape[0])
    load, length, cum_len, cum_load, route_of, pos_of, type_count = work[:7]
    K.prepare(arr.seq, arr.size, arr.rtype, arr.demand, arr.dist, load, length, cum_len,
              cum_load, route_of, pos_of, type_count)
    dc, dv, _ = K.evaluate(int(move.kind), move.route_a, move.pos_a, move.route_b,
                           move.pos_b, arr.seq, arr.size, arr.rtype, arr.cap, arr.unit,
                           arr.fixed, arr.limit, arr.demand, arr.dist, load, length,
                           cum_len, cum_load, type_count, arr.big_b)
    return dc, dv


def apply_move(solution: Solution, move: Move) -> Solution:
    """Apply ``move`` with plain list operations and rebuild all caches."""
    ra = solution.routes[move.route_a].customers
    rb = solution.routes[move.route_b].customers
    i, j = move.pos_a, move.pos_b
    if move.kind == MoveKind.SHIFT:
        v = ra.pop(i - 1)
        rb.insert(j, v)
    elif move.kind == MoveKind.SWAP:
        ra[i - 1], rb[j - 1] = rb[j - 1], ra[i - 1]
    elif move.kind == MoveKind.CROSS:
        new_a = ra[:i] + rb[j:]
        new_b = rb[:j] + ra[i:]
        ra[:], rb[:] = new_a, new_b
    else:
        new_a = ra[:i] + rb[:j][::-1]
        new_b = ra[i:][::-1] + rb[j:]
        ra[:], rb[:] = new_a, new_b
    solution.refresh()
    return solution


def inverse_move(solution_before: Solution, move: Move) -> Move:
    """The move undoing ``move`` on the solution it produces."""
    sa = len(solution_before.routes[move.route_a].customers)
    if move.kind == MoveKind.SHIFT:
        return Move(MoveKind.SHIFT, move.route_b, move.pos_b + 1, move.route_a, move.pos_a - 1)
    if move.kind == MoveKind.SWAP:
        return move
    if move.kind == MoveKind.CROSS:
        return Move(MoveKind.CROSS, move.route_a, move.pos_a, move.route_b, move.pos_b)
    return Move(MoveKind.CROSS_R, move.route_a, move.pos_a, move.route_b, sa - move.pos_a)
