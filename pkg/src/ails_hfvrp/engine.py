"""The adaptive iterated local search loop and multi-run bookkeeping."""

from __future__ import annotations

import logging
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, List, Optional

from .adapt import AcceptState, HeuristicStats, accept, record_and_adjust, update_average
from .construct import build_initial
from .model import Instance, build_neighbors, max_routes, min_routes
from .perturb import RemovalKind, new_route_type, perturb
from .search import feasibility, local_search
from .solution import Solution, is_feasible, solution_distance, total_cost

log = logging.getLogger(__name__)

REMOVALS = (RemovalKind.CONCENTRIC, RemovalKind.RANDOM, RemovalKind.SEQUENCE)
IMPROVEMENT_TOL = 1e-6
MAX_REPAIR_RETRIES = 1000


@dataclass(frozen=True)
class Params:
    alpha: float = 0.4
    d_beta: int = 15
    eta: float = 0.2
    gamma: int = 20
    phi: int = 20
    max_no_improve: int = 40000
    seed: int = 0
    time_limit: Optional[float] = None
    max_iterations: Optional[int] = None
    trace: bool = False

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must be in [0, 1], got {self.alpha}")
        if self.d_beta < 1:
            raise ValueError(f"d_beta must be at least 1, got {self.d_beta}")
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError(f"eta must be in [0, 1], got {self.eta}")
        if self.gamma < 1:
            raise ValueError(f"gamma must be at least 1, got {self.gamma}")
        if self.phi < 1:
            raise ValueError(f"phi must be at least 1, got {self.phi}")
        if self.max_no_improve < 0:
            raise ValueError("max_no_improve must be non-negative")
        if self.time_limit is not None and self.time_limit <= 0:
            raise ValueError("time_limit must be positive")


@dataclass(frozen=True)
class TraceRecord:
    iteration: int
    cost: float
    best_cost: float
    heuristic: str
    omega: int
    accepted: bool

    def line(self) -> str:
        return (f"{self.iteration},{self.cost:.6f},{self.best_cost:.6f},"
                f"{self.heuristic},{self.omega},{int(self.accepted)}")


@dataclass
class RunResult:
    best_solution: Solution
    best_cost: float
    iterations: int
    time: float
    seed: int = 0
    trace: List[TraceRecord] = field(default_factory=list)
    diagnostic: Optional[str] = None


@dataclass
class IterationInfo:
    """Passed to the optional per-iteration callback of :func:`run`."""
    iteration: int
    heuristic: RemovalKind
    omega: int
    candidate: Solution
    reference: Solution
    best: Solution
    accepted: bool


def run(instance: Instance, params: Params = Params(),
        callback: Optional[Callable[[IterationInfo], None]] = None) -> RunResult:
    """One seeded run on a fleet-normalized instance."""
    start = time.perf_counter()
    rng = random.Random(params.seed)
    n = instance.n
    phi = max(1, min(params.phi, n))
    neighbors = build_neighbors(instance.dist, phi)
    m_lo, m_hi = min_routes(instance), max_routes(instance)

    s = build_initial(instance, rng, neighbors)
    local_search(s, neighbors=neighbors)
    reference = s
    best = s

    stats = {kind: HeuristicStats(omega=float(min(n, params.d_beta))) for kind in REMOVALS}
    acceptance = AcceptState(eta=params.eta, window_size=params.gamma)
    update_average(acceptance, reference.cost)

    trace: List[TraceRecord] = []
    diagnostic = None
    it = 0
    since_best = 0
    while since_best < params.max_no_improve:
        if params.max_iterations is not None and it >= params.max_iterations:
            break
        if params.time_limit is not None and time.perf_counter() - start >= params.time_limit:
            break
        it += 1
        for _ in range(MAX_REPAIR_RETRIES):
            kind = REMOVALS[rng.randrange(len(REMOVALS))]
            omega = stats[kind].degree(n)
            s = perturb(reference, kind, omega, params.alpha, m_lo, m_hi, rng)
            feasibility(s, neighbors=neighbors, max_routes=m_hi, rng=rng,
                        new_route_type=new_route_type)
            if is_feasible(s):
                break
        else:
            diagnostic = (f"iteration {it}: no feasible perturbation after "
                          f"{MAX_REPAIR_RETRIES} attempts")
            log.warning("%s: %s", instance.name, diagnostic)
            break

        local_search(s, neighbors=neighbors)
        record_and_adjust(stats[kind], solution_distance(s, reference), params.d_beta,
                          params.gamma, n)
        accepted = accept(acceptance, s.cost)
        if accepted:
            reference = s
        update_average(acceptance, s.cost)
        if s.cost < best.cost - IMPROVEMENT_TOL:
            best = s
            since_best = 0
        else:
            since_best += 1

        if params.trace:
            trace.append(TraceRecord(it, s.cost, best.cost, kind.value, omega, accepted))
        if callback is not None:
            callback(IterationInfo(it, kind, omega, s, reference, best, accepted))

    best_cost = total_cost(best)
    best.cost = best_cost
    return RunResult(best_solution=best, best_cost=best_cost, iterations=it,
                     time=time.perf_counter() - start, seed=params.seed, trace=trace,
                     diagnostic=diagnostic)


@dataclass
class Summary:
    results: List[RunResult]

    @property
    def best(self) -> float:
        return min(r.best_cost for r in self.results)

    @property
    def avg(self) -> float:
        return sum(r.best_cost for r in self.results) / len(self.results)

    @property
    def avg_time(self) -> float:
        return sum(r.time for r in self.results) / len(self.results)

    @property
    def best_result(self) -> RunResult:
        return min(self.results, key=lambda r: r.best_cost)


def _run_seeded(args):
    instance, params = args
    return run(instance, params)


def run_many(instance: Instance, params: Params = Params(), runs: int = 10,
             workers: int = 1) -> Summary:
    """Run with seeds ``params.seed + k`` for k in range(runs); results in run order."""
    if runs < 1:
        raise ValueError("runs must be at least 1")
    jobs = [(instance, replace(params, seed=params.seed + k)) for k in range(runs)]
    if workers > 1 and runs > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_seeded, jobs))
    else:
        results = [_run_seeded(job) for job in jobs]
    return Summary(results)
