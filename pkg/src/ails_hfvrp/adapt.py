"""Perturbation-degree control and the threshold acceptance criterion."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Deque


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


@dataclass
class HeuristicStats:
    """Adaptive state of one removal heuristic.

    ``omega`` is kept as a real so repeated small corrections accumulate;
    :meth:`degree` gives the integer number of vertices to remove.
    """
    omega: float
    distance_sum: float = 0.0
    uses: int = 0

    def degree(self, n: int) -> int:
        return min(n, max(1, round_half_up(self.omega)))


def record_and_adjust(stats: HeuristicStats, d_observed: float, d_beta: float,
                      gamma: int, n: int) -> HeuristicStats:
    """Accumulate the observed distance; every ``gamma`` uses rescale omega.

    omega <- min(n, max(1, omega * d_beta / d_avg)), where d_avg is the mean
    distance over the last ``gamma`` uses. A zero mean counts as 1.
    """
    if d_observed < 0:
        raise ValueError("distance must be non-negative")
    stats.distance_sum += d_observed
    stats.uses += 1
    if stats.uses >= gamma:
        d_avg = stats.distance_sum / stats.uses
        if d_avg == 0:
            d_avg = 1.0
        stats.omega = min(float(n), max(1.0, stats.omega * d_beta / d_avg))
        stats.distance_sum = 0.0
        stats.uses = 0
    return stats


@dataclass
class AcceptState:
    eta: float
    window_size: int
    mean: float = 0.0
    it: int = 0
    window: Deque[float] = field(default_factory=deque)

    def __post_init__(self):
        if self.window_size < 1:
            raise ValueError("window size must be at least 1")
        self.window = deque(self.window, maxlen=self.window_size)

    @property
    def recent_best(self) -> float:
        return min(self.window)


def update_average(state: AcceptState, f: float) -> AcceptState:
    """Fold a local-optimum objective into the running mean and window."""
    if not math.isfinite(f):
        raise ValueError("objective must be finite")
    state.it += 1
    lam = state.window_size
    if state.it <= lam:
        state.mean = (state.mean * (state.it - 1) + f) / state.it
    else:
        state.mean = state.mean * (1.0 - 1.0 / lam) + f / lam
    state.window.append(f)
    return state


def threshold(state: AcceptState) -> float:
    if state.it < 1:
        raise ValueError("threshold needs at least one recorded objective")
    low = state.recent_best
    return low + state.eta * (state.mean - low)


def accept(state: AcceptState, f: float) -> bool:
    return f <= threshold(state)
