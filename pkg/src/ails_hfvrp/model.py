"""Problem data for the heterogeneous fleet VRP.

Vertex 0 is the depot, customers are 1..n. Everything here is immutable once
built; the distance matrix and neighbor lists are cached on the instance.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Optional, Tuple

import numpy as np


class Variant(str, enum.Enum):
    HVRPFD = "HVRPFD"
    HVRPD = "HVRPD"
    FSMFD = "FSMFD"
    FSMF = "FSMF"
    FSMD = "FSMD"

    @property
    def limited_fleet(self) -> bool:
        return self in (Variant.HVRPFD, Variant.HVRPD)

    @property
    def fixed_costs(self) -> bool:
        return self in (Variant.HVRPFD, Variant.FSMFD, Variant.FSMF)

    @property
    def dependent_costs(self) -> bool:
        return self is not Variant.FSMF

    @classmethod
    def parse(cls, text: str) -> "Variant":
        try:
            return cls(text.strip().upper())
        except ValueError:
            names = ", ".join(v.value for v in cls)
            raise ValueError(f"unknown variant {text!r} (expected one of {names})") from None


@dataclass(frozen=True)
class VehicleType:
    capacity: float
    fixed_cost: float
    unit_cost: float
    count: int

    def __post_init__(self):
        if not self.capacity > 0:
            raise ValueError(f"capacity must be positive, got {self.capacity}")
        if self.fixed_cost < 0:
            raise ValueError(f"fixed cost must be non-negative, got {self.fixed_cost}")
        if not self.unit_cost > 0:
            raise ValueError(f"unit cost must be positive, got {self.unit_cost}")
        if self.count < 1:
            raise ValueError(f"vehicle count must be at least 1, got {self.count}")


def type_label(t: int) -> str:
    """Letter used for vehicle type ``t`` in reports (A, B, C, ...)."""
    return chr(ord("A") + t) if t < 26 else f"T{t}"


@dataclass(frozen=True)
class Instance:
    name: str
    coords: Tuple[Tuple[float, float], ...]
    demands: Tuple[float, ...]
    vehicle_types: Tuple[VehicleType, ...]
    variant: Variant
    # fleet data as read from the file, kept for reporting after normalization
    original_types: Optional[Tuple[VehicleType, ...]] = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple((float(x), float(y)) for x, y in self.coords))
        object.__setattr__(self, "demands", tuple(self.demands))
        object.__setattr__(self, "vehicle_types", tuple(self.vehicle_types))
        if len(self.coords) != len(self.demands):
            raise ValueError("coords and demands must have the same length")
        if len(self.coords) < 2:
            raise ValueError("an instance needs a depot and at least one customer")
        if not self.vehicle_types:
            raise ValueError("at least one vehicle type is required")
        if self.demands[0] != 0:
            raise ValueError("depot demand must be 0")
        max_cap = max(vt.capacity for vt in self.vehicle_types)
        for i, q in enumerate(self.demands[1:], start=1):
            if not q > 0:
                raise ValueError(f"customer {i} has non-positive demand {q}")
            if q > max_cap:
                raise ValueError(f"customer {i} demand {q} exceeds every vehicle capacity")

    @property
    def n(self) -> int:
        return len(self.coords) - 1

    @property
    def h(self) -> int:
        return len(self.vehicle_types)

    @property
    def total_demand(self) -> float:
        return float(sum(self.demands))

    @cached_property
    def dist(self) -> np.ndarray:
        return build_distances(self)

    @cached_property
    def dist_rows(self) -> list:
        """The distance matrix as nested lists, for fast scalar access."""
        return self.dist.tolist()

    @cached_property
    def by_distance(self) -> list:
        """For each vertex, all customers other than itself sorted by distance."""
        order = []
        rows = self.dist_rows
        for v in range(self.n + 1):
            row = rows[v]
            order.append(sorted((c for c in range(1, self.n + 1) if c != v),
                                key=lambda c: (row[c], c)))
        return order


def build_distances(instance: Instance) -> np.ndarray:
    xy = np.asarray(instance.coords, dtype=np.float64)
    diff = xy[:, None, :] - xy[None, :, :]
    # (a-b)^2 == (b-a)^2 in IEEE arithmetic, so the result is exactly symmetric
    return np.sqrt((diff ** 2).sum(axis=2))


def normalize_fleet(instance: Instance) -> Instance:
    """Return a copy with the fleet adjusted to the instance's variant.

    Fixed costs are zeroed when the variant has none, unit costs are set to 1
    when distances are not priced by vehicle, and unlimited variants get n
    vehicles of each type. The file's fleet is kept in ``original_types``.
    """
    variant = instance.variant
    original = instance.original_types or instance.vehicle_types
    types = []
    for vt in original:
        types.append(VehicleType(
            capacity=vt.capacity,
            fixed_cost=vt.fixed_cost if variant.fixed_costs else 0.0,
            unit_cost=vt.unit_cost if variant.dependent_costs else 1.0,
            count=vt.count if variant.limited_fleet else instance.n,
        ))
    return replace(instance, vehicle_types=tuple(types), original_types=tuple(original))


def min_routes(instance: Instance) -> int:
    max_cap = max(vt.capacity for vt in instance.vehicle_types)
    # floor as published; can undershoot, the feasibility repair adds routes
    return max(1, math.floor(instance.total_demand / max_cap))


def max_routes(instance: Instance) -> int:
    if instance.variant.limited_fleet:
        fleet = instance.original_types or instance.vehicle_types
        return sum(vt.count for vt in fleet)
    return instance.n


def build_neighbors(dist: np.ndarray, phi: int) -> np.ndarray:
    """The ``phi`` nearest vertices of every vertex, depot included.

    Row ``v`` is sorted by ascending distance, ties by vertex index, and never
    contains ``v`` itself.
    """
    size = dist.shape[0]
    n = size - 1
    if not 1 <= phi <= n:
        raise ValueError(f"neighborhood size phi={phi} outside [1, {n}]")
    idx = np.arange(size)
    out = np.empty((size, phi), dtype=np.int64)
    for v in range(size):
        # lexsort: last key is primary
        order = np.lexsort((idx, dist[v]))
        order = order[order != v]
        out[v] = order[:phi]
    return out

