"""Instance files, solution files, the best-known-cost registry and the gap.

Instance file grammar (``#`` starts a comment, keywords are case-insensitive)::

    NAME: <text>
    VARIANT: <HVRPFD|HVRPD|FSMFD|FSMF|FSMD>        optional
    DIMENSION: <n + 1>
    VEHICLE_TYPES: <h>
    <capacity> <fixed_cost> <unit_cost> [<count>]   h lines
    NODE_COORD_SECTION
    <id> <x> <y>                                    ids 0..n, 0 is the depot
    DEMAND_SECTION
    <id> <demand>
    EOF

The count column may be left out for unlimited-fleet variants, in which case
every type gets n vehicles.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Tuple, Union

from .model import Instance, Variant, VehicleType, type_label
from .solution import Solution, objective_term, total_cost

BKS_ENV = "AILS_HFVRP_BKS"

PathLike = Union[str, Path]


class ParseError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


# --- instance files ----------------------------------------------------------

def _tokens(text: str) -> List[Tuple[int, List[str]]]:
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append((lineno, line.replace(":", " : ", 1).split()))
    return out


def _number(tok: str, lineno: int, what: str) -> float:
    try:
        return float(tok)
    except ValueError:
        raise ParseError(f"{what} must be a number, got {tok!r}", lineno) from None


def _integer(tok: str, lineno: int, what: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"{what} must be an integer, got {tok!r}", lineno) from None


def _header_value(words: List[str], lineno: int) -> str:
    rest = words[1:]
    if rest and rest[0] == ":":
        rest = rest[1:]
    if not rest:
        raise ParseError(f"{words[0]} needs a value", lineno)
    return " ".join(rest)


def _read_section(lines, start: int, count: int, width: int, title: str, end_line: int):
    """``count`` rows of ``width`` numbers after the section header at ``start``."""
    rows = []
    for k in range(count):
        idx = start + 1 + k
        if idx >= len(lines) or not _is_number(lines[idx][1][0]):
            at = lines[idx][0] if idx < len(lines) else end_line
            raise ParseError(f"{title} has {k} rows, expected {count}", at)
        lineno, words = lines[idx]
        if len(words) != width:
            raise ParseError(f"{title} rows need {width} fields, got {len(words)}", lineno)
        rows.append((lineno, words))
    return rows


def _is_number(tok: str) -> bool:
    try:
        float(tok)
        return True
    except ValueError:
        return False


def parse_instance(text: str, variant: Optional[Union[Variant, str]] = None,
                   name: Optional[str] = None) -> Instance:
    """Parse instance file text. ``variant`` overrides the file's VARIANT."""
    lines = _tokens(text)
    last_line = len(text.splitlines())
    headers: Dict[str, Tuple[int, str]] = {}
    types_at = coords_at = demand_at = None
    for idx, (lineno, words) in enumerate(lines):
        key = words[0].upper()
        if key in ("NAME", "VARIANT", "DIMENSION"):
            headers[key] = (lineno, _header_value(words, lineno))
        elif key == "VEHICLE_TYPES":
            headers[key] = (lineno, _header_value(words, lineno))
            types_at = idx
        elif key == "NODE_COORD_SECTION":
            coords_at = idx
        elif key == "DEMAND_SECTION":
            demand_at = idx
        elif key == "EOF":
            break

    for key, where in (("DIMENSION", headers.get("DIMENSION")),
                       ("VEHICLE_TYPES", types_at),
                       ("NODE_COORD_SECTION", coords_at),
                       ("DEMAND_SECTION", demand_at)):
        if where is None:
            raise ParseError(f"missing {key}", last_line)

    dim_line, dim_text = headers["DIMENSION"]
    size = _integer(dim_text, dim_line, "DIMENSION")
    if size < 2:
        raise ParseError("DIMENSION must count the depot and at least one customer", dim_line)
    n = size - 1

    if variant is None and "VARIANT" in headers:
        v_line, v_text = headers["VARIANT"]
        try:
            variant = Variant.parse(v_text)
        except ValueError as exc:
            raise ParseError(str(exc), v_line) from None
    if variant is None:
        raise ParseError("no VARIANT in the file and none given", last_line)
    variant = Variant.parse(variant) if isinstance(variant, str) else variant

    h_line, h_text = headers["VEHICLE_TYPES"]
    h = _integer(h_text, h_line, "VEHICLE_TYPES")
    if h < 1:
        raise ParseError("VEHICLE_TYPES must be at least 1", h_line)
    types = []
    for k in range(h):
        idx = types_at + 1 + k
        if idx >= len(lines) or not _is_number(lines[idx][1][0]):
            at = lines[idx][0] if idx < len(lines) else last_line
            raise ParseError(f"expected {h} vehicle type lines, found {k}", at)
        lineno, words = lines[idx]
        if len(words) not in (3, 4):
            raise ParseError("vehicle type lines are 'capacity fixed unit [count]'", lineno)
        cap, fixed, unit = (_number(w, lineno, f)
                            for w, f in zip(words, ("capacity", "fixed cost", "unit cost")))
        if len(words) == 4:
            count = _integer(words[3], lineno, "count")
        elif variant.limited_fleet:
            raise ParseError(f"{variant.value} needs a vehicle count", lineno)
        else:
            count = n
        try:
            types.append(VehicleType(cap, fixed, unit, count))
        except ValueError as exc:
            raise ParseError(str(exc), lineno) from None
    extra = types_at + 1 + h
    if extra < len(lines) and _is_number(lines[extra][1][0]):
        raise ParseError(f"more than {h} vehicle type lines", lines[extra][0])

    coords = [None] * size
    for k, (lineno, words) in enumerate(
            _read_section(lines, coords_at, size, 3, "NODE_COORD_SECTION", last_line)):
        vid = _integer(words[0], lineno, "node id")
        if vid != k:
            raise ParseError(f"node ids must run 0..{n} in order, got {vid} at row {k}", lineno)
        coords[k] = (_number(words[1], lineno, "x"), _number(words[2], lineno, "y"))

    demands = [0.0] * size
    max_cap = max(t.capacity for t in types)
    for k, (lineno, words) in enumerate(
            _read_section(lines, demand_at, size, 2, "DEMAND_SECTION", last_line)):
        vid = _integer(words[0], lineno, "node id")
        if vid != k:
            raise ParseError(f"demand ids must run 0..{n} in order, got {vid} at row {k}", lineno)
        q = _number(words[1], lineno, "demand")
        if k == 0 and q != 0:
            raise ParseError("depot demand must be 0", lineno)
        if k > 0 and not q > 0:
            raise ParseError(f"customer {k} demand must be positive", lineno)
        if q > max_cap:
            raise ParseError(f"customer {k} demand {q:g} exceeds every vehicle capacity", lineno)
        demands[k] = int(q) if q == int(q) else q

    if name is None:
        name = headers["NAME"][1] if "NAME" in headers else "unnamed"
    return Instance(name=name, coords=tuple(coords), demands=tuple(demands),
                    vehicle_types=tuple(types), variant=variant)


def _fmt(x: float) -> str:
    return repr(int(x)) if float(x) == int(x) else repr(float(x))


def serialize_instance(instance: Instance, include_variant: bool = True) -> str:
    """Canonical file text; the file fleet (before normalization) is written."""
    fleet = instance.original_types or instance.vehicle_types
    out = [f"NAME: {instance.name}"]
    if include_variant:
        out.append(f"VARIANT: {instance.variant.value}")
    out.append(f"DIMENSION: {instance.n + 1}")
    out.append(f"VEHICLE_TYPES: {len(fleet)}")
    for vt in fleet:
        out.append(f"{_fmt(vt.capacity)} {_fmt(vt.fixed_cost)} {_fmt(vt.unit_cost)} {vt.count}")
    out.append("NODE_COORD_SECTION")
    for k, (x, y) in enumerate(instance.coords):
        out.append(f"{k} {_fmt(x)} {_fmt(y)}")
    out.append("DEMAND_SECTION")
    for k, q in enumerate(instance.demands):
        out.append(f"{k} {_fmt(q)}")
    out.append("EOF")
    return "\n".join(out) + "\n"


def read_instance(path: PathLike, variant: Optional[Union[Variant, str]] = None) -> Instance:
    """Parse the file at ``path``; the name defaults to the file stem."""
    path = Path(path)
    text = path.read_text()
    inst = parse_instance(text, variant)
    if inst.name == "unnamed":
        inst = parse_instance(text, variant, name=path.stem)
    return inst


def write_instance(instance: Instance, path: PathLike) -> None:
    Path(path).write_text(serialize_instance(instance))


def convert_legacy(text: str, name: str, variant: Optional[Union[Variant, str]] = None) -> str:
    """Convert the common whitespace layout to the canonical format.

    Legacy layout: the customer count n, then n + 1 lines ``id x y demand``
    (depot first), then the number of vehicle types h and h lines
    ``capacity fixed unit [count]``.
    """
    rows = _tokens(text)
    if not rows:
        raise ParseError("empty file", 1)
    lineno, words = rows[0]
    n = _integer(words[0], lineno, "customer count")
    if len(rows) < n + 3:
        raise ParseError(f"expected {n + 1} node lines and a vehicle block",
                         rows[-1][0])
    out = [f"NAME: {name}"]
    if variant is not None:
        variant = variant if isinstance(variant, Variant) else Variant.parse(variant)
        out.append(f"VARIANT: {variant.value}")
    out.append(f"DIMENSION: {n + 1}")
    nodes = rows[1:n + 2]
    for lineno, words in nodes:
        if len(words) != 4:
            raise ParseError("node lines are 'id x y demand'", lineno)
    h_line, h_words = rows[n + 2]
    h = _integer(h_words[0], h_line, "vehicle type count")
    fleet = rows[n + 3:n + 3 + h]
    if len(fleet) != h:
        raise ParseError(f"expected {h} vehicle type lines", rows[-1][0])
    out.append(f"VEHICLE_TYPES: {h}")
    out.extend(" ".join(words) for _, words in fleet)
    out.append("NODE_COORD_SECTION")
    out.extend(f"{w[0]} {w[1]} {w[2]}" for _, w in nodes)
    out.append("DEMAND_SECTION")
    out.extend(f"{w[0]} {w[3]}" for _, w in nodes)
    out.append("EOF")
    return "\n".join(out) + "\n"


# --- benchmark fleets and best-known costs ------------------------------------

def canonical_name(name: str) -> str:
    """Registry key for an instance name: '13', 'N1', 'H5', ...

    Accepts file names and common spellings such as ``golden_13.txt``,
    ``G13`` or ``n1``.
    """
    stem = Path(name).name
    stem = re.sub(r"\.[A-Za-z]+$", "", stem).strip()
    m = re.fullmatch(r"(?i)(?:golden|taillard|g)?[_\- ]?0*(\d+)", stem)
    if m:
        return m.group(1)
    m = re.fullmatch(r"(?i)(n|h)[_\- ]?0*(\d+)", stem)
    if m:
        return m.group(1).upper() + m.group(2)
    return stem


def _data_text(filename: str) -> str:
    return resources.files("ails_hfvrp").joinpath("data", filename).read_text()


def benchmark_fleets() -> Dict[str, Tuple[int, Tuple[VehicleType, ...]]]:
    """Name -> (n, vehicle types) for the 22 benchmark instances."""
    fleets: Dict[str, Tuple[int, List[VehicleType]]] = {}
    for line in _data_text("fleets.txt").splitlines():
        line = line.split("#", 1)[0].split()
        if not line:
            continue
        name, n, cap, fixed, unit, count = line
        entry = fleets.setdefault(name, (int(n), []))
        entry[1].append(VehicleType(float(cap), float(fixed), float(unit), int(count)))
    return {k: (n, tuple(types)) for k, (n, types) in fleets.items()}


def fleet_block(name: str) -> str:
    """VEHICLE_TYPES block of a benchmark instance, ready to paste into a file."""
    fleets = benchmark_fleets()
    key = canonical_name(name)
    if key not in fleets:
        raise KeyError(f"no fleet data for instance {name!r}")
    _, types = fleets[key]
    lines = [f"VEHICLE_TYPES: {len(types)}"]
    lines += [f"{_fmt(t.capacity)} {_fmt(t.fixed_cost)} {_fmt(t.unit_cost)} {t.count}"
              for t in types]
    return "\n".join(lines) + "\n"


@dataclass
class BksRegistry:
    costs: Dict[Tuple[str, Variant], float]

    @classmethod
    def parse(cls, text: str, source: str = "<text>") -> "BksRegistry":
        costs = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            words = raw.split("#", 1)[0].split()
            if not words:
                continue
            if len(words) != 3:
                raise ParseError(f"{source}: BKS lines are 'name variant cost'", lineno)
            try:
                variant = Variant.parse(words[1])
            except ValueError as exc:
                raise ParseError(f"{source}: {exc}", lineno) from None
            cost = _number(words[2], lineno, "cost")
            costs[(canonical_name(words[0]), variant)] = cost
        return cls(costs)

    @classmethod
    def default(cls) -> "BksRegistry":
        """The shipped table, or the file named by $AILS_HFVRP_BKS if set."""
        override = os.environ.get(BKS_ENV)
        if override:
            return cls.parse(Path(override).read_text(), override)
        return cls.parse(_data_text("bks.txt"), "bks.txt")

    def extend(self, path: PathLike) -> "BksRegistry":
        extra = BksRegistry.parse(Path(path).read_text(), str(path))
        self.costs.update(extra.costs)
        return self

    def lookup(self, name: str, variant: Union[Variant, str]) -> Optional[float]:
        variant = Variant.parse(variant) if isinstance(variant, str) else variant
        return self.costs.get((canonical_name(name), variant))

    def __len__(self) -> int:
        return len(self.costs)


def gap(avg: float, bks: float) -> float:
    """Relative distance of ``avg`` above ``bks``, in percent."""
    if not bks > 0:
        raise ValueError(f"best-known cost must be positive, got {bks}")
    return 100.0 * (avg - bks) / bks


# --- solution files -------------------------------------------------------------

def format_solution(solution: Solution) -> str:
    inst = solution.instance
    lines = []
    k = 0
    for route in solution.routes:
        if not route.customers:
            continue
        k += 1
        tour = " ".join(str(v) for v in [0, *route.customers, 0])
        lines.append(f"Route {k} [type {type_label(route.vehicle_type)}]: {tour} "
                     f"(load {route.load:g}, cost {objective_term(route, inst):.2f})")
    lines.append(f"Total cost: {total_cost(solution):.2f}")
    return "\n".join(lines) + "\n"


def write_solution(solution: Solution, path: PathLike) -> None:
    Path(path).write_text(format_solution(solution))


def parse_solution(text: str, instance: Instance) -> Solution:
    """Read a solution file back; loads and costs in it are not trusted."""
    routes: List[List[int]] = []
    types: List[int] = []
    pattern = re.compile(r"Route\s+\d+\s+\[type\s+([A-Z]|T\d+)\]:\s*([\d\s]+?)\s*(\(|$)")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw.startswith("Route"):
            continue
        m = pattern.match(raw)
        if not m:
            raise ParseError("malformed route line", lineno)
        label = m.group(1)
        types.append(ord(label) - ord("A") if len(label) == 1 else int(label[1:]))
        tour = [int(v) for v in m.group(2).split()]
        if len(tour) < 3 or tour[0] != 0 or tour[-1] != 0:
            raise ParseError("a route must start and end at the depot", lineno)
        routes.append(tour[1:-1])
    return Solution.from_lists(instance, routes, types)


INSTANCE_SUFFIXES = (".txt", ".vrp", ".hfvrp")


def iter_suite(directory: PathLike) -> Iterable[Path]:
    """Instance files (by suffix) of a benchmark directory, in name order."""
    return sorted(p for p in Path(directory).iterdir()
                  if p.is_file() and not p.name.startswith(".")
                  and p.suffix.lower() in INSTANCE_SUFFIXES)
