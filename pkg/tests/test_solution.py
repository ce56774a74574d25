import random

import pytest
from hypothesis import given, settings, strategies as st

from ails_hfvrp.solution import (Route, Solution, edge_set, is_feasible, objective_term,
                                 route_cost, solution_distance, total_cost, validate, violation)

from conftest import make_instance, random_instance


def line_instance(variant="FSMFD"):
    # customer 1 at distance 10 from the depot
    return make_instance([(0, 0), (10, 0), (10, 5), (0, 7)], [0, 4, 5, 6],
                         [(20, 100, 1.5, 4), (8, 10, 1.0, 1)], variant)


def test_route_cost_examples():
    inst = line_instance()
    r = Route(0, [1], inst)
    assert route_cost(r, inst) == 130.0
    assert route_cost(Route(0, [], inst), inst) == 100.0
    assert objective_term(Route(0, [], inst), inst) == 0.0
    fsmd = line_instance("FSMD")
    assert route_cost(Route(0, [1], fsmd), fsmd) == 30.0


def test_total_cost_single_route_equals_route_cost():
    inst = line_instance()
    s = Solution.from_lists(inst, [[1, 2, 3]], [0])
    assert total_cost(s) == pytest.approx(route_cost(s.routes[0], inst), abs=1e-12)
    assert s.cost == pytest.approx(total_cost(s), abs=1e-9)


def test_fsmf_cost_is_fixed_plus_distance():
    inst = random_instance(3, 9, "FSMF", h=2)
    s = Solution.from_lists(inst, [[1, 2, 3], [4, 5], [6, 7, 8, 9]], [1, 0, 1])
    fixed = sum(inst.vehicle_types[r.vehicle_type].fixed_cost for r in s.routes)
    assert total_cost(s) == pytest.approx(fixed + sum(r.length for r in s.routes), rel=1e-12)


def test_feasibility_overload_and_fleet_excess():
    inst = make_instance([(0, 0)] + [(i, 1) for i in range(1, 6)], [0, 25, 1, 1, 1, 1],
                         [(25, 0, 1, 5), (20, 0, 1, 4)], "HVRPD")
    over = Solution.from_lists(inst, [[1]], [1])
    rep = is_feasible(over)
    assert not rep and rep.overloads == {0: 5}
    ok = Solution.from_lists(inst, [[1], [2, 3, 4, 5]], [0, 1])
    assert is_feasible(ok).feasible
    five = Solution.from_lists(inst, [[1], [2], [3], [4], [5]], [0, 1, 1, 1, 1])
    assert is_feasible(five).feasible
    six_b = make_instance([(0, 0)] + [(i, 1) for i in range(1, 6)], [0, 1, 1, 1, 1, 1],
                          [(25, 0, 1, 5), (20, 0, 1, 4)], "HVRPD")
    excess = Solution.from_lists(six_b, [[1], [2], [3], [4], [5]], [1] * 5)
    rep = is_feasible(excess)
    assert rep.count_excess == {1: 1} and not rep.overloads
    assert violation(excess) == six_b.total_demand


def test_distance_examples():
    inst = line_instance()
    a = Solution.from_lists(inst, [[1, 2]], [0])
    assert solution_distance(a, a) == 0
    b = Solution.from_lists(inst, [[2, 1]], [0])
    assert solution_distance(a, b) == 0
    c = Solution.from_lists(inst, [[1, 2, 3]], [0])
    d = Solution.from_lists(inst, [[1, 2], [3]], [0, 0])
    assert edge_set(c) == {(0, 1), (1, 2), (2, 3), (0, 3)}
    assert edge_set(d) == {(0, 1), (1, 2), (0, 2), (0, 3)}
    assert solution_distance(c, d) == 2


def random_solution(inst, rng):
    customers = list(range(1, inst.n + 1))
    rng.shuffle(customers)
    cuts = sorted(rng.sample(range(1, inst.n), rng.randint(0, min(4, inst.n - 1))))
    bounds = [0] + cuts + [inst.n]
    routes = [customers[a:b] for a, b in zip(bounds, bounds[1:])]
    return Solution.from_lists(inst, routes, [rng.randrange(inst.h) for _ in routes])


@settings(max_examples=60)
@given(st.integers(0, 10_000))
def test_distance_is_pseudometric_and_orientation_free(seed):
    rng = random.Random(seed)
    inst = random_instance(seed % 7, 8)
    a, b, c = (random_solution(inst, rng) for _ in range(3))
    assert solution_distance(a, b) == solution_distance(b, a)
    assert solution_distance(a, c) <= solution_distance(a, b) + solution_distance(b, c)
    flipped = Solution.from_lists(inst, [r.customers[::-1] for r in a.routes][::-1],
                                  [r.vehicle_type for r in a.routes][::-1])
    assert solution_distance(a, flipped) == 0


def test_validate_examples():
    inst = line_instance()
    s = Solution.from_lists(inst, [[1, 2], [3]], [0, 1])
    assert validate(s) == []
    dup = Solution.from_lists(inst, [[1, 2], [3, 1]], [0, 1])
    assert any("duplicate customer" in p for p in validate(dup))
    s.cost += 1.0
    assert any("cost cache drift" in p for p in validate(s))
    missing = Solution.from_lists(inst, [[1, 2]], [0])
    assert any("not served" in p for p in validate(missing))


@settings(max_examples=60)
@given(st.integers(0, 10_000))
def test_incremental_remove_insert_keeps_caches(seed):
    rng = random.Random(seed)
    inst = random_instance(seed % 5, 10)
    s = random_solution(inst, rng)
    for _ in range(30):
        c = rng.randint(1, inst.n)
        s.remove(c)
        k = rng.randrange(s.m)
        s.insert(c, k, rng.randint(0, len(s.routes[k].customers)))
        if rng.random() < 0.2:
            s.set_type(rng.randrange(s.m), rng.randrange(inst.h))
    s.drop_empty_routes()
    assert validate(s) == []


def test_remove_reports_former_neighbors_and_copy_is_independent():
    inst = line_instance()
    s = Solution.from_lists(inst, [[1, 2, 3]], [0])
    t = s.copy()
    assert s.remove(2) == (0, 1, 3)
    assert s.where[2] is None
    assert t.routes[0].customers == [1, 2, 3] and validate(t) == []
    with pytest.raises(ValueError):
        s.delete_route(0)
