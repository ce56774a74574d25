"""Acceptance criteria, one test each. Every test prints a single line

    criterion <k>: PASS|FAIL|SKIP <summary>

to the terminal (bypassing capture) before asserting.

Criteria 1 and 2 need the classic Golden coordinate files, which are not
shipped. Point AILS_HFVRP_GOLDEN at a directory of native-format instance
files named after the instances (``3.txt`` or ``golden_3.txt`` ...) to run them.
"""

import io
import math
import os
import random
import time
from pathlib import Path

import numpy as np
import pytest

from ails_hfvrp.adapt import (AcceptState, HeuristicStats, record_and_adjust, threshold,
                              update_average)
from ails_hfvrp.cli import main
from ails_hfvrp.engine import Params, run, run_many
from ails_hfvrp.io import BksRegistry, canonical_name, gap, iter_suite, read_instance
from ails_hfvrp.model import Variant, normalize_fleet
from ails_hfvrp.oracle import exact_solve
from ails_hfvrp.solution import is_feasible, total_cost, validate

from conftest import FIXTURES, load_fixture, oracle_manifest

GOLDEN_ENV = "AILS_HFVRP_GOLDEN"
ORACLE_TOL = 1e-6  # engine and oracle sum route costs in different orders
ORACLE_BUDGET = 500
CYCLES = 100_000
LARGE_CYCLES = 3_000


@pytest.fixture
def report(capsys):
    def emit(k, ok, summary):
        status = {True: "PASS", False: "FAIL", None: "SKIP"}[ok]
        with capsys.disabled():
            print(f"\ncriterion {k}: {status} {summary}")
    return emit


def golden_files():
    root = os.environ.get(GOLDEN_ENV)
    if not root or not Path(root).is_dir():
        return {}
    return {canonical_name(p.name): p for p in iter_suite(root)}


# --- 1: BKS reproduction on Golden 3-6 ------------------------------------------

@pytest.mark.slow
def test_criterion_1_small_golden_bks(report):
    files = golden_files()
    names = ["3", "4", "5", "6"]
    if not all(n in files for n in names):
        report(1, None, f"Golden 3-6 coordinate files not found (set {GOLDEN_ENV})")
        pytest.skip("Golden 3-6 files not supplied")
    reg = BksRegistry.default()
    misses = []
    for variant in (Variant.FSMFD, Variant.FSMF, Variant.FSMD):
        for name in names:
            inst = normalize_fleet(read_instance(files[name], variant))
            best = run_many(inst, Params(), runs=10).best
            bks = reg.lookup(name, variant)
            if abs(round(best, 2) - bks) > 0.01 + 1e-9:
                misses.append(f"{variant.value}/{name} {best:.2f} vs {bks:.2f}")
    ok = not misses
    report(1, ok, "all 12 best costs within 0.01 of BKS" if ok else "; ".join(misses))
    assert ok


# --- 2: average gap on Golden 13-16 -----------------------------------------------

@pytest.mark.slow
def test_criterion_2_mid_golden_gap(report):
    files = golden_files()
    names = ["13", "14", "15", "16"]
    if not all(n in files for n in names):
        report(2, None, f"Golden 13-16 coordinate files not found (set {GOLDEN_ENV})")
        pytest.skip("Golden 13-16 files not supplied")
    reg = BksRegistry.default()
    worst = []
    for variant in Variant:
        gaps = []
        for name in names:
            inst = normalize_fleet(read_instance(files[name], variant))
            gaps.append(gap(run_many(inst, Params(), runs=10).avg, reg.lookup(name, variant)))
        worst.append((max(gaps), variant.value))
    ok = all(g <= 0.5 for g, _ in worst)
    detail = ", ".join(f"{v} max {g:.4f}%" for g, v in worst)
    report(2, ok, f"10-run average gaps: {detail}")
    assert ok


# --- 3: engine matches the exact optimum on synthetic fixtures ------------------------

def test_criterion_3_oracle_equivalence(report):
    manifest = oracle_manifest()
    start = time.perf_counter()
    mismatches = []
    for name in sorted(manifest):
        entry = manifest[name]
        inst = load_fixture(name)
        assert 4 <= inst.n <= 7 and inst.h in (2, 3)
        optimum, _ = exact_solve(inst)
        assert optimum == pytest.approx(entry["optimum"], abs=1e-9)
        best = run_many(inst, Params(max_no_improve=ORACLE_BUDGET), runs=10).best
        if abs(best - optimum) > ORACLE_TOL:
            mismatches.append(f"{name} {best:.6f} vs {optimum:.6f}")
    elapsed = time.perf_counter() - start
    variants = {manifest[k]["variant"] for k in manifest}
    ok = not mismatches and len(manifest) >= 20 and len(variants) == 5
    summary = (f"{len(manifest) - len(mismatches)}/{len(manifest)} fixtures at the optimum "
               f"({len(variants)} variants, {elapsed:.0f} s)")
    report(3, ok, summary + ("" if ok else ": " + "; ".join(mismatches)))
    assert ok


# --- 4: gap formula --------------------------------------------------------------

def test_criterion_4_gap_formula(report):
    g = round(gap(10110.61, 10107.53), 4)
    ok = g == 0.0305 and gap(10107.53, 10107.53) == 0
    report(4, ok, f"gap(10110.61, 10107.53) = {g:.4f}, gap(bks, bks) = 0")
    assert ok


# --- 5: adaptive control properties ------------------------------------------------

def closed_form_means(stream, lam):
    """Warm-up prefix means, then the exponential recurrence unrolled."""
    f = np.asarray(stream, dtype=float)
    out = np.empty(len(f))
    w = min(lam, len(f))
    out[:w] = np.cumsum(f[:w]) / np.arange(1, w + 1)
    decay = 1.0 - 1.0 / lam
    for it in range(lam + 1, len(f) + 1):
        ks = np.arange(lam + 1, it + 1)
        out[it - 1] = decay ** (it - lam) * out[lam - 1] + \
            np.sum(f[ks - 1] * decay ** (it - ks)) / lam
    return out


def test_criterion_5_adaptive_control(report):
    failures = []

    d_beta, gamma = 15, 20
    for k in (0.25, 0.7, 1.0, 1.8, 4.0):
        stats = HeuristicStats(omega=2.0)
        for _ in range(50 * gamma):
            record_and_adjust(stats, k * stats.omega, d_beta, gamma, 10_000)
        if abs(k * stats.omega - d_beta) > 0.05 * d_beta:
            failures.append(f"fixed point k={k}: {k * stats.omega:.3f}")

    rng = random.Random(5)
    clamp_violations = 0
    stats = HeuristicStats(omega=5.0)
    n = 50
    for _ in range(1_000_000):
        d_obs = rng.choice((0.0, rng.uniform(0, 3), rng.uniform(0, 400)))
        record_and_adjust(stats, d_obs, d_beta, 1, n)
        if not 1 <= stats.omega <= n:
            clamp_violations += 1
    if clamp_violations:
        failures.append(f"{clamp_violations} clamp violations")

    worst = 0.0
    for lam, stream in ((20, [rng.uniform(900, 1100) for _ in range(400)]),
                        (5, [100.0] * 10 + [50.0] * 30 + [200.0] * 30),
                        (1, [rng.uniform(0, 10) for _ in range(50)])):
        state = AcceptState(eta=0.2, window_size=lam)
        got = []
        for f in stream:
            update_average(state, f)
            got.append(state.mean)
        worst = max(worst, float(np.max(np.abs(np.array(got) - closed_form_means(stream, lam)))))
    if worst > 1e-9:
        failures.append(f"running average off by {worst:.2e}")

    low = AcceptState(eta=0.0, window_size=3, mean=110.0, it=5)
    high = AcceptState(eta=1.0, window_size=3, mean=110.0, it=5)
    for s in (low, high):
        s.window.extend([104.0, 100.0, 108.0])
    if threshold(low) != 100.0 or threshold(high) != 110.0:
        failures.append("threshold endpoints")

    ok = not failures
    report(5, ok, "fixed point, 10^6 clamped updates, recurrence within "
                  f"{worst:.1e}, threshold endpoints" if ok else "; ".join(failures))
    assert ok


# --- 6: structural invariants over many cycles ------------------------------------------

def invariant_cycles(instance, cycles, seed):
    problems = []
    last_best = [math.inf]

    def check(info):
        if len(problems) > 5:
            return
        s = info.candidate
        issues = validate(s)
        if issues:
            problems.append(f"iteration {info.iteration}: {issues[0]}")
        if abs(s.cost - total_cost(s)) > 1e-6:
            problems.append(f"iteration {info.iteration}: cached cost drift")
        if info.best.cost > last_best[0] + 1e-12:
            problems.append(f"iteration {info.iteration}: best cost increased")
        last_best[0] = info.best.cost
        if not is_feasible(info.reference):
            problems.append(f"iteration {info.iteration}: infeasible reference")

    result = run(instance, Params(seed=seed, max_no_improve=10**9, max_iterations=cycles),
                 callback=check)
    if result.iterations != cycles:
        problems.append(f"stopped after {result.iterations} cycles ({result.diagnostic})")
    return problems


@pytest.mark.slow
def test_criterion_6_structural_invariants(report):
    start = time.perf_counter()
    problems = invariant_cycles(load_fixture("mid50"), CYCLES, seed=6)
    mid_time = time.perf_counter() - start
    problems += invariant_cycles(load_fixture("large150"), LARGE_CYCLES, seed=6)
    ok = not problems
    summary = (f"{CYCLES} cycles on 50 customers ({mid_time:.0f} s) and {LARGE_CYCLES} on "
               "150 customers keep partition, cached costs, monotone best, feasible reference")
    report(6, ok, summary if ok else "; ".join(problems))
    assert ok


# --- 7: deterministic CLI reports ----------------------------------------------------

def test_criterion_7_determinism(report, tmp_path):
    cases = [("mid50", "FSMFD", ["--runs", "2", "--max-no-improve", "300"]),
             ("large150", "HVRPFD", ["--runs", "1", "--max-iterations", "200"])]
    differing = []
    for name, variant, extra in cases:
        outputs = []
        for k in range(2):
            trace = tmp_path / f"{name}{k}.csv"
            out = io.StringIO()
            code = main(["solve", "--instance", str(FIXTURES / f"{name}.txt"), "--variant",
                         variant, "--seed", "11", "--trace", str(trace), "--no-timing", *extra],
                        out=out)
            assert code == 0
            outputs.append((out.getvalue(), trace.read_bytes()))
        if outputs[0] != outputs[1]:
            differing.append(name)
    ok = not differing
    report(7, ok, "repeated solve invocations give byte-identical reports and traces"
           if ok else f"output differs for {', '.join(differing)}")
    assert ok
