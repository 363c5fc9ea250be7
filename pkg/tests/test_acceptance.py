"""Acceptance criteria for the full solver pipeline.

Each test prints one PASS/FAIL line; run with ``pytest tests/test_acceptance.py -v -s``.
All tolerances are exact unless a criterion states a runtime envelope.
"""

import time
from contextlib import contextmanager
from math import comb
from random import Random

import pytest

from helpers import (
    enumerate_minimum,
    intersection_of_minimisers,
    is_subsequence,
    random_small_list,
    random_submodular,
)
from productmix import (
    BidList,
    GenConfig,
    PriceProblem,
    allocate,
    bench_suite,
    generate_instance,
    is_demanded,
    long_step_min_up,
    min_up,
    minimal_minimiser,
    minimise,
)
from productmix.validity import brute_force_valid, check_validity


@contextmanager
def criterion(number, description):
    try:
        yield
    except BaseException:
        print(f"FAIL  criterion {number}: {description}")
        raise
    print(f"PASS  criterion {number}: {description}")


def fixture_lists():
    alice = BidList.from_rows("alice", [(6, 6, 1), (0, 4, 1)])
    bob = BidList.from_rows("bob", [(2, 4, 1), (4, 2, 1), (4, 4, -1), (6, 6, 1)])
    return alice, bob


@pytest.fixture(scope="module")
def pricing_runs():
    """100 generated instances solved by all three price-finding methods."""
    rng = Random("acceptance-pricing")
    runs = []
    for _ in range(100):
        n = rng.randint(2, 5)
        m = rng.randint(2, 4)
        q = rng.randint(5, 30)
        lists, target = generate_instance(GenConfig(n=n, q=q), m, rng)
        pp = PriceProblem(lists, target)
        unit_price, unit_trace = min_up(pp)
        binary = long_step_min_up(pp, "binary")
        demand = long_step_min_up(pp, "demand_change")
        runs.append((pp, unit_price, unit_trace, binary, demand))
    return runs


def test_criterion_1_worked_example():
    with criterion(1, "worked example prices (4,4) and a lawful split, < 1 s"):
        start = time.perf_counter()
        alice, bob = fixture_lists()
        pp = PriceProblem([alice, bob], (1, 1))
        assert min_up(pp)[0] == (4, 4)
        assert long_step_min_up(pp, "binary")[0] == (4, 4)
        assert long_step_min_up(pp, "demand_change")[0] == (4, 4)
        priorities = [None]
        names = ("alice", "bob")
        priorities.append([(g, o) for g in range(3) for o in names])
        priorities.append([(g, o) for g in range(3) for o in reversed(names)])
        for priority in priorities:
            solution = allocate([alice, bob], (1, 1), (4, 4), priority=priority)
            a = solution.real_bundle("alice")
            b = solution.real_bundle("bob")
            assert a in {(1, 0), (0, 1)}, "forbidden (1,1)/(0,0) split"
            assert tuple(x + y for x, y in zip(a, b)) == (1, 1)
        elapsed = time.perf_counter() - start
        assert elapsed < 1.0, f"took {elapsed:.2f}s"


def test_criterion_2_trajectory_equivalence(pricing_runs):
    with criterion(2, "identical prices and nested trajectories on 100 instances"):
        for pp, unit_price, unit_trace, binary, demand in pricing_runs:
            for price, trace in (binary, demand):
                assert price == unit_price
                assert is_subsequence(trace.prices(), unit_trace.prices())
            assert binary[1].steps == demand[1].steps  # equal lambda each round


def test_criterion_3_iteration_bounds(pricing_runs):
    with criterion(3, "unit steps = ||p*||_inf and long steps <= n|B|"):
        for pp, unit_price, unit_trace, binary, demand in pricing_runs:
            assert unit_trace.iterations == max(unit_price, default=0)
            bound = pp.n * len(pp.bids)
            assert binary[1].iterations <= bound
            assert demand[1].iterations <= bound


def test_criterion_4_sfm_oracle_equivalence():
    with criterion(4, "SFM matches enumeration on 200 random functions"):
        rng = Random("acceptance-sfm")
        for k in range(200):
            f = random_submodular(rng, rng.randint(2, 12))
            best, _ = enumerate_minimum(f)
            _, value = minimise(f)
            assert value == best
            assert minimal_minimiser(f) == intersection_of_minimisers(f)
            if k % 5 == 0 and f.n <= 10:
                _, wolfe_value = minimise(f, method="wolfe")
                assert wolfe_value == best


def test_criterion_5_allocation_soundness():
    with criterion(5, "sound partitions on 100 instances incl. q=100 at n=2,m=5"):
        rng = Random("acceptance-allocation")
        cases = [(2, 5, 50)] * 4 + [(2, 5, 100)] * 6
        while len(cases) < 100:
            cases.append((rng.randint(2, 5), rng.randint(2, 5), rng.randint(5, 30)))
        for n, m, q in cases:
            lists, target = generate_instance(GenConfig(n=n, q=q), m, rng)
            centre = tuple([GenConfig(n=n, q=q).M // 2] * n)
            solution = allocate(lists, target, centre, checks=True)
            # edge-count monotonicity and the conservation invariant are
            # asserted inside allocate(); termination bound re-checked here
            assert solution.iterations <= m * comb(n + 1, 2)
            totals = [0] * n
            rejects = 0
            for lst in lists:
                bundle = solution.real_bundle(lst.owner)
                assert is_demanded(lst, bundle, centre)
                totals = [a + b for a, b in zip(totals, bundle)]
                rejects += solution.bundles[lst.owner][0]
            assert tuple(totals) == target
            assert rejects == sum(l.total_weight() for l in lists) - sum(target)


def test_criterion_6_validity_agreement():
    with criterion(6, "validity checker agrees with the brute-force oracle"):
        alice, bob = fixture_lists()
        assert check_validity(bob).status == "valid"
        assert brute_force_valid(bob)
        lone = BidList.from_rows("evil", [(4, 4, -1)])
        assert check_validity(lone).status == "invalid"
        assert not brute_force_valid(lone)
        rng = Random("acceptance-validity")
        for _ in range(100):
            lst = random_small_list(rng, max_negatives=3)
            report = check_validity(lst)
            assert report.status in ("valid", "invalid")
            assert (report.status == "valid") == brute_force_valid(lst)


def test_criterion_7_integrality(pricing_runs):
    with criterion(7, "every returned minimal clearing price is integral"):
        for pp, unit_price, unit_trace, binary, demand in pricing_runs:
            for price in (unit_price, binary[0], demand[0]):
                assert all(isinstance(x, int) for x in price)


def test_criterion_8_scaling_shape():
    with criterion(8, "bench: <=8x from q=100 to 400 and from n=10 to 20"):
        start = time.perf_counter()
        bids_rows = bench_suite("bids", [100, 400], repetitions=20, n=2, m=5)
        goods_rows = bench_suite("goods", [10, 20], repetitions=20, q=50, m=5)
        elapsed = time.perf_counter() - start
        by_q = {r.value: r.mean_seconds for r in bids_rows}
        by_n = {r.value: r.mean_seconds for r in goods_rows}
        print(
            f"\n  allocate mean seconds: q=100 {by_q[100]:.4f}, q=400 {by_q[400]:.4f}; "
            f"n=10 {by_n[10]:.4f}, n=20 {by_n[20]:.4f} (bench wall {elapsed:.0f}s)"
        )
        assert all(r.samples >= 20 for r in bids_rows + goods_rows)
        assert by_q[400] <= 8 * by_q[100]
        assert by_n[20] <= 8 * by_n[10]
        assert elapsed < 600, "bench exceeded the 10 minute target"
