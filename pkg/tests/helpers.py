"""Shared oracles and generators for the test suite."""

from itertools import combinations
from random import Random

from productmix import BidList
from productmix.sfm import SetFunction


def random_submodular(rng: Random, n: int) -> SetFunction:
    """Sum of weighted coverage functions plus a modular term; integer-valued."""
    universe = rng.randint(4, 9)
    cover_count = rng.randint(1, 3)
    covers = []
    for _ in range(cover_count):
        sets = [
            frozenset(rng.sample(range(universe), rng.randint(1, universe)))
            for _ in range(n)
        ]
        weights = [rng.randint(0, 4) for _ in range(universe)]
        covers.append((sets, weights))
    modular = [rng.randint(-7, 7) for _ in range(n)]

    def evaluate(s):
        total = sum(modular[i - 1] for i in s)
        for sets, weights in covers:
            covered = set()
            for i in s:
                covered |= sets[i - 1]
            total += sum(weights[e] for e in covered)
        return total

    return SetFunction(n, evaluate)


def enumerate_minimum(f: SetFunction):
    """Exhaustive minimum value and the list of all minimisers."""
    ground = list(range(1, f.n + 1))
    best = None
    minimisers = []
    for r in range(f.n + 1):
        for combo in combinations(ground, r):
            s = frozenset(combo)
            v = f.fn(s)
            if best is None or v < best:
                best = v
                minimisers = [s]
            elif v == best:
                minimisers.append(s)
    return best, minimisers


def intersection_of_minimisers(f: SetFunction) -> frozenset:
    _, minimisers = enumerate_minimum(f)
    out = minimisers[0]
    for s in minimisers[1:]:
        out &= s
    return out


def random_small_list(rng: Random, max_negatives: int = 3) -> BidList:
    """Arbitrary (not necessarily valid) small list for oracle agreement."""
    n = rng.randint(1, 3)
    rows = []
    negatives = rng.randint(1, max_negatives)
    for _ in range(negatives):
        rows.append(tuple(rng.randint(0, 10) for _ in range(n)) + (-1,))
    for _ in range(rng.randint(1, 6)):
        rows.append(tuple(rng.randint(0, 10) for _ in range(n)) + (1,))
    rng.shuffle(rows)
    return BidList.from_rows("anon", rows, n=n)


def is_subsequence(short, long):
    it = iter(long)
    return all(any(x == y for y in it) for x in short)
