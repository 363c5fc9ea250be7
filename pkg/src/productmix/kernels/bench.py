"""Micro-benchmark comparing the pure-Python and compiled kernels.

Run with ``python -m productmix.kernels.bench``.  Times each kernel on
synthetic bid tables of a few representative shapes and prints a table with
the speedup of the compiled lane; exits gracefully (pure timings only) when
the extension is not built.
"""

import time
from random import Random

from . import HAVE_COMPILED, pure

try:
    from . import _fast
except ImportError:
    _fast = None

SHAPES = [(1000, 2), (5000, 2), (1000, 10), (2000, 25)]


def _case(rng, bids, goods):
    vals = [[rng.randint(0, 1000) for _ in range(goods)] for _ in range(bids)]
    weights = [rng.choice([-1, 1]) for _ in range(bids)]
    price = [rng.randint(0, 1000) for _ in range(goods)]
    smask = 0
    for i in range(1, goods + 1):
        if rng.random() < 0.5:
            smask |= 1 << i
    return vals, weights, price, smask or 0b10


def _time(fn, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def run(out=print):
    rng = Random(0)
    out(f"{'kernel':<18}{'bids':>6}{'goods':>6}{'pure (ms)':>12}{'fast (ms)':>12}{'speedup':>9}")
    for bids, goods in SHAPES:
        vals, weights, price, smask = _case(rng, bids, goods)
        cases = {
            "indirect_utility": lambda mod: mod.indirect_utility(vals, weights, price),
            "demand_masks": lambda mod: mod.demand_masks(vals, price),
            "unique_bundle": lambda mod: mod.unique_bundle(vals, weights, price),
            "min_step": lambda mod: mod.min_step(vals, price, smask),
        }
        for name, call in cases.items():
            t_pure = _time(lambda: call(pure))
            if _fast is not None:
                assert call(pure) == call(_fast), f"{name} twins disagree"
                t_fast = _time(lambda: call(_fast))
                ratio = f"{t_pure / t_fast:8.1f}x" if t_fast > 0 else "     inf"
                out(
                    f"{name:<18}{bids:>6}{goods:>6}{t_pure * 1e3:>12.3f}"
                    f"{t_fast * 1e3:>12.3f}{ratio:>9}"
                )
            else:
                out(f"{name:<18}{bids:>6}{goods:>6}{t_pure * 1e3:>12.3f}{'-':>12}{'-':>9}")
    if not HAVE_COMPILED:
        out("compiled kernels not built; run `python setup.py build_ext --inplace`")


if __name__ == "__main__":
    run()
