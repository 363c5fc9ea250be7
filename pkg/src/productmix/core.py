"""Bids, bundles, prices and the demand primitives built on them.

Everything here is exact: values are `fractions.Fraction` and no solver path
ever touches floating point.  Goods are numbered 1..n with an implicit
"reject" good 0 whose bid value and price are always zero; a bid accepted on
the reject good is simply not filled.  Bids carry unit weights +1 or -1
(weighted input bids are expanded at construction), and a bid list is an
ordered multiset of unit bids owned by one bidder.

Hot loops delegate to productmix.kernels after rescaling values and prices
to a common integer grid, which keeps the arithmetic exact while letting the
compiled kernels run on machine ints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

from . import kernels
from .errors import InfeasibleBundle, MarginalPrice

Rational = Union[int, str, Fraction]


class AllGoods:
    """Marker returned by surplus_gap when a bid demands every good."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "ALL_GOODS"


ALL_GOODS = AllGoods()


def rat(x: Rational) -> Fraction:
    """Coerce ints, decimal strings and Fractions to an exact rational."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        raise TypeError("floats are not accepted; pass ints, strings or Fractions")
    return Fraction(x)


def as_price(price: Sequence[Rational], n: int | None = None) -> tuple[Fraction, ...]:
    """Normalise a price vector over the real goods (coordinate 0 implicit)."""
    p = tuple(rat(x) for x in price)
    if n is not None and len(p) != n:
        raise ValueError(f"expected a price vector of length {n}, got {len(p)}")
    return p


def as_bundle(bundle: Sequence[int], n: int | None = None) -> tuple[int, ...]:
    out = []
    for v in bundle:
        if not isinstance(v, int):
            q = rat(v)
            if q.denominator != 1:
                raise ValueError(f"bundle entries must be integers, got {v!r}")
            v = q.numerator
        out.append(v)
    x = tuple(out)
    if n is not None and len(x) != n:
        raise ValueError(f"expected a bundle of length {n}, got {len(x)}")
    return x


@dataclass(frozen=True)
class Bid:
    """A unit bid: one value per real good plus a weight of +1 or -1."""

    values: tuple[Fraction, ...]
    weight: int

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(rat(v) for v in self.values))
        if self.weight not in (-1, 1):
            raise ValueError("unit bids must have weight +1 or -1")

    @property
    def n(self) -> int:
        return len(self.values)

    def value(self, good: int) -> Fraction:
        """Bid value for a good, with the reject good pinned to 0."""
        return Fraction(0) if good == 0 else self.values[good - 1]

    def __repr__(self):
        vals = ",".join(str(v) for v in self.values)
        sign = "+1" if self.weight > 0 else "-1"
        return f"Bid({vals};{sign})"


class BidList:
    """An ordered multiset of unit bids belonging to one bidder."""

    __slots__ = ("owner", "bids", "n")

    def __init__(self, owner: str, bids: Iterable[Bid], n: int | None = None):
        self.owner = owner
        self.bids = tuple(bids)
        if self.bids:
            sizes = {b.n for b in self.bids}
            if len(sizes) > 1:
                raise ValueError("all bids in a list must cover the same goods")
            self.n = sizes.pop()
            if n is not None and n != self.n:
                raise ValueError("bid length disagrees with the declared good count")
        else:
            if n is None:
                raise ValueError("an empty bid list needs an explicit good count")
            self.n = n

    @classmethod
    def from_rows(cls, owner: str, rows: Iterable[Sequence], n: int | None = None) -> "BidList":
        """Build a list from (v_1, ..., v_n, weight) rows, expanding weights.

        A row with integer weight w becomes |w| unit bids of sign(w); zero
        weights are rejected.
        """
        bids = []
        for row in rows:
            *values, weight = row
            if len(values) == 1 and isinstance(values[0], (list, tuple)):
                values = list(values[0])
            weight = int(weight)
            if weight == 0:
                raise ValueError("bids must have non-zero weight")
            unit = 1 if weight > 0 else -1
            vals = tuple(rat(v) for v in values)
            bids.extend(Bid(vals, unit) for _ in range(abs(weight)))
        return cls(owner, bids, n=n)

    @classmethod
    def aggregate(cls, lists: Iterable["BidList"], owner: str = "aggregate") -> "BidList":
        lists = list(lists)
        if not lists:
            raise ValueError("cannot aggregate zero bid lists")
        n = lists[0].n
        bids = [b for lst in lists for b in lst.bids]
        return cls(owner, bids, n=n)

    def total_weight(self) -> int:
        return sum(b.weight for b in self.bids)

    def max_entry(self) -> Fraction:
        """Largest bid value; the price box for this list is [0, max_entry]^n."""
        return max((v for b in self.bids for v in b.values), default=Fraction(0))

    def __len__(self):
        return len(self.bids)

    def __iter__(self):
        return iter(self.bids)

    def __repr__(self):
        return f"BidList({self.owner!r}, {len(self.bids)} bids, n={self.n})"


def _bids_of(bids) -> tuple[tuple[Bid, ...], int | None]:
    """Normalise a BidList or iterable of bids to (bids, n); n may be None."""
    if isinstance(bids, BidList):
        return bids.bids, bids.n
    seq = tuple(bids)
    return seq, (seq[0].n if seq else None)


class ScaledBids:
    """Bids and prices rescaled to a common integer grid for the kernels."""

    __slots__ = ("n", "scale", "vals", "weights", "max_abs")

    def __init__(self, bids: Sequence[Bid], n: int, scale: int):
        self.n = n
        self.scale = scale
        self.vals = [[int(v * scale) for v in b.values] for b in bids]
        self.weights = [b.weight for b in bids]
        self.max_abs = max((abs(v) for row in self.vals for v in row), default=0)

    @classmethod
    def build(cls, bids: Sequence[Bid], n: int, extra_denominators: Iterable[int] = ()) -> "ScaledBids":
        scale = 1
        for b in bids:
            for v in b.values:
                scale = math.lcm(scale, v.denominator)
        for d in extra_denominators:
            scale = math.lcm(scale, d)
        return cls(bids, n, scale)

    def price_ints(self, price: Sequence[Fraction]) -> list[int]:
        out = []
        for x in price:
            q = x * self.scale
            if q.denominator != 1:
                raise ValueError(
                    f"price entry {x} does not live on the 1/{self.scale} grid"
                )
            out.append(int(q))
        return out

    def _impl(self, pints):
        mag = max([self.max_abs] + [abs(p) for p in pints] + [1])
        return kernels.active(self.n, 2 * mag)

    def utility(self, pints: list[int]) -> int:
        """Scaled indirect utility (divide by .scale for the true value)."""
        return self._impl(pints).indirect_utility(self.vals, self.weights, pints)

    def masks(self, pints: list[int]) -> list[int]:
        return self._impl(pints).demand_masks(self.vals, pints)

    def bundle(self, pints: list[int]):
        return self._impl(pints).unique_bundle(self.vals, self.weights, pints)

    def min_step(self, pints: list[int], smask: int) -> int:
        return self._impl(pints).min_step(self.vals, pints, smask)


# ---------------------------------------------------------------------------
# Demand primitives
# ---------------------------------------------------------------------------

def demanded_goods(bid: Bid, price: Sequence[Rational]) -> frozenset[int]:
    """Goods (including reject good 0) maximising the bid's surplus."""
    p = as_price(price, bid.n)
    best = Fraction(0)
    for j in range(bid.n):
        s = bid.values[j] - p[j]
        if s > best:
            best = s
    goods = {0} if best == 0 else set()
    for j in range(bid.n):
        if bid.values[j] - p[j] == best:
            goods.add(j + 1)
    return frozenset(goods)


def is_marginal(bid: Bid, price: Sequence[Rational]) -> bool:
    """True when the bid demands more than one good at this price."""
    return len(demanded_goods(bid, price)) > 1


def surplus_gap(bid: Bid, price: Sequence[Rational]):
    """Best surplus minus best surplus over non-demanded goods.

    Returns ALL_GOODS when every good (including reject) is demanded, since
    no runner-up exists; otherwise the gap, which is strictly positive.
    """
    p = as_price(price, bid.n)
    surpluses = [Fraction(0)] + [bid.values[j] - p[j] for j in range(bid.n)]
    best = max(surpluses)
    rest = [s for s in surpluses if s != best]
    if not rest:
        return ALL_GOODS
    return best - max(rest)


def indirect_utility(bids, price: Sequence[Rational]) -> Fraction:
    """Sum over bids of weight * best surplus (zero for rejected bids)."""
    seq, n = _bids_of(bids)
    if not seq:
        return Fraction(0)
    p = as_price(price, n)
    arr = ScaledBids.build(seq, n, (x.denominator for x in p))
    return Fraction(arr.utility(arr.price_ints(p)), arr.scale)


def demanded_bundle(bids, price: Sequence[Rational]) -> tuple[int, ...]:
    """The unique demanded bundle at a non-marginal price.

    Returns an (n+1)-vector whose 0th coordinate counts rejected weight.
    Raises MarginalPrice when some bid is marginal, in which case no single
    bundle is canonical and callers must perturb the price instead.
    """
    seq, n = _bids_of(bids)
    if not seq:
        n = len(tuple(price)) if n is None else n
        return (0,) * (n + 1)
    p = as_price(price, n)
    arr = ScaledBids.build(seq, n, (x.denominator for x in p))
    bundle = arr.bundle(arr.price_ints(p))
    if bundle is None:
        raise MarginalPrice(f"some bid is marginal at {tuple(map(str, p))}")
    return tuple(bundle)


def demand_interval(bids, price: Sequence[Rational]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Coordinate-wise min and max over all demanded bundles at this price.

    Both vectors have length n+1 with the reject count in coordinate 0.
    The minimum for a good counts only non-marginal bids demanding it; the
    maximum counts every bid that demands it.
    """
    seq, n = _bids_of(bids)
    if not seq:
        n = len(tuple(price)) if n is None else n
        z = (0,) * (n + 1)
        return z, z
    p = as_price(price, n)
    arr = ScaledBids.build(seq, n, (x.denominator for x in p))
    masks = arr.masks(arr.price_ints(p))
    mins = [0] * (n + 1)
    maxs = [0] * (n + 1)
    for mask, w in zip(masks, arr.weights):
        single = (mask & (mask - 1)) == 0
        for g in range(n + 1):
            if (mask >> g) & 1:
                maxs[g] += w
                if single:
                    mins[g] += w
    return tuple(mins), tuple(maxs)


def project_bid(bid: Bid, price: Sequence[Rational]) -> Bid:
    """Move a bid one unit so its surplus gap at this price grows by one.

    With demanded goods I: subtract the indicator of the non-demanded goods
    when the reject good is demanded, otherwise add the indicator of I.  A
    bid demanding all goods is returned unchanged.  Projected values may go
    negative; the weight never changes.
    """
    goods = demanded_goods(bid, price)
    if 0 in goods:
        new_vals = tuple(
            v - (0 if (j + 1) in goods else 1) for j, v in enumerate(bid.values)
        )
    else:
        new_vals = tuple(
            v + (1 if (j + 1) in goods else 0) for j, v in enumerate(bid.values)
        )
    return Bid(new_vals, bid.weight)


def shift_bids(blist: BidList, good: int, delta: Rational) -> BidList:
    """Add delta to every bid's value for one good (|delta| < 1/4)."""
    d = rat(delta)
    if not abs(d) < Fraction(1, 4):
        raise ValueError("shift magnitude must stay below 1/4")
    if not 1 <= good <= blist.n:
        raise ValueError(f"good {good} out of range")
    bids = [
        Bid(
            tuple(v + d if j + 1 == good else v for j, v in enumerate(b.values)),
            b.weight,
        )
        for b in blist.bids
    ]
    return BidList(blist.owner, bids, n=blist.n)


# ---------------------------------------------------------------------------
# Valuation and demand membership (via price finding)
# ---------------------------------------------------------------------------

def valuation(blist: BidList, bundle: Sequence[int]) -> Fraction:
    """Value a globally valid list assigns to a bundle.

    Finds a price at which the bundle is demanded (reserve bids are added
    internally, so undersupply resolves to rejects) and solves the indirect
    utility relation for the bundle's value.
    """
    from . import pricing
    from .errors import InfeasibleTarget

    x = as_bundle(bundle, blist.n)
    if any(v < 0 for v in x):
        raise InfeasibleBundle("bundles must be non-negative")
    pp = pricing.PriceProblem([blist], x)
    try:
        price, _ = pricing.long_step_min_up(pp)
    except InfeasibleTarget as exc:
        raise InfeasibleBundle(str(exc)) from exc
    f = indirect_utility(blist, price)
    return f + sum(Fraction(price[j]) * x[j] for j in range(blist.n))


def is_demanded(blist: BidList, bundle: Sequence[int], price: Sequence[Rational]) -> bool:
    """Exact membership test: is the bundle demanded at this price?

    Uses the identity that a bundle is demanded exactly when its value minus
    its cost equals the indirect utility, with a demand-interval prune that
    also rules out bundles exceeding what the list can supply at boundary
    (zero-priced) coordinates.
    """
    x = as_bundle(bundle, blist.n)
    p = as_price(price, blist.n)
    if any(v < 0 for v in x):
        return False
    rejects = blist.total_weight() - sum(x)
    ext = (rejects,) + x
    mins, maxs = demand_interval(blist, p)
    if any(not (mins[g] <= ext[g] <= maxs[g]) for g in range(blist.n + 1)):
        return False
    u = valuation(blist, x)
    cost = sum(p[j] * x[j] for j in range(blist.n))
    return u - cost == indirect_utility(blist, p)


def total_weight(bids) -> int:
    seq, _ = _bids_of(bids)
    return sum(b.weight for b in seq)
