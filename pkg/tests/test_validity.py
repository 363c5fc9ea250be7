from fractions import Fraction
from random import Random

import pytest

from helpers import random_small_list
from productmix import BidList
from productmix.errors import EmptySet, ScaleExceeded
from productmix.validity import (
    RegionQuery,
    brute_force_valid,
    check_validity,
    contains,
    md,
    mdF,
)


def q(kind, anchor, i, j=None):
    return RegionQuery(kind, tuple(Fraction(a) for a in anchor), i, j)


class TestContains:
    def test_axis_region(self):
        assert contains(q("H", (4, 4), 1), (4, 2))
        assert not contains(q("H", (4, 4), 1), (3, 2))

    def test_diagonal_region(self):
        assert contains(q("F", (4, 4), 1, 2), (6, 6))
        assert not contains(q("F", (4, 4), 1, 2), (2, 4))
        # below the anchor on the diagonal means a negative ray multiple
        assert not contains(q("F", (4, 4), 1, 2), (3, 3))


class TestAnchors:
    def test_md(self):
        assert md([(2, 5), (4, 1)]) == (4, 5)

    def test_md_singleton(self):
        assert md([(3, 7)]) == (3, 7)

    def test_md_empty(self):
        with pytest.raises(EmptySet):
            md([])

    def test_mdF(self):
        # both vectors share the difference b2 - b1 = 2
        assert mdF(1, [(2, 4), (3, 5)]) == (2, 4)
        assert mdF(2, [(2, 4), (3, 5)]) == (2, 4)


class TestCheckValidity:
    def test_bob_valid(self, bob):
        assert check_validity(bob).status == "valid"

    def test_lone_negative_invalid(self):
        lst = BidList.from_rows("evil", [(4, 4, -1)])
        report = check_validity(lst)
        assert report.status == "invalid"
        assert report.witness is not None

    def test_all_positive_shortcut(self, alice):
        report = check_validity(alice)
        assert report.status == "valid"
        assert report.subsets_checked == 0

    def test_witness_is_sound(self):
        lst = BidList.from_rows("evil", [(4, 4, -1), (9, 9, 1)])
        report = check_validity(lst)
        assert report.status == "invalid"
        balance = 0
        for bid in lst.bids:
            if contains(report.witness, bid):
                balance += bid.weight
        assert balance < 0

    def test_budget_gives_undecided(self):
        # negatives each cancelled by a twin positive: valid, but the subset
        # enumeration is larger than the budget allows
        rows = []
        for i in range(8):
            rows.append((i, 10 - i, 3, -1))
            rows.append((i, 10 - i, 3, 1))
        lst = BidList.from_rows("big", rows, n=3)
        assert check_validity(lst).status == "valid"
        report = check_validity(lst, budget=3)
        assert report.status == "undecided"


class TestBruteForce:
    def test_bob(self, bob):
        assert brute_force_valid(bob)

    def test_lone_negative(self):
        assert not brute_force_valid(BidList.from_rows("evil", [(4, 4, -1)]))

    def test_scale_guard(self):
        lst = BidList.from_rows("big", [(25, 0, 1)])
        with pytest.raises(ScaleExceeded):
            brute_force_valid(lst)
        wide = BidList.from_rows("wide", [(1, 1, 1, 1, 1)])
        with pytest.raises(ScaleExceeded):
            brute_force_valid(wide)

    def test_generated_group_valid(self):
        # negative bid covered by two axis discounts and a diagonal raise
        lst = BidList.from_rows(
            "grp", [(6, 5, -1), (4, 5, 1), (6, 2, 1), (8, 7, 1)]
        )
        assert brute_force_valid(lst)
        assert check_validity(lst).status == "valid"

    def test_uncovered_negative_detected(self):
        lst = BidList.from_rows("bad", [(6, 5, -1), (4, 5, 1), (8, 7, 1)])
        assert not brute_force_valid(lst)
        assert check_validity(lst).status == "invalid"


class TestOracleAgreement:
    def test_random_lists(self):
        rng = Random(2024)
        disagreements = []
        for k in range(60):
            lst = random_small_list(rng)
            expected = brute_force_valid(lst)
            got = check_validity(lst)
            assert got.status in ("valid", "invalid")
            if (got.status == "valid") != expected:
                disagreements.append((k, lst))
        assert not disagreements

    def test_generated_lists_all_valid(self):
        # the generator only emits valid lists; both checkers must concur on
        # a 200-sample batch at oracle-compatible scale
        from productmix.testgen import GenConfig, generate_list

        rng = Random("generated-batch")
        for _ in range(200):
            cfg = GenConfig(n=rng.randint(2, 3), q=rng.randint(2, 5), M=20)
            lst, _ = generate_list(cfg, rng, max_attempts=500)
            assert check_validity(lst).status == "valid"
            assert brute_force_valid(lst)
