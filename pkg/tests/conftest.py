import pytest

from productmix import BidList


@pytest.fixture
def alice() -> BidList:
    """Two positive bids: one for either fruit, one banana top-up."""
    return BidList.from_rows("alice", [(6, 6, 1), (0, 4, 1)])


@pytest.fixture
def bob() -> BidList:
    """Three positive bids and one negative bid carving out the middle."""
    return BidList.from_rows("bob", [(2, 4, 1), (4, 2, 1), (4, 4, -1), (6, 6, 1)])
