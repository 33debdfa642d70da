import pytest

from heytlab.reports import Claim, Report
from heytlab.suite import LEVELS, POSET_COUNTS, check_suite, negative_control


@pytest.fixture(scope="module")
def quick():
    return check_suite("quick")


def test_quick_level_passes(quick):
    assert quick.ok, [c.claim for c in quick.claims if c.verdict == "fail"]
    assert quick.data["level"] == "quick" and quick.data["seed"] == 0
    assert len(quick.claims) >= 20


def test_levels_match_stated_bounds():
    assert (LEVELS["quick"]["corpus"], LEVELS["quick"]["search_bound"], LEVELS["quick"]["depth"]) == (4, 4, 2)
    assert (LEVELS["full"]["corpus"], LEVELS["full"]["search_bound"], LEVELS["full"]["depth"]) == (5, 9, 3)


def test_poset_counts_constant():
    assert POSET_COUNTS[:5] == (1, 2, 5, 16, 63)


def test_injected_fault_fails_exactly_one_claim():
    rep = check_suite("quick", inject_fault="skeletal")
    assert not rep.ok
    assert [c.claim for c in rep.claims if c.verdict == "fail"] == ["envelope axioms and skeletality"]


def test_unknown_level():
    with pytest.raises(ValueError):
        check_suite("huge")


def test_negative_control():
    ok, info = negative_control()
    assert ok and info == {"verdict": False}


def test_same_seed_same_report(quick):
    assert check_suite("quick").as_dict() == quick.as_dict()


def test_report_rendering():
    rep = Report("t")
    rep.add("one", True, [1])
    rep.add("two", "caveat")
    assert rep.ok and rep.verdict_of("two") == "caveat"
    rep.add("three", False)
    assert not rep.ok
    text = rep.render_text()
    assert text.splitlines()[:2] == ["t", "="]
    assert "[FAIL  ] three" in text and text.endswith("overall: fail")
    with pytest.raises(ValueError):
        Claim("x", "maybe")
    with pytest.raises(KeyError):
        rep.verdict_of("absent")
