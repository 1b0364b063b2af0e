import pytest
from hypothesis import given, strategies as st

from fairgauge.errors import UnknownIndicator
from fairgauge.registry import (
    ID_PATTERN,
    Mode,
    PrincipleId,
    builtin_registry,
    lookup,
    parse_id,
    partner_of,
)

DUAL_PAIRS = {
    "RDA-F1-01D": "FsF-F1-02D",
    "RDA-F1-02D": "FsF-F1-01D",
    "RDA-F3-01M": "FsF-F3-01M",
    "RDA-F4-01M": "FsF-F4-01M",
    "RDA-A1-04M": "FsF-A1-02M",
    "RDA-A1-04D": "FsF-A1-03D",
    "RDA-A2-01M": "FsF-A2-01M",
    "RDA-I3-01M": "FsF-I3-01M",
    "RDA-R1.1-03M": "FsF-R1.1-01M",
    "RDA-R1.3-01M": "FsF-R1.3-01M",
    "RDA-R1.3-02D": "FsF-R1.3-02D",
}
AUTOMATED_ONLY = {"FsF-F2-01M", "FsF-A1-01M", "FsF-I1-01M", "FsF-I1-02M", "FsF-R1-01MD", "FsF-R1.2-01M"}


def test_counts(registry):
    assert len(registry) == 47
    assert len(registry.by_mode(Mode.DUAL)) == 11
    assert len(registry.by_mode(Mode.AUTOMATED_ONLY)) == 6
    assert len(registry.by_mode(Mode.MANUAL_ONLY)) == 30
    assert len(registry.automated_ids) == 17
    assert len(registry.manual_ids) == 30


def test_maxima(registry):
    assert registry.maxima() == {"F": 8, "A": 13, "I": 14, "R": 12}
    assert sum(registry.maxima().values()) == 47


def test_dual_pairs_exact(registry):
    assert {i.id: i.dual_partner for i in registry.by_mode(Mode.DUAL)} == DUAL_PAIRS
    assert {i.id for i in registry.by_mode(Mode.AUTOMATED_ONLY)} == AUTOMATED_ONLY


def test_automated_ids_are_partners_and_fsf_only(registry):
    assert set(registry.automated_ids) == set(DUAL_PAIRS.values()) | AUTOMATED_ONLY
    assert all(i.startswith("FsF-") for i in registry.automated_ids)
    assert all(i.startswith("RDA-") for i in registry.manual_ids)


def test_no_id_appears_twice(registry):
    ids = [x for ind in registry for x in ind.ids]
    assert len(ids) == len(set(ids)) == 58


def test_lookup_resolves_either_side_of_a_pair(registry):
    assert lookup(registry, "FsF-F1-02D").id == "RDA-F1-01D"
    assert lookup(registry, "RDA-F1-01D").dual_partner == "FsF-F1-02D"
    assert partner_of(registry, "FsF-R1.3-02D") == "RDA-R1.3-02D"
    assert partner_of(registry, "RDA-R1.3-02D") == "FsF-R1.3-02D"
    assert partner_of(registry, "RDA-A1-01M") is None


@pytest.mark.parametrize("bad", ["RDA-Z9-01M", "", "FsF-F1-03D", "rda-f1-01m"])
def test_lookup_unknown(registry, bad):
    with pytest.raises(UnknownIndicator):
        lookup(registry, bad)


def test_target_suffix_matches_id(registry):
    for ind in registry:
        assert parse_id(ind.id)[3] == ind.target
        assert ind.principle.letter == ind.id.split("-")[1][0]


def test_principle_id_checks():
    assert PrincipleId.of("R1.3").letter == "R"
    with pytest.raises(ValueError):
        PrincipleId("F", "A1")
    with pytest.raises(ValueError):
        PrincipleId("F", "F9")


def test_builtin_is_cached():
    assert builtin_registry() is builtin_registry()


@given(st.from_regex(ID_PATTERN, fullmatch=True))
def test_every_well_formed_id_either_resolves_or_raises(text):
    reg = builtin_registry()
    try:
        ind = lookup(reg, text)
    except UnknownIndicator:
        assert all(text not in i.ids for i in reg)
    else:
        assert text in ind.ids
