import pytest

from hanano.gadgets import (
    base_templates,
    bend_contract,
    build_harness,
    conformance,
    get_base,
    mirror_signature,
    mirror_template,
    all_vertex_signatures,
    signature_of_template,
)
from hanano.gadgets.ops import NotPaddable, pad, align_ports
from hanano.solver import SearchLimits

LIMITS = SearchLimits(max_states=500_000, max_seconds=240)


def test_signature_mirror_involution():
    for sig in ("B..|.BB", "R..|.RB", "..B|BB.", ".R.|B.R"):
        assert mirror_signature(mirror_signature(sig)) == sig


def test_all_signatures_count():
    sigs = all_vertex_signatures()
    assert len(sigs) == 32
    assert len([s for s in sigs if "R" not in s]) == 8
    assert len([s for s in sigs if "R" in s]) == 24


def test_base_signatures():
    assert signature_of_template(get_base("or_base")) == "B..|.BB"
    assert signature_of_template(get_base("and_base")) == "R..|.RB"


class TestBaseConformance:
    def test_or_certifies(self):
        rep = conformance(get_base("or_base"), LIMITS)
        assert rep.certified, rep.to_dict()

    def test_and_certifies(self):
        rep = conformance(get_base("and_base"), LIMITS)
        assert rep.certified, rep.to_dict()

    def test_terminator_certifies(self):
        rep = conformance(get_base("terminator"), LIMITS)
        assert rep.certified, rep.to_dict()

    def test_bend_satisfies_its_contract(self):
        rep = bend_contract(get_base("red_bend"), LIMITS)
        assert rep.certified, rep.to_dict()

    def test_mirrored_or_certifies(self):
        t = mirror_template(get_base("or_base"))
        assert signature_of_template(t) == ".BB|B.."
        rep = conformance(t, LIMITS)
        assert rep.certified, rep.to_dict()


class TestBrokenTemplateIsRejected:
    def test_or_without_signal_flower_fails(self):
        from dataclasses import replace

        t = get_base("or_base")
        # drop the signal block's flower: C3 must fail
        lv = t.level
        flowers = tuple(f for f in lv.flowers if f.cell != (9, 9))
        broken = replace(t, level=replace(lv, flowers=flowers), name="or_broken")
        rep = conformance(broken, LIMITS)
        assert not rep.certified
        assert any("doomed" in n for n in rep.notes)


class TestPadding:
    def test_pad_identity(self):
        t = get_base("or_base")
        assert pad(t, t.height).height == t.height

    def test_pad_below_height_raises(self):
        t = get_base("or_base")
        with pytest.raises(NotPaddable):
            pad(t, t.height - 1)

    @pytest.mark.parametrize("extra", [1, 2, 3, 4])
    def test_padded_or_still_certifies(self, extra):
        t = pad(get_base("or_base"), get_base("or_base").height + extra)
        rep = conformance(t, LIMITS)
        assert rep.certified, (extra, rep.to_dict())

    def test_align_ports_moves_rows(self):
        t = get_base("or_base")
        rows = {3: 2, 2: 9, 1: 16}
        out = align_ports(t, rows, target_height=22)
        got = {p.slot: p.row for p in out.ports}
        assert got == rows
        assert out.height == 22

    def test_aligned_or_certifies(self):
        t = align_ports(get_base("or_base"), {3: 2, 2: 9, 1: 14}, target_height=20)
        rep = conformance(t, LIMITS)
        assert rep.certified, rep.to_dict()


class TestHarness:
    def test_harness_is_valid_level(self):
        from hanano.engine import validate_level

        for name in ("or_base", "and_base", "red_bend", "terminator"):
            h = build_harness(get_base(name))
            assert validate_level(h.level) == []
