import pytest

from hanano.engine import (
    IllegalMove,
    Slide,
    Swap,
    apply_move,
    is_solved,
    legal_moves,
    mirror,
    normalize,
    settle,
    validate_level,
    Level,
    Block,
    Flower,
)
from hanano.grid import parse_grid


def grid(text, **kw):
    return parse_grid(text, **kw)


def find(level, bid):
    return level.block(bid)


def cell_of(level, bid):
    b = find(level, bid)
    assert len(b.cells) == 1
    return next(iter(b.cells))


class TestValidate:
    def test_empty_level_is_valid(self):
        assert validate_level(Level(1, 1)) == []

    def test_overlap_reported(self):
        lv = Level(
            3,
            3,
            blocks=(
                Block("a", "movable-gray", frozenset([(1, 1)])),
                Block("c", "movable-gray", frozenset([(1, 1)])),
            ),
        )
        assert any("overlap at (1,1)" in p for p in validate_level(lv))

    def test_missing_anchor_reported(self):
        lv = Level(3, 3, flowers=(Flower("blue", (1, 1), "nope", "up"),))
        assert any("does not exist" in p for p in validate_level(lv))

    def test_colored_must_be_single_cell(self):
        lv = Level(
            3,
            3,
            blocks=(Block("c", "colored", frozenset([(0, 0), (1, 0)]), color="blue", arrow="up"),),
        )
        assert any("1x1" in p for p in validate_level(lv))


class TestGravity:
    def test_block_on_floor_unchanged(self):
        lv = grid(
            """
            ...
            .A.
            """
        )
        assert settle(lv) == lv

    def test_block_falls_to_floor(self):
        lv = grid(
            """
            .A.
            ...
            ...
            """
        )
        out = settle(lv)
        assert find(out, "GA").cells == frozenset([(1, 0)])

    def test_stack_falls_together(self):
        lv = grid(
            """
            .A.
            .C.
            ...
            ...
            """
        )
        out = settle(lv)
        assert find(out, "GC").cells == frozenset([(1, 0)])
        assert find(out, "GA").cells == frozenset([(1, 1)])

    def test_immovable_floats_and_supports(self):
        lv = grid(
            """
            .A.
            .#.
            ...
            """
        )
        out = settle(lv)
        assert find(out, "GA").cells == frozenset([(1, 2)])

    def test_flower_moves_with_anchor(self):
        lv = grid(
            """
            .*.
            .A.
            ...
            """
        )
        out = settle(lv)
        assert find(out, "GA").cells == frozenset([(1, 0)])
        assert out.flowers[0].cell == (1, 1)

    def test_flower_supports_other_block(self):
        # A carries a flower on top; C rests on that flower.
        lv = grid(
            """
            .C.
            .*.
            .A.
            """
        )
        out = settle(lv)
        assert find(out, "GC").cells == frozenset([(1, 2)])

    def test_interlocked_pair_falls_as_group(self):
        # A hooks over C; neither rests on floor/immovable, both must drop.
        lv = grid(
            """
            AA.
            AC.
            CC.
            ...
            """
        )
        out = settle(lv)
        assert (0, 0) in find(out, "GC").cells


class TestMoves:
    def test_slide_right_available(self):
        lv = grid(
            """
            b..
            ###
            """
        )
        assert Slide("b0", "right") in legal_moves(lv)

    def test_slide_blocked_by_edge(self):
        lv = grid(
            """
            ..b
            ###
            """
        )
        assert Slide("b0", "right") not in legal_moves(lv)

    def test_slide_blocked_by_block(self):
        lv = grid(
            """
            Ab.
            ###
            """
        )
        assert Slide("b0", "left") not in legal_moves(lv)

    def test_slide_applies_and_settles(self):
        lv = grid(
            """
            b..
            #..
            ...
            """
        )
        out = apply_move(lv, Slide("b0", "right"))
        assert cell_of(out, "b0") == (1, 0)

    def test_illegal_move_raises(self):
        lv = grid(
            """
            ..b
            ###
            """
        )
        with pytest.raises(IllegalMove):
            apply_move(lv, Slide("b0", "right"))

    def test_swap_of_width_one_neighbors(self):
        lv = grid(
            """
            Ab.
            ###
            """
        )
        out = apply_move(lv, Swap("GA", "b0"))
        assert find(out, "GA").cells == frozenset([(1, 1)])
        assert cell_of(out, "b0") == (0, 1)

    def test_swap_with_flower_composite(self):
        # A carries a flower: the pair still swaps when nothing else conflicts.
        lv = grid(
            """
            *..
            Ab.
            ###
            """,
            flowers={(0, 2): ("GA", "up")},
        )
        assert Swap("GA", "b0") in legal_moves(lv)
        out = apply_move(lv, Swap("GA", "b0"))
        assert find(out, "GA").cells == frozenset([(1, 1)])
        assert out.flowers[0].cell == (1, 2)

    def test_swap_blocked_when_composite_collides(self):
        # the flower above A would land inside the wall: no swap
        lv = grid(
            """
            *#.
            Ab.
            ###
            """,
            flowers={(0, 2): ("GA", "up")},
        )
        assert Swap("GA", "b0") not in legal_moves(lv)

    def test_wide_block_cannot_swap(self):
        lv = grid(
            """
            AAb
            ###
            """
        )
        assert Swap("GA", "b0") not in legal_moves(lv)


class TestBloom:
    def test_unobstructed_bloom(self):
        lv = grid(
            """
            ....
            .b*.
            .###
            """
        )
        out = normalize(lv)
        b = find(out, "b0")
        assert b.bloomed
        new = [f for f in out.flowers if f.anchor_block == "b0"]
        assert len(new) == 1 and new[0].cell == (1, 2)

    def test_color_mismatch_no_bloom(self):
        lv = grid(
            """
            ....
            .r*.
            .###
            """
        )
        out = normalize(lv)
        assert not find(out, "r0").bloomed

    def test_blocked_bloom_does_not_fire(self):
        # wall above, no room below: the flower cannot bloom
        lv = grid(
            """
            .#..
            .b*.
            .###
            """
        )
        out = normalize(lv)
        assert not find(out, "b0").bloomed

    def test_bloom_pushes_block_up(self):
        lv = grid(
            """
            ....
            .A..
            .b*.
            .###
            """
        )
        out = normalize(lv)
        assert find(out, "b0").bloomed
        assert find(out, "GA").cells == frozenset([(1, 3)])
        new = [f for f in out.flowers if f.anchor_block == "b0"]
        assert new[0].cell == (1, 2)

    def test_bloom_push_chain_carries_stack(self):
        lv = grid(
            """
            .....
            .C...
            .A...
            .b*..
            .####
            """
        )
        out = normalize(lv)
        assert find(out, "GA").cells == frozenset([(1, 3)])
        assert find(out, "GC").cells == frozenset([(1, 4)])

    def test_bloom_counter_shift_moves_bloomer_down(self):
        # wall above the blue block, an empty pit below it: the bloomer
        # shifts down one cell and the flower opens in the vacated cell.
        lv = grid(
            """
            .#..
            .b*.
            ....
            .###
            """
        )
        out = normalize(lv)
        b = find(out, "b0")
        assert b.bloomed
        assert b.cells == frozenset([(1, 1)])
        new = [f for f in out.flowers if f.anchor_block == "b0"]
        assert new[0].cell == (1, 2)

    def test_chain_bloom_in_one_step(self):
        # the lower block's new flower touches the upper block: both bloom
        lv = grid(
            """
            ....
            ..b.
            .b*.
            .###
            """
        )
        out = normalize(lv)
        assert all(b.bloomed for b in out.blocks if b.kind == "colored")

    def test_sealed_block_never_blooms(self):
        lv = grid(
            """
            ###
            #b#
            ###
            """
        )
        out = normalize(lv)
        assert not find(out, "b0").bloomed
        assert not is_solved(out)


class TestMirror:
    def test_involution(self):
        lv = grid(
            """
            .A*.
            .#b.
            ####
            """,
            flowers={(2, 2): ("GA", "right")},
        )
        assert mirror(mirror(lv)) == lv

    def test_arrow_and_side_flip(self):
        lv = Level(
            3,
            2,
            blocks=(
                Block("c", "colored", frozenset([(0, 1)]), color="blue", arrow="left"),
                Block("w", "immovable-gray", frozenset([(2, 1)])),
            ),
            flowers=(Flower("blue", (2, 0), "w", "down"),),
        )
        m = mirror(lv)
        assert m.block("c").arrow == "right"
        assert m.block("c").cells == frozenset([(2, 1)])
        assert m.flowers[0].cell == (0, 0)
        assert m.flowers[0].anchor_side == "down"


class TestSolvedAndScan:
    def test_zero_colored_blocks_is_solved(self):
        assert is_solved(Level(2, 2))

    def test_scan_starts_at_lowest_row_and_cascades(self):
        # the lower blue blooms first, pushing the upper one up; the new
        # flower then triggers the upper block in the same resolution step.
        lv = grid(
            """
            .....
            .....
            .b...
            .b*..
            #####
            """
        )
        out = normalize(lv)
        assert all(b.bloomed for b in out.blocks if b.kind == "colored")
        cells = {next(iter(b.cells)) for b in out.blocks if b.kind == "colored"}
        assert cells == {(1, 1), (1, 3)}
