"""Radix-breakout flattening: step rule, classification, invariants."""

import pytest
from hypothesis import given, strategies as st

from mphx.flattening import (
    DRAGONFLY,
    DRAGONFLY_PLUS,
    DragonflyState,
    FlatteningClass,
    breakout_step,
    classify,
    trace,
)
from mphx.metrics import analytic_diameter
from mphx.model import MphxParams

from conftest import make_params

FRONTIER = DragonflyState.balanced(64, 16, 512, 80)


class TestBreakoutStep:
    def test_frontier_single_step(self):
        after = breakout_step(FRONTIER)
        assert after.radix == 128
        assert after.global_ports_per_switch == 32
        assert after.nics_per_group == 2_048
        assert after.groups == 20

    def test_second_step(self):
        after = breakout_step(breakout_step(FRONTIER))
        assert after.radix == 256
        assert after.global_ports_per_switch == 64
        assert after.groups == 5

    def test_single_group_fixed_point(self):
        state = DragonflyState(64, 4, 8, 4, 1)
        assert breakout_step(state).groups == 1

    @given(groups=st.integers(1, 500), p=st.integers(1, 8),
           a=st.integers(1, 64), h=st.integers(1, 64))
    def test_capacity_never_drops(self, groups, p, a, h):
        state = DragonflyState(256, p, a, h, groups)
        after = breakout_step(state)
        before_total = state.nics_per_group * state.groups
        after_total = after.nics_per_group * after.groups
        assert after_total >= before_total
        if groups % 4 == 0:
            assert after_total == before_total


class TestClassify:
    def test_frontier_pre_state_is_dragonfly(self):
        assert classify(FRONTIER) is FlatteningClass.DRAGONFLY

    def test_frontier_post_state_is_hyperx2d(self):
        assert classify(breakout_step(FRONTIER)) is FlatteningClass.HYPERX_2D

    def test_single_group_plus_variant(self):
        state = DragonflyState(64, 4, 8, 4, 1, DRAGONFLY_PLUS)
        assert classify(state) is FlatteningClass.MULTI_PLANE_FAT_TREE

    def test_plus_variant_partial_flattening(self):
        state = DragonflyState(128, 8, 16, 20, 16, DRAGONFLY_PLUS)
        assert classify(state) is FlatteningClass.FAT_TREE_PLUS_HYPERX
        tight = DragonflyState(128, 8, 16, 4, 16, DRAGONFLY_PLUS)
        assert classify(tight) is FlatteningClass.DRAGONFLY_PLUS

    @given(st.integers(1, 200), st.integers(1, 64), st.integers(0, 5))
    def test_hyperx2d_is_absorbing(self, groups, h, steps):
        state = DragonflyState(64, 2, 4, h, groups)
        reached = False
        for _ in range(steps + 1):
            if classify(state) is FlatteningClass.HYPERX_2D:
                reached = True
            elif reached and state.variant == DRAGONFLY:
                pytest.fail("HyperX2D class was lost after further breakout")
            state = breakout_step(state)

    def test_hyperx2d_state_maps_to_diameter_two_mesh(self):
        state = breakout_step(FRONTIER)
        assert classify(state) is FlatteningClass.HYPERX_2D
        fam = MphxParams(1, 2, (state.switches_per_group, state.groups))
        assert analytic_diameter(make_params(fam)) == 2


class TestTrace:
    def test_trace_includes_initial_state(self):
        rows = trace(FRONTIER, 1)
        assert len(rows) == 2
        assert rows[0][0] == 0 and rows[0][2] is FlatteningClass.DRAGONFLY
        assert rows[1][2] is FlatteningClass.HYPERX_2D

    def test_balanced_constructor_rejects_unbalanced(self):
        with pytest.raises(ValueError):
            DragonflyState.balanced(64, 16, 500, 80)
