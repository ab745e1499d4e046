"""Radix-breakout flattening of Dragonfly-family networks.

Doubling the switch radix doubles the global ports per switch and the
switches per group (so NICs per group quadruple) while the group count
drops to a quarter, at fixed total NIC count. Once one switch's global
ports reach every remaining group the hierarchy has flattened.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

DRAGONFLY = "dragonfly"
DRAGONFLY_PLUS = "dragonfly_plus"


class FlatteningClass(enum.Enum):
    DRAGONFLY = "Dragonfly"
    DRAGONFLY_PLUS = "DragonflyPlus"
    HYPERX_2D = "HyperX2D"
    FAT_TREE_PLUS_HYPERX = "FatTreePlusHyperX"
    MULTI_PLANE_FAT_TREE = "MultiPlaneFatTree"


@dataclass(frozen=True)
class DragonflyState:
    """A Dragonfly/Dragonfly+ configuration tracked through breakout steps.

    For the plus variant, ``switches_per_group`` counts the spines (the
    switches that own global ports) and ``nics_per_switch`` the NICs each
    leaf-equivalent switch serves; classification only needs the global
    ports and the group count.
    """

    radix: int
    nics_per_switch: int
    switches_per_group: int
    global_ports_per_switch: int
    groups: int
    variant: str = DRAGONFLY

    def __post_init__(self) -> None:
        for name in ("radix", "nics_per_switch", "switches_per_group",
                     "global_ports_per_switch", "groups"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.variant not in (DRAGONFLY, DRAGONFLY_PLUS):
            raise ValueError(f"unknown variant: {self.variant}")

    @property
    def nics_per_group(self) -> int:
        return self.nics_per_switch * self.switches_per_group

    @classmethod
    def balanced(cls, radix: int, global_ports_per_switch: int,
                 nics_per_group: int, groups: int,
                 variant: str = DRAGONFLY) -> "DragonflyState":
        """Build a state from the balanced a = 2p = 2h sizing rule."""
        p = math.isqrt(nics_per_group // 2)
        a = 2 * p
        if p * a != nics_per_group:
            raise ValueError(
                f"{nics_per_group} NICs/group is not a balanced p*(2p) product")
        return cls(radix, p, a, global_ports_per_switch, groups, variant)


def breakout_step(state: DragonflyState) -> DragonflyState:
    """One radix-doubling step at fixed total NIC count.

    Radix, global ports, NICs per switch and switches per group all double
    (NICs per group quadruple); the group count shrinks to ceil(g/4) so
    capacity never drops when 4 does not divide g.
    """
    return replace(
        state,
        radix=state.radix * 2,
        nics_per_switch=state.nics_per_switch * 2,
        switches_per_group=state.switches_per_group * 2,
        global_ports_per_switch=state.global_ports_per_switch * 2,
        groups=-(-state.groups // 4),
    )


def classify(state: DragonflyState) -> FlatteningClass:
    """Classify what the configuration has (or has not) flattened into.

    A dragonfly whose per-switch global ports reach every other group is a
    2D HyperX (one fully meshed dimension inside the group, one across
    groups); a single remaining group is the degenerate mesh case and keeps
    that class. A dragonfly+ whose spine global ports reach every other
    group is a 2-layer fat-tree wired into a HyperX across groups, and one
    single group is a plain multi-plane fat-tree.
    """
    h, g = state.global_ports_per_switch, state.groups
    if state.variant == DRAGONFLY:
        if g == 1 or h >= g - 1:
            return FlatteningClass.HYPERX_2D
        return FlatteningClass.DRAGONFLY
    if g == 1:
        return FlatteningClass.MULTI_PLANE_FAT_TREE
    if h >= g - 1:
        return FlatteningClass.FAT_TREE_PLUS_HYPERX
    return FlatteningClass.DRAGONFLY_PLUS


def trace(state: DragonflyState, steps: int
          ) -> list[tuple[int, DragonflyState, FlatteningClass]]:
    """States and classes from step 0 (the input) through ``steps`` breakouts."""
    out = [(0, state, classify(state))]
    for i in range(1, steps + 1):
        state = breakout_step(state)
        out.append((i, state, classify(state)))
    return out
