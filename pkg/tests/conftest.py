"""Shared helpers: size hardware to fit a family under test."""

from __future__ import annotations

import pytest
from hypothesis import settings

from mphx.model import (
    FamilyParams,
    FatTree3Params,
    MphxParams,
    MpFatTree2Params,
    NicSpec,
    SwitchSpec,
    TopologyParams,
)
from mphx.specs import plane_count_of

settings.register_profile("repro", derandomize=True, max_examples=60)
settings.load_profile("repro")


def fit_hardware(family: FamilyParams, nic_bandwidth: int = 1600,
                 min_ports: int = 64) -> tuple[NicSpec, SwitchSpec]:
    """NIC/switch specs sized to the family (exact radix for trees)."""
    nic = NicSpec(nic_bandwidth, plane_count_of(family))
    rate = nic.port_rate_gbps
    if isinstance(family, MpFatTree2Params):
        ports = family.per_plane_radix
    elif isinstance(family, FatTree3Params):
        ports = family.k
    elif isinstance(family, MphxParams):
        ports = max(family.ports_per_switch, 1)
    else:
        ports = min_ports
    return nic, SwitchSpec(rate * ports, ports, rate)


def make_params(family: FamilyParams, **kwargs) -> TopologyParams:
    nic, sw = fit_hardware(family, **kwargs)
    return TopologyParams(family, nic, sw)


@pytest.fixture
def tiny_mphx_params() -> TopologyParams:
    """MPHX(1,2,(2)): 4 NICs, 2 switches, 5 links."""
    return make_params(MphxParams(1, 2, (2,)))
