"""Shared data model for multi-plane network topologies.

A topology is an explicit undirected multigraph over NIC and switch nodes.
Every NIC owns one port per plane; switches live in exactly one plane and
carry family-specific coordinates (mixed-radix position for HyperX meshes,
(layer, index) for trees, (group, index) for Dragonfly variants).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Union

#: Breakout rates of the default 102.4 Tbps switch generation. The rate set
#: is open at the type level; these four are only the pricing defaults.
STANDARD_RATES_GBPS = (200, 400, 800, 1600)

#: A single NIC can be broken out into at most this many ports/planes.
MAX_NIC_PORTS = 8

OPTICAL = "optical"
COPPER = "copper"


class InfeasibleParamsError(ValueError):
    """Construction parameters that cannot be realized as a topology."""


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise InfeasibleParamsError(message)


@dataclass(frozen=True)
class NicSpec:
    """A NIC with total outbound bandwidth split evenly over its ports."""

    total_bandwidth_gbps: int
    port_count: int

    def __post_init__(self) -> None:
        _require(self.total_bandwidth_gbps > 0, "NIC bandwidth must be positive")
        _require(
            1 <= self.port_count <= MAX_NIC_PORTS,
            f"NIC port count must be in 1..{MAX_NIC_PORTS}, got {self.port_count}",
        )
        _require(
            self.total_bandwidth_gbps % self.port_count == 0,
            f"NIC bandwidth {self.total_bandwidth_gbps} not divisible by "
            f"{self.port_count} ports",
        )

    @property
    def port_rate_gbps(self) -> int:
        return self.total_bandwidth_gbps // self.port_count


@dataclass(frozen=True)
class SwitchSpec:
    """A switch generation fixed by total bandwidth and one breakout mode."""

    total_bandwidth_gbps: int
    breakout_port_count: int
    breakout_rate_gbps: int

    def __post_init__(self) -> None:
        _require(self.breakout_port_count > 0, "switch port count must be positive")
        _require(self.breakout_rate_gbps > 0, "switch port rate must be positive")
        _require(
            self.breakout_port_count * self.breakout_rate_gbps
            == self.total_bandwidth_gbps,
            f"{self.breakout_port_count} x {self.breakout_rate_gbps}G != "
            f"{self.total_bandwidth_gbps}G total",
        )

    def base_radix(self, nic: NicSpec) -> int:
        """Port count at full NIC bandwidth (total switch bw / NIC bw)."""
        _require(
            self.total_bandwidth_gbps % nic.total_bandwidth_gbps == 0,
            "switch bandwidth is not a multiple of the NIC bandwidth",
        )
        return self.total_bandwidth_gbps // nic.total_bandwidth_gbps


def breakout_options(switch_total_gbps: int, nic: NicSpec) -> list[tuple[int, int]]:
    """Feasible (port_count, rate_gbps) switch breakouts matching a NIC.

    A breakout into f lower-rate ports is paired with the NIC broken into the
    same factor f, so only factors up to the NIC's own port count apply. The
    result is empty when no factor yields an exact port/rate split.
    """
    options: list[tuple[int, int]] = []
    for factor in (1, 2, 4, 8):
        if factor > nic.port_count:
            break
        if nic.total_bandwidth_gbps % factor:
            continue
        rate = nic.total_bandwidth_gbps // factor
        if switch_total_gbps % rate:
            continue
        options.append((switch_total_gbps // rate, rate))
    return options


# ---------------------------------------------------------------------------
# Per-family construction parameters


@dataclass(frozen=True)
class MphxParams:
    """Multi-plane HyperX: n planes, p NIC ports per switch, mesh dims.

    ``multiplicities[i]`` is the uniform link count per neighbor pair in
    dimension i. ``dim_port_budgets[i]``, when set, overrides it with a
    per-switch port budget for that dimension: every pair gets
    ``budget // (dims[i]-1)`` links and the remainder is spread as a
    deterministic near-regular circulant (see generators).
    """

    plane_count: int
    nic_ports_per_switch: int
    dims: tuple[int, ...]
    multiplicities: tuple[int, ...] = ()
    dim_port_budgets: tuple[int | None, ...] = ()

    def __post_init__(self) -> None:
        dims = tuple(int(d) for d in self.dims)
        mult = tuple(int(m) for m in self.multiplicities) or (1,) * len(dims)
        budgets = tuple(self.dim_port_budgets) or (None,) * len(dims)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "multiplicities", mult)
        object.__setattr__(self, "dim_port_budgets", budgets)
        if not 1 <= self.plane_count <= MAX_NIC_PORTS:
            raise InfeasibleParamsError(
                f"plane count must be in 1..{MAX_NIC_PORTS}")
        if self.nic_ports_per_switch < 1:
            raise InfeasibleParamsError("p must be >= 1")
        if not dims or min(dims) < 1:
            raise InfeasibleParamsError("dimension sizes must be >= 1")
        if len(mult) != len(dims) or min(mult) < 1:
            raise InfeasibleParamsError(
                "need one multiplicity >= 1 per dimension")
        if len(budgets) != len(dims):
            raise InfeasibleParamsError("one budget slot per dimension")
        for i, (size, budget) in enumerate(zip(dims, budgets)):
            if budget is None:
                continue
            if size < 2:
                raise InfeasibleParamsError(
                    f"dimension {i + 1} of size 1 cannot carry a budget")
            if budget < size - 1:
                raise InfeasibleParamsError(
                    f"dimension {i + 1} budget {budget} below mesh degree {size - 1}")

    def dim_ports(self, i: int) -> int:
        """Inter-switch ports one switch spends in dimension i."""
        budget = self.dim_port_budgets[i]
        if budget is not None:
            return budget
        return (self.dims[i] - 1) * self.multiplicities[i]

    @property
    def ports_per_switch(self) -> int:
        """Total ports one switch uses: NICs plus every dimension mesh."""
        return self.nic_ports_per_switch + sum(
            self.dim_ports(i) for i in range(len(self.dims))
        )

    @property
    def switches_per_plane(self) -> int:
        n = 1
        for d in self.dims:
            n *= d
        return n

    @property
    def nic_count(self) -> int:
        return self.nic_ports_per_switch * self.switches_per_plane


@dataclass(frozen=True)
class FatTree3Params:
    """Classic 3-layer k-ary fat-tree (k pods, full bisection)."""

    k: int

    def __post_init__(self) -> None:
        _require(self.k >= 2, "fat-tree radix must be >= 2")
        _require(self.k % 2 == 0, f"fat-tree radix must be even, got {self.k}")

    @property
    def nic_count(self) -> int:
        return self.k**3 // 4

    @property
    def switch_count(self) -> int:
        return 5 * self.k**2 // 4


@dataclass(frozen=True)
class MpFatTree2Params:
    """Multi-plane 2-layer (leaf/spine) fat-tree at explicit scale."""

    plane_count: int
    per_plane_radix: int
    nic_count: int

    def __post_init__(self) -> None:
        _require(1 <= self.plane_count <= MAX_NIC_PORTS,
                 f"plane count must be in 1..{MAX_NIC_PORTS}")
        r, n = self.per_plane_radix, self.nic_count
        _require(r >= 2 and r % 2 == 0, "per-plane radix must be even and >= 2")
        _require(n >= 1, "NIC count must be >= 1")
        _require(n <= r * r // 2, f"{n} NICs exceed the r^2/2 = {r * r // 2} maximum")
        _require((2 * n) % r == 0,
                 f"{n} NICs do not fill leaves evenly (N must be divisible by r/2)")
        leaves = 2 * n // r
        _require(leaves % 2 == 0, f"leaf count {leaves} must be even (spines = leaves/2)")
        _require(r % leaves == 0,
                 f"leaf uplinks do not divide evenly over spines "
                 f"(radix {r} not divisible by leaf count {leaves})")

    @property
    def leaves_per_plane(self) -> int:
        return 2 * self.nic_count // self.per_plane_radix

    @property
    def spines_per_plane(self) -> int:
        return self.leaves_per_plane // 2

    @property
    def leaf_spine_multiplicity(self) -> int:
        # r/2 uplinks per leaf spread uniformly over leaves/2 spines.
        return self.per_plane_radix // self.leaves_per_plane

    @property
    def switch_count(self) -> int:
        return self.plane_count * (self.leaves_per_plane + self.spines_per_plane)


@dataclass(frozen=True)
class DragonflyParams:
    """Dragonfly: fully meshed groups joined by distributed global links."""

    nics_per_switch: int
    switches_per_group: int
    global_ports_per_switch: int
    groups: int

    def __post_init__(self) -> None:
        p, a, h, g = (self.nics_per_switch, self.switches_per_group,
                      self.global_ports_per_switch, self.groups)
        _require(p >= 1 and a >= 1 and h >= 0 and g >= 1,
                 "dragonfly parameters must be positive (h may be 0 only if g=1)")
        if g > 1:
            _require(h >= 1, "multiple groups need global ports")
            _require(g <= a * h + 1,
                     f"{g} groups exceed the a*h+1 = {a * h + 1} reachable maximum")

    @property
    def nic_count(self) -> int:
        return self.nics_per_switch * self.switches_per_group * self.groups

    @property
    def switch_count(self) -> int:
        return self.switches_per_group * self.groups


@dataclass(frozen=True)
class DragonflyPlusParams:
    """Dragonfly+: leaf/spine groups, NICs on leaves, globals on spines.

    ``uplinks_per_pair`` and ``global_ports_per_spine`` may be left unset;
    the generator derives them to fill the paired switch radix exactly.
    """

    leaves_per_group: int
    spines_per_group: int
    nics_per_leaf: int
    groups: int
    uplinks_per_pair: int | None = None
    global_ports_per_spine: int | None = None

    def __post_init__(self) -> None:
        _require(self.leaves_per_group >= 1, "need at least one leaf per group")
        _require(self.spines_per_group >= 1, "need at least one spine per group")
        _require(self.nics_per_leaf >= 1, "need at least one NIC per leaf")
        _require(self.groups >= 1, "need at least one group")
        if self.uplinks_per_pair is not None:
            _require(self.uplinks_per_pair >= 1, "uplinks per pair must be >= 1")
        if self.global_ports_per_spine is not None:
            _require(self.global_ports_per_spine >= 0, "global ports must be >= 0")

    @property
    def nic_count(self) -> int:
        return self.nics_per_leaf * self.leaves_per_group * self.groups

    @property
    def switch_count(self) -> int:
        return (self.leaves_per_group + self.spines_per_group) * self.groups


FamilyParams = Union[
    MphxParams, FatTree3Params, MpFatTree2Params, DragonflyParams, DragonflyPlusParams
]

FAMILY_TAGS = {
    MphxParams: "mphx",
    FatTree3Params: "ft3",
    MpFatTree2Params: "mpft2",
    DragonflyParams: "dfly",
    DragonflyPlusParams: "dflyplus",
}


@dataclass(frozen=True)
class TopologyParams:
    """A family descriptor plus the NIC and switch hardware it is built on."""

    family: FamilyParams
    nic: NicSpec
    switch: SwitchSpec

    @property
    def family_tag(self) -> str:
        return FAMILY_TAGS[type(self.family)]


# ---------------------------------------------------------------------------
# Realized topology graph

NIC = "nic"
SWITCH = "switch"


@dataclass(frozen=True)
class Node:
    id: int
    kind: str
    plane: int | None = None
    coords: tuple[int, ...] | None = None


@dataclass(frozen=True)
class Link:
    """Undirected link bundle; multiplicity m consumes m ports per endpoint."""

    a: int
    b: int
    rate_gbps: int
    multiplicity: int = 1
    medium: str = OPTICAL


@dataclass(frozen=True)
class Topology:
    """Immutable multi-plane graph; safe for any number of concurrent readers."""

    planes: int
    nodes: tuple[Node, ...]
    links: tuple[Link, ...]
    params: TopologyParams
    link_shortfall: Fraction = Fraction(0)
    notes: tuple[str, ...] = ()

    @cached_property
    def node_by_id(self) -> dict[int, Node]:
        return {n.id: n for n in self.nodes}

    @cached_property
    def nics(self) -> tuple[Node, ...]:
        return tuple(n for n in self.nodes if n.kind == NIC)

    @cached_property
    def switches(self) -> tuple[Node, ...]:
        return tuple(n for n in self.nodes if n.kind == SWITCH)

    @property
    def nic_count(self) -> int:
        return len(self.nics)

    @property
    def switch_count(self) -> int:
        return len(self.switches)

    def plane_switches(self, plane: int) -> list[Node]:
        """Switches of one plane in coordinate order (dense id order)."""
        return sorted(
            (n for n in self.switches if n.plane == plane), key=lambda n: n.id
        )


def sort_links(link_map: dict[tuple[int, int], Link]) -> tuple[Link, ...]:
    """Canonical link order: ascending (min endpoint, max endpoint)."""
    return tuple(link_map[key] for key in sorted(link_map))


# ---------------------------------------------------------------------------
# Validation

#: Violation codes emitted by validate().
NIC_PLANE_PORTS = "nic-plane-ports"
SWITCH_PORT_BUDGET = "switch-port-budget"
PLANE_DISCONNECTED = "plane-disconnected"
NIC_NIC_LINK = "nic-nic-link"
CROSS_PLANE_LINK = "cross-plane-link"
LINK_CENSUS = "link-census"


@dataclass(frozen=True)
class Violation:
    code: str
    subject: int | None
    message: str


def validate(topology: Topology) -> list[Violation]:
    """Check every structural invariant; an empty list means valid.

    Violations are data, not errors: each one names the offending node,
    link or plane. Link endpoints must resolve (that is a precondition,
    reported as ValueError rather than a violation).
    """
    nodes = topology.node_by_id
    for link in topology.links:
        if link.a not in nodes or link.b not in nodes:
            raise ValueError(f"link {link.a}-{link.b} has an unresolved endpoint")

    out: list[Violation] = []
    nic_plane_ports: dict[int, dict[int, int]] = {
        n.id: {} for n in topology.nics
    }
    switch_ports: dict[int, int] = {s.id: 0 for s in topology.switches}
    plane_adj: dict[int, dict[int, list[int]]] = {
        q: {} for q in range(topology.planes)
    }

    def _adj_add(plane: int, u: int, v: int) -> None:
        plane_adj[plane].setdefault(u, []).append(v)
        plane_adj[plane].setdefault(v, []).append(u)

    for link in topology.links:
        na, nb = nodes[link.a], nodes[link.b]
        kinds = {na.kind, nb.kind}
        if kinds == {NIC}:
            out.append(Violation(NIC_NIC_LINK, link.a,
                                 f"link {link.a}-{link.b} joins two NICs"))
            continue
        if kinds == {SWITCH}:
            if na.plane != nb.plane:
                out.append(Violation(
                    CROSS_PLANE_LINK, link.a,
                    f"link {link.a}-{link.b} joins planes {na.plane} and {nb.plane}"))
                continue
            switch_ports[na.id] += link.multiplicity
            switch_ports[nb.id] += link.multiplicity
            _adj_add(na.plane, na.id, nb.id)
        else:
            nic, sw = (na, nb) if na.kind == NIC else (nb, na)
            ports = nic_plane_ports[nic.id]
            ports[sw.plane] = ports.get(sw.plane, 0) + link.multiplicity
            switch_ports[sw.id] += link.multiplicity
            _adj_add(sw.plane, nic.id, sw.id)

    expected_planes = set(range(topology.planes))
    for nic in topology.nics:
        ports = nic_plane_ports[nic.id]
        if set(ports) != expected_planes or any(c != 1 for c in ports.values()):
            summary = ", ".join(f"plane {q}: {c}" for q, c in sorted(ports.items()))
            out.append(Violation(
                NIC_PLANE_PORTS, nic.id,
                f"NIC {nic.id} must have exactly one port per plane "
                f"(got {summary or 'none'})"))

    budget = topology.params.switch.breakout_port_count
    for sw in topology.switches:
        used = switch_ports[sw.id]
        if used > budget:
            out.append(Violation(
                SWITCH_PORT_BUDGET, sw.id,
                f"switch {sw.id} uses {used} ports, budget is {budget}"))

    for plane in range(topology.planes):
        members = {s.id for s in topology.switches if s.plane == plane}
        members |= {n.id for n in topology.nics}
        if not members:
            continue
        adj = plane_adj[plane]
        start = min(members)
        seen = {start}
        frontier = [start]
        while frontier:
            nxt: list[int] = []
            for u in frontier:
                for v in adj.get(u, ()):
                    if v not in seen:
                        seen.add(v)
                        nxt.append(v)
            frontier = nxt
        if seen != members:
            missing = min(members - seen)
            out.append(Violation(
                PLANE_DISCONNECTED, plane,
                f"plane {plane} is disconnected (node {missing} unreachable)"))

    out.extend(_link_census(topology))
    return out


def _link_census(topology: Topology) -> list[Violation]:
    """Compare realized per-rate link totals against the analytic counts.

    Catches mutations (a deleted or duplicated link) that leave the degree
    and connectivity checks satisfied. The recorded parity shortfall of
    budget-dimension meshes is credited back before comparing.
    """
    from . import metrics  # local import: metrics depends on this module

    access = COPPER if any(
        link.medium == COPPER for link in topology.links
    ) else OPTICAL
    try:
        expected = metrics.analytic_counts(topology.params, access_medium=access)
    except InfeasibleParamsError:
        return []
    realized = metrics.tally(topology, access_medium=access)

    out: list[Violation] = []
    rates = set(expected.links_by_rate) | set(realized.links_by_rate)
    for rate in sorted(rates):
        want = Fraction(expected.links_by_rate.get(rate, 0))
        got = Fraction(realized.links_by_rate.get(rate, 0))
        if got + topology.link_shortfall != want:
            out.append(Violation(
                LINK_CENSUS, None,
                f"rate {rate}G carries {got} links, expected "
                f"{want - topology.link_shortfall}"))
    return out


# ---------------------------------------------------------------------------
# Plain-text export

def format_rate(rate_gbps: int) -> str:
    if rate_gbps % 1000 == 0:
        return f"{rate_gbps // 1000}T"
    if rate_gbps >= 1000:
        return f"{rate_gbps / 1000:g}T"
    return f"{rate_gbps}G"


def export_topology(topology: Topology) -> str:
    """Serialize to the line-oriented NODE/LINK format.

    Header comments echo the construction parameters. NODE records are
    ordered by id, LINK records by (min id, max id); the output is
    byte-stable for identical topologies.
    """
    from . import specs  # local import: specs depends on this module

    params = topology.params
    lines = [
        f"# topology {specs.format_spec(params.family)}",
        f"# nic {params.nic.total_bandwidth_gbps}G x{params.nic.port_count}",
        f"# switch {params.switch.total_bandwidth_gbps}G as "
        f"{params.switch.breakout_port_count}x"
        f"{format_rate(params.switch.breakout_rate_gbps)}",
        f"# planes {topology.planes}",
    ]
    if topology.link_shortfall:
        lines.append(f"# link-shortfall {topology.link_shortfall}")
    for note in topology.notes:
        lines.append(f"# note {note}")
    for node in sorted(topology.nodes, key=lambda n: n.id):
        plane = "-" if node.plane is None else str(node.plane)
        coords = "-" if node.coords is None else ",".join(map(str, node.coords))
        lines.append(f"NODE {node.id} {node.kind} {plane} {coords}")
    for link in sorted(topology.links, key=lambda l: (min(l.a, l.b), max(l.a, l.b))):
        lo, hi = min(link.a, link.b), max(link.a, link.b)
        lines.append(
            f"LINK {lo} {hi} {link.rate_gbps} {link.multiplicity} {link.medium}"
        )
    return "\n".join(lines) + "\n"
