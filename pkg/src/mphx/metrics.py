"""Component counts, diameter and relative bisection bandwidth.

Every quantity is available two ways: measured on a realized graph
(tally, diameter_switch_hops, bisection_bruteforce) and in closed form
from the construction parameters (analytic_counts, analytic_diameter,
bisection_estimate). Exact integer/rational arithmetic is used until
display time so golden comparisons never see float drift.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .generators import group_pair_multiplicities, resolve_dragonfly_plus
from .model import (
    COPPER,
    NIC,
    OPTICAL,
    SWITCH,
    DragonflyParams,
    DragonflyPlusParams,
    FatTree3Params,
    InfeasibleParamsError,
    MphxParams,
    MpFatTree2Params,
    Topology,
    TopologyParams,
)

#: Sentinel relative bisection for graphs with no inter-switch cut.
UNBOUNDED = float("inf")


class MetricsError(ValueError):
    """A metric that cannot be computed for the given instance."""


@dataclass(frozen=True)
class ComponentCounts:
    """Node and link tallies, with optical modules counted per switch port.

    ``links_by_rate`` counts link bundles weighted by multiplicity (copper
    included); ``optical_modules_by_rate`` counts two transceivers per
    optical link.
    """

    nic_count: int
    switch_count: int
    links_by_rate: dict[int, int]
    copper_links_by_rate: dict[int, int]
    optical_modules_by_rate: dict[int, int]

    @property
    def total_links(self) -> int:
        return sum(self.links_by_rate.values())

    @property
    def total_optical_modules(self) -> int:
        return sum(self.optical_modules_by_rate.values())

    @property
    def total_copper_links(self) -> int:
        return sum(self.copper_links_by_rate.values())


def tally(topology: Topology, access_medium: str = OPTICAL) -> ComponentCounts:
    """Count nodes, links and optical modules of a realized graph.

    With ``access_medium="copper"`` every NIC-switch link is tallied as
    copper (zero optical modules) regardless of its stored medium.
    """
    nodes = topology.node_by_id
    links: dict[int, int] = {}
    copper: dict[int, int] = {}
    modules: dict[int, int] = {}
    for link in topology.links:
        links[link.rate_gbps] = links.get(link.rate_gbps, 0) + link.multiplicity
        is_access = (nodes[link.a].kind == NIC) or (nodes[link.b].kind == NIC)
        medium = link.medium
        if is_access and access_medium == COPPER:
            medium = COPPER
        if medium == COPPER:
            copper[link.rate_gbps] = copper.get(link.rate_gbps, 0) + link.multiplicity
        else:
            modules[link.rate_gbps] = (
                modules.get(link.rate_gbps, 0) + 2 * link.multiplicity)
    return ComponentCounts(
        nic_count=topology.nic_count,
        switch_count=topology.switch_count,
        links_by_rate=links,
        copper_links_by_rate=copper,
        optical_modules_by_rate=modules,
    )


def analytic_counts(params: TopologyParams,
                    access_medium: str = OPTICAL) -> ComponentCounts:
    """Closed-form component counts from port accounting.

    Inter-switch optical modules equal the total inter-switch ports engaged
    (two per link); this accounting is authoritative even for budget
    dimensions whose parity makes exact realization drop half a link per
    mesh, so it can differ from a realized tally by exactly twice the
    recorded shortfall.
    """
    fam = params.family
    rate = params.nic.port_rate_gbps
    full_rate = params.nic.total_bandwidth_gbps

    match fam:
        case MphxParams():
            nic_links = fam.nic_count * fam.plane_count
            inter_ports = fam.plane_count * fam.switches_per_plane * sum(
                fam.dim_ports(i) for i in range(len(fam.dims)))
            return _assemble(fam.nic_count, fam.plane_count * fam.switches_per_plane,
                             rate, nic_links, inter_ports, access_medium)
        case FatTree3Params():
            k = fam.k
            nic_links = fam.nic_count
            inter_links = 2 * (k**3 // 4)  # edge-agg + agg-core
            return _assemble(fam.nic_count, fam.switch_count, full_rate,
                             nic_links, 2 * inter_links, access_medium)
        case MpFatTree2Params():
            nic_links = fam.nic_count * fam.plane_count
            uplinks = (fam.plane_count * fam.leaves_per_plane
                       * (fam.per_plane_radix // 2))
            return _assemble(fam.nic_count, fam.switch_count, rate,
                             nic_links, 2 * uplinks, access_medium)
        case DragonflyParams():
            p, a, h, g = (fam.nics_per_switch, fam.switches_per_group,
                          fam.global_ports_per_switch, fam.groups)
            local = g * a * (a - 1) // 2
            glob = a * g * h // 2 if g > 1 else 0
            return _assemble(fam.nic_count, fam.switch_count, full_rate,
                             fam.nic_count, 2 * (local + glob), access_medium)
        case DragonflyPlusParams():
            up, glob = resolve_dragonfly_plus(fam, params.switch)
            leaf_spine = (fam.groups * fam.leaves_per_group
                          * fam.spines_per_group * up)
            global_links = (fam.groups * fam.spines_per_group * glob // 2
                            if fam.groups > 1 else 0)
            return _assemble(fam.nic_count, fam.switch_count, full_rate,
                             fam.nic_count, 2 * (leaf_spine + global_links),
                             access_medium)
    raise TypeError(f"unknown family {type(fam).__name__}")


def _assemble(nics: int, switches: int, rate: int, nic_links: int,
              inter_ports: int, access_medium: str) -> ComponentCounts:
    links = {rate: nic_links + inter_ports // 2}
    if access_medium == COPPER:
        copper = {rate: nic_links}
        modules = {rate: inter_ports}
    else:
        copper = {}
        modules = {rate: 2 * nic_links + inter_ports}
    return ComponentCounts(nics, switches, links,
                           copper, {r: m for r, m in modules.items() if m})


# ---------------------------------------------------------------------------
# Diameter


def _plane_layout(topology: Topology, plane: int):
    """Linear switch indexing, adjacency pairs and NIC attachments of a plane."""
    switches = topology.plane_switches(plane)
    index = {node.id: i for i, node in enumerate(switches)}
    nodes = topology.node_by_id
    edges = []
    attach: dict[int, int] = {}
    for link in topology.links:
        ka, kb = nodes[link.a].kind, nodes[link.b].kind
        if ka == SWITCH and kb == SWITCH:
            if link.a in index and link.b in index:
                lo, hi = sorted((index[link.a], index[link.b]))
                edges.append((lo, hi, link.rate_gbps, link.multiplicity))
        else:
            nic, sw = (link.a, link.b) if ka == NIC else (link.b, link.a)
            if sw in index:
                attach[nic] = index[sw]
    edges.sort()
    return switches, edges, attach


def planes_isomorphic(topology: Topology) -> bool:
    """True when every plane equals plane 0 under the identity linear map."""
    _, edges0, attach0 = _plane_layout(topology, 0)
    for plane in range(1, topology.planes):
        _, edges, attach = _plane_layout(topology, plane)
        if edges != edges0 or attach != attach0:
            return False
    return True


def _plane_diameter(edges, attach, switch_count: int, plane: int) -> int:
    """Max hops between access switches of one plane, by reachability powers."""
    if not attach:
        return 0
    access = sorted(set(attach.values()))
    if len(access) == 1:
        return 0
    adj = np.zeros((switch_count, switch_count), dtype=bool)
    for lo, hi, _rate, _mult in edges:
        adj[lo, hi] = True
        adj[hi, lo] = True
    step = (adj | np.eye(switch_count, dtype=bool)).astype(np.float32)
    reach = np.eye(switch_count, dtype=bool)
    sub = np.ix_(access, access)
    hops = 0
    while not reach[sub].all():
        grown = (reach.astype(np.float32) @ step) > 0
        if (grown == reach).all():
            raise MetricsError(f"plane {plane} is disconnected")
        reach = grown
        hops += 1
    return hops


def diameter_switch_hops(topology: Topology, *,
                         cross_check_all_planes: bool = False) -> int:
    """Network diameter in switch-to-switch hops over NIC pairs.

    The fast path requires every plane to be isomorphic to plane 0 under the
    identity linear map (true for all generated families) and measures plane
    0 only. ``cross_check_all_planes`` forces the slow exhaustive path that
    minimizes over planes per NIC pair; it is limited to small instances.
    """
    if topology.nic_count <= 1:
        return 0
    if not cross_check_all_planes:
        if not planes_isomorphic(topology):
            raise MetricsError(
                "planes are not isomorphic; rerun with cross_check_all_planes=True")
        switches, edges, attach = _plane_layout(topology, 0)
        return _plane_diameter(edges, attach, len(switches), 0)

    if topology.nic_count > 2000 or topology.switch_count > 2000:
        raise MetricsError("instance too large for the all-planes cross-check")
    best: dict[tuple[int, int], float] = {}
    nic_ids = [n.id for n in topology.nics]
    for plane in range(topology.planes):
        switches, edges, attach = _plane_layout(topology, plane)
        count = len(switches)
        adj: dict[int, list[int]] = {}
        for lo, hi, _rate, _mult in edges:
            adj.setdefault(lo, []).append(hi)
            adj.setdefault(hi, []).append(lo)
        dist_from: dict[int, list[float]] = {}
        for src in sorted(set(attach.values())):
            dist = [float("inf")] * count
            dist[src] = 0
            frontier = [src]
            level = 0
            while frontier:
                level += 1
                nxt = []
                for u in frontier:
                    for v in adj.get(u, ()):
                        if dist[v] == float("inf"):
                            dist[v] = level
                            nxt.append(v)
                frontier = nxt
            dist_from[src] = dist
        for i, j in itertools.combinations(nic_ids, 2):
            si, sj = attach.get(i), attach.get(j)
            if si is None or sj is None:
                raise MetricsError(f"NIC {i if si is None else j} missing in "
                                   f"plane {plane}")
            d = dist_from[si][sj]
            key = (i, j)
            if d < best.get(key, float("inf")):
                best[key] = d
    worst = max(best.values(), default=0)
    if worst == float("inf"):
        raise MetricsError("some NIC pair is unreachable in every plane")
    return int(worst)


def analytic_diameter(params: TopologyParams) -> int:
    """Closed-form diameter; equals the measured one on every feasible build."""
    fam = params.family
    match fam:
        case MphxParams():
            return sum(1 for d in fam.dims if d >= 2)
        case FatTree3Params():
            return 4
        case MpFatTree2Params():
            return 2 if fam.leaves_per_plane >= 2 else 0
        case DragonflyParams():
            a, h, g = (fam.switches_per_group, fam.global_ports_per_switch,
                       fam.groups)
            if g == 1:
                return 1 if a >= 2 else 0
            if a * h < g - 1:
                raise InfeasibleParamsError(
                    f"groups are not all directly connected "
                    f"(a*h = {a * h} < g-1 = {g - 1})")
            # With one switch per group there are no local hops at all.
            return 1 if a == 1 else 3
        case DragonflyPlusParams():
            if fam.groups > 1:
                _up, glob = resolve_dragonfly_plus(fam, params.switch)
                total = fam.spines_per_group * glob
                if total < fam.groups - 1:
                    raise InfeasibleParamsError(
                        f"groups are not all directly connected "
                        f"({total} global ports < g-1 = {fam.groups - 1})")
                return 3
            return 2 if fam.leaves_per_group >= 2 else 0
    raise TypeError(f"unknown family {type(fam).__name__}")


# ---------------------------------------------------------------------------
# Relative bisection bandwidth


def _extra_ring_crossing(size: int, extra_degree: int) -> int:
    """Extra links crossing the near-even contiguous split of one mesh.

    Closed form for the circulant layout of mesh_extra_edges: a full ring at
    offset o crosses the two block boundaries 2*o times, the even-size
    matching crosses with every edge, and the odd-size near-matching crosses
    once only when the boundary lands inside a pair.
    """
    crossing = 0
    remaining = extra_degree
    offset = 1
    while remaining >= 2 and 2 * offset < size:
        crossing += 2 * offset
        remaining -= 2
        offset += 1
    if remaining == 1:
        if size % 2 == 0:
            crossing += size // 2
        else:
            boundary = (size + 1) // 2  # block is coords < boundary
            if (boundary - 1) % 2 == 0:
                crossing += 1
    return crossing


def _mphx_dim_cut(fam: MphxParams, i: int) -> int:
    """Bandwidth units crossing the balanced split of dimension i, per plane.

    One unit is the full NIC bandwidth (an inter-switch link bundle across
    all planes, or one relocated NIC's ports). Splitting an odd dimension
    ceil/floor leaves the NIC sides unbalanced by p * prod(other dims);
    rebalancing moves half of those NICs across, at one unit each, which
    keeps the estimate a true balanced-cut value (and hence an upper bound
    on the exhaustive minimum).
    """
    size = fam.dims[i]
    lo_side = size // 2
    hi_side = size - lo_side  # block is the first ceil(size/2) coordinates
    budget = fam.dim_port_budgets[i]
    if budget is None:
        crossing = lo_side * hi_side * fam.multiplicities[i]
    else:
        base = budget // (size - 1)
        crossing = lo_side * hi_side * base
        crossing += _extra_ring_crossing(size, budget % (size - 1))
    rest = 1
    for j, d in enumerate(fam.dims):
        if j != i:
            rest *= d
    cut = crossing * rest
    if size % 2:
        cut += fam.nic_ports_per_switch * rest // 2
    return cut


def bisection_estimate(params: TopologyParams) -> Fraction | float:
    """Relative bisection from the family's analytic balanced cut.

    The value is the bandwidth of one specific near-even cut divided by half
    the aggregate NIC injection bandwidth, hence an upper bound on the true
    relative bisection. Full-bisection fat-trees report exactly 1.
    """
    fam = params.family
    match fam:
        case MphxParams():
            if all(d < 2 for d in fam.dims):
                return UNBOUNDED
            cut = min(_mphx_dim_cut(fam, i)
                      for i, d in enumerate(fam.dims) if d >= 2)
            # cut links per plane, n planes at rate B/n: bandwidth = cut * B.
            return Fraction(2 * cut, fam.nic_count)
        case FatTree3Params() | MpFatTree2Params():
            return Fraction(1)
        case DragonflyParams():
            g = fam.groups
            if g < 2:
                return UNBOUNDED
            if g % 2:
                raise MetricsError(
                    "group-cut estimate requires an even group count")
            pair_mult, _idle = group_pair_multiplicities(
                g, fam.switches_per_group * fam.global_ports_per_switch)
            crossing = sum(count for (gi, gj), count in pair_mult.items()
                           if (gi < g // 2) != (gj < g // 2))
            return Fraction(2 * crossing, fam.nic_count)
        case DragonflyPlusParams():
            g = fam.groups
            if g < 2:
                return UNBOUNDED
            if g % 2:
                raise MetricsError(
                    "group-cut estimate requires an even group count")
            _up, glob = resolve_dragonfly_plus(fam, params.switch)
            pair_mult, _idle = group_pair_multiplicities(
                g, fam.spines_per_group * glob)
            crossing = sum(count for (gi, gj), count in pair_mult.items()
                           if (gi < g // 2) != (gj < g // 2))
            return Fraction(2 * crossing, fam.nic_count)
    raise TypeError(f"unknown family {type(fam).__name__}")


def bisection_bruteforce(topology: Topology) -> Fraction | float:
    """Exact relative bisection by exhaustive enumeration.

    Enumerates every balanced NIC bipartition and, for each, every switch
    side assignment, taking the global minimum crossing bandwidth. Bounded
    to 16 NICs and 12 switches; larger instances raise. Returns the
    unbounded sentinel when the graph has no inter-switch links to cut.
    """
    nic_ids = [n.id for n in topology.nics]
    sw_ids = [s.id for s in topology.switches]
    n, s = len(nic_ids), len(sw_ids)
    if n > 16:
        raise MetricsError(f"instance too large: {n} NICs > 16")
    if s > 12:
        raise MetricsError(f"instance too large: {s} switches > 12")
    if n < 2:
        raise MetricsError("need at least two NICs to bisect")

    nodes = topology.node_by_id
    sw_index = {sid: i for i, sid in enumerate(sw_ids)}
    nic_index = {nid: i for i, nid in enumerate(nic_ids)}
    nic_links: list[tuple[int, int, int]] = []  # (nic idx, switch idx, bw)
    sw_links: list[tuple[int, int, int]] = []   # (switch idx, switch idx, bw)
    for link in topology.links:
        bw = link.rate_gbps * link.multiplicity
        ka, kb = nodes[link.a].kind, nodes[link.b].kind
        if ka == SWITCH and kb == SWITCH:
            sw_links.append((sw_index[link.a], sw_index[link.b], bw))
        elif ka == NIC and kb == NIC:
            raise ValueError("NIC-NIC links are not valid topology links")
        else:
            nic, sw = (link.a, link.b) if ka == NIC else (link.b, link.a)
            nic_links.append((nic_index[nic], sw_index[sw], bw))
    if not sw_links:
        return UNBOUNDED

    masks = np.arange(1 << s, dtype=np.uint32)
    bits = ((masks[:, None] >> np.arange(s)) & 1).astype(np.int64)
    pair_cost = np.zeros(1 << s, dtype=np.int64)
    for si, sj, bw in sw_links:
        pair_cost += (bits[:, si] != bits[:, sj]) * bw

    half = (n + 1) // 2
    best: int | None = None
    if n % 2:
        combos = itertools.combinations(range(n), half)
    else:
        # Complement symmetry: pin NIC 0 to the left side.
        combos = ((0,) + rest
                  for rest in itertools.combinations(range(1, n), half - 1))
    for combo in combos:
        left = np.zeros(n, dtype=bool)
        left[list(combo)] = True
        to_left = np.zeros(s, dtype=np.int64)   # NIC bw pulling switch left
        to_right = np.zeros(s, dtype=np.int64)
        for ni, si, bw in nic_links:
            if left[ni]:
                to_left[si] += bw
            else:
                to_right[si] += bw
        # Switch on the left crosses its right-side NIC bandwidth and vice
        # versa; bit 1 means left.
        costs = pair_cost + bits @ to_right + (1 - bits) @ to_left
        low = int(costs.min())
        if best is None or low < best:
            best = low
    assert best is not None
    nic_bw = topology.params.nic.total_bandwidth_gbps
    return Fraction(2 * best, n * nic_bw)


# ---------------------------------------------------------------------------
# Reports


@dataclass(frozen=True)
class MetricsReport:
    """One topology's metrics, ready for CSV/JSON serialization."""

    counts: ComponentCounts
    diameter_switch_hops: int
    relative_bisection: Fraction | float | None  # None: no estimate defined
    params_echo: TopologyParams

    CSV_FIELDS = ("topology", "d", "N", "N_s", "N_o", "rate", "beta")

    @property
    def dominant_rate(self) -> int | str:
        rates = sorted(self.counts.links_by_rate)
        if len(rates) == 1:
            return rates[0]
        return "mixed" if rates else 0

    def beta_text(self) -> str:
        beta = self.relative_bisection
        if beta is None:
            return "n/a"
        return "unbounded" if beta == UNBOUNDED else str(Fraction(beta))

    def json_obj(self) -> dict:
        from . import specs

        return {
            "topology": specs.format_spec(self.params_echo.family),
            "d": self.diameter_switch_hops,
            "N": self.counts.nic_count,
            "N_s": self.counts.switch_count,
            "N_o": self.counts.total_optical_modules,
            "rate": self.dominant_rate,
            "beta": self.beta_text(),
        }

    def csv_row(self) -> list[str]:
        obj = self.json_obj()
        return [str(obj[field]) for field in self.CSV_FIELDS]
