"""Deterministic builders that realize explicit topology graphs.

All builders are pure functions of their parameters: two builds from equal
parameters export byte-identically. Node ids are dense integers, NICs first
in index order, then switches in (plane, coordinate) lexicographic order.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from .model import (
    NIC,
    OPTICAL,
    SWITCH,
    DragonflyParams,
    DragonflyPlusParams,
    FatTree3Params,
    InfeasibleParamsError,
    Link,
    MphxParams,
    MpFatTree2Params,
    NicSpec,
    Node,
    SwitchSpec,
    Topology,
    TopologyParams,
    _require,
    sort_links,
)


class _LinkBag:
    """Accumulates undirected links, merging multiplicity per endpoint pair."""

    def __init__(self) -> None:
        self._links: dict[tuple[int, int], list] = {}

    def add(self, a: int, b: int, rate: int, mult: int = 1,
            medium: str = OPTICAL) -> None:
        key = (a, b) if a < b else (b, a)
        rec = self._links.get(key)
        if rec is None:
            self._links[key] = [rate, mult, medium]
        else:
            if rec[0] != rate or rec[2] != medium:
                raise ValueError(f"conflicting link attributes on {key}")
            rec[1] += mult

    def freeze(self) -> tuple[Link, ...]:
        return sort_links({
            key: Link(key[0], key[1], rate, mult, medium)
            for key, (rate, mult, medium) in self._links.items()
        })


def _check_port_rate(nic: NicSpec, sw: SwitchSpec) -> int:
    _require(
        sw.breakout_rate_gbps == nic.port_rate_gbps,
        f"switch port rate {sw.breakout_rate_gbps}G does not match the "
        f"NIC per-port rate {nic.port_rate_gbps}G",
    )
    return nic.port_rate_gbps


def mesh_extra_edges(size: int, extra_degree: int
                     ) -> tuple[dict[tuple[int, int], int], Fraction]:
    """Near-regular extra-multiplicity layout for one mesh dimension.

    Gives every coordinate ``extra_degree`` additional link endpoints using
    circulant rings at offsets 1, 2, ... (a full ring adds 2 per node, the
    half-size matching of an even mesh adds 1). When size and extra_degree
    are both odd the exact layout is impossible (odd degree sum): the last
    node of a lexicographic near-matching goes one link short and the half
    link is returned as the shortfall.
    """
    extras: dict[tuple[int, int], int] = {}
    shortfall = Fraction(0)
    if size < 2 or extra_degree <= 0:
        return extras, shortfall
    if extra_degree > size - 1:
        raise InfeasibleParamsError(
            f"extra degree {extra_degree} exceeds mesh size {size} minus one")

    def bump(c1: int, c2: int) -> None:
        key = (c1, c2) if c1 < c2 else (c2, c1)
        extras[key] = extras.get(key, 0) + 1

    remaining = extra_degree
    offset = 1
    while remaining >= 2 and 2 * offset < size:
        for c in range(size):
            bump(c, (c + offset) % size)
        remaining -= 2
        offset += 1
    if remaining == 1:
        if size % 2 == 0:
            for c in range(size // 2):
                bump(c, c + size // 2)
        else:
            for c in range(0, size - 1, 2):
                bump(c, c + 1)
            shortfall = Fraction(1, 2)
        remaining = 0
    assert remaining == 0, "ring capacity covers any extra degree <= size-2"
    return extras, shortfall


def build_mphx(params: MphxParams, nic: NicSpec, sw: SwitchSpec, *,
               access_medium: str = OPTICAL) -> Topology:
    """Realize a multi-plane HyperX graph.

    Per plane there is one switch per mixed-radix coordinate; switches that
    differ in exactly one coordinate form a full mesh in that dimension.
    NIC j's port in every plane attaches to the switch with linear index
    j // p (identity mapping across planes).
    """
    rate = _check_port_rate(nic, sw)
    _require(nic.port_count == params.plane_count,
             f"NIC has {nic.port_count} ports but {params.plane_count} planes requested")
    used = params.nic_ports_per_switch
    for i in range(len(params.dims)):
        used += params.dim_ports(i)
        if used > sw.breakout_port_count:
            raise InfeasibleParamsError(
                f"port budget exceeded at dimension {i + 1}: "
                f"{used} > {sw.breakout_port_count}")

    dims = params.dims
    n_planes = params.plane_count
    p = params.nic_ports_per_switch
    per_plane = params.switches_per_plane
    nic_count = params.nic_count

    nodes: list[Node] = [Node(j, NIC) for j in range(nic_count)]
    coords_list = list(itertools.product(*(range(d) for d in dims)))
    for plane in range(n_planes):
        base = nic_count + plane * per_plane
        for lin, coords in enumerate(coords_list):
            nodes.append(Node(base + lin, SWITCH, plane, coords))

    # Strides for linear index <-> coordinates (row-major, dim 1 most
    # significant) so that mesh neighbors are cheap to enumerate.
    strides = [1] * len(dims)
    for i in range(len(dims) - 2, -1, -1):
        strides[i] = strides[i + 1] * dims[i + 1]

    bag = _LinkBag()
    for j in range(nic_count):
        sw_lin = j // p
        for plane in range(n_planes):
            bag.add(j, nic_count + plane * per_plane + sw_lin, rate,
                    medium=access_medium)

    shortfall = Fraction(0)
    notes: list[str] = []
    for i, size in enumerate(dims):
        if size < 2:
            continue
        budget = params.dim_port_budgets[i]
        if budget is None:
            base_mult = params.multiplicities[i]
            extras: dict[tuple[int, int], int] = {}
            mesh_short = Fraction(0)
        else:
            base_mult = budget // (size - 1)
            extras, mesh_short = mesh_extra_edges(size, budget % (size - 1))
        stride = strides[i]
        outer = [range(d) for d in dims[:i]]
        inner = [range(d) for d in dims[i + 1:]]
        mesh_count = 0
        for plane in range(n_planes):
            base = nic_count + plane * per_plane
            for prefix in itertools.product(*outer):
                for suffix in itertools.product(*inner):
                    origin = base
                    for c, s in zip(prefix, strides[:i]):
                        origin += c * s
                    for c, s in zip(suffix, strides[i + 1:]):
                        origin += c * s
                    for c1 in range(size):
                        for c2 in range(c1 + 1, size):
                            mult = base_mult + extras.get((c1, c2), 0)
                            if mult:
                                bag.add(origin + c1 * stride,
                                        origin + c2 * stride, rate, mult)
                    mesh_count += 1
        if mesh_short:
            shortfall += mesh_short * mesh_count
            notes.append(
                f"dimension {i + 1}: odd extra-degree parity, "
                f"{mesh_short} link dropped in each of {mesh_count} meshes")

    return Topology(
        planes=n_planes,
        nodes=tuple(nodes),
        links=bag.freeze(),
        params=TopologyParams(params, nic, sw),
        link_shortfall=shortfall,
        notes=tuple(notes),
    )


def build_fat_tree_3layer(k: int, nic: NicSpec, sw: SwitchSpec, *,
                          access_medium: str = OPTICAL) -> Topology:
    """Realize a 3-layer k-ary fat-tree (single plane, full-rate links)."""
    params = FatTree3Params(k)
    rate = _check_port_rate(nic, sw)
    _require(nic.port_count == 1, "3-layer fat-tree is a single-plane topology")
    _require(k <= sw.breakout_port_count,
             f"radix {k} exceeds the switch's {sw.breakout_port_count} ports")

    half = k // 2
    nic_count = params.nic_count
    edge_count = k * half
    agg_count = k * half
    # Layers: 0 = edge, 1 = aggregation, 2 = core; index is global per layer.
    nodes: list[Node] = [Node(j, NIC) for j in range(nic_count)]
    next_id = nic_count
    edge_ids, agg_ids, core_ids = [], [], []
    for layer, count, acc in ((0, edge_count, edge_ids),
                              (1, agg_count, agg_ids),
                              (2, half * half, core_ids)):
        for idx in range(count):
            nodes.append(Node(next_id, SWITCH, 0, (layer, idx)))
            acc.append(next_id)
            next_id += 1

    bag = _LinkBag()
    for j in range(nic_count):
        bag.add(j, edge_ids[j // half], rate, medium=access_medium)
    for pod in range(k):
        for e in range(half):
            for a in range(half):
                bag.add(edge_ids[pod * half + e], agg_ids[pod * half + a], rate)
    for pod in range(k):
        for a in range(half):
            for c in range(half):
                bag.add(agg_ids[pod * half + a], core_ids[a * half + c], rate)

    return Topology(1, tuple(nodes), bag.freeze(),
                    TopologyParams(params, nic, sw))


def build_mp_fat_tree_2layer(plane_count: int, per_plane_radix: int,
                             nic_count: int, nic: NicSpec, sw: SwitchSpec, *,
                             access_medium: str = OPTICAL) -> Topology:
    """Realize a multi-plane 2-layer leaf/spine fat-tree.

    Per plane: leaves own r/2 NIC ports and r/2 uplinks, spines own r
    downlinks, and every leaf connects to every spine with the uniform
    multiplicity r / leaf_count (full bisection by construction).
    """
    params = MpFatTree2Params(plane_count, per_plane_radix, nic_count)
    rate = _check_port_rate(nic, sw)
    _require(nic.port_count == plane_count,
             f"NIC has {nic.port_count} ports but {plane_count} planes requested")
    _require(per_plane_radix == sw.breakout_port_count,
             f"per-plane radix {per_plane_radix} does not match the switch's "
             f"{sw.breakout_port_count}-port breakout")

    leaves = params.leaves_per_plane
    spines = params.spines_per_plane
    mult = params.leaf_spine_multiplicity
    half = per_plane_radix // 2

    nodes: list[Node] = [Node(j, NIC) for j in range(nic_count)]
    next_id = nic_count
    leaf_ids: dict[tuple[int, int], int] = {}
    spine_ids: dict[tuple[int, int], int] = {}
    for plane in range(plane_count):
        for idx in range(leaves):
            nodes.append(Node(next_id, SWITCH, plane, (0, idx)))
            leaf_ids[plane, idx] = next_id
            next_id += 1
        for idx in range(spines):
            nodes.append(Node(next_id, SWITCH, plane, (1, idx)))
            spine_ids[plane, idx] = next_id
            next_id += 1

    bag = _LinkBag()
    for j in range(nic_count):
        for plane in range(plane_count):
            bag.add(j, leaf_ids[plane, j // half], rate, medium=access_medium)
    for plane in range(plane_count):
        for leaf in range(leaves):
            for spine in range(spines):
                bag.add(leaf_ids[plane, leaf], spine_ids[plane, spine],
                        rate, mult)

    return Topology(plane_count, tuple(nodes), bag.freeze(),
                    TopologyParams(params, nic, sw))


def group_pair_multiplicities(groups: int, ports_per_group: int
                              ) -> tuple[dict[tuple[int, int], int], int]:
    """Distribute per-group global ports over group pairs.

    Every pair gets the uniform base ``ports // (groups-1)``; leftover ports
    are paired one link at a time between the two groups with the most
    unassigned ports (lowest index on ties). Max-remaining pairing always
    realizes floor(total/2) links, so at most one port is left idle (only
    when groups * leftover is odd). Returns the pair multiplicities and the
    idle port count.
    """
    if groups < 2:
        return {}, 0
    base, extra = divmod(ports_per_group, groups - 1)
    mult: dict[tuple[int, int], int] = {}
    if base:
        mult = {(i, j): base
                for i in range(groups) for j in range(i + 1, groups)}
    remaining = [extra] * groups
    while True:
        first = max(range(groups), key=lambda g: (remaining[g], -g))
        if remaining[first] == 0:
            break
        second = max((g for g in range(groups) if g != first),
                     key=lambda g: (remaining[g], -g))
        if remaining[second] == 0:
            break
        pair = (first, second) if first < second else (second, first)
        mult[pair] = mult.get(pair, 0) + 1
        remaining[first] -= 1
        remaining[second] -= 1
    return mult, sum(remaining)


class _GroupPorts:
    """Draws global-port slots from a group's switches in index order."""

    def __init__(self, switch_ids: list[int], ports_per_switch: int) -> None:
        self._ids = switch_ids
        self._per = ports_per_switch
        self._next = 0

    def draw(self) -> int:
        sw = self._ids[self._next // self._per]
        self._next += 1
        return sw


def build_dragonfly(nics_per_switch: int, switches_per_group: int,
                    global_ports_per_switch: int, groups: int,
                    nic: NicSpec, sw: SwitchSpec, *,
                    access_medium: str = OPTICAL) -> Topology:
    """Realize a Dragonfly graph (single plane, full-rate links)."""
    params = DragonflyParams(nics_per_switch, switches_per_group,
                             global_ports_per_switch, groups)
    rate = _check_port_rate(nic, sw)
    _require(nic.port_count == 1, "dragonfly is a single-plane topology")
    p, a, h, g = (nics_per_switch, switches_per_group,
                  global_ports_per_switch, groups)
    need = p + (a - 1) + h
    _require(need <= sw.breakout_port_count,
             f"switch needs {need} ports (p + a-1 + h), budget is "
             f"{sw.breakout_port_count}")

    nic_count = params.nic_count
    nodes: list[Node] = [Node(j, NIC) for j in range(nic_count)]
    switch_ids: dict[tuple[int, int], int] = {}
    next_id = nic_count
    for group in range(g):
        for idx in range(a):
            nodes.append(Node(next_id, SWITCH, 0, (group, idx)))
            switch_ids[group, idx] = next_id
            next_id += 1

    bag = _LinkBag()
    for j in range(nic_count):
        sw_index = j // p
        bag.add(j, switch_ids[sw_index // a, sw_index % a], rate,
                medium=access_medium)
    for group in range(g):
        for i in range(a):
            for k in range(i + 1, a):
                bag.add(switch_ids[group, i], switch_ids[group, k], rate)

    pair_mult, idle = group_pair_multiplicities(g, a * h)
    ports = {
        group: _GroupPorts([switch_ids[group, i] for i in range(a)], h)
        for group in range(g)
    }
    for (gi, gj) in sorted(pair_mult):
        for _ in range(pair_mult[gi, gj]):
            bag.add(ports[gi].draw(), ports[gj].draw(), rate)

    notes = ()
    if idle:
        notes = (f"{idle} global ports left idle (odd leftover distribution)",)
    return Topology(1, tuple(nodes), bag.freeze(),
                    TopologyParams(params, nic, sw), notes=notes)


def resolve_dragonfly_plus(params: DragonflyPlusParams,
                           sw: SwitchSpec) -> tuple[int, int]:
    """Resolve (uplinks_per_pair, global_ports_per_spine), filling the radix.

    When unset, leaves spend all ports left after their NICs on spine
    uplinks, and spines spend all ports left after leaf downlinks on
    global links.
    """
    radix = sw.breakout_port_count
    up = params.uplinks_per_pair
    if up is None:
        up = (radix - params.nics_per_leaf) // params.spines_per_group
        _require(up >= 1,
                 f"no leaf ports left for uplinks ({params.nics_per_leaf} NICs "
                 f"on a {radix}-port leaf)")
    leaf_need = params.nics_per_leaf + params.spines_per_group * up
    _require(leaf_need <= radix,
             f"leaf needs {leaf_need} ports (NICs + spine uplinks), "
             f"budget is {radix}")
    down = params.leaves_per_group * up
    glob = params.global_ports_per_spine
    if glob is None:
        glob = radix - down
        _require(glob >= 0, f"spine downlinks {down} exceed the {radix}-port radix")
    spine_need = down + glob
    _require(spine_need <= radix,
             f"spine needs {spine_need} ports (downlinks + globals), "
             f"budget is {radix}")
    if params.groups > 1:
        total_global = params.spines_per_group * glob
        _require(total_global >= params.groups - 1,
                 f"{total_global} global ports per group cannot reach "
                 f"{params.groups - 1} peer groups")
    return up, glob


def build_dragonfly_plus(leaves_per_group: int, spines_per_group: int,
                         nics_per_leaf: int, groups: int,
                         nic: NicSpec, sw: SwitchSpec, *,
                         uplinks_per_pair: int | None = None,
                         global_ports_per_spine: int | None = None,
                         access_medium: str = OPTICAL) -> Topology:
    """Realize a Dragonfly+ graph: leaf/spine groups, globals on spines."""
    params = DragonflyPlusParams(leaves_per_group, spines_per_group,
                                 nics_per_leaf, groups,
                                 uplinks_per_pair, global_ports_per_spine)
    rate = _check_port_rate(nic, sw)
    _require(nic.port_count == 1, "dragonfly+ is a single-plane topology")
    up, glob = resolve_dragonfly_plus(params, sw)

    g = groups
    nic_count = params.nic_count
    nodes: list[Node] = [Node(j, NIC) for j in range(nic_count)]
    leaf_ids: dict[tuple[int, int], int] = {}
    spine_ids: dict[tuple[int, int], int] = {}
    next_id = nic_count
    # Coordinates are (group, index) with leaves before spines in each group.
    for group in range(g):
        for idx in range(leaves_per_group):
            nodes.append(Node(next_id, SWITCH, 0, (group, idx)))
            leaf_ids[group, idx] = next_id
            next_id += 1
        for idx in range(spines_per_group):
            nodes.append(Node(next_id, SWITCH, 0,
                              (group, leaves_per_group + idx)))
            spine_ids[group, idx] = next_id
            next_id += 1

    bag = _LinkBag()
    for j in range(nic_count):
        leaf_index = j // nics_per_leaf
        bag.add(j, leaf_ids[leaf_index // leaves_per_group,
                            leaf_index % leaves_per_group],
                rate, medium=access_medium)
    for group in range(g):
        for leaf in range(leaves_per_group):
            for spine in range(spines_per_group):
                bag.add(leaf_ids[group, leaf], spine_ids[group, spine],
                        rate, up)

    pair_mult, idle = group_pair_multiplicities(g, spines_per_group * glob)
    ports = {
        group: _GroupPorts(
            [spine_ids[group, i] for i in range(spines_per_group)], glob)
        for group in range(g)
    }
    for (gi, gj) in sorted(pair_mult):
        for _ in range(pair_mult[gi, gj]):
            bag.add(ports[gi].draw(), ports[gj].draw(), rate)

    notes = ()
    if idle:
        notes = (f"{idle} global ports left idle (odd leftover distribution)",)
    return Topology(1, tuple(nodes), bag.freeze(),
                    TopologyParams(params, nic, sw), notes=notes)


def balanced_mphx_params(nic: NicSpec, sw: SwitchSpec,
                         dimension_count: int) -> MphxParams:
    """Balanced maximum-scale sizing: p and every dimension equal nk/(D+1).

    Uses the floor when D+1 does not divide nk; with exact division the
    realized NIC count is (nk / (D+1)) ** (D+1).
    """
    _require(dimension_count >= 1, "need at least one dimension")
    n = nic.port_count
    k = sw.base_radix(nic)
    side = (n * k) // (dimension_count + 1)
    _require(side >= 1,
             f"nk = {n * k} is below D+1 = {dimension_count + 1}")
    return MphxParams(
        plane_count=n,
        nic_ports_per_switch=side,
        dims=(side,) * dimension_count,
    )


def build(params: TopologyParams, *, access_medium: str = OPTICAL) -> Topology:
    """Build whichever family the descriptor carries."""
    fam = params.family
    nic, sw = params.nic, params.switch
    match fam:
        case MphxParams():
            return build_mphx(fam, nic, sw, access_medium=access_medium)
        case FatTree3Params():
            return build_fat_tree_3layer(fam.k, nic, sw,
                                         access_medium=access_medium)
        case MpFatTree2Params():
            return build_mp_fat_tree_2layer(
                fam.plane_count, fam.per_plane_radix, fam.nic_count,
                nic, sw, access_medium=access_medium)
        case DragonflyParams():
            return build_dragonfly(
                fam.nics_per_switch, fam.switches_per_group,
                fam.global_ports_per_switch, fam.groups,
                nic, sw, access_medium=access_medium)
        case DragonflyPlusParams():
            return build_dragonfly_plus(
                fam.leaves_per_group, fam.spines_per_group,
                fam.nics_per_leaf, fam.groups, nic, sw,
                uplinks_per_pair=fam.uplinks_per_pair,
                global_ports_per_spine=fam.global_ports_per_spine,
                access_medium=access_medium)
    raise TypeError(f"unknown family {type(fam).__name__}")
