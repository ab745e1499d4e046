"""Design-space search over multi-plane HyperX configurations.

Enumerates plane counts, dimension tuples and NIC attach counts that hit a
target NIC count within a slack window, prices each candidate and returns a
deterministic cost ranking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from fractions import Fraction

from . import metrics, specs
from .cost import CostBreakdown, PriceTable
from .model import InfeasibleParamsError, MphxParams, NicSpec, SwitchSpec, TopologyParams


@dataclass(frozen=True)
class SearchConstraints:
    """What to search for.

    ``slack`` widens the admission window to [target, target * (1+slack)).
    ``require_full_port_use`` selects whether spare switch ports are folded
    into extra multiplicity on the last dimension: True enumerates only the
    folded variants, False only the plain ones, None (default) both.
    ``balanced_cut_only`` keeps configurations whose every dimension holds
    the near-even dimension cut at half the injection bandwidth or better
    (effective multiplicity * dim size >= NIC ports per switch); this is
    what rules out degenerate low-bisection designs.
    """

    target_nics: int
    plane_choices: tuple[int, ...] = (1, 2, 4, 8)
    max_dimensions: int = 3
    nic_bandwidth_gbps: int = 1600
    switch_bandwidth_gbps: int = 102_400
    slack: Fraction = Fraction(1, 10)
    require_full_port_use: bool | None = None
    balanced_cut_only: bool = True

    def __post_init__(self) -> None:
        if self.target_nics < 1:
            raise InfeasibleParamsError("target NIC count must be >= 1")
        if not self.plane_choices:
            raise InfeasibleParamsError("at least one plane choice required")
        if self.max_dimensions < 1:
            raise InfeasibleParamsError("at least one dimension required")


@dataclass(frozen=True)
class SearchResult:
    params: TopologyParams
    counts: metrics.ComponentCounts
    diameter_switch_hops: int
    cost: CostBreakdown

    @property
    def cost_per_nic(self) -> Fraction:
        return self.cost.cost_per_nic_usd

    @cached_property
    def report(self) -> metrics.MetricsReport:
        # The bisection estimate is computed on first access; the ranking
        # itself never needs it.
        return metrics.MetricsReport(
            counts=self.counts,
            diameter_switch_hops=self.diameter_switch_hops,
            relative_bisection=metrics.bisection_estimate(self.params),
            params_echo=self.params,
        )


def _dimension_tuples(max_dims: int, radix: int, max_product: int):
    """Non-increasing dimension tuples with sizes >= 2, plus the degenerate
    single-switch tuple (1,). Product and per-switch port bounds prune."""
    yield (1,)
    max_size = min(radix, max_product)
    for count in range(1, max_dims + 1):
        stack: list[tuple[tuple[int, ...], int, int]] = [((), 1, 0)]
        while stack:
            dims, product, ports = stack.pop()
            if len(dims) == count:
                yield dims
                continue
            upper = dims[-1] if dims else max_size
            for size in range(2, upper + 1):
                new_product = product * size
                if new_product > max_product:
                    continue
                new_ports = ports + size - 1
                if new_ports > radix - 1:
                    continue
                stack.append((dims + (size,), new_product, new_ports))


def _passes_balanced_cut(dims: tuple[int, ...], budgets: tuple[int | None, ...],
                         p: int) -> bool:
    for size, budget in zip(dims, budgets):
        if size < 2:
            continue
        # Effective per-pair multiplicity times dimension size must reach p.
        if budget is None:
            if size < p:
                return False
        elif budget * size < p * (size - 1):
            return False
    return True


def search(constraints: SearchConstraints,
           prices: PriceTable) -> list[SearchResult]:
    """Enumerate, filter and rank feasible configurations by cost per NIC.

    Ranking is a deterministic total order: exact cost ascending, then
    smaller diameter, then smaller NIC count, then the canonical parameter
    string. Raises when nothing is feasible.
    """
    c = constraints
    target = c.target_nics
    upper = target * (1 + Fraction(c.slack))  # exclusive window bound
    n_max = math.ceil(upper) - 1  # largest admissible NIC count

    results: list[tuple[tuple, SearchResult]] = []
    seen: set[str] = set()
    for planes in sorted(set(c.plane_choices)):
        nic = NicSpec(c.nic_bandwidth_gbps, planes)
        rate = nic.port_rate_gbps
        if c.switch_bandwidth_gbps % rate:
            continue
        sw = SwitchSpec(c.switch_bandwidth_gbps,
                        c.switch_bandwidth_gbps // rate, rate)
        radix = sw.breakout_port_count
        switch_price = prices.switch_price_usd
        xcvr_price = prices.transceiver_price_usd.get(rate)
        if xcvr_price is None:
            raise InfeasibleParamsError(f"no transceiver price for {rate}G")
        for dims in _dimension_tuples(c.max_dimensions, radix, n_max):
            product = 1
            for d in dims:
                product *= d
            base_ports = sum(d - 1 for d in dims)
            p_low = max(1, -(-target // product))
            p_high = min(n_max // product, radix - base_ports)
            for p in range(p_low, p_high + 1):
                n_nics = p * product
                for fill in (False, True):
                    if c.require_full_port_use is True and not fill:
                        continue
                    if c.require_full_port_use is False and fill:
                        continue
                    budgets: tuple[int | None, ...] = (None,) * len(dims)
                    if fill:
                        spare = radix - p - base_ports
                        if spare <= 0 or dims[-1] < 2:
                            continue
                        budgets = budgets[:-1] + (dims[-1] - 1 + spare,)
                    if c.balanced_cut_only and not _passes_balanced_cut(
                            dims, budgets, p):
                        continue
                    fam = MphxParams(planes, p, dims, dim_port_budgets=budgets)
                    key = specs.format_spec(fam)
                    if key in seen:
                        continue
                    seen.add(key)
                    params = TopologyParams(fam, nic, sw)
                    counts = metrics.analytic_counts(params)
                    # Inlined evaluate(): one rate, no copper.
                    switch_sub = counts.switch_count * switch_price
                    optics_sub = counts.total_optical_modules * xcvr_price
                    total = switch_sub + optics_sub
                    cost = CostBreakdown(switch_sub, optics_sub, Fraction(0),
                                         total, total / n_nics)
                    result = SearchResult(params, counts,
                                          metrics.analytic_diameter(params),
                                          cost)
                    results.append((
                        (float(result.cost_per_nic), result.cost_per_nic,
                         result.diameter_switch_hops, counts.nic_count, key),
                        result,
                    ))

    if not results:
        raise InfeasibleParamsError(
            f"no feasible configuration for {target} NICs within "
            f"{float(c.slack) * 100:g}% slack")
    results.sort(key=lambda item: item[0])
    return [result for _key, result in results]
