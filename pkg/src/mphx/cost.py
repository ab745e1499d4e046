"""Dollar cost model over component counts.

Prices stay exact rationals; rounding to whole dollars happens only at
display time (half-up, so published-table comparisons are reproducible).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .metrics import ComponentCounts

#: Default unit prices for the 102.4 Tbps switch generation.
DEFAULT_SWITCH_PRICE_USD = Fraction(40_000)
DEFAULT_TRANSCEIVER_PRICES_USD = {
    200: Fraction(100),
    400: Fraction(200),
    800: Fraction(450),
    1600: Fraction(1_200),
}


class PriceError(ValueError):
    """Malformed price table or a missing price for a present rate."""


@dataclass(frozen=True)
class PriceTable:
    switch_price_usd: Fraction = DEFAULT_SWITCH_PRICE_USD
    transceiver_price_usd: dict[int, Fraction] = field(
        default_factory=lambda: dict(DEFAULT_TRANSCEIVER_PRICES_USD))
    copper_link_price_usd: Fraction | None = None

    def __post_init__(self) -> None:
        if self.switch_price_usd < 0:
            raise PriceError("switch price must be non-negative")
        for rate, price in self.transceiver_price_usd.items():
            if price < 0:
                raise PriceError(f"negative transceiver price for {rate}G")
        if self.copper_link_price_usd is not None and self.copper_link_price_usd < 0:
            raise PriceError("copper link price must be non-negative")


_PRICE_KEYS = {
    "switch_usd": "switch",
    "copper_link_usd": "copper",
}


def _parse_price_key(key: str) -> tuple[str, int | None]:
    if key in _PRICE_KEYS:
        return _PRICE_KEYS[key], None
    if key.startswith("xcvr_") and key.endswith("g_usd"):
        rate_text = key[len("xcvr_"):-len("g_usd")]
        if rate_text.isdigit():
            return "xcvr", int(rate_text)
    raise PriceError(f"unknown price key: {key}")


def _to_fraction(value) -> Fraction:
    try:
        if isinstance(value, float):
            return Fraction(str(value))
        return Fraction(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise PriceError(f"bad price value: {value!r}") from exc


def load_price_table(path: str | Path) -> PriceTable:
    """Load a price table from JSON or flat ``key = value`` text.

    Recognized keys: ``switch_usd``, ``xcvr_<rate>g_usd`` (any integer rate)
    and the optional ``copper_link_usd``.
    """
    text = Path(path).read_text()
    entries: dict[str, object] = {}
    try:
        data = json.loads(text)
        if not isinstance(data, dict):
            raise PriceError("price JSON must be an object")
        entries = data
    except json.JSONDecodeError:
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" in line:
                key, _, value = line.partition("=")
            else:
                parts = line.split()
                if len(parts) != 2:
                    raise PriceError(f"bad price line: {raw!r}")
                key, value = parts
            entries[key.strip()] = value.strip()

    switch = DEFAULT_SWITCH_PRICE_USD
    xcvr = dict(DEFAULT_TRANSCEIVER_PRICES_USD)
    copper: Fraction | None = None
    for key, value in entries.items():
        kind, rate = _parse_price_key(key)
        price = _to_fraction(value)
        if kind == "switch":
            switch = price
        elif kind == "copper":
            copper = price
        else:
            xcvr[rate] = price
    return PriceTable(switch, xcvr, copper)


@dataclass(frozen=True)
class CostBreakdown:
    """Exact totals; subtotals sum to the total by construction."""

    switch_subtotal_usd: Fraction
    optics_subtotal_usd: Fraction
    copper_subtotal_usd: Fraction
    total_usd: Fraction
    cost_per_nic_usd: Fraction

    @property
    def cost_per_nic_rounded(self) -> int:
        return round_dollars(self.cost_per_nic_usd)


def round_dollars(amount: Fraction) -> int:
    """Round half-up to whole dollars (display only)."""
    return int((Fraction(amount) + Fraction(1, 2)).__floor__())


def evaluate(counts: ComponentCounts, prices: PriceTable) -> CostBreakdown:
    """Price a component census: switches + transceivers (+ copper links)."""
    if counts.nic_count < 1:
        raise PriceError("cost per NIC is undefined for zero NICs")
    switch_sub = counts.switch_count * prices.switch_price_usd
    optics_sub = Fraction(0)
    for rate, modules in sorted(counts.optical_modules_by_rate.items()):
        if modules == 0:
            continue
        price = prices.transceiver_price_usd.get(rate)
        if price is None:
            raise PriceError(f"no transceiver price for {rate}G")
        optics_sub += modules * price
    copper_sub = Fraction(0)
    copper_links = counts.total_copper_links
    if copper_links:
        if prices.copper_link_price_usd is None:
            raise PriceError(
                "copper links present but no copper_link_usd price given")
        copper_sub = copper_links * prices.copper_link_price_usd
    total = switch_sub + optics_sub + copper_sub
    return CostBreakdown(
        switch_subtotal_usd=switch_sub,
        optics_subtotal_usd=optics_sub,
        copper_subtotal_usd=copper_sub,
        total_usd=total,
        cost_per_nic_usd=total / counts.nic_count,
    )


def reduction(baseline_per_nic, candidate_per_nic) -> Fraction:
    """Percentage reduction of candidate against baseline: 100 * (b-c)/b."""
    baseline = Fraction(baseline_per_nic)
    if baseline <= 0:
        raise ValueError("baseline cost must be positive")
    return 100 * (baseline - Fraction(candidate_per_nic)) / baseline
