"""Cost model: pricing, reduction arithmetic, price table files."""

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from mphx.cost import (
    PriceError,
    PriceTable,
    evaluate,
    load_price_table,
    reduction,
    round_dollars,
)
from mphx.metrics import ComponentCounts, analytic_counts
from mphx.specs import resolve_params

ROW8 = "mphx:n=8,p=256,dims=256"
ROW2 = "mpft2:n=8,r=512,nics=65536"


class TestEvaluate:
    def test_row8_per_nic(self):
        counts = analytic_counts(resolve_params(ROW8))
        cost = evaluate(counts, PriceTable())
        assert cost.cost_per_nic_usd == Fraction(239_001_600, 65_536)
        assert cost.cost_per_nic_rounded == 3_647

    def test_row2_per_nic(self):
        counts = analytic_counts(resolve_params(ROW2))
        cost = evaluate(counts, PriceTable())
        assert cost.cost_per_nic_usd == 5_075

    def test_zero_prices(self):
        counts = analytic_counts(resolve_params(ROW8))
        zero = PriceTable(Fraction(0), {200: Fraction(0)})
        assert evaluate(counts, zero).total_usd == 0

    def test_missing_rate_price(self):
        counts = analytic_counts(resolve_params(ROW8))
        with pytest.raises(PriceError, match="200G"):
            evaluate(counts, PriceTable(Fraction(1), {400: Fraction(1)}))

    def test_zero_nics_rejected(self):
        counts = ComponentCounts(0, 1, {}, {}, {})
        with pytest.raises(PriceError):
            evaluate(counts, PriceTable())

    def test_copper_requires_price(self):
        counts = analytic_counts(resolve_params(ROW8), access_medium="copper")
        with pytest.raises(PriceError, match="copper"):
            evaluate(counts, PriceTable())
        priced = PriceTable(copper_link_price_usd=Fraction(25))
        cost = evaluate(counts, priced)
        assert cost.copper_subtotal_usd == counts.total_copper_links * 25

    @given(scale=st.integers(1, 1000))
    def test_linearity(self, scale):
        counts = ComponentCounts(10, 4, {200: 30}, {}, {200: 60})
        base = PriceTable(Fraction(7), {200: Fraction(3)})
        scaled = PriceTable(Fraction(7 * scale), {200: Fraction(3 * scale)})
        assert (evaluate(counts, scaled).total_usd
                == scale * evaluate(counts, base).total_usd)

    def test_decomposition(self):
        counts = ComponentCounts(8, 2, {200: 20, 400: 4}, {200: 8},
                                 {200: 24, 400: 8})
        prices = PriceTable(Fraction(100), {200: Fraction(2), 400: Fraction(5)},
                            Fraction(1))
        cost = evaluate(counts, prices)
        assert cost.total_usd == (cost.switch_subtotal_usd
                                  + cost.optics_subtotal_usd
                                  + cost.copper_subtotal_usd)
        assert cost.switch_subtotal_usd == 200
        assert cost.optics_subtotal_usd == 24 * 2 + 8 * 5
        assert cost.copper_subtotal_usd == 8


class TestReduction:
    def test_published_claim(self):
        pct = reduction(5075, 3647)
        assert pct == Fraction(142_800, 5_075)
        assert Fraction(278, 10) < pct < Fraction(284, 10)
        assert round(float(pct), 2) == 28.14

    def test_identity_zero(self):
        assert reduction(123, 123) == 0

    def test_three_layer_vs_row8(self):
        assert round(float(reduction(10_323, 3_647)), 2) == 64.67

    def test_nonpositive_baseline(self):
        with pytest.raises(ValueError):
            reduction(0, 1)

    @given(b=st.integers(1, 10_000), c=st.integers(0, 10_000))
    def test_complement_identity(self, b, c):
        assert reduction(b, c) == 100 * (1 - Fraction(c, b))


class TestRounding:
    @pytest.mark.parametrize("value,want", [
        (Fraction(58335, 16), 3646),       # 3645.9375
        (Fraction(29175, 8), 3647),        # 3646.875
        (Fraction(7, 2), 4),               # half rounds up
        (Fraction(10325), 10325),
    ])
    def test_half_up(self, value, want):
        assert round_dollars(value) == want


class TestPriceTableFiles:
    def test_json_file(self, tmp_path):
        path = tmp_path / "prices.json"
        path.write_text('{"switch_usd": 1000, "xcvr_200g_usd": 5, '
                        '"copper_link_usd": 2.5}')
        table = load_price_table(path)
        assert table.switch_price_usd == 1000
        assert table.transceiver_price_usd[200] == 5
        assert table.transceiver_price_usd[800] == 450  # default retained
        assert table.copper_link_price_usd == Fraction(5, 2)

    def test_key_value_text(self, tmp_path):
        path = tmp_path / "prices.txt"
        path.write_text("# comment\nswitch_usd = 2000\nxcvr_1600g_usd 999\n")
        table = load_price_table(path)
        assert table.switch_price_usd == 2000
        assert table.transceiver_price_usd[1600] == 999

    def test_custom_rate_key(self, tmp_path):
        path = tmp_path / "p.txt"
        path.write_text("xcvr_3200g_usd = 1800\n")
        assert load_price_table(path).transceiver_price_usd[3200] == 1800

    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "p.txt"
        path.write_text("shoes_usd = 10\n")
        with pytest.raises(PriceError):
            load_price_table(path)

    def test_negative_price_rejected(self, tmp_path):
        path = tmp_path / "p.json"
        path.write_text('{"switch_usd": -5}')
        with pytest.raises(PriceError):
            load_price_table(path)
