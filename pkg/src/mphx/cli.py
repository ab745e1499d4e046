"""Command-line surface: table2, analyze, compare, flatten, search, generate.

Exit codes: 0 success, 1 usage/parse error, 2 infeasible parameters,
3 reference-table mismatch (table2 only). All output is deterministic:
identical inputs produce byte-identical bytes.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import explorer, flattening, generators, metrics, reference, specs
from .cost import PriceTable, PriceError, evaluate, load_price_table, reduction, round_dollars
from .model import COPPER, OPTICAL, InfeasibleParamsError, export_topology, format_rate
from .specs import SpecStringError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INFEASIBLE = 2
EXIT_MISMATCH = 3


class UsageError(Exception):
    """User input that fails before any computation starts."""


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on usage errors; the CLI contract wants 1.
    def error(self, message):
        raise UsageError(message)


def _markdown_table(headers: list[str], rows: list[list[str]]) -> str:
    widths = [len(h) for h in headers]
    for row in rows:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))
    def fmt(cells):
        return "| " + " | ".join(c.ljust(w) for c, w in zip(cells, widths)) + " |"
    lines = [fmt(headers),
             "|" + "|".join("-" * (w + 2) for w in widths) + "|"]
    lines.extend(fmt(row) for row in rows)
    return "\n".join(lines)


def _csv_text(headers: list[str], rows: list[list[str]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(headers)
    writer.writerows(rows)
    return buf.getvalue().rstrip("\n")


def _emit(out, fmt: str, headers: list[str], rows: list[list[str]],
          json_payload, trailer: list[str] = ()) -> None:
    if fmt == "json":
        out.write(json.dumps(json_payload, indent=2) + "\n")
        return
    if fmt == "csv":
        out.write(_csv_text(headers, rows) + "\n")
    else:
        out.write(_markdown_table(headers, rows) + "\n")
    for line in trailer:
        out.write(line + "\n")


def _money(amount: Fraction, fmt: str) -> str:
    dollars = round_dollars(amount)
    return f"{dollars:,}" if fmt == "md" else str(dollars)


def _load_prices(path: str | None) -> PriceTable:
    if path is None:
        return PriceTable()
    try:
        return load_price_table(path)
    except OSError as exc:
        raise UsageError(f"cannot read price table: {exc}") from exc
    except PriceError as exc:
        raise UsageError(f"bad price table: {exc}") from exc


def _parse_access_medium(text: str, prices: PriceTable
                         ) -> tuple[str, PriceTable]:
    if text == OPTICAL:
        return OPTICAL, prices
    if text.startswith(COPPER):
        _, sep, usd = text.partition(":")
        if not sep or not usd:
            raise UsageError(
                "copper access needs an explicit link price: copper:<usd>")
        try:
            price = Fraction(usd)
        except (ValueError, ZeroDivisionError) as exc:
            raise UsageError(f"bad copper price: {usd!r}") from exc
        return COPPER, PriceTable(prices.switch_price_usd,
                                  dict(prices.transceiver_price_usd), price)
    raise UsageError(f"unknown access medium {text!r} "
                     "(use 'optical' or 'copper:<usd>')")


# ---------------------------------------------------------------------------
# table2


def _reference_cells(row: reference.ReferenceRow, prices: PriceTable):
    params = specs.resolve_params(row.spec)
    counts = metrics.analytic_counts(params)
    diameter = metrics.analytic_diameter(params)
    cost = evaluate(counts, prices)
    return params, counts, diameter, cost


def cmd_table2(args, out) -> int:
    prices = _load_prices(args.prices)
    headers = ["Topologies", "d", "Switch configuration", "N", "N_s", "N_o",
               "Cost per NIC [$]"]
    rows: list[list[str]] = []
    payload_rows = []
    all_match = True
    for row in reference.REFERENCE_ROWS:
        params, counts, diameter, cost = _reference_cells(row, prices)
        modules = counts.total_optical_modules
        flagged = row.derived_optical_modules is not None
        cells_match = (
            diameter == row.diameter
            and counts.nic_count == row.nics
            and counts.switch_count == row.switches
            and (flagged or modules == row.optical_modules)
        )
        cost_match = abs(cost.cost_per_nic_usd
                         - row.cost_per_nic_usd) <= reference.COST_TOLERANCE_USD
        row_match = cells_match and cost_match
        all_match = all_match and row_match
        modules_text = f"{modules:,} ({format_rate(row.rate_gbps)})"
        if flagged:
            modules_text += " *"
        rows.append([
            row.label,
            str(diameter),
            row.switch_config,
            f"{counts.nic_count:,}",
            f"{counts.switch_count:,}",
            modules_text,
            _money(cost.cost_per_nic_usd, "md"),
        ])
        payload_rows.append({
            "topology": row.label,
            "spec": row.spec,
            "d": diameter,
            "switch_config": row.switch_config,
            "N": counts.nic_count,
            "N_s": counts.switch_count,
            "N_o": modules,
            "rate": row.rate_gbps,
            "cost_per_nic_usd": round_dollars(cost.cost_per_nic_usd),
            "cost_per_nic_exact": str(cost.cost_per_nic_usd),
            "published_N_o": row.optical_modules,
            "published_cost_per_nic_usd": row.cost_per_nic_usd,
            "matches": row_match,
        })
    if args.format == "csv":
        csv_headers = ["topology", "d", "switch_config", "N", "N_s", "N_o",
                       "rate", "cost_per_nic_usd", "cost_per_nic_exact",
                       "matches"]
        csv_rows = [[str(p["topology"]), str(p["d"]), p["switch_config"],
                     str(p["N"]), str(p["N_s"]), str(p["N_o"]), str(p["rate"]),
                     str(p["cost_per_nic_usd"]), p["cost_per_nic_exact"],
                     str(p["matches"]).lower()]
                    for p in payload_rows]
        _emit(out, "csv", csv_headers, csv_rows, None)
    else:
        _emit(out, args.format, headers, rows,
              {"rows": payload_rows, "footnote": reference.FOOTNOTE,
               "all_match": all_match},
              trailer=[f"* {reference.FOOTNOTE}"])
    return EXIT_OK if all_match else EXIT_MISMATCH


# ---------------------------------------------------------------------------
# analyze / compare


def _analyze_one(spec_text: str, prices: PriceTable, access_medium: str,
                 analytic_only: bool):
    """Metrics plus cost for one spec string; returns a flat dict payload."""
    params = specs.resolve_params(spec_text)
    if analytic_only:
        counts = metrics.analytic_counts(params, access_medium=access_medium)
        diameter = metrics.analytic_diameter(params)
        topo = None
    else:
        topo = generators.build(params, access_medium=access_medium)
        counts = metrics.tally(topo, access_medium=access_medium)
        diameter = metrics.diameter_switch_hops(topo)
    try:
        beta = metrics.bisection_estimate(params)
    except metrics.MetricsError:
        beta = None  # no cut estimate for this instance (reported as n/a)
    cost = evaluate(counts, prices)
    report = metrics.MetricsReport(counts, diameter, beta, params)
    payload = report.json_obj()
    payload["topology"] = specs.format_spec(params.family)
    payload["cost_total_usd"] = round_dollars(cost.total_usd)
    payload["cost_per_nic_usd"] = round_dollars(cost.cost_per_nic_usd)
    payload["cost_per_nic_exact"] = str(cost.cost_per_nic_usd)
    return payload, topo


ANALYZE_FIELDS = ["topology", "d", "N", "N_s", "N_o", "rate", "beta",
                  "cost_total_usd", "cost_per_nic_usd", "cost_per_nic_exact"]


def cmd_analyze(args, out) -> int:
    prices = _load_prices(args.prices)
    access_medium, prices = _parse_access_medium(args.access_medium, prices)
    payload, topo = _analyze_one(args.spec, prices, access_medium,
                                 args.analytic_only)
    if args.out:
        if topo is None:
            topo = generators.build(specs.resolve_params(args.spec),
                                    access_medium=access_medium)
        Path(args.out).write_text(export_topology(topo))
    row = [str(payload[f]) for f in ANALYZE_FIELDS]
    _emit(out, args.format, ANALYZE_FIELDS, [row], payload)
    return EXIT_OK


def _read_compare_config(path: str) -> tuple[list[str], str | None]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read compare config: {exc}") from exc
    prices_path: str | None = None
    spec_list: list[str] = []
    try:
        data = json.loads(text)
    except json.JSONDecodeError:
        data = None
    if data is not None:
        if not isinstance(data, dict) or "specs" not in data:
            raise UsageError("compare JSON must be an object with a 'specs' list")
        spec_list = [str(s) for s in data["specs"]]
        prices_path = data.get("prices")
    else:
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith("prices"):
                _, _, value = line.partition("=")
                prices_path = value.strip()
                if not prices_path:
                    raise UsageError("bad prices line in compare config")
            else:
                spec_list.append(line)
    if not spec_list:
        raise UsageError("compare config lists no topology specs")
    if prices_path is not None and not Path(prices_path).is_absolute():
        prices_path = str(Path(path).parent / prices_path)
    return spec_list, prices_path


def cmd_compare(args, out) -> int:
    spec_list, config_prices = _read_compare_config(args.config)
    prices = _load_prices(args.prices if args.prices else config_prices)
    headers = ANALYZE_FIELDS + ["reduction_vs_first_pct"]
    rows: list[list[str]] = []
    payloads = []
    baseline: Fraction | None = None
    failed = False
    for spec_text in spec_list:
        try:
            payload, _ = _analyze_one(spec_text, prices, OPTICAL,
                                      analytic_only=True)
        except (SpecStringError, InfeasibleParamsError, PriceError,
                metrics.MetricsError) as exc:
            failed = True
            rows.append([spec_text, "error"] + [""] * (len(headers) - 3)
                        + [str(exc)])
            payloads.append({"topology": spec_text, "error": str(exc)})
            continue
        exact = Fraction(payload["cost_per_nic_exact"])
        if baseline is None:
            baseline = exact
            pct_text = "0.00"
            pct = Fraction(0)
        else:
            pct = reduction(baseline, exact)
            pct_text = f"{float(pct):.2f}"
        payload["reduction_vs_first_pct"] = pct_text
        payloads.append(payload)
        rows.append([str(payload[f]) for f in ANALYZE_FIELDS] + [pct_text])
    _emit(out, args.format, headers, rows, payloads)
    return EXIT_INFEASIBLE if failed else EXIT_OK


# ---------------------------------------------------------------------------
# flatten / search / generate


def cmd_flatten(args, out) -> int:
    try:
        state = flattening.DragonflyState.balanced(
            args.radix, args.h, args.nics_per_group, args.g, args.variant)
    except ValueError as exc:
        raise InfeasibleParamsError(str(exc)) from exc
    steps = flattening.trace(state, args.steps)
    headers = ["step", "radix", "nics_per_switch", "switches_per_group",
               "global_ports", "nics_per_group", "groups", "class"]
    rows = []
    payload = []
    for i, st, cls in steps:
        rows.append([str(i), str(st.radix), str(st.nics_per_switch),
                     str(st.switches_per_group),
                     str(st.global_ports_per_switch),
                     str(st.nics_per_group), str(st.groups), cls.value])
        payload.append({
            "step": i, "radix": st.radix,
            "nics_per_switch": st.nics_per_switch,
            "switches_per_group": st.switches_per_group,
            "global_ports": st.global_ports_per_switch,
            "nics_per_group": st.nics_per_group,
            "groups": st.groups, "class": cls.value,
        })
    _emit(out, args.format, headers, rows, payload)
    return EXIT_OK


SEARCH_FIELDS = ["topology", "d", "N", "N_s", "N_o", "rate", "beta",
                 "cost_per_nic_usd", "cost_per_nic_exact"]


def cmd_search(args, out) -> int:
    prices = _load_prices(args.prices)
    try:
        planes = tuple(int(x) for x in args.planes.split(","))
    except ValueError:
        raise UsageError(f"bad plane list {args.planes!r}")
    try:
        slack = Fraction(args.slack)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"bad slack {args.slack!r}")
    constraints = explorer.SearchConstraints(
        target_nics=args.target_nics,
        plane_choices=planes,
        max_dimensions=args.max_dims,
        slack=slack,
        require_full_port_use=(True if args.full_port_use == "always"
                               else False if args.full_port_use == "never"
                               else None),
        balanced_cut_only=not args.allow_unbalanced_cut,
    )
    results = explorer.search(constraints, prices)
    rows = []
    payload = []
    for res in results:
        obj = res.report.json_obj()
        obj["cost_per_nic_usd"] = round_dollars(res.cost_per_nic)
        obj["cost_per_nic_exact"] = str(res.cost_per_nic)
        payload.append(obj)
        rows.append([str(obj[f]) for f in SEARCH_FIELDS])
    _emit(out, args.format, SEARCH_FIELDS, rows, payload)
    return EXIT_OK


def cmd_generate(args, out) -> int:
    prices = _load_prices(args.prices)
    access_medium, _ = _parse_access_medium(args.access_medium, prices)
    params = specs.resolve_params(args.spec)
    topo = generators.build(params, access_medium=access_medium)
    text = export_topology(topo)
    if args.out:
        Path(args.out).write_text(text)
        out.write(f"wrote {len(topo.nodes)} nodes, {len(topo.links)} link "
                  f"records to {args.out}\n")
    else:
        out.write(text)
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument wiring


def _build_parser() -> _Parser:
    parser = _Parser(prog="mphx",
                     description="Multi-plane network topology workbench")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("md", "csv", "json"),
                        default="md", help="output format (default md)")
    common.add_argument("--prices", metavar="PATH",
                        help="price table file (JSON or key=value text)")
    common.add_argument("--out", metavar="PATH",
                        help="write output to PATH (for analyze and generate: "
                             "the topology export)")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("table2", parents=[common],
                   help="reproduce the published eight-topology comparison")

    analyze = sub.add_parser("analyze", parents=[common],
                             help="metrics and cost for one topology spec")
    analyze.add_argument("spec", help="topology spec string, e.g. ft3:k=64")
    analyze.add_argument("--analytic-only", action="store_true",
                         help="skip graph construction, use closed forms")
    analyze.add_argument("--access-medium", default=OPTICAL,
                         metavar="optical|copper:<usd>",
                         help="medium of NIC-switch links (default optical)")

    compare = sub.add_parser("compare", parents=[common],
                             help="tabulate several specs against the first")
    compare.add_argument("config", help="config file listing spec strings")

    flatten = sub.add_parser("flatten", parents=[common],
                             help="trace radix-breakout flattening steps")
    flatten.add_argument("--radix", type=int, required=True)
    flatten.add_argument("--h", type=int, required=True,
                         help="global ports per switch")
    flatten.add_argument("--nics-per-group", type=int, required=True)
    flatten.add_argument("--g", type=int, required=True, help="group count")
    flatten.add_argument("--variant", choices=(flattening.DRAGONFLY,
                                               flattening.DRAGONFLY_PLUS),
                         default=flattening.DRAGONFLY)
    flatten.add_argument("--steps", type=int, default=1)

    search = sub.add_parser("search", parents=[common],
                            help="rank HyperX configurations by cost per NIC")
    search.add_argument("--target-nics", type=int, required=True)
    search.add_argument("--planes", default="1,2,4,8",
                        help="comma-separated plane counts (default 1,2,4,8)")
    search.add_argument("--max-dims", type=int, default=3)
    search.add_argument("--slack", default="0.1",
                        help="admission window above target (default 0.1)")
    search.add_argument("--full-port-use",
                        choices=("both", "always", "never"), default="both",
                        help="fold spare ports into the last dimension")
    search.add_argument("--allow-unbalanced-cut", action="store_true",
                        help="admit designs whose dimension cut drops below "
                             "half injection bandwidth")

    generate = sub.add_parser("generate", parents=[common],
                              help="build a topology and write its export")
    generate.add_argument("spec")
    generate.add_argument("--access-medium", default=OPTICAL,
                          metavar="optical|copper:<usd>")
    return parser


_COMMANDS = {
    "table2": cmd_table2,
    "analyze": cmd_analyze,
    "compare": cmd_compare,
    "flatten": cmd_flatten,
    "search": cmd_search,
    "generate": cmd_generate,
}


def main(argv: list[str] | None = None, out=None) -> int:
    out = out if out is not None else sys.stdout
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.out and args.command in ("table2", "compare", "flatten",
                                         "search"):
            # analyze/generate interpret --out as the topology export path.
            buffer = io.StringIO()
            code = _COMMANDS[args.command](args, buffer)
            Path(args.out).write_text(buffer.getvalue())
            return code
        return _COMMANDS[args.command](args, out)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SpecStringError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InfeasibleParamsError, metrics.MetricsError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except PriceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BrokenPipeError:
        # Downstream closed (e.g. piping into head); exit quietly.
        try:
            sys.stdout.close()
        except OSError:
            pass
        return EXIT_OK
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
