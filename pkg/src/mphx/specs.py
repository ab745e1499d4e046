"""Compact topology spec strings and default hardware pairing.

Grammar: ``<family>:<key>=<value>,...`` with integer values; list values
(dimensions, multiplicities, budgets) use ``x`` separators and ``-`` for an
unset budget slot. Formatting emits a canonical form (fixed key order,
defaults omitted), so format(parse(s)) is idempotent.
"""

from __future__ import annotations

from .model import (
    DragonflyParams,
    DragonflyPlusParams,
    FamilyParams,
    FatTree3Params,
    InfeasibleParamsError,
    MphxParams,
    MpFatTree2Params,
    NicSpec,
    SwitchSpec,
    TopologyParams,
)

DEFAULT_NIC_BANDWIDTH_GBPS = 1600
DEFAULT_SWITCH_BANDWIDTH_GBPS = 102_400


class SpecStringError(ValueError):
    """A topology spec string that does not parse."""


def _parse_int(family: str, key: str, value: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise SpecStringError(f"{family}: {key} must be an integer, got {value!r}")


def _parse_int_list(family: str, key: str, value: str) -> tuple[int, ...]:
    return tuple(_parse_int(family, key, item) for item in value.split("x"))


def _parse_budget_list(family: str, key: str,
                       value: str) -> tuple[int | None, ...]:
    return tuple(
        None if item == "-" else _parse_int(family, key, item)
        for item in value.split("x"))


_REQUIRED = {
    "mphx": ("n", "p", "dims"),
    "ft3": ("k",),
    "mpft2": ("n", "r", "nics"),
    "dfly": ("p", "a", "h", "g"),
    "dflyplus": ("leaves", "spines", "npl", "g"),
}
_OPTIONAL = {
    "mphx": ("mult", "budgets"),
    "ft3": (),
    "mpft2": (),
    "dfly": (),
    "dflyplus": ("uplinks", "global"),
}


def parse_spec(text: str) -> FamilyParams:
    """Parse a spec string into family parameters (unknown keys rejected)."""
    family, sep, body = text.strip().partition(":")
    family = family.strip()
    if not sep or family not in _REQUIRED:
        known = ", ".join(sorted(_REQUIRED))
        raise SpecStringError(
            f"expected '<family>:k=v,...' with family one of {known}; got {text!r}")
    fields: dict[str, str] = {}
    for item in body.split(","):
        key, eq, value = item.partition("=")
        key = key.strip()
        if not eq or not key or not value.strip():
            raise SpecStringError(f"{family}: bad key=value item {item!r}")
        if key in fields:
            raise SpecStringError(f"{family}: duplicate key {key!r}")
        if key not in _REQUIRED[family] and key not in _OPTIONAL[family]:
            raise SpecStringError(f"{family}: unknown key {key!r}")
        fields[key] = value.strip()
    missing = [key for key in _REQUIRED[family] if key not in fields]
    if missing:
        raise SpecStringError(f"{family}: missing keys {', '.join(missing)}")

    # Family invariant violations propagate as InfeasibleParamsError: the
    # string parsed, the parameters are the problem.
    if family == "mphx":
        return MphxParams(
            plane_count=_parse_int(family, "n", fields["n"]),
            nic_ports_per_switch=_parse_int(family, "p", fields["p"]),
            dims=_parse_int_list(family, "dims", fields["dims"]),
            multiplicities=(_parse_int_list(family, "mult", fields["mult"])
                            if "mult" in fields else ()),
            dim_port_budgets=(
                _parse_budget_list(family, "budgets", fields["budgets"])
                if "budgets" in fields else ()),
        )
    if family == "ft3":
        return FatTree3Params(k=_parse_int(family, "k", fields["k"]))
    if family == "mpft2":
        return MpFatTree2Params(
            plane_count=_parse_int(family, "n", fields["n"]),
            per_plane_radix=_parse_int(family, "r", fields["r"]),
            nic_count=_parse_int(family, "nics", fields["nics"]),
        )
    if family == "dfly":
        return DragonflyParams(
            nics_per_switch=_parse_int(family, "p", fields["p"]),
            switches_per_group=_parse_int(family, "a", fields["a"]),
            global_ports_per_switch=_parse_int(family, "h", fields["h"]),
            groups=_parse_int(family, "g", fields["g"]),
        )
    return DragonflyPlusParams(
        leaves_per_group=_parse_int(family, "leaves", fields["leaves"]),
        spines_per_group=_parse_int(family, "spines", fields["spines"]),
        nics_per_leaf=_parse_int(family, "npl", fields["npl"]),
        groups=_parse_int(family, "g", fields["g"]),
        uplinks_per_pair=(_parse_int(family, "uplinks", fields["uplinks"])
                          if "uplinks" in fields else None),
        global_ports_per_spine=(_parse_int(family, "global", fields["global"])
                                if "global" in fields else None),
    )


def format_spec(family: FamilyParams) -> str:
    """Canonical spec string for family parameters."""
    if isinstance(family, MphxParams):
        parts = [f"n={family.plane_count}", f"p={family.nic_ports_per_switch}",
                 "dims=" + "x".join(map(str, family.dims))]
        if any(m != 1 for m in family.multiplicities):
            parts.append("mult=" + "x".join(map(str, family.multiplicities)))
        if any(b is not None for b in family.dim_port_budgets):
            parts.append("budgets=" + "x".join(
                "-" if b is None else str(b) for b in family.dim_port_budgets))
        return "mphx:" + ",".join(parts)
    if isinstance(family, FatTree3Params):
        return f"ft3:k={family.k}"
    if isinstance(family, MpFatTree2Params):
        return (f"mpft2:n={family.plane_count},r={family.per_plane_radix},"
                f"nics={family.nic_count}")
    if isinstance(family, DragonflyParams):
        return (f"dfly:p={family.nics_per_switch},a={family.switches_per_group},"
                f"h={family.global_ports_per_switch},g={family.groups}")
    if isinstance(family, DragonflyPlusParams):
        text = (f"dflyplus:leaves={family.leaves_per_group},"
                f"spines={family.spines_per_group},"
                f"npl={family.nics_per_leaf},g={family.groups}")
        if family.uplinks_per_pair is not None:
            text += f",uplinks={family.uplinks_per_pair}"
        if family.global_ports_per_spine is not None:
            text += f",global={family.global_ports_per_spine}"
        return text
    raise TypeError(f"unknown family {type(family).__name__}")


def plane_count_of(family: FamilyParams) -> int:
    if isinstance(family, MphxParams):
        return family.plane_count
    if isinstance(family, MpFatTree2Params):
        return family.plane_count
    return 1


def default_hardware(family: FamilyParams,
                     nic_bandwidth_gbps: int = DEFAULT_NIC_BANDWIDTH_GBPS,
                     switch_bandwidth_gbps: int = DEFAULT_SWITCH_BANDWIDTH_GBPS,
                     ) -> tuple[NicSpec, SwitchSpec]:
    """Pair a family with the default NIC/switch generation.

    The switch breaks out to match the NIC per-port rate, one factor per
    plane (single-plane families run the switch at full NIC bandwidth).
    Tree families fix their own switch size (the radix is a family
    parameter), so small instances stay expressible; the published rows
    land on the default generation either way (64 x 1.6T = 512 x 200G =
    102.4T).
    """
    planes = plane_count_of(family)
    nic = NicSpec(nic_bandwidth_gbps, planes)
    rate = nic.port_rate_gbps
    if isinstance(family, FatTree3Params):
        ports = family.k
    elif isinstance(family, MpFatTree2Params):
        ports = family.per_plane_radix
    else:
        if switch_bandwidth_gbps % rate:
            raise InfeasibleParamsError(
                f"switch bandwidth {switch_bandwidth_gbps}G is not a multiple "
                f"of the {rate}G NIC port rate")
        ports = switch_bandwidth_gbps // rate
    sw = SwitchSpec(ports * rate, ports, rate)
    return nic, sw


def resolve_params(text: str,
                   nic_bandwidth_gbps: int = DEFAULT_NIC_BANDWIDTH_GBPS,
                   switch_bandwidth_gbps: int = DEFAULT_SWITCH_BANDWIDTH_GBPS,
                   ) -> TopologyParams:
    """Parse a spec string and pair it with default hardware."""
    family = parse_spec(text)
    nic, sw = default_hardware(family, nic_bandwidth_gbps, switch_bandwidth_gbps)
    return TopologyParams(family, nic, sw)
