"""Multi-plane network topology workbench.

Builders for multi-plane HyperX, 3-layer and multi-plane 2-layer fat-trees,
Dragonfly and Dragonfly+; diameter, component-count and bisection metrics;
a dollar cost model; radix-breakout flattening analysis; and a cost-ranked
design-space search. ``mphx --help`` lists the CLI surface.
"""

from .cost import (
    CostBreakdown,
    PriceTable,
    evaluate,
    load_price_table,
    reduction,
    round_dollars,
)
from .explorer import SearchConstraints, SearchResult, search
from .flattening import DragonflyState, FlatteningClass, breakout_step, classify
from .generators import (
    balanced_mphx_params,
    build,
    build_dragonfly,
    build_dragonfly_plus,
    build_fat_tree_3layer,
    build_mp_fat_tree_2layer,
    build_mphx,
)
from .metrics import (
    UNBOUNDED,
    ComponentCounts,
    MetricsReport,
    analytic_counts,
    analytic_diameter,
    bisection_bruteforce,
    bisection_estimate,
    diameter_switch_hops,
    tally,
)
from .model import (
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
    Violation,
    breakout_options,
    export_topology,
    validate,
)
from .specs import SpecStringError, format_spec, parse_spec, resolve_params

__version__ = "0.1.0"
