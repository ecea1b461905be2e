"""Gate-level generator and analyzer for parallel-multiplier final adders."""

from .adders import AdderKind, AdderSpec, compose_hybrid, gen_adder, gen_bec, sqrt_block_sizes
from .multiplier import build_front_end, build_multiplier, dadda_heights
from .netlist import GateKind, Netlist, NetlistBuilder, count_cells, evaluate, topo_order
from .partition import RegionPartition, closed_form_partition, detect_regions, recommend
from .timing import ArrivalProfile, DelayModel, completion_time, cpa_input_profile, sta_arrival

__version__ = "0.1.0"

__all__ = [
    "AdderKind",
    "AdderSpec",
    "ArrivalProfile",
    "DelayModel",
    "GateKind",
    "Netlist",
    "NetlistBuilder",
    "RegionPartition",
    "build_front_end",
    "build_multiplier",
    "closed_form_partition",
    "completion_time",
    "compose_hybrid",
    "count_cells",
    "cpa_input_profile",
    "dadda_heights",
    "detect_regions",
    "evaluate",
    "gen_adder",
    "gen_bec",
    "recommend",
    "sqrt_block_sizes",
    "sta_arrival",
    "topo_order",
]
