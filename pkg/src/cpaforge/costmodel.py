"""Area and switching-power proxies from gate histograms and random-vector activity."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Mapping

import numpy as np

from .config import read_config
from .netlist import GateKind, Netlist, count_cells, pack_planes, simulate

# static CMOS transistor counts; doubles as the per-gate switched-capacitance weight
DEFAULT_COSTS = {
    GateKind.INV: 2.0,
    GateKind.BUF: 4.0,
    GateKind.NAND2: 4.0,
    GateKind.NOR2: 4.0,
    GateKind.AND2: 6.0,
    GateKind.OR2: 6.0,
    GateKind.XOR2: 12.0,
    GateKind.XNOR2: 12.0,
    GateKind.MUX2: 12.0,
}
DEFAULT_VECTORS = 2000
DEFAULT_SEED = 0xDADDA


class CostError(ValueError):
    pass


def _table(entries: Mapping, what: str) -> dict[GateKind, float]:
    out = {GateKind(k): float(v) for k, v in entries.items()}
    bad = [k.value for k, v in out.items() if not v > 0]
    if bad:
        raise CostError(f"{what} entries must be positive: {bad}")
    return out


@dataclass(frozen=True)
class CostTables:
    area: Mapping[GateKind, float] = field(default_factory=lambda: dict(DEFAULT_COSTS))
    power: Mapping[GateKind, float] = field(default_factory=lambda: dict(DEFAULT_COSTS))

    def __post_init__(self):
        object.__setattr__(self, "area", _table(self.area, "area"))
        object.__setattr__(self, "power", _table(self.power, "power"))

    def scaled(self, area: float = 1.0, power: float = 1.0) -> "CostTables":
        return CostTables({k: v * area for k, v in self.area.items()}, {k: v * power for k, v in self.power.items()})


def load_tables(path) -> CostTables:
    """``[area]`` and ``[power]`` tables of ``KIND = value``; top-level keys set both."""
    data = read_config(path)
    area_t = dict(DEFAULT_COSTS)
    power_t = dict(DEFAULT_COSTS)
    try:
        for k, v in data.items():
            if not isinstance(v, dict):
                area_t[GateKind(k.upper())] = power_t[GateKind(k.upper())] = v
        for k, v in data.get("area", {}).items():
            area_t[GateKind(k.upper())] = v
        for k, v in data.get("power", {}).items():
            power_t[GateKind(k.upper())] = v
        return CostTables(area_t, power_t)
    except (ValueError, TypeError) as exc:
        raise CostError(f"{path}: {exc}") from exc


@dataclass(frozen=True)
class CostReport:
    name: str
    completion: float
    area: float
    power: float
    seed: int
    vectors: int

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=1) + "\n"


def area(netlist: Netlist, tables: CostTables | None = None) -> float:
    tables = tables or CostTables()
    total = 0.0
    for kind, n in count_cells(netlist).items():
        if kind not in tables.area:
            raise CostError(f"no area entry for {kind.value}")
        total += n * tables.area[kind]
    return total


@dataclass(frozen=True)
class Activity:
    toggles: tuple[int, ...]  # indexed by net id
    vectors: int


def count_toggles(netlist: Netlist, stimulus: Mapping[int, int], vectors: int) -> Activity:
    """Toggles per net between consecutive vectors of a packed stimulus."""
    values = simulate(netlist, stimulus, vectors)
    mask = (1 << (vectors - 1)) - 1
    return Activity(tuple(((v ^ (v >> 1)) & mask).bit_count() for v in values), vectors)


def estimate_activity(netlist: Netlist, vector_count: int = DEFAULT_VECTORS, seed: int = DEFAULT_SEED) -> Activity:
    """Uniform random input vectors (numpy PCG64 seeded with ``seed``)."""
    if vector_count < 1:
        raise CostError("vector_count must be >= 1")
    rng = np.random.default_rng(seed)
    prim = netlist.primary_inputs
    bits = rng.integers(0, 2, size=(vector_count, len(prim)), dtype=np.uint8)
    stim = dict(zip(prim, pack_planes(bits)))
    return count_toggles(netlist, stim, vector_count)


def power(netlist: Netlist, activity: Activity, tables: CostTables | None = None) -> float:
    """Sum over gates of output toggles x weight, per vector."""
    tables = tables or CostTables()
    if len(activity.toggles) < netlist.num_nets:
        raise CostError("activity does not cover every net")
    total = 0.0
    for g in netlist.gates:
        w = tables.power.get(g.kind)
        if w is None:
            raise CostError(f"no power entry for {g.kind.value}")
        total += activity.toggles[g.out] * w
    return total / activity.vectors
