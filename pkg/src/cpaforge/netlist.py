"""Gate-level netlist IR.

Netlists are built through :class:`NetlistBuilder` and frozen into an
immutable :class:`Netlist`.  Nets and gates carry dense integer ids assigned
in construction order, so two identical build scripts always produce
identical netlists (and identical JSON).

Simulation is bit-parallel: every net value is a Python ``int`` whose bit
``k`` is the net's value under stimulus vector ``k``.  ``evaluate`` is the
single-vector convenience wrapper over :func:`simulate`.
"""

from __future__ import annotations

import enum
import heapq
import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

CONST0 = "const0"


class NetlistError(Exception):
    """Structural problem in a netlist or a misuse of the builder."""


class CycleError(NetlistError):
    def __init__(self, net: int):
        super().__init__(f"combinational cycle through net {net}")
        self.net = net


class GateKind(str, enum.Enum):
    INV = "INV"
    BUF = "BUF"
    AND2 = "AND2"
    OR2 = "OR2"
    NAND2 = "NAND2"
    NOR2 = "NOR2"
    XOR2 = "XOR2"
    XNOR2 = "XNOR2"
    MUX2 = "MUX2"  # fanin order: select, in0, in1

    @property
    def arity(self) -> int:
        if self in (GateKind.INV, GateKind.BUF):
            return 1
        if self is GateKind.MUX2:
            return 3
        return 2


@dataclass(frozen=True)
class Gate:
    id: int
    kind: GateKind
    fanin: tuple[int, ...]
    out: int


@dataclass(frozen=True)
class Netlist:
    name: str
    inputs: tuple[int, ...]
    outputs: tuple[int, ...]
    gates: tuple[Gate, ...]
    nets: Mapping[int, str | None]
    _driver: dict[int, int] = field(default=None, repr=False, compare=False)  # type: ignore[assignment]

    def __post_init__(self):
        driver: dict[int, int] = {}
        inputs = set(self.inputs)
        for g in self.gates:
            if len(g.fanin) != g.kind.arity:
                raise NetlistError(f"gate {g.id}: {g.kind.value} takes {g.kind.arity} fanins, got {len(g.fanin)}")
            for f in g.fanin:
                if f not in self.nets:
                    raise NetlistError(f"gate {g.id}: unknown net {f}")
            if g.out in inputs:
                raise NetlistError(f"gate {g.id} drives input net {g.out}")
            if g.out in driver:
                raise NetlistError(f"net {g.out} has multiple drivers")
            driver[g.out] = g.id
        for net in self.nets:
            if net not in inputs and net not in driver:
                raise NetlistError(f"net {net} is undriven")
        for net in self.outputs:
            if net not in self.nets:
                raise NetlistError(f"unknown output net {net}")
        object.__setattr__(self, "_driver", driver)

    @property
    def num_nets(self) -> int:
        return len(self.nets)

    @property
    def const0(self) -> int | None:
        """The constant-0 pseudo-input, if this netlist has one."""
        for net in self.inputs:
            if self.nets.get(net) == CONST0:
                return net
        return None

    @property
    def primary_inputs(self) -> tuple[int, ...]:
        """Inputs that take stimulus (everything except the constant-0 net)."""
        c = self.const0
        return tuple(i for i in self.inputs if i != c)

    def driver(self, net: int) -> Gate | None:
        gid = self._driver.get(net)
        return None if gid is None else self.gates[gid]

    def find_inputs(self, prefix: str) -> list[int]:
        """Input nets named ``prefix[i]``, ordered by bit index."""
        found = {}
        for net in self.inputs:
            name = self.nets.get(net) or ""
            if name.startswith(prefix + "[") and name.endswith("]"):
                found[int(name[len(prefix) + 1 : -1])] = net
        return [found[i] for i in sorted(found)]

    def find_input(self, name: str) -> int | None:
        for net in self.inputs:
            if self.nets.get(net) == name:
                return net
        return None

    def fanout(self) -> dict[int, list[tuple[int, int]]]:
        """net -> list of (gate id, fanin slot) reading it."""
        sinks: dict[int, list[tuple[int, int]]] = {n: [] for n in self.nets}
        for g in self.gates:
            for slot, f in enumerate(g.fanin):
                sinks[f].append((g.id, slot))
        return sinks


class NetlistBuilder:
    """Single-owner mutable construction of a :class:`Netlist`."""

    def __init__(self, name: str):
        self.name = name
        self._inputs: list[int] = []
        self._outputs: list[int] = []
        self._gates: list[Gate] = []
        self._nets: dict[int, str | None] = {}
        self._const0: int | None = None
        self._frozen = False

    def _check_open(self):
        if self._frozen:
            raise NetlistError("builder is frozen")

    def _new_net(self, name: str | None = None) -> int:
        nid = len(self._nets)
        self._nets[nid] = name
        return nid

    def add_input(self, name: str | None = None) -> int:
        self._check_open()
        nid = self._new_net(name)
        self._inputs.append(nid)
        return nid

    def add_inputs(self, prefix: str, width: int) -> list[int]:
        return [self.add_input(f"{prefix}[{i}]") for i in range(width)]

    def const0(self) -> int:
        """Shared constant-0 pseudo-input (created on first use)."""
        if self._const0 is None:
            self._const0 = self.add_input(CONST0)
        return self._const0

    def add_gate(self, kind: GateKind, fanins: Sequence[int], name: str | None = None) -> int:
        self._check_open()
        kind = GateKind(kind)
        if len(fanins) != kind.arity:
            raise NetlistError(f"{kind.value} takes {kind.arity} fanins, got {len(fanins)}")
        for f in fanins:
            if f not in self._nets:
                raise NetlistError(f"unknown net {f}")
        out = self._new_net(name)
        self._gates.append(Gate(len(self._gates), kind, tuple(fanins), out))
        return out

    def name_net(self, net: int, name: str) -> None:
        """Attach a name to ``net`` unless it already has one."""
        if self._nets[net] is None:
            self._nets[net] = name

    def add_output(self, net: int, name: str | None = None) -> None:
        self._check_open()
        if net not in self._nets:
            raise NetlistError(f"unknown net {net}")
        if name is not None:
            self.name_net(net, name)
        self._outputs.append(net)

    def add_outputs(self, prefix: str, nets: Iterable[int]) -> None:
        for i, n in enumerate(nets):
            self.add_output(n, f"{prefix}[{i}]")

    # gate shorthands
    def inv(self, a):
        return self.add_gate(GateKind.INV, (a,))

    def buf(self, a):
        return self.add_gate(GateKind.BUF, (a,))

    def and2(self, a, b):
        return self.add_gate(GateKind.AND2, (a, b))

    def or2(self, a, b):
        return self.add_gate(GateKind.OR2, (a, b))

    def xor2(self, a, b):
        return self.add_gate(GateKind.XOR2, (a, b))

    def xnor2(self, a, b):
        return self.add_gate(GateKind.XNOR2, (a, b))

    def mux2(self, sel, in0, in1):
        return self.add_gate(GateKind.MUX2, (sel, in0, in1))

    def instantiate(self, sub: Netlist, inputs: Sequence[int]) -> list[int]:
        """Copy ``sub`` into this builder.

        ``inputs`` maps ``sub.primary_inputs`` positionally; the constant-0
        pseudo-input is connected to this builder's own constant.  Returns
        the nets corresponding to ``sub.outputs``.
        """
        prim = sub.primary_inputs
        if len(inputs) != len(prim):
            raise NetlistError(f"{sub.name}: expected {len(prim)} inputs, got {len(inputs)}")
        remap = dict(zip(prim, inputs))
        if sub.const0 is not None:
            remap[sub.const0] = self.const0()
        for g in topo_order_gates(sub):
            remap[g.out] = self.add_gate(g.kind, [remap[f] for f in g.fanin])
        return [remap[o] for o in sub.outputs]

    def freeze(self) -> Netlist:
        self._check_open()
        self._frozen = True
        nl = Netlist(self.name, tuple(self._inputs), tuple(self._outputs), tuple(self._gates), dict(self._nets))
        topo_order(nl)  # acyclicity
        return nl


def full_adder(b: NetlistBuilder, x: int, y: int, cin: int) -> tuple[int, int]:
    """Two-half-adder full adder; returns (sum, carry)."""
    p = b.xor2(x, y)
    s = b.xor2(p, cin)
    c = b.or2(b.and2(x, y), b.and2(p, cin))
    return s, c


def half_adder(b: NetlistBuilder, x: int, y: int) -> tuple[int, int]:
    return b.xor2(x, y), b.and2(x, y)


def topo_order(netlist: Netlist) -> list[int]:
    """Gate ids in dependency order, ties broken by ascending gate id."""
    driver = netlist._driver
    indeg = [0] * len(netlist.gates)
    users: dict[int, list[int]] = {}
    for g in netlist.gates:
        for f in set(g.fanin):
            if f in driver:
                indeg[g.id] += 1
                users.setdefault(driver[f], []).append(g.id)
    ready = [g.id for g in netlist.gates if indeg[g.id] == 0]
    heapq.heapify(ready)
    order = []
    while ready:
        gid = heapq.heappop(ready)
        order.append(gid)
        for u in users.get(gid, ()):
            indeg[u] -= 1
            if indeg[u] == 0:
                heapq.heappush(ready, u)
    if len(order) != len(netlist.gates):
        stuck = next(g for g in netlist.gates if indeg[g.id] > 0)
        raise CycleError(_cycle_net(netlist, stuck.id, indeg))
    return order


def _cycle_net(netlist: Netlist, start: int, indeg: list[int]) -> int:
    # Walk backwards through unresolved gates; the walk must revisit a gate.
    seen = set()
    gid = start
    while gid not in seen:
        seen.add(gid)
        g = netlist.gates[gid]
        gid = next(netlist._driver[f] for f in g.fanin if f in netlist._driver and indeg[netlist._driver[f]] > 0)
    return netlist.gates[gid].out


def topo_order_gates(netlist: Netlist) -> list[Gate]:
    # Builder-made netlists are already ordered by id; only re-sort if needed.
    if all(all(f not in netlist._driver or netlist._driver[f] < g.id for f in g.fanin) for g in netlist.gates):
        return list(netlist.gates)
    return [netlist.gates[i] for i in topo_order(netlist)]


def simulate(netlist: Netlist, stimulus: Mapping[int, int], count: int, order: Sequence[Gate] | None = None) -> list[int]:
    """Bit-parallel evaluation of ``count`` vectors.

    ``stimulus`` maps every primary input to a packed int (bit k = vector k).
    Returns a list indexed by net id.
    """
    mask = (1 << count) - 1
    values = [0] * netlist.num_nets
    missing = [i for i in netlist.primary_inputs if i not in stimulus]
    if missing:
        raise NetlistError(f"stimulus missing input nets {missing[:8]}")
    for i in netlist.primary_inputs:
        values[i] = stimulus[i] & mask
    for g in order if order is not None else topo_order_gates(netlist):
        f = g.fanin
        k = g.kind
        if k is GateKind.AND2:
            v = values[f[0]] & values[f[1]]
        elif k is GateKind.XOR2:
            v = values[f[0]] ^ values[f[1]]
        elif k is GateKind.OR2:
            v = values[f[0]] | values[f[1]]
        elif k is GateKind.MUX2:
            s = values[f[0]]
            v = (values[f[2]] & s) | (values[f[1]] & ~s & mask)
        elif k is GateKind.INV:
            v = ~values[f[0]] & mask
        elif k is GateKind.BUF:
            v = values[f[0]]
        elif k is GateKind.NAND2:
            v = ~(values[f[0]] & values[f[1]]) & mask
        elif k is GateKind.NOR2:
            v = ~(values[f[0]] | values[f[1]]) & mask
        else:  # XNOR2
            v = ~(values[f[0]] ^ values[f[1]]) & mask
        values[g.out] = v
    return values


def evaluate(netlist: Netlist, stimulus: Mapping[int, bool]) -> dict[int, bool]:
    """Evaluate one input assignment; returns the value of every net."""
    values = simulate(netlist, {k: int(bool(v)) for k, v in stimulus.items()}, 1)
    return {n: bool(values[n]) for n in range(netlist.num_nets)}


def count_cells(netlist: Netlist) -> dict[GateKind, int]:
    return dict(Counter(g.kind for g in netlist.gates))


# --- packing helpers -------------------------------------------------------


def pack_planes(bits: np.ndarray) -> list[int]:
    """(vectors, width) bit matrix -> one packed int per column."""
    bits = np.asarray(bits, dtype=np.uint8)
    packed = np.packbits(bits.T, axis=1, bitorder="little")
    return [int.from_bytes(row.tobytes(), "little") for row in packed]


def unpack_planes(planes: Sequence[int], count: int) -> np.ndarray:
    """Inverse of :func:`pack_planes`: returns a (count, len(planes)) uint8 matrix."""
    nbytes = (count + 7) // 8
    raw = b"".join(p.to_bytes(nbytes, "little") for p in planes)
    arr = np.frombuffer(raw, dtype=np.uint8).reshape(len(planes), nbytes)
    return np.unpackbits(arr, axis=1, count=count, bitorder="little").T


def ints_to_bits(values: Sequence[int], width: int) -> np.ndarray:
    nbytes = max(1, (width + 7) // 8)
    raw = b"".join(int(v).to_bytes(nbytes, "little") for v in values)
    arr = np.frombuffer(raw, dtype=np.uint8).reshape(len(values), nbytes)
    return np.unpackbits(arr, axis=1, count=width, bitorder="little")


def bits_to_ints(bits: np.ndarray) -> list[int]:
    packed = np.packbits(np.asarray(bits, dtype=np.uint8), axis=1, bitorder="little")
    return [int.from_bytes(row.tobytes(), "little") for row in packed]


# --- serialization ---------------------------------------------------------


def to_dict(netlist: Netlist) -> dict:
    return {
        "name": netlist.name,
        "inputs": list(netlist.inputs),
        "outputs": list(netlist.outputs),
        "nets": {str(k): netlist.nets[k] for k in sorted(netlist.nets)},
        "gates": [{"id": g.id, "kind": g.kind.value, "fanin": list(g.fanin), "out": g.out} for g in netlist.gates],
    }


def from_dict(data: Mapping) -> Netlist:
    try:
        gates = tuple(Gate(int(g["id"]), GateKind(g["kind"]), tuple(int(f) for f in g["fanin"]), int(g["out"])) for g in data["gates"])
        nl = Netlist(
            str(data["name"]),
            tuple(int(i) for i in data["inputs"]),
            tuple(int(o) for o in data["outputs"]),
            tuple(sorted(gates, key=lambda g: g.id)),
            {int(k): v for k, v in data["nets"].items()},
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise NetlistError(f"malformed netlist document: {exc}") from exc
    if [g.id for g in nl.gates] != list(range(len(nl.gates))):
        raise NetlistError("gate ids must be dense from 0")
    topo_order(nl)
    return nl


def dumps(netlist: Netlist) -> str:
    return json.dumps(to_dict(netlist), indent=1) + "\n"


def loads(text: str) -> Netlist:
    return from_dict(json.loads(text))


def save(netlist: Netlist, path) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(netlist))


def load(path) -> Netlist:
    with open(path) as fh:
        return loads(fh.read())


_VERILOG_PRIM = {
    GateKind.INV: "not",
    GateKind.BUF: "buf",
    GateKind.AND2: "and",
    GateKind.OR2: "or",
    GateKind.NAND2: "nand",
    GateKind.NOR2: "nor",
    GateKind.XOR2: "xor",
    GateKind.XNOR2: "xnor",
}


def to_verilog(netlist: Netlist) -> str:
    """Structural Verilog-2001: gate primitives for 1/2-input cells, assigns for muxes.

    Input ports are ``n<id>``; output ports are ``o<k>`` (k = output index)
    assigned from their nets, since one net may feed several outputs.
    """
    mod = "".join(c if c.isalnum() or c == "_" else "_" for c in netlist.name) or "top"
    if mod[0].isdigit():
        mod = "m_" + mod
    c0 = netlist.const0
    ins = [f"n{i}" for i in netlist.primary_inputs]
    outs = [f"o{k}" for k in range(len(netlist.outputs))]
    lines = [f"module {mod} ({', '.join(ins + outs)});"]
    lines += [f"  input {p};" for p in ins]
    lines += [f"  output {p};" for p in outs]
    if c0 is not None:
        lines.append(f"  wire n{c0} = 1'b0;")
    lines += [f"  wire n{g.out};" for g in netlist.gates]
    for g in netlist.gates:
        args = ", ".join(f"n{x}" for x in (g.out, *g.fanin))
        if g.kind is GateKind.MUX2:
            s, a0, a1 = g.fanin
            lines.append(f"  assign n{g.out} = n{s} ? n{a1} : n{a0};")
        else:
            lines.append(f"  {_VERILOG_PRIM[g.kind]} g{g.id} ({args});")
    for k, o in enumerate(netlist.outputs):
        lines.append(f"  assign o{k} = n{o};")
    lines.append("endmodule")
    return "\n".join(lines) + "\n"
