"""Unsigned N x N multiplier front-end: AND array plus Dadda column compression.

The front-end stops at the two operand rows of the final carry-propagate
adder.  Its outputs are ``row_a[0..2n-1]`` followed by ``row_b[0..2n-1]``;
columns holding a single settled bit tie ``row_b`` to the constant-0 net.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .netlist import Netlist, NetlistBuilder, NetlistError, full_adder, half_adder, topo_order_gates


@dataclass(frozen=True)
class DaddaSchedule:
    n: int
    heights: tuple[int, ...]

    @property
    def stages(self) -> int:
        return len(self.heights)


@dataclass(frozen=True)
class MultiplierFrontEnd:
    n: int
    netlist: Netlist
    row_a: tuple[int, ...]
    row_b: tuple[int, ...]
    full_adders: int = 0
    half_adders: int = 0

    @property
    def a(self) -> list[int]:
        return self.netlist.find_inputs("a")

    @property
    def b(self) -> list[int]:
        return self.netlist.find_inputs("b")


def dadda_heights(n: int) -> DaddaSchedule:
    """Stage targets, largest first, from d1 = 2 and d(j+1) = floor(1.5 d(j))."""
    if n < 2:
        raise ValueError(f"operand width must be >= 2, got {n}")
    seq = [2]
    while math.floor(1.5 * seq[-1]) < n:
        seq.append(math.floor(1.5 * seq[-1]))
    if n == 2:
        return DaddaSchedule(n, ())
    return DaddaSchedule(n, tuple(reversed(seq)))


def gen_partial_products(n: int, builder: NetlistBuilder | None = None) -> tuple[list[list[int]], NetlistBuilder]:
    """AND-gate array; column c gets AND2(a_i, b_j) for every i + j = c."""
    if n < 2:
        raise ValueError(f"operand width must be >= 2, got {n}")
    b = builder or NetlistBuilder(f"pp{n}")
    a_bits = b.add_inputs("a", n)
    b_bits = b.add_inputs("b", n)
    columns: list[list[int]] = [[] for _ in range(2 * n)]
    for i in range(n):
        for j in range(n):
            columns[i + j].append(b.and2(a_bits[i], b_bits[j]))
    return columns, b


def dadda_reduce(columns: list[list[int]], schedule: DaddaSchedule, builder: NetlistBuilder) -> tuple[list[list[int]], int, int]:
    """Reduce the matrix to height 2; returns (columns, #full adders, #half adders).

    Per stage, columns are visited LSB first.  A column whose height (bits
    present plus carries arriving from the column below in this stage)
    exceeds the target gets full adders while it is at least two over, then
    one half adder if it is still one over.  Cells consume the column's
    oldest bits first.
    """
    initial = max(len(c) for c in columns)
    if schedule.heights and schedule.heights[0] >= initial:
        raise NetlistError(f"schedule starts at {schedule.heights[0]} but matrix height is {initial}")
    if not schedule.heights and initial > 2:
        raise NetlistError(f"empty schedule for matrix height {initial}")
    cols = [list(c) for c in columns]
    n_fa = n_ha = 0
    for target in schedule.heights:
        nxt: list[list[int]] = [[] for _ in cols]
        carries: list[list[int]] = [[] for _ in range(len(cols) + 1)]
        for c, bits in enumerate(cols):
            h = len(bits) + len(carries[c])
            sums = []
            pos = 0
            while h > target:
                if h - target >= 2:
                    s, cy = full_adder(builder, bits[pos], bits[pos + 1], bits[pos + 2])
                    pos += 3
                    h -= 2
                    n_fa += 1
                else:
                    s, cy = half_adder(builder, bits[pos], bits[pos + 1])
                    pos += 2
                    h -= 1
                    n_ha += 1
                sums.append(s)
                carries[c + 1].append(cy)
            nxt[c] = bits[pos:] + sums + carries[c]
        if carries[len(cols)]:
            raise NetlistError("carry out of the top column")
        cols = nxt
        assert max(len(c) for c in cols) <= target
    return cols, n_fa, n_ha


def build_front_end(n: int, max_fanout: int | None = None) -> MultiplierFrontEnd:
    b = NetlistBuilder(f"dadda{n}x{n}")
    columns, b = gen_partial_products(n, b)
    cols, n_fa, n_ha = dadda_reduce(columns, dadda_heights(n), b)
    zero = b.const0()
    row_a = [c[0] if c else zero for c in cols]
    row_b = [c[1] if len(c) > 1 else zero for c in cols]
    b.add_outputs("row_a", row_a)
    b.add_outputs("row_b", row_b)
    nl = b.freeze()
    fe = MultiplierFrontEnd(n, nl, tuple(row_a), tuple(row_b), n_fa, n_ha)
    if max_fanout is not None:
        for net in fe.a + fe.b:
            fe = _buffer_front_end(fe, net, max_fanout)
    return fe


def _buffer_front_end(fe: MultiplierFrontEnd, net: int, max_fanout: int) -> MultiplierFrontEnd:
    nl, remap = _insert_buffer_tree(fe.netlist, net, max_fanout)
    return MultiplierFrontEnd(
        fe.n, nl, tuple(remap[x] for x in fe.row_a), tuple(remap[x] for x in fe.row_b), fe.full_adders, fe.half_adders
    )


def insert_buffer_tree(netlist: Netlist, net: int, max_fanout: int) -> Netlist:
    """Split the fanout of ``net`` over a balanced BUF tree.

    Sinks are gate fanin slots; output-port connections stay on ``net``.
    When the sink count is within bound the netlist is returned unchanged;
    otherwise the tree is grown level by level until a single root buffer,
    driven by ``net``, remains.
    """
    return _insert_buffer_tree(netlist, net, max_fanout)[0]


def _insert_buffer_tree(netlist: Netlist, net: int, max_fanout: int) -> tuple[Netlist, dict[int, int]]:
    if max_fanout < 2:
        raise ValueError(f"max_fanout must be >= 2, got {max_fanout}")
    if net not in netlist.nets:
        raise NetlistError(f"unknown net {net}")
    sinks = netlist.fanout()[net]
    if len(sinks) <= max_fanout:
        return netlist, {n: n for n in netlist.nets}

    b = NetlistBuilder(netlist.name)
    remap: dict[int, int] = {}
    slot_src: dict[tuple[int, int], int] = {}

    def grow():
        # layers[0] groups the sinks into leaf buffers, layers[k+1] groups the
        # buffers of layer k; the last layer is the single root.
        layers = []
        count = len(sinks)
        while True:
            groups = math.ceil(count / max_fanout)
            layers.append(_split(count, groups))
            count = groups
            if groups == 1:
                break
        drivers = [b.buf(remap[net])]
        for upper in reversed(layers[1:]):
            drivers = [b.buf(d) for d, k in zip(drivers, upper) for _ in range(k)]
        for sink, d in zip(sinks, _owners(layers[0])):
            slot_src[sink] = drivers[d]

    for i in netlist.inputs:
        remap[i] = b.add_input(netlist.nets[i])
    if net in remap:
        grow()
    for g in topo_order_gates(netlist):
        fan = [slot_src.get((g.id, s), remap[f]) for s, f in enumerate(g.fanin)]
        remap[g.out] = b.add_gate(g.kind, fan, netlist.nets[g.out])
        if g.out == net:
            grow()
    for o in netlist.outputs:
        b.add_output(remap[o])
    return b.freeze(), remap


def _split(total: int, groups: int) -> list[int]:
    base, extra = divmod(total, groups)
    return [base + (1 if k < extra else 0) for k in range(groups)]


def _owners(sizes: list[int]) -> list[int]:
    return [d for d, k in enumerate(sizes) for _ in range(k)]


def build_multiplier(n: int, cpa=None, max_fanout: int | None = None) -> Netlist:
    """Front-end plus a 2n-bit final adder; outputs ``p[0..2n-1]``.

    ``cpa`` is an AdderSpec, an AdderKind (at width 2n) or None for RCA.
    The adder's carry-in is the constant-0 net and its carry-out is dropped.
    """
    from .adders import AdderKind, AdderSpec, build_adder_into

    if cpa is None:
        cpa = AdderKind.RCA
    if not isinstance(cpa, AdderSpec):
        cpa = AdderSpec(AdderKind(cpa), 2 * n)
    if cpa.width != 2 * n:
        raise NetlistError(f"final adder width {cpa.width} != {2 * n}")
    fe = build_front_end(n, max_fanout)
    b = NetlistBuilder(f"mult{n}x{n}_{cpa.kind.value.lower()}")
    rows = b.instantiate(fe.netlist, b.add_inputs("a", n) + b.add_inputs("b", n))
    sums, _ = build_adder_into(b, cpa, rows[: 2 * n], rows[2 * n :], b.const0())
    b.add_outputs("p", sums)
    return b.freeze()
