"""Carry-propagate adder generators.

Every adder netlist has inputs ``a[0..w-1]``, ``b[0..w-1]``, ``cin`` and
outputs ``sum[0..w-1]`` followed by ``cout``.

Kinds:

* RCA   ripple of full adders.
* CLA   uniform lookahead blocks (default 4 bits), block carries ripple.
* CSLA  square-root carry-select: per block, an RCA for carry-in 0 and one
        for carry-in 1, selected by MUX2 on the incoming carry.
* CSA   the same dual-RCA carry-select structure with uniform blocks
        (default 4).  This is a two-operand CPA, not a 3:2 carry-save stage.
* BCSLA CSLA with the carry-in-1 RCA replaced by a binary-to-excess-1
        converter (BEC) on the carry-in-0 result.
* BCSA  uniform-block BCSLA (default block 4).
* BCLA  square-root blocks, each a CLA for carry-in 0 plus a BEC.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

from .netlist import Netlist, NetlistBuilder, full_adder, half_adder


class AdderKind(str, enum.Enum):
    RCA = "RCA"
    CSA = "CSA"
    CLA = "CLA"
    CSLA = "CSLA"
    BCSA = "BCSA"
    BCLA = "BCLA"
    BCSLA = "BCSLA"
    HYBRID = "HYBRID"


UNIFORM_KINDS = tuple(k for k in AdderKind if k is not AdderKind.HYBRID)
DEFAULT_BLOCK = 4
CLA_SUBBLOCK = 4


class AdderError(ValueError):
    pass


@dataclass(frozen=True)
class AdderSpec:
    kind: AdderKind
    width: int
    block: int | None = None
    # HYBRID only: per-region widths (LSB first) and kinds
    regions: tuple[tuple[int, AdderKind], ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", AdderKind(self.kind))
        if self.width < 1:
            raise AdderError(f"adder width must be >= 1, got {self.width}")
        if self.block is not None and self.block < 1:
            raise AdderError(f"block width must be >= 1, got {self.block}")
        if self.kind is AdderKind.HYBRID:
            if not self.regions:
                raise AdderError("HYBRID adder needs regions")
            if sum(w for w, _ in self.regions) != self.width:
                raise AdderError("HYBRID region widths must sum to the adder width")


class _Tie(enum.Enum):
    LOW = 0
    HIGH = 1


LOW = _Tie.LOW
HIGH = _Tie.HIGH


def sqrt_block_sizes(width: int) -> list[int]:
    """Block widths 2, 3, 4, ... from the LSB; the last block absorbs the remainder."""
    if width < 2:
        raise AdderError(f"square-root sizing needs width >= 2, got {width}")
    sizes = [2]
    while sum(sizes) + sizes[-1] + 1 <= width:
        sizes.append(sizes[-1] + 1)
    sizes[-1] += width - sum(sizes)
    return sizes


def uniform_block_sizes(width: int, block: int) -> list[int]:
    q = width // block
    if q == 0:
        return [width]
    sizes = [block] * q
    sizes[-1] += width - q * block
    return sizes


# --- structural pieces on a builder ---------------------------------------


def rca(b: NetlistBuilder, x: Sequence[int], y: Sequence[int], cin) -> tuple[list[int], int]:
    """Ripple chain; ``cin`` may be a net or LOW/HIGH (first cell simplified)."""
    sums = []
    c = cin
    for xi, yi in zip(x, y):
        if c is LOW:
            s, c = half_adder(b, xi, yi)
        elif c is HIGH:
            s, c = b.xnor2(xi, yi), b.or2(xi, yi)
        else:
            s, c = full_adder(b, xi, yi, c)
        sums.append(s)
    return sums, c


def _or_tree(b: NetlistBuilder, nets: Sequence[int]) -> int:
    if len(nets) == 1:
        return nets[0]
    mid = (len(nets) + 1) // 2
    return b.or2(_or_tree(b, nets[:mid]), _or_tree(b, nets[mid:]))


def cla_block(b: NetlistBuilder, x: Sequence[int], y: Sequence[int], cin) -> tuple[list[int], int]:
    """One flat lookahead block.

    c_j = OR_k (g_k AND p_{k+1..j-1})  OR  (p_{0..j-1} AND cin); the cin term
    joins the OR last so the carry-in path is one AND2 plus one OR2.
    Group-propagate products are shared across the block's carries.
    """
    if cin is HIGH:
        raise AdderError("cla_block does not take a tied-high carry")
    p = [b.xor2(xi, yi) for xi, yi in zip(x, y)]
    g = [b.and2(xi, yi) for xi, yi in zip(x, y)]
    prods: dict[tuple[int, int], int] = {}

    def prop(lo, hi):  # AND of p[lo..hi], inclusive
        if (lo, hi) not in prods:
            if lo == hi:
                prods[lo, hi] = p[lo]
            else:
                mid = (lo + hi + 1) // 2
                prods[lo, hi] = b.and2(prop(lo, mid - 1), prop(mid, hi))
        return prods[lo, hi]

    carries = [cin]
    for j in range(1, len(p) + 1):
        terms = [g[k] if k == j - 1 else b.and2(g[k], prop(k + 1, j - 1)) for k in range(j)]
        c = _or_tree(b, terms)
        if cin is not LOW:
            c = b.or2(c, b.and2(prop(0, j - 1), cin))
        carries.append(c)
    sums = [p[i] if carries[i] is LOW else b.xor2(p[i], carries[i]) for i in range(len(p))]
    return sums, carries[-1]


def cla(b: NetlistBuilder, x: Sequence[int], y: Sequence[int], cin, block: int = CLA_SUBBLOCK) -> tuple[list[int], int]:
    sums: list[int] = []
    c = cin
    lo = 0
    for size in uniform_block_sizes(len(x), block):
        s, c = cla_block(b, x[lo : lo + size], y[lo : lo + size], c)
        sums += s
        lo += size
    return sums, c


def bec(b: NetlistBuilder, bits: Sequence[int], overflow: bool = False) -> tuple[list[int], int | None]:
    """Binary-to-excess-1: out = in + 1 via an AND chain; optional overflow = AND(all)."""
    outs = [b.inv(bits[0])]
    chain = bits[0]
    for i in range(1, len(bits)):
        if i > 1:
            chain = b.and2(chain, bits[i - 1])
        outs.append(b.xor2(bits[i], chain))
    ovf = None
    if overflow:
        ovf = bits[0] if len(bits) == 1 else b.and2(chain, bits[-1])
    return outs, ovf


def _select_blocks(b, x, y, cin, sizes, lower, upper) -> tuple[list[int], int]:
    sums: list[int] = []
    carry = cin
    lo = 0
    for size in sizes:
        xs, ys = x[lo : lo + size], y[lo : lo + size]
        s0, c0 = lower(b, xs, ys)
        s1, c1 = upper(b, xs, ys, s0, c0)
        sums += [b.mux2(carry, z, o) for z, o in zip(s0, s1)]
        carry = b.mux2(carry, c0, c1)
        lo += size
    return sums, carry


def _rca0(b, xs, ys):
    return rca(b, xs, ys, LOW)


def _cla0(b, xs, ys):
    return cla(b, xs, ys, LOW)


def _rca1(b, xs, ys, s0, c0):
    return rca(b, xs, ys, HIGH)


def _bec1(b, xs, ys, s0, c0):
    out, _ = bec(b, s0 + [c0])
    return out[:-1], out[-1]


def build_adder_into(b: NetlistBuilder, spec: AdderSpec, x: Sequence[int], y: Sequence[int], cin) -> tuple[list[int], int]:
    """Emit the adder described by ``spec`` into an existing builder."""
    kind = spec.kind
    w = spec.width
    if len(x) != w or len(y) != w:
        raise AdderError(f"operand width mismatch: spec {w}, got {len(x)}/{len(y)}")
    block = spec.block or DEFAULT_BLOCK
    if kind is AdderKind.RCA:
        return rca(b, x, y, cin)
    if kind is AdderKind.CLA:
        return cla(b, x, y, cin, block)
    if kind is AdderKind.HYBRID:
        return _hybrid_into(b, spec.regions, x, y, cin)
    if kind in (AdderKind.CSA, AdderKind.BCSA):
        sizes = uniform_block_sizes(w, block)
    else:
        sizes = sqrt_block_sizes(w)
    lower, upper = {
        AdderKind.CSA: (_rca0, _rca1),
        AdderKind.CSLA: (_rca0, _rca1),
        AdderKind.BCSA: (_rca0, _bec1),
        AdderKind.BCSLA: (_rca0, _bec1),
        AdderKind.BCLA: (_cla0, _bec1),
    }[kind]
    return _select_blocks(b, x, y, cin, sizes, lower, upper)


def _adder_shell(name: str, width: int):
    b = NetlistBuilder(name)
    x = b.add_inputs("a", width)
    y = b.add_inputs("b", width)
    cin = b.add_input("cin")
    return b, x, y, cin


def _finish(b: NetlistBuilder, sums, cout) -> Netlist:
    b.add_outputs("sum", sums)
    b.add_output(cout, "cout")
    return b.freeze()


def gen_adder(spec: AdderSpec) -> Netlist:
    name = f"{spec.kind.value.lower()}{spec.width}"
    b, x, y, cin = _adder_shell(name, spec.width)
    return _finish(b, *build_adder_into(b, spec, x, y, cin))


def gen_bec(width: int) -> Netlist:
    if width < 1:
        raise AdderError("BEC width must be >= 1")
    b = NetlistBuilder(f"bec{width}")
    bits = b.add_inputs("in", width)
    outs, ovf = bec(b, bits, overflow=True)
    b.add_outputs("out", outs)
    b.add_output(ovf, "overflow")
    return b.freeze()


# --- hybrid ----------------------------------------------------------------


def merge_regions(widths: Sequence[int], kinds: Sequence[AdderKind | str]) -> list[tuple[int, AdderKind]]:
    """Pair non-empty regions with kinds, folding width-1 regions into a neighbour.

    A width-1 region joins its left neighbour (the right one when it is the
    lowest region) and takes that neighbour's kind.  ``kinds`` lists one entry
    per non-empty region, or one per region left after merging.
    """
    sizes = [w for w in widths if w > 0]
    if not sizes:
        raise AdderError("empty partition")
    kinds = [AdderKind(k) for k in kinds]
    if any(k is AdderKind.HYBRID for k in kinds):
        raise AdderError("HYBRID cannot be nested")
    # groups[i] = indices of the original regions forming merged region i
    groups = [[i] for i in range(len(sizes))]
    i = 0
    while len(groups) > 1 and i < len(groups):
        if sum(sizes[k] for k in groups[i]) == 1:
            if i > 0:
                groups[i - 1] += groups.pop(i)
            else:
                first = groups.pop(0)
                groups[0] = first + groups[0]
            continue
        i += 1
    if len(kinds) == len(sizes):
        # keep the kind of the region that absorbed the width-1 one
        picked = [kinds[max(g, key=lambda k: sizes[k])] for g in groups]
    elif len(kinds) == len(groups):
        picked = kinds
    else:
        raise AdderError(f"{len(kinds)} kinds for {len(sizes)} regions")
    return [(sum(sizes[k] for k in g), kind) for g, kind in zip(groups, picked)]


def _hybrid_into(b, regions, x, y, cin):
    sums: list[int] = []
    carry = cin
    lo = 0
    for width, kind in regions:
        sub = gen_adder(AdderSpec(kind, width))
        outs = b.instantiate(sub, list(x[lo : lo + width]) + list(y[lo : lo + width]) + [carry])
        sums += outs[:-1]
        carry = outs[-1]
        lo += width
    return sums, carry


def hybrid_spec(widths: Sequence[int], kinds: Sequence[AdderKind | str]) -> AdderSpec:
    regions = tuple(merge_regions(widths, kinds))
    return AdderSpec(AdderKind.HYBRID, sum(w for w, _ in regions), regions=regions)


def compose_hybrid(partition, kinds: Sequence[AdderKind | str]) -> Netlist:
    """Stitch one sub-adder per region; each region's cout is the next one's cin.

    ``partition`` is a RegionPartition (anything with ``widths``) or a plain
    sequence of region widths, LSB region first.
    """
    widths = list(getattr(partition, "widths", partition))
    spec = hybrid_spec(widths, kinds)
    b, x, y, cin = _adder_shell("hybrid_" + "_".join(f"{k.value.lower()}{w}" for w, k in spec.regions), spec.width)
    return _finish(b, *build_adder_into(b, spec, x, y, cin))
