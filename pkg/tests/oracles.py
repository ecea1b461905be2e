"""Reference computations that share no code path with the package's own algorithms."""

import math

from cpaforge.netlist import Netlist


def enumerate_paths(netlist: Netlist, net: int):
    """Every input-to-``net`` path, as (input net, [gate kinds along the path])."""
    g = netlist.driver(net)
    if g is None:
        yield net, []
        return
    for f in g.fanin:
        for src, kinds in enumerate_paths(netlist, f):
            yield src, kinds + [g.kind]


def longest_path(netlist: Netlist, net: int, delays, input_arrivals) -> float:
    best = -math.inf
    for src, kinds in enumerate_paths(netlist, net):
        t = input_arrivals.get(src, 0.0) + sum(delays[k] for k in kinds)
        best = max(best, t)
    return best


def dadda_counts_closed_form(n: int) -> tuple[int, int]:
    """Known Dadda totals for an n x n array: n^2 - 4n + 3 full adders, n - 1 half adders."""
    return n * n - 4 * n + 3, n - 1


def minimal_balanced_buffers(sinks: int, fanout: int) -> int:
    """Buffers in a single-rooted tree where each level groups ceil(k / fanout)."""
    if sinks <= fanout:
        return 0
    total = 0
    k = sinks
    while True:
        k = -(-k // fanout)
        total += k
        if k == 1:
            return total
