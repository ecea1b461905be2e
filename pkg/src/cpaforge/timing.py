"""Static timing over netlists: longest-path arrival times under a per-gate delay table."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping, NamedTuple

from .config import read_table
from .multiplier import MultiplierFrontEnd
from .netlist import GateKind, Netlist, NetlistBuilder, full_adder, topo_order_gates

DEFAULT_DELAYS = {
    GateKind.INV: 1.0,
    GateKind.BUF: 1.0,
    GateKind.NAND2: 1.0,
    GateKind.NOR2: 1.0,
    GateKind.AND2: 2.0,
    GateKind.OR2: 2.0,
    GateKind.XOR2: 2.0,
    GateKind.XNOR2: 2.0,
    GateKind.MUX2: 2.0,
}


class TimingError(ValueError):
    pass


@dataclass(frozen=True)
class DelayModel:
    delays: Mapping[GateKind, float] = field(default_factory=lambda: dict(DEFAULT_DELAYS))

    def __post_init__(self):
        table = {GateKind(k): float(v) for k, v in self.delays.items()}
        missing = [k.value for k in GateKind if k not in table]
        if missing:
            raise TimingError(f"delay model missing {missing}")
        bad = [k.value for k, v in table.items() if not v >= 0 or math.isinf(v)]
        if bad:
            raise TimingError(f"delays must be finite and >= 0: {bad}")
        object.__setattr__(self, "delays", table)

    def __getitem__(self, kind: GateKind) -> float:
        return self.delays[kind]

    def replace(self, **changes: float) -> "DelayModel":
        table = dict(self.delays)
        for k, v in changes.items():
            table[GateKind(k)] = v
        return DelayModel(table)

    @cached_property
    def fa_carry_delay(self) -> float:
        """Carry-in to carry-out delay of the library full adder."""
        return _fa_path(self, "cin", "cout")

    @cached_property
    def fa_sum_delay(self) -> float:
        """Worst input-to-sum delay of the library full adder."""
        return max(_fa_path(self, src, "sum") for src in ("a", "b", "cin"))

    @property
    def flat_tolerance(self) -> float:
        return self.fa_carry_delay / 2


def load_model(path) -> DelayModel:
    """Read a ``KIND = delay`` table (TOML; an optional ``[delays]`` table is accepted).

    Kinds left out keep their default delay.
    """
    table = read_table(path, "delays")
    delays = dict(DEFAULT_DELAYS)
    for k, v in table.items():
        try:
            delays[GateKind(k.upper())] = float(v)
        except ValueError as exc:
            raise TimingError(f"{path}: bad entry {k} = {v!r}") from exc
    return DelayModel(delays)


_FA = None


def _fa_netlist() -> Netlist:
    global _FA
    if _FA is None:
        b = NetlistBuilder("fa")
        a, bb, c = b.add_input("a"), b.add_input("b"), b.add_input("cin")
        s, co = full_adder(b, a, bb, c)
        b.add_output(s, "sum")
        b.add_output(co, "cout")
        _FA = b.freeze()
    return _FA


def _fa_path(model: DelayModel, src: str, dst: str) -> float:
    fa = _fa_netlist()
    arr = {i: (0.0 if fa.nets[i] == src else -math.inf) for i in fa.inputs}
    times = sta_arrival(fa, arr, model)
    out = fa.outputs[0] if dst == "sum" else fa.outputs[1]
    return times[out]


def sta_arrival(netlist: Netlist, input_arrivals: Mapping[int, float], model: DelayModel | None = None) -> list[float]:
    """Latest arrival at every net (list indexed by net id).

    arrival(out) = delay(kind) + max(fanin arrivals).  The constant-0 net
    defaults to time 0; every other input must be given.  ``-inf`` marks an
    input that is not launching (useful for point-to-point path delays).
    """
    model = model or DelayModel()
    times = [0.0] * netlist.num_nets
    c0 = netlist.const0
    for i in netlist.inputs:
        if i in input_arrivals:
            times[i] = input_arrivals[i]
        elif i != c0:
            raise TimingError(f"no arrival time for input net {i} ({netlist.nets.get(i)})")
    d = model.delays
    for g in topo_order_gates(netlist):
        times[g.out] = d[g.kind] + max(times[f] for f in g.fanin)
    return times


@dataclass(frozen=True)
class ArrivalProfile:
    n: int
    arrivals: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "arrivals", tuple(float(x) for x in self.arrivals))
        if len(self.arrivals) != 2 * self.n:
            raise TimingError(f"profile for n={self.n} needs {2 * self.n} entries, got {len(self.arrivals)}")

    def __len__(self) -> int:
        return len(self.arrivals)

    def __getitem__(self, i):
        return self.arrivals[i]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["bit", "arrival"])
        for i, t in enumerate(self.arrivals):
            w.writerow([i, _fmt(t)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "ArrivalProfile":
        rows = list(csv.DictReader(io.StringIO(text)))
        try:
            pairs = sorted((int(r["bit"]), float(r["arrival"])) for r in rows)
        except (KeyError, ValueError) as exc:
            raise TimingError(f"malformed profile CSV: {exc}") from exc
        if [p[0] for p in pairs] != list(range(len(pairs))) or len(pairs) % 2:
            raise TimingError("profile CSV must list bits 0..2n-1")
        return cls(len(pairs) // 2, tuple(p[1] for p in pairs))


def _fmt(t: float) -> str:
    return str(int(t)) if float(t).is_integer() else repr(t)


def cpa_input_profile(frontend: MultiplierFrontEnd, model: DelayModel | None = None, input_arrival: float = 0.0) -> ArrivalProfile:
    """Worst arrival per CPA column, max over the two operand rows."""
    nl = frontend.netlist
    times = sta_arrival(nl, {i: input_arrival for i in nl.primary_inputs}, model)
    arr = tuple(max(times[a], times[b]) for a, b in zip(frontend.row_a, frontend.row_b))
    return ArrivalProfile(frontend.n, arr)


class Completion(NamedTuple):
    time: float
    sums: tuple[float, ...]
    cout: float


def completion_time(adder: Netlist, profile, model: DelayModel | None = None, cin_arrival: float = 0.0) -> Completion:
    """Latest output arrival of ``adder`` when bit i of both operands arrives at profile[i]."""
    arrivals = list(profile.arrivals if isinstance(profile, ArrivalProfile) else profile)
    a, b = adder.find_inputs("a"), adder.find_inputs("b")
    cin = adder.find_input("cin")
    if not arrivals:
        raise TimingError("empty arrival profile")
    if len(a) != len(arrivals) or len(b) != len(arrivals) or cin is None:
        raise TimingError(f"adder {adder.name} width {len(a)} does not match profile length {len(arrivals)}")
    inputs = {cin: cin_arrival}
    for i, t in enumerate(arrivals):
        inputs[a[i]] = t
        inputs[b[i]] = t
    times = sta_arrival(adder, inputs, model)
    outs = [times[o] for o in adder.outputs]
    return Completion(max(outs), tuple(outs[:-1]), outs[-1])


class Sufficiency(NamedTuple):
    sufficient: bool
    margin: float


def rca_sufficiency(profile, region: tuple[int, int], model: DelayModel | float | None = None) -> Sufficiency:
    """Does the arrival slope across ``region`` (inclusive bit range) outpace the ripple carry?

    True iff every step between neighbouring arrivals is at least the full
    adder carry delay; the margin is the smallest step minus that delay
    (``inf`` for a single-bit region).
    """
    arrivals = profile.arrivals if isinstance(profile, ArrivalProfile) else tuple(profile)
    lo, hi = region
    if hi < lo:
        raise TimingError(f"empty region {region}")
    if lo < 0 or hi >= len(arrivals):
        raise TimingError(f"region {region} outside profile of length {len(arrivals)}")
    if isinstance(model, (int, float)):
        threshold = float(model)
    else:
        threshold = (model or DelayModel()).fa_carry_delay
    steps = [arrivals[i + 1] - arrivals[i] for i in range(lo, hi)]
    if not steps:
        return Sufficiency(True, math.inf)
    margin = min(steps) - threshold
    return Sufficiency(margin >= 0, margin)
