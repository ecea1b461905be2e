"""Functional checks of generated netlists against integer arithmetic."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .netlist import Netlist, bits_to_ints, pack_planes, simulate, unpack_planes

MAX_EXHAUSTIVE_BITS = 22


class PortError(ValueError):
    pass


@dataclass(frozen=True)
class VerifyResult:
    passed: bool
    cases: int
    counterexample: dict | None = None

    def __bool__(self) -> bool:
        return self.passed


def _adder_ports(nl: Netlist):
    a, b, cin = nl.find_inputs("a"), nl.find_inputs("b"), nl.find_input("cin")
    w = len(a)
    if not w or len(b) != w or cin is None or len(nl.outputs) != w + 1 or len(nl.primary_inputs) != 2 * w + 1:
        raise PortError(f"{nl.name}: not an adder (want a[w], b[w], cin -> sum[w], cout)")
    return a, b, cin, w


def _mult_ports(nl: Netlist):
    a, b = nl.find_inputs("a"), nl.find_inputs("b")
    n = len(a)
    if not n or len(b) != n or len(nl.primary_inputs) != 2 * n or len(nl.outputs) not in (2 * n, 4 * n):
        raise PortError(f"{nl.name}: not a multiplier (want a[n], b[n] -> p[2n] or two 2n-bit rows)")
    return a, b, n


def _corner_words(w: int) -> list[int]:
    ones = (1 << w) - 1
    alt = int("01" * w, 2) & ones
    return [0, ones, alt, ones ^ alt, 1, 1 << (w - 1)]


def _run(nl: Netlist, inputs: list[int], bits: np.ndarray) -> list[int]:
    count = bits.shape[0]
    values = simulate(nl, dict(zip(inputs, pack_planes(bits))), count)
    return bits_to_ints(unpack_planes([values[o] for o in nl.outputs], count))


def _first_failure(operands: list[tuple[int, ...]], got: list[int], want: list[int], names) -> dict | None:
    bad = [i for i in range(len(want)) if got[i] != want[i]]
    if not bad:
        return None
    i = min(bad, key=lambda k: operands[k])
    ce = dict(zip(names, operands[i]))
    ce.update(expected=want[i], got=got[i])
    return ce


def check_adder(nl: Netlist, exhaustive: bool = False, vectors: int = 100_000, seed: int = 0, corners: bool = True) -> VerifyResult:
    a, b, cin, w = _adder_ports(nl)
    nbits = 2 * w + 1
    if exhaustive:
        if nbits > MAX_EXHAUSTIVE_BITS:
            raise ValueError(f"exhaustive check of a {w}-bit adder needs 2**{nbits} cases")
        idx = np.arange(1 << nbits, dtype=np.int64)
        bits = ((idx[:, None] >> np.arange(nbits)) & 1).astype(np.uint8)
    else:
        rng = np.random.default_rng(seed)
        bits = rng.integers(0, 2, size=(vectors, nbits), dtype=np.uint8)
        if corners:
            cw = _corner_words(w)
            rows = [(x | (y << w) | (c << 2 * w)) for x in cw for y in cw for c in (0, 1)]
            bits = np.concatenate([_int_rows(rows, nbits), bits])
    xs = bits_to_ints(bits[:, :w])
    ys = bits_to_ints(bits[:, w : 2 * w])
    cs = bits[:, 2 * w].tolist()
    want = [x + y + c for x, y, c in zip(xs, ys, cs)]
    got = _run(nl, a + b + [cin], bits)
    ce = _first_failure(list(zip(xs, ys, cs)), got, want, ("a", "b", "cin"))
    return VerifyResult(ce is None, len(want), ce)


def check_multiplier(nl: Netlist, exhaustive: bool = False, vectors: int = 100_000, seed: int = 0, corners: bool = True) -> VerifyResult:
    """Product check; a 4n-output netlist is read as two 2n-bit rows to be summed."""
    a, b, n = _mult_ports(nl)
    nbits = 2 * n
    if exhaustive:
        if nbits > MAX_EXHAUSTIVE_BITS:
            raise ValueError(f"exhaustive check of a {n}x{n} multiplier needs 2**{nbits} cases")
        idx = np.arange(1 << nbits, dtype=np.int64)
        bits = ((idx[:, None] >> np.arange(nbits)) & 1).astype(np.uint8)
    else:
        rng = np.random.default_rng(seed)
        bits = rng.integers(0, 2, size=(vectors, nbits), dtype=np.uint8)
        if corners:
            cw = _corner_words(n)
            bits = np.concatenate([_int_rows([x | (y << n) for x in cw for y in cw], nbits), bits])
    xs = bits_to_ints(bits[:, :n])
    ys = bits_to_ints(bits[:, n:])
    want = [x * y for x, y in zip(xs, ys)]
    out = _run(nl, a + b, bits)
    if len(nl.outputs) == 4 * n:
        # rows are packed together: low 2n bits row_a, high 2n bits row_b
        mask = (1 << nbits) - 1
        out = [(v & mask) + (v >> nbits) for v in out]
    ce = _first_failure(list(zip(xs, ys)), out, want, ("a", "b"))
    return VerifyResult(ce is None, len(want), ce)


def _int_rows(values: list[int], nbits: int) -> np.ndarray:
    arr = np.array([[(v >> k) & 1 for k in range(nbits)] for v in values], dtype=np.uint8)
    return arr.reshape(len(values), nbits)


def verify(nl: Netlist, oracle: str, exhaustive: bool = False, vectors: int = 100_000, seed: int = 0) -> VerifyResult:
    if oracle == "add":
        return check_adder(nl, exhaustive, vectors, seed)
    if oracle == "mult":
        return check_multiplier(nl, exhaustive, vectors, seed)
    raise ValueError(f"unknown oracle {oracle!r} (want 'add' or 'mult')")
