import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cpaforge import netlist as nlio
from cpaforge.adders import (
    UNIFORM_KINDS,
    AdderError,
    AdderKind,
    AdderSpec,
    compose_hybrid,
    gen_adder,
    gen_bec,
    merge_regions,
    sqrt_block_sizes,
    uniform_block_sizes,
)
from cpaforge.costmodel import area
from cpaforge.netlist import GateKind, count_cells, evaluate, pack_planes, simulate
from cpaforge.verify import check_adder


@pytest.mark.parametrize("width,sizes", [(16, [2, 3, 4, 7]), (6, [2, 4]), (2, [2]), (3, [3]), (14, [2, 3, 4, 5])])
def test_sqrt_block_sizes(width, sizes):
    assert sqrt_block_sizes(width) == sizes
    assert sum(sizes) == width


def test_sqrt_block_sizes_rejects_one():
    with pytest.raises(AdderError):
        sqrt_block_sizes(1)


@given(st.integers(2, 300))
def test_sqrt_blocks_ascending(width):
    sizes = sqrt_block_sizes(width)
    assert sum(sizes) == width
    assert sizes[: len(sizes) - 1] == list(range(2, 1 + len(sizes)))
    assert sizes[-1] >= len(sizes) + 1 or len(sizes) == 1


def test_uniform_blocks_fold_remainder():
    assert uniform_block_sizes(10, 4) == [4, 6]
    assert uniform_block_sizes(3, 4) == [3]


def _bec_io(nl, value):
    ins = nl.find_inputs("in")
    vals = evaluate(nl, {n: bool((value >> i) & 1) for i, n in enumerate(ins)})
    out = sum(vals[o] << i for i, o in enumerate(nl.outputs[:-1]))
    return out, vals[nl.outputs[-1]]


def test_bec_examples():
    nl = gen_bec(4)
    assert _bec_io(nl, 0b1011) == (0b1100, False)
    assert _bec_io(nl, 0b1111) == (0b0000, True)


@pytest.mark.parametrize("width", range(1, 11))
def test_bec_exhaustive(width):
    nl = gen_bec(width)
    count = 1 << width
    idx = np.arange(count)
    bits = ((idx[:, None] >> np.arange(width)) & 1).astype(np.uint8)
    vals = simulate(nl, dict(zip(nl.find_inputs("in"), pack_planes(bits))), count)
    got = nlio.bits_to_ints(nlio.unpack_planes([vals[o] for o in nl.outputs], count))
    # low width bits: (x + 1) mod 2^w; top bit: overflow = all ones
    assert got == [((x + 1) % count) | ((x == count - 1) << width) for x in range(count)]


def test_bec_structure():
    assert count_cells(gen_bec(4)) == {GateKind.INV: 1, GateKind.XOR2: 3, GateKind.AND2: 3}
    with pytest.raises(AdderError):
        gen_bec(0)


def test_rca4_example():
    nl = gen_adder(AdderSpec(AdderKind.RCA, 4))
    a, b, cin = nl.find_inputs("a"), nl.find_inputs("b"), nl.find_input("cin")
    stim = {cin: True}
    stim.update({n: bool((0b1010 >> i) & 1) for i, n in enumerate(a)})
    stim.update({n: bool((0b0101 >> i) & 1) for i, n in enumerate(b)})
    vals = evaluate(nl, stim)
    s = sum(vals[o] << i for i, o in enumerate(nl.outputs[:4]))
    assert s == 0 and vals[nl.outputs[4]]


def test_rca4_cells():
    assert count_cells(gen_adder(AdderSpec("RCA", 4))) == {GateKind.XOR2: 8, GateKind.AND2: 8, GateKind.OR2: 4}


@pytest.mark.parametrize("kind", UNIFORM_KINDS)
def test_every_kind_exhaustive_width8(kind):
    res = check_adder(gen_adder(AdderSpec(kind, 8)), exhaustive=True)
    assert res and res.cases == 2 * 256 * 256


@pytest.mark.parametrize("kind", UNIFORM_KINDS)
@pytest.mark.parametrize("width", [1, 2, 3, 5, 13])
def test_odd_widths(kind, width):
    if width == 1 and kind in (AdderKind.CSLA, AdderKind.BCSLA, AdderKind.BCLA):
        with pytest.raises(AdderError):
            gen_adder(AdderSpec(kind, width))
        return
    assert check_adder(gen_adder(AdderSpec(kind, width)), exhaustive=width <= 5, vectors=5000)


@pytest.mark.parametrize("kind", [AdderKind.CSA, AdderKind.CLA, AdderKind.BCSA])
@pytest.mark.parametrize("block", [1, 2, 3, 6])
def test_block_parameter(kind, block):
    assert check_adder(gen_adder(AdderSpec(kind, 12, block)), vectors=5000)


def test_bcsla_smaller_than_csla():
    assert len(gen_adder(AdderSpec("BCSLA", 16)).gates) < len(gen_adder(AdderSpec("CSLA", 16)).gates)


def test_spec_validation():
    with pytest.raises(AdderError):
        AdderSpec("RCA", 0)
    with pytest.raises(AdderError):
        AdderSpec("HYBRID", 8)
    with pytest.raises(AdderError):
        AdderSpec("HYBRID", 8, regions=((4, AdderKind.RCA),))
    with pytest.raises(ValueError):
        AdderSpec("KOGGE", 8)


def test_deterministic_json():
    for kind in UNIFORM_KINDS:
        spec = AdderSpec(kind, 16)
        assert nlio.dumps(gen_adder(spec)) == nlio.dumps(gen_adder(spec))


def test_hybrid_closed_form_partition_32():
    nl = compose_hybrid((8, 20, 4), ["RCA", "BCSLA", "BCLA"])
    res = check_adder(nl, vectors=100_000, seed=11)
    assert res and res.cases >= 100_000


def test_hybrid_two_region():
    nl = compose_hybrid((4, 12, 0), [AdderKind.RCA, AdderKind.BCLA])
    assert check_adder(nl, exhaustive=False, vectors=20_000)
    assert nl.name == "hybrid_rca4_bcla12"


def test_hybrid_single_region_identity():
    a = compose_hybrid((16,), ["RCA"])
    assert count_cells(a) == count_cells(gen_adder(AdderSpec("RCA", 16)))


def test_merge_regions():
    assert merge_regions((6, 9, 1), ["RCA", "BCSLA", "BCLA"]) == [(6, AdderKind.RCA), (10, AdderKind.BCSLA)]
    assert merge_regions((6, 9, 1), ["RCA", "BCLA"]) == [(6, AdderKind.RCA), (10, AdderKind.BCLA)]
    assert merge_regions((1, 9, 6), ["RCA", "BCSLA", "BCLA"]) == [(10, AdderKind.BCSLA), (6, AdderKind.BCLA)]
    with pytest.raises(AdderError):
        merge_regions((0, 0, 0), [])
    with pytest.raises(AdderError):
        merge_regions((4, 4, 4), ["RCA"])


def test_hybrid_width1_region_merged():
    nl = compose_hybrid((6, 9, 1), ["RCA", "BCSLA", "BCLA"])
    assert check_adder(nl, vectors=5000)


@pytest.mark.parametrize("w", [16, 32, 64, 128])
def test_bec_substitution_saves_area(w):
    assert area(gen_adder(AdderSpec("BCSLA", w))) < area(gen_adder(AdderSpec("CSLA", w)))
