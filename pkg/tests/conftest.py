import random

import pytest
from hypothesis import strategies as st

from cpaforge.netlist import GateKind, NetlistBuilder

KINDS = list(GateKind)


@st.composite
def random_netlists(draw, max_inputs=6, max_gates=40):
    n_in = draw(st.integers(1, max_inputs))
    n_gates = draw(st.integers(1, max_gates))
    b = NetlistBuilder("rand")
    nets = [b.add_input(f"i[{k}]") for k in range(n_in)]
    for _ in range(n_gates):
        kind = draw(st.sampled_from(KINDS))
        fan = [draw(st.sampled_from(nets)) for _ in range(kind.arity)]
        nets.append(b.add_gate(kind, fan))
    outs = draw(st.lists(st.sampled_from(nets[n_in:]), min_size=1, max_size=4))
    for o in outs:
        b.add_output(o)
    return b.freeze()


@pytest.fixture
def rng():
    return random.Random(1234)
