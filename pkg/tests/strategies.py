"""Hypothesis strategies for signals on small groups."""

from fractions import Fraction

import numpy as np
from hypothesis import strategies as st

from gammariesz.group import finite_dihedral, infinite_dihedral
from gammariesz.signal import GammaSignal

DINF = infinite_dihedral()
Z4 = finite_dihedral(4)
Z6 = finite_dihedral(6)

small_fractions = st.fractions(min_value=-4, max_value=4, max_denominator=8).filter(lambda x: x != 0)


@st.composite
def dinf_signals(draw, radius=4, max_terms=5):
    """Exact (rational) finitely supported signals on D_inf."""
    phases = []
    for _ in range(2):
        keys = draw(st.lists(st.integers(-radius, radius), max_size=max_terms, unique=True))
        phases.append({k: draw(small_fractions) for k in keys})
    return GammaSignal(DINF, phases)


def finite_signals(group):
    shape = (group.kappa,) + group.N.shape
    size = int(np.prod(shape))
    floats = st.floats(-3, 3, allow_nan=False, allow_infinity=False)
    return st.lists(st.tuples(floats, floats), min_size=size, max_size=size).map(
        lambda vals: GammaSignal(group, np.array([complex(a, b) for a, b in vals]).reshape(shape))
    )


def dinf_elements(radius=6):
    return st.tuples(st.integers(-radius, radius), st.integers(0, 1)).map(lambda t: ((t[0],), t[1]))


def finite_elements(group):
    return st.sampled_from(group.elements())
