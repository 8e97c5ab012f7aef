"""Hypothesis strategies shared by the test modules."""

import numpy as np
from hypothesis import strategies as st

from hodge_dgg import build_complex
from hodge_dgg.generators import random_flag


@st.composite
def weighted_complexes(draw, max_n=8, reduced=None):
    """Random weighted flag complexes; the reduced flag is drawn unless fixed."""
    n = draw(st.integers(2, max_n))
    p = draw(st.sampled_from([0.3, 0.5, 0.7, 0.9]))
    seed = draw(st.integers(0, 2**31 - 1))
    red = draw(st.booleans()) if reduced is None else reduced
    policy = draw(st.sampled_from(["explicit", "normalized", "unit"]))
    if policy == "explicit":
        return random_flag(n, p, seed, reduced=red, max_dim=3)
    K = random_flag(n, p, seed, policy="unit", reduced=red, max_dim=3)
    if policy == "unit":
        return K
    rng = np.random.default_rng(seed)
    facets = [(F, float(np.exp(rng.uniform(np.log(0.1), np.log(10))))) for F in K.facets()]
    return build_complex(facets, policy="normalized", reduced=red)

