"""Shared generators for the test modules."""

import numpy as np

from graphon_spectra import StepGraphon


def random_graphon(rng, k, signed=False, uniform=False):
    a = rng.random((k, k))
    if signed:
        a = 2 * a - 1
    vals = np.triu(a) + np.triu(a, 1).T
    if uniform:
        m = np.full(k, 1.0 / k)
    else:
        m = rng.random(k) + 0.1
        m /= m.sum()
        m[-1] = 1.0 - m[:-1].sum()
    return StepGraphon(vals, m, signed=signed)
