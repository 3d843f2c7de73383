"""Shared independent oracles for the test suite.

These deliberately avoid the package's own computation paths: the detail
coefficient oracle is a literal double loop, and the regression oracle
solves the 2x2 weighted normal equations in closed form.
"""

import numpy as np
import pytest


def naive_details(a, j):
    """Literal double-loop Haar detail coefficients at span j."""
    a = np.asarray(a, dtype=float)
    m = len(a)
    nj = m - 2 * j + 1
    out = np.empty(nj)
    for i in range(nj):
        acc = 0.0
        for l in range(j):
            acc += a[l + i] - a[l + i + j]
        out[i] = acc / np.sqrt(2 * j)
    return out


def wls_closed_form(scales, y, weight_exponent):
    """Weighted regression of y on (1, log2(2j)) by hand-rolled QR.

    Modified Gram-Schmidt on the weighted design in extended precision;
    uses nothing from numpy.linalg, so it is an independent route to the
    same least-squares solution.
    """
    j = np.asarray(scales, np.longdouble)
    y = np.asarray(y, np.longdouble)
    w_sqrt = j ** (np.longdouble(-weight_exponent) / 2)
    x = np.log2(2.0 * j)
    u1, u2, z = w_sqrt, w_sqrt * x, w_sqrt * y
    r11 = np.sqrt(u1 @ u1)
    q1 = u1 / r11
    r12 = q1 @ u2
    e2 = u2 - r12 * q1
    r22 = np.sqrt(e2 @ e2)
    q2 = e2 / r22
    slope = (q2 @ z) / r22
    intercept = ((q1 @ z) - r12 * slope) / r11
    return float(intercept), float(slope)


@pytest.fixture
def rng():
    return np.random.default_rng(20260808)
