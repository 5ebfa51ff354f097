"""Smooth compactly supported profiles shared across the toolkit.

Everything is built from the classic ``exp(-1/x)`` switch, so all profiles
are C-infinity with exactly the advertised supports.  The dyadic partition,
the Fourier cutoff and the time mollifier all draw from here, which keeps
the run metadata honest: a single profile identifier describes them all.
"""

import numpy as np

PROFILE_ID = "exp-bump"


def _switch(x):
    # exp(-1/x) on x > 0, zero elsewhere; the where-guard avoids overflow.
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = np.exp(-1.0 / x[pos])
    return out


def smooth_step(x):
    """C-infinity monotone step: 0 for x <= 0, 1 for x >= 1."""
    x = np.asarray(x, dtype=float)
    a = _switch(x)
    return a / (a + _switch(1.0 - x))


def cutoff_chi(r):
    """Smooth cutoff profile: 1 on [0, 1], 0 on [2, inf), monotone between."""
    return smooth_step(2.0 - np.asarray(r, dtype=float))


def annulus_rho(r):
    """Annulus profile chi(r/2) - chi(r); supported on 1 < r < 4."""
    r = np.asarray(r, dtype=float)
    return cutoff_chi(0.5 * r) - cutoff_chi(r)


def bump(x):
    """Unnormalized even bump exp(-1/(1-x^2)) on (-1, 1), zero outside."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    inside = np.abs(x) < 1.0
    xi = x[inside]
    out[inside] = np.exp(-1.0 / (1.0 - xi * xi))
    return out


def bump_derivative(x):
    """Derivative of :func:`bump` (analytic, same support)."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    inside = np.abs(x) < 1.0
    xi = x[inside]
    g = 1.0 - xi * xi
    out[inside] = np.exp(-1.0 / g) * (-2.0 * xi / (g * g))
    return out
