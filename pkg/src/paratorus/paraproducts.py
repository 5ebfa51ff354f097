"""Bony decomposition: paraproducts, resonant products and their correctors.

The product of two fields splits over Littlewood-Paley blocks as

    u v = P_u v + Pi(u, v) + P_v u,
    P_u v    = sum_{i < j-1}    (Delta_i u)(Delta_j v),
    Pi(u, v) = sum_{|i-j| <= 1} (Delta_i u)(Delta_j v).

All block products are dealiased, so the reconstruction identity holds to
rounding for band-limited inputs.  The module also provides the trilinear
corrector, the paraproduct merging defect, the paralinearization remainder,
and the time-mollified paraproduct used for parabolic functions, where the
low-frequency factor of block j is averaged over a time window of width
``2^{-2j}`` before it multiplies ``Delta_j`` of the high-frequency factor.
"""

from functools import lru_cache

import numpy as np
import scipy.fft as sfft

from ._bump import bump, bump_derivative
from .grid import (TorusField, Trajectory, _pad_modes, _physical_to_truncated,
                   _require_same_grid, multiply, padded_size)
from .littlewood_paley import make_partition

__all__ = [
    "para",
    "resonant",
    "corrector",
    "merge_defect",
    "paralin_remainder",
    "TimeMollifier",
    "modified_para",
    "modified_para_at",
    "modified_para_dt_at",
]


def _padded_block_physicals(f, part, m):
    """Physical block fields Delta_j f on the 3/2-padded grid, batched."""
    specs = part.block_spectra(f)
    return sfft.ifft2(_pad_modes(specs, m), axes=(-2, -1)) * m * m


def para(u, v, partition=None):
    """Paraproduct ``P_u v``: low frequencies of u modulating blocks of v."""
    grid = _require_same_grid(u, v)
    part = partition if partition is not None else make_partition(grid)
    m = padded_size(grid.n)
    bu = _padded_block_physicals(u, part, m)
    bv = _padded_block_physicals(v, part, m)
    low = np.cumsum(bu, axis=0)
    acc = np.zeros((m, m), dtype=complex)
    for idx in range(2, part.j_max + 2):      # block j = idx - 1 >= 1
        acc += low[idx - 2] * bv[idx]
    spec = _physical_to_truncated(acc, grid.n)
    return TorusField.from_spectral(grid, spec, real=u.real and v.real)


def resonant(u, v, partition=None):
    """Resonant product ``Pi(u, v)``: the diagonal block pairs |i-j| <= 1."""
    grid = _require_same_grid(u, v)
    part = partition if partition is not None else make_partition(grid)
    m = padded_size(grid.n)
    bu = _padded_block_physicals(u, part, m)
    bv = _padded_block_physicals(v, part, m)
    nb = part.j_max + 2
    acc = np.zeros((m, m), dtype=complex)
    for idx in range(nb):
        near = bv[max(0, idx - 1):min(nb, idx + 2)].sum(axis=0)
        acc += bu[idx] * near
    spec = _physical_to_truncated(acc, grid.n)
    return TorusField.from_spectral(grid, spec, real=u.real and v.real)


def corrector(u, v, w, partition=None):
    """Trilinear corrector ``C(u, v, w) = Pi(P_u v, w) - u * Pi(v, w)``."""
    _require_same_grid(u, v, w)
    part = partition if partition is not None else make_partition(u.grid)
    return resonant(para(u, v, part), w, part) - multiply(u, resonant(v, w, part))


def merge_defect(h1, h2, h3, partition=None):
    """Iterated-paraproduct defect ``P_{h1}(P_{h2} h3) - P_{h1 h2} h3``."""
    _require_same_grid(h1, h2, h3)
    part = partition if partition is not None else make_partition(h1.grid)
    return para(h1, para(h2, h3, part), part) - para(multiply(h1, h2), h3, part)


def paralin_remainder(f, u, partition=None):
    """Paralinearization remainder ``R_f(u) = f(u) - P_{f'(u)} u``.

    ``f`` is a scalar nonlinearity exposing ``f(x)`` and ``f.deriv(x)``
    (see :class:`paratorus.nonlinear.NonlinearFn`); both are applied
    pointwise on the physical grid.
    """
    part = partition if partition is not None else make_partition(u.grid)
    phys = u.physical
    fu = TorusField.from_physical(u.grid, f(phys), real=u.real)
    fpu = TorusField.from_physical(u.grid, f.deriv(phys), real=u.real)
    return fu - para(fpu, u, part)


# ----------------------------------------------------------------------
# time-mollified paraproduct

class TimeMollifier:
    """Smooth averaging kernel for the time-mollified paraproduct.

    The kernel is the normalized even bump on (-1, 1); block j of the
    paraproduct averages its low-frequency factor over times
    ``t - 2^{-2j} * tau`` with a composite Simpson rule in tau whose weights
    are renormalized so that constants are reproduced exactly.  The rule is
    refined when the window spans many trajectory steps.
    """

    def __init__(self, base_nodes=33, max_nodes=129):
        if base_nodes < 5 or base_nodes % 2 == 0:
            raise ValueError("need an odd node count >= 5")
        self.base_nodes = int(base_nodes)
        self.max_nodes = int(max_nodes)

    @staticmethod
    @lru_cache(maxsize=None)
    def _rule(n_nodes):
        tau = np.linspace(-1.0, 1.0, n_nodes)
        w = np.ones(n_nodes)
        w[1:-1:2] = 4.0
        w[2:-1:2] = 2.0
        w *= (tau[1] - tau[0]) / 3.0
        phi = bump(tau)
        mass = float(np.sum(w * phi))
        weights = w * phi / mass            # discrete integral of phi == 1
        dweights = w * bump_derivative(tau) / mass
        tau.setflags(write=False)
        weights.setflags(write=False)
        dweights.setflags(write=False)
        return tau, weights, dweights

    def nodes_for(self, halfwidth, dt):
        """Node count resolving both the bump and the trajectory sampling."""
        if dt <= 0:
            return self.base_nodes
        needed = int(np.ceil(2.0 * halfwidth / dt)) + 1
        if needed % 2 == 0:
            needed += 1
        return min(self.max_nodes, max(self.base_nodes, needed))

    def average(self, traj, t, halfwidth):
        """Window average of trajectory spectra around time t (clamped)."""
        tau, w, _ = self._rule(self.nodes_for(halfwidth, traj.dt))
        out = np.zeros((traj.grid.n, traj.grid.n), dtype=complex)
        for tl, wl in zip(tau, w):
            out += wl * traj.at_time(t - halfwidth * tl).spectral
        return out

    def average_dt(self, traj, t, halfwidth):
        """Time derivative of :meth:`average` (kernel-derivative quadrature).

        Written against ``f(s) - f(t)`` so the rule annihilates constants
        exactly even though the quadrature is inexact.
        """
        tau, _, dw = self._rule(self.nodes_for(halfwidth, traj.dt))
        ref = traj.at_time(t).spectral
        out = np.zeros((traj.grid.n, traj.grid.n), dtype=complex)
        for tl, wl in zip(tau, dw):
            out += wl * (traj.at_time(t - halfwidth * tl).spectral - ref)
        return out / halfwidth

    @property
    def identifier(self):
        return "exp-bump-simpson%d" % self.base_nodes


def _modified_para_spec(uprime, x_blocks_big, part, mollifier, t, m, n,
                        time_derivative=False):
    """Spectrum of (d/dt)^q P-bar_{u'} X at one time, q in {0, 1}."""
    acc = np.zeros((m, m), dtype=complex)
    for j in range(1, part.j_max + 1):        # blocks with a nonempty low part
        halfwidth = 2.0 ** (-2 * j)
        if time_derivative:
            qspec = mollifier.average_dt(uprime, t, halfwidth)
        else:
            qspec = mollifier.average(uprime, t, halfwidth)
        low_spec = part.cumulative[j - 1] * qspec     # blocks -1 .. j-2
        low_big = sfft.ifft2(_pad_modes(low_spec, m)) * m * m
        acc += low_big * x_blocks_big[j + 1]
    return _physical_to_truncated(acc, n)


def modified_para(uprime, x, mollifier=None, partition=None):
    """Time-mollified paraproduct ``P-bar_{u'} X`` along a trajectory.

    ``uprime`` is a trajectory, ``x`` a fixed field; the result is the
    trajectory whose node at time t pairs the window-averaged low
    frequencies of u' with the blocks of ``x``.  Outside [0, T] the
    trajectory is extended by its endpoint values.
    """
    if not isinstance(uprime, Trajectory) or len(uprime) == 0:
        raise ValueError("modified paraproduct needs a nonempty trajectory")
    if len(uprime) == 1:
        # degenerate single-node trajectory: mollification sees a constant
        uprime = Trajectory([uprime[0], uprime[0]], dt=1.0)
    grid = uprime.grid
    if x.grid != grid:
        raise ValueError("trajectory and reference field grids differ")
    part = partition if partition is not None else make_partition(grid)
    moll = mollifier if mollifier is not None else TimeMollifier()
    m = padded_size(grid.n)
    xb = _padded_block_physicals(x, part, m)
    real = x.real and all(f.real for f in uprime.fields)
    fields = []
    for t in uprime.times:
        spec = _modified_para_spec(uprime, xb, part, moll, t, m, grid.n)
        fields.append(TorusField.from_spectral(grid, spec, real=real))
    return Trajectory(fields, uprime.dt)


def modified_para_at(uprime, x, t, mollifier=None, partition=None):
    """``P-bar_{u'} X`` evaluated at a single time (cheap endpoint path)."""
    grid = uprime.grid
    part = partition if partition is not None else make_partition(grid)
    moll = mollifier if mollifier is not None else TimeMollifier()
    m = padded_size(grid.n)
    xb = _padded_block_physicals(x, part, m)
    real = x.real and all(f.real for f in uprime.fields)
    spec = _modified_para_spec(uprime, xb, part, moll, t, m, grid.n)
    return TorusField.from_spectral(grid, spec, real=real)


def modified_para_dt_at(uprime, x, t, mollifier=None, partition=None):
    """Time derivative ``d/dt P-bar_{u'} X`` at a single time."""
    grid = uprime.grid
    part = partition if partition is not None else make_partition(grid)
    moll = mollifier if mollifier is not None else TimeMollifier()
    m = padded_size(grid.n)
    xb = _padded_block_physicals(x, part, m)
    real = x.real and all(f.real for f in uprime.fields)
    spec = _modified_para_spec(uprime, xb, part, moll, t, m, grid.n,
                               time_derivative=True)
    return TorusField.from_spectral(grid, spec, real=real)
