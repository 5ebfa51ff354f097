"""Dyadic (Littlewood-Paley) frequency decomposition and Besov norms.

The partition of unity is built from a smooth radial cutoff ``chi`` equal to
1 on [0, 1] and 0 on [2, inf):

    rho_{-1}(k) = chi(|k|),      rho_j(k) = chi(2^{-j-1}|k|) - chi(2^{-j}|k|),

so ``sum_j rho_j`` telescopes to ``chi(2^{-(jmax+1)}|k|)`` which equals 1 at
every grid mode once ``2^jmax >= n/2``.  Blocks two or more indices apart
have disjoint supports.  Block j lives on the open annulus
``2^j < |k| < 2^{j+2}`` and equals 1 exactly on the circle ``|k| = 2^{j+1}``.

The Besov-Hoelder norm used throughout is the grid instantiation of the
``B^gamma_{inf,inf}`` norm,

    ||f||_gamma = sup_{j >= -1} 2^{j*gamma} ||Delta_j f||_{L_inf},

with the j = -1 ball block carrying weight ``2^{-gamma}``.
"""

from functools import lru_cache

import numpy as np
import scipy.fft as sfft

from ._bump import cutoff_chi
from .grid import Trajectory

__all__ = [
    "DyadicPartition",
    "make_partition",
    "lp_project",
    "besov_norm",
    "parabolic_norm",
]


class DyadicPartition:
    """Littlewood-Paley family ``(rho_j)_{j >= -1}`` on one grid.

    ``table[j + 1]`` holds the weights of block j at every grid mode (index 0
    is the j = -1 ball).  Weights are evaluated from the analytic profile, so
    the same object answers off-grid queries through :meth:`weight`.
    """

    def __init__(self, grid):
        j_max = int(np.floor(np.log2(grid.n // 2)))
        if j_max < 1:
            raise ValueError("grid with n=%d cannot host two dyadic annuli"
                             % grid.n)
        self.grid = grid
        self.j_min = -1
        self.j_max = j_max
        r = grid.knorm
        self.table = np.empty((j_max + 2, grid.n, grid.n))
        for j in range(-1, j_max + 1):
            self.table[j + 1] = self._radial(j, r)
        self.table.setflags(write=False)
        # cumulative[idx] = sum of blocks -1..(idx-1) = chi(2^{-idx-1} r)
        self.cumulative = np.cumsum(self.table, axis=0)
        self.cumulative.setflags(write=False)

    @staticmethod
    def _radial(j, r):
        if j == -1:
            return cutoff_chi(r)
        return cutoff_chi(np.asarray(r, dtype=float) / 2.0 ** (j + 1)) \
            - cutoff_chi(np.asarray(r, dtype=float) / 2.0 ** j)

    def weight(self, j, kvec):
        """Block-j weight at an arbitrary integer (or real) frequency vector."""
        r = np.hypot(float(kvec[0]), float(kvec[1]))
        return float(self._radial(j, r))

    def weight_radial(self, j, r):
        """Vectorized block-j weight as a function of |k|."""
        return self._radial(j, r)

    @property
    def blocks(self):
        """Valid block indices, j = -1 .. j_max."""
        return range(self.j_min, self.j_max + 1)

    def project(self, f, j):
        """Frequency projection ``Delta_j f``."""
        if not (self.j_min <= j <= self.j_max):
            raise ValueError("block index %d outside [%d, %d]"
                             % (j, self.j_min, self.j_max))
        from .grid import TorusField
        spec = self.table[j + 1] * f.spectral
        return TorusField.from_spectral(self.grid, spec, real=f.real)

    def block_spectra(self, f):
        """All block spectra stacked as a (j_max+2, n, n) array."""
        return self.table * f.spectral[None, :, :]

    def block_sup_norms(self, f):
        """``||Delta_j f||_{L_inf}`` for every block, one batched transform."""
        phys = sfft.ifft2(self.block_spectra(f), axes=(-2, -1)) * self.grid.n ** 2
        return np.abs(phys).max(axis=(-2, -1))


@lru_cache(maxsize=None)
def make_partition(grid):
    """Dyadic partition on ``grid`` (cached; partitions are immutable)."""
    return DyadicPartition(grid)


def lp_project(f, j, partition=None):
    """Littlewood-Paley projection ``Delta_j f``."""
    part = partition if partition is not None else make_partition(f.grid)
    return part.project(f, j)


def besov_norm(f, gamma, partition=None):
    """Grid Besov-Hoelder norm ``sup_j 2^{j*gamma} ||Delta_j f||_{L_inf}``."""
    part = partition if partition is not None else make_partition(f.grid)
    sups = part.block_sup_norms(f)
    weights = 2.0 ** (gamma * np.arange(part.j_min, part.j_max + 1))
    return float((weights * sups).max())


def parabolic_norm(u, alpha, partition=None):
    """Parabolic alpha-Hoelder norm of a trajectory.

    Maximum of ``sup_t ||u(t)||_{C^alpha}`` and the discrete alpha/2-Hoelder
    seminorm ``sup_{s != t} ||u(t) - u(s)||_{L_inf} / |t-s|^{alpha/2}`` over
    all pairs of time nodes.
    """
    if not (0.0 < alpha < 1.0):
        raise ValueError("parabolic norm needs alpha in (0,1), got %g" % alpha)
    if not isinstance(u, Trajectory) or len(u) < 2:
        raise ValueError("parabolic norm needs a trajectory with >= 2 nodes")
    part = partition if partition is not None else make_partition(u.grid)
    spatial = max(besov_norm(f, alpha, part) for f in u.fields)
    phys = np.stack([np.asarray(f.physical) for f in u.fields])
    hoelder = 0.0
    m = len(u)
    for d in range(1, m):
        diff = np.abs(phys[d:] - phys[:-d]).max()
        hoelder = max(hoelder, diff / (d * u.dt) ** (alpha / 2.0))
    return float(max(spatial, hoelder))
