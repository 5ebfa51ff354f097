"""Space white noise on the discrete torus and its Fourier-cutoff smoothing.

Noise is sampled directly in frequency: independent complex Gaussians with
unit variance per mode, Hermitian-paired so the physical field is real, with
the zero mode real standard normal.  Everything is deterministic given a
64-bit seed; Monte-Carlo batches derive per-sample seeds from a master seed
through a splitmix-style mixing function so results are reproducible
independently of scheduling.
"""

from dataclasses import dataclass

import numpy as np

from ._bump import PROFILE_ID, cutoff_chi
from .grid import TorusField, inverse_laplacian
from .littlewood_paley import make_partition

__all__ = [
    "NoiseRealization",
    "CutoffProfile",
    "sample_white_noise",
    "regularize",
    "make_X",
    "noise_regularity_report",
    "NoiseRegularityReport",
    "mix_seed",
    "hermitian_unit_spectrum",
]

_MASK64 = (1 << 64) - 1


def mix_seed(master_seed, index):
    """Per-sample seed from a master seed (splitmix64 finalizer, bit-exact).

    ``z = master + (index+1) * 0x9E3779B97F4A7C15`` followed by the standard
    xor-shift/multiply avalanche; pure 64-bit integer arithmetic, identical
    on every platform.
    """
    z = (int(master_seed) + (int(index) + 1) * 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def hermitian_unit_spectrum(grid, rng):
    """Hermitian complex Gaussian spectrum with unit variance per mode.

    Averaging an iid complex Gaussian array with its reflected conjugate
    yields E|what(k)|^2 = 1 for every mode, including the self-conjugate
    ones (which come out real).
    """
    w = rng.standard_normal((grid.n, grid.n)) \
        + 1j * rng.standard_normal((grid.n, grid.n))
    reflected = np.conj(np.roll(w[::-1, ::-1], (1, 1), axis=(0, 1)))
    return 0.5 * (w + reflected)


@dataclass(frozen=True)
class NoiseRealization:
    """One white-noise draw: real field, seed, grid."""

    field: TorusField
    seed: int

    @property
    def grid(self):
        return self.field.grid


def sample_white_noise(grid, seed, zero_mean=False):
    """Sample space white noise on the grid, deterministic in ``seed``.

    Each Fourier mode carries unit variance; the zero mode is real standard
    normal unless ``zero_mean`` forces it to zero.
    """
    rng = np.random.default_rng(np.random.PCG64(int(seed) & _MASK64))
    spec = hermitian_unit_spectrum(grid, rng)
    if zero_mean:
        spec = spec.copy()
        spec[0, 0] = 0.0
    field = TorusField.from_spectral(grid, spec, real=True)
    return NoiseRealization(field=field, seed=int(seed))


class CutoffProfile:
    """Smooth radial Fourier cutoff: 1 on [0, 1], 0 on [2, inf)."""

    def __init__(self, fn=None, name=None):
        self.fn = fn if fn is not None else cutoff_chi
        self.name = name if name is not None else PROFILE_ID + "-cutoff"
        probe = np.linspace(0.0, 3.0, 301)
        values = np.asarray(self.fn(probe), dtype=float)
        if (np.abs(values[probe <= 1.0] - 1.0).max() > 1e-12
                or np.abs(values[probe >= 2.0]).max() > 1e-12
                or (np.diff(values) > 1e-12).any()):
            raise ValueError("cutoff profile must be 1 on [0,1], 0 on "
                             "[2,inf) and nonincreasing")

    def __call__(self, r):
        return self.fn(r)

    def table(self, grid, eps):
        """Values ``chi(eps |k|)`` over the grid modes."""
        return self.fn(eps * grid.knorm)


DEFAULT_CUTOFF = CutoffProfile()


def regularize(u, eps, chi=None):
    """Fourier-cutoff smoothing: multiply the spectrum by ``chi(eps |k|)``."""
    if eps <= 0:
        raise ValueError("regularization scale must be positive, got %g" % eps)
    profile = chi if chi is not None else DEFAULT_CUTOFF
    spec = u.spectral * profile.table(u.grid, eps)
    return TorusField.from_spectral(u.grid, spec, real=u.real)


def make_X(xi):
    """Reference field ``X``: zero-mean solution of ``-Lap X = xi - mean``.

    Spectrally ``Xhat(k) = xihat(k) / |k|^2`` with the zero mode set to 0.
    """
    field = xi.field if isinstance(xi, NoiseRealization) else xi
    return inverse_laplacian(field)


@dataclass
class NoiseRegularityReport:
    """Mean block-norm table over a cutoff ladder and a regularity grid."""

    eps_ladder: tuple
    gammas: tuple
    samples: int
    master_seed: int
    mean_norms: np.ndarray          # shape (len(eps_ladder), len(gammas))
    bounded_gammas: tuple           # gammas whose norms stay bounded in eps
    max_bounded_gamma: float        # boundary of the bounded range (or nan)
    growth_tolerance: float

    def rows(self):
        for i, eps in enumerate(self.eps_ladder):
            for j, gamma in enumerate(self.gammas):
                yield eps, gamma, self.mean_norms[i, j]


def noise_regularity_report(grid, eps_ladder, gammas, samples, master_seed,
                            chi=None, growth_tolerance=1.5):
    """Empirical Besov norms of the smoothed noise across the cutoff ladder.

    For each (eps, gamma) the mean of ``||xi^eps||_{C^gamma}`` over coupled
    samples is tabulated; a gamma is flagged as bounded when the norm grows
    by less than ``growth_tolerance`` from the largest to the smallest eps.
    The largest bounded gamma estimates the noise regularity.
    """
    if samples < 1:
        raise ValueError("need at least one sample")
    eps_ladder = tuple(sorted(eps_ladder, reverse=True))
    gammas = tuple(gammas)
    part = make_partition(grid)
    means = np.zeros((len(eps_ladder), len(gammas)))
    for s in range(samples):
        xi = sample_white_noise(grid, mix_seed(master_seed, s))
        for i, eps in enumerate(eps_ladder):
            xi_eps = regularize(xi.field, eps, chi)
            sups = part.block_sup_norms(xi_eps)
            js = np.arange(part.j_min, part.j_max + 1)
            for j, gamma in enumerate(gammas):
                means[i, j] += (2.0 ** (gamma * js) * sups).max()
    means /= samples
    bounded = []
    for j, gamma in enumerate(gammas):
        if means[-1, j] <= growth_tolerance * means[0, j]:
            bounded.append(gamma)
    return NoiseRegularityReport(
        eps_ladder=eps_ladder, gammas=gammas, samples=samples,
        master_seed=master_seed, mean_norms=means,
        bounded_gammas=tuple(bounded),
        max_bounded_gamma=max(bounded) if bounded else float("nan"),
        growth_tolerance=growth_tolerance,
    )
