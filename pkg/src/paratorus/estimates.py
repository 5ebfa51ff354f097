"""Empirical bound-ratio suites for the paracontrolled continuity estimates.

Each suite draws random rough fields of prescribed regularity, evaluates one
bilinear/trilinear estimate, and records the ratio of the left-hand norm to
the product of the right-hand norms.  Boundedness of the underlying operator
shows up as an empirical constant that stays stable when the grid is
refined; the acceptance gate requires growth below 2x from n=64 to n=256.

Random fields of regularity gamma are spectrally synthesized as
``uhat(k) = <k>^{-(1+gamma)} ghat(k)`` with a Hermitian unit-variance
Gaussian ``ghat``; random parabolic trajectories superpose a few temporal
Fourier modes with amplitude decay matching the requested time-Hoelder
exponent.
"""

from dataclasses import dataclass

import numpy as np

from .grid import Grid, TorusField, Trajectory, laplacian, multiply
from .littlewood_paley import besov_norm, make_partition, parabolic_norm
from .noise import hermitian_unit_spectrum, mix_seed
from .nonlinear import tanh_fn
from .paraproducts import (TimeMollifier, corrector, merge_defect,
                           modified_para_at, modified_para_dt_at, para,
                           paralin_remainder, resonant)
from .symbols import commutator_para, power_symbol

__all__ = ["EstimateReport", "rough_field", "saturated_field",
           "rough_trajectory", "run_estimate", "run_all_estimates",
           "ESTIMATE_NAMES"]


def rough_field(grid, gamma, rng):
    """Random real field with Besov-Hoelder regularity ``gamma``."""
    decay = (1.0 + grid.knorm) ** (-(1.0 + gamma))
    spec = decay * hermitian_unit_spectrum(grid, rng)
    return TorusField.from_spectral(grid, spec, real=True)


def saturated_field(grid, gamma, rng, partition=None):
    """Random field whose dyadic blocks all sit on the C^gamma envelope.

    Each block of a random draw is rescaled to sup-norm ``2^{-gamma j}``, so
    the Besov norm is attained at every scale.  This is the extremal sample
    class for rate measurements of sup-based smoothing estimates; generic
    random fields sag below the envelope at most scales and decay faster
    than the advertised rate without contradicting it.
    """
    from .littlewood_paley import make_partition
    import scipy.fft as sfft
    part = partition if partition is not None else make_partition(grid)
    blocks = part.block_spectra(rough_field(grid, gamma, rng))
    phys = sfft.ifft2(blocks, axes=(-2, -1)) * grid.n ** 2
    sups = np.abs(phys).max(axis=(-2, -1))
    spec = np.zeros((grid.n, grid.n), dtype=complex)
    for j in range(part.j_min, part.j_max + 1):
        if sups[j + 1] > 0:
            spec += blocks[j + 1] * (2.0 ** (-gamma * j) / sups[j + 1])
    return TorusField.from_spectral(grid, spec, real=True)


def rough_trajectory(grid, gamma, hoelder, n_nodes, t_final, rng, n_modes=6):
    """Random trajectory, spatially C^gamma and time-Hoelder of the given
    exponent (temporal Fourier synthesis with amplitude m^-(1/2+hoelder))."""
    times = np.linspace(0.0, t_final, n_nodes)
    specs = np.zeros((n_nodes, grid.n, grid.n), dtype=complex)
    base = rough_field(grid, gamma, rng).spectral
    specs += base[None]
    for m in range(1, n_modes + 1):
        amp = m ** (-(0.5 + hoelder))
        fa = rough_field(grid, gamma, rng).spectral
        fb = rough_field(grid, gamma, rng).spectral
        phase_c = np.cos(np.pi * m * times / t_final)
        phase_s = np.sin(np.pi * m * times / t_final)
        specs += amp * (phase_c[:, None, None] * fa[None]
                        + phase_s[:, None, None] * fb[None])
    fields = [TorusField.from_spectral(grid, s, real=True) for s in specs]
    return Trajectory(fields, times[1] - times[0])


def _time_hoelder_sup(traj, exponent):
    phys = np.stack([f.physical for f in traj.fields])
    out = 0.0
    for d in range(1, len(traj)):
        diff = np.abs(phys[d:] - phys[:-d]).max()
        out = max(out, diff / (d * traj.dt) ** exponent)
    return out


@dataclass
class EstimateReport:
    name: str
    n: int
    samples: int
    ratios: np.ndarray
    params: dict

    @property
    def max_ratio(self):
        return float(self.ratios.max())

    @property
    def mean_ratio(self):
        return float(self.ratios.mean())


# ----------------------------------------------------------------------
# individual suites; each returns one ratio per draw

def _paraproduct_ratio(grid, part, rng, alpha=0.6, beta=0.5):
    u = rough_field(grid, alpha, rng)
    v = rough_field(grid, beta, rng)
    lhs = besov_norm(para(u, v, part), beta, part)
    return lhs / (u.sup_norm() * besov_norm(v, beta, part))


def _resonant_ratio(grid, part, rng, alpha=0.6, beta=-0.4):
    u = rough_field(grid, alpha, rng)
    v = rough_field(grid, beta, rng)
    lhs = besov_norm(resonant(u, v, part), alpha + beta, part)
    return lhs / (besov_norm(u, alpha, part) * besov_norm(v, beta, part))


def _corrector_ratio(grid, part, rng, alpha=0.9, beta=-0.4, gamma=-0.3):
    u = rough_field(grid, alpha, rng)
    v = rough_field(grid, beta, rng)
    w = rough_field(grid, gamma, rng)
    lhs = besov_norm(corrector(u, v, w, part), alpha + beta + gamma, part)
    return lhs / (besov_norm(u, alpha, part) * besov_norm(v, beta, part)
                  * besov_norm(w, gamma, part))


def _merge_defect_ratio(grid, part, rng, alpha=0.8, beta=0.6):
    h1 = rough_field(grid, alpha, rng)
    h2 = rough_field(grid, beta, rng)
    h3 = rough_field(grid, alpha, rng)
    lhs = besov_norm(merge_defect(h1, h2, h3, part), alpha + beta, part)
    return lhs / (besov_norm(h1, alpha, part) * besov_norm(h2, beta, part)
                  * besov_norm(h3, alpha, part))


def _paralin_ratio(grid, part, rng, alpha=0.8):
    f = tanh_fn()
    u = rough_field(grid, alpha, rng)
    lhs = besov_norm(paralin_remainder(f, u, part), 2.0 * alpha, part)
    return lhs / (f.c3_bound * (1.0 + besov_norm(u, alpha, part) ** 2))


def _modified_para_ratio(grid, part, rng, alpha=0.9, beta=0.5,
                         mollifier=TimeMollifier()):
    traj = rough_trajectory(grid, alpha, alpha / 2.0, n_nodes=9, t_final=1.0,
                            rng=rng)
    gfield = rough_field(grid, beta, rng)
    hoelder = _time_hoelder_sup(traj, alpha / 2.0)
    worst = 0.0
    for t in (0.25, 0.5, 0.75):
        pbar = modified_para_at(traj, gfield, t, mollifier, part)
        plain = para(traj.at_time(t), gfield, part)
        worst = max(worst, besov_norm(pbar - plain, alpha + beta, part))
    return worst / (hoelder * besov_norm(gfield, beta, part))


def _weighted_commutator_ratio(grid, part, rng, alpha=0.9, beta=0.7,
                               mollifier=TimeMollifier()):
    # (d/dt - w Lap)(Pbar_v X) - P_{w v}(-Lap X) in C^{alpha+beta-2}
    v = rough_trajectory(grid, beta, beta / 2.0, n_nodes=9, t_final=1.0,
                         rng=rng)
    w = rough_field(grid, 2.0 * beta, rng)
    x = rough_field(grid, alpha, rng)
    neg_lap_x = -1.0 * laplacian(x)
    denom = (1.0 + besov_norm(w, 2.0 * beta, part)) \
        * parabolic_norm(v, beta, part) * besov_norm(x, alpha, part)
    worst = 0.0
    for t in (0.25, 0.5, 0.75):
        dt_part = modified_para_dt_at(v, x, t, mollifier, part)
        pbar = modified_para_at(v, x, t, mollifier, part)
        lhs = dt_part - multiply(w, laplacian(pbar)) \
            - para(multiply(w, v.at_time(t)), neg_lap_x, part)
        worst = max(worst, besov_norm(lhs, alpha + beta - 2.0, part))
    return worst / denom


def _symbol_commutator_ratio(grid, part, rng, alpha1=0.8, alpha2=0.6, s=-0.5):
    sym = power_symbol(grid, s)
    h1 = rough_field(grid, alpha1, rng)
    h2 = rough_field(grid, alpha2, rng)
    lhs = besov_norm(commutator_para(sym, h1, h2, part),
                     alpha1 + alpha2 - s, part)
    return lhs / (besov_norm(h1, alpha1, part) * besov_norm(h2, alpha2, part))


_SUITES = {
    "paraproduct": (_paraproduct_ratio, {"alpha": 0.6, "beta": 0.5}),
    "resonant": (_resonant_ratio, {"alpha": 0.6, "beta": -0.4}),
    "corrector": (_corrector_ratio, {"alpha": 0.9, "beta": -0.4, "gamma": -0.3}),
    "merge_defect": (_merge_defect_ratio, {"alpha": 0.8, "beta": 0.6}),
    "paralinearization": (_paralin_ratio, {"alpha": 0.8}),
    "modified_paraproduct": (_modified_para_ratio, {"alpha": 0.9, "beta": 0.5}),
    "weighted_commutator": (_weighted_commutator_ratio,
                            {"alpha": 0.9, "beta": 0.7}),
    "symbol_commutator": (_symbol_commutator_ratio,
                          {"alpha1": 0.8, "alpha2": 0.6, "s": -0.5}),
}

ESTIMATE_NAMES = tuple(_SUITES)


def run_estimate(name, n, samples, master_seed=0, map_fn=map):
    """Bound-ratio suite ``name`` on an n-point grid."""
    if name not in _SUITES:
        raise ValueError("unknown estimate %r (have: %s)"
                         % (name, ", ".join(_SUITES)))
    fn, params = _SUITES[name]
    grid = Grid(n)
    part = make_partition(grid)

    def one_sample(s):
        rng = np.random.default_rng(mix_seed(master_seed, s))
        return fn(grid, part, rng)

    ratios = np.array(list(map_fn(one_sample, range(samples))))
    return EstimateReport(name=name, n=n, samples=samples, ratios=ratios,
                          params=dict(params))


def run_all_estimates(n_values=(64,), samples=100, master_seed=0, names=None,
                      map_fn=map):
    """All suites over the requested grid sizes; list of reports."""
    reports = []
    for name in (names if names is not None else ESTIMATE_NAMES):
        for n in n_values:
            reports.append(run_estimate(name, n, samples, master_seed, map_fn))
    return reports
