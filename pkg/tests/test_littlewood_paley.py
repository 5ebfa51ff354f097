import numpy as np
import pytest

from paratorus import (Grid, TorusField, Trajectory, besov_norm, lp_project,
                       make_partition, parabolic_norm)
from paratorus.estimates import rough_field


@pytest.mark.parametrize("n", [8, 32, 64])
def test_partition_of_unity(n):
    part = make_partition(Grid(n))
    total = part.table.sum(axis=0)
    assert np.abs(total - 1.0).max() <= 1e-10
    assert part.j_max == int(np.floor(np.log2(n // 2)))


def test_ball_block_contains_origin(part32):
    assert part32.table[0][0, 0] == 1.0          # rho_{-1}(0) = 1


def test_block_disjointness(part64):
    nb = part64.j_max + 2
    for i in range(nb):
        for j in range(i + 2, nb):
            assert np.abs(part64.table[i] * part64.table[j]).max() == 0.0


def test_block_disjointness_specific_gap(part64):
    # rho_j * rho_{j+3} vanishes identically at every mode
    for j in range(part64.j_min, part64.j_max - 2):
        prod = part64.table[j + 1] * part64.table[j + 4]
        assert np.abs(prod).max() == 0.0


def test_projection_sums_to_identity(grid64, part64, rng):
    u = rough_field(grid64, 0.3, rng)
    total = sum((lp_project(u, j, part64) for j in part64.blocks),
                start=TorusField.zero(grid64))
    assert np.abs(total.spectral - u.spectral).max() <= 1e-10


def test_projection_of_constant(grid32, part32):
    c = TorusField.constant(grid32, 2.0)
    for j in range(1, part32.j_max + 1):
        assert lp_project(c, j, part32).sup_norm() == 0.0


def test_projection_single_mode(grid32, part32):
    spec = np.zeros((32, 32), complex)
    k = (5, -3)
    spec[grid32.mode_index(k)] = 1.0
    f = TorusField.from_spectral(grid32, spec)
    for j in part32.blocks:
        out = lp_project(f, j, part32)
        expected = part32.weight(j, k)
        assert out.spectral[grid32.mode_index(k)] == pytest.approx(expected)


def test_projection_index_range(grid32, part32):
    f = TorusField.constant(grid32, 1.0)
    with pytest.raises(ValueError):
        lp_project(f, part32.j_max + 1, part32)
    with pytest.raises(ValueError):
        lp_project(f, -2, part32)


def test_besov_constant(grid32):
    c = TorusField.constant(grid32, -4.0)
    for gamma in (-0.5, 0.0, 0.9):
        assert besov_norm(c, gamma) == pytest.approx(4.0 * 2.0 ** (-gamma))


def test_besov_homogeneity(grid32, rng):
    u = rough_field(grid32, 0.4, rng)
    for lam in (-3.0, 0.5):
        assert besov_norm(lam * u, 0.7) == pytest.approx(
            abs(lam) * besov_norm(u, 0.7), rel=1e-12)


@pytest.mark.parametrize("k,gamma", [((8, 0), 0.7), ((0, 16), -0.4),
                                     ((12, 9), 0.9)])
def test_besov_single_mode_against_block_weights(grid64, part64, k, gamma):
    # for e_k the norm is exactly max_j 2^{j gamma} rho_j(k); modes with
    # |k| = 2^{j+1} sit in the interior of block j where the weight is 1
    spec = np.zeros((64, 64), complex)
    spec[grid64.mode_index(k)] = 1.0
    f = TorusField.from_spectral(grid64, spec)
    expected = max(2.0 ** (j * gamma) * part64.weight(j, k)
                   for j in part64.blocks)
    assert besov_norm(f, gamma, part64) == pytest.approx(expected, rel=1e-12)
    if float(np.hypot(*k)) in (2.0, 4.0, 8.0, 16.0, 32.0):
        j = int(np.log2(np.hypot(*k))) - 1
        assert part64.weight(j, k) == 1.0
        assert besov_norm(f, gamma, part64) >= 2.0 ** (j * gamma)


def test_besov_block_weight_monotonicity(grid32, part32, rng):
    u = rough_field(grid32, 0.2, rng)
    sups = part32.block_sup_norms(u)
    g1, g2 = 0.3, 0.8
    for j in range(0, part32.j_max + 1):
        w1 = 2.0 ** (j * g1) * sups[j + 1]
        w2 = 2.0 ** (j * g2) * sups[j + 1]
        assert w1 <= w2 + 1e-15


def test_parabolic_norm_time_constant(grid32, rng):
    u = rough_field(grid32, 0.8, rng)
    traj = Trajectory([u] * 5, dt=0.1)
    assert parabolic_norm(traj, 0.8) == pytest.approx(besov_norm(u, 0.8))


def test_parabolic_norm_zero(grid32):
    traj = Trajectory([TorusField.zero(grid32)] * 4, dt=0.25)
    assert parabolic_norm(traj, 0.5) == 0.0


def test_parabolic_norm_linear_ramp(grid32):
    # u(t) = t * 1: Hoelder part sup |t-s|^{1-alpha/2} = T^{1-alpha/2},
    # spatial part T * 2^{-alpha}
    alpha, dt, m = 0.6, 0.125, 9
    t_final = dt * (m - 1)
    fields = [TorusField.constant(grid32, i * dt) for i in range(m)]
    traj = Trajectory(fields, dt)
    expected = max(t_final ** (1.0 - alpha / 2.0),
                   t_final * 2.0 ** (-alpha))
    assert parabolic_norm(traj, alpha) == pytest.approx(expected, rel=1e-12)


def test_parabolic_norm_argument_errors(grid32):
    single = Trajectory([TorusField.zero(grid32)], dt=0.1)
    with pytest.raises(ValueError):
        parabolic_norm(single, 0.5)
    two = Trajectory([TorusField.zero(grid32)] * 2, dt=0.1)
    with pytest.raises(ValueError):
        parabolic_norm(two, 1.5)


def test_trajectory_validation(grid16, grid32):
    with pytest.raises(ValueError):
        Trajectory([], dt=0.1)
    with pytest.raises(ValueError):
        Trajectory([TorusField.zero(grid16)], dt=0.0)
    with pytest.raises(ValueError):
        Trajectory([TorusField.zero(grid16), TorusField.zero(grid32)], dt=0.1)


def test_trajectory_interpolation_clamps(grid16):
    fields = [TorusField.constant(grid16, float(v)) for v in (0.0, 1.0, 2.0)]
    traj = Trajectory(fields, dt=0.5)
    assert traj.at_time(-3.0).mean() == 0.0
    assert traj.at_time(99.0).mean() == 2.0
    assert traj.at_time(0.25).mean() == pytest.approx(0.5)
