import numpy as np
import pytest

from paratorus import (Grid, SolverConfig, TorusField, constant_fn,
                       convergence_study, counterterm_ablation,
                       exact_linear_solve, extract_paracontrolled,
                       gaussian_symbol, identity_symbol, oscillation_symbol,
                       sample_white_noise, shifted_tanh_fn,
                       solve_renormalized, tanh_fn)
from paratorus.errors import (BlowUpError, ConfigurationError,
                              EllipticityError)
from paratorus.estimates import rough_field
from paratorus.noise import regularize
from paratorus.nonlinear import NonlinearFn
from paratorus.solver import gubinelli_derivative, remainder_at_endpoint


def linear_config(grid, dt=1e-3, t_final=0.1, **kw):
    ident = identity_symbol(grid)
    one = constant_fn(1.0)
    base = dict(grid=grid, alpha=0.9, beta=0.7, a=ident, b=ident, f=one,
                g=one, eps=2 ** -3, dt=dt, t_final=t_final, t_smooth=0.0,
                substep_policy="fixed")
    base.update(kw)
    return SolverConfig(**base)


def quasilinear_config(grid, eps=2 ** -3, dt=1e-3, t_final=0.02, **kw):
    base = dict(grid=grid, alpha=0.9, beta=0.7,
                a=gaussian_symbol(grid, 1e-4), b=identity_symbol(grid),
                f=shifted_tanh_fn(2.0), g=tanh_fn(), eps=eps, dt=dt,
                t_final=t_final)
    base.update(kw)
    return SolverConfig(**base)


def wavy_u0(grid):
    return TorusField.from_physical(grid, np.cos(grid.x[0])
                                    + np.sin(grid.x[1]), real=True)


def test_config_validation_errors(grid64):
    ident = identity_symbol(grid64)
    one = constant_fn(1.0)
    with pytest.raises(ConfigurationError):
        linear_config(grid64, alpha=0.5).validate()      # window violated
    with pytest.raises(ConfigurationError):
        linear_config(grid64, beta=0.95).validate()
    with pytest.raises(ConfigurationError):
        linear_config(grid64, eps=1e-3).validate()       # below 4/n
    with pytest.raises(ConfigurationError):
        linear_config(grid64, f=constant_fn(-1.0)).validate()
    with pytest.raises(ConfigurationError):
        linear_config(grid64, f=tanh_fn()).validate()    # no lower bound
    with pytest.raises(ConfigurationError):
        linear_config(grid64, substep_policy="sometimes").validate()
    with pytest.raises(ConfigurationError):
        linear_config(grid64, a=oscillation_symbol(grid64)).validate()


def test_config_rejects_inconsistent_derivatives(grid64):
    broken = NonlinearFn(name="broken", fn=np.tanh,
                         d1=lambda x: np.cosh(x),   # wrong on purpose
                         d2=lambda x: np.zeros_like(x),
                         d3=lambda x: np.zeros_like(x),
                         c3_bound=2.0, lower_bound=1.0)
    with pytest.raises(ConfigurationError):
        linear_config(Grid(64), f=broken).validate()


def test_linear_benchmark_first_order(grid64):
    xi = sample_white_noise(grid64, 9)
    u0 = wavy_u0(grid64)
    errs = []
    for dt in (2e-3, 1e-3):
        cfg = linear_config(grid64, dt=dt)
        traj = solve_renormalized(cfg, xi, u0)
        exact = exact_linear_solve(regularize(xi.field, cfg.eps), 1.0, u0,
                                   cfg.t_final, dt)
        errs.append((traj.fields[-1] - exact.fields[-1]).sup_norm())
    ratio = errs[0] / errs[1]
    assert 1.6 <= ratio <= 2.4


def test_linear_counterterms_identically_zero(grid64):
    # f' = g' = 0 makes the counterterm contribution vanish identically
    xi = sample_white_noise(grid64, 10)
    u0 = wavy_u0(grid64)
    cfg = linear_config(grid64, t_final=0.02)
    with_ct = solve_renormalized(cfg, xi, u0, counterterms=True)
    without = solve_renormalized(cfg, xi, u0, counterterms=False)
    for a, b in zip(with_ct.fields, without.fields):
        assert np.array_equal(a.spectral, b.spectral)


def test_zero_noise_constant_state(grid64):
    cfg = linear_config(grid64, t_final=0.05)
    zero = TorusField.zero(grid64)
    c0 = TorusField.constant(grid64, 5.0)
    traj = solve_renormalized(cfg, zero, c0)
    assert (traj.fields[-1] - c0).sup_norm() == 0.0


def test_mean_conserved_under_heat_flow(grid64, rng):
    cfg = linear_config(grid64, t_final=0.05)
    zero = TorusField.zero(grid64)
    u0 = rough_field(grid64, 0.9, rng)
    traj = solve_renormalized(cfg, zero, u0)
    means = [float(np.real(f.mean())) for f in traj.fields]
    assert max(abs(m - means[0]) for m in means) <= 1e-12 * max(
        1.0, abs(means[0]))


def test_exact_linear_solve_properties(grid32):
    u0 = wavy_u0(grid32)
    zero = TorusField.zero(grid32)
    heat = exact_linear_solve(zero, 1.0, u0, 0.1, 0.05)
    from paratorus import heat_semigroup
    expected = heat_semigroup(u0, 0.1)
    assert np.abs(heat.fields[-1].spectral - expected.spectral).max() < 1e-14

    spec = np.zeros((32, 32), complex)
    k = (3, 0)
    spec[grid32.mode_index(k)] = 2.0
    spec[grid32.mode_index((-3, 0))] = 2.0
    xi = TorusField.from_spectral(grid32, spec)
    traj = exact_linear_solve(xi, 2.0, TorusField.zero(grid32), 0.5, 0.25)
    ks = 9.0
    got = traj.fields[-1].spectral[grid32.mode_index(k)]
    expected = (1.0 - np.exp(-2.0 * ks * 0.5)) * 2.0 / (2.0 * ks)
    assert got == pytest.approx(expected, rel=1e-14)

    # stationarity: t -> inf limit is xihat / (c0 |k|^2)
    late = exact_linear_solve(xi, 2.0, TorusField.zero(grid32), 50.0, 50.0)
    assert late.fields[-1].spectral[grid32.mode_index(k)] == pytest.approx(
        2.0 / (2.0 * ks), rel=1e-12)

    # zero mode grows linearly in t
    spec0 = np.zeros((32, 32), complex)
    spec0[0, 0] = 3.0
    xi0 = TorusField.from_spectral(grid32, spec0)
    traj0 = exact_linear_solve(xi0, 1.0, TorusField.zero(grid32), 1.0, 0.5)
    assert traj0.fields[-1].spectral[0, 0] == pytest.approx(3.0)

    with pytest.raises(ValueError):
        exact_linear_solve(xi, 0.0, u0, 1.0, 0.5)


def test_quasilinear_smoke(grid64):
    cfg = quasilinear_config(grid64, t_final=0.02, dt=1e-3)
    xi = sample_white_noise(grid64, 3)
    traj = solve_renormalized(cfg, xi, wavy_u0(grid64))
    assert len(traj) == 21
    assert np.isfinite(traj.fields[-1].sup_norm())


def test_ellipticity_guard():
    grid = Grid(64)
    cfg = SolverConfig(grid=grid, alpha=0.9, beta=0.7,
                       a=identity_symbol(grid), b=identity_symbol(grid),
                       f=shifted_tanh_fn(1.001), g=constant_fn(1.0),
                       eps=2 ** -3, dt=1e-3, t_final=0.01, floor=2e-3)
    xi = sample_white_noise(grid, 4)
    u0 = TorusField.constant(grid, -5.0)     # f(u0) ~ 1e-3 < floor
    with pytest.raises(EllipticityError) as err:
        solve_renormalized(cfg, xi, u0)
    assert err.value.value <= 2e-3


def test_blowup_guard(grid64):
    cfg = linear_config(grid64, t_final=0.01, blowup_cap=0.5)
    xi = sample_white_noise(grid64, 5)
    u0 = TorusField.constant(grid64, 2.0)
    with pytest.raises(BlowUpError) as err:
        solve_renormalized(cfg, xi, u0)
    assert err.value.value > 0.5


def test_final_time_must_be_multiple_of_dt(grid64):
    cfg = linear_config(grid64, dt=3e-3, t_final=0.01)
    xi = sample_white_noise(grid64, 6)
    with pytest.raises(ConfigurationError):
        solve_renormalized(cfg, xi, wavy_u0(grid64))


def test_extraction_trivial_quotient(grid64):
    # f = g = 1 and A = B = identity force u' = 1
    cfg = linear_config(grid64, t_final=0.02)
    xi = sample_white_noise(grid64, 12)
    traj = solve_renormalized(cfg, xi, wavy_u0(grid64))
    uprime = gubinelli_derivative(traj, cfg.a, cfg.b, cfg.f, cfg.g)
    for f in uprime.fields:
        assert np.abs(f.physical - 1.0).max() < 1e-12


def test_extraction_reconstruction(grid64):
    cfg = quasilinear_config(grid64, t_final=0.01, dt=1e-3)
    xi = sample_white_noise(grid64, 13)
    traj = solve_renormalized(cfg, xi, wavy_u0(grid64))
    from paratorus.noise import make_X
    x_ref = make_X(regularize(xi.field, cfg.eps))
    pair = extract_paracontrolled(traj, x_ref, cfg.a, cfg.b, cfg.f, cfg.g)
    recon = pair.reconstruct()
    for a, b in zip(recon.fields, traj.fields):
        scale = max(b.sup_norm(), 1.0)
        assert (a - b).sup_norm() <= 1e-12 * scale
    # endpoint shortcut agrees with the full extraction
    end = remainder_at_endpoint(traj, x_ref, cfg.a, cfg.b, cfg.f, cfg.g)
    assert (end - pair.usharp.fields[-1]).sup_norm() <= 1e-12


def test_convergence_study_reproducible_and_decreasing(grid64):
    cfg = linear_config(grid64, t_final=0.02)
    u0 = wavy_u0(grid64)
    ladder = [2 ** -2, 2 ** -3, 2 ** -4]
    a = convergence_study(cfg, u0, ladder, samples=2, alpha_prime=0.5,
                          master_seed=21)
    b = convergence_study(cfg, u0, ladder, samples=2, alpha_prime=0.5,
                          master_seed=21)
    assert a.rows == b.rows
    assert a.monotone_decreasing
    assert a.loglog_slope > 0.0      # decay consistent with the cutoff tail
    assert not a.failures


def test_convergence_study_records_failures(grid64):
    cfg = linear_config(grid64, t_final=0.02, blowup_cap=1e-6)
    u0 = wavy_u0(grid64)
    study = convergence_study(cfg, u0, [2 ** -2, 2 ** -3], samples=2,
                              alpha_prime=0.5, master_seed=2)
    assert len(study.failures) == 4
    assert all(np.isnan(row[2]) for row in study.rows)
    assert all(row[3] == 0 for row in study.rows)


def test_ablation_zero_for_linear(grid64):
    cfg = linear_config(grid64, t_final=0.02)
    study = counterterm_ablation(cfg, wavy_u0(grid64), [2 ** -2, 2 ** -3],
                                 samples=1, master_seed=3)
    assert all(row[1] == 0.0 for row in study.rows)


def test_ablation_grows_for_quasilinear(grid64):
    cfg = quasilinear_config(grid64, t_final=0.02, dt=1e-3)
    study = counterterm_ablation(cfg, wavy_u0(grid64),
                                 [2 ** -2, 2 ** -3, 2 ** -4], samples=2,
                                 master_seed=5)
    gaps = [row[1] for row in study.rows]
    assert study.monotone_increasing
    assert study.loglog_slope > 0.0


def test_step_size_scale_separation(grid64):
    # halving dt moves the endpoint by far less than the eps-ladder
    # differences the studies measure
    xi = sample_white_noise(grid64, 30)
    u0 = wavy_u0(grid64)
    cfg_a = quasilinear_config(grid64, t_final=0.02, dt=2e-4,
                               substep_policy="fixed", t_smooth=0.0)
    cfg_b = quasilinear_config(grid64, t_final=0.02, dt=1e-4,
                               substep_policy="fixed", t_smooth=0.0)
    end_a = solve_renormalized(cfg_a, xi, u0).fields[-1]
    end_b = solve_renormalized(cfg_b, xi, u0).fields[-1]
    dt_gap = (end_a - end_b).sup_norm()

    cfg_eps = quasilinear_config(grid64, eps=2 ** -2, t_final=0.02, dt=1e-4,
                                 substep_policy="fixed", t_smooth=0.0)
    cfg_eps2 = quasilinear_config(grid64, eps=2 ** -3, t_final=0.02, dt=1e-4,
                                  substep_policy="fixed", t_smooth=0.0)
    u_eps = solve_renormalized(cfg_eps, xi, u0).fields[-1]
    u_eps2 = solve_renormalized(cfg_eps2, xi, u0).fields[-1]
    eps_gap = (u_eps - u_eps2).sup_norm()
    assert eps_gap >= 4.0 * dt_gap
