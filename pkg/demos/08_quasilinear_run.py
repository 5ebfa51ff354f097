"""One renormalized quasilinear run, its counterterms and its decomposition.

Marches du/dt = A(f(u)) Lap u + B(g(u)) xi^eps + counterterms with
f = 2 + tanh, g = tanh, A a Gaussian-smoothing convolution and B the
identity, then extracts the paracontrolled pair u = Pbar_{u'} X + u^sharp:
the remainder is visibly smoother than the solution at the 2*beta scale.

Desk-size by default (n=64, T=0.1); pass --full for the n=128, T=0.25 run.
"""

import sys

import numpy as np

from paratorus import (Grid, SolverConfig, TorusField, besov_norm,
                       gaussian_symbol, identity_symbol, make_X, regularize,
                       sample_white_noise, shifted_tanh_fn,
                       solve_renormalized, tanh_fn)
from paratorus.solver import counterterm_ablation, remainder_at_endpoint

full = "--full" in sys.argv
n, t_final, dt = (128, 0.25, 2.5e-3) if full else (64, 0.1, 2e-3)

grid = Grid(n)
cfg = SolverConfig(grid=grid, alpha=0.9, beta=0.7,
                   a=gaussian_symbol(grid, 1e-4), b=identity_symbol(grid),
                   f=shifted_tanh_fn(2.0), g=tanh_fn(),
                   eps=2.0 ** -3, dt=dt, t_final=t_final)
u0 = TorusField.from_physical(grid, np.cos(grid.x[0]) + np.sin(grid.x[1]))
xi = sample_white_noise(grid, seed=7)

traj = solve_renormalized(cfg, xi, u0)
print("run: n=%d, T=%g, %d output nodes" % (n, t_final, len(traj)))
print("  ||u(T)||_inf = %.3f, ||u(T)||_{C^0.9} = %.3f"
      % (traj.fields[-1].sup_norm(), besov_norm(traj.fields[-1], 0.9)))

x_ref = make_X(regularize(xi.field, cfg.eps))
sharp = remainder_at_endpoint(traj, x_ref, cfg.a, cfg.b, cfg.f, cfg.g)
print("paracontrolled split at T (beta = 0.7):")
print("  ||u(T)||_{C^1.4}       = %8.3f" % besov_norm(traj.fields[-1], 1.4))
print("  ||u_sharp(T)||_{C^1.4} = %8.3f   (the remainder is the smooth part)"
      % besov_norm(sharp, 1.4))

print("\ncounterterm ablation on a small coupled ladder:")
study = counterterm_ablation(cfg, u0, [2.0 ** -2, 2.0 ** -3, 2.0 ** -4],
                             samples=2, master_seed=12)
for eps, gap, used in study.rows:
    print("  eps=%-8g mean C_T-Linf gap with/without counterterms: %.4f"
          % (eps, gap))
print("the gap grows with log(1/eps): dropping the counterterms leaves a "
      "divergence behind.")
