"""Dyadic frequency blocks and Besov-Hoelder norms on the torus.

Builds the Littlewood-Paley partition on a 64-point grid, verifies the
partition-of-unity and disjointness certificates, projects a field onto its
blocks, and shows how the Besov norm reads regularity off spectral decay.
"""

import numpy as np

from paratorus import Grid, besov_norm, lp_project, make_partition
from paratorus.estimates import rough_field

grid = Grid(64)
part = make_partition(grid)

print("blocks j = %d .. %d" % (part.j_min, part.j_max))
print("partition of unity error: %.2e"
      % np.abs(part.table.sum(axis=0) - 1.0).max())

worst = 0.0
for i in part.blocks:
    for j in part.blocks:
        if abs(i - j) >= 2:
            worst = max(worst, np.abs(part.table[i + 1] * part.table[j + 1]).max())
print("disjointness |i-j| >= 2 worst overlap: %.2e" % worst)

rng = np.random.default_rng(1)
print("\nblock sup-norms of a C^0.5 sample:")
u = rough_field(grid, 0.5, rng)
for j in part.blocks:
    print("  j=%2d   ||Delta_j u||_inf = %8.4f   2^{0.5 j} scaled = %6.3f"
          % (j, lp_project(u, j, part).sup_norm(),
             2.0 ** (0.5 * j) * lp_project(u, j, part).sup_norm()))

print("\nBesov norms across regularities (one C^0.5 sample):")
for gamma in (0.0, 0.5, 0.9, 1.4):
    print("  ||u||_{C^%.1f} = %9.3f" % (gamma, besov_norm(u, gamma, part)))

print("\nthe same norm on samples of different prescribed regularity:")
for g in (-0.5, 0.0, 0.5, 1.0):
    v = rough_field(grid, g, rng)
    print("  sample at gamma=%4.1f:  ||v||_{C^0.5} = %9.3f"
          % (g, besov_norm(v, 0.5, part)))
