"""Slow reference implementations shared by the tests."""
import numpy as np


def brute_embedding(m, grid_x, pxa, pbx):
    """Loop-level chain rule with the three closed-form factors."""
    s_a = m.amplitudes
    rho_x = np.array([sum(m.grid_a.weights[i] * pxa[x, i] * m.rho_a[i] for i in range(m.grid_a.n))
                      for x in range(grid_x.n)])
    s_x = np.sqrt(rho_x)
    wx = grid_x.weights
    nb, na = m.grid_b.n, m.grid_a.n
    out = np.zeros((nb, na, na))
    for b in range(nb):
        for a in range(na):
            for a2 in range(na):
                total = 0.0
                for x in range(grid_x.n):
                    for y in range(grid_x.n):
                        d1 = pxa[x, a] * s_a[a] / (2 * s_x[x])
                        d2 = pxa[y, a2] * s_a[a2] / (2 * s_x[y])
                        core = pbx[b, x] * pbx[b, y] * s_x[x] * s_x[y] / (4 * m.rho_b[b])
                        total += wx[x] * wx[y] * d1 * d2 * core
                out[b, a, a2] = total
    return out
