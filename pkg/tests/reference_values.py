"""Published reference numbers used as test targets (two significant digits)."""

# five largest element eigenvalues, ascending, E_Y=1, nu=0.4999999
LARGEST_EIGS = {
    ("regular", "sh15"): (6.3e-1, 8.8e-1, 1.9e0, 4.5e1, 4.2e6),
    ("regular", "psh12"): (4.3e-1, 8.2e-1, 8.4e-1, 2.8e0, 4.2e6),
    ("regular", "sh9_stab"): (7.8e-1, 1.2e0, 1.3e0, 4.6e0, 4.2e6),
    ("regular", "sh11_stab"): (9.0e-1, 1.3e0, 1.5e0, 4.6e0, 4.2e6),
    ("nonconvex", "sh15"): (5.3e-1, 1.5e0, 6.6e0, 1.8e1, 6.7e6),
    ("nonconvex", "psh12"): (3.6e-1, 1.3e0, 2.0e0, 5.1e0, 6.7e6),
    ("nonconvex", "sh9_stab"): (5.9e-1, 1.8e0, 2.1e0, 9.9e0, 6.7e6),
    ("nonconvex", "sh11_stab"): (7.9e-1, 1.8e0, 4.9e0, 9.9e0, 6.7e6),
}

# normalized thick-cantilever tip deflection on N x N meshes, N = 1, 2, 4, 8, 16
THICK_BEAM_LEVELS = (1, 2, 4, 8, 16)
THICK_BEAM_TIP = {
    "sh15": (0.4536, 0.8236, 0.9610, 0.9917, 0.9982),
    "psh12": (1.6185, 1.0665, 1.0133, 1.0030, 1.0007),
    "sh9_stab": (0.4798, 0.8668, 0.9787, 0.9971, 0.9997),
    "sh11_stab": (0.4778, 0.8612, 0.9770, 0.9966, 0.9996),
}

CYLINDER_HYDROSTATIC = 4166.528
