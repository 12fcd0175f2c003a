"""Isotropic linear-elastic moduli in Voigt form.

Voigt ordering is (xx, yy, xy) for stress and (xx, yy, 2xy) for strain, so
that ``sigma @ eps`` is the work density without extra shear factors.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

PLANE_STRAIN = "plane_strain"
PLANE_STRESS = "plane_stress"


@dataclass(frozen=True)
class MaterialLaw:
    E_Y: float
    nu: float
    regime: str = PLANE_STRAIN
    C: np.ndarray = field(repr=False, compare=False, default=None)
    Cinv: np.ndarray = field(repr=False, compare=False, default=None)

    @property
    def lam(self) -> float:
        """First Lamé parameter (3D definition)."""
        return self.E_Y * self.nu / ((1.0 + self.nu) * (1.0 - 2.0 * self.nu))

    @property
    def mu(self) -> float:
        return self.E_Y / (2.0 * (1.0 + self.nu))

    def scaled(self, s: float) -> "MaterialLaw":
        return make_material(self.E_Y * s, self.nu, self.regime)


def make_material(E_Y: float, nu: float, regime: str = PLANE_STRAIN) -> MaterialLaw:
    """Build a :class:`MaterialLaw` with its moduli matrix and inverse.

    Parameters
    ----------
    E_Y : float
        Young's modulus, must be positive.
    nu : float
        Poisson ratio in (-1, 0.5).
    regime : {"plane_strain", "plane_stress"}
    """
    if not E_Y > 0:
        raise ValueError(f"Young's modulus must be positive, got {E_Y}")
    if not -1.0 < nu < 0.5:
        raise ValueError(f"Poisson ratio must lie in (-1, 0.5), got {nu}")
    if regime == PLANE_STRAIN:
        c = E_Y / ((1.0 + nu) * (1.0 - 2.0 * nu))
        C = c * np.array([[1.0 - nu, nu, 0.0],
                          [nu, 1.0 - nu, 0.0],
                          [0.0, 0.0, 0.5 * (1.0 - 2.0 * nu)]])
        # closed-form compliance; avoids inverting an ill-conditioned C near nu=0.5
        Cinv = (1.0 + nu) / E_Y * np.array([[1.0 - nu, -nu, 0.0],
                                           [-nu, 1.0 - nu, 0.0],
                                           [0.0, 0.0, 2.0]])
    elif regime == PLANE_STRESS:
        c = E_Y / (1.0 - nu * nu)
        C = c * np.array([[1.0, nu, 0.0],
                          [nu, 1.0, 0.0],
                          [0.0, 0.0, 0.5 * (1.0 - nu)]])
        Cinv = 1.0 / E_Y * np.array([[1.0, -nu, 0.0],
                                     [-nu, 1.0, 0.0],
                                     [0.0, 0.0, 2.0 * (1.0 + nu)]])
    else:
        raise ValueError(f"unknown regime {regime!r}")
    C.setflags(write=False)
    Cinv.setflags(write=False)
    return MaterialLaw(float(E_Y), float(nu), regime, C, Cinv)


def hydrostatic_from_voigt(sigma, law: MaterialLaw):
    """One third of the trace of the full 3D stress.

    Under plane strain the out-of-plane stress ``nu*(sxx+syy)`` is included.
    ``sigma`` may be a single Voigt vector or an array with Voigt entries in
    its last axis.
    """
    sigma = np.asarray(sigma, dtype=float)
    tr = sigma[..., 0] + sigma[..., 1]
    if law.regime == PLANE_STRAIN:
        return (1.0 + law.nu) * tr / 3.0
    return tr / 3.0
