"""
Jacobi coordinates and mass scaling for a collinear A-C-B triatomic.

With heavy masses m_A = m_B = eps^-4 mu and light mass m_C = eps^-3 nu,
the internal Hamiltonian (centre of mass removed) is

    -(eps^4/mu) d^2/dW^2 - (eps^3/(2 nu)) (1 + eps nu/(2 mu)) d^2/dZ^2 + E(W, Z).

The factor (1 + eps nu / 2 mu) is dropped throughout; its size is reported
by :func:`dropped_kinetic_factor`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .units import Dimension, to_atomic


@dataclass(frozen=True)
class NuclearConfiguration:
    """Collinear positions and masses (electron-mass units) of A, B, C."""

    x_A: float
    x_B: float
    x_C: float
    m_A: float
    m_B: float
    m_C: float

    def __post_init__(self):
        if min(self.m_A, self.m_B, self.m_C) <= 0:
            raise ValueError("masses must be positive")
        if abs(self.m_A - self.m_B) > 1e-12 * max(self.m_A, self.m_B):
            raise ValueError("heavy masses must be equal (symmetric case)")


@dataclass(frozen=True)
class JacobiFrame:
    R: float
    W: float
    Z: float
    mu: float
    nu: float
    epsilon: float

    def __post_init__(self):
        if not (self.mu > 0 and self.nu > 0 and 0 < self.epsilon < 1):
            raise ValueError("need mu > 0, nu > 0 and 0 < epsilon < 1")
        if not (math.isfinite(self.W) and math.isfinite(self.Z)):
            raise ValueError("W and Z must be finite")


def jacobi_from_cartesian(c):
    """Return (R, W, Z): centre of mass, B-A separation, C offset from AB midpoint."""
    M = c.m_A + c.m_B + c.m_C
    R = (c.m_A * c.x_A + c.m_B * c.x_B + c.m_C * c.x_C) / M
    return R, c.x_B - c.x_A, c.x_C - 0.5 * (c.x_A + c.x_B)


def cartesian_from_jacobi(R, W, Z, m_A, m_C):
    """Inverse of :func:`jacobi_from_cartesian` for m_B = m_A."""
    M = 2.0 * m_A + m_C
    x_AB = R - m_C * Z / M
    return x_AB - 0.5 * W, x_AB + 0.5 * W, x_AB + Z


def jacobi_frame(c, epsilon):
    R, W, Z = jacobi_from_cartesian(c)
    mu, nu = mass_parameters(c.m_A, c.m_C, epsilon)
    return JacobiFrame(R, W, Z, mu, nu, epsilon)


def mass_parameters(m_A, m_C, epsilon):
    """mu = m_A eps^4 and nu = m_C eps^3."""
    if m_A <= 0 or m_C <= 0:
        raise ValueError("masses must be positive")
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    return m_A * epsilon ** 4, m_C * epsilon ** 3


def masses_from_parameters(mu, nu, epsilon):
    return mu * epsilon ** -4, nu * epsilon ** -3


def dropped_kinetic_factor(mu, nu, epsilon):
    """The neglected relative correction eps nu / (2 mu) to the Z kinetic term."""
    return epsilon * nu / (2.0 * mu)


def kinetic_prefactors(mu, nu):
    """Coefficients (k_w, k_z) of -d^2/dw^2 and -d^2/dz^2 in eps^2-scaled units."""
    return 1.0 / mu, 1.0 / (2.0 * nu)


def rescale_coefficients_to_standard_form(raw, mu, nu):
    """Change variables W = sqrt(2/mu) W', Z = Z'/sqrt(nu).

    Afterwards the kinetic terms read -(eps^4/2) d^2/dW'^2 - (eps^3/2) d^2/dZ'^2,
    i.e. the mu = 2, nu = 1 form.  Energies are untouched.
    """
    if mu <= 0 or nu <= 0:
        raise ValueError("mu and nu must be positive")
    s = math.sqrt(2.0 / mu)
    return replace(raw, a1=raw.a1 * s * s, a2=raw.a2 / nu, a3=raw.a3 * s / nu,
                   a4=raw.a4 / (nu * nu), W0=raw.W0 / s)


def coefficients_to_atomic(c, units):
    """Express surface coefficients given in ``units`` in Hartree and Bohr."""
    return replace(c, a1=to_atomic(c.a1, Dimension.ENERGY_PER_LENGTH2, units),
                   a2=to_atomic(c.a2, Dimension.ENERGY_PER_LENGTH2, units),
                   a3=to_atomic(c.a3, Dimension.ENERGY_PER_LENGTH3, units),
                   a4=to_atomic(c.a4, Dimension.ENERGY_PER_LENGTH4, units),
                   E0=to_atomic(c.E0, Dimension.ENERGY, units),
                   W0=to_atomic(c.W0, Dimension.LENGTH, units))


def normal_form_from_physical(c, units, epsilon, mu, nu, skip_rescaling=False):
    """Full conversion chain from a fitted surface to normal-form coefficients.

    Units to atomic, ``a2`` re-factored at ``epsilon``, then the mass
    rescaling.  With ``skip_rescaling`` the atomic-unit coefficients are used
    as if mu = 2 and nu = 1, which is the convention sensitivity run.

    The eigenvalues E2 of the returned model give molecular energies
    E0 + epsilon^2 E2 in Hartree.
    """
    atomic = coefficients_to_atomic(c, units).refactor(epsilon)
    if skip_rescaling:
        return atomic
    return rescale_coefficients_to_standard_form(atomic, mu, nu)
