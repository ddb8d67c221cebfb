"""
Energy expansion in the mass parameter, transition frequencies, the first
nuclear correction, and a numerical check of the leading-order quasimode.

Molecular levels expand as E0 + eps^2 E2 + eps^3 E3 + ..., where E2 is an
eigenvalue of the normal-form Hamiltonian and the half-integer orders below
3 vanish.  E3 has a nuclear part <f0, S3 f0> computable from the surface and
an electronic part that needs the electronic wavefunction; the latter is
accepted as an input but never invented.

The quasimode check works in the scalar-surface model (trivial electronic
factor), where the Hamiltonian is

    H_sc = -(eps^4/2) d^2/dW^2 - (eps^3/2) d^2/dZ^2 + E1(eps, W, Z)

and the trial state is F(W/eps^d1) F(Z/eps^d2) f0(W/eps, Z/sqrt(eps)).
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicHermiteSpline
from scipy.stats import linregress

from .nf_solver import (coefficient_grid, hermite_functions, monomial_matrix, normal_form_spectrum,
                        parity_of, reduced_resolvent_apply)
from .surface import evaluate_nf_potential
from .units import hartree_to_wavenumber

DEFAULT_EPSILONS = (0.2, 0.15, 0.1, 0.07, 0.05)
DELTA1_WINDOW = (2.0 / 3.0, 1.0)
DELTA2_WINDOW = (1.0 / 3.0, 0.5)
CUTOFF_TABLE_STEP = 1e-4


class ScanUnresolved(RuntimeError):
    """The residual grid is too coarse: refining it changes the answer."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class OutOfWindow(ValueError):
    pass


class SymmetryViolation(ValueError):
    pass


# -- energy bookkeeping ---------------------------------------------------------

@dataclass(frozen=True)
class ExpansionReport:
    """Provenance of one molecular level through order eps^2 (or eps^3)."""

    level_index: int
    e0: float
    epsilon: float
    e2: float
    e3_scalar: float | None = None
    e3_electronic: float | None = None
    dropped_kinetic_factor: float | None = None
    # orders 1/2, 1, 3/2 are identically zero
    vanishing_orders: tuple = (("1/2", 0.0), ("1", 0.0), ("3/2", 0.0))

    @property
    def e3(self):
        """Full E3, or None unless both parts are known."""
        if self.e3_scalar is None or self.e3_electronic is None:
            return None
        return self.e3_scalar + self.e3_electronic

    @property
    def energy_total(self):
        out = self.e0 + self.epsilon ** 2 * self.e2
        if self.e3 is not None:
            out += self.epsilon ** 3 * self.e3
        return out


def leading_energy(e0, epsilon, s, level, e3_scalar=None, e3_electronic=None, mu=None, nu=None):
    """E0 + eps^2 E2 for eigenvalue ``level`` of ``s``."""
    if not 0 <= level < s.k:
        raise IndexError(f"level {level} not among the {s.k} computed levels")
    dropped = None
    if mu is not None and nu is not None:
        dropped = epsilon * nu / (2.0 * mu)
    return ExpansionReport(level, float(e0), float(epsilon), float(s.eigenvalues[level]),
                           e3_scalar, e3_electronic, dropped)


@dataclass(frozen=True)
class Transition:
    lower: int
    upper: int
    gap_hartree: float
    gap_wavenumber: float
    parity: int  # z-parity of the upper level


def transition_frequencies(s, epsilon, upto=None):
    """Gaps eps^2 (E2[n] - E2[0]) for n = 1 .. upto-1, in Hartree and cm^-1.

    Meaningful in cm^-1 when the normal form carries atomic units, i.e. after
    the full conversion chain.
    """
    upto = s.k if upto is None else upto
    if upto < 2 or upto > s.k:
        raise ValueError(f"upto must lie in [2, {s.k}]")
    out = []
    for n in range(1, upto):
        gap = epsilon ** 2 * (s.eigenvalues[n] - s.eigenvalues[0])
        out.append(Transition(0, n, float(gap), hartree_to_wavenumber(float(gap)), parity_of(s, n)))
    return out


def stretch_pair(transitions):
    """The lowest symmetric (+1) and asymmetric (-1) excitations."""
    sym = next((t for t in transitions if t.parity == 1), None)
    asym = next((t for t in transitions if t.parity == -1), None)
    if sym is None or asym is None:
        raise ValueError("need at least one excitation of each z-parity; raise `upto`")
    return sym, asym


def _check_cubic(s3):
    for (alpha, k), _ in s3.items():
        if k % 2:
            raise SymmetryViolation(f"odd power z^{k} breaks the Z -> -Z symmetry")
        # alpha + k/2 < 3 arises from explicit eps-dependence of the remainder
        if alpha < 0 or k < 0 or alpha + k // 2 > 3:
            raise ValueError(f"monomial w^{alpha} z^{k} lies beyond order 3")


def first_correction(s, level, s3):
    """Nuclear part of E3 and the first correction f1_perp to the eigenvector.

    ``s3`` maps (alpha, k) to the coefficient of w^alpha z^k, with k even and
    alpha + k/2 <= 3 (equality for a purely spatial remainder; lower
    powers enter through explicit eps-dependence of the surface).  Returns (<f0, S3 f0>, f1_perp) where
    f1_perp = -r(E2) (S3 f0)_perp in basis coefficients.
    """
    _check_cubic(s3)
    b = s.basis
    if b.center_w != 0:
        raise ValueError("basis must be centred at w = 0")
    f0 = s.vectors[:, level]
    if not s3 or all(v == 0 for v in s3.values()):
        return 0.0, np.zeros_like(f0)
    S = sum(coef * monomial_matrix(b, alpha, k) for (alpha, k), coef in s3.items())
    g = S @ f0
    return float(f0 @ g), -reduced_resolvent_apply(s, level, g)


@functools.lru_cache(maxsize=None)
def series_orders_ledger():
    """Which orders of the energy expansion this package computes.

    Returns a tuple of (order, status, detail) triples.
    """
    return (
        ("0", "implemented", "E_0 = E0, the surface minimum"),
        ("1/2", "vanishes identically", "E_1/2 = 0"),
        ("1", "vanishes identically", "E_1 = 0"),
        ("3/2", "vanishes identically", "E_3/2 = 0"),
        ("2", "implemented", "eigenvalue of the normal-form Hamiltonian"),
        ("5/2", "vanishes identically", "E_5/2 = 0; the first non-zero correction enters at order 3"),
        ("3 (nuclear)", "implemented", "<f0, S3 f0> by ladder-operator matrix elements"),
        ("3 (electronic)", "requires electronic input",
         "-1/2 <Phi, d^2 Phi/dZ^2>(0,0); accepted as a user-supplied constant"),
        (">= 7/2", "out of scope", "requires the electronic reduced resolvent"),
    )


# -- cutoff -----------------------------------------------------------------------

def _bump(t):
    t = np.asarray(t, dtype=float)
    u = (t - 1.0) * (2.0 - t)
    inside = u > 0
    out = np.zeros_like(t)
    out[inside] = np.exp(-1.0 / u[inside])
    return out


def _bump_derivative(t):
    t = np.asarray(t, dtype=float)
    u = (t - 1.0) * (2.0 - t)
    inside = u > 0
    out = np.zeros_like(t)
    ui = u[inside]
    out[inside] = np.exp(-1.0 / ui) * (3.0 - 2.0 * t[inside]) / (ui * ui)
    return out


@functools.lru_cache(maxsize=1)
def _cutoff_table():
    # cumulative integral of the bump on a 1e-4 table, 8-point Gauss per cell
    t = np.linspace(1.0, 2.0, int(round(1.0 / CUTOFF_TABLE_STEP)) + 1)
    x, wts = np.polynomial.legendre.leggauss(8)
    h = t[1] - t[0]
    nodes = t[:-1, None] + 0.5 * h * (x[None, :] + 1.0)
    cells = 0.5 * h * (_bump(nodes) @ wts)
    G = np.concatenate([[0.0], np.cumsum(cells)])
    norm = G[-1]
    return CubicHermiteSpline(t, G / norm, _bump(t) / norm), norm


def cutoff(x):
    """Smooth even cutoff: 1 on [-1, 1], 0 outside [-2, 2], monotone between."""
    spline, _ = _cutoff_table()
    ax = np.abs(np.asarray(x, dtype=float))
    out = np.where(ax <= 1.0, 1.0, 0.0)
    mid = (ax > 1.0) & (ax < 2.0)
    out[mid] = 1.0 - spline(ax[mid])
    return out


def cutoff_derivatives(x):
    """(F, F', F'') with the derivatives in closed form."""
    _, norm = _cutoff_table()
    x = np.asarray(x, dtype=float)
    ax = np.abs(x)
    return cutoff(x), -np.sign(x) * _bump(ax) / norm, -_bump_derivative(ax) / norm


# -- quasimode residual scan -------------------------------------------------------

@dataclass(frozen=True)
class QuasimodeScan:
    epsilon_list: tuple
    delta1: float
    delta2: float
    residual_ratios: np.ndarray
    fitted_slope: float
    slope_stderr: float
    level: int
    e2: float
    norms: np.ndarray  # physical ||Psi_Q||
    norm_corrections: np.ndarray  # 1 - ||Psi_Q|| / eps^(3/4)
    hermiticity_defects: np.ndarray
    grid_spacing: float
    out_of_window: bool = False
    resolution_changes: np.ndarray = field(default=None, repr=False)


def _check_remainder(remainder):
    for (alpha, k), _ in remainder.items():
        if alpha < 0 or k < 0 or alpha + 0.5 * k < 3:
            raise ValueError(f"remainder monomial W^{alpha} Z^{k} is below order 3")


def _residual_on_grid(s, level, c, remainder, eps, delta1, delta2, h, use_cutoff):
    """Scaled residual pieces for one eps on a uniform (w, z) grid of spacing h.

    Returns (||res||/||Psi||, ||Psi||_wz, ||f||_wz, hermiticity defect), where
    res = (H_sc - E0 - eps^2 E2) Psi / eps^2 in scaled variables.
    """
    b = s.basis
    sw, sz = eps ** (1.0 - delta1), eps ** (0.5 - delta2)  # A(w) = F(sw w), B(z) = F(sz z)
    if use_cutoff:
        Lw, Lz = 3.0 / sw, 3.0 / sz
    else:
        Lw = Lz = 1.5 * max(math.sqrt((2 * b.n_w + 1) / b.omega_w),
                            math.sqrt((2 * b.n_z + 1) / b.omega_z))
    w = h * np.arange(-math.floor(Lw / h), math.floor(Lw / h) + 1)
    z = h * np.arange(-math.floor(Lz / h), math.floor(Lz / h) + 1)

    C = coefficient_grid(s, level)
    Pw, Dw, D2w = hermite_functions(w, b.omega_w, b.n_w)
    Pz, Dz, D2z = hermite_functions(z, b.omega_z, b.n_z)
    f = Pw.T @ C @ Pz
    fw, fz = Dw.T @ C @ Pz, Pw.T @ C @ Dz
    lap = D2w.T @ C @ Pz + Pw.T @ C @ D2z

    if use_cutoff:
        A, A1, A2 = cutoff_derivatives(sw * w)
        B, B1, B2 = cutoff_derivatives(sz * z)
        A1, A2, B1, B2 = sw * A1, sw * sw * A2, sz * B1, sz * sz * B2
    else:
        A, A1, A2 = np.ones_like(w), np.zeros_like(w), np.zeros_like(w)
        B, B1, B2 = np.ones_like(z), np.zeros_like(z), np.zeros_like(z)
    A, A1, A2 = A[:, None], A1[:, None], A2[:, None]
    B, B1, B2 = B[None, :], B1[None, :], B2[None, :]

    W, Z = np.meshgrid(w, z, indexing="ij")
    V = evaluate_nf_potential(c, W, Z) - s.eigenvalues[level]
    for (alpha, k), coef in remainder.items():
        V = V + coef * eps ** (alpha + 0.5 * k - 2.0) * W ** alpha * Z ** k

    psi = A * B * f
    res = (A * B * (-0.5 * lap) + V * psi
           - 0.5 * (A2 * B * f + 2.0 * A1 * B * fw + A * B2 * f + 2.0 * A * B1 * fz))
    dA = h * h
    n_psi = math.sqrt(np.sum(psi * psi) * dA)
    n_res = math.sqrt(np.sum(res * res) * dA)
    n_f = math.sqrt(np.sum(f * f) * dA)
    # <Psi, (H - E) Psi> two ways: operator applied, and integrated by parts
    q_apply = np.sum(psi * res) * dA
    gw, gz = A1 * B * f + A * B * fw, A * B1 * f + A * B * fz
    kin, pot = 0.5 * np.sum(gw * gw + gz * gz) * dA, np.sum(V * psi * psi) * dA
    herm = abs(q_apply - kin - pot) / (kin + np.sum(np.abs(V) * psi * psi) * dA)
    return n_res / n_psi, n_psi, n_f, herm


def quasimode_residual_scan(c, remainder=None, level=0, epsilon_list=DEFAULT_EPSILONS,
                            delta1=11.0 / 14.0, delta2=5.0 / 14.0, n_w=40, n_z=40,
                            spacing=1.0 / 40.0, allow_out_of_window=False, use_cutoff=True,
                            resolution_tol=1e-3, solution=None):
    """Residual ratio ||(H_sc - E0 - eps^2 E2) Psi_Q|| / ||Psi_Q|| over an eps sweep.

    Parameters
    ----------
    c : NormalFormCoefficients
        Normal-form coefficients (kinetic terms eps^4/2 and eps^3/2).
    remainder : dict, optional
        {(alpha, k): C} adds C (W - W0)^alpha Z^k to the surface; every
        monomial must have alpha + k/2 >= 3.
    spacing : float
        Grid spacing in the scaled variables w, z; the physical spacings are
        ``spacing * eps`` and ``spacing * sqrt(eps)``.
    resolution_tol : float
        Each ratio is recomputed at twice the spacing; a relative change
        above this raises ScanUnresolved.

    Returns
    -------
    QuasimodeScan
        Ratios with the log-log slope against eps and its standard error.
    """
    remainder = dict(remainder or {})
    _check_remainder(remainder)
    eps_list = tuple(float(e) for e in epsilon_list)
    if len(eps_list) < 4:
        raise ValueError(">= 4 points required in epsilon_list")
    if not all(0 < e < 1 for e in eps_list) or any(a <= b for a, b in zip(eps_list, eps_list[1:])):
        raise ValueError("epsilon_list must be strictly decreasing within (0, 1)")
    inside = (DELTA1_WINDOW[0] < delta1 < DELTA1_WINDOW[1]
              and DELTA2_WINDOW[0] < delta2 < DELTA2_WINDOW[1])
    if not inside and not allow_out_of_window:
        raise OutOfWindow(f"(delta1, delta2) = ({delta1:g}, {delta2:g}) outside "
                          f"{DELTA1_WINDOW} x {DELTA2_WINDOW}")
    if not 0 < spacing <= 0.1:
        raise ValueError("spacing must lie in (0, 0.1]")

    s = solution if solution is not None else normal_form_spectrum(c, n_w, n_z, k=level + 2)
    ratios, norms, corr, herm, changes = [], [], [], [], []
    for eps in eps_list:
        r, n_psi, n_f, hd = _residual_on_grid(s, level, c, remainder, eps, delta1, delta2,
                                              spacing, use_cutoff)
        r2, *_ = _residual_on_grid(s, level, c, remainder, eps, delta1, delta2,
                                   2 * spacing, use_cutoff)
        change = abs(r - r2) / r if r > 0 else 0.0
        if change > resolution_tol:
            raise ScanUnresolved(f"eps = {eps:g}: ratio changes by {change:.2e} when the grid "
                                 f"spacing doubles", {"epsilon": eps, "ratio": r, "ratio_coarse": r2,
                                                      "spacing": spacing})
        ratios.append(eps * eps * r)
        norms.append(eps ** 0.75 * n_psi / n_f)
        corr.append(1.0 - n_psi / n_f)
        herm.append(hd)
        changes.append(change)

    ratios = np.array(ratios)
    if not np.all(np.isfinite(ratios) & (ratios > 0)):
        slope, stderr = math.nan, math.nan
    else:
        fit = linregress(np.log(eps_list), np.log(ratios))
        slope, stderr = float(fit.slope), float(fit.stderr)
    return QuasimodeScan(eps_list, float(delta1), float(delta2), ratios, slope, stderr, level,
                         float(s.eigenvalues[level]), np.array(norms), np.array(corr),
                         np.array(herm), float(spacing), not inside, np.array(changes))
