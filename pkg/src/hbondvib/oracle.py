"""
Finite-difference reference solver for the normal-form Hamiltonian.

Second-order five-point Laplacian on a rectangle with Dirichlet walls,
smallest eigenvalues by shift-invert Lanczos (ARPACK) about the grid
minimum of the potential.  Two spacings h, h/2 combine by Richardson
extrapolation into an O(h^4) estimate.  This path shares nothing with the
oscillator-basis solver beyond the coefficient type.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as sla

from .surface import evaluate_nf_potential

MAX_POINTS = 2_500_000


class GridTooLarge(MemoryError):
    pass


class AmbiguousLevelPairing(ValueError):
    pass


def _count(lo, hi, h):
    steps = (hi - lo) / h
    n = int(round(steps))
    if abs(steps - n) > 1e-9 * max(1.0, steps):
        raise ValueError(f"interval [{lo}, {hi}] is not a multiple of spacing {h}")
    return n - 1


@dataclass(frozen=True)
class FdGrid:
    w_min: float
    w_max: float
    z_min: float
    z_max: float
    h_w: float
    h_z: float

    def __post_init__(self):
        if not (self.w_min < self.w_max and self.z_min < self.z_max):
            raise ValueError("grid bounds must be ordered")
        if not (self.h_w > 0 and self.h_z > 0):
            raise ValueError("spacings must be positive")
        _count(self.w_min, self.w_max, self.h_w)
        _count(self.z_min, self.z_max, self.h_z)

    @classmethod
    def square(cls, half_width, h):
        return cls(-half_width, half_width, -half_width, half_width, h, h)

    @property
    def shape(self):
        return (_count(self.w_min, self.w_max, self.h_w), _count(self.z_min, self.z_max, self.h_z))

    @property
    def n_points(self):
        nw, nz = self.shape
        return nw * nz

    @property
    def w(self):
        return self.w_min + self.h_w * np.arange(1, self.shape[0] + 1)

    @property
    def z(self):
        return self.z_min + self.h_z * np.arange(1, self.shape[1] + 1)

    def refined(self):
        return FdGrid(self.w_min, self.w_max, self.z_min, self.z_max, self.h_w / 2, self.h_z / 2)

    def z_symmetric(self):
        return abs(self.z_min + self.z_max) <= 1e-12 * (self.z_max - self.z_min)


@dataclass(frozen=True)
class FdSpectrum:
    eigenvalues: np.ndarray
    parities: np.ndarray  # +1, -1, or 0 when not resolved
    grid: FdGrid


def _second_difference(n, h):
    main = np.full(n, -2.0)
    off = np.ones(n - 1)
    return sp.diags([off, main, off], [-1, 0, 1]) / (h * h)


def fd_hamiltonian(c, g, kinetic=(0.5, 0.5)):
    """Sparse FD matrix of -k_w d^2/dw^2 - k_z d^2/dz^2 + E_NF on grid ``g``."""
    nw, nz = g.shape
    if g.n_points > MAX_POINTS:
        raise GridTooLarge(f"{g.n_points} grid points exceed the limit {MAX_POINTS}")
    W, Z = np.meshgrid(g.w, g.z, indexing="ij")
    V = evaluate_nf_potential(c, W, Z)
    H = (-kinetic[0] * sp.kron(_second_difference(nw, g.h_w), sp.identity(nz))
         - kinetic[1] * sp.kron(sp.identity(nw), _second_difference(nz, g.h_z))
         + sp.diags(V.ravel()))
    return H.tocsc(), V


def fd_solve(c, g, k=5, kinetic=(0.5, 0.5)):
    """Lowest ``k`` eigenvalues of the FD discretization, ascending."""
    H, V = fd_hamiltonian(c, g, kinetic)
    if k >= g.n_points - 1:
        raise ValueError("k must be much smaller than the number of grid points")
    v0 = np.ones(g.n_points) / math.sqrt(g.n_points)
    lam, vec = sla.eigsh(H, k=k, sigma=float(V.min()), which="LM", v0=v0)
    order = np.argsort(lam)
    lam, vec = lam[order], vec[:, order]
    par = np.zeros(k, dtype=int)
    if g.z_symmetric():
        flip = lambda V: V.reshape(g.shape + (-1,))[:, ::-1].reshape(V.shape)
        # inside a degenerate cluster eigsh returns arbitrary mixtures; rotate
        # the cluster onto eigenvectors of the z-flip
        start = 0
        for i in range(1, k + 1):
            if i == k or lam[i] - lam[i - 1] > 1e-8 * max(1.0, abs(lam[i])):
                if i - start > 1:
                    V = vec[:, start:i]
                    _, R = np.linalg.eigh(V.T @ flip(V))
                    vec[:, start:i] = V @ R
                start = i
        for i in range(k):
            f = vec[:, i].reshape(g.shape)
            overlap = np.sum(f * f[:, ::-1]) / np.sum(f * f)
            if abs(abs(overlap) - 1.0) < 1e-6:
                par[i] = 1 if overlap > 0 else -1
    return FdSpectrum(lam, par, g)


def richardson_extrapolate(e_h, e_h2):
    """Combine O(h^2) results at spacings h and h/2.

    Returns (extrapolated value, error estimate |e_h2 - e_h| / 3).
    """
    return (4.0 * e_h2 - e_h) / 3.0, abs(e_h2 - e_h) / 3.0


def extrapolate_levels(coarse, fine):
    """Pair levels of two spacings by index, checking parity and gap separation."""
    k = min(len(coarse.eigenvalues), len(fine.eigenvalues))
    ef = fine.eigenvalues
    vals, errs = np.empty(k), np.empty(k)
    for i in range(k):
        pc, pf = coarse.parities[i], fine.parities[i]
        if pc and pf and pc != pf:
            raise AmbiguousLevelPairing(f"level {i}: parity {pc} at h, {pf} at h/2")
        shift = abs(fine.eigenvalues[i] - coarse.eigenvalues[i])
        gaps = [abs(ef[i] - ef[j]) for j in (i - 1, i + 1) if 0 <= j < len(ef)]
        # a same-parity neighbour closer than the discretization shift is ambiguous
        for j in (i - 1, i + 1):
            if 0 <= j < len(ef) and fine.parities[j] == pf and abs(ef[i] - ef[j]) <= shift:
                raise AmbiguousLevelPairing(f"level {i}: gap {min(gaps):.3g} below FD shift {shift:.3g}")
        vals[i], errs[i] = richardson_extrapolate(coarse.eigenvalues[i], fine.eigenvalues[i])
    return vals, errs


def fd_reference(c, grid, k=5, kinetic=(0.5, 0.5)):
    """Richardson-extrapolated lowest ``k`` levels from ``grid`` and its refinement.

    Returns (values, error estimates, coarse spectrum, fine spectrum).
    """
    extra = k + 2
    coarse = fd_solve(c, grid, extra, kinetic)
    fine = fd_solve(c, grid.refined(), extra, kinetic)
    vals, errs = extrapolate_levels(coarse, fine)
    return vals[:k], errs[:k], coarse, fine
