"""
Rayleigh-Ritz solver for the normal-form Hamiltonian

    H_NF = -1/2 d^2/dw^2 - 1/2 d^2/dz^2 + a1 w^2 + (a2 - a3 w) z^2 + a4 z^4

in a product basis of harmonic-oscillator eigenfunctions.  All matrix
elements are polynomial in the ladder operators and are built exactly.
Basis index ordering is ``i_w * n_z + i_z`` (``np.kron`` convention).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as la
from scipy.optimize import minimize_scalar

from .surface import classify_stability, evaluate_nf_potential, Stability

DENSE_LIMIT = 4096
SOLVER_TOL = 1e-10
GAP_TOL = 1e-8


class UnboundedCoefficients(ValueError):
    pass


class SolverDiverged(RuntimeError):
    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals


class DegenerateLevel(ValueError):
    pass


class ParityUnresolved(ValueError):
    pass


@dataclass(frozen=True)
class SpectralBasis:
    n_w: int
    n_z: int
    omega_w: float
    omega_z: float
    center_w: float = 0.0

    def __post_init__(self):
        if self.n_w < 2 or self.n_z < 2:
            raise ValueError("need at least 2 modes per direction")
        if not (self.omega_w > 0 and self.omega_z > 0):
            raise ValueError("oscillator frequencies must be positive")

    @property
    def size(self):
        return self.n_w * self.n_z

    def z_parity_of_index(self):
        """+1/-1 z-parity of each product basis function."""
        pz = 1 - 2 * (np.arange(self.n_z) % 2)
        return np.tile(pz, self.n_w)


def gaussian_energy(omega, a2, a4):
    """<H_z> for the normalized Gaussian exp(-omega z^2/2) with V = a2 z^2 + a4 z^4."""
    return omega / 4.0 + a2 / (2.0 * omega) + 3.0 * a4 / (4.0 * omega * omega)


def optimal_omega_z(a2, a4):
    """Width of the best Gaussian trial state for -1/2 d^2/dz^2 + a2 z^2 + a4 z^4."""
    if a4 == 0:
        if a2 <= 0:
            raise UnboundedCoefficients("no confinement in z")
        return math.sqrt(2.0 * a2)
    grid = np.geomspace(1e-3, 1e3, 50)
    vals = gaussian_energy(grid, a2, a4)
    i = int(np.clip(np.argmin(vals), 1, len(grid) - 2))
    res = minimize_scalar(gaussian_energy, bracket=(grid[i - 1], grid[i], grid[i + 1]),
                          args=(a2, a4), method="golden", tol=1e-12)
    return float(res.x)


def build_basis(c, n_w, n_z, stability_tol=1e-9):
    """Product basis with omega_w = sqrt(2 a1) and a variationally tuned omega_z."""
    st = classify_stability(c, stability_tol)
    if st.variant is Stability.UNBOUNDED:
        raise UnboundedCoefficients(f"coefficients are unbounded below (margin {st.margin:.3g})")
    return SpectralBasis(int(n_w), int(n_z), math.sqrt(2.0 * c.a1), optimal_omega_z(c.a2, c.a4))


# -- one-dimensional oscillator algebra -----------------------------------------

def position_matrix(n, omega):
    k = np.sqrt(np.arange(1, n) / (2.0 * omega))
    return np.diag(k, 1) + np.diag(k, -1)


def position_power(n, omega, p):
    """Exact n x n matrix of x**p in the oscillator basis."""
    if p == 0:
        return np.eye(n)
    x = position_matrix(n + p, omega)
    return np.linalg.matrix_power(x, p)[:n, :n]


def kinetic_matrix(n, omega):
    """-1/2 d^2/dx^2 = omega (n + 1/2) - omega^2 x^2 / 2."""
    return np.diag(omega * (np.arange(n) + 0.5)) - 0.5 * omega ** 2 * position_power(n, omega, 2)


def hermite_functions(x, omega, n):
    """Values, first and second derivatives of the n lowest oscillator eigenfunctions.

    Returns three arrays of shape ``(n,) + x.shape``.
    """
    x = np.asarray(x, dtype=float)
    y = math.sqrt(omega) * x
    P = np.empty((n + 1,) + x.shape)
    P[0] = (omega / math.pi) ** 0.25 * np.exp(-0.5 * y * y)
    P[1] = math.sqrt(2.0) * y * P[0]
    for k in range(2, n + 1):
        P[k] = math.sqrt(2.0 / k) * y * P[k - 1] - math.sqrt((k - 1) / k) * P[k - 2]
    D = np.empty((n,) + x.shape)
    D[0] = -math.sqrt(omega / 2.0) * P[1]
    for k in range(1, n):
        D[k] = math.sqrt(omega / 2.0) * (math.sqrt(k) * P[k - 1] - math.sqrt(k + 1) * P[k + 1])
    levels = (2 * np.arange(n) + 1).reshape((n,) + (1,) * x.ndim)
    D2 = (omega ** 2 * x * x - omega * levels) * P[:n]
    return P[:n], D, D2


def gram_matrix(b):
    """Overlap matrix of the product basis by Gauss-Hermite quadrature."""
    def one(n, omega):
        t, wts = np.polynomial.hermite.hermgauss(n + 2)
        x = t / math.sqrt(omega)
        P, _, _ = hermite_functions(x, omega, n)
        P = P * np.exp(0.5 * t * t)  # strip the Gaussian carried by the weights
        return (P * wts) @ P.T / math.sqrt(omega)
    return np.kron(one(b.n_w, b.omega_w), one(b.n_z, b.omega_z))


def monomial_matrix(b, pw, pz):
    """Matrix of w**pw z**pz in the product basis."""
    return np.kron(position_power(b.n_w, b.omega_w, pw), position_power(b.n_z, b.omega_z, pz))


def assemble_hamiltonian(c, b):
    """Dense symmetric matrix of H_NF in the basis ``b``."""
    a1, a2, a3, a4 = c.a
    Iw, Iz = np.eye(b.n_w), np.eye(b.n_z)
    with np.errstate(over="ignore", invalid="ignore"):
        hw = kinetic_matrix(b.n_w, b.omega_w) + a1 * position_power(b.n_w, b.omega_w, 2)
        hz = (kinetic_matrix(b.n_z, b.omega_z) + a2 * position_power(b.n_z, b.omega_z, 2)
              + a4 * position_power(b.n_z, b.omega_z, 4))
        H = np.kron(hw, Iz) + np.kron(Iw, hz)
        if a3 != 0:
            H -= a3 * monomial_matrix(b, 1, 2)
    if not np.all(np.isfinite(H)):
        raise OverflowError("non-finite matrix elements")
    return 0.5 * (H + H.T)


# -- eigensolvers ---------------------------------------------------------------

@dataclass(frozen=True)
class EigenSolution:
    eigenvalues: np.ndarray
    vectors: np.ndarray  # columns
    residual_norms: np.ndarray
    basis: SpectralBasis | None = None
    coeffs: object = None
    hamiltonian: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        for name in ("eigenvalues", "vectors", "residual_norms"):
            getattr(self, name).setflags(write=False)

    @property
    def k(self):
        return len(self.eigenvalues)


def _lanczos_shift_invert(H, k, tol, max_iter):
    """Lowest k eigenpairs by Lanczos on (H - sigma)^-1 with full reorthogonalization.

    sigma sits below the spectrum so that H - sigma admits a Cholesky factor.
    The start vector is the normalized all-ones vector.
    """
    n = H.shape[0]
    d = np.diag(H)
    radius = np.max(np.sum(np.abs(H), axis=1) - np.abs(d))
    offset = max(1.0, 1e-3 * radius)
    for _ in range(60):
        sigma = d.min() - offset
        try:
            factor = la.cho_factor(H - sigma * np.eye(n))
            break
        except la.LinAlgError:
            offset *= 2.0
    else:
        raise SolverDiverged("could not find a shift below the spectrum")

    m_max = min(n, max_iter)
    Q = np.zeros((n, m_max))
    alpha, beta = [], []
    q = np.ones(n) / math.sqrt(n)
    best = None
    for j in range(m_max):
        Q[:, j] = q
        u = la.cho_solve(factor, q)
        a = q @ u
        u -= a * q
        if j > 0:
            u -= beta[-1] * Q[:, j - 1]
        for _ in range(2):
            u -= Q[:, :j + 1] @ (Q[:, :j + 1].T @ u)
        alpha.append(a)
        b = np.linalg.norm(u)
        m = j + 1
        if m >= k and (m % 5 == 0 or b < 1e-14 or m == m_max):
            theta, S = la.eigh_tridiagonal(np.array(alpha), np.array(beta))
            top = np.argsort(theta)[::-1][:k]
            lam = sigma + 1.0 / theta[top]
            V = Q[:, :m] @ S[:, top]
            V /= np.linalg.norm(V, axis=0)
            R = np.linalg.norm(H @ V - V * lam, axis=0)
            order = np.argsort(lam)
            best = (lam[order], V[:, order], R[order])
            if np.all(R <= tol):
                return best
        if b < 1e-14:
            # Krylov space exhausted; continue from a deterministic fresh direction
            u = np.cos(np.arange(n) * 0.7 + j)
            for _ in range(2):
                u -= Q[:, :j + 1] @ (Q[:, :j + 1].T @ u)
            b_new = np.linalg.norm(u)
            if b_new < 1e-12:
                break
            q = u / b_new
            beta.append(0.0)
            continue
        beta.append(b)
        q = u / b
    raise SolverDiverged("Lanczos did not converge within the iteration budget",
                         None if best is None else best[2])


def _solve_block(H, k, tol, dense_limit, max_iter):
    n = H.shape[0]
    k = min(k, n)
    if n <= dense_limit:
        lam, V = la.eigh(H, subset_by_index=[0, k - 1])
        return lam, V
    lam, V, _ = _lanczos_shift_invert(H, k, tol, max_iter)
    return lam, V


def solve_eigen(H, k, basis=None, coeffs=None, tol=SOLVER_TOL, dense_limit=DENSE_LIMIT,
                max_iter=2000):
    """Lowest ``k`` eigenpairs of the symmetric matrix ``H``.

    When ``basis`` is given and ``H`` has no couplings between opposite
    z-parity states, the two parity blocks are diagonalized separately;
    every returned vector then has definite z-parity, also inside
    degenerate eigenspaces.
    """
    H = np.asarray(H, dtype=float)
    n = H.shape[0]
    if H.shape != (n, n):
        raise ValueError("H must be square")
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, {n}]")
    blocks = [np.arange(n)]
    if basis is not None:
        par = basis.z_parity_of_index()
        even, odd = np.flatnonzero(par > 0), np.flatnonzero(par < 0)
        if np.max(np.abs(H[np.ix_(even, odd)]), initial=0.0) <= 1e-13:
            blocks = [even, odd]
    lams, vecs = [], []
    for idx in blocks:
        lam, V = _solve_block(H[np.ix_(idx, idx)], k, tol, dense_limit, max_iter)
        full = np.zeros((n, len(lam)))
        full[idx] = V
        lams.append(lam)
        vecs.append(full)
    lam = np.concatenate(lams)
    V = np.hstack(vecs)
    order = np.argsort(lam, kind="stable")[:k]
    lam, V = lam[order], V[:, order]
    # deterministic sign: largest-magnitude coefficient positive
    pivot = np.argmax(np.abs(V), axis=0)
    V = V * np.sign(V[pivot, np.arange(V.shape[1])])
    R = np.linalg.norm(H @ V - V * lam, axis=0)
    if np.any(R > tol):
        raise SolverDiverged(f"eigen-residuals {R.max():.3g} exceed tolerance {tol:g}", R)
    return EigenSolution(lam, V, R, basis, coeffs, H)


def normal_form_spectrum(c, n_w=40, n_z=40, k=10, **kw):
    """Build the basis, assemble H_NF and solve for the lowest ``k`` levels."""
    b = build_basis(c, n_w, n_z)
    H = assemble_hamiltonian(c, b)
    return solve_eigen(H, k, basis=b, coeffs=c, **kw)


# -- operations on solutions ----------------------------------------------------

def _check_nondegenerate(s, level, gap_tol):
    lam = s.eigenvalues
    scale = max(1.0, abs(lam[level]))
    neighbors = []
    if level > 0:
        neighbors.append(lam[level - 1])
    if level + 1 < s.k:
        neighbors.append(lam[level + 1])
    elif s.hamiltonian is not None and level + 1 < s.hamiltonian.shape[0]:
        neighbors.append(la.eigvalsh(s.hamiltonian, subset_by_index=[level + 1, level + 1])[0])
    for e in neighbors:
        if abs(e - lam[level]) <= gap_tol * scale:
            raise DegenerateLevel(f"level {level} is degenerate within {gap_tol:g}")


def reduced_resolvent_apply(s, level, rhs, gap_tol=GAP_TOL):
    """Apply the reduced resolvent of H at eigenvalue ``level`` to ``rhs``.

    Returns x orthogonal to f0 with (H - E) x = rhs - f0 <f0, rhs>, obtained
    from the bordered system [[H - E, f0], [f0^T, 0]].
    """
    if s.hamiltonian is None:
        raise ValueError("solution carries no Hamiltonian matrix")
    _check_nondegenerate(s, level, gap_tol)
    H = s.hamiltonian
    f0 = s.vectors[:, level]
    rhs = np.asarray(rhs, dtype=float)
    rhs_perp = rhs - f0 * (f0 @ rhs)
    n = H.shape[0]
    M = np.empty((n + 1, n + 1))
    M[:n, :n] = H - s.eigenvalues[level] * np.eye(n)
    M[:n, n] = f0
    M[n, :n] = f0
    M[n, n] = 0.0
    sol = la.solve(M, np.append(rhs_perp, 0.0), assume_a="sym")
    x = sol[:n]
    return x - f0 * (f0 @ x)


def coefficient_grid(s, level):
    b = s.basis
    return s.vectors[:, level].reshape(b.n_w, b.n_z)


def evaluate_eigenfunction(s, level, w, z, deriv=(0, 0)):
    """Pointwise values of eigenfunction ``level`` (or a derivative) at (w, z)."""
    b = s.basis
    w, z = np.broadcast_arrays(np.asarray(w, float), np.asarray(z, float))
    Fw = hermite_functions(w.ravel() - b.center_w, b.omega_w, b.n_w)[deriv[0]]
    Fz = hermite_functions(z.ravel(), b.omega_z, b.n_z)[deriv[1]]
    c = coefficient_grid(s, level)
    return np.einsum("ip,ij,jp->p", Fw, c, Fz).reshape(w.shape)


def eigenfunction_on_grid(s, level, w, z, deriv=(0, 0)):
    """Eigenfunction on the tensor grid w x z, shape (len(w), len(z))."""
    b = s.basis
    Fw = hermite_functions(np.asarray(w, float) - b.center_w, b.omega_w, b.n_w)[deriv[0]]
    Fz = hermite_functions(np.asarray(z, float), b.omega_z, b.n_z)[deriv[1]]
    return Fw.T @ coefficient_grid(s, level) @ Fz


def parity_of(s, level, tol=1e-8):
    """z-parity (+1 or -1) of eigenfunction ``level`` from its basis content.

    ||f(w,-z) - sigma f(w,z)|| is twice the norm of the coefficients of the
    opposite parity.
    """
    v = s.vectors[:, level]
    par = s.basis.z_parity_of_index()
    odd = 2.0 * np.linalg.norm(v[par < 0])
    even = 2.0 * np.linalg.norm(v[par > 0])
    if odd <= tol:
        return 1
    if even <= tol:
        return -1
    raise ParityUnresolved(f"level {level} mixes z-parities ({even / 2:.3g}, {odd / 2:.3g})")


@dataclass(frozen=True)
class DecayDiagnostic:
    level: int
    a_values: tuple
    weighted_norms: tuple  # at the larger radius
    gradient_weighted_norms: tuple  # (||e^{a<x>} d_w f||, ||e^{a<x>} d_z f||) per a
    stable: tuple  # per a: value and gradient norms grid-stable
    radii: tuple
    slope_estimate: float  # d log|f| / d r^2 of the radial envelope
    max_stable_a: float | None


def _weighted_norms(s, level, a_values, R, h):
    x = np.arange(-R, R + 0.5 * h, h)
    W, Z = np.meshgrid(x, x, indexing="ij")
    bracket = np.sqrt(1.0 + W * W + Z * Z)
    fields = [eigenfunction_on_grid(s, level, x, x, d) for d in ((0, 0), (1, 0), (0, 1))]
    out = []
    for a in a_values:
        wgt = np.exp(2.0 * a * bracket)
        out.append([math.sqrt(h * h * np.sum(wgt * f * f)) for f in fields])
    return np.array(out)


def decay_rate_estimate(s, level, a_list=(0.5, 1.0, 2.0), radius=None, spacing=0.05,
                        stable_tol=1e-3):
    """Numerical evidence of exponential decay of an eigenfunction.

    Weighted norms ||exp(a <x>) f|| (and of the gradient components) are
    computed on square grids of half-width R and 1.25 R; an ``a`` counts as
    resolved when every norm changes by at most ``stable_tol`` relative.
    The slope is fitted to log max_theta |f(r, theta)| against r^2 for r in
    [R/4, R/2].
    """
    b = s.basis
    if radius is None:
        radius = max(8.0, math.sqrt((2 * b.n_w + 1) / b.omega_w),
                     math.sqrt((2 * b.n_z + 1) / b.omega_z))
    radii = (radius, 1.25 * radius)
    n1 = _weighted_norms(s, level, a_list, radii[0], spacing)
    n2 = _weighted_norms(s, level, a_list, radii[1], spacing)
    stable = tuple(bool(np.all(np.abs(n2[i] - n1[i]) <= stable_tol * n2[i]))
                   for i in range(len(a_list)))

    r = np.linspace(radius / 4, radius / 2, 40)
    th = np.linspace(0.0, 2 * math.pi, 64, endpoint=False)
    RR, TT = np.meshgrid(r, th, indexing="ij")
    f = evaluate_eigenfunction(s, level, RR * np.cos(TT), RR * np.sin(TT))
    env = np.max(np.abs(f), axis=1)
    slope = float(np.polyfit(r * r, np.log(env), 1)[0])
    ok = [a for a, st in zip(a_list, stable) if st]
    return DecayDiagnostic(level, tuple(a_list), tuple(n2[:, 0]),
                           tuple(map(tuple, n2[:, 1:])), stable, radii, slope,
                           max(ok) if ok else None)


def potential_minimum_on_grid(c, w, z):
    W, Z = np.meshgrid(w, z, indexing="ij")
    return float(np.min(evaluate_nf_potential(c, W, Z)))
