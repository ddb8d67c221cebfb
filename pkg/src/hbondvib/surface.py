"""
Ground-state potential surface in Jacobi coordinates.

The model surface is

    E(W, Z) = E0 + a1 (W-W0)^2 + (a2 eps - a3 (W-W0)) Z^2 + a4 Z^4 + ...

where the coefficient of Z^2 at equilibrium is small, of order eps, and is
stored eps-factored as ``a2``.  After the rescaling w = (W-W0)/eps,
z = Z/sqrt(eps) the leading part becomes eps^2 times the normal-form
potential a1 w^2 + (a2 - a3 w) z^2 + a4 z^4.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import units as _units


class FitDegenerate(ValueError):
    """Raised when the least-squares design matrix is rank deficient."""

    def __init__(self, message, monomial=None):
        super().__init__(message)
        self.monomial = monomial


class PesParseError(ValueError):
    """Malformed PES input file."""

    def __init__(self, message, line=None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class NormalFormCoefficients:
    """Coefficients of the quartic surface model.

    ``a2`` is eps-factored: the physical Z^2 coefficient at W0 is
    ``a2 * epsilon_convention``.  For dimensionless normal-form problems
    leave ``E0 = W0 = 0``.
    """

    a1: float
    a2: float
    a3: float
    a4: float
    E0: float = 0.0
    W0: float = 0.0
    epsilon_convention: float = 1.0

    def __post_init__(self):
        for name in ("a1", "a2", "a3", "a4", "E0", "W0", "epsilon_convention"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if not self.epsilon_convention > 0:
            raise ValueError("epsilon_convention must be positive")

    @property
    def a(self):
        return (self.a1, self.a2, self.a3, self.a4)

    def assumption_violations(self):
        """Deviations from a1, a3, a4 > 0; empty for the models of interest."""
        out = []
        for name in ("a1", "a3", "a4"):
            if not getattr(self, name) > 0:
                out.append(f"{name} <= 0")
        return out

    def refactor(self, epsilon):
        """Same physical surface with a2 factored at a different epsilon."""
        return replace(self, a2=self.a2 * self.epsilon_convention / epsilon,
                       epsilon_convention=epsilon)


PAPER_FHF = NormalFormCoefficients(a1=0.26, a2=1.22, a3=1.29, a4=1.62, E0=-200.215,
                                   W0=2.287, epsilon_convention=0.0821)


class Stability(enum.Enum):
    BOUNDED_STRICT = "BoundedStrict"
    BOUNDED_MARGINAL = "BoundedMarginal"
    UNBOUNDED = "Unbounded"


@dataclass(frozen=True)
class StabilityClass:
    variant: Stability
    margin: float  # 4 a1 a4 - a3^2

    @property
    def bounded(self):
        return self.variant is not Stability.UNBOUNDED


def classify_stability(c, tol=1e-9):
    """Classify boundedness of the quartic model.

    Bounded below iff a3^2 < 4 a1 a4, or a3^2 = 4 a1 a4 with a2 >= 0;
    equality is decided within ``tol * 4 a1 a4``.  Pure harmonic test
    surfaces (a3 = a4 = 0, a2 > 0) fall in the marginal band.
    """
    a1, a2, a3, a4 = c.a
    margin = 4.0 * a1 * a4 - a3 * a3
    if a1 <= 0 or a4 < 0:
        return StabilityClass(Stability.UNBOUNDED, margin)
    if a4 == 0 and not (a3 == 0 and a2 > 0):
        return StabilityClass(Stability.UNBOUNDED, margin)
    if abs(margin) <= tol * 4.0 * a1 * a4:
        variant = Stability.BOUNDED_MARGINAL if a2 >= 0 else Stability.UNBOUNDED
        return StabilityClass(variant, margin)
    if margin > 0:
        return StabilityClass(Stability.BOUNDED_STRICT, margin)
    return StabilityClass(Stability.UNBOUNDED, margin)


def lower_bound(c):
    """Explicit lower bound of the normal-form potential (completed square).

    E_NF = a1 (w - a3 z^2/(2 a1))^2 + (a4 - a3^2/(4 a1)) z^4 + a2 z^2, and
    q t^2 + a2 t >= -a2^2/(4q) for q > 0.
    """
    a1, a2, a3, a4 = c.a
    q = a4 - a3 * a3 / (4.0 * a1)
    if a2 >= 0:
        return 0.0
    if q <= 0:
        return -math.inf
    return -a2 * a2 / (4.0 * q)


def evaluate_nf_potential(c, w, z):
    """a1 w^2 + (a2 - a3 w) z^2 + a4 z^4, broadcasting over arrays."""
    a1, a2, a3, a4 = c.a
    z2 = z * z
    return a1 * w * w + (a2 - a3 * w) * z2 + a4 * z2 * z2


def nf_gradient(c, w, z):
    """Analytic gradient (d/dw, d/dz) of the normal-form potential."""
    a1, a2, a3, a4 = c.a
    dw = 2.0 * a1 * w - a3 * z * z
    dz = 2.0 * (a2 - a3 * w) * z + 4.0 * a4 * z ** 3
    return dw, dz


def evaluate_surface(c, W, Z, epsilon=None, remainder=None):
    """The model surface E1(eps, W, Z) in the coefficients' own units.

    ``remainder`` maps (alpha, k) to the coefficient of (W-W0)^alpha Z^k.
    """
    eps = c.epsilon_convention if epsilon is None else epsilon
    a1, a2, a3, a4 = c.refactor(eps).a
    dW = W - c.W0
    Z2 = Z * Z
    out = c.E0 + a1 * dW * dW + (a2 * eps - a3 * dW) * Z2 + a4 * Z2 * Z2
    for (alpha, k), coef in (remainder or {}).items():
        out = out + coef * dW ** alpha * Z ** k
    return out


def reduce_to_three_parameters(c):
    """Scale out the quartic coefficient.

    With w = alpha s, z = alpha t the normal-form Hamiltonian equals
    alpha^-2 times -1/2 Laplacian + alpha1 s^2 + alpha2 t^2 - alpha3 s t^2 + t^4.

    Returns
    -------
    alpha, alpha1, alpha2, alpha3 : float
    """
    a1, a2, a3, a4 = c.a
    if not a4 > 0:
        raise ValueError("a4 must be positive")
    return (a4 ** (-1.0 / 6.0), a1 / a4 ** (2.0 / 3.0), a2 / a4 ** (2.0 / 3.0),
            a3 / a4 ** (5.0 / 6.0))


def three_parameter_coefficients(c):
    """The reduced model as a NormalFormCoefficients with a4 = 1."""
    _, al1, al2, al3 = reduce_to_three_parameters(c)
    return NormalFormCoefficients(al1, al2, al3, 1.0)


# -- sample sets and fitting -------------------------------------------------

@dataclass(frozen=True)
class PesSampleSet:
    """Tabulated surface energies E(W, Z) with their input units."""

    samples: np.ndarray  # shape (n, 3): W, Z, E
    units: _units.UnitSystem = _units.ATOMIC

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=float)
        if s.ndim != 2 or s.shape[1] != 3:
            raise ValueError("samples must have shape (n, 3)")
        if not np.all(np.isfinite(s)):
            raise ValueError("samples must be finite")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)
        if len(s) > 1:
            order = np.lexsort((s[:, 1], s[:, 0]))
            d = np.abs(np.diff(s[order, :2], axis=0)).max(axis=1)
            if np.any(d <= 1e-12):
                raise ValueError("duplicate (W, Z) sample")

    @property
    def count(self):
        return len(self.samples)

    @property
    def W(self):
        return self.samples[:, 0]

    @property
    def Z(self):
        return self.samples[:, 1]

    @property
    def E(self):
        return self.samples[:, 2]

    def z_asymmetry(self, tol=1e-12):
        """Largest |E(W,Z) - E(W,-Z)| over mirrored pairs present in the set."""
        lookup = {(round(w / tol), round(z / tol)): e for w, z, e in self.samples}
        worst = 0.0
        for w, z, e in self.samples:
            mirror = lookup.get((round(w / tol), round(-z / tol)))
            if mirror is not None:
                worst = max(worst, abs(e - mirror))
        return worst


def read_pes_csv(path, units=_units.ATOMIC):
    """Read ``W,Z,E`` triples; ``#`` starts a comment, a header is optional."""
    rows = []
    header = False
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = [p.strip() for p in line.split(",")]
            if not rows and not header and [p.upper() for p in parts] == ["W", "Z", "E"]:
                header = True
                continue
            if len(parts) != 3:
                raise PesParseError(f"expected 3 comma-separated fields, got {len(parts)}", lineno)
            try:
                rows.append([float(p) for p in parts])
            except ValueError:
                raise PesParseError(f"non-numeric field in {line!r}", lineno) from None
    if not rows and not header:
        raise PesParseError("empty file: no header and no samples")
    return PesSampleSet(np.array(rows).reshape(-1, 3), units)


def write_pes_csv(path, samples, comment=None):
    with open(path, "w") as fh:
        for line in (comment or "").splitlines():
            fh.write(f"# {line}\n")
        fh.write("W,Z,E\n")
        for w, z, e in samples.samples:
            fh.write(f"{w:.17g},{z:.17g},{e:.17g}\n")


def sample_grid(c, W, Z, epsilon=None, remainder=None, units=_units.ATOMIC):
    """Evaluate the model on the tensor grid W x Z."""
    WW, ZZ = np.meshgrid(np.asarray(W, float), np.asarray(Z, float), indexing="ij")
    E = evaluate_surface(c, WW, ZZ, epsilon, remainder)
    return PesSampleSet(np.column_stack([WW.ravel(), ZZ.ravel(), E.ravel()]), units)


@dataclass(frozen=True)
class FitResult:
    coeffs: NormalFormCoefficients
    rms_residual: float
    max_residual: float
    condition_estimate: float
    residuals: np.ndarray = field(repr=False)
    residual_order_diagnostic: np.ndarray = field(repr=False)
    z_asymmetry: float = 0.0


MONOMIALS = ("1", "dW", "dW^2", "Z^2", "dW Z^2", "Z^4")
MIN_SAMPLES = 8


def _design(dW, Z):
    Z2 = Z * Z
    return np.column_stack([np.ones_like(dW), dW, dW * dW, Z2, dW * Z2, Z2 * Z2])


def fit_normal_form(samples, epsilon, w0_seed=None):
    """Least-squares fit of the quartic model to surface samples.

    The model is linear in the monomials 1, dW, dW^2, Z^2, dW Z^2, Z^4 with
    dW = W - w0_seed, so the fit is a single linear solve; the equilibrium
    W0 = w0_seed - c_dW / (2 c_dW2) then follows in closed form and the
    remaining coefficients are re-centred on it.

    Coefficients come back in the units of ``samples``; ``a2`` is divided
    by ``epsilon``.
    """
    if samples.count < MIN_SAMPLES:
        raise ValueError(f"insufficient samples: {samples.count} < {MIN_SAMPLES}")
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    W, Z, E = samples.W, samples.Z, samples.E
    if w0_seed is None:
        w0_seed = W[np.argmin(E)]
    if not W.min() <= w0_seed <= W.max():
        raise ValueError("w0_seed outside the sampled W range")

    A = _design(W - w0_seed, Z)
    scale = np.linalg.norm(A, axis=0)
    if np.any(scale == 0):
        bad = MONOMIALS[int(np.argmin(scale))]
        raise FitDegenerate(f"monomial {bad} vanishes on all samples", bad)
    As = A / scale
    sv = np.linalg.svd(As, compute_uv=False)
    cond = sv[0] / sv[-1] if sv[-1] > 0 else math.inf
    if sv[-1] <= sv[0] * len(E) * np.finfo(float).eps * 10:
        _, _, vt = np.linalg.svd(As)
        bad = MONOMIALS[int(np.argmax(np.abs(vt[-1])))]
        raise FitDegenerate(f"design matrix rank deficient (monomial {bad})", bad)
    coef, *_ = np.linalg.lstsq(As, E, rcond=None)
    c0, c1, c2, c3, c4, c5 = coef / scale

    if c2 == 0:
        raise FitDegenerate("zero curvature in W", "dW^2")
    shift = -c1 / (2.0 * c2)
    W0 = w0_seed + shift
    if not W.min() <= W0 <= W.max():
        raise ValueError(f"fitted W0 = {W0!r} not bracketed by the sampled W range")
    a1 = c2
    a3 = -c4
    a4 = c5
    E0 = c0 + c1 * shift + c2 * shift * shift
    a2_eps = c3 + c4 * shift
    coeffs = NormalFormCoefficients(a1=a1, a2=a2_eps / epsilon, a3=a3, a4=a4, E0=E0,
                                    W0=W0, epsilon_convention=epsilon)

    resid = E - evaluate_surface(coeffs, W, Z)
    dW = np.abs(W - W0)
    Z2 = Z * Z
    envelope = dW ** 3 + dW ** 2 * Z2 + dW * Z2 ** 2 + Z2 ** 3
    with np.errstate(divide="ignore", invalid="ignore"):
        order_diag = np.where(envelope > 0, np.abs(resid) / envelope, 0.0)
    return FitResult(coeffs=coeffs, rms_residual=float(np.sqrt(np.mean(resid ** 2))),
                     max_residual=float(np.max(np.abs(resid))), condition_estimate=float(cond),
                     residuals=resid, residual_order_diagnostic=order_diag,
                     z_asymmetry=samples.z_asymmetry())
