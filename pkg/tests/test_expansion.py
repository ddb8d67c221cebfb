
import numpy as np
import pytest
from hypothesis import given, strategies as st

from hbondvib import expansion as ex
from hbondvib.nf_solver import normal_form_spectrum, reduced_resolvent_apply, monomial_matrix
from hbondvib.units import HARTREE_TO_WAVENUMBER

from conftest import PAPER_NF, golden

CRITERION_EPS = (0.2, 0.15, 0.1, 0.07, 0.05)
W3 = {(3, 0): 0.5}


@pytest.fixture(scope="module")
def paper_scan(paper_solution):
    return ex.quasimode_residual_scan(PAPER_NF, W3, solution=paper_solution)


# -- leading energy -------------------------------------------------------------------

def test_leading_energy_arithmetic():
    s = normal_form_spectrum(PAPER_NF.__class__(0.5, 0.5, 0.0, 0.0), 4, 4, k=1)
    r = ex.leading_energy(0.0, 0.1, s, 0)
    assert r.e2 == pytest.approx(1.0, abs=1e-14)
    assert r.energy_total == pytest.approx(0.01, abs=1e-15)
    assert r.e3 is None
    assert r.vanishing_orders == (("1/2", 0.0), ("1", 0.0), ("3/2", 0.0))


def test_leading_energy_golden(paper_solution):
    g = golden("leading_energy.json")["results"]
    r = ex.leading_energy(-200.215, 0.0821, paper_solution, 0)
    assert r.e2 == pytest.approx(g["e2"]["value"], rel=1e-6)
    assert r.energy_total == pytest.approx(g["energy_total"]["value"], rel=1e-12)


def test_leading_energy_e3_needs_both_parts(paper_solution):
    r = ex.leading_energy(0.0, 0.1, paper_solution, 0, e3_scalar=0.2)
    assert r.e3 is None
    assert r.energy_total == pytest.approx(0.01 * r.e2, rel=1e-15)
    r = ex.leading_energy(0.0, 0.1, paper_solution, 0, e3_scalar=0.2, e3_electronic=0.1)
    assert r.e3 == pytest.approx(0.3)
    assert r.energy_total == pytest.approx(0.01 * r.e2 + 0.001 * 0.3)


def test_dropped_kinetic_factor(paper_solution):
    r = ex.leading_energy(0.0, 0.1, paper_solution, 0, mu=2.0, nu=1.0)
    assert r.dropped_kinetic_factor == pytest.approx(0.025)


def test_leading_energy_level_range(paper_solution):
    with pytest.raises(IndexError):
        ex.leading_energy(0.0, 0.1, paper_solution, paper_solution.k)


@given(st.floats(1e-3, 0.4))
def test_epsilon_squared_law(paper_solution, eps):
    a = ex.leading_energy(0.0, eps, paper_solution, 1).energy_total - ex.leading_energy(0.0, eps, paper_solution, 0).energy_total
    b = ex.leading_energy(0.0, 2 * eps, paper_solution, 1).energy_total - ex.leading_energy(0.0, 2 * eps, paper_solution, 0).energy_total
    assert b == 4 * a


# -- transitions -----------------------------------------------------------------------

def test_unit_oscillator_gaps(unit_solution):
    t = ex.transition_frequencies(unit_solution, 1.0, upto=6)
    assert [x.gap_hartree for x in t] == pytest.approx([1, 1, 2, 2, 2], abs=1e-12)
    assert t[0].gap_wavenumber == pytest.approx(HARTREE_TO_WAVENUMBER, rel=1e-12)


def test_gaps_scale_exactly(paper_solution):
    a = ex.transition_frequencies(paper_solution, 0.05)
    b = ex.transition_frequencies(paper_solution, 0.1)
    for x, y in zip(a, b):
        assert y.gap_hartree == 4 * x.gap_hartree


def test_stretch_pair(paper_solution):
    sym, asym = ex.stretch_pair(ex.transition_frequencies(paper_solution, 0.1))
    assert sym.parity == 1 and asym.parity == -1
    assert sym.upper == 1 and asym.upper == 3
    with pytest.raises(ValueError):
        ex.stretch_pair(ex.transition_frequencies(paper_solution, 0.1, upto=2))
    with pytest.raises(ValueError):
        ex.transition_frequencies(paper_solution, 0.1, upto=1)


# -- first correction -----------------------------------------------------------------

def test_first_correction_zero(paper_solution):
    e3, f1 = ex.first_correction(paper_solution, 0, {})
    assert e3 == 0.0 and not f1.any()
    e3, f1 = ex.first_correction(paper_solution, 0, {(1, 4): 0.0})
    assert e3 == 0.0 and not f1.any()


def test_first_correction_odd_moment(unit_solution):
    e3, _ = ex.first_correction(unit_solution, 0, {(3, 0): 1.0})
    assert abs(e3) <= 1e-14


def test_first_correction_golden(paper_solution):
    g = golden("first_correction_wz2.json")["results"]
    e3, f1 = ex.first_correction(paper_solution, 0, {(1, 2): 1.0})
    assert e3 == pytest.approx(g["e3_nuclear"]["value"], rel=1e-10)
    assert np.linalg.norm(f1) == pytest.approx(g["f1_perp_norm"]["value"], rel=1e-8)


@pytest.mark.parametrize("s3", [{(3, 0): 1.0}, {(1, 2): 1.0}, {(0, 6): -0.3, (2, 2): 0.7}])
def test_first_correction_orthogonal(paper_solution, s3):
    _, f1 = ex.first_correction(paper_solution, 0, s3)
    assert abs(paper_solution.vectors[:, 0] @ f1) <= 1e-10
    g = sum(c * monomial_matrix(paper_solution.basis, a, k) for (a, k), c in s3.items()) @ paper_solution.vectors[:, 0]
    assert np.allclose(f1, -reduced_resolvent_apply(paper_solution, 0, g))


def test_first_correction_rejects_bad_monomials(paper_solution):
    with pytest.raises(ex.SymmetryViolation):
        ex.first_correction(paper_solution, 0, {(2, 1): 1.0})
    with pytest.raises(ValueError, match="beyond order 3"):
        ex.first_correction(paper_solution, 0, {(4, 0): 1.0})


# -- ledger -----------------------------------------------------------------------------

def test_series_ledger_golden():
    g = golden("series_ledger.json")["results"]["orders"]
    assert [(o["order"], o["status"], o["detail"]) for o in g] == list(ex.series_orders_ledger())


def test_series_ledger_content():
    led = {o: s for o, s, _ in ex.series_orders_ledger()}
    assert led["0"] == "implemented" and led["2"] == "implemented"
    for o in ("1/2", "1", "3/2"):
        assert led[o] == "vanishes identically"
    assert led["3 (nuclear)"] == "implemented"
    assert led["3 (electronic)"] == "requires electronic input"
    assert led[">= 7/2"] == "out of scope"
    detail = dict((o, d) for o, _, d in ex.series_orders_ledger())
    assert "E0" in detail["0"] and "electronic reduced resolvent" in detail[">= 7/2"]


# -- cutoff -------------------------------------------------------------------------------

def test_cutoff_shape():
    x = np.linspace(-3, 3, 6001)
    F = ex.cutoff(x)
    assert np.all(F[np.abs(x) <= 1] == 1.0) and np.all(F[np.abs(x) >= 2] == 0.0)
    assert np.array_equal(F, ex.cutoff(-x))
    pos = x >= 0
    assert np.all(np.diff(F[pos]) <= 0)
    assert ex.cutoff(1.5) == pytest.approx(0.5, abs=1e-12)


def test_cutoff_derivatives_consistent():
    x = np.linspace(-2.2, 2.2, 441)
    h = 1e-5
    F, F1, F2 = ex.cutoff_derivatives(x)
    assert np.allclose(F1, (ex.cutoff(x + h) - ex.cutoff(x - h)) / (2 * h), atol=1e-6)
    _, a, _ = ex.cutoff_derivatives(x + h)
    _, b, _ = ex.cutoff_derivatives(x - h)
    assert np.allclose(F2, (a - b) / (2 * h), atol=1e-5)


# -- quasimode scan ----------------------------------------------------------------------

def test_scan_slope(paper_scan):
    assert paper_scan.epsilon_list == CRITERION_EPS
    assert np.all(np.isfinite(paper_scan.residual_ratios) & (paper_scan.residual_ratios > 0))
    assert paper_scan.fitted_slope >= 2.0
    assert paper_scan.slope_stderr <= 0.15
    assert not paper_scan.out_of_window
    assert np.all(paper_scan.resolution_changes <= 1e-3)


def test_scan_hermiticity(paper_scan):
    # everything is real-valued, so the imaginary part vanishes identically;
    # the defect compares the operator form with the integrated-by-parts form
    assert paper_scan.residual_ratios.dtype == np.float64
    assert np.all(paper_scan.hermiticity_defects <= 1e-9)


def test_scan_norm_estimate(paper_scan):
    corr = paper_scan.norm_corrections
    assert np.all(corr > 0)
    assert np.all(np.diff(corr) < 0)
    eps = np.array(paper_scan.epsilon_list)
    assert np.allclose(paper_scan.norms, eps ** 0.75 * (1 - corr), rtol=1e-12)


def test_scan_exact_eigenfunction_limit():
    s = normal_form_spectrum(PAPER_NF, 80, 80, k=2)
    sc = ex.quasimode_residual_scan(PAPER_NF, None, solution=s, use_cutoff=False)
    eps = np.array(sc.epsilon_list)
    assert np.all(sc.residual_ratios / eps ** 2 <= 1e-10)


def test_scan_cutoff_insensitive_at_small_epsilon(paper_solution):
    eps = (1e-3, 5e-4, 1e-4, 1e-5)
    last = [ex.quasimode_residual_scan(PAPER_NF, W3, epsilon_list=eps, delta1=d1,
                                       solution=paper_solution).residual_ratios[-1]
            for d1 in (0.72, 11 / 14, 0.85)]
    assert max(last) / min(last) - 1 <= 0.01


def test_scan_order_independent(paper_solution, paper_scan):
    rev = ex.quasimode_residual_scan(PAPER_NF, W3, solution=paper_solution,
                                     epsilon_list=CRITERION_EPS[:4])
    assert np.array_equal(rev.residual_ratios, paper_scan.residual_ratios[:4])


def test_scan_out_of_window(paper_solution):
    with pytest.raises(ex.OutOfWindow):
        ex.quasimode_residual_scan(PAPER_NF, W3, delta2=0.25, solution=paper_solution)
    sc = ex.quasimode_residual_scan(PAPER_NF, W3, delta2=0.25, allow_out_of_window=True,
                                    solution=paper_solution)
    assert sc.out_of_window


def test_scan_input_errors(paper_solution):
    kw = dict(solution=paper_solution)
    with pytest.raises(ValueError, match="4 points"):
        ex.quasimode_residual_scan(PAPER_NF, W3, epsilon_list=(0.1,), **kw)
    with pytest.raises(ValueError, match="decreasing"):
        ex.quasimode_residual_scan(PAPER_NF, W3, epsilon_list=(0.05, 0.1, 0.15, 0.2), **kw)
    with pytest.raises(ValueError, match="order 3"):
        ex.quasimode_residual_scan(PAPER_NF, {(2, 0): 1.0}, **kw)
    with pytest.raises(ValueError, match="spacing"):
        ex.quasimode_residual_scan(PAPER_NF, W3, spacing=0.5, **kw)


def test_scan_unresolved(paper_solution):
    with pytest.raises(ex.ScanUnresolved) as exc:
        ex.quasimode_residual_scan(PAPER_NF, W3, spacing=0.1, solution=paper_solution)
    assert {"epsilon", "ratio", "ratio_coarse", "spacing"} <= set(exc.value.diagnostics)
