"""Regenerate the bundled synthetic PES and the golden files under tests/golden.

    python scripts/regenerate.py            # everything
    python scripts/regenerate.py --no-oracle  # skip the ~30 s finite-difference run

Golden files are regression anchors: regenerate only when a change in the
numbers is understood and intended, and review the diff.
"""

import argparse
import pathlib

import numpy as np
import scipy.linalg as la

from hbondvib import report
from hbondvib.expansion import series_orders_ledger
from hbondvib.nf_solver import monomial_matrix, normal_form_spectrum
from hbondvib.oracle import FdGrid, fd_reference
from hbondvib.surface import PAPER_FHF, NormalFormCoefficients, sample_grid, write_pes_csv
from hbondvib.units import ANGSTROM_HARTREE

ROOT = pathlib.Path(__file__).resolve().parent.parent
DATA = ROOT / "src" / "hbondvib" / "data"
GOLDEN = ROOT / "tests" / "golden"
NF = NormalFormCoefficients(0.26, 1.22, 1.29, 1.62)
STAMP = "frozen"  # golden files carry no wall-clock time


def synthetic_pes():
    W = PAPER_FHF.W0 + np.linspace(-0.2, 0.2, 9)
    Z = np.linspace(-0.3, 0.3, 9)
    samples = sample_grid(PAPER_FHF, W, Z, units=ANGSTROM_HARTREE)
    write_pes_csv(DATA / "fhf_synthetic.csv", samples,
                  "SYNTHETIC data: the quartic FHF- model evaluated on a 9 x 9 grid.\n"
                  "Not an ab initio surface.  W, Z in Angstrom, E in Hartree,\n"
                  "a2 factored at epsilon = 0.0821.  Regenerate with scripts/regenerate.py.")


def oracle_golden():
    grid = FdGrid.square(10.0, 0.05)
    vals, errs, _, fine = fd_reference(NF, grid, 5)
    results = {
        "coefficients": {k: report.quantity(v, "1") for k, v in zip(("a1", "a2", "a3", "a4"), NF.a)},
        "grid": {"half_width": report.quantity(10.0, "1"), "h": report.quantity(grid.h_w, "1"),
                 "h_fine": report.quantity(grid.h_w / 2, "1"), "scheme": "5-point, Dirichlet"},
        "eigenvalues": report.quantities(vals, "1"),
        "error_estimates": report.quantities(errs, "1"),
        "parities": [int(p) for p in fine.parities[:5]],
    }
    doc = report.document("oracle", {}, results, timestamp=STAMP)
    report.write(doc, GOLDEN / "oracle_paper_lowest5.json")
    return vals


def ledger_golden():
    results = {"orders": [{"order": o, "status": s, "detail": d}
                          for o, s, d in series_orders_ledger()]}
    report.write(report.document("series_orders_ledger", {}, results, timestamp=STAMP),
                 GOLDEN / "series_ledger.json")


def leading_energy_golden(ground):
    eps, e0 = 0.0821, PAPER_FHF.E0
    results = {"e0": report.quantity(e0, "hartree"), "epsilon": report.quantity(eps, "1"),
               "e2": report.quantity(ground, "1"),
               "energy_total": report.quantity(e0 + eps ** 2 * ground, "hartree")}
    report.write(report.document("leading_energy", {}, results, timestamp=STAMP),
                 GOLDEN / "leading_energy.json")


def first_correction_golden():
    # independent of the bordered solve: full eigendecomposition, spectral sum
    s = normal_form_spectrum(NF, 40, 40, k=2)
    lam, V = la.eigh(s.hamiltonian)
    f0 = V[:, 0]
    g = monomial_matrix(s.basis, 1, 2) @ f0
    e3 = f0 @ g
    coef = (V[:, 1:].T @ g) / (lam[1:] - lam[0])
    f1 = -V[:, 1:] @ coef
    results = {"s3": "w z^2", "level": 0, "e3_nuclear": report.quantity(e3, "1"),
               "f1_perp_norm": report.quantity(np.linalg.norm(f1), "1")}
    report.write(report.document("dense_spectral_sum", {}, results, timestamp=STAMP),
                 GOLDEN / "first_correction_wz2.json")


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--no-oracle", action="store_true")
    args = ap.parse_args()
    GOLDEN.mkdir(parents=True, exist_ok=True)
    synthetic_pes()
    ledger_golden()
    first_correction_golden()
    if not args.no_oracle:
        leading_energy_golden(oracle_golden()[0])
