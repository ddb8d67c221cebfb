"""One test per acceptance criterion; each prints a PASS/FAIL line."""

import json
import time

import numpy as np

from hbondvib import cli
from hbondvib.expansion import quasimode_residual_scan, series_orders_ledger
from hbondvib.nf_solver import normal_form_spectrum
from hbondvib.oracle import FdGrid, fd_reference, fd_solve
from hbondvib.surface import NormalFormCoefficients

import conftest
from conftest import MARGINAL, PAPER_NF, UNIT_OSC, golden

SCAN_EPS = (0.2, 0.15, 0.1, 0.07, 0.05)
W3 = {(3, 0): 0.5}


def record(label, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'}  {label}: {detail}"
    conftest.ACCEPTANCE.append(line)
    print(line)
    assert ok, line


def test_criterion_1_fhf_frequencies(tmp_path):
    t0 = time.perf_counter()
    out = tmp_path / "spectrum.json"
    code = cli.main(["spectrum", "--config", "fhf", "--output", str(out)])
    elapsed = time.perf_counter() - t0
    st = json.loads(out.read_text())["results"]["stretch"]
    sym = st["symmetric"]["gap_wavenumber"]["value"]
    asym = st["asymmetric"]["gap_wavenumber"]["value"]
    ok = (code == 0 and abs(sym / 600 - 1) <= 0.05 and abs(asym / 1399 - 1) <= 0.05
          and elapsed <= 60)
    record("1 FHF- frequencies", ok,
           f"symmetric {sym:.1f} cm^-1 (600), asymmetric {asym:.1f} cm^-1 (1399), {elapsed:.1f} s")


def test_criterion_2_oracle_equivalence():
    t0 = time.perf_counter()
    spectral = normal_form_spectrum(PAPER_NF, 40, 40, k=5).eigenvalues
    fd, _, _, _ = fd_reference(PAPER_NF, FdGrid.square(10.0, 0.05), 5)
    elapsed = time.perf_counter() - t0
    rel = float(np.max(np.abs(spectral - fd) / np.abs(fd)))
    record("2 oracle equivalence", rel <= 1e-6 and elapsed <= 300,
           f"max relative difference {rel:.2e} over 5 levels, {elapsed:.1f} s")


def test_criterion_3_quasimode_slope():
    t0 = time.perf_counter()
    s = normal_form_spectrum(PAPER_NF, 40, 40, k=2)
    sc = quasimode_residual_scan(PAPER_NF, W3, epsilon_list=SCAN_EPS, delta1=11 / 14,
                                 delta2=5 / 14, solution=s)
    elapsed = time.perf_counter() - t0
    ok = sc.fitted_slope >= 2.0 and sc.slope_stderr <= 0.15 and elapsed <= 600
    record("3 quasimode slope", ok,
           f"slope {sc.fitted_slope:.3f} +- {sc.slope_stderr:.3f} (>= 2.0, stderr <= 0.15), {elapsed:.1f} s")


def test_criterion_3_negative_control():
    s = normal_form_spectrum(PAPER_NF, 40, 40, k=2)
    sc = quasimode_residual_scan(PAPER_NF, W3, epsilon_list=SCAN_EPS, delta1=11 / 14,
                                 delta2=0.25, allow_out_of_window=True, solution=s)
    record("3 negative control (delta2 = 0.25)", sc.out_of_window and sc.fitted_slope < 2.0,
           f"slope {sc.fitted_slope:.3f} +- {sc.slope_stderr:.3f} (expected < 2.0)")


def test_criterion_4_marginal_discreteness():
    small = fd_solve(MARGINAL, FdGrid.square(8.0, 0.05), 3).eigenvalues
    large = fd_solve(MARGINAL, FdGrid.square(12.0, 0.05), 3).eigenvalues
    rel = float(np.max(np.abs(large - small) / np.abs(large)))
    record("4 marginal discreteness", rel <= 1e-4,
           f"lowest 3 change {rel:.2e} relative between [-8,8]^2 and [-12,12]^2")


def test_criterion_5_separable_limits():
    c = NormalFormCoefficients(0.5, 2.0, 0.0, 0.0)
    e = normal_form_spectrum(c, 20, 20, k=10).eigenvalues
    n, m = np.meshgrid(np.arange(20), np.arange(20))
    exact = np.sort((np.sqrt(2 * c.a1) * (n + 0.5) + np.sqrt(2 * c.a2) * (m + 0.5)).ravel())[:10]
    harm = float(np.max(np.abs(e - exact)))
    u = normal_form_spectrum(UNIT_OSC, 12, 12, k=6).eigenvalues
    unit = float(np.max(np.abs(u - [1, 2, 2, 3, 3, 3])))
    record("5 separable limits", harm <= 1e-10 and unit <= 1e-12,
           f"harmonic mode {harm:.1e} (1e-10), unit oscillator {unit:.1e} (1e-12)")


def test_criterion_6_invariant_suite(tmp_path):
    out = tmp_path / "validate.json"
    code = cli.main(["validate", "--config", "fhf", "--output", str(out)])
    checks = json.loads(out.read_text())["results"]["checks"]
    failed = [c["name"] for c in checks if not c["passed"]]
    record("6 invariant suite", code == 0 and not failed,
           f"{len(checks) - len(failed)}/{len(checks)} checks pass" + (f"; failed {failed}" if failed else ""))


def test_criterion_7_scope_ledger():
    g = golden("series_ledger.json")["results"]["orders"]
    ok = [(o["order"], o["status"], o["detail"]) for o in g] == list(series_orders_ledger())
    record("7 scope ledger", ok, f"{len(g)} orders match the golden file")
