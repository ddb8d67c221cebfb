"""
Vibrational levels of symmetric hydrogen-bonded triatomics (FHF- and
relatives) from a quartic normal-form surface with eps^-3 scaled light-atom
mass.

Typical use::

    from hbondvib import PAPER_FHF, normal_form_spectrum
    s = normal_form_spectrum(PAPER_FHF.refactor(1.0), n_w=40, n_z=40, k=6)
"""

__version__ = "0.1.0"

from .surface import (PAPER_FHF, NormalFormCoefficients, classify_stability, fit_normal_form,
                      read_pes_csv)
from .nf_solver import normal_form_spectrum, parity_of, reduced_resolvent_apply
from .expansion import (first_correction, leading_energy, quasimode_residual_scan,
                        series_orders_ledger, transition_frequencies)
from .oracle import FdGrid, fd_reference

__all__ = [
    "PAPER_FHF", "NormalFormCoefficients", "classify_stability", "fit_normal_form", "read_pes_csv",
    "normal_form_spectrum", "parity_of", "reduced_resolvent_apply", "first_correction",
    "leading_energy", "quasimode_residual_scan", "series_orders_ledger", "transition_frequencies",
    "FdGrid", "fd_reference",
]
