"""Acceptance suite.

One test per acceptance criterion, each printing a PASS/FAIL line with the
measured worst-case discrepancy and its tolerance.  Run with

    pytest tests/test_acceptance.py -v -s
"""

import math
import time

import numpy as np

from ngphase.analytic import (
    ProtocolParams,
    StateFamily,
    baseline_phase_errors,
    cat_error_rates,
    cat_false_positive_product_form,
    cat_overlap,
    cat_overlap_zero,
    cat_parity,
    cat_pn,
    fock1_error_rates,
    laguerre_first_root,
    threshold_phase,
)
from ngphase.cli import main
from ngphase.fock import (
    FockSpace,
    apply,
    cat_state,
    displacement,
    fock_state,
    overlap,
    parity_expectation,
    photon_distribution,
    recommend_dim,
)
from ngphase.loss import LossChannel, apply_loss
from ngphase.protocols import evaluate, optimize_delta


def _report(criterion: int, label: str, ok: bool, detail: str) -> None:
    status = "PASS" if ok else "FAIL"
    print(f"ACCEPTANCE {criterion} {status} {label}: {detail}")
    assert ok, f"criterion {criterion} ({label}): {detail}"


def test_criterion_1_fock_orthogonality():
    start = time.perf_counter()
    worst = 0.0
    for n in range(1, 11):
        delta = math.sqrt(laguerre_first_root(n))
        space = FockSpace(recommend_dim(math.sqrt(n), delta, 1e-12), 1e-12)
        probe = fock_state(space, n)
        worst = max(worst, abs(overlap(probe, apply(displacement(space, delta), probe))))
    elapsed = time.perf_counter() - start
    _report(1, "Fock orthogonality at first Laguerre roots",
            worst < 1e-8 and elapsed < 5.0,
            f"max |<n|D(sqrt(R_n))|n>| = {worst:.3e} (tol 1e-8), {elapsed:.2f}s (< 5s)")


def test_criterion_2_lossy_single_photon_operating_point():
    start = time.perf_counter()
    worst_analytic = 0.0
    worst_numeric = 0.0
    for eta in (0.8, 0.9, 0.98):
        delta = 1.0 / math.sqrt(eta)  # d'^2 = 1
        rates = fock1_error_rates(delta, eta)
        worst_analytic = max(worst_analytic,
                             abs(rates.p_fp - (1.0 - eta)),
                             abs(rates.p_fn - (1.0 - eta) / math.e))
        space = FockSpace(recommend_dim(1.0, delta))
        channel = LossChannel(space, eta)
        probe = fock_state(space, 1)
        displaced = apply(displacement(space, delta), probe)
        p_quiet = photon_distribution(apply_loss(channel, probe))
        p_signal = photon_distribution(apply_loss(channel, displaced))
        worst_numeric = max(worst_numeric,
                            abs((1.0 - p_quiet[1]) - rates.p_fp),
                            abs(p_signal[1] - rates.p_fn))
    elapsed = time.perf_counter() - start
    _report(2, "lossy single-photon operating point",
            worst_analytic < 1e-12 and worst_numeric < 1e-8 and elapsed < 5.0,
            f"analytic gap {worst_analytic:.3e} (tol 1e-12), "
            f"Kraus gap {worst_numeric:.3e} (tol 1e-8), {elapsed:.2f}s (< 5s)")


def test_criterion_3_cat_overlap_zeros():
    start = time.perf_counter()
    worst_analytic = 0.0
    worst_numeric = 0.0
    for alpha in (1.5, 2.0, 3.0):
        for k in (0, 1):
            delta = cat_overlap_zero(alpha, k)
            worst_analytic = max(worst_analytic, abs(cat_overlap(alpha, delta)))
            space = FockSpace(recommend_dim(alpha, delta))
            probe = cat_state(space, alpha)
            worst_numeric = max(worst_numeric, abs(
                overlap(probe, apply(displacement(space, delta), probe))))
    elapsed = time.perf_counter() - start
    _report(3, "cat overlap zeros",
            worst_analytic < 1e-12 and worst_numeric < 1e-8 and elapsed < 10.0,
            f"analytic {worst_analytic:.3e} (tol 1e-12), "
            f"numeric {worst_numeric:.3e} (tol 1e-8), {elapsed:.2f}s (< 10s)")


def test_criterion_4_lossy_cat_parity_and_distribution():
    start = time.perf_counter()
    worst = 0.0
    for alpha in (1.0, 2.0, 3.0):
        for delta in (0.1, 0.4, 0.8):
            space = FockSpace(recommend_dim(alpha, delta))
            displaced = apply(displacement(space, delta), cat_state(space, alpha))
            for eta in (0.5, 0.9, 0.98):
                rho = apply_loss(LossChannel(space, eta), displaced)
                worst = max(worst, abs(
                    parity_expectation(rho) - cat_parity(alpha, delta, eta)))
                numeric_pn = photon_distribution(rho)
                closed_pn = np.array(
                    [cat_pn(alpha, delta, eta, n) for n in range(space.dim)])
                worst = max(worst, float(np.max(np.abs(numeric_pn - closed_pn))))
    elapsed = time.perf_counter() - start
    _report(4, "lossy cat parity and photon distribution",
            worst < 1e-8 and elapsed < 60.0,
            f"max gap {worst:.3e} (tol 1e-8), {elapsed:.2f}s (< 60s)")


def test_criterion_5_false_positive_identity():
    worst = 0.0
    for alpha in (1.0, 2.0, 3.0):
        for eta in (0.5, 0.9, 0.98):
            difference_form = 0.5 * (1.0 - cat_parity(alpha, 0.0, eta))
            product_form = cat_false_positive_product_form(alpha, eta)
            worst = max(worst, abs(difference_form - product_form))
    _report(5, "false-positive product identity",
            worst < 1e-12, f"max gap {worst:.3e} (tol 1e-12)")


def test_criterion_6_optimized_cat_miss_probability():
    details = []
    ok = True
    for alpha, bound in ((2.0, 0.14), (2.5, 0.10)):
        params = ProtocolParams(family=StateFamily.CAT, photons=1e6, alpha=alpha)
        op = optimize_delta(params)
        p_fn = evaluate(params, op.phi0).analytic.p_fn
        # grid-scan oracle for the same minimum
        grid = np.linspace(1e-4, 0.5 * math.pi / alpha, 20001)
        scan = min(cat_error_rates(alpha, float(d), 1.0).p_fn for d in grid)
        ok = ok and abs(p_fn - scan) < 0.01 and p_fn <= bound
        details.append(f"alpha={alpha}: p_fn={p_fn:.4f} (scan {scan:.4f}, bound {bound})")
    _report(6, "optimized lossless cat miss probability", ok, "; ".join(details))


def test_criterion_7_threshold_phase_ratios():
    params = ProtocolParams(family=StateFamily.FOCK, photons=1e6, n=1)
    snl, _ = baseline_phase_errors(1e6)
    ratio = threshold_phase(params) / snl
    gap_ratio = abs(ratio - 2.0)
    worst_squeeze = 0.0
    for r in (0.25, 0.5, 1.0, 2.0):
        squeezed = ProtocolParams(family=StateFamily.FOCK, photons=1e6, n=1, r=r)
        worst_squeeze = max(worst_squeeze, abs(
            threshold_phase(squeezed) / threshold_phase(params) - math.exp(-r)))
    _report(7, "threshold-phase ratios",
            gap_ratio < 1e-12 and worst_squeeze < 1e-12,
            f"phi0/snl - 2 = {gap_ratio:.3e}, squeeze-factor gap {worst_squeeze:.3e} "
            f"(tol 1e-12)")


def test_criterion_8_figure_determinism(tmp_path):
    first = tmp_path / "fig3_a.csv"
    second = tmp_path / "fig3_b.csv"
    code1 = main(["figure", "--id", "3", "--out", str(first)])
    code2 = main(["figure", "--id", "3", "--out", str(second)])
    identical = first.read_bytes() == second.read_bytes()
    _report(8, "figure 3 determinism",
            code1 == 0 and code2 == 0 and identical,
            f"two runs byte-identical: {identical}")


def test_criterion_9_verify_suite(capsys):
    start = time.perf_counter()
    code = main(["verify", "--grid", "full"])
    elapsed = time.perf_counter() - start
    capsys.readouterr()  # the report itself is not part of this test's output
    _report(9, "full verification suite",
            code == 0 and elapsed < 180.0,
            f"exit code {code}, {elapsed:.1f}s (< 180s)")
