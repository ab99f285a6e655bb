"""Acceptance gate: one test per shipped claim, one printed line each.

Each criterion prints `criterion NN pass/FAIL: ...` on the live
terminal (bypassing capture) so a full run reads as a checklist. The
assertions carry the same tolerances as the printed lines.
"""

import filecmp
import math
import time
from dataclasses import replace

import numpy as np
import pytest

from epcag import (
    DriverOrbit,
    certify_connection,
    check_assumptions,
    main,
    proof_constants,
    reference_envelope,
    reference_matrix,
    residual_defect,
    solution_bound,
    solve_bounded,
    transfer_catalog,
    unstable_gap_bound,
    validate_envelope,
    verify_hyperbolic_transfer,
)

_SHARED: dict = {}


def report(capsys, num, name, ok, detail=""):
    tail = f" ({detail})" if detail else ""
    with capsys.disabled():
        print(f"criterion {num:02d} {'pass' if ok else 'FAIL'}: {name}{tail}", flush=True)
    assert ok, f"criterion {num} {name}{tail}"


def test_criterion_01_envelope_reproduction(capsys):
    t0 = time.perf_counter()
    a = reference_matrix()
    check = validate_envelope(a, reference_envelope(), 1e-3, slack=1e-9)
    eigs = np.sort_complex(np.linalg.eigvals(a))
    expect = np.sort_complex(np.array([-0.5 - 1j * math.sqrt(15) / 2, -0.5 + 1j * math.sqrt(15) / 2]))
    eig_err = float(np.abs(eigs - expect).max())
    elapsed = time.perf_counter() - t0
    ok = check.passed and eig_err <= 1e-10 and elapsed < 1.0
    report(capsys, 1, "decay envelope N=(7+sqrt(34))/sqrt(15), rate 1/2 on [0,60]", ok,
           f"max ratio {check.max_ratio:.12f}, eig err {eig_err:.2e}, {elapsed:.2f}s")


def test_criterion_02_assumption_checker(capsys, homo):
    rep = check_assumptions(homo.system)
    ok = (
        abs(rep.a4_lhs - 0.13252) <= 1e-5
        and rep.a4_lhs < 0.5
        and abs(rep.a5_lhs - 0.74192) <= 1e-4
        and rep.a5_lhs < 1.0
        and rep.a4_pass
        and rep.a5_pass
    )
    report(capsys, 2, "sufficient conditions on the reference system", ok,
           f"a4_lhs {rep.a4_lhs:.8f}, a5_lhs {rep.a5_lhs:.8f}")


def test_criterion_03_proof_constants(capsys, het):
    pc = proof_constants(het.system)
    ok = (
        abs(pc.m_phi - 16.475) <= 1e-3
        and abs(pc.kappa_pi - 0.26503) <= 1e-5
        and abs(pc.r2 - 10.025) <= 0.01
        and pc.r1 > 0.0
    )
    report(capsys, 3, "solution-bound and transfer constants (mu=4 driver)", ok,
           f"m_phi {pc.m_phi:.6f}, kappa_pi {pc.kappa_pi:.8f}, r2 {pc.r2:.6f}, r1 {pc.r1:.4f}")


def test_criterion_04_picard_contraction(capsys, homo_traj):
    deltas = homo_traj.meta["iterate_deltas"]
    ratios = [cur / prev for prev, cur in zip(deltas[1:], deltas[2:])]
    ok = (
        homo_traj.meta["iterations"] <= 12
        and deltas[-1] <= 1e-10
        and all(r <= 0.30 for r in ratios)
    )
    worst = max(ratios) if ratios else 0.0
    report(capsys, 4, "Picard iterates contract with ratio <= 0.30", ok,
           f"{homo_traj.meta['iterations']} iterations, worst ratio {worst:.4f}")


def test_criterion_05_method_cross_check(capsys, homo):
    t0 = time.perf_counter()
    pic = solve_bounded(homo.system, (-20, 20))
    burn = solve_bounded(homo.system, (-20, 20), method="burn_in")
    n = len(pic.samples)
    sl = slice(n // 4, 3 * n // 4 + 1)
    gap = float(np.linalg.norm(pic.samples[sl] - burn.samples[sl], axis=1).max())
    elapsed = time.perf_counter() - t0
    _SHARED["burn"] = burn
    ok = gap <= 1e-6 and elapsed < 10.0
    report(capsys, 5, "picard and burn-in agree on the interior half", ok,
           f"sup gap {gap:.2e}, {elapsed:.2f}s")


def test_criterion_06_boundedness_and_defect(capsys, homo, het, homo_traj):
    het_traj = solve_bounded(het.system, (-20, 20))
    burn = _SHARED.get("burn") or solve_bounded(homo.system, (-20, 20), method="burn_in")
    rows = []
    ok = True
    for label, sys, traj in (
        ("homoclinic picard", homo.system, homo_traj),
        ("homoclinic burn-in", homo.system, burn),
        ("heteroclinic picard", het.system, het_traj),
    ):
        sup = traj.meta["sup_norm"]
        defect = residual_defect(sys, traj)
        ok = ok and sup <= 16.476 and defect <= 1e-6
        rows.append(f"{label}: sup {sup:.3f}, defect {defect:.1e}")
        assert sup <= solution_bound(sys) + 1e-9
    report(capsys, 6, "sup norm <= 16.476 and residual defect <= 1e-6", ok, "; ".join(rows))


def test_criterion_07_homoclinic_scenario(capsys, homo):
    star = 2.9 / 3.9
    gaps = {k: abs(float(homo.beta.value(k)[0]) - star) for k in range(-41, -9)}
    ratios = [gaps[k - 1] / gaps[k] for k in range(-40, -9)]
    ratios_ok = all(abs(r - 1.0 / 1.9) <= 0.05 / 1.9 for r in ratios)

    t0 = time.perf_counter()
    cert = certify_connection(homo.system, homo.alphas, homo.beta, "homoclinic")
    elapsed = time.perf_counter() - t0
    ok = (
        ratios_ok
        and cert.verdict is True
        and cert.forward.end_gap <= 1e-4
        and cert.backward.end_gap <= 1e-4
        and cert.forward.fitted_rate >= 0.33
        and elapsed < 30.0
    )
    report(capsys, 7, "homoclinic orbit transfers to the function level (mu=3.9)", ok,
           f"seq ratio [{min(ratios):.5f}, {max(ratios):.5f}] vs 1/1.9, "
           f"end gaps {cert.forward.end_gap:.1e}/{cert.backward.end_gap:.1e}, "
           f"fwd rate {cert.forward.fitted_rate:.3f}, {elapsed:.1f}s")


def test_criterion_08_heteroclinic_scenario(capsys, het, het_cert):
    gaps = {k: float(het.beta.value(k)[0]) for k in range(-41, -9)}
    ratios = [gaps[k - 1] / gaps[k] for k in range(-40, -9)]
    ratios_ok = all(abs(r - 0.25) <= 0.05 * 0.25 for r in ratios)
    targets_ok = (
        np.array_equal(het.alphas[0].value(0), [0.75, 0.75])
        and np.array_equal(het.alphas[1].value(0), [0.0, 0.0])
    )
    ok = (
        ratios_ok
        and targets_ok
        and het_cert.verdict is True
        and het_cert.forward.end_gap <= 1e-4
        and het_cert.backward.end_gap <= 1e-4
    )
    report(capsys, 8, "heteroclinic orbit transfers to the function level (mu=4)", ok,
           f"seq ratio [{min(ratios):.5f}, {max(ratios):.5f}] vs 1/4, "
           f"end gaps {het_cert.forward.end_gap:.1e}/{het_cert.backward.end_gap:.1e}")


def test_criterion_09_left_axis_gap_bound(capsys, homo):
    # two drivers equal right of k0 = -10, sequence gap exactly g left
    # of it; the trajectory gap left of theta_{k0} obeys the
    # contraction-margin bound with a 10% quadrature allowance
    star = 2.9 / 3.9
    g = 1e-3
    k_lo, k_hi = -80, 15
    ks = np.arange(k_lo, k_hi + 1)
    base = np.full((len(ks), 2), star)
    pert = base.copy()
    pert[ks < -10] += g / math.sqrt(2.0)
    lim = np.array([star, star])
    alpha = DriverOrbit(k_lo, k_hi, base, lim, lim, 1e-8)
    beta = DriverOrbit(k_lo, k_hi, pert, lim + g / math.sqrt(2.0), lim, 1e-8)

    traj_a = solve_bounded(replace(homo.system, driver=alpha), (-30, 10))
    traj_b = solve_bounded(replace(homo.system, driver=beta), (-30, 10))
    cut = 4001  # samples through t = theta_{-10} = -15
    sup_gap = float(np.linalg.norm(traj_a.samples[:cut] - traj_b.samples[:cut], axis=1).max())
    bound = unstable_gap_bound(homo.system, g) * 1.1
    ok = abs(bound - 9.92e-3) <= 1e-4 and sup_gap <= bound
    report(capsys, 9, "left-axis trajectory gap bound from a 1e-3 driver gap", ok,
           f"sup gap {sup_gap:.3e} <= bound {bound:.3e}")


def test_criterion_10_hyperbolicity_battery(capsys):
    template, catalog = transfer_catalog()
    good = verify_hyperbolic_transfer(template, catalog)
    alpha = catalog[0][0]
    control = verify_hyperbolic_transfer(template, [(alpha, alpha, alpha)])
    ok = (
        good.passed is True
        and len(good.entries) == 3
        and control.passed is False
        and control.entries[0].distinctness == 0.0
    )
    report(capsys, 10, "hyperbolic catalog passes, identical-driver control fails", ok,
           f"{len(good.entries)} entries pass, control distinctness "
           f"{control.entries[0].distinctness}")


def test_criterion_11_determinism(capsys, tmp_path):
    names = ["beta.csv", "traj_beta.csv", "alpha.csv", "traj_alpha.csv", "certificate.json"]
    dirs = []
    for sub in ("one", "two"):
        out = tmp_path / sub
        code = main(["example4", "--mode", "homoclinic", "--out", str(out)])
        capsys.readouterr()
        assert code == 0
        dirs.append(out)
    match, mismatch, errors = filecmp.cmpfiles(dirs[0], dirs[1], names, shallow=False)
    ok = sorted(match) == sorted(names) and not mismatch and not errors
    report(capsys, 11, "repeated reference runs are byte-identical", ok,
           f"{len(match)}/{len(names)} artifacts identical")
