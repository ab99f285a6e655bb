"""Gap profiles, decay fits, and connection certificates."""

import math
from dataclasses import replace

import numpy as np
import pytest

from epcag import (
    certify_connection,
    contraction_margin,
    difference_profile,
    fit_decay_rate,
    proof_constants,
    solve_bounded,
    transfer_catalog,
    unstable_gap_bound,
    verify_hyperbolic_transfer,
)
from epcag.errors import (
    AssumptionFailureError,
    DegenerateTailError,
    GridMismatchError,
    OutOfRangeError,
    PremiseFailureError,
)


def synthetic_profile(fn, t0=0.0, t1=30.0, n=601):
    ts = np.linspace(t0, t1, n)
    return [(float(t), float(fn(t))) for t in ts]


class TestDifferenceProfile:
    def test_identical_trajectories(self, homo_traj):
        prof = difference_profile(homo_traj, homo_traj)
        assert len(prof) == len(homo_traj.samples)
        assert all(g == 0.0 for _, g in prof)
        assert prof[0][0] == homo_traj.t0

    def test_constant_offset(self, homo_traj):
        shifted = replace(homo_traj, samples=homo_traj.samples + np.array([0.3, 0.4]))
        prof = difference_profile(homo_traj, shifted)
        gaps = np.array([g for _, g in prof])
        assert gaps == pytest.approx(np.full(len(prof), 0.5), abs=1e-12)

    def test_symmetry(self, homo_traj):
        shifted = replace(homo_traj, samples=homo_traj.samples * 1.1)
        ab = difference_profile(homo_traj, shifted)
        ba = difference_profile(shifted, homo_traj)
        assert ab == ba

    def test_grid_mismatch(self, homo_traj):
        clipped = replace(homo_traj, samples=homo_traj.samples[:-1])
        with pytest.raises(GridMismatchError):
            difference_profile(homo_traj, clipped)
        moved = replace(homo_traj, t0=homo_traj.t0 + 0.5)
        with pytest.raises(GridMismatchError):
            difference_profile(homo_traj, moved)


class TestFitDecayRate:
    def test_pure_exponential(self):
        rate, quality = fit_decay_rate(synthetic_profile(lambda t: math.exp(-0.5 * t)))
        assert rate == pytest.approx(0.5, abs=1e-6)
        assert quality >= 0.999999

    def test_oscillating_envelope(self):
        prof = synthetic_profile(lambda t: math.exp(-0.5 * t) * (2.0 + math.sin(t)))
        rate, quality = fit_decay_rate(prof)
        assert rate == pytest.approx(0.5, abs=0.05)
        assert quality >= 0.9

    def test_descending_time_axis(self):
        # a backward profile ends at -inf; decay toward the end is still
        # reported as a positive rate
        prof = synthetic_profile(lambda t: math.exp(0.5 * t), t0=0.0, t1=-30.0)
        rate, quality = fit_decay_rate(prof)
        assert rate == pytest.approx(0.5, abs=1e-6)
        assert quality >= 0.999999

    def test_growth_gets_negative_rate(self):
        rate, _ = fit_decay_rate(synthetic_profile(lambda t: math.exp(0.3 * t)))
        assert rate == pytest.approx(-0.3, abs=1e-6)

    def test_floored_tail_is_degenerate(self):
        with pytest.raises(DegenerateTailError):
            fit_decay_rate(synthetic_profile(lambda t: 0.0))

    def test_tail_fraction_guard(self):
        prof = synthetic_profile(lambda t: math.exp(-t))
        with pytest.raises(OutOfRangeError):
            fit_decay_rate(prof, tail_fraction=0.0)
        with pytest.raises(OutOfRangeError):
            fit_decay_rate([])


class TestHomoclinicCertificate:
    def test_verdict(self, homo_cert):
        assert homo_cert.verdict is True
        assert homo_cert.kind == "homoclinic"

    def test_end_gaps(self, homo_cert):
        assert homo_cert.forward.end_gap <= 1e-4
        assert homo_cert.backward.end_gap <= 1e-4

    def test_directions_and_sample_order(self, homo_cert):
        fwd, bwd = homo_cert.forward, homo_cert.backward
        assert fwd.direction == "forward"
        assert bwd.direction == "backward"
        # the window counts nodes; node 30 sits at t = 45
        assert fwd.gap_samples[-1][0] == 45.0
        assert bwd.gap_samples[-1][0] == -45.0

    def test_fitted_rates(self, homo_cert):
        # forward decay reflects the linear part (lambda/2 cap in the
        # envelope, observed ~0.52); backward reflects the map's
        # multiplier: ln(1.9)/1.5 = 0.4279
        assert homo_cert.forward.fitted_rate >= 0.33
        assert homo_cert.forward.fit_quality >= 0.9
        assert homo_cert.backward.fitted_rate == pytest.approx(math.log(1.9) / 1.5, abs=0.02)
        assert homo_cert.backward.fit_quality >= 0.9

    def test_stable_envelope_holds(self, homo_cert):
        assert homo_cert.forward.bound_check is True
        assert homo_cert.backward.bound_check is True

    def test_distinctness(self, homo_cert):
        assert homo_cert.distinctness > 10.0 * 1e-4
        assert homo_cert.distinctness == pytest.approx(0.79, abs=0.05)

    def test_constants_travel_with_certificate(self, homo, homo_cert):
        pc = proof_constants(homo.system)
        assert homo_cert.constants.m_phi == pc.m_phi
        assert homo_cert.constants.r1 == pc.r1


class TestHeteroclinicCertificate:
    def test_verdict(self, het_cert):
        assert het_cert.verdict is True
        assert het_cert.kind == "heteroclinic"
        assert het_cert.forward.end_gap <= 1e-4
        assert het_cert.backward.end_gap <= 1e-4

    def test_backward_rate_matches_map_multiplier(self, het_cert):
        # gaps shrink by 1/4 per interval of length 3/2 toward -inf
        assert het_cert.backward.fitted_rate == pytest.approx(math.log(4.0) / 1.5, abs=0.02)

    def test_distinctness(self, het_cert):
        assert het_cert.distinctness > 1e-3


class TestCertifyGuards:
    def test_control_same_driver_fails_distinctness(self, homo):
        cert = certify_connection(homo.system, (homo.beta,), homo.beta, "homoclinic")
        assert cert.verdict is False
        assert cert.distinctness == 0.0
        assert cert.forward.fitted_rate == 0.0
        assert cert.forward.fit_quality == 0.0

    def test_premise_failure(self, homo, het):
        # a mu=3.9 subject can never meet mu=4 fixed targets at the ends
        with pytest.raises(PremiseFailureError):
            certify_connection(homo.system, het.alphas[:1], homo.beta, "homoclinic")

    def test_target_count(self, homo):
        with pytest.raises(OutOfRangeError):
            certify_connection(homo.system, homo.alphas, homo.beta, "heteroclinic")
        with pytest.raises(OutOfRangeError):
            certify_connection(homo.system, homo.alphas + homo.alphas, homo.beta, "homoclinic")

    def test_kind_guard(self, homo):
        with pytest.raises(OutOfRangeError):
            certify_connection(homo.system, homo.alphas, homo.beta, "periodic")


class TestUnstableGapBound:
    def test_formula(self, homo):
        sys = homo.system
        g = 1e-3
        expected = sys.envelope.n_const * g / contraction_margin(sys)
        assert unstable_gap_bound(sys, g) == pytest.approx(expected, rel=1e-12)
        assert expected == pytest.approx(9.0152e-3, rel=1e-4)

    def test_requires_margin(self, homo):
        bad = replace(homo.system, envelope=replace(homo.system.envelope, rate=0.01))
        with pytest.raises(AssumptionFailureError):
            unstable_gap_bound(bad, 1e-3)


class TestTransferBattery:
    def test_empty_catalog_is_vacuous(self, homo):
        report = verify_hyperbolic_transfer(homo.system, [])
        assert report.passed is True
        assert report.entries == ()
        assert len(report.notes) == 1

    def test_control_entry_fails(self, homo):
        alpha = homo.alphas[0]
        report = verify_hyperbolic_transfer(homo.system, [(alpha, alpha, alpha)])
        assert report.passed is False
        assert report.entries[0].passed is False
        assert report.entries[0].distinctness == 0.0

    def test_reference_catalog_passes(self):
        template, catalog = transfer_catalog()
        report = verify_hyperbolic_transfer(template, catalog)
        assert report.passed is True
        assert len(report.entries) == 3
        for entry in report.entries:
            assert entry.forward.end_gap <= 1e-4
            assert entry.backward.end_gap <= 1e-4
            assert entry.distinctness > 1e-3
