"""Bounded-solution solver tests.

The f = 0 cases have closed forms: one interval obeys variation of
constants z(t) = e^{A(t-theta)} z0 + A^{-1}(e^{A(t-theta)} - I) alpha,
and a constant driver pins the bounded solution at the equilibrium
-A^{-1} alpha*. The full nonlinear case is cross-checked between the
two methods and through the residual defect.
"""

from dataclasses import replace

import numpy as np
import pytest

from epcag import (
    SampledTrajectory,
    assemble_system,
    build_orbit,
    contraction_margin,
    custom_contract,
    default_pad,
    logistic_map,
    make_schedule,
    mat_exp,
    pair_orbits,
    reference_envelope,
    reference_matrix,
    reference_schedule,
    residual_defect,
    solution_bound,
    solve_bounded,
    step_interval,
    zero_contract,
)
from epcag.errors import (
    GridMismatchError,
    InnerDivergenceError,
    OutOfRangeError,
    PadTooSmallError,
)


def constant_driver(value=0.75, k=60):
    orb = build_orbit(logistic_map(4.0), "fixed", value, k_min=-k, k_max=k)
    return pair_orbits(orb, orb)


def linear_system(zeta_fraction=1.0 / 3.0):
    return assemble_system(
        reference_matrix(),
        make_schedule(1.5, 0.0, zeta_fraction),
        zero_contract(2),
        constant_driver(),
        envelope=reference_envelope(),
        spot_samples=0,
    )


class TestStepInterval:
    def test_left_node_argument_needs_one_pass(self):
        # zeta at the left node: w is z0 itself, no iteration to do
        sys = linear_system(zeta_fraction=0.0)
        z0 = np.array([0.3, -0.2])
        samples, w, inner = step_interval(sys, 0, z0)
        assert inner == 1
        assert np.array_equal(w, z0)

    def test_variation_of_constants(self):
        sys = linear_system()
        z0 = np.array([0.4, 0.1])
        alpha = np.array([0.75, 0.75])
        samples, w, inner = step_interval(sys, 0, z0, substeps=200)
        a = reference_matrix()
        for j in (1, 50, 133, 200):
            t = j * 1.5 / 200
            phi = mat_exp(a, t)
            expected = phi @ z0 + np.linalg.solve(a, (phi - np.eye(2)) @ alpha)
            assert np.abs(samples[j] - expected).max() <= 1e-9

    def test_reference_interval_inner_iterations(self, homo):
        samples, w, inner = step_interval(homo.system, 0, np.zeros(2), tol=1e-12)
        # contraction factor ~1e-2 per sweep: 12 decades in at most 8 sweeps
        assert inner <= 8
        assert samples.shape == (201, 2)
        # zeta_0 = 0.5 sits between grid points 66 and 67; the frozen
        # argument must agree with linear interpolation to O(h^2)
        lerp = samples[66] + (0.5 / 0.0075 - 66.0) * (samples[67] - samples[66])
        assert np.abs(w - lerp).max() <= 1e-3

    def test_inner_divergence_guard(self):
        # a frozen-argument gain this large defeats the fixed point loop
        wild = custom_contract(lambda t, x, y: 5.0 * y, 10.0, 0.0, 5.0)
        sys = assemble_system(
            reference_matrix(),
            reference_schedule(),
            wild,
            constant_driver(),
            envelope=reference_envelope(),
            spot_samples=0,
        )
        with pytest.raises(InnerDivergenceError):
            step_interval(sys, 0, np.array([1.0, 1.0]), max_inner=20)


class TestSolveBounded:
    def test_constant_driver_equilibrium(self):
        sys = linear_system()
        target = np.linalg.solve(reference_matrix(), -np.array([0.75, 0.75]))
        for method in ("picard", "burn_in"):
            traj = solve_bounded(sys, (-3, 3), method=method)
            assert np.abs(traj.samples - target).max() <= 1e-8

    def test_methods_agree_on_interior(self, homo):
        pic = solve_bounded(homo.system, (-10, 10))
        burn = solve_bounded(homo.system, (-10, 10), method="burn_in")
        assert pic.samples.shape == burn.samples.shape == (4001, 2)
        quarter = 1000
        gap = np.abs(pic.samples[quarter:-quarter] - burn.samples[quarter:-quarter]).max()
        assert gap <= 1e-6
        wp, wb = dict(pic.frozen_args), dict(burn.frozen_args)
        assert wp.keys() == wb.keys()
        worst_w = max(float(np.abs(wp[k] - wb[k]).max()) for k in wp)
        assert worst_w <= 1e-6

    def test_picard_contraction_diagnostics(self, homo_traj):
        meta = homo_traj.meta
        assert meta["method"] == "picard"
        assert meta["iterations"] <= 12
        deltas = meta["iterate_deltas"]
        assert deltas[-1] <= 1e-10
        for prev, cur in zip(deltas[1:], deltas[2:]):
            assert cur / prev <= 0.30

    def test_sup_norm_bound(self, homo, homo_traj):
        bound = solution_bound(homo.system)
        assert homo_traj.meta["sup_norm"] <= bound + 1e-9
        assert bound == pytest.approx(16.2410019, rel=1e-6)

    def test_interval_consistency(self, homo, homo_traj):
        # marching one interval from a sampled node reproduces the next node
        idx = (0 - (-20)) * 200
        z0 = homo_traj.samples[idx]
        seg, w, _ = step_interval(homo.system, 0, z0)
        assert np.abs(seg[-1] - homo_traj.samples[idx + 200]).max() <= 1e-8
        assert np.abs(w - dict(homo_traj.frozen_args)[0]).max() <= 1e-8

    def test_times_and_window(self, homo_traj):
        assert homo_traj.t0 == -30.0
        assert homo_traj.t1 == 30.0
        assert homo_traj.times[0] == -30.0
        assert homo_traj.times[-1] == pytest.approx(30.0, abs=1e-9)
        assert homo_traj.meta["k_window"] == (-20, 20)

    def test_default_pad_reference_value(self, homo):
        assert default_pad(homo.system, 1e-8) == 42

    def test_pad_too_small(self, homo):
        with pytest.raises(PadTooSmallError):
            solve_bounded(homo.system, (-2, 2), pad=1)

    def test_window_validation(self, homo):
        with pytest.raises(OutOfRangeError):
            solve_bounded(homo.system, (2, -2))
        with pytest.raises(OutOfRangeError):
            solve_bounded(homo.system, (-1.5, 2.0))

    def test_unknown_method(self, homo):
        with pytest.raises(OutOfRangeError):
            solve_bounded(homo.system, (-2, 2), method="rk45")


class TestResidualDefect:
    def test_reference_defect(self, homo, homo_traj):
        assert residual_defect(homo.system, homo_traj) <= 1e-6

    def test_corrupted_sample_detected(self, homo, homo_traj):
        samples = homo_traj.samples.copy()
        samples[4100, 0] += 0.1  # mid-interval, well away from the nodes
        bad = replace(homo_traj, samples=samples)
        assert residual_defect(homo.system, bad) >= 0.01

    def test_step_mismatch(self, homo, homo_traj):
        with pytest.raises(GridMismatchError):
            residual_defect(homo.system, replace(homo_traj, step=0.7))

    def test_partial_interval_rejected(self, homo, homo_traj):
        clipped = replace(homo_traj, samples=homo_traj.samples[:-3])
        with pytest.raises(GridMismatchError):
            residual_defect(homo.system, clipped)

    def test_missing_frozen_argument(self, homo, homo_traj):
        frozen = tuple((k, w) for k, w in homo_traj.frozen_args if k != 0)
        with pytest.raises(GridMismatchError):
            residual_defect(homo.system, replace(homo_traj, frozen_args=frozen))


class TestConvergenceOrder:
    def test_fourth_order_in_the_substep(self, homo):
        # Richardson: quadrupling the substep count must shrink the gap
        # to the finest grid by about 2^4 per refinement
        fine = solve_bounded(homo.system, (-2, 2), substeps=400)
        mid = solve_bounded(homo.system, (-2, 2), substeps=200)
        coarse = solve_bounded(homo.system, (-2, 2), substeps=100)
        e_mid = np.abs(mid.samples[::2] - fine.samples[::4]).max()
        e_coarse = np.abs(coarse.samples - fine.samples[::4]).max()
        assert 8.0 <= e_coarse / e_mid <= 40.0

    def test_margin_positive(self, homo):
        assert contraction_margin(homo.system) == pytest.approx(0.5 - 0.1325175, abs=1e-6)
