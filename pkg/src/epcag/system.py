"""System assembly, sufficient-condition checks, and proof constants.

The assembled object represents

    z'(t) = A z(t) + f(t, z(t), z(gamma(t))) + g(t, alpha)

with gamma(t) = zeta_k and g(t, alpha) = alpha_k on [theta_k, theta_{k+1}).
Sufficient conditions for a unique bounded solution and for the
stability transfer are expressed through the envelope constants
(n_const, rate) = (N, lambda) and the contract constants (M_f, L1, L2):

    (A4)  N (L1 + L2) < lambda
    (A5)  (N/lambda) (2 L1 + L2 e^{lambda w/2}(e^{lambda w}-1)/(1-e^{-lambda w/2})) < 1

with w the interval length. (A5) implies (A4).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .driver import DriverOrbit
from .errors import AssumptionFailureError, ContractViolatedError, DimensionMismatchError
from .linear import DecayEnvelope, estimate_decay_envelope, validate_envelope
from .nonlinearity import NonlinearityContract
from .schedule import Schedule

# deterministic seed for contract spot checks; keeps artifact runs reproducible
SPOT_CHECK_SEED = 20260814

# relative slack allowed on sampled bound/Lipschitz quotients
SPOT_CHECK_SLACK = 1e-6

# margin applied to the orbit-window fallback for the map supremum
CUSTOM_MAP_SUP_MARGIN = 1.1


@dataclass(frozen=True)
class EpcagSystem:
    a: np.ndarray
    envelope: DecayEnvelope
    schedule: Schedule
    f: NonlinearityContract
    driver: DriverOrbit

    @property
    def dim(self) -> int:
        return self.a.shape[0]


@dataclass(frozen=True)
class AssumptionReport:
    f_bound: float
    lip_x: float
    lip_y: float
    a4_lhs: float
    a4_margin: float
    a4_pass: bool
    a5_lhs: float
    a5_margin: float
    a5_pass: bool
    passed: bool
    notes: tuple[str, ...]


@dataclass(frozen=True)
class ProofConstants:
    """Constants appearing in the bounded-solution and transfer estimates.

    map_sup       sup of the driving map over its range (M_F)
    m_phi         sup bound for any bounded solution, N (M_f + M_F) / lambda
    r1, r2        coefficients of the stable-direction gap envelope
    sigma_max     largest admissible sequence-gap scale, 1 / (r1 + r2)
    h_bound       uniform bound used inside the stable-set construction
    kappa_pi      contraction factor of the solution operator, N (L1 + L2) / lambda
    eta_max       largest admissible backward sequence-gap scale, (lambda - N(L1+L2)) / N
    """

    map_sup: float
    m_phi: float
    r1: float
    r2: float
    sigma_max: float
    h_bound: float
    kappa_pi: float
    eta_max: float


def map_supremum(driver: DriverOrbit) -> float:
    """sup over the driver range of the step map, euclidean norm.

    Logistic components admit the closed form mu/4 per component. For
    custom orbits without map metadata the orbit window maximum is used
    with a 10% margin.
    """
    if driver.mus is not None:
        per_comp = np.array([mu / 4.0 for mu in driver.mus])
        return float(np.linalg.norm(per_comp))
    sup = float(np.max(np.linalg.norm(driver.values, axis=1)))
    for lim in (driver.left_limit, driver.right_limit):
        if lim is not None:
            sup = max(sup, float(np.linalg.norm(lim)))
    return CUSTOM_MAP_SUP_MARGIN * sup


def assemble_system(
    a,
    schedule: Schedule,
    f: NonlinearityContract,
    driver: DriverOrbit,
    envelope: DecayEnvelope | None = None,
    spot_samples: int = 1000,
    envelope_slack: float = 1e-2,
) -> EpcagSystem:
    """Validate all parts against each other and freeze them into a system.

    When no envelope is supplied one is estimated from the matrix. Either
    way the envelope is re-validated against the matrix, and the
    contract's declared bound and Lipschitz constants are spot-checked on
    `spot_samples` deterministic pseudo-random points with
    ||x||, ||y|| <= 2 M_phi. A sampled quotient exceeding a declared
    constant by more than a relative 1e-6 raises ContractViolatedError.
    """
    a = np.asarray(a, dtype=float)
    if envelope is None:
        envelope = estimate_decay_envelope(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(f"matrix must be square, got shape {a.shape}")
    dim = a.shape[0]
    if driver.dim != dim:
        raise DimensionMismatchError(
            f"driver dimension {driver.dim} does not match matrix order {dim}"
        )
    probe = np.asarray(f.eval(0.0, np.zeros(dim), np.zeros(dim)), dtype=float)
    if probe.shape != (dim,):
        raise DimensionMismatchError(
            f"contract eval returned shape {probe.shape}, expected ({dim},)"
        )

    report = validate_envelope(a, envelope, envelope.validated_horizon / 4000.0, envelope_slack)
    if not report.passed:
        raise AssumptionFailureError(
            f"envelope failed validation: max ratio {report.max_ratio:.6g} "
            f"at t = {report.t_at_max:.6g}"
        )

    sys = EpcagSystem(a=a, envelope=envelope, schedule=schedule, f=f, driver=driver)
    if spot_samples > 0:
        _spot_check_contract(sys, spot_samples)
    return sys


def _spot_check_contract(sys: EpcagSystem, count: int) -> None:
    rng = np.random.default_rng(SPOT_CHECK_SEED)
    dim = sys.dim
    radius = 2.0 * _m_phi(sys)
    slack = 1.0 + SPOT_CHECK_SLACK

    def _ball(n):
        v = rng.standard_normal((n, dim))
        v /= np.linalg.norm(v, axis=1, keepdims=True)
        r = radius * rng.random(n) ** (1.0 / dim)
        return v * r[:, None]

    ts = rng.uniform(-60.0, 60.0, count)
    xs, ys = _ball(count), _ball(count)
    for i in range(count):
        t = float(ts[i])
        val = np.asarray(sys.f.eval(t, xs[i], ys[i]), dtype=float)
        norm = float(np.linalg.norm(val))
        if norm > sys.f.bound_mf * slack:
            raise ContractViolatedError(
                f"bound_mf: sampled ||f|| = {norm:.6g} exceeds declared "
                f"{sys.f.bound_mf:.6g} at t = {t:.6g}"
            )
        # Lipschitz quotients: random direction plus each coordinate axis,
        # so directional structure cannot hide behind averaging
        for direction in (rng.standard_normal(dim), *np.eye(dim)):
            step = direction / np.linalg.norm(direction) * (1e-3 + rng.random() * 0.5)
            vx = np.asarray(sys.f.eval(t, xs[i] + step, ys[i]), dtype=float)
            qx = float(np.linalg.norm(vx - val) / np.linalg.norm(step))
            if qx > sys.f.lip_x * slack + 1e-15:
                raise ContractViolatedError(
                    f"lip_x: sampled quotient {qx:.6g} exceeds declared {sys.f.lip_x:.6g}"
                )
            vy = np.asarray(sys.f.eval(t, xs[i], ys[i] + step), dtype=float)
            qy = float(np.linalg.norm(vy - val) / np.linalg.norm(step))
            if qy > sys.f.lip_y * slack + 1e-15:
                raise ContractViolatedError(
                    f"lip_y: sampled quotient {qy:.6g} exceeds declared {sys.f.lip_y:.6g}"
                )


def _m_phi(sys: EpcagSystem) -> float:
    env = sys.envelope
    return env.n_const * (sys.f.bound_mf + map_supremum(sys.driver)) / env.rate


def check_assumptions(sys: EpcagSystem) -> AssumptionReport:
    """Evaluate (A1)-(A5) and report margins.

    (A1)-(A3) hold by contract (positive bound, finite Lipschitz
    constants, both spot-checked at assembly); their declared values are
    echoed. (A4) and (A5) are computed from the envelope and schedule.
    """
    env = sys.envelope
    n, lam = env.n_const, env.rate
    l1, l2 = sys.f.lip_x, sys.f.lip_y
    w = sys.schedule.omega
    notes = []

    a4_lhs = n * (l1 + l2)
    a4_pass = a4_lhs < lam
    if not a4_pass:
        notes.append(f"(A4) fails: N(L1+L2) = {a4_lhs:.6g} >= lambda = {lam:.6g}")

    ehalf = math.exp(lam * w / 2.0)
    efull = math.exp(lam * w)
    a5_lhs = (n / lam) * (2.0 * l1 + l2 * ehalf * (efull - 1.0) / (1.0 - 1.0 / ehalf))
    a5_pass = a5_lhs < 1.0
    if not a5_pass:
        notes.append(f"(A5) fails: lhs = {a5_lhs:.6g} >= 1")

    if not (sys.f.bound_mf > 0.0 and math.isfinite(sys.f.bound_mf)):
        notes.append(f"(A1) fails: bound {sys.f.bound_mf!r} not a positive finite number")

    passed = a4_pass and a5_pass and not notes
    return AssumptionReport(
        f_bound=sys.f.bound_mf,
        lip_x=l1,
        lip_y=l2,
        a4_lhs=a4_lhs,
        a4_margin=lam - a4_lhs,
        a4_pass=a4_pass,
        a5_lhs=a5_lhs,
        a5_margin=1.0 - a5_lhs,
        a5_pass=a5_pass,
        passed=passed,
        notes=tuple(notes),
    )


def proof_constants(sys: EpcagSystem) -> ProofConstants:
    """Compute the quantitative constants of the existence and transfer
    estimates. Requires (A4); r1/r2/sigma_max additionally require (A5).
    """
    report = check_assumptions(sys)
    if not report.a4_pass:
        raise AssumptionFailureError(
            f"(A4) fails: N(L1+L2) = {report.a4_lhs:.6g} >= lambda = {sys.envelope.rate:.6g}"
        )
    env = sys.envelope
    n, lam = env.n_const, env.rate
    l1, l2 = sys.f.lip_x, sys.f.lip_y
    map_sup = map_supremum(sys.driver)
    m_phi = n * (sys.f.bound_mf + map_sup) / lam

    if not report.a5_pass:
        raise AssumptionFailureError(
            f"(A5) fails: lhs = {report.a5_lhs:.6g} >= 1; the stable-direction "
            "constants r1, r2 are undefined"
        )
    r1 = 2.0 * n * m_phi / (1.0 - report.a5_lhs)
    efull = math.exp(lam * sys.schedule.omega)
    r2_denom = 1.0 - n * l1 / lam - n * l2 * efull / lam
    r2 = (n / lam) / r2_denom

    return ProofConstants(
        map_sup=map_sup,
        m_phi=m_phi,
        r1=r1,
        r2=r2,
        sigma_max=1.0 / (r1 + r2),
        h_bound=2.0 * n * (m_phi + (sys.f.bound_mf + map_sup) / lam),
        kappa_pi=n * (l1 + l2) / lam,
        eta_max=(lam - n * (l1 + l2)) / n,
    )
