"""Config parsing, artifact emission, and command execution.

Configs are JSON documents with the shape

    {
      "command": "solve",
      "system": {
        "matrix": [[2, -2], [5, -3]],
        "schedule": {"omega": 1.5, "origin": 0.0, "zeta_fraction": 0.333...},
        "f": {"catalog": "example4"},
        "envelope": {"n_const": 3.3129375336, "rate": 0.5, "horizon": 60.0}
      },
      "driver": {"map": "logistic", "mu": 3.9, "kind": "homoclinic",
                 "seed": 0.2564..., "branch": "upper_H"},
      "targets": [ ...driver blocks, certify only... ],
      "numeric": {"substeps": 200, "tol": 1e-8, "window": 30,
                  "method": "picard", "cert_tol": 1e-4},
      "out_dir": "results"
    }

The envelope block is optional (estimated from the matrix when absent),
as are the driver's k_min/k_max (sized to cover the solve window plus
the lead-in pad). Scalar map orbits drive both components of a 2-D
system; higher dimensions are library-API territory.

All files are written atomically (temp file + rename), with %.17g
number formatting and LF line endings, so identical runs produce
byte-identical artifacts.
"""

from __future__ import annotations

import json
import math
import os
import sys as _sys
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .analysis import ConnectionCertificate, certify_connection
from .driver import DriverOrbit, ScalarMap, build_orbit, pair_orbits
from .errors import EpcagError, IoError, ParseError, ValidationError
from .linear import DecayEnvelope
from .nonlinearity import example_contract, zero_contract
from .reference import heteroclinic_scenario, homoclinic_scenario
from .schedule import make_schedule
from .solver import SampledTrajectory, solve_bounded
from .system import assemble_system, check_assumptions, proof_constants

COMMANDS = ("check", "constants", "orbit", "solve", "certify", "example4")
MODES = ("homoclinic", "heteroclinic")
ORBIT_KINDS = ("fixed", "homoclinic", "heteroclinic")
METHODS = ("picard", "burn_in")
F_CATALOGS = ("example4", "zero")
BRANCHES = ("lower_G", "upper_H")


@dataclass(frozen=True)
class EnvelopeSpec:
    n_const: float
    rate: float
    horizon: float = 60.0


@dataclass(frozen=True)
class SystemSpec:
    matrix: tuple
    omega: float
    origin: float
    zeta_fraction: float
    f_catalog: str = "example4"
    envelope: EnvelopeSpec | None = None


@dataclass(frozen=True)
class DriverSpec:
    map: str = "logistic"
    mu: float = 3.9
    kind: str = "homoclinic"
    seed: float = 0.0
    branch: str | None = None
    k_min: int | None = None
    k_max: int | None = None


@dataclass(frozen=True)
class NumericSpec:
    substeps: int = 200
    tol: float = 1e-8
    window: int = 30
    method: str = "picard"
    cert_tol: float = 1e-4


@dataclass(frozen=True)
class RunSpec:
    command: str
    mode: str | None = None
    system: SystemSpec | None = None
    driver: DriverSpec | None = None
    targets: tuple = ()
    numeric: NumericSpec = field(default_factory=NumericSpec)
    out_dir: str | None = None


# ---------------------------------------------------------------------------
# parsing


def _require_dict(obj, fieldname):
    if not isinstance(obj, dict):
        raise ValidationError(fieldname, "must be an object")
    return obj


def _check_keys(obj: dict, allowed, fieldname: str) -> None:
    for key in obj:
        if key not in allowed:
            prefix = f"{fieldname}.{key}" if fieldname else key
            raise ValidationError(prefix, "unknown field")


def _real(obj, key, fieldname, default=None, required=False):
    if key not in obj:
        if required:
            raise ValidationError(fieldname, "missing required field")
        return default
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ValidationError(fieldname, "must be a finite number")
    return float(v)


def _integer(obj, key, fieldname, default=None, required=False):
    if key not in obj:
        if required:
            raise ValidationError(fieldname, "missing required field")
        return default
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise ValidationError(fieldname, "must be an integer")
    return v


def _choice(obj, key, fieldname, options, default=None, required=False):
    if key not in obj:
        if required:
            raise ValidationError(fieldname, "missing required field")
        return default
    v = obj[key]
    if v not in options:
        raise ValidationError(fieldname, f"must be one of {', '.join(options)}")
    return v


def _parse_matrix(obj) -> tuple:
    rows = obj.get("matrix")
    if not isinstance(rows, list) or not rows:
        raise ValidationError("system.matrix", "must be a nonempty array of rows")
    m = len(rows)
    out = []
    for row in rows:
        if not isinstance(row, list) or len(row) != m:
            raise ValidationError("system.matrix", "must be square")
        for x in row:
            if isinstance(x, bool) or not isinstance(x, (int, float)) or not math.isfinite(x):
                raise ValidationError("system.matrix", "entries must be finite numbers")
        out.append(tuple(float(x) for x in row))
    return tuple(out)


def _parse_system(obj) -> SystemSpec:
    obj = _require_dict(obj, "system")
    _check_keys(obj, {"matrix", "schedule", "f", "envelope"}, "system")
    matrix = _parse_matrix(obj)
    sched = _require_dict(obj.get("schedule", {}), "schedule")
    _check_keys(sched, {"omega", "origin", "zeta_fraction"}, "schedule")
    omega = _real(sched, "omega", "schedule.omega", required=True)
    if omega <= 0:
        raise ValidationError("schedule.omega", "must be positive")
    origin = _real(sched, "origin", "schedule.origin", default=0.0)
    zf = _real(sched, "zeta_fraction", "schedule.zeta_fraction", default=0.0)
    if not 0.0 <= zf <= 1.0:
        raise ValidationError("schedule.zeta_fraction", "must lie in [0, 1]")
    fblock = _require_dict(obj.get("f", {}), "f")
    _check_keys(fblock, {"catalog"}, "f")
    catalog = _choice(fblock, "catalog", "f.catalog", F_CATALOGS, default="example4")
    env = None
    if "envelope" in obj and obj["envelope"] is not None:
        eb = _require_dict(obj["envelope"], "envelope")
        _check_keys(eb, {"n_const", "rate", "horizon"}, "envelope")
        n_const = _real(eb, "n_const", "envelope.n_const", required=True)
        rate = _real(eb, "rate", "envelope.rate", required=True)
        horizon = _real(eb, "horizon", "envelope.horizon", default=60.0)
        if n_const < 1.0:
            raise ValidationError("envelope.n_const", "must be >= 1")
        if rate <= 0.0:
            raise ValidationError("envelope.rate", "must be positive")
        if horizon <= 0.0:
            raise ValidationError("envelope.horizon", "must be positive")
        env = EnvelopeSpec(n_const=n_const, rate=rate, horizon=horizon)
    return SystemSpec(
        matrix=matrix, omega=omega, origin=origin, zeta_fraction=zf,
        f_catalog=catalog, envelope=env,
    )


def _parse_driver(obj, fieldname="driver") -> DriverSpec:
    obj = _require_dict(obj, fieldname)
    _check_keys(obj, {"map", "mu", "kind", "seed", "branch", "k_min", "k_max"}, fieldname)
    map_name = _choice(obj, "map", f"{fieldname}.map", ("logistic",), default="logistic")
    mu = _real(obj, "mu", f"{fieldname}.mu", required=True)
    if not 0.0 < mu <= 4.0:
        raise ValidationError(f"{fieldname}.mu", "must lie in (0, 4]")
    kind = _choice(obj, "kind", f"{fieldname}.kind", ORBIT_KINDS, required=True)
    seed = _real(obj, "seed", f"{fieldname}.seed", required=True)
    branch = _choice(obj, "branch", f"{fieldname}.branch", BRANCHES, default=None)
    if kind != "fixed" and branch is None:
        raise ValidationError(f"{fieldname}.branch", f"required for {kind} orbits")
    k_min = _integer(obj, "k_min", f"{fieldname}.k_min")
    k_max = _integer(obj, "k_max", f"{fieldname}.k_max")
    if (k_min is None) != (k_max is None):
        raise ValidationError(f"{fieldname}.k_min", "k_min and k_max must be given together")
    if k_min is not None and k_min >= k_max:
        raise ValidationError(f"{fieldname}.k_min", "must be below k_max")
    return DriverSpec(map=map_name, mu=mu, kind=kind, seed=seed, branch=branch,
                      k_min=k_min, k_max=k_max)


def _parse_numeric(obj) -> NumericSpec:
    obj = _require_dict(obj, "numeric")
    _check_keys(obj, {"substeps", "tol", "window", "method", "cert_tol"}, "numeric")
    substeps = _integer(obj, "substeps", "numeric.substeps", default=200)
    if substeps < 4:
        raise ValidationError("numeric.substeps", "must be at least 4")
    tol = _real(obj, "tol", "numeric.tol", default=1e-8)
    if tol <= 0:
        raise ValidationError("numeric.tol", "must be positive")
    window = _integer(obj, "window", "numeric.window", default=30)
    if window < 1:
        raise ValidationError("numeric.window", "must be at least 1")
    method = _choice(obj, "method", "numeric.method", METHODS, default="picard")
    cert_tol = _real(obj, "cert_tol", "numeric.cert_tol", default=1e-4)
    if cert_tol <= 0:
        raise ValidationError("numeric.cert_tol", "must be positive")
    return NumericSpec(substeps=substeps, tol=tol, window=window, method=method,
                       cert_tol=cert_tol)


def parse_config(text: str) -> RunSpec:
    """Parse and validate a JSON config into a RunSpec with defaults."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, line=e.lineno, column=e.colno) from None
    if not isinstance(obj, dict):
        raise ParseError("top level must be an object")
    _check_keys(obj, {"command", "mode", "system", "driver", "targets", "numeric", "out_dir"}, "")
    command = _choice(obj, "command", "command", COMMANDS, required=True)
    mode = _choice(obj, "mode", "mode", MODES, default=None)
    if command == "example4" and mode is None:
        mode = "homoclinic"

    system = _parse_system(obj["system"]) if obj.get("system") is not None else None
    driver = _parse_driver(obj["driver"]) if obj.get("driver") is not None else None
    targets = ()
    if obj.get("targets") is not None:
        raw = obj["targets"]
        if not isinstance(raw, list):
            raise ValidationError("targets", "must be an array of driver blocks")
        targets = tuple(_parse_driver(t, f"targets[{i}]") for i, t in enumerate(raw))
    numeric = _parse_numeric(obj.get("numeric", {}))
    out_dir = obj.get("out_dir")
    if out_dir is not None and not isinstance(out_dir, str):
        raise ValidationError("out_dir", "must be a string path")

    needs_system = command in ("check", "constants", "solve", "certify")
    if needs_system and system is None:
        raise ValidationError("system", f"required for the {command} command")
    if command in ("check", "constants", "orbit", "solve", "certify") and driver is None:
        raise ValidationError("driver", f"required for the {command} command")
    if command == "certify":
        if not 1 <= len(targets) <= 2:
            raise ValidationError("targets", "certify needs one or two target orbits")
    elif targets:
        raise ValidationError("targets", f"not used by the {command} command")
    return RunSpec(command=command, mode=mode, system=system, driver=driver,
                   targets=targets, numeric=numeric, out_dir=out_dir)


def serialize_config(spec: RunSpec) -> str:
    """Inverse of parse_config: parse_config(serialize_config(s)) == s."""
    obj: dict = {"command": spec.command}
    if spec.mode is not None:
        obj["mode"] = spec.mode
    if spec.system is not None:
        s = spec.system
        block = {
            "matrix": [list(row) for row in s.matrix],
            "schedule": {"omega": s.omega, "origin": s.origin, "zeta_fraction": s.zeta_fraction},
            "f": {"catalog": s.f_catalog},
        }
        if s.envelope is not None:
            block["envelope"] = {
                "n_const": s.envelope.n_const,
                "rate": s.envelope.rate,
                "horizon": s.envelope.horizon,
            }
        obj["system"] = block
    if spec.driver is not None:
        obj["driver"] = _driver_dict(spec.driver)
    if spec.targets:
        obj["targets"] = [_driver_dict(t) for t in spec.targets]
    n = spec.numeric
    obj["numeric"] = {"substeps": n.substeps, "tol": n.tol, "window": n.window,
                      "method": n.method, "cert_tol": n.cert_tol}
    if spec.out_dir is not None:
        obj["out_dir"] = spec.out_dir
    return json.dumps(obj, indent=2) + "\n"


def _driver_dict(d: DriverSpec) -> dict:
    out = {"map": d.map, "mu": d.mu, "kind": d.kind, "seed": d.seed}
    if d.branch is not None:
        out["branch"] = d.branch
    if d.k_min is not None:
        out["k_min"] = d.k_min
        out["k_max"] = d.k_max
    return out


# ---------------------------------------------------------------------------
# building runtime objects from specs


def _auto_range(spec: RunSpec, sys_parts) -> tuple[int, int]:
    """Coverage window: the solve window plus the lead-in pad implied by
    the system constants, with two intervals of headroom."""
    envelope, contract = sys_parts
    window = spec.numeric.window
    mu = spec.driver.mu
    m_f_orbit = math.hypot(mu / 4.0, mu / 4.0)
    m_phi = envelope.n_const * (contract.bound_mf + m_f_orbit) / envelope.rate
    margin = envelope.rate - envelope.n_const * (contract.lip_x + contract.lip_y)
    if margin <= 0:
        pad = 1
    else:
        pad = math.ceil(
            math.log(2.0 * m_phi * envelope.n_const / spec.numeric.tol)
            / (margin * spec.system.omega)
        )
    return -(window + pad + 2), window + 2


def _build_scalar_orbit(dspec: DriverSpec, k_min: int, k_max: int) -> DriverOrbit:
    return build_orbit(
        ScalarMap(dspec.map, dspec.mu),
        dspec.kind,
        dspec.seed,
        backward_branch=dspec.branch,
        k_min=k_min,
        k_max=k_max,
    )


def _build_system_and_driver(spec: RunSpec):
    s = spec.system
    a = np.array(s.matrix)
    if a.shape != (2, 2):
        raise ValidationError(
            "system.matrix",
            "config-driven runs pair one scalar orbit into two components; the matrix must be 2x2",
        )
    schedule = make_schedule(s.omega, s.origin, s.zeta_fraction)
    contract = example_contract() if s.f_catalog == "example4" else zero_contract(2)
    envelope = None
    if s.envelope is not None:
        envelope = DecayEnvelope(
            n_const=s.envelope.n_const, rate=s.envelope.rate,
            validated_horizon=s.envelope.horizon, sample_count=0,
        )
    else:
        from .linear import estimate_decay_envelope

        envelope = estimate_decay_envelope(a)

    def paired(dspec: DriverSpec) -> DriverOrbit:
        if dspec.k_min is not None:
            k_min, k_max = dspec.k_min, dspec.k_max
        else:
            k_min, k_max = _auto_range(spec, (envelope, contract))
        scalar = _build_scalar_orbit(dspec, k_min, k_max)
        return pair_orbits(scalar, scalar)

    driver = paired(spec.driver)
    system = assemble_system(a, schedule, contract, driver, envelope=envelope)
    targets = tuple(paired(t) for t in spec.targets)
    return system, driver, targets


# ---------------------------------------------------------------------------
# artifact emission

_FMT = "%.17g"


def _atomic_write(path: Path, text: str) -> None:
    tmp = Path(str(path) + ".tmp")
    try:
        with open(tmp, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except OSError as e:
        raise IoError(f"cannot write {path}: {e}") from None


def _write_json(path: Path, obj) -> None:
    _atomic_write(path, json.dumps(obj, indent=2) + "\n")


def export_orbit_csv(orbit: DriverOrbit, path) -> None:
    """k, alpha_1, ..., alpha_m rows over the orbit's stored window."""
    path = Path(path)
    header = "k," + ",".join(f"alpha_{i + 1}" for i in range(orbit.dim))
    lines = [header]
    for i, k in enumerate(range(orbit.k_min, orbit.k_max + 1)):
        vals = ",".join(_FMT % x for x in orbit.values[i])
        lines.append(f"{k},{vals}")
    _atomic_write(path, "\n".join(lines) + "\n")


def export_trajectory_csv(traj: SampledTrajectory, path) -> None:
    """t, z_1, ..., z_m, interval_k rows; the last row's node belongs to
    the right interval, matching the half-open convention."""
    path = Path(path)
    try:
        k_lo, _ = traj.meta["k_window"]
        substeps = round(traj.meta["omega"] / traj.step)
    except KeyError:
        raise IoError("trajectory lacks schedule metadata (k_window/omega)") from None
    dim = traj.samples.shape[1]
    header = "t," + ",".join(f"z_{i + 1}" for i in range(dim)) + ",interval_k"
    ts = traj.times
    lines = [header]
    for r in range(len(traj.samples)):
        vals = ",".join(_FMT % x for x in traj.samples[r])
        lines.append(f"{_FMT % ts[r]},{vals},{k_lo + r // substeps}")
    _atomic_write(path, "\n".join(lines) + "\n")


def export_frozen_csv(traj: SampledTrajectory, path) -> None:
    """k, zeta_k, w_1, ..., w_m rows for the stored frozen arguments."""
    path = Path(path)
    try:
        omega = traj.meta["omega"]
        origin = traj.meta["origin"]
        zf = traj.meta["zeta_fraction"]
    except KeyError:
        raise IoError("trajectory lacks schedule metadata (omega/origin/zeta_fraction)") from None
    if not traj.frozen_args:
        raise IoError("trajectory carries no frozen arguments")
    dim = len(traj.frozen_args[0][1])
    header = "k,zeta_k," + ",".join(f"w_{i + 1}" for i in range(dim))
    lines = [header]
    for k, w in traj.frozen_args:
        zeta = origin + k * omega + zf * omega
        vals = ",".join(_FMT % x for x in w)
        lines.append(f"{k},{_FMT % zeta},{vals}")
    _atomic_write(path, "\n".join(lines) + "\n")


def certificate_dict(cert: ConnectionCertificate, envelope_n: float, envelope_rate: float) -> dict:
    pc = cert.constants
    return {
        "kind": cert.kind,
        "verdict": cert.verdict,
        "forward": {
            "end_gap": cert.forward.end_gap,
            "fitted_rate": cert.forward.fitted_rate,
            "fit_quality": cert.forward.fit_quality,
        },
        "backward": {
            "end_gap": cert.backward.end_gap,
            "fitted_rate": cert.backward.fitted_rate,
            "fit_quality": cert.backward.fit_quality,
        },
        "distinctness": cert.distinctness,
        "constants": {
            "N": envelope_n,
            "lambda": envelope_rate,
            "M_phi": pc.m_phi,
            "R1": pc.r1,
            "R2": pc.r2,
            "kappa_pi": pc.kappa_pi,
        },
    }


# ---------------------------------------------------------------------------
# command execution


def _out_dir(spec: RunSpec) -> Path:
    root = spec.out_dir or os.environ.get("EPCAG_OUT_DIR") or os.getcwd()
    path = Path(root)
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise IoError(f"cannot create output directory {path}: {e}") from None
    return path


def _emit(path: Path, writer, *args) -> None:
    writer(*args, path)
    print(f"wrote {path}")


def _run_certification(system, beta, alphas, kind, numeric: NumericSpec, out: Path) -> int:
    n = numeric
    cert = certify_connection(
        system, alphas, beta, kind, n.cert_tol,
        window=n.window, substeps=n.substeps, solve_tol=n.tol, method=n.method,
    )
    t_window = (-n.window, n.window)

    def solve(orbit):
        return solve_bounded(replace(system, driver=orbit), t_window, n.substeps, n.tol, n.method)

    _emit(out / "beta.csv", export_orbit_csv, beta)
    _emit(out / "traj_beta.csv", export_trajectory_csv, solve(beta))
    if kind == "homoclinic":
        _emit(out / "alpha.csv", export_orbit_csv, alphas[0])
        _emit(out / "traj_alpha.csv", export_trajectory_csv, solve(alphas[0]))
    else:
        _emit(out / "alpha1.csv", export_orbit_csv, alphas[0])
        _emit(out / "alpha2.csv", export_orbit_csv, alphas[1])
        _emit(out / "traj_alpha1.csv", export_trajectory_csv, solve(alphas[0]))
        _emit(out / "traj_alpha2.csv", export_trajectory_csv, solve(alphas[1]))
    cert_path = out / "certificate.json"
    _write_json(cert_path, certificate_dict(cert, system.envelope.n_const, system.envelope.rate))
    print(f"wrote {cert_path}")
    print(f"verdict: {'pass' if cert.verdict else 'fail'} "
          f"(forward end gap {cert.forward.end_gap:.3g}, backward {cert.backward.end_gap:.3g}, "
          f"distinctness {cert.distinctness:.3g})")
    return 0 if cert.verdict else 2


def run(spec: RunSpec) -> int:
    """Execute a RunSpec: 0 = pass, 2 = computed but verdict/check failed,
    1 = error (diagnostic on stderr)."""
    try:
        return _run(spec)
    except EpcagError as e:
        print(f"error: {e}", file=_sys.stderr)
        return 1
    except OSError as e:
        print(f"error: {e}", file=_sys.stderr)
        return 1


def _run(spec: RunSpec) -> int:
    out = _out_dir(spec)
    n = spec.numeric

    if spec.command == "example4":
        maker = homoclinic_scenario if spec.mode == "homoclinic" else heteroclinic_scenario
        scenario = maker(window=n.window, tol=n.tol)
        return _run_certification(
            scenario.system, scenario.beta, scenario.alphas, scenario.kind, n, out
        )

    if spec.command == "orbit":
        d = spec.driver
        k_min = d.k_min if d.k_min is not None else -40
        k_max = d.k_max if d.k_max is not None else 40
        orbit = _build_scalar_orbit(d, k_min, k_max)
        _emit(out / "orbit.csv", export_orbit_csv, orbit)
        return 0

    system, driver, targets = _build_system_and_driver(spec)

    if spec.command == "check":
        report = check_assumptions(system)
        payload = {
            "a4_lhs": report.a4_lhs, "a4_margin": report.a4_margin, "a4_pass": report.a4_pass,
            "a5_lhs": report.a5_lhs, "a5_margin": report.a5_margin, "a5_pass": report.a5_pass,
            "f_bound": report.f_bound, "lip_x": report.lip_x, "lip_y": report.lip_y,
            "passed": report.passed, "notes": list(report.notes),
        }
        path = out / "check_report.json"
        _write_json(path, payload)
        print(f"wrote {path}")
        print(f"a4_lhs={report.a4_lhs:.6g} a5_lhs={report.a5_lhs:.6g} "
              f"passed={'yes' if report.passed else 'no'}")
        return 0 if report.passed else 2

    if spec.command == "constants":
        pc = proof_constants(system)
        payload = {
            "map_sup": pc.map_sup, "m_phi": pc.m_phi, "r1": pc.r1, "r2": pc.r2,
            "sigma_max": pc.sigma_max, "h_bound": pc.h_bound,
            "kappa_pi": pc.kappa_pi, "eta_max": pc.eta_max,
        }
        path = out / "constants.json"
        _write_json(path, payload)
        print(f"wrote {path}")
        return 0

    if spec.command == "solve":
        traj = solve_bounded(system, (-n.window, n.window), n.substeps, n.tol, n.method)
        _emit(out / "trajectory.csv", export_trajectory_csv, traj)
        _emit(out / "frozen_args.csv", export_frozen_csv, traj)
        print(f"sup norm {traj.meta['sup_norm']:.6g}, "
              f"{traj.meta['iterations']} iterations, tail bound {traj.meta['tail_bound']:.3g}")
        return 0

    # certify
    kind = "homoclinic" if len(targets) == 1 else "heteroclinic"
    return _run_certification(system, driver, targets, kind, n, out)
