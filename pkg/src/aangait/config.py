"""Run configuration: JSON schema, defaults, and whole-config validation.

One JSON file fully determines a run.  Every section is optional; missing
values take the defaults below, and `RunConfig.to_dict()` returns the fully
materialized form that gets echoed into the run outputs.  Validation
collects every violated invariant before raising, so a bad file reports all
its problems at once.
"""

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .force_field import ForceFieldConfig
from .phase import BasisSet, ImpedancePolicy, PhaseGrid
from .pi2 import NOISE_PER_SEGMENT, NOISE_PER_STRIDE, CostWeights, PI2Config
from .subject import SubjectParams, TargetTask
from .supervisor import SupervisorConfig

DEFAULT_SESSIONS = (
    {"name": "BSLN", "mode": "transparent", "strides": 270},
    {"name": "T-1", "mode": "aan", "strides": 500},
    {"name": "T-2", "mode": "aan", "strides": 500},
    {"name": "T-3", "mode": "aan", "strides": 500},
    {"name": "T-4", "mode": "aan", "strides": 500},
    {"name": "PT-1", "mode": "transparent", "strides": 55},
    {"name": "PT-2", "mode": "transparent", "strides": 55},
    {"name": "PT-3", "mode": "transparent", "strides": 55},
)

DEFAULTS = {
    "name": "default",
    "seed": 20240401,
    "out_dir": "out",
    "phase": {
        "kernels": 10,
        "instants": 10,
        "kernel_width": 5.0,
        "max_impedance": 10.0,
    },
    "force_field": {"tau_max": 5.0, "deadband": 1.0},
    "pi2": {
        "exploration_strides": 4,
        "discrimination": 10.0,
        "noise_sigma": 0.03,
        "noise_decay": 0.992,
        "control_cost": 1e-6,
        "noise_mode": NOISE_PER_SEGMENT,
    },
    "supervisor": {
        "upper_bound": 1.5,
        "lower_bound": 0.5,
        "epochs_per_decision": 4,
        "intervention_weights": [80.0, 5.0],
        "compliance_weights": [5.0, 80.0],
        "eval_segments": [6, 7, 8, 9, 10],
        "initial_cost": 2.5,
    },
    "subject": {
        "learn_gain": 0.1,
        "forgetting": 0.99,
        "torque_compliance": 0.4,
        "motor_noise": 0.3,
        "samples": 200,
        "baseline": "default",
    },
    "task": {"amplitude": 5.0, "center": None, "width": 0.07 * 2 * 3.141592653589793},
    "protocol": {
        "sessions": list(DEFAULT_SESSIONS),
        "baseline_window": 50,
        "skip_fraction": 0.1,
    },
}


@dataclass(frozen=True)
class SessionSpec:
    name: str
    mode: str      # "aan" | "transparent"
    strides: int


@dataclass(frozen=True)
class RunConfig:
    """All sub-configurations plus the normalized dict they came from."""

    name: str
    seed: int
    out_dir: str
    grid: PhaseGrid
    basis: BasisSet
    max_impedance: float
    force_field: ForceFieldConfig
    pi2: PI2Config
    supervisor: SupervisorConfig
    subject: SubjectParams
    samples: int
    baseline_profile: str
    task: TargetTask
    sessions: tuple
    baseline_window: int
    skip_fraction: float
    raw: dict

    @property
    def run_id(self):
        return f"{self.name}-s{self.seed}"

    def initial_policy(self):
        return ImpedancePolicy(np.zeros(self.grid.kernel_count),
                               self.max_impedance)

    def to_dict(self):
        return json.loads(json.dumps(self.raw))  # deep copy, JSON-clean


def _merge(defaults, override, path, errors):
    if override is None:
        return json.loads(json.dumps(defaults))
    if not isinstance(override, dict):
        errors.append(f"{path}: expected an object")
        return json.loads(json.dumps(defaults))
    merged = json.loads(json.dumps(defaults))
    for key, val in override.items():
        if key not in defaults:
            errors.append(f"{path}.{key}: unknown key")
        else:
            merged[key] = val
    return merged


def _number(d, key, path, errors, lo=None, hi=None, lo_open=False,
            integer=False):
    val = d.get(key)
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        errors.append(f"{path}.{key}: expected a number, got {val!r}")
        return None
    if integer and int(val) != val:
        errors.append(f"{path}.{key}: expected an integer, got {val!r}")
        return None
    if lo is not None and (val <= lo if lo_open else val < lo):
        op = ">" if lo_open else ">="
        errors.append(f"{path}.{key}: must be {op} {lo}, got {val!r}")
        return None
    if hi is not None and val > hi:
        errors.append(f"{path}.{key}: must be <= {hi}, got {val!r}")
        return None
    return int(val) if integer else float(val)


def _weight_pair(d, key, path, errors):
    val = d.get(key)
    if (not isinstance(val, (list, tuple)) or len(val) != 2
            or not all(isinstance(v, (int, float)) and not isinstance(v, bool)
                       for v in val)):
        errors.append(f"{path}.{key}: expected [error_weight, impedance_weight]")
        return None
    if any(v < 0 for v in val):
        errors.append(f"{path}.{key}: weights must be >= 0")
        return None
    return CostWeights(error=float(val[0]), impedance=float(val[1]))


def config_violations(raw):
    """Validate a raw config dict; returns (normalized, config, violations).

    `config` is None whenever violations is non-empty.
    """
    errors = []
    if not isinstance(raw, dict):
        return None, None, ["top level: expected a JSON object"]
    raw = {k: v for k, v in raw.items() if k != "sweep"}
    top = _merge(DEFAULTS, raw, "config", errors)

    name = top.get("name")
    if not isinstance(name, str) or not name:
        errors.append("config.name: expected a non-empty string")
        name = "invalid"
    seed = _number(top, "seed", "config", errors, lo=0, integer=True)
    out_dir = top.get("out_dir")
    if not isinstance(out_dir, str) or not out_dir:
        errors.append("config.out_dir: expected a non-empty string")
        out_dir = "out"

    ph = _merge(DEFAULTS["phase"], raw.get("phase"), "phase", errors)
    kernels = _number(ph, "kernels", "phase", errors, lo=1, integer=True)
    instants = _number(ph, "instants", "phase", errors, lo=2, integer=True)
    width = _number(ph, "kernel_width", "phase", errors, lo=0, lo_open=True)
    clamp = _number(ph, "max_impedance", "phase", errors, lo=0, lo_open=True)

    ff = _merge(DEFAULTS["force_field"], raw.get("force_field"), "force_field",
                errors)
    tau_max = _number(ff, "tau_max", "force_field", errors, lo=0, lo_open=True)
    deadband = _number(ff, "deadband", "force_field", errors, lo=0)

    pc = _merge(DEFAULTS["pi2"], raw.get("pi2"), "pi2", errors)
    rollouts = _number(pc, "exploration_strides", "pi2", errors, lo=1,
                       integer=True)
    discrimination = _number(pc, "discrimination", "pi2", errors, lo=0,
                             lo_open=True)
    sigma = _number(pc, "noise_sigma", "pi2", errors, lo=0, lo_open=True)
    decay = _number(pc, "noise_decay", "pi2", errors, lo=0, hi=1, lo_open=True)
    control_cost = _number(pc, "control_cost", "pi2", errors, lo=0)
    noise_mode = pc.get("noise_mode")
    if noise_mode not in (NOISE_PER_SEGMENT, NOISE_PER_STRIDE):
        errors.append(f"pi2.noise_mode: expected '{NOISE_PER_SEGMENT}' or "
                      f"'{NOISE_PER_STRIDE}', got {noise_mode!r}")

    sup = _merge(DEFAULTS["supervisor"], raw.get("supervisor"), "supervisor",
                 errors)
    upper = _number(sup, "upper_bound", "supervisor", errors, lo=0, lo_open=True)
    lower = _number(sup, "lower_bound", "supervisor", errors, lo=0, lo_open=True)
    if upper is not None and lower is not None and lower >= upper:
        errors.append(f"supervisor: lower_bound {lower} must be < "
                      f"upper_bound {upper}")
    per_decision = _number(sup, "epochs_per_decision", "supervisor", errors,
                           lo=1, integer=True)
    w_int = _weight_pair(sup, "intervention_weights", "supervisor", errors)
    w_comp = _weight_pair(sup, "compliance_weights", "supervisor", errors)
    initial_cost = _number(sup, "initial_cost", "supervisor", errors, lo=0)
    segs = sup.get("eval_segments")
    eval_segments = None
    if (not isinstance(segs, (list, tuple)) or not segs
            or not all(isinstance(s, int) and not isinstance(s, bool)
                       for s in segs)):
        errors.append("supervisor.eval_segments: expected a non-empty list "
                      "of segment indices")
    else:
        eval_segments = tuple(sorted(set(segs)))
        if instants is not None:
            bad = [s for s in eval_segments if not 1 <= s <= instants]
            if bad:
                errors.append(f"supervisor.eval_segments: {bad} outside "
                              f"1..{instants}")

    sub = _merge(DEFAULTS["subject"], raw.get("subject"), "subject", errors)
    learn_gain = _number(sub, "learn_gain", "subject", errors, lo=0)
    forgetting = _number(sub, "forgetting", "subject", errors, lo=0, hi=1,
                         lo_open=True)
    compliance = _number(sub, "torque_compliance", "subject", errors, lo=0)
    motor_noise = _number(sub, "motor_noise", "subject", errors, lo=0)
    samples = _number(sub, "samples", "subject", errors, lo=2, integer=True)
    if samples is not None and instants is not None and samples < 2 * instants:
        errors.append(f"subject.samples: need >= 2 * instants "
                      f"({2 * instants}), got {samples}")
    baseline = sub.get("baseline")
    if not isinstance(baseline, str) or not baseline:
        errors.append("subject.baseline: expected 'default' or a file path")
        baseline = "default"

    tk = _merge(DEFAULTS["task"], raw.get("task"), "task", errors)
    amplitude = _number(tk, "amplitude", "task", errors, lo=0)
    bump_width = _number(tk, "width", "task", errors, lo=0, lo_open=True)
    center = tk.get("center")
    if center is not None:
        center = _number(tk, "center", "task", errors)

    pr = _merge(DEFAULTS["protocol"], raw.get("protocol"), "protocol", errors)
    baseline_window = _number(pr, "baseline_window", "protocol", errors, lo=1,
                              integer=True)
    skip_fraction = _number(pr, "skip_fraction", "protocol", errors, lo=0)
    if skip_fraction is not None and skip_fraction >= 1.0:
        errors.append(f"protocol.skip_fraction: must be < 1, got {skip_fraction}")
    sessions = []
    raw_sessions = pr.get("sessions")
    if not isinstance(raw_sessions, list) or not raw_sessions:
        errors.append("protocol.sessions: expected a non-empty list")
        raw_sessions = []
    seen = set()
    for i, sess in enumerate(raw_sessions):
        path = f"protocol.sessions[{i}]"
        if not isinstance(sess, dict):
            errors.append(f"{path}: expected an object")
            continue
        sname = sess.get("name")
        smode = sess.get("mode")
        strides = sess.get("strides")
        ok = True
        if not isinstance(sname, str) or not sname:
            errors.append(f"{path}.name: expected a non-empty string")
            ok = False
        elif sname in seen:
            errors.append(f"{path}.name: duplicate session name {sname!r}")
            ok = False
        else:
            seen.add(sname)
        if smode not in ("aan", "transparent"):
            errors.append(f"{path}.mode: expected 'aan' or 'transparent', "
                          f"got {smode!r}")
            ok = False
        if (isinstance(strides, bool) or not isinstance(strides, int)
                or strides < 1):
            errors.append(f"{path}.strides: expected a positive integer, "
                          f"got {strides!r}")
            ok = False
        if ok:
            if (smode == "aan" and rollouts is not None
                    and strides % (rollouts + 1) != 0):
                errors.append(
                    f"{path}.strides: aan sessions run whole epochs of "
                    f"{rollouts + 1} strides; {strides} is not a multiple")
            sessions.append(SessionSpec(name=sname, mode=smode,
                                        strides=strides))
    if raw_sessions and sessions and sessions[0].mode != "transparent":
        errors.append("protocol.sessions: the first session must be "
                      "transparent (it defines the target trajectory)")
    if sessions and baseline_window is not None \
            and sessions[0].mode == "transparent" \
            and baseline_window > sessions[0].strides:
        errors.append(
            f"protocol.baseline_window: {baseline_window} exceeds the first "
            f"session's {sessions[0].strides} strides")

    normalized = {
        "name": name, "seed": seed, "out_dir": out_dir, "phase": ph,
        "force_field": ff, "pi2": pc, "supervisor": sup, "subject": sub,
        "task": tk,
        "protocol": {"sessions": [
            {"name": s.get("name"), "mode": s.get("mode"),
             "strides": s.get("strides")}
            for s in raw_sessions if isinstance(s, dict)],
            "baseline_window": pr.get("baseline_window"),
            "skip_fraction": pr.get("skip_fraction")},
    }
    if errors:
        return normalized, None, errors

    grid = PhaseGrid(kernel_count=kernels, instant_count=instants)
    config = RunConfig(
        name=name, seed=seed, out_dir=out_dir, grid=grid,
        basis=BasisSet(width=width, grid=grid), max_impedance=clamp,
        force_field=ForceFieldConfig(tau_max=tau_max, deadband=deadband),
        pi2=PI2Config(exploration_strides=rollouts,
                      discrimination=discrimination, noise_sigma=sigma,
                      noise_decay=decay, control_cost=control_cost,
                      noise_mode=noise_mode),
        supervisor=SupervisorConfig(
            upper_bound=upper, lower_bound=lower,
            epochs_per_decision=per_decision, intervention_weights=w_int,
            compliance_weights=w_comp, eval_segments=eval_segments,
            initial_cost=initial_cost),
        subject=SubjectParams(learn_gain=learn_gain, forgetting=forgetting,
                              torque_compliance=compliance,
                              motor_noise=motor_noise),
        samples=samples, baseline_profile=baseline,
        task=TargetTask(amplitude=amplitude, center=center, width=bump_width),
        sessions=tuple(sessions), baseline_window=baseline_window,
        skip_fraction=skip_fraction, raw=normalized)
    return normalized, config, []


def load_config(source=None, seed_override=None):
    """Build a RunConfig from a JSON file path, a dict, or the defaults.

    Raises ConfigError whose message lists every violated invariant.
    """
    if source is None:
        raw = {}
    elif isinstance(source, dict):
        raw = source
    else:
        try:
            raw = json.loads(Path(source).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if seed_override is not None:
        raw = dict(raw)
        raw["seed"] = seed_override
    _, config, errors = config_violations(raw)
    if errors:
        raise ConfigError("invalid configuration:\n  " + "\n  ".join(errors))
    return config
