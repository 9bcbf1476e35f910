"""Protocol orchestration, stride logging, and summary metrics.

A run executes the configured session sequence: a transparent baseline bout
whose final strides define the target trajectory, assisted training bouts
driven by the supervisor (learning state carried across them unchanged),
and transparent post-training bouts.  Every stride lands in one CSV row;
the summary JSON is recomputed from those rows, so replaying the metrics
from the CSV reproduces it exactly.

All floating-point output is written with 9 significant digits, and every
value is rounded through that format before any aggregation, which makes
the whole pipeline a pure function of the seed and the config.
"""

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import load_config
from .errors import ConfigError
from .phase import kernel_centers, sample_segment_indices
from .subject import (BaselineGait, SubjectPlant, baseline_gait, make_target,
                      segment_rms_errors)
from .supervisor import LearningMode, Supervisor, initial_state

CSV_NAME = "strides.csv"
SUMMARY_NAME = "summary.json"
CONFIG_NAME = "config.json"

KIND_EXPLORE = "explore"
KIND_EVAL = "eval"
KIND_TRANSPARENT = "transparent"
MODE_NONE = "none"


def round9(x):
    """Round to the 9-significant-digit value the CSV stores."""
    return float(f"{float(x):.9g}")


def _fmt(x):
    return "" if x is None else f"{x:.9g}"


@dataclass(frozen=True)
class StrideRow:
    """One CSV row.  None marks a column that is empty for this stride."""

    run_id: str
    session: str
    stride_idx: int
    epoch_idx: int | None
    stride_kind: str
    mode: str
    sigma_eff: float | None
    j_epoch: float | None
    rms_raw_error_full: float
    rms_raw_error_masked: float
    g_at_phi: tuple | None
    seg_rms_err: tuple


def csv_header(kernels, instants):
    return (["run_id", "session", "stride_idx", "epoch_idx", "stride_kind",
             "mode", "sigma_eff", "J_epoch", "rms_raw_error_full",
             "rms_raw_error_masked"]
            + [f"g_at_phi_{i}" for i in range(1, kernels + 1)]
            + [f"seg_rms_err_{j}" for j in range(1, instants + 1)])


def write_stride_csv(path, rows, kernels, instants):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(csv_header(kernels, instants))
        for r in rows:
            g_cols = ([""] * kernels if r.g_at_phi is None
                      else [_fmt(v) for v in r.g_at_phi])
            writer.writerow(
                [r.run_id, r.session, r.stride_idx,
                 "" if r.epoch_idx is None else r.epoch_idx,
                 r.stride_kind, r.mode, _fmt(r.sigma_eff), _fmt(r.j_epoch),
                 _fmt(r.rms_raw_error_full), _fmt(r.rms_raw_error_masked)]
                + g_cols + [_fmt(v) for v in r.seg_rms_err])


def read_stride_csv(path):
    """Parse a stride CSV back into StrideRow objects."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        kernels = sum(1 for h in header if h.startswith("g_at_phi_"))
        instants = sum(1 for h in header if h.startswith("seg_rms_err_"))
        if header != csv_header(kernels, instants):
            raise ConfigError(f"{path}: unexpected CSV header")
        rows = []
        for rec in reader:
            base = rec[:10]
            g_cols = rec[10:10 + kernels]
            seg_cols = rec[10 + kernels:10 + kernels + instants]
            rows.append(StrideRow(
                run_id=base[0], session=base[1], stride_idx=int(base[2]),
                epoch_idx=None if base[3] == "" else int(base[3]),
                stride_kind=base[4], mode=base[5],
                sigma_eff=None if base[6] == "" else float(base[6]),
                j_epoch=None if base[7] == "" else float(base[7]),
                rms_raw_error_full=float(base[8]),
                rms_raw_error_masked=float(base[9]),
                g_at_phi=(None if all(c == "" for c in g_cols)
                          else tuple(float(c) for c in g_cols)),
                seg_rms_err=tuple(float(c) for c in seg_cols)))
    return rows


def _rms_columns(raw_error, mask, n_segments):
    full = round9(np.sqrt(np.mean(raw_error ** 2)))
    masked = round9(np.sqrt(np.mean(raw_error[mask] ** 2)))
    seg = tuple(round9(v) for v in segment_rms_errors(raw_error, n_segments))
    return full, masked, seg


def run_protocol(config=None, out_dir=None, quiet=True):
    """Execute the configured protocol; returns (rows, summary).

    When `out_dir` is given, writes strides.csv, summary.json and the
    normalized config echo config.json into it.
    """
    if config is None:
        config = load_config()
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)  # fail before simulating
    rng_subject, rng_explore = (
        np.random.default_rng(s)
        for s in np.random.SeedSequence(config.seed).spawn(2))
    grid = config.grid
    n_inst = grid.instant_count
    seg = sample_segment_indices(config.samples, n_inst)
    mask = np.isin(seg, list(config.supervisor.eval_segments))
    baseline = baseline_gait(config.baseline_profile, config.samples)
    run_id = config.run_id
    rows = []

    # Baseline bout: transparent, target not yet defined, no adaptation.
    first = config.sessions[0]
    warmup = SubjectPlant(baseline, baseline.angles, config.subject,
                          rng_subject, config.force_field, n_inst,
                          adapt=False)
    measured = [warmup.stride(None, assisted=False).measured
                for _ in range(first.strides)]
    window = np.mean(measured[-config.baseline_window:], axis=0)
    target, bump_center = make_target(BaselineGait(window), config.task)
    for i, theta_m in enumerate(measured, start=1):
        full, masked, seg_rms = _rms_columns(target - theta_m, mask, n_inst)
        rows.append(StrideRow(
            run_id=run_id, session=first.name, stride_idx=i, epoch_idx=None,
            stride_kind=KIND_TRANSPARENT, mode=MODE_NONE, sigma_eff=None,
            j_epoch=None, rms_raw_error_full=full,
            rms_raw_error_masked=masked, g_at_phi=None,
            seg_rms_err=seg_rms))
    if not quiet:
        print(f"[{run_id}] {first.name}: {first.strides} strides, "
              f"bump center {bump_center:.4f} rad")

    plant = SubjectPlant(baseline, target, config.subject, rng_subject,
                         config.force_field, n_inst, adapt=True)
    plant.state = warmup.state  # carries the (zero) adjustment forward
    supervisor = Supervisor(config.basis, config.pi2, config.supervisor,
                            plant.phases)
    state = initial_state(config.initial_policy(), config.supervisor)

    detail = {"bump_center": bump_center, "sessions": {}}
    epochs_per = config.pi2.exploration_strides + 1
    for sess in config.sessions[1:]:
        if sess.mode == "aan":
            run = supervisor.run_session(state, plant,
                                         sess.strides // epochs_per,
                                         rng_explore)
            detail["sessions"][sess.name] = run
            idx = 0
            for record in run.records:
                for log in record.strides:
                    idx += 1
                    rows.append(StrideRow(
                        run_id=run_id, session=sess.name, stride_idx=idx,
                        epoch_idx=log.epoch_index, stride_kind=log.kind,
                        mode=log.mode.value, sigma_eff=round9(log.sigma),
                        j_epoch=(None if log.epoch_cost is None
                                 else round9(log.epoch_cost)),
                        rms_raw_error_full=round9(log.rms_full),
                        rms_raw_error_masked=round9(log.rms_masked),
                        g_at_phi=tuple(round9(v) for v in log.kernel_impedance),
                        seg_rms_err=tuple(round9(v) for v in log.segment_rms)))
            if not quiet:
                changes = sum(d.changed for d in run.decisions)
                print(f"[{run_id}] {sess.name}: {sess.strides} strides, "
                      f"{changes} mode change(s), "
                      f"final cost {run.records[-1].cost:.3f} deg")
        else:
            for i in range(1, sess.strides + 1):
                outcome = plant.stride(None, assisted=False)
                full, masked, seg_rms = _rms_columns(outcome.raw_error, mask,
                                                     n_inst)
                rows.append(StrideRow(
                    run_id=run_id, session=sess.name, stride_idx=i,
                    epoch_idx=None, stride_kind=KIND_TRANSPARENT,
                    mode=MODE_NONE, sigma_eff=None, j_epoch=None,
                    rms_raw_error_full=full, rms_raw_error_masked=masked,
                    g_at_phi=None, seg_rms_err=seg_rms))
            if not quiet:
                print(f"[{run_id}] {sess.name}: {sess.strides} strides "
                      f"(transparent)")

    echo = config.to_dict()
    echo["resolved"] = {"bump_center_rad": round9(bump_center),
                        "run_id": run_id}
    summary = build_summary(rows, echo)
    if out_dir is not None:
        write_stride_csv(out_dir / CSV_NAME, rows, grid.kernel_count, n_inst)
        (out_dir / CONFIG_NAME).write_text(dumps_json(echo))
        (out_dir / SUMMARY_NAME).write_text(dumps_json(summary))
    return rows, summary, detail


def dumps_json(obj):
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _ols_slope(xs, ys):
    if len(xs) < 2:
        return None
    return round9(np.polyfit(np.asarray(xs, float),
                             np.asarray(ys, float), 1)[0])


def _mean_se(values):
    arr = np.asarray(values, dtype=float)
    mean = round9(arr.mean())
    se = round9(arr.std(ddof=1) / np.sqrt(arr.size)) if arr.size > 1 else 0.0
    return mean, se


def build_summary(rows, config_echo):
    """Aggregate stride rows into the summary structure.

    Per-session RMS statistics skip the first `skip_fraction` of the
    session's strides (the steady-state analysis window); mode on-time and
    impedance trends use every stride of the session.
    """
    if not rows:
        raise ConfigError("no stride rows to summarize")
    skip_fraction = config_echo["protocol"]["skip_fraction"]
    order = []
    by_session = {}
    for row in rows:
        if row.session not in by_session:
            order.append(row.session)
            by_session[row.session] = []
        by_session[row.session].append(row)

    kernels = next((len(r.g_at_phi) for r in rows if r.g_at_phi), 0)
    swing_kernels = ([i for i, c in enumerate(kernel_centers(kernels))
                      if c >= np.pi] if kernels else [])

    sessions = []
    aan_names = []
    prev_aan_mode = None
    for name in order:
        sess_rows = by_session[name]
        is_aan = any(r.stride_kind != KIND_TRANSPARENT for r in sess_rows)
        skip = int(skip_fraction * len(sess_rows))
        window = sess_rows[skip:]
        full_mean, full_se = _mean_se([r.rms_raw_error_full for r in window])
        masked_mean, masked_se = _mean_se(
            [r.rms_raw_error_masked for r in window])
        entry = {
            "name": name,
            "kind": "aan" if is_aan else "transparent",
            "strides": len(sess_rows),
            "analysis_strides": len(window),
            "rms_full_mean": full_mean,
            "rms_full_se": full_se,
            "rms_masked_mean": masked_mean,
            "rms_masked_se": masked_se,
            "intervention_on_time_pct": None,
            "mode_changes": None,
            "g_swing_mean_intervention": None,
        }
        if is_aan:
            aan_names.append(name)
            modes = [r.mode for r in sess_rows]
            on = sum(m == LearningMode.INTERVENTION.value for m in modes)
            entry["intervention_on_time_pct"] = round9(100.0 * on / len(modes))
            changes = sum(a != b for a, b in zip(modes, modes[1:]))
            if prev_aan_mode is not None and modes[0] != prev_aan_mode:
                changes += 1
            entry["mode_changes"] = changes
            prev_aan_mode = modes[-1]
            inter = [r for r in sess_rows
                     if r.mode == LearningMode.INTERVENTION.value]
            if inter and swing_kernels:
                entry["g_swing_mean_intervention"] = round9(np.mean(
                    [[r.g_at_phi[i] for i in swing_kernels] for r in inter]))
        sessions.append(entry)

    by_name = {s["name"]: s for s in sessions}
    xs = [i + 1 for i, n in enumerate(aan_names)
          if by_name[n]["g_swing_mean_intervention"] is not None]
    ys = [by_name[n]["g_swing_mean_intervention"] for n in aan_names
          if by_name[n]["g_swing_mean_intervention"] is not None]
    b1 = _ols_slope(xs, ys)
    b2 = _ols_slope(list(range(1, len(aan_names) + 1)),
                    [by_name[n]["intervention_on_time_pct"]
                     for n in aan_names])

    inter_rows = [r for r in rows
                  if r.mode == LearningMode.INTERVENTION.value and r.g_at_phi]
    g_means = (None if not inter_rows else
               [round9(v) for v in
                np.mean([r.g_at_phi for r in inter_rows], axis=0)])

    return {
        "run_id": rows[0].run_id,
        "seed": config_echo["seed"],
        "sessions": sessions,
        "B1_swing_impedance_slope": b1,
        "B2_on_time_slope": b2,
        "intervention_g_kernel_means": g_means,
        "config": config_echo,
    }


def recompute_summary(run_dir):
    """Rebuild the summary from a run directory's CSV and config echo."""
    run_dir = Path(run_dir)
    rows = read_stride_csv(run_dir / CSV_NAME)
    echo = json.loads((run_dir / CONFIG_NAME).read_text())
    return build_summary(rows, echo)
