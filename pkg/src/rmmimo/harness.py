"""
Experiment orchestration.

* :func:`run_fig1` -- free-space received intensity of fixed, rotated and
  dense (holographic-limit) dipole arrays versus the element count.
* :func:`run_trials` / :func:`run_multiuser` -- urban-macro Monte Carlo:
  UE drop, clustered channels, round-robin scheduling, precoding per
  architecture.
* :func:`bin_by_region`, :func:`aggregate_cdf`, :func:`ee_table` -- the
  aggregations behind the regions / cdf / ee outputs.

Trials are independent: trial ``t`` only uses random streams derived from
``(seed, t)``, and results are folded in trial order.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .arch import Architecture
from .channel import (UE, ChannelRealization, cluster_channel, derive_rng, drop_users,
                      free_space_response, load_ue_table)
from .emr_search import PrecodingSetup, SearchConfig, channel_objective, greedy_search
from .errors import ConfigError, SingularChannelError
from .geometry import place_cell_ula, wavelength
from .patterns import dipole_gain, rotated_axes
from .power import PowerModel, energy_efficiency, total_power
from .scenario import ScenarioConfig

STREAM_FIG1 = 3

FIG1_T = "T-mMIMO"
FIG1_R = "R-mMIMO"
FIG1_H = "HMIMO"

CSV_HEADERS = {
    "fig1": ["arch", "n_elements", "mean_intensity", "std_intensity", "draws"],
    "regions": ["arch", "region", "mean_se", "n"],
    "cdf": ["arch", "users", "se", "cum_prob"],
    "ee": ["arch", "users", "mean_se", "total_power_w", "ee"],
    "custom": ["trial", "tti", "arch", "users", "scheduled", "se", "ee", "evaluations",
               "pattern_histogram", "se_trace"],
}


# ---------------------------------------------------------------------------
# scheduling
# ---------------------------------------------------------------------------

def round_robin_schedule(pool_size: int, n_users: int, tti: int) -> list:
    """Users ``(tti * U + i) mod pool`` for ``i < U``."""
    if not 1 <= n_users <= pool_size:
        raise ConfigError(f"cannot schedule {n_users} of {pool_size} users")
    return [(tti * n_users + i) % pool_size for i in range(n_users)]


# ---------------------------------------------------------------------------
# free-space experiment
# ---------------------------------------------------------------------------

@dataclass
class Fig1Result:
    rows: list
    intensity: dict  # (arch, n_elements) -> per-draw intensity
    targets: np.ndarray


def fig1_targets(config: ScenarioConfig) -> np.ndarray:
    rng = derive_rng(config.seed, 0, STREAM_FIG1)
    n = config.fig1_draws
    x = rng.uniform(*config.fig1_x, n)
    y = rng.uniform(*config.fig1_y, n)
    return np.stack([x, y, np.zeros(n)], axis=-1)


def dipole_array_intensity(n_elements: int, targets, config: ScenarioConfig, rotate: bool,
                           chunk: int = 256) -> np.ndarray:
    """Matched-filter received amplitude ``sqrt(P) ||h||`` for every target.

    Fixed arrays keep every dipole along ``config.fig1_dipole_axis``;
    rotating arrays tilt each element's dipole, per target, so that its
    main lobe points at the target.  Elements sit at the centres of equal
    aperture cells, consistent with the ``A_ref / N`` area normalization.
    """
    lam = wavelength(config.fig1_frequency)
    geom = place_cell_ula(n_elements, config.fig1_aperture_wavelengths * lam, lam)
    ref = np.asarray(config.fig1_dipole_axis, dtype=float)
    out = np.empty(len(targets))
    for start in range(0, len(targets), chunk):
        rx = targets[start:start + chunk]
        d = rx[:, None, :] - geom.positions[None]
        axes = rotated_axes(d, ref) if rotate else ref
        gains = dipole_gain(axes, d)
        h = free_space_response(geom.positions, lam, gains, rx, config.fig1_area_ref)
        out[start:start + chunk] = math.sqrt(config.fig1_tx_power_w) * np.linalg.norm(h, axis=-1)
    return out


def run_fig1(config: ScenarioConfig) -> Fig1Result:
    targets = fig1_targets(config)
    intensity = {}
    rows = []

    def add(arch, n, values):
        intensity[(arch, n)] = values
        rows.append({"arch": arch, "n_elements": n, "mean_intensity": float(np.mean(values)),
                     "std_intensity": float(np.std(values)), "draws": len(values)})

    for n in config.fig1_sweep:
        add(FIG1_T, n, dipole_array_intensity(n, targets, config, rotate=False))
        add(FIG1_R, n, dipole_array_intensity(n, targets, config, rotate=True))
    add(FIG1_H, config.fig1_dense, dipole_array_intensity(config.fig1_dense, targets, config, rotate=True))
    return Fig1Result(rows, intensity, targets)


# ---------------------------------------------------------------------------
# multi-user Monte Carlo
# ---------------------------------------------------------------------------

@dataclass
class TrialRecord:
    trial: int
    tti: int
    arch: str
    requested_users: int
    users: tuple
    se: float
    ee: float
    total_power: float
    per_user_se: tuple
    distances: tuple
    pattern_histogram: tuple
    evaluations: int
    se_trace: tuple
    wall_time: float = field(default=0.0, compare=False)


def _power_model_for(arch: Architecture, n_patterns: int, model: PowerModel) -> PowerModel:
    # a single-pattern antenna has nothing to switch
    if arch is Architecture.SCA_R and n_patterns == 1:
        return PowerModel(**{**asdict(model), "switches_per_rpa": 0})
    return model


def _users_for_trial(config: ScenarioConfig, trial: int) -> list:
    if config.ue_file:
        ues = load_ue_table(config.ue_file, math.radians(config.ue_polarization_deg))
        if len(ues) != config.pool_size:
            raise ConfigError(f"UE table holds {len(ues)} users, pool size is {config.pool_size}")
        return ues
    return drop_users(config, config.seed, trial)


def serve(channel: ChannelRealization, arch: Architecture, config: ScenarioConfig,
          legacy_index: int = 0):
    """Precode one scheduled group.

    Returns ``(kept, mu, se, evaluations, trace, per_user_se)`` where
    ``kept`` indexes the users actually served.  Fixed-pattern
    architectures, and reconfigurable ones with a single pattern, use the
    all-legacy assignment without searching.  If the
    effective channel is singular the last scheduled user is dropped and
    the group is retried.
    """
    setup = PrecodingSetup(arch, config.subcarrier_tx_power,
                           config.n_rf if arch.hybrid else None, config.phase_bits)
    cfg = SearchConfig(config.t_iter, config.early_exit, config.max_evaluations, legacy_index)
    kept = list(range(channel.n_users))
    while kept:
        sub = channel.select(kept)
        objective = channel_objective(sub, setup)
        if arch.reconfigurable and sub.n_patterns > 1:
            result = greedy_search(objective, sub.n_elements, sub.n_patterns, cfg)
            mu, se, evals, trace = result.mu, result.se, result.evaluations, result.trace
        else:
            mu = (legacy_index,) * sub.n_elements
            se, evals = objective(list(mu)), 0
            trace = (se,)
        if np.isfinite(se):
            per_user = _per_user(sub, setup, mu)
            return kept, mu, se, evals, trace, per_user
        kept = kept[:-1]
    raise SingularChannelError("no schedulable user left")


def _per_user(channel: ChannelRealization, setup: PrecodingSetup, mu) -> tuple:
    from .precoding import hybrid_precode
    _, _, rec = hybrid_precode(channel.matrix(list(mu)), setup.architecture, setup.tx_power,
                               channel.noise_power, setup.n_rf, setup.phase_bits)
    return tuple(float(x) for x in rec.per_user)


def run_trials(config: ScenarioConfig, architectures=None, users=None, trials=None,
               progress=None) -> list:
    """Monte Carlo over trials x scheduled-user counts x TTIs x architectures.

    Within a trial the UE drop and channels are fixed; identical scheduled
    groups are precoded once and reused.
    """
    archs = [Architecture.parse(a) for a in (architectures or config.architectures)]
    users = list(users or config.users)
    for u in users:
        if not 1 <= u <= min(config.n_rf, config.pool_size):
            raise ConfigError(f"cannot schedule {u} users")
    pset = config.pattern_set_obj()
    geom = config.geometry()
    base_power = config.power_model()
    records = []
    for trial in range(config.trials if trials is None else trials):
        ues = _users_for_trial(config, trial)
        channel = cluster_channel(config, geom, pset, ues, config.seed, trial)
        cache = {}
        for n_users in users:
            for tti in range(config.ttis):
                sched = round_robin_schedule(config.pool_size, n_users, tti)
                for arch in archs:
                    key = (arch, tuple(sched))
                    if key not in cache:
                        t0 = time.perf_counter()
                        kept, mu, se, evals, trace, per_user = serve(
                            channel.select(sched), arch, config, pset.legacy_index)
                        cache[key] = (kept, mu, se, evals, trace, per_user, time.perf_counter() - t0)
                    kept, mu, se, evals, trace, per_user, wall = cache[key]
                    model = _power_model_for(arch, pset.P, base_power)
                    eer = energy_efficiency(se, arch, config.n_tx, config.n_rf, model)
                    served = tuple(sched[i] for i in kept)
                    records.append(TrialRecord(
                        trial=trial, tti=tti, arch=arch.value, requested_users=n_users, users=served,
                        se=se, ee=eer.ee, total_power=eer.total_power, per_user_se=per_user,
                        distances=tuple(ues[u].horizontal_distance for u in served),
                        pattern_histogram=tuple(np.bincount(mu, minlength=pset.P).tolist()),
                        evaluations=evals, se_trace=tuple(trace), wall_time=wall))
        if progress:
            progress(trial)
    return records


def run_multiuser(config: ScenarioConfig, architecture, **kwargs) -> list:
    return run_trials(config, [architecture], **kwargs)


# ---------------------------------------------------------------------------
# aggregation
# ---------------------------------------------------------------------------

def region_labels(edges) -> list:
    n = len(edges) - 1
    return ["near", "middle", "far"] if n == 3 else [f"bin{i}" for i in range(n)]


def region_of(distance: float, edges) -> str | None:
    """Bins are ``[a, b)`` except the outermost, which is ``[a, b]``."""
    labels = region_labels(edges)
    for i, (a, b) in enumerate(zip(edges, edges[1:])):
        last = i == len(labels) - 1
        if a <= distance < b or (last and distance == b):
            return labels[i]
    return None


def bin_by_region(records, edges=(35.0, 100.0, 200.0, 289.0), reference="SCA_T", target="SCA_R"):
    """Mean per-user SE by distance region and architecture, plus ``target - reference`` gains.

    Returns ``(means, gains)``: ``means[arch][region] = (mean_se, n)`` and
    ``gains[region] = mean(target) - mean(reference)``.  Regions without
    samples are absent; ``"entire"`` spans ``[edges[0], edges[-1]]``.
    """
    samples: dict = {}
    for rec in records:
        for d, se in zip(rec.distances, rec.per_user_se):
            reg = region_of(d, edges)
            if reg is None:
                continue
            for name in (reg, "entire"):
                samples.setdefault(rec.arch, {}).setdefault(name, []).append(se)
    order = region_labels(edges) + ["entire"]
    means = {arch: {r: (float(np.mean(v[r])), len(v[r])) for r in order if r in v}
             for arch, v in samples.items()}
    gains = {}
    ref, tgt = str(reference), str(target)
    if ref in means and tgt in means:
        for r in order:
            if r in means[ref] and r in means[tgt]:
                gains[r] = means[tgt][r][0] - means[ref][r][0]
    return means, gains


def aggregate_cdf(samples) -> list:
    """Empirical CDF as ``(value, P(X <= value))`` pairs over distinct sorted values."""
    a = np.asarray(samples, dtype=float).ravel()
    if a.size == 0:
        raise ValueError("empirical CDF of an empty sample")
    values, counts = np.unique(a, return_counts=True)
    cum = np.cumsum(counts) / a.size
    return [(float(v), float(c)) for v, c in zip(values, cum)]


def ee_table(records, config: ScenarioConfig) -> list:
    """Mean SE, total power and EE per (architecture, scheduled users)."""
    pset_p = config.pattern_set_obj().P
    groups: dict = {}
    for rec in records:
        groups.setdefault((rec.arch, rec.requested_users), []).append(rec.se)
    rows = []
    for arch in config.architecture_list:
        for u in config.users:
            if (arch.value, u) not in groups:
                continue
            mean_se = float(np.mean(groups[(arch.value, u)]))
            model = _power_model_for(arch, pset_p, config.power_model())
            total = total_power(arch, config.n_tx, config.n_rf, model)
            rows.append({"arch": arch.value, "users": u, "mean_se": mean_se,
                         "total_power_w": total, "ee": mean_se / total})
    return rows


def relative_gain(records, n_users: int, target="SCA_R", reference="SCA_T") -> float:
    """``mean SE(target) / mean SE(reference) - 1`` at ``n_users`` scheduled users."""
    def mean(arch):
        vals = [r.se for r in records if r.arch == arch and r.requested_users == n_users]
        if not vals:
            raise ValueError(f"no records for {arch} at U={n_users}")
        return float(np.mean(vals))
    return mean(str(target)) / mean(str(reference)) - 1.0


# ---------------------------------------------------------------------------
# outputs
# ---------------------------------------------------------------------------

def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (tuple, list)):
        return ";".join(_fmt(v) for v in value)
    return str(value)


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(row[h]) for h in header])
    return buf.getvalue()


def regions_rows(records, config: ScenarioConfig) -> list:
    means, gains = bin_by_region(records, config.region_edges)
    rows = []
    for arch in config.architecture_list:
        for region, (m, n) in means.get(arch.value, {}).items():
            rows.append({"arch": arch.value, "region": region, "mean_se": m, "n": n})
    if gains:
        n_pairs = {r: min(means["SCA_T"][r][1], means["SCA_R"][r][1]) for r in gains}
        for region, g in gains.items():
            rows.append({"arch": "SCA_R-SCA_T", "region": region, "mean_se": g, "n": n_pairs[region]})
    return rows


def cdf_rows(records, config: ScenarioConfig) -> list:
    rows = []
    for arch in config.architecture_list:
        for u in config.users:
            se = [r.se for r in records if r.arch == arch.value and r.requested_users == u]
            if se:
                rows += [{"arch": arch.value, "users": u, "se": x, "cum_prob": p}
                         for x, p in aggregate_cdf(se)]
    return rows


def trial_rows(records) -> list:
    return [{"trial": r.trial, "tti": r.tti, "arch": r.arch, "users": r.requested_users,
             "scheduled": r.users, "se": r.se, "ee": r.ee, "evaluations": r.evaluations,
             "pattern_histogram": r.pattern_histogram, "se_trace": r.se_trace} for r in records]


def run_experiment(config: ScenarioConfig, out_dir=None, progress=None) -> dict:
    """Run ``config.preset`` and write its CSV plus ``run_manifest.json``.

    Returns a mapping of output name to path.
    """
    out = Path(out_dir or config.out)
    out.mkdir(parents=True, exist_ok=True)
    preset = config.preset
    if preset == "fig1":
        rows = run_fig1(config).rows
    else:
        records = run_trials(config, progress=progress)
        if preset == "regions":
            rows = regions_rows(records, config)
        elif preset == "cdf":
            rows = cdf_rows(records, config)
        elif preset == "ee":
            rows = ee_table(records, config)
        else:
            rows = trial_rows(records)
    name = "trials" if preset == "custom" else preset
    csv_path = out / f"{name}.csv"
    csv_path.write_text(csv_text(CSV_HEADERS[preset], rows))
    manifest = {
        "experiment": preset,
        "version": __version__,
        "seed": config.seed,
        "config": config.to_dict(),
        "outputs": [csv_path.name],
    }
    man_path = out / "run_manifest.json"
    man_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return {name: csv_path, "manifest": man_path}
