"""
Pattern-indexed channel models.

Two generators are provided:

* :func:`free_space_channel` -- deterministic line-of-sight response of an
  array towards one receiver point, with a per-element area normalization
  so the dense-array limit is finite.
* :func:`cluster_channel` -- clustered geometric stochastic multipath for a
  sector of an urban-macro cell (a lightweight stand-in for a full 3GPP
  model).  Because every path leaves the array through the radiation
  pattern of the transmitting element, the channel is pre-computed for
  every (element, pattern) pair; evaluating it at a pattern assignment is
  a gather, so changing one element's pattern changes exactly one entry.

Channel matrices follow ``y = H x``: row ``u`` of ``H`` is ``h_u^H``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError, DomainError
from .geometry import ArrayGeometry
from .patterns import PatternSet, PatternSpec, unit_vectors, wrap_angle

# stream identifiers mixed into seeds, keeps draws of different kinds disjoint
STREAM_DROP = 1
STREAM_CLUSTERS = 2


def derive_rng(seed: int, *keys: int) -> np.random.Generator:
    """Generator for the sub-stream ``keys`` of ``seed``.

    The entropy is the integer list ``[seed, *keys]`` fed to
    :class:`numpy.random.SeedSequence`, so e.g. trial ``t`` of base seed
    ``s`` draws its UE positions from ``SeedSequence([s, t, STREAM_DROP])``.
    """
    check_seed(seed)
    return np.random.default_rng(np.random.SeedSequence([int(seed), *map(int, keys)]))


def check_seed(seed) -> int:
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)) or not 0 <= seed < 2**64:
        raise ConfigError(f"seed must be an unsigned 64-bit integer, got {seed!r}")
    return int(seed)


# ---------------------------------------------------------------------------
# free space
# ---------------------------------------------------------------------------

def free_space_response(positions, wavelength: float, gains, rx, area_ref: float = 1.0):
    """Vectorized free-space response.

    ``positions`` is ``(N, 3)``, ``rx`` is ``(..., 3)`` and ``gains`` is the
    pattern power gain of each element towards ``rx`` (broadcastable to
    ``(..., N)``).  Returns ``(..., N)`` complex coefficients.
    """
    pos = np.asarray(positions, dtype=float)
    rx = np.asarray(rx, dtype=float)
    r = np.linalg.norm(rx[..., None, :] - pos, axis=-1)
    if np.any(r == 0):
        raise DomainError("receiver coincides with an array element")
    n = len(pos)
    amp = np.sqrt(np.asarray(gains, dtype=float)) * math.sqrt(area_ref / n)
    amp = amp * wavelength / (4 * math.pi * r)
    return amp * np.exp(-2j * math.pi * r / wavelength)


def free_space_channel(geom: ArrayGeometry, patterns, rx, area_ref: float = 1.0) -> np.ndarray:
    """Line-of-sight channel from every element of ``geom`` to the point ``rx``.

    ``patterns`` is a single :class:`PatternSpec` shared by all elements or
    one spec per element.
    """
    rx = np.asarray(rx, dtype=float).reshape(3)
    if isinstance(patterns, PatternSpec):
        patterns = [patterns] * geom.n_elements
    if len(patterns) != geom.n_elements:
        raise ValueError("need one pattern per element")
    d = rx - geom.positions
    gains = np.array([spec.gain_towards(v) for spec, v in zip(patterns, d)])
    return free_space_response(geom.positions, geom.wavelength, gains, rx, area_ref)


# ---------------------------------------------------------------------------
# path loss and users
# ---------------------------------------------------------------------------

def path_loss_db(distance, scenario) -> np.ndarray | float:
    """3GPP TR 38.901 UMa NLOS path loss (the ``PL'_UMa-NLOS`` term), in dB.

    ``distance`` is the 3D BS-UE distance in metres.
    """
    d = np.asarray(distance, dtype=float)
    if np.any(d <= 0):
        raise DomainError("distance must be positive")
    fc_ghz = scenario.carrier_frequency / 1e9
    pl = 13.54 + 39.08 * np.log10(d) + 20 * math.log10(fc_ghz) - 0.6 * (scenario.ue_height - 1.5)
    return float(pl) if np.ndim(pl) == 0 else pl


def path_loss(distance, indoor, scenario):
    """Linear power factor (< 1) applied to the received power.

    Indoor users see an extra ``scenario.penetration_loss_db``.
    """
    pl = np.asarray(path_loss_db(distance, scenario)) + np.where(indoor, scenario.penetration_loss_db, 0.0)
    lin = 10 ** (-pl / 10)
    return float(lin) if np.ndim(lin) == 0 else lin


@dataclass(frozen=True)
class UE:
    uid: int
    x: float
    y: float
    z: float
    indoor: bool = False
    polarization: float = 0.0  # radians from vertical

    @property
    def position(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    @property
    def horizontal_distance(self) -> float:
        return math.hypot(self.x, self.y)


def drop_users(scenario, seed: int, trial: int) -> list:
    """Drop ``scenario.pool_size`` UEs uniformly (by area) in the sector annulus."""
    rng = derive_rng(seed, trial, STREAM_DROP)
    n = scenario.pool_size
    r2 = rng.uniform(scenario.cell_radius_min ** 2, scenario.cell_radius_max ** 2, n)
    half = math.radians(scenario.sector_half_width_deg)
    phi = rng.uniform(-half, half, n)
    indoor = rng.random(n) < scenario.indoor_ratio
    r = np.sqrt(r2)
    pol = math.radians(scenario.ue_polarization_deg)
    return [UE(i, float(r[i] * math.cos(phi[i])), float(r[i] * math.sin(phi[i])),
               scenario.ue_height, bool(indoor[i]), pol) for i in range(n)]


def load_ue_table(path, polarization: float = 0.0) -> list:
    """Read UEs from a text table: one ``x, y, z, indoor`` row per line.

    Commas or whitespace separate fields; ``#`` starts a comment and an
    optional ``x,y,z,indoor`` header row is skipped.  The indoor flag
    accepts 0/1/true/false.
    """
    ues = []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.replace(",", " ").split()
        if len(fields) != 4:
            raise ConfigError(f"{path}:{lineno}: expected 4 fields, got {len(fields)}")
        if not ues and [f.lower() for f in fields] == ["x", "y", "z", "indoor"]:
            continue
        try:
            x, y, z = (float(f) for f in fields[:3])
        except ValueError:
            raise ConfigError(f"{path}:{lineno}: bad coordinate") from None
        flag = fields[3].lower()
        if flag not in ("0", "1", "true", "false"):
            raise ConfigError(f"{path}:{lineno}: bad indoor flag {fields[3]!r}")
        ues.append(UE(len(ues), x, y, z, flag in ("1", "true"), polarization))
    return ues


def save_ue_table(ues, path) -> None:
    lines = ["# x, y, z, indoor"]
    lines += [f"{u.x!r}, {u.y!r}, {u.z!r}, {int(u.indoor)}" for u in ues]
    Path(path).write_text("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# clustered multipath
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ClusterSet:
    """Multipath clusters of one user, one path per cluster.

    ``polarization`` holds a 2x2 transfer matrix per path in the
    (vertical, horizontal) basis.
    """

    azimuth: np.ndarray
    elevation: np.ndarray
    powers: np.ndarray
    gains: np.ndarray
    delays: np.ndarray
    polarization: np.ndarray

    def __post_init__(self):
        if np.any(self.delays < 0):
            raise ValueError("delays must be non-negative")

    def __len__(self) -> int:
        return len(self.azimuth)

    def coupling(self, slants, ue_polarization: float) -> np.ndarray:
        """Polarization coupling ``(L, N)`` between every path and element slant."""
        t = np.stack([np.cos(slants), np.sin(slants)])  # (2, N)
        r = np.array([math.cos(ue_polarization), math.sin(ue_polarization)])
        return np.einsum("i,lij,jn->ln", r, self.polarization, t)


def draw_clusters(scenario, ue: UE, rng: np.random.Generator) -> ClusterSet:
    """Clusters for one UE, centred on the line-of-sight bearing."""
    L = scenario.n_clusters
    d_h = ue.horizontal_distance
    los_az = math.atan2(ue.y, ue.x)
    los_el = math.atan2(ue.z - scenario.bs_height, d_h)

    tau = -scenario.delay_scaling * scenario.delay_spread * np.log(rng.uniform(size=L))
    tau = np.sort(tau - tau.min())
    shadow = rng.normal(0.0, scenario.cluster_shadowing_db, L)
    p = np.exp(-tau * (scenario.delay_scaling - 1) / (scenario.delay_scaling * scenario.delay_spread))
    p = p * 10 ** (-shadow / 10)
    p = p / p.sum()

    az = wrap_angle(los_az + rng.normal(0.0, math.radians(scenario.azimuth_spread_deg), L))
    el = np.clip(los_el + rng.normal(0.0, math.radians(scenario.elevation_spread_deg), L),
                 -math.pi / 2, math.pi / 2)
    g = np.sqrt(p / 2) * (rng.normal(size=L) + 1j * rng.normal(size=L))

    phases = np.exp(2j * math.pi * rng.uniform(size=(L, 2, 2)))
    xpr = 10 ** (-scenario.xpr_db / 20)
    pol = phases * np.array([[1.0, xpr], [xpr, 1.0]])
    return ClusterSet(np.atleast_1d(az), el, p, g, tau, pol)


def subcarrier_offsets(bandwidth: float, n_sub: int) -> np.ndarray:
    """Baseband frequency of each subcarrier, centred on the carrier."""
    return (np.arange(n_sub) - (n_sub - 1) / 2) * (bandwidth / n_sub)


def cluster_coefficients(clusters: ClusterSet, geom: ArrayGeometry, pattern_set: PatternSet,
                         freqs, ue_polarization: float = 0.0, gain: float = 1.0) -> np.ndarray:
    """Per-pattern channel coefficients ``(K, N, P)`` of one user.

    ``h[k, n, p] = sqrt(gain) * sum_l a_l sqrt(g_p(dir_l)) c_{l,n}
    exp(j 2 pi <u_l, pos_n> / lambda) exp(-j 2 pi f_k tau_l)``.
    """
    u = unit_vectors(clusters.azimuth, clusters.elevation)  # (L, 3)
    steer = np.exp(2j * math.pi * (u @ geom.positions.T) / geom.wavelength)  # (L, N)
    coup = clusters.coupling(geom.slants, ue_polarization)  # (L, N)
    amp = np.sqrt(pattern_set.gains(clusters.azimuth, clusters.elevation))  # (L, P)
    delay = np.exp(-2j * math.pi * np.outer(freqs, clusters.delays))  # (K, L)
    per_path = (clusters.gains[:, None] * steer * coup)  # (L, N)
    h = np.einsum("kl,ln,lp->knp", delay, per_path, amp)
    return math.sqrt(gain) * h


@dataclass(frozen=True, eq=False)
class ChannelRealization:
    """Pattern-indexed channel of a group of users.

    ``coeffs[u, k, n, p]`` is the coefficient of element ``n`` towards user
    ``u`` on subcarrier ``k`` when the element uses pattern ``p``.
    """

    coeffs: np.ndarray
    noise_power: float
    users: tuple = ()
    seed: int | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.ndim != 4:
            raise ValueError("coeffs must have shape (U, K, N, P)")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "users", tuple(self.users))

    @property
    def n_users(self) -> int:
        return self.coeffs.shape[0]

    @property
    def n_subcarriers(self) -> int:
        return self.coeffs.shape[1]

    @property
    def n_elements(self) -> int:
        return self.coeffs.shape[2]

    @property
    def n_patterns(self) -> int:
        return self.coeffs.shape[3]

    def check_assignment(self, mu) -> np.ndarray:
        mu = np.asarray(mu)
        if mu.shape != (self.n_elements,) or not np.issubdtype(mu.dtype, np.integer):
            raise ValueError(f"pattern assignment must be {self.n_elements} integers")
        if np.any(mu < 0) or np.any(mu >= self.n_patterns):
            raise ValueError("pattern index out of range")
        return mu

    def matrix(self, mu) -> np.ndarray:
        """Channel matrices ``(K, U, N)`` for the pattern assignment ``mu``."""
        mu = self.check_assignment(mu)
        h = self.coeffs[:, :, np.arange(self.n_elements), mu]  # (U, K, N)
        return np.ascontiguousarray(h.transpose(1, 0, 2))

    def select(self, indices) -> "ChannelRealization":
        """Sub-realization holding only the users at ``indices`` (in that order)."""
        idx = list(indices)
        users = tuple(self.users[i] for i in idx) if self.users else ()
        return ChannelRealization(self.coeffs[idx], self.noise_power, users, self.seed, dict(self.meta))

    def scaled(self, gains) -> "ChannelRealization":
        """Copy with pattern ``p`` amplitudes multiplied by ``sqrt(gains[p])``."""
        s = np.sqrt(np.broadcast_to(np.asarray(gains, dtype=float), (self.n_patterns,)))
        return ChannelRealization(self.coeffs * s, self.noise_power, self.users, self.seed, dict(self.meta))


def cluster_channel(scenario, geom: ArrayGeometry, pattern_set: PatternSet, ues, seed: int,
                    trial: int = 0) -> ChannelRealization:
    """Clustered multipath channel of ``ues`` (a UE or a list of UEs).

    Each user's clusters come from the sub-stream ``(seed, trial,
    STREAM_CLUSTERS, uid)``, so a user's channel does not depend on which
    other users are generated with it.
    """
    check_seed(seed)
    if isinstance(ues, UE):
        ues = [ues]
    if scenario.subcarriers < 1 or scenario.n_clusters < 1:
        raise ConfigError("need at least one subcarrier and one cluster")
    freqs = subcarrier_offsets(scenario.bandwidth, scenario.subcarriers)
    coeffs = []
    for ue in ues:
        rng = derive_rng(seed, trial, STREAM_CLUSTERS, ue.uid)
        clusters = draw_clusters(scenario, ue, rng)
        d3 = math.hypot(ue.horizontal_distance, ue.z - scenario.bs_height)
        pl = path_loss(d3, ue.indoor, scenario)
        coeffs.append(cluster_coefficients(clusters, geom, pattern_set, freqs, ue.polarization, pl))
    meta = {"trial": int(trial), "P": pattern_set.P}
    return ChannelRealization(np.stack(coeffs), scenario.noise_power, tuple(ues), int(seed), meta)
