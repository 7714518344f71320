"""
Scenario configuration.

A scenario is a flat JSON document; every field is optional and falls back
to the defaults below (urban-macro downlink with a 32-element dual-polarized
sub-connected array and 8 RF chains).  Unknown keys are rejected.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .arch import Architecture
from .errors import ConfigError

PRESETS = ("fig1", "regions", "cdf", "ee", "custom")

_PRESET_DEFAULTS: dict[str, dict[str, Any]] = {
    "fig1": {},
    "regions": {"users": [1], "architectures": ["SCA_T", "SCA_R"]},
    "cdf": {"users": [1, 2, 4, 6], "architectures": ["FDA_T", "SCA_T", "SCA_R"]},
    "ee": {"users": [1, 2, 4, 6], "architectures": ["FDA_T", "SCA_T", "SCA_R"]},
    "custom": {},
}


@dataclass
class ScenarioConfig:
    preset: str = "custom"
    seed: int = 2024
    trials: int = 200
    ttis: int = 50

    # base-station array
    n_tx: int = 32
    n_rf: int = 8
    dual_pol: bool = True
    element_spacing_wavelengths: float = 0.5
    bs_height: float = 25.0

    # scheduling
    users: list = field(default_factory=lambda: [1, 2, 4, 6])
    pool_size: int = 15
    architectures: list = field(default_factory=lambda: ["FDA_T", "SCA_T", "SCA_R"])

    # patterns: "types", "legacy" or an explicit pattern-set document
    pattern_set: Any = "types"
    pattern_subset: list | None = None

    # radio
    carrier_frequency: float = 3.0e9
    bandwidth: float = 20e6
    subcarriers: int = 16
    tx_power_dbm: float = 42.0
    noise_psd_dbm_hz: float = -174.0
    noise_figure_db: float = 0.0

    # UE drop
    cell_radius_min: float = 35.0
    cell_radius_max: float = 289.0
    sector_half_width_deg: float = 60.0
    ue_height: float = 1.5
    indoor_ratio: float = 0.2
    penetration_loss_db: float = 20.0
    ue_polarization_deg: float = 0.0
    ue_file: str | None = None
    region_edges: list = field(default_factory=lambda: [35.0, 100.0, 200.0, 289.0])

    # clustered channel
    n_clusters: int = 12
    azimuth_spread_deg: float = 20.0
    elevation_spread_deg: float = 5.0
    delay_spread: float = 363e-9
    delay_scaling: float = 2.3
    cluster_shadowing_db: float = 3.0
    xpr_db: float = 8.0

    # precoding / EMR search
    phase_bits: int | None = 4
    t_iter: int = 3
    early_exit: bool = True
    max_evaluations: int | None = None

    # power model overrides (field name -> value)
    power: dict = field(default_factory=dict)

    # free-space (fig1) experiment
    fig1_frequency: float = 3.0e9
    fig1_aperture_wavelengths: float = 4.0
    fig1_sweep: list = field(default_factory=lambda: [1, 2, 4, 8, 16, 32, 64, 128, 256, 512])
    fig1_dense: int = 1024
    fig1_draws: int = 3000
    fig1_x: list = field(default_factory=lambda: [5.0, 50.0])
    fig1_y: list = field(default_factory=lambda: [50.0, 100.0])
    fig1_tx_power_w: float = 1.0
    fig1_dipole_axis: list = field(default_factory=lambda: [0.0, 1.0, 0.0])
    fig1_area_ref: float = 1.0

    out: str = "results"

    def __post_init__(self):
        self.validate()

    # -- derived quantities -------------------------------------------------

    @property
    def wavelength(self) -> float:
        from .geometry import wavelength
        return wavelength(self.carrier_frequency)

    @property
    def tx_power_w(self) -> float:
        """Total transmit power of the cell used in the link budget."""
        return 10 ** ((self.tx_power_dbm - 30) / 10)

    @property
    def subcarrier_tx_power(self) -> float:
        return self.tx_power_w / self.subcarriers

    @property
    def noise_power(self) -> float:
        """AWGN power per subcarrier in watts."""
        dbm = (self.noise_psd_dbm_hz + 10 * math.log10(self.bandwidth / self.subcarriers)
               + self.noise_figure_db)
        return 10 ** ((dbm - 30) / 10)

    @property
    def architecture_list(self) -> list:
        return [Architecture.parse(a) for a in self.architectures]

    # -- validation / IO ----------------------------------------------------

    def validate(self) -> None:
        def need(cond, msg):
            if not cond:
                raise ConfigError(msg)

        need(self.preset in PRESETS, f"unknown preset {self.preset!r}")
        need(isinstance(self.seed, int) and 0 <= self.seed < 2**64, "seed must be a u64 integer")
        need(self.trials >= 1 and self.ttis >= 1, "trials and ttis must be >= 1")
        need(self.n_rf >= 1 and self.n_tx >= self.n_rf, "need 1 <= n_rf <= n_tx")
        need(self.n_tx % self.n_rf == 0, "n_rf must divide n_tx")
        if self.dual_pol:
            need(self.n_tx % 2 == 0, "dual-polarized arrays need an even n_tx")
        need(len(self.users) >= 1, "at least one scheduled-user count required")
        for u in self.users:
            need(isinstance(u, int) and 1 <= u <= self.n_rf, f"scheduled users {u} must be in [1, n_rf]")
            need(u <= self.pool_size, f"scheduled users {u} exceeds pool size {self.pool_size}")
        need(len(self.architectures) >= 1, "at least one architecture required")
        for a in self.architectures:
            try:
                Architecture.parse(a)
            except ValueError as exc:
                raise ConfigError(str(exc)) from None
        need(0 < self.cell_radius_min < self.cell_radius_max, "cell radius bounds must be ordered")
        edges = list(self.region_edges)
        need(len(edges) >= 2 and all(a < b for a, b in zip(edges, edges[1:])),
             "region edges must be strictly increasing")
        need(0.0 <= self.indoor_ratio <= 1.0, "indoor_ratio must be in [0, 1]")
        need(self.subcarriers >= 1 and self.bandwidth > 0, "invalid bandwidth/subcarriers")
        need(self.carrier_frequency > 0, "carrier frequency must be positive")
        need(self.n_clusters >= 1, "need at least one cluster")
        need(self.phase_bits is None or (isinstance(self.phase_bits, int) and self.phase_bits >= 1),
             "phase_bits must be a positive integer or null")
        need(self.t_iter >= 1, "t_iter must be >= 1")
        need(self.max_evaluations is None or self.max_evaluations >= 1, "max_evaluations must be >= 1")
        need(self.pool_size >= 1, "pool size must be >= 1")
        need(self.fig1_draws >= 1 and self.fig1_dense >= 1, "fig1 draws/dense must be >= 1")
        need(all(n >= 1 for n in self.fig1_sweep), "fig1 sweep sizes must be >= 1")
        if isinstance(self.pattern_set, str):
            need(self.pattern_set in ("types", "legacy"), f"unknown pattern set {self.pattern_set!r}")
        from .power import PowerModel
        valid = {f.name for f in dataclasses.fields(PowerModel)}
        unknown = set(self.power) - valid
        need(not unknown, f"unknown power model fields: {sorted(unknown)}")

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioConfig":
        valid = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - valid
        if unknown:
            raise ConfigError(f"unknown scenario keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def for_preset(cls, preset: str, **overrides) -> "ScenarioConfig":
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset {preset!r}")
        data = {"preset": preset, **_PRESET_DEFAULTS[preset], **overrides}
        return cls.from_dict(data)

    def replace(self, **changes) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)

    def pattern_set_obj(self):
        from .patterns import PatternSet, make_legacy_set, make_type_set
        if self.pattern_set == "types":
            ps = make_type_set()
        elif self.pattern_set == "legacy":
            ps = make_legacy_set()
        else:
            try:
                ps = PatternSet.from_dict(self.pattern_set)
            except (KeyError, TypeError, ValueError) as exc:
                raise ConfigError(f"invalid pattern set document: {exc}") from None
        if self.pattern_subset is not None:
            ps = ps.subset(self.pattern_subset)
        return ps

    def power_model(self):
        from .power import PowerModel
        return PowerModel(**self.power)

    def geometry(self):
        from .geometry import dual_pol_ula, place_ula
        lam = self.wavelength
        spacing = self.element_spacing_wavelengths * lam
        if self.dual_pol:
            return dual_pol_ula(self.n_tx // 2, lam, self.n_rf, spacing=spacing)
        return place_ula(self.n_tx, spacing * max(self.n_tx - 1, 1), lam, n_rf=self.n_rf)


def load_config(path, preset: str | None = None, **overrides) -> ScenarioConfig:
    """Read a JSON scenario, layering ``preset`` defaults under the file and ``overrides`` on top."""
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read scenario {path}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("scenario document must be a JSON object")
    preset = preset or data.get("preset", "custom")
    data.pop("preset", None)
    return ScenarioConfig.for_preset(preset, **{**data, **overrides})


def save_config(config: ScenarioConfig, path) -> None:
    Path(path).write_text(json.dumps(config.to_dict(), indent=2, sort_keys=True) + "\n")
