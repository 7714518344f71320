"""Precoder power consumption and energy efficiency."""

from __future__ import annotations

from dataclasses import dataclass

from .arch import Architecture


@dataclass(frozen=True)
class PowerModel:
    """Component power draws in mW; ``tx_power`` in W.

    Each RF chain holds two DACs, two low-pass filters and two mixers; one
    local oscillator is shared by all chains.  Every reconfigurable antenna
    adds ``switches_per_rpa`` always-on switches.
    """

    p_dac: float = 200.0
    p_lpf: float = 14.0
    p_mx: float = 19.0
    p_lo: float = 5.0
    p_ps: float = 30.0
    p_sw: float = 5.0
    switches_per_rpa: int = 12
    tx_power: float = 14.4

    def __post_init__(self):
        for name in ("p_dac", "p_lpf", "p_mx", "p_lo", "p_ps", "p_sw", "switches_per_rpa", "tx_power"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")

    @property
    def rf_chain(self) -> float:
        return 2 * self.p_dac + 2 * self.p_lpf + 2 * self.p_mx

    @property
    def rpa_overhead(self) -> float:
        return self.switches_per_rpa * self.p_sw


@dataclass(frozen=True)
class EERecord:
    se: float
    total_power: float
    ee: float


def precoder_power(arch, n_tx: int, n_rf: int, model: PowerModel = PowerModel()) -> float:
    """Precoder power consumption in mW."""
    arch = Architecture.parse(arch)
    if not n_tx >= n_rf >= 1:
        raise ValueError("need n_tx >= n_rf >= 1")
    if arch is Architecture.FDA_T:
        return n_tx * model.rf_chain + model.p_lo
    if n_tx % n_rf:
        raise ValueError("sub-connected arrays need n_rf to divide n_tx")
    sca = n_rf * model.rf_chain + model.p_lo + n_tx * model.p_ps
    if arch is Architecture.SCA_R:
        return sca + n_tx * model.rpa_overhead
    return sca


def total_power(arch, n_tx: int, n_rf: int, model: PowerModel = PowerModel()) -> float:
    """Precoder plus transmit power in W."""
    return precoder_power(arch, n_tx, n_rf, model) / 1000 + model.tx_power


def energy_efficiency(se: float, arch, n_tx: int, n_rf: int,
                      model: PowerModel = PowerModel()) -> EERecord:
    if se < 0:
        raise ValueError("spectral efficiency must be non-negative")
    total = total_power(arch, n_tx, n_rf, model)
    return EERecord(se, total, se / total)
