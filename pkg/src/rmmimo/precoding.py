"""
Digital, analog and hybrid precoders and the multi-user sum rate.

Shapes: a channel is ``(U, N)`` (narrowband) or ``(K, U, N)`` (one matrix
per subcarrier) with row ``u`` equal to ``h_u^H``; analog precoders are
``(N, M)`` and frequency flat; digital precoders are ``(M, U)`` or
``(K, M, U)``.  ``tx_power`` always refers to one subcarrier.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .arch import Architecture
from .errors import ContractError, DomainError, SingularChannelError

FULLY_DIGITAL = "fully_digital"
SUB_CONNECTED = "sub_connected"

POWER_RTOL = 1e-9


@dataclass(frozen=True, eq=False)
class AnalogPrecoder:
    matrix: np.ndarray
    structure: str = FULLY_DIGITAL
    phase_bits: int | None = None

    @property
    def n_rf(self) -> int:
        return self.matrix.shape[1]


@dataclass(frozen=True, eq=False)
class DigitalPrecoder:
    matrix: np.ndarray


@dataclass(frozen=True, eq=False)
class SERecord:
    """Sum rate ``se`` (bit/s/Hz), per-user rates and per-subcarrier SINRs ``(K, U)``."""

    se: float
    per_user: np.ndarray
    sinr: np.ndarray


def _as_wideband(H) -> np.ndarray:
    H = np.asarray(H)
    if H.ndim == 2:
        return H[None]
    if H.ndim != 3:
        raise ContractError("channel must be (U, N) or (K, U, N)")
    return H


def spectral_efficiency(H, F_RF, F_BB, noise_power: float, tx_power: float | None = None) -> SERecord:
    """Sum rate of linear precoding, averaged over subcarriers.

    ``SINR_u = |h_u^H F_RF f_u|^2 / (sum_{j != u} |h_u^H F_RF f_j|^2 + noise)``.
    When ``tx_power`` is given the total power constraint is checked first.
    """
    H = _as_wideband(H)
    F_RF = np.asarray(F_RF)
    F_BB = np.asarray(F_BB)
    if F_BB.ndim == 2:
        F_BB = np.broadcast_to(F_BB, (H.shape[0],) + F_BB.shape)
    K, U, N = H.shape
    if F_RF.ndim != 2 or F_RF.shape[0] != N:
        raise ContractError(f"analog precoder must be ({N}, M), got {F_RF.shape}")
    if F_BB.shape != (K, F_RF.shape[1], U):
        raise ContractError(f"digital precoder must be ({K}, {F_RF.shape[1]}, {U}), got {F_BB.shape}")
    if noise_power <= 0:
        raise ContractError("noise power must be positive")
    if tx_power is not None:
        check_power(F_RF, F_BB, tx_power)

    G = np.abs(H @ F_RF @ F_BB) ** 2  # (K, U, U): row u = receiver u
    signal = np.diagonal(G, axis1=1, axis2=2)
    interference = np.sum(np.where(np.eye(U, dtype=bool), 0.0, G), axis=2)
    sinr = signal / (interference + noise_power)
    per_user = np.mean(np.log2(1.0 + sinr), axis=0)
    return SERecord(float(np.sum(per_user)), per_user, sinr)


def check_power(F_RF, F_BB, tx_power: float) -> None:
    F_BB = np.asarray(F_BB)
    p = np.sum(np.abs(np.asarray(F_RF) @ F_BB) ** 2, axis=(-2, -1))
    if not np.all(np.abs(p - tx_power) <= POWER_RTOL * tx_power):
        raise ContractError(f"precoder power {p} differs from {tx_power}")


def zf_digital(H_eff, tx_power: float, F_RF=None) -> DigitalPrecoder:
    """Zero-forcing with equal power per user.

    Columns of the pseudo-inverse of ``H_eff`` are scaled so that every
    user radiates ``tx_power / U`` after the analog stage ``F_RF``
    (identity when omitted).  ``H_eff @ F_BB`` is then diagonal, real and
    positive.
    """
    H = np.asarray(H_eff)
    narrow = H.ndim == 2
    H = _as_wideband(H)
    K, U, M = H.shape
    if U > M:
        raise ContractError(f"{U} users exceed {M} RF chains")
    # H^H = Q R  =>  H = R^H Q^H and the right inverse is Q R^{-H}
    Q, R = np.linalg.qr(np.conj(np.swapaxes(H, -1, -2)))
    diag = np.abs(np.diagonal(R, axis1=-2, axis2=-1))
    tol = np.max(diag, axis=-1, keepdims=True) * max(U, M) * np.finfo(float).eps
    if not np.all(np.isfinite(diag)) or np.any(diag <= tol):
        raise SingularChannelError("effective channel is rank deficient")
    eye = np.broadcast_to(np.eye(U, dtype=complex), R.shape)
    V = Q @ np.linalg.solve(np.conj(np.swapaxes(R, -1, -2)), eye)
    radiated = V if F_RF is None else np.asarray(F_RF) @ V
    norms = np.linalg.norm(radiated, axis=-2, keepdims=True)
    F_BB = V * (math.sqrt(tx_power / U) / norms)
    return DigitalPrecoder(F_BB[0] if narrow else F_BB)


def quantize_phase(phase, bits: int | None):
    """Round phases to the nearest of ``2**bits`` uniform levels in ``[0, 2 pi)``."""
    phase = np.asarray(phase, dtype=float)
    if bits is None:
        return phase
    step = 2 * math.pi / 2 ** bits
    return np.mod(np.round(phase / step) * step, 2 * math.pi)


def sca_analog(H, n_rf, phase_bits: int | None = 4) -> AnalogPrecoder:
    """Block-diagonal phase-only precoder for the sub-connected array.

    Every RF chain drives one contiguous block of antennas.  The phases of a
    block follow the dominant right singular vector of the users' channels
    stacked over all subcarriers and restricted to that block, referenced
    to the block's first antenna and then quantized.
    """
    n_rf = getattr(n_rf, "n_rf", n_rf)
    H = _as_wideband(H)
    K, U, N = H.shape
    if n_rf < 1 or N % n_rf:
        raise ContractError(f"{n_rf} RF chains do not divide {N} antennas")
    B = N // n_rf
    blocks = H.reshape(K * U, n_rf, B).transpose(1, 0, 2)  # (M, K*U, B)
    gram = np.conj(np.swapaxes(blocks, -1, -2)) @ blocks  # (M, B, B)
    _, vecs = np.linalg.eigh(gram)
    v = vecs[:, :, -1]  # dominant right singular vector of each block
    phase = np.angle(v) - np.angle(v[:, :1])
    phase = quantize_phase(phase, phase_bits)
    F = np.zeros((N, n_rf), dtype=complex)
    rows = np.arange(N)
    F[rows, rows // B] = np.exp(1j * phase).reshape(N)
    return AnalogPrecoder(F, SUB_CONNECTED, phase_bits)


def hybrid_precode(H, architecture, tx_power: float, noise_power: float, n_rf=None,
                   phase_bits: int | None = 4):
    """Analog stage (identity for FDA) followed by ZF on ``H @ F_RF``.

    ``n_rf`` is an RF-chain count or an :class:`~rmmimo.geometry.ArrayGeometry`;
    it is ignored for the fully-digital architecture.  Returns
    ``(AnalogPrecoder, DigitalPrecoder, SERecord)``.
    """
    arch = Architecture.parse(architecture)
    H = _as_wideband(H)
    K, U, N = H.shape
    if arch.hybrid:
        if n_rf is None:
            raise ContractError("hybrid architectures need the RF-chain count")
        analog = sca_analog(H, n_rf, phase_bits)
    else:
        analog = AnalogPrecoder(np.eye(N, dtype=complex), FULLY_DIGITAL, None)
    if not U <= analog.n_rf <= N:
        raise ContractError(f"need U <= M <= N, got U={U}, M={analog.n_rf}, N={N}")
    digital = zf_digital(H @ analog.matrix, tx_power, analog.matrix)
    se = spectral_efficiency(H, analog.matrix, digital.matrix, noise_power)
    return analog, digital, se


def mrt_precoder(h, tx_power: float) -> np.ndarray:
    """Matched filter ``sqrt(P) h / ||h||`` for a single receive antenna (``y = h^H w``)."""
    h = np.asarray(h, dtype=complex)
    norm = np.linalg.norm(h)
    if norm == 0:
        raise DomainError("matched filter of a zero channel is undefined")
    return math.sqrt(tx_power) * h / norm
