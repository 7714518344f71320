"""
Antenna radiation patterns.

Three pattern families are supported:

* ``lobe``   -- single main lobe in azimuth with a shared elevation cut,
* ``split``  -- pointwise maximum of two lobes (two equal peaks),
* ``dipole`` -- elemental (Hertz) dipole, power gain ``max_gain * sin^2``
  of the angle between the dipole axis and the propagation direction.

Directions use the array's local frame: azimuth 0 is broadside (+x),
azimuth grows towards +y, elevation is measured from the horizontal plane.
All gains are linear power gains.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

LOBE = "lobe"
SPLIT = "split"
DIPOLE = "dipole"
_KINDS = (LOBE, SPLIT, DIPOLE)

DIPOLE_DIRECTIVITY = 1.5


@dataclass(frozen=True)
class Direction:
    """Propagation direction in the array frame (radians)."""

    azimuth: float
    elevation: float = 0.0

    def __post_init__(self):
        if not (-math.pi < self.azimuth <= math.pi):
            raise ValueError(f"azimuth {self.azimuth} outside (-pi, pi]")
        if not (-math.pi / 2 <= self.elevation <= math.pi / 2):
            raise ValueError(f"elevation {self.elevation} outside [-pi/2, pi/2]")

    @classmethod
    def from_degrees(cls, azimuth: float, elevation: float = 0.0) -> "Direction":
        return cls(wrap_angle(math.radians(azimuth)), math.radians(elevation))

    @classmethod
    def from_vector(cls, vec) -> "Direction":
        x, y, z = (float(c) for c in vec)
        r = math.sqrt(x * x + y * y + z * z)
        if r == 0.0:
            raise ValueError("zero vector has no direction")
        el = math.asin(max(-1.0, min(1.0, z / r)))
        return cls(wrap_angle(math.atan2(y, x)), el)

    def unit_vector(self) -> np.ndarray:
        return unit_vectors(self.azimuth, self.elevation)


def wrap_angle(angle):
    """Wrap angles (radians) into (-pi, pi]."""
    wrapped = np.pi - np.mod(np.pi - np.asarray(angle, dtype=float), 2 * np.pi)
    if np.ndim(wrapped) == 0:
        return float(wrapped)
    return wrapped


def unit_vectors(azimuth, elevation) -> np.ndarray:
    """Cartesian unit vectors, shape ``broadcast(azimuth, elevation).shape + (3,)``."""
    az, el = np.broadcast_arrays(np.asarray(azimuth, float), np.asarray(elevation, float))
    ce = np.cos(el)
    return np.stack([ce * np.cos(az), ce * np.sin(az), np.sin(el)], axis=-1)


def lobe_sharpness(hpbw: float, floor_gain: float = 0.0, max_gain: float = 1.0) -> float:
    """Exponent ``q`` such that ``floor + (max - floor) cos(hpbw/2)^q = max/2``."""
    if not 0 < hpbw < math.pi:
        raise ValueError("half-power beamwidth must lie in (0, pi)")
    level = (0.5 * max_gain - floor_gain) / (max_gain - floor_gain)
    if level <= 0:
        raise ValueError("floor gain must stay below the half-power level")
    return math.log(level) / math.log(math.cos(hpbw / 2))


@dataclass(frozen=True)
class PatternSpec:
    """Parametric radiation pattern.

    ``peaks`` holds the peak azimuths (radians) for ``lobe``/``split``;
    ``axis`` the unit dipole axis for ``dipole``.
    """

    kind: str
    max_gain: float = 1.0
    floor_gain: float = 0.0
    peaks: tuple = ()
    sharpness: float = 0.0
    elevation_sharpness: float = 0.0
    axis: tuple = ()

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown pattern kind {self.kind!r}")
        if not (self.max_gain > self.floor_gain >= 0):
            raise ValueError("need max_gain > floor_gain >= 0")
        if self.kind == LOBE and len(self.peaks) != 1:
            raise ValueError("lobe pattern needs exactly one peak")
        if self.kind == SPLIT and len(self.peaks) != 2:
            raise ValueError("split pattern needs exactly two peaks")
        if self.kind in (LOBE, SPLIT) and (self.sharpness <= 0 or self.elevation_sharpness < 0):
            raise ValueError("lobe sharpness must be positive")
        if self.kind == DIPOLE:
            if len(self.axis) != 3:
                raise ValueError("dipole axis must be a 3-vector")
            norm = math.sqrt(sum(c * c for c in self.axis))
            if not abs(norm - 1.0) < 1e-12:
                raise ValueError("dipole axis must be a unit vector")

    @classmethod
    def lobe(cls, peak: float, hpbw: float = math.radians(65.0), max_gain: float = 1.0,
             floor_db: float = -20.0) -> "PatternSpec":
        floor = max_gain * 10 ** (floor_db / 10)
        q = lobe_sharpness(hpbw, floor, max_gain)
        return cls(LOBE, max_gain, floor, (float(peak),), q, q)

    @classmethod
    def split(cls, peak1: float, peak2: float, hpbw: float = math.radians(65.0),
              max_gain: float = 1.0, floor_db: float = -20.0) -> "PatternSpec":
        floor = max_gain * 10 ** (floor_db / 10)
        q = lobe_sharpness(hpbw, floor, max_gain)
        return cls(SPLIT, max_gain, floor, (float(peak1), float(peak2)), q, q)

    @classmethod
    def dipole(cls, axis=(0.0, 0.0, 1.0), max_gain: float = DIPOLE_DIRECTIVITY) -> "PatternSpec":
        a = np.asarray(axis, dtype=float)
        a = a / np.linalg.norm(a)
        return cls(DIPOLE, max_gain, 0.0, axis=tuple(float(c) for c in a))

    @property
    def peak_azimuth(self) -> float:
        return self.peaks[0]

    def gain(self, azimuth, elevation=0.0):
        """Linear power gain towards (azimuth, elevation); broadcasts over arrays."""
        if self.kind == DIPOLE:
            return self.gain_towards(unit_vectors(azimuth, elevation))
        az = np.asarray(azimuth, dtype=float)
        el = np.asarray(elevation, dtype=float)
        vert = np.maximum(np.cos(el), 0.0) ** self.elevation_sharpness
        horiz = np.maximum(np.cos(az - self.peaks[0]), 0.0) ** self.sharpness
        if self.kind == SPLIT:
            other = np.maximum(np.cos(az - self.peaks[1]), 0.0) ** self.sharpness
            horiz = np.maximum(horiz, other)
        g = self.floor_gain + (self.max_gain - self.floor_gain) * horiz * vert
        return float(g) if np.ndim(g) == 0 else g

    def gain_towards(self, vectors):
        """Gain towards Cartesian direction vectors of shape ``(..., 3)`` (need not be unit)."""
        v = np.asarray(vectors, dtype=float)
        if self.kind != DIPOLE:
            r = np.linalg.norm(v, axis=-1)
            az = np.arctan2(v[..., 1], v[..., 0])
            el = np.arcsin(np.clip(v[..., 2] / r, -1.0, 1.0))
            return self.gain(az, el)
        g = dipole_gain(np.asarray(self.axis), v, self.max_gain)
        return float(g) if np.ndim(g) == 0 else g

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "max_gain": self.max_gain, "floor_gain": self.floor_gain}
        if self.kind == DIPOLE:
            out["axis"] = list(self.axis)
        else:
            out["peaks"] = list(self.peaks)
            out["sharpness"] = self.sharpness
            out["elevation_sharpness"] = self.elevation_sharpness
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "PatternSpec":
        return cls(
            kind=data["kind"],
            max_gain=float(data["max_gain"]),
            floor_gain=float(data.get("floor_gain", 0.0)),
            peaks=tuple(float(p) for p in data.get("peaks", ())),
            sharpness=float(data.get("sharpness", 0.0)),
            elevation_sharpness=float(data.get("elevation_sharpness", 0.0)),
            axis=tuple(float(a) for a in data.get("axis", ())),
        )


def dipole_gain(axis, vectors, max_gain: float = DIPOLE_DIRECTIVITY):
    """``max_gain * sin^2`` of the angle between ``axis`` and ``vectors`` (both ``(..., 3)``)."""
    a = np.asarray(axis, dtype=float)
    v = np.asarray(vectors, dtype=float)
    a = a / np.linalg.norm(a, axis=-1, keepdims=True)
    v = v / np.linalg.norm(v, axis=-1, keepdims=True)
    cos = np.sum(a * v, axis=-1)
    return max_gain * np.clip(1.0 - cos * cos, 0.0, 1.0)


def pattern_gain(spec: PatternSpec, direction: Direction) -> float:
    return float(spec.gain(direction.azimuth, direction.elevation))


def rotated_axes(targets, reference=(0.0, 0.0, 1.0)) -> np.ndarray:
    """Dipole axes perpendicular to ``targets`` (``(..., 3)``), closest to ``reference``.

    This is the smallest rotation of a reference dipole that puts its
    main lobe onto the target direction.  When the target is parallel to
    the reference, a fixed perpendicular axis is used instead.
    """
    t = np.asarray(targets, dtype=float)
    t = t / np.linalg.norm(t, axis=-1, keepdims=True)
    ref = np.asarray(reference, dtype=float)
    ref = ref / np.linalg.norm(ref)
    axes = ref - np.sum(t * ref, axis=-1, keepdims=True) * t
    norm = np.linalg.norm(axes, axis=-1, keepdims=True)
    degenerate = norm[..., 0] < 1e-12
    if np.any(degenerate):
        alt = np.array([1.0, 0.0, 0.0]) if abs(ref[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
        tt = t[degenerate]
        fix = alt - np.sum(tt * alt, axis=-1, keepdims=True) * tt
        axes[degenerate] = fix
        norm[degenerate] = np.linalg.norm(fix, axis=-1, keepdims=True)
    return axes / norm


def rotate_dipole(target: Direction, reference=(0.0, 0.0, 1.0),
                  max_gain: float = DIPOLE_DIRECTIVITY) -> PatternSpec:
    """Dipole whose main lobe points at ``target``."""
    axis = rotated_axes(target.unit_vector(), reference)
    return PatternSpec.dipole(axis, max_gain=max_gain)


def average_gain(spec: PatternSpec, n_elevation: int = 256, n_azimuth: int = 720) -> float:
    """Gain averaged over the unit sphere (radiated power / (4 pi) for unit input).

    Gauss-Legendre nodes in ``sin(elevation)`` and a uniform periodic grid
    in azimuth.
    """
    u, w = np.polynomial.legendre.leggauss(n_elevation)
    el = np.arcsin(u)
    az = -np.pi + (np.arange(n_azimuth) + 0.5) * (2 * np.pi / n_azimuth)
    g = spec.gain(az[None, :], el[:, None])
    return float(np.sum(w[:, None] * g) * (2 * np.pi / n_azimuth) / (4 * np.pi))


@dataclass(frozen=True)
class PatternSet:
    """Ordered set of selectable patterns sharing one peak gain."""

    patterns: tuple
    legacy_index: int = 0
    names: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "patterns", tuple(self.patterns))
        if not self.patterns:
            raise ValueError("pattern set must not be empty")
        if not 0 <= self.legacy_index < len(self.patterns):
            raise ValueError("legacy index out of range")
        peak = self.patterns[0].max_gain
        if any(p.max_gain != peak for p in self.patterns):
            raise ValueError("all patterns in a set must share the same max_gain")
        names = tuple(self.names) or tuple(f"pattern{i}" for i in range(len(self.patterns)))
        if len(names) != len(self.patterns):
            raise ValueError("one name per pattern required")
        object.__setattr__(self, "names", names)

    def __len__(self) -> int:
        return len(self.patterns)

    def __getitem__(self, index: int) -> PatternSpec:
        return self.patterns[index]

    @property
    def P(self) -> int:
        return len(self.patterns)

    def gains(self, azimuth, elevation=0.0) -> np.ndarray:
        """Gains of every member, stacked on a trailing axis of length P."""
        return np.stack([np.asarray(p.gain(azimuth, elevation)) for p in self.patterns], axis=-1)

    def subset(self, indices: Sequence[int]) -> "PatternSet":
        indices = list(indices)
        if self.legacy_index not in indices:
            raise ValueError("subset must keep the legacy pattern")
        return PatternSet(
            tuple(self.patterns[i] for i in indices),
            indices.index(self.legacy_index),
            tuple(self.names[i] for i in indices),
        )

    def to_dict(self) -> dict:
        return {
            "legacy_index": self.legacy_index,
            "names": list(self.names),
            "patterns": [p.to_dict() for p in self.patterns],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PatternSet":
        return cls(
            tuple(PatternSpec.from_dict(p) for p in data["patterns"]),
            int(data.get("legacy_index", 0)),
            tuple(data.get("names", ())),
        )


def make_type_set(max_gain: float = 1.0, floor_db: float = -20.0,
                  hpbw: float = math.radians(65.0)) -> PatternSet:
    """The four-pattern reconfigurable set.

    Type 0 is the fixed legacy pattern (peak at broadside); Type 1 and
    Type 3 are tilted to +30 and -30 degrees; Type 2 splits into two
    peaks at +/-56 degrees.
    """
    kw = dict(hpbw=hpbw, max_gain=max_gain, floor_db=floor_db)
    deg = math.radians
    return PatternSet(
        (
            PatternSpec.lobe(0.0, **kw),
            PatternSpec.lobe(deg(30.0), **kw),
            PatternSpec.split(deg(56.0), deg(-56.0), **kw),
            PatternSpec.lobe(deg(-30.0), **kw),
        ),
        legacy_index=0,
        names=("type0", "type1", "type2", "type3"),
    )


def make_legacy_set(**kwargs) -> PatternSet:
    """Single-pattern set (Type 0 only), i.e. a conventional array."""
    return make_type_set(**kwargs).subset([0])
