"""Base-station array geometry and RF-chain wiring."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SPEED_OF_LIGHT = 299_792_458.0


def wavelength(frequency: float) -> float:
    return SPEED_OF_LIGHT / frequency


@dataclass(frozen=True, eq=False)
class ArrayGeometry:
    """Element positions (m), polarization slants (rad) and element -> RF chain map.

    Elements wired to the same RF chain form one contiguous, equally sized
    block, which is what the sub-connected architecture needs.
    """

    positions: np.ndarray
    slants: np.ndarray
    subarray_map: np.ndarray
    wavelength: float

    def __post_init__(self):
        pos = np.array(self.positions, dtype=float).reshape(-1, 3)
        slants = np.array(self.slants, dtype=float).reshape(-1)
        smap = np.array(self.subarray_map, dtype=int).reshape(-1)
        if not (len(pos) == len(slants) == len(smap)) or len(pos) == 0:
            raise ValueError("positions, slants and subarray_map must have equal, non-zero length")
        if self.wavelength <= 0:
            raise ValueError("wavelength must be positive")
        n_rf = int(smap.max()) + 1
        if len(pos) % n_rf:
            raise ValueError(f"{n_rf} RF chains do not divide {len(pos)} elements")
        if not np.array_equal(smap, np.repeat(np.arange(n_rf), len(pos) // n_rf)):
            raise ValueError("subarray map must be contiguous equal-size blocks")
        for arr in (pos, slants, smap):
            arr.setflags(write=False)
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "slants", slants)
        object.__setattr__(self, "subarray_map", smap)

    @property
    def n_elements(self) -> int:
        return len(self.positions)

    @property
    def n_rf(self) -> int:
        return int(self.subarray_map[-1]) + 1

    @property
    def block_size(self) -> int:
        return self.n_elements // self.n_rf

    def with_rf_chains(self, n_rf: int) -> "ArrayGeometry":
        return ArrayGeometry(self.positions, self.slants, _block_map(self.n_elements, n_rf),
                             self.wavelength)


def _block_map(n_elements: int, n_rf: int) -> np.ndarray:
    if n_rf < 1 or n_elements % n_rf:
        raise ValueError(f"{n_rf} RF chains do not divide {n_elements} elements")
    return np.repeat(np.arange(n_rf), n_elements // n_rf)


def place_ula(n_elements: int, aperture: float, wavelength: float = wavelength(3e9),
              n_rf: int | None = None) -> ArrayGeometry:
    """Single-polarized uniform linear array along y, centred on the origin.

    The end elements sit on the aperture edges, so the spacing is
    ``aperture / (n - 1)``.
    """
    if n_elements < 1:
        raise ValueError("need at least one element")
    if aperture <= 0:
        raise ValueError("aperture must be positive")
    if n_elements == 1:
        y = np.zeros(1)
    else:
        y = np.linspace(-aperture / 2, aperture / 2, n_elements)
    pos = np.zeros((n_elements, 3))
    pos[:, 1] = y
    return ArrayGeometry(pos, np.zeros(n_elements), _block_map(n_elements, n_rf or n_elements),
                         wavelength)


def place_cell_ula(n_elements: int, aperture: float, wavelength: float = wavelength(3e9),
                   n_rf: int | None = None) -> ArrayGeometry:
    """ULA along y that tiles the aperture with ``n`` equal cells.

    Each element sits at the centre of its cell, so the spacing is
    ``aperture / n`` and the end elements are half a spacing inside the
    edges.  This is the placement that matches an effective area of
    ``aperture / n`` per element.
    """
    if n_elements < 1:
        raise ValueError("need at least one element")
    if aperture <= 0:
        raise ValueError("aperture must be positive")
    if n_elements == 1:
        return place_ula(1, aperture, wavelength, n_rf)
    return place_ula(n_elements, aperture * (n_elements - 1) / n_elements, wavelength, n_rf)


def dual_pol_ula(n_pairs: int, wavelength: float, n_rf: int, spacing: float | None = None,
                 slant: float = math.radians(45.0)) -> ArrayGeometry:
    """Dual-polarized ULA along y with ``2 * n_pairs`` elements.

    Elements ``0 .. n_pairs-1`` carry the ``+slant`` polarization, elements
    ``n_pairs .. 2 n_pairs - 1`` the ``-slant`` one at the same positions, so
    each RF-chain block stays co-polarized whenever ``n_rf`` is even.
    """
    if n_pairs < 1:
        raise ValueError("need at least one antenna pair")
    spacing = wavelength / 2 if spacing is None else spacing
    y = (np.arange(n_pairs) - (n_pairs - 1) / 2) * spacing
    pos = np.zeros((n_pairs, 3))
    pos[:, 1] = y
    positions = np.concatenate([pos, pos])
    slants = np.concatenate([np.full(n_pairs, slant), np.full(n_pairs, -slant)])
    return ArrayGeometry(positions, slants, _block_map(2 * n_pairs, n_rf), wavelength)
