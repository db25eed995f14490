"""Analytic positions and indexing of the periodic well lattice.

Stationary points of the potential away from the imaginary axis satisfy
zeta cosh 2z = iM, which puts well centers at

    right side:  x = +arcsinh(M/zeta)/2,  y = (4n+1) pi/4
    left side:   x = -arcsinh(M/zeta)/2,  y = (4n-1) pi/4

for integer n.  The vertical lattice period is pi.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .dynamics import SystemParams
from .errors import DomainError

__all__ = ["Side", "WellIndex", "well_x", "well_center", "nearest_well"]


class Side(enum.Enum):
    RIGHT = "right"
    LEFT = "left"


@dataclass(frozen=True, order=True)
class WellIndex:
    """Lattice label (side, n) for one well."""

    side: Side
    n: int


def well_x(params: SystemParams) -> float:
    """Magnitude of the well x-coordinate, arcsinh(M/zeta)/2."""
    return 0.5 * math.asinh(params.m_int / params.zeta)


def well_center(idx: WellIndex, params: SystemParams) -> complex:
    """Center of the indexed well as a point in the complex plane."""
    xw = well_x(params)
    if idx.side is Side.RIGHT:
        return complex(xw, (4 * idx.n + 1) * math.pi / 4.0)
    return complex(-xw, (4 * idx.n - 1) * math.pi / 4.0)


def nearest_well(z: complex, params: SystemParams) -> tuple[WellIndex, float]:
    """Lattice index minimizing Euclidean distance to z, plus that distance.

    Ties are broken toward smaller |n|, then right over left, so points on
    the imaginary axis report deterministically.
    """
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise DomainError(f"z must be finite, got {z!r}")
    xw = well_x(params)
    y = z.imag

    candidates: list[tuple[float, int, int, WellIndex]] = []
    for side, x_c, offset in ((Side.RIGHT, xw, 0.25), (Side.LEFT, -xw, -0.25)):
        # y_n = (n + offset) * pi; nearest integer plus neighbors for safety
        n0 = round(y / math.pi - offset)
        for n in (n0 - 1, n0, n0 + 1):
            d = math.hypot(z.real - x_c, y - (n + offset) * math.pi)
            rank = 0 if side is Side.RIGHT else 1
            candidates.append((d, abs(n), rank, WellIndex(side, n)))

    d, _, _, idx = min(candidates, key=lambda c: (c[0], c[1], c[2]))
    return idx, d
