"""Complexified cosh-well potential, its gradient, and the energy split.

Everything here is a pure function of a phase-space point and the two
physical parameters (zeta, M).  Units are fixed so that 2m = hbar = 1,
hence H = p^2 + V(z) with the particle living in the complex plane
z = x + iy.  Lengths are nanometers, times seconds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

__all__ = [
    "SystemParams",
    "EnergyComponents",
    "cosh_sinh_2z",
    "potential",
    "potential_gradient",
    "hamiltonian",
    "energy_components",
    "real_axis_hermitian_potential",
    "PARITY_POINT",
]

# Parity acts as z -> PARITY_POINT - z; combined with conjugation it leaves
# the potential invariant.
PARITY_POINT = complex(0.0, math.pi / 2)


@dataclass(frozen=True)
class SystemParams:
    """Physical configuration: coupling zeta > 0 and integer well depth M >= 1."""

    zeta: float
    m_int: int

    def __post_init__(self) -> None:
        if not (isinstance(self.m_int, int) and self.m_int >= 1):
            raise DomainError(f"m_int must be a positive integer, got {self.m_int!r}")
        if not (math.isfinite(self.zeta) and self.zeta > 0):
            raise DomainError(f"zeta must be finite and > 0, got {self.zeta!r}")


@dataclass(frozen=True)
class EnergyComponents:
    """Real and imaginary parts of the conserved complex energy."""

    e1: float
    e2: float


def _require_finite(value: complex, name: str) -> None:
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise DomainError(f"{name} must be finite, got {value!r}")


def cosh_sinh_2z(z: complex) -> tuple[complex, complex]:
    """cosh(2z) and sinh(2z) via the real decomposition.

    cosh(2x + 2iy) = cosh2x cos2y + i sinh2x sin2y and the analogous
    identity for sinh; both share the same four real evaluations, which
    keeps the components auditable and halves the libm work in the
    integrator's hot loop.
    """
    x2 = 2.0 * z.real
    y2 = 2.0 * z.imag
    chx = math.cosh(x2)
    shx = math.sinh(x2)
    cy = math.cos(y2)
    sy = math.sin(y2)
    return complex(chx * cy, shx * sy), complex(shx * cy, chx * sy)


def potential(z: complex, params: SystemParams) -> complex:
    """V(z) = -(zeta cosh 2z - iM)^2, the analytic continuation of the well."""
    _require_finite(z, "z")
    cosh2z, _ = cosh_sinh_2z(z)
    bracket = params.zeta * cosh2z - 1j * params.m_int
    return -bracket * bracket


def potential_gradient(z: complex, params: SystemParams) -> complex:
    """dV/dz = -4 zeta sinh(2z) (zeta cosh(2z) - iM).

    Hand-derived; the test suite checks it against central finite
    differences of :func:`potential`.
    """
    _require_finite(z, "z")
    cosh2z, sinh2z = cosh_sinh_2z(z)
    bracket = params.zeta * cosh2z - 1j * params.m_int
    return -4.0 * params.zeta * sinh2z * bracket


def hamiltonian(z: complex, p: complex, params: SystemParams) -> complex:
    """H = p^2 + V(z) (complex-valued, conserved along trajectories)."""
    _require_finite(z, "z")
    _require_finite(p, "p")
    return p * p + potential(z, params)


def energy_components(z: complex, p: complex, params: SystemParams) -> EnergyComponents:
    """E1 = p1^2 - p2^2 + V1 and E2 = 2 p1 p2 + V2.

    Algebraically identical to the real/imaginary parts of
    :func:`hamiltonian`; computed from the component formulas so tests can
    compare the two code paths.
    """
    v = potential(z, params)
    p1 = p.real
    p2 = p.imag
    return EnergyComponents(
        e1=p1 * p1 - p2 * p2 + v.real,
        e2=2.0 * p1 * p2 + v.imag,
    )


def real_axis_hermitian_potential(x: float, params: SystemParams) -> float:
    """Hermitian counterpart -(zeta cosh 2x - M)^2 on the real axis.

    A double well, always <= 0, with central barrier height (M - zeta)^2
    above the well bottoms.
    """
    if not math.isfinite(x):
        raise DomainError(f"x must be finite, got {x!r}")
    bracket = params.zeta * math.cosh(2.0 * x) - params.m_int
    return -(bracket * bracket)
