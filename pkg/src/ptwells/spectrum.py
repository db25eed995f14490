"""Closed-form QES energy levels (M = 1..4) and PT-phase classification.

The first M levels of H = p^2 - (zeta cosh 2x - iM)^2 are algebraic in
zeta.  For even M the levels are complex for every zeta > 0 (broken PT
phase); for odd M they are real up to a critical coupling.  Only M = 3
has a finite critical coupling inside the solvable sector (zeta_c = 1/2,
where 1 - 4 zeta^2 changes sign); the single M = 1 level is real for all
zeta, so no finite zeta_c exists there and none is reported.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

from .dynamics import PARITY_POINT
from .errors import DomainError, UnsupportedOrderError

__all__ = ["QESLevel", "PTPhase", "PTPhaseReport", "qes_levels", "pt_phase", "ZETA_C_M3"]

REALITY_TOL = 1e-12
ZETA_C_M3 = 0.5

SUPPORTED_M = (1, 2, 3, 4)


class PTPhase(enum.Enum):
    UNBROKEN = "unbroken"
    BROKEN = "broken"


@dataclass(frozen=True)
class QESLevel:
    m_int: int
    label: str
    energy: complex

    @property
    def is_real(self) -> bool:
        return abs(self.energy.imag) <= REALITY_TOL


@dataclass(frozen=True)
class PTPhaseReport:
    phase: PTPhase
    zeta_critical: float | None
    parity_point: complex = PARITY_POINT


def _check_args(m_int: int, zeta: float) -> None:
    if m_int not in SUPPORTED_M:
        raise UnsupportedOrderError(
            f"closed-form levels exist here only for M in {SUPPORTED_M}, got {m_int!r}"
        )
    if not (math.isfinite(zeta) and zeta > 0):
        raise DomainError(f"zeta must be finite and > 0, got {zeta!r}")


def qes_levels(m_int: int, zeta: float) -> list[QESLevel]:
    """The algebraically solvable levels for M = 1..4.

    Square roots are taken on the principal branch; for odd M below the
    critical coupling their arguments are nonnegative reals, so the levels
    come out real to roundoff.
    """
    _check_args(m_int, zeta)
    z2 = zeta * zeta
    if m_int == 1:
        return [QESLevel(1, "E", complex(1.0 - z2))]
    if m_int == 2:
        base = 3.0 - z2
        return [
            QESLevel(2, "E+", complex(base, 2.0 * zeta)),
            QESLevel(2, "E-", complex(base, -2.0 * zeta)),
        ]
    if m_int == 3:
        root = cmath.sqrt(complex(1.0 - 4.0 * z2))
        base = 7.0 - z2
        return [
            QESLevel(3, "E+", base + root),
            QESLevel(3, "E-", base - root),
            QESLevel(3, "E0", complex(5.0 - z2)),
        ]
    root = cmath.sqrt(complex(1.0 - z2, -zeta))
    base = complex(11.0 - z2, -2.0 * zeta)
    return [
        QESLevel(4, "E1+", base + root),
        QESLevel(4, "E1-", base - root),
    ]


def pt_phase(m_int: int, zeta: float) -> PTPhaseReport:
    """Broken/unbroken PT phase of the solvable sector.

    Even M: broken for every coupling.  M = 3: unbroken iff
    zeta <= zeta_c = 1/2.  M = 1: unbroken for all zeta, with no finite
    critical coupling to report.
    """
    _check_args(m_int, zeta)
    if m_int % 2 == 0:
        return PTPhaseReport(phase=PTPhase.BROKEN, zeta_critical=None)
    if m_int == 1:
        return PTPhaseReport(phase=PTPhase.UNBROKEN, zeta_critical=None)
    phase = PTPhase.UNBROKEN if zeta <= ZETA_C_M3 else PTPhase.BROKEN
    return PTPhaseReport(phase=phase, zeta_critical=ZETA_C_M3)
