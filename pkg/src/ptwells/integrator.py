"""Adaptive integration of Hamilton's equations in the complex plane.

The flow is

    dz/dt = 2p,        dp/dt = -dV/dz = 4 zeta sinh(2z) (zeta cosh(2z) - iM),

integrated with an embedded Dormand-Prince 5(4) pair (FSAL) under PI step
control.  The complex energy H = p^2 + V(z) is exactly conserved by the
flow, so the relative deviation |H - E| / max(1, |E|) measured at every
accepted step serves as the numerical-correctness guard: the first sample
that exceeds ``energy_drift_limit`` is discarded and integration stops
with ``Termination.DRIFT_EXCEEDED``.  Every retained sample is therefore
certified to satisfy the drift bound.

Tunneling orbits periodically whip through regions where the potential is
enormous (|V| ~ 1e4..1e9 while |E| ~ 1); there the energy check is
ill-conditioned and plain relative step control lets single steps kick the
energy by ~|V| * rel_tol.  The error norm below therefore also weights the
per-step error against its effect on the energy (via 2|p| and |dV/dz|),
which keeps trajectories certified through moderate whips.  Past
|dV/dz| ~ 1e6 the drift measurement saturates at the double-precision
representation floor of the state itself and the guard fires regardless;
analysis then works on the certified prefix.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .dynamics import SystemParams, cosh_sinh_2z, hamiltonian, potential
from .errors import DomainError, NonFiniteStateError

__all__ = [
    "MomentumBranch",
    "Termination",
    "PhaseState",
    "IntegratorConfig",
    "Trajectory",
    "initial_momentum",
    "derivative",
    "integrate",
]


class MomentumBranch(enum.Enum):
    PRINCIPAL = "principal"
    NEGATED = "negated"


class Termination(enum.Enum):
    TIME_LIMIT = "time_limit"
    STEP_LIMIT = "step_limit"
    ESCAPED = "escaped"
    DRIFT_EXCEEDED = "drift_exceeded"


@dataclass(frozen=True)
class PhaseState:
    """One point of a trajectory: time, complex position, complex momentum."""

    t: float
    z: complex
    p: complex


@dataclass(frozen=True)
class IntegratorConfig:
    dt_init: float = 1e-3
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    t_max: float = 200.0
    max_steps: int = 2_000_000
    energy_drift_limit: float = 1e-8
    escape_radius: float = 8.0
    # escape along the lattice: |Im z - Im z0| beyond this also terminates
    # as ESCAPED (open orbits at real energy flee down the well column
    # with bounded Re z); infinite by default
    escape_y_span: float = math.inf

    def __post_init__(self) -> None:
        for name in ("dt_init", "rel_tol", "abs_tol", "t_max", "energy_drift_limit", "escape_radius"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise DomainError(f"{name} must be finite and > 0, got {v!r}")
        if not self.escape_y_span > 0:
            raise DomainError(f"escape_y_span must be > 0, got {self.escape_y_span!r}")
        if self.max_steps < 1:
            raise DomainError(f"max_steps must be >= 1, got {self.max_steps!r}")


@dataclass
class Trajectory:
    """Samples retained at accepted steps, plus the conserved energy.

    Sample arrays are columnar for memory efficiency; ``state(i)`` and
    ``samples`` provide the record view.  ``drift[i]`` is the relative
    energy deviation |H - E| / max(1, |E|) at sample i, bounded by the
    integration config's ``energy_drift_limit`` for every retained sample.
    """

    params: SystemParams
    energy: complex
    t: np.ndarray
    z: np.ndarray
    p: np.ndarray
    drift: np.ndarray
    termination: Termination
    n_accepted: int = 0
    n_rejected: int = 0
    config: IntegratorConfig = field(default_factory=IntegratorConfig)

    def __len__(self) -> int:
        return len(self.t)

    def state(self, i: int) -> PhaseState:
        return PhaseState(float(self.t[i]), complex(self.z[i]), complex(self.p[i]))

    @property
    def samples(self) -> list[PhaseState]:
        return [self.state(i) for i in range(len(self.t))]

    @property
    def max_drift(self) -> float:
        return float(self.drift.max()) if len(self.drift) else 0.0

    def energy_component_errors(self) -> tuple[np.ndarray, np.ndarray]:
        """Per-sample (e1, e2) deviations, each relative to its initial value."""
        cosh2z = np.cosh(2.0 * self.z)
        v = -((self.params.zeta * cosh2z - 1j * self.params.m_int) ** 2)
        h = self.p * self.p + v
        e1_0, e2_0 = self.energy.real, self.energy.imag
        err1 = (h.real - e1_0) / max(1.0, abs(e1_0))
        err2 = (h.imag - e2_0) / max(1.0, abs(e2_0))
        return err1, err2


def initial_momentum(
    z0: complex,
    energy: complex,
    branch: MomentumBranch,
    params: SystemParams,
) -> complex:
    """Momentum satisfying H(z0, p0) = energy: +/- sqrt(energy - V(z0)).

    The principal complex square root fixes the branch; NEGATED flips the
    sign and hence the initial direction of travel.
    """
    p = cmath.sqrt(energy - potential(z0, params))
    return -p if branch is MomentumBranch.NEGATED else p


def derivative(state: PhaseState, params: SystemParams) -> tuple[complex, complex]:
    """Right-hand side (dz/dt, dp/dt) of Hamilton's equations."""
    cosh2z, sinh2z = cosh_sinh_2z(state.z)
    bracket = params.zeta * cosh2z - 1j * params.m_int
    return 2.0 * state.p, 4.0 * params.zeta * sinh2z * bracket


# Dormand-Prince 5(4) tableau (FSAL: the 7th stage is the next step's first).
_A21 = 1 / 5
_A31, _A32 = 3 / 40, 9 / 40
_A41, _A42, _A43 = 44 / 45, -56 / 15, 32 / 9
_A51, _A52, _A53, _A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
_A61, _A62, _A63, _A64, _A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
_B1, _B3, _B4, _B5, _B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
_E1, _E3, _E4, _E5, _E6, _E7 = (
    71 / 57600,
    -71 / 16695,
    71 / 1920,
    -17253 / 339200,
    22 / 525,
    -1 / 40,
)

_EPS = 2.220446049250313e-16
_SAFETY = 0.9
_BETA = 0.04
_EXPO1 = 0.2 - 0.75 * _BETA
# fraction of (abs_tol + rel_tol |E|) a single step may kick the energy by;
# the margin absorbs random-walk accumulation over ~1e5-step horizons
_ENERGY_SAFETY = 0.25


class _Buf:
    """Geometrically grown columnar sample storage."""

    def __init__(self) -> None:
        self.cap = 1 << 12
        self.n = 0
        self.t = np.empty(self.cap)
        self.z = np.empty(self.cap, dtype=complex)
        self.p = np.empty(self.cap, dtype=complex)
        self.d = np.empty(self.cap)

    def push(self, t: float, z: complex, p: complex, d: float) -> None:
        if self.n == self.cap:
            self.cap *= 2
            for name in ("t", "z", "p", "d"):
                arr = getattr(self, name)
                grown = np.empty(self.cap, dtype=arr.dtype)
                grown[: self.n] = arr
                setattr(self, name, grown)
        i = self.n
        self.t[i] = t
        self.z[i] = z
        self.p[i] = p
        self.d[i] = d
        self.n = i + 1


def integrate(
    z0: complex,
    p0: complex,
    config: IntegratorConfig,
    params: SystemParams,
) -> Trajectory:
    """Integrate from (z0, p0) until t_max, escape, step budget, or drift."""
    try:
        e0 = hamiltonian(z0, p0, params)
    except OverflowError as exc:
        raise DomainError(f"initial state overflows the potential: z0={z0!r}") from exc
    if not (math.isfinite(e0.real) and math.isfinite(e0.imag)):
        raise DomainError(f"initial energy is not finite: {e0!r}")

    zeta = params.zeta
    i_m = 1j * params.m_int
    cosh = math.cosh
    sinh = math.sinh
    cos = math.cos
    sin = math.sin

    def rhs(z: complex, p: complex) -> tuple[complex, complex, complex]:
        # returns (dz/dt, dp/dt, bracket) with V = -bracket^2
        x2 = 2.0 * z.real
        y2 = 2.0 * z.imag
        try:
            chx = cosh(x2)
            shx = sinh(x2)
        except OverflowError as exc:
            raise NonFiniteStateError(f"state overflow at z={z!r}") from exc
        cy = cos(y2)
        sy = sin(y2)
        bracket = zeta * complex(chx * cy, shx * sy) - i_m
        return 2.0 * p, 4.0 * zeta * complex(shx * cy, chx * sy) * bracket, bracket

    e_scale = max(1.0, abs(e0))
    # per-step energy-error budget used by the error norm
    budget = _ENERGY_SAFETY * (config.abs_tol + config.rel_tol * e_scale)
    rtol = config.rel_tol
    atol = config.abs_tol
    drift_limit = config.energy_drift_limit
    escape_radius = config.escape_radius
    escape_y_span = config.escape_y_span
    y0 = z0.imag
    t_max = config.t_max
    max_steps = config.max_steps

    buf = _Buf()
    t, z, p = 0.0, complex(z0), complex(p0)
    buf.push(t, z, p, 0.0)

    k1z, k1p, _ = rhs(z, p)
    h = min(config.dt_init, t_max)
    facold = 1e-4
    n_acc = 0
    n_rej = 0
    rejected_last = False
    termination = Termination.TIME_LIMIT

    while True:
        if n_acc + n_rej >= max_steps:
            termination = Termination.STEP_LIMIT
            break
        last_step = t + h >= t_max
        if last_step:
            h = t_max - t

        k2z, k2p, _ = rhs(z + h * (_A21 * k1z), p + h * (_A21 * k1p))
        k3z, k3p, _ = rhs(z + h * (_A31 * k1z + _A32 * k2z), p + h * (_A31 * k1p + _A32 * k2p))
        k4z, k4p, _ = rhs(
            z + h * (_A41 * k1z + _A42 * k2z + _A43 * k3z),
            p + h * (_A41 * k1p + _A42 * k2p + _A43 * k3p),
        )
        k5z, k5p, _ = rhs(
            z + h * (_A51 * k1z + _A52 * k2z + _A53 * k3z + _A54 * k4z),
            p + h * (_A51 * k1p + _A52 * k2p + _A53 * k3p + _A54 * k4p),
        )
        k6z, k6p, _ = rhs(
            z + h * (_A61 * k1z + _A62 * k2z + _A63 * k3z + _A64 * k4z + _A65 * k5z),
            p + h * (_A61 * k1p + _A62 * k2p + _A63 * k3p + _A64 * k4p + _A65 * k5p),
        )
        zn = z + h * (_B1 * k1z + _B3 * k3z + _B4 * k4z + _B5 * k5z + _B6 * k6z)
        pn = p + h * (_B1 * k1p + _B3 * k3p + _B4 * k4p + _B5 * k5p + _B6 * k6p)
        if not (
            math.isfinite(zn.real) and math.isfinite(zn.imag)
            and math.isfinite(pn.real) and math.isfinite(pn.imag)
        ):
            raise NonFiniteStateError(f"non-finite state at t={t!r}: z={zn!r}, p={pn!r}")
        k7z, k7p, bracket = rhs(zn, pn)

        err_z = h * (_E1 * k1z + _E3 * k3z + _E4 * k4z + _E5 * k5z + _E6 * k6z + _E7 * k7z)
        err_p = h * (_E1 * k1p + _E3 * k3p + _E4 * k4p + _E5 * k5p + _E6 * k6p + _E7 * k7p)

        az = max(abs(z), abs(zn))
        ap = max(abs(p), abs(pn))
        # |dV/dz| and 2|p| convert state error into energy error; cap the
        # scales so one step cannot kick H by much more than `budget`, but
        # never push them below the representation floor of the state.
        grad_mag = abs(k1p)
        sz = min(atol + rtol * az, budget / max(1.0, grad_mag))
        sp = min(atol + rtol * ap, budget / max(1.0, 2.0 * ap))
        sz = max(sz, 4.0 * _EPS * az)
        sp = max(sp, 4.0 * _EPS * ap)
        err = math.sqrt(0.5 * ((abs(err_z) / sz) ** 2 + (abs(err_p) / sp) ** 2))

        if err <= 1.0:
            t = t_max if last_step else t + h
            z, p = zn, pn
            k1z, k1p = k7z, k7p
            n_acc += 1

            hh = p * p - bracket * bracket
            drift = abs(hh - e0) / e_scale
            if abs(zn.real) > escape_radius or abs(zn.imag - y0) > escape_y_span:
                if drift <= drift_limit:
                    buf.push(t, z, p, drift)
                termination = Termination.ESCAPED
                break
            if drift > drift_limit:
                termination = Termination.DRIFT_EXCEEDED
                break
            buf.push(t, z, p, drift)
            if last_step:
                termination = Termination.TIME_LIMIT
                break

            if err == 0.0:
                fac = 10.0
            else:
                fac = _SAFETY * err ** (-_EXPO1) * facold**_BETA
                fac = min(10.0, max(0.2, fac))
            if rejected_last:
                fac = min(1.0, fac)
            h *= fac
            facold = max(err, 1e-4)
            rejected_last = False
        else:
            n_rej += 1
            h *= max(0.2, _SAFETY * err**-0.2)
            rejected_last = True
            if h < 1e-14 * max(1.0, abs(t)):
                raise NonFiniteStateError(f"step size underflow at t={t!r} (h={h!r})")

    return Trajectory(
        params=params,
        energy=e0,
        t=buf.t[: buf.n].copy(),
        z=buf.z[: buf.n].copy(),
        p=buf.p[: buf.n].copy(),
        drift=buf.d[: buf.n].copy(),
        termination=termination,
        n_accepted=n_acc,
        n_rejected=n_rej,
        config=config,
    )
