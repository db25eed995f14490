"""Orbit classification, axis-crossing detection, and dwell statistics.

Conventions: the imaginary axis (Re z = 0) separates the left and right
well columns.  A "crossing" is a sign change of Re z; the dwell between
two consecutive crossings is attributed to the side the particle entered.
The tunneling time is the mean of the two per-side dwell means.
"""

from __future__ import annotations

import enum
import math
from collections import Counter
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .dynamics import SystemParams
from .errors import (
    AmbiguousOrbitError,
    BracketingError,
    ClassificationMismatchError,
    DegenerateWindingError,
    DomainError,
    InsufficientCrossingsError,
)
from .integrator import (
    IntegratorConfig,
    MomentumBranch,
    PhaseState,
    Termination,
    Trajectory,
    initial_momentum,
    integrate,
)
from .wells import Side, WellIndex, nearest_well, well_center, well_x

__all__ = [
    "CrossingDirection",
    "CrossingEvent",
    "DwellSegment",
    "TunnelingStats",
    "OrbitKind",
    "OrbitClass",
    "Chirality",
    "BoundaryResult",
    "detect_axis_crossings",
    "dwell_segments",
    "measure_tunneling",
    "tunnel_well_pair",
    "classify_orbit",
    "closed_orbit_boundary",
    "spiral_chirality",
    "spiral_windows",
    "self_intersections",
]

CROSSING_REFINE_TOL = 1e-9
DEFAULT_RECURRENCE_TOL = 1e-4


class CrossingDirection(enum.Enum):
    LEFT_TO_RIGHT = "left_to_right"
    RIGHT_TO_LEFT = "right_to_left"


@dataclass(frozen=True)
class CrossingEvent:
    """One transit of the imaginary axis."""

    t_cross: float
    y_at_cross: float
    direction: CrossingDirection
    index: int  # sample index of the segment start containing the crossing


@dataclass(frozen=True)
class DwellSegment:
    """A full stay on one side, between consecutive crossings."""

    side: Side
    t_start: float
    t_end: float
    i_first: int  # first sample index strictly after the entering crossing
    i_last: int  # last sample index before the leaving crossing

    @property
    def duration(self) -> float:
        return self.t_end - self.t_start


@dataclass(frozen=True)
class TunnelingStats:
    dwell_left_mean: float
    dwell_right_mean: float
    n_cycles: int

    @property
    def tunneling_time(self) -> float:
        return 0.5 * (self.dwell_left_mean + self.dwell_right_mean)


class OrbitKind(enum.Enum):
    CLOSED = "closed"
    OPEN_ESCAPE = "open_escape"
    TUNNELING = "tunneling"


@dataclass(frozen=True)
class OrbitClass:
    kind: OrbitKind
    period: float | None = None
    anchor: WellIndex | None = None
    escape_side: Side | None = None
    wells: tuple[WellIndex, WellIndex] | None = None  # (left, right)


class Chirality(enum.Enum):
    CLOCKWISE = "clockwise"
    ANTICLOCKWISE = "anticlockwise"


def _interp_at(traj: Trajectory, i: int, j: int, t: float) -> tuple[complex, complex]:
    """Linear interpolation of (z, p) on the sample bracket [i, j]."""
    ta, tb = traj.t[i], traj.t[j]
    frac = 0.0 if tb == ta else (t - ta) / (tb - ta)
    z = traj.z[i] + frac * (traj.z[j] - traj.z[i])
    p = traj.p[i] + frac * (traj.p[j] - traj.p[i])
    return complex(z), complex(p)


def detect_axis_crossings(traj: Trajectory) -> list[CrossingEvent]:
    """All sign changes of Re z, refined on the linear interpolant.

    Crossing times are bisected to |Re z| <= 1e-9 on the interpolant; the
    direction comes from the sign of Re(dz/dt) = 2 Re p at the crossing.
    Samples landing exactly on the axis are bridged by the surrounding
    nonzero-sign samples.
    """
    if len(traj) == 0:
        raise DomainError("empty trajectory")
    x = traj.z.real
    nz = np.nonzero(x != 0.0)[0]
    if len(nz) < 2:
        return []
    s = np.sign(x[nz])
    flips = np.nonzero(s[:-1] != s[1:])[0]

    events: list[CrossingEvent] = []
    for f in flips:
        i, j = int(nz[f]), int(nz[f + 1])
        ti, tj = float(traj.t[i]), float(traj.t[j])
        xi, xj = float(x[i]), float(x[j])
        slope = 0.0 if tj == ti else (xj - xi) / (tj - ti)

        def x_interp(t: float) -> float:
            return xi + slope * (t - ti)

        # bisection on the linear interpolant of Re z over the segment
        ta, tb = ti, tj
        sign_a = xi > 0
        for _ in range(80):
            tm = 0.5 * (ta + tb)
            xm = x_interp(tm)
            if abs(xm) <= CROSSING_REFINE_TOL or (tb - ta) <= 4.0 * np.finfo(float).eps * max(1.0, abs(tm)):
                break
            if (xm > 0) == sign_a:
                ta = tm
            else:
                tb = tm
        t_star = 0.5 * (ta + tb)
        z_star, p_star = _interp_at(traj, i, j, t_star)
        re_v = 2.0 * p_star.real
        if re_v != 0.0:
            direction = CrossingDirection.LEFT_TO_RIGHT if re_v > 0 else CrossingDirection.RIGHT_TO_LEFT
        else:
            direction = CrossingDirection.LEFT_TO_RIGHT if x[j] > x[i] else CrossingDirection.RIGHT_TO_LEFT
        events.append(CrossingEvent(t_star, z_star.imag, direction, i))
    return events


def dwell_segments(
    traj: Trajectory,
    crossings: Sequence[CrossingEvent] | None = None,
    commit_frac: float = 0.5,
) -> list[DwellSegment]:
    """Full dwell segments between consecutive committed crossings.

    A crossing opens a dwell only if the orbit then reaches at least
    ``commit_frac`` of the well-column |x| before crossing back: transits
    occasionally graze the imaginary axis (sign wiggles lasting ~0.1 time
    units at |Re z| ~ 0.1), and without the hysteresis those grazes would
    enter the dwell statistics as spurious sub-unit dwells.  The partial
    stretches before the first and after the last committed crossing are
    not segments.
    """
    if crossings is None:
        crossings = detect_axis_crossings(traj)
    if len(crossings) < 2:
        return []
    x_commit = commit_frac * well_x(traj.params)
    abs_x = np.abs(traj.z.real)
    n_last = len(traj) - 1

    kept: list[CrossingEvent] = []
    last_side: Side | None = None
    for i, ev in enumerate(crossings):
        side = Side.RIGHT if ev.direction is CrossingDirection.LEFT_TO_RIGHT else Side.LEFT
        i0 = ev.index + 1
        i1 = crossings[i + 1].index if i + 1 < len(crossings) else n_last
        peak = float(abs_x[i0 : i1 + 1].max()) if i1 >= i0 else 0.0
        if side is not last_side and peak >= x_commit:
            kept.append(ev)
            last_side = side

    segs: list[DwellSegment] = []
    for a, b in zip(kept[:-1], kept[1:]):
        side = Side.RIGHT if a.direction is CrossingDirection.LEFT_TO_RIGHT else Side.LEFT
        segs.append(
            DwellSegment(
                side=side,
                t_start=a.t_cross,
                t_end=b.t_cross,
                i_first=a.index + 1,
                i_last=b.index,
            )
        )
    return segs


def measure_tunneling(traj: Trajectory, crossings: Sequence[CrossingEvent] | None = None) -> TunnelingStats:
    """Per-side mean dwell times and their average, the tunneling time."""
    if crossings is None:
        crossings = detect_axis_crossings(traj)
    if len(crossings) < 3:
        raise InsufficientCrossingsError(
            f"need >= 3 axis crossings for dwell statistics, got {len(crossings)}"
        )
    segs = dwell_segments(traj, crossings)
    left = [s.duration for s in segs if s.side is Side.LEFT]
    right = [s.duration for s in segs if s.side is Side.RIGHT]
    if not left or not right:
        raise InsufficientCrossingsError("dwell segments missing on one side")
    return TunnelingStats(
        dwell_left_mean=sum(left) / len(left),
        dwell_right_mean=sum(right) / len(right),
        n_cycles=min(len(left), len(right)),
    )


VOTE_CYCLES = 1
ANCHOR_RADIUS = 0.35


def anchor_episodes(traj: Trajectory, radius: float = ANCHOR_RADIUS) -> list[tuple[WellIndex, int, float]]:
    """Maximal sample runs spent within ``radius`` of some well center.

    Returns (well, sample index of closest approach, closest distance) per
    episode, consecutive same-well episodes merged.  Spirals pass within
    ~0.1 of the well they orbit while transits between well columns stay
    at least a well-x away from every center, so the episode sequence
    reads off which wells the orbit actually visits, robustly even when
    spiral loops wrap across the imaginary axis.
    """
    x = traj.z.real
    y = traj.z.imag
    xw = well_x(traj.params)
    n_r = np.round(y / math.pi - 0.25)
    n_l = np.round(y / math.pi + 0.25)
    d_r = np.hypot(x - xw, y - (n_r + 0.25) * math.pi)
    d_l = np.hypot(x + xw, y - (n_l - 0.25) * math.pi)
    right_closer = d_r <= d_l
    d = np.where(right_closer, d_r, d_l)

    episodes: list[tuple[WellIndex, int, float]] = []
    inside = d < radius
    i = 0
    n_tot = len(d)
    while i < n_tot:
        if not inside[i]:
            i += 1
            continue
        j = i
        while j + 1 < n_tot and inside[j + 1]:
            j += 1
        k = i + int(np.argmin(d[i : j + 1]))
        side = Side.RIGHT if right_closer[k] else Side.LEFT
        n = int(n_r[k]) if right_closer[k] else int(n_l[k])
        well = WellIndex(side, n)
        if episodes and episodes[-1][0] == well:
            if d[k] < episodes[-1][2]:
                episodes[-1] = (well, k, float(d[k]))
        else:
            episodes.append((well, k, float(d[k])))
        i = j + 1
    return episodes


def _vote_wells(traj: Trajectory) -> tuple[WellIndex, WellIndex]:
    """Majority well per side over the first VOTE_CYCLES visit episodes.

    The first visits identify the pair the orbit initially oscillates
    between; over long runs the anchors migrate to neighboring lattice
    cells, which the windowed vote deliberately ignores.
    """
    votes: dict[Side, Counter] = {Side.LEFT: Counter(), Side.RIGHT: Counter()}
    for well, _, _ in anchor_episodes(traj):
        if sum(votes[well.side].values()) < VOTE_CYCLES:
            votes[well.side][well] += 1

    def winner(side: Side) -> WellIndex:
        counter = votes[side]
        if not counter:
            raise InsufficientCrossingsError(f"the orbit never settles at a {side.value}-side well")
        return min(counter, key=lambda w: (-counter[w], abs(w.n), w.side is Side.LEFT))

    return winner(Side.LEFT), winner(Side.RIGHT)


def tunnel_well_pair(traj: Trajectory) -> tuple[WellIndex, WellIndex]:
    """The (left, right) wells a tunneling orbit oscillates between.

    Wells are identified by the orbit's closest-approach episodes (the
    spiral cores pass within ~0.1 of their center), voting over the first
    visits per side.  The deepest |Re z| sample of a dwell is deliberately
    not used as the witness: it sits on the outward excursion, whose y can
    be a full lattice cell away from the orbited well.
    """
    crossings = detect_axis_crossings(traj)
    if len(crossings) < 3 or traj.termination is Termination.ESCAPED:
        raise ClassificationMismatchError(
            "well-pair extraction requires a tunneling orbit "
            f"(crossings={len(crossings)}, termination={traj.termination.value})"
        )
    return _vote_wells(traj)


def _recurrence(traj: Trajectory, recur_tol: float) -> float | None:
    """First return time to within recur_tol of the initial phase point.

    Distances are Euclidean over (z, p) as a 4-real-vector; the minimum is
    taken over the linear interpolant of each sample segment, so closed
    orbits register even when no sample lands near the start.  Returns the
    period, 0.0 for a trajectory that never leaves the tolerance ball, or
    None when there is no recurrence.
    """
    dz = traj.z - traj.z[0]
    dp = traj.p - traj.p[0]
    d = np.sqrt(np.abs(dz) ** 2 + np.abs(dp) ** 2)
    leave = max(100.0 * recur_tol, 1e-3)
    outside = np.nonzero(d > leave)[0]
    if len(outside) == 0:
        return 0.0
    i0 = int(outside[0])
    if i0 + 1 >= len(traj):
        return None

    # closest approach of each segment [k, k+1] (k >= i0) to the start point
    ax, bx = dz[i0:-1], dz[i0 + 1 :]
    ap, bp = dp[i0:-1], dp[i0 + 1 :]
    ux, up = bx - ax, bp - ap
    uu = np.abs(ux) ** 2 + np.abs(up) ** 2
    au = (ax.real * ux.real + ax.imag * ux.imag) + (ap.real * up.real + ap.imag * up.imag)
    with np.errstate(invalid="ignore", divide="ignore"):
        s = np.clip(np.where(uu > 0, -au / uu, 0.0), 0.0, 1.0)
    cx = ax + s * ux
    cp = ap + s * up
    dmin = np.sqrt(np.abs(cx) ** 2 + np.abs(cp) ** 2)
    hits = np.nonzero(dmin <= recur_tol)[0]
    if len(hits) == 0:
        return None
    k = int(hits[0])
    t0, t1 = traj.t[i0 + k], traj.t[i0 + k + 1]
    return float(t0 + s[k] * (t1 - t0))


def classify_orbit(traj: Trajectory, recur_tol: float = DEFAULT_RECURRENCE_TOL) -> OrbitClass:
    """Closed, open-escape, or tunneling; anything else raises.

    Closed: the phase point returns within recur_tol of its start (in the
    combined (z, p) Euclidean norm) with no axis crossing.  Open escape:
    the run ended at the escape radius with at most one crossing.
    Tunneling: at least three alternating crossings on a run that was not
    an escape; drift- or step-terminated runs classify on their retained
    (certified) samples.
    """
    crossings = detect_axis_crossings(traj)
    if not crossings:
        period = _recurrence(traj, recur_tol)
        if period is not None and traj.termination is not Termination.ESCAPED:
            anchor, _ = nearest_well(complex(np.mean(traj.z)), traj.params)
            return OrbitClass(kind=OrbitKind.CLOSED, period=period, anchor=anchor)
    if traj.termination is Termination.ESCAPED and len(crossings) <= 1:
        side = Side.RIGHT if traj.z[-1].real > 0 else Side.LEFT
        return OrbitClass(kind=OrbitKind.OPEN_ESCAPE, escape_side=side)
    if len(crossings) >= 3 and traj.termination is not Termination.ESCAPED:
        left, right = _vote_wells(traj)
        return OrbitClass(kind=OrbitKind.TUNNELING, wells=(left, right))
    raise AmbiguousOrbitError(
        f"no orbit class fits: termination={traj.termination.value}, "
        f"crossings={len(crossings)}, t_end={traj.t[-1]:.6g}"
    )


@dataclass(frozen=True)
class BoundaryResult:
    """Critical start offset separating closed orbits from escape."""

    offset: float
    closed_offset: float
    open_offset: float
    n_probes: int
    max_probe_drift: float


def closed_orbit_boundary(
    idx: WellIndex,
    energy_real: float,
    params: SystemParams,
    cfg: IntegratorConfig | None = None,
    direction: int = 1,
    bracket: tuple[float, float] = (0.30, 0.80),
    width_tol: float = 1e-4,
) -> BoundaryResult:
    """Bisect the critical y-offset from a well center at real energy.

    The start point keeps Re z at the well's x; only the imaginary offset
    (signed by ``direction``) varies.  The lower bracket offset must give a
    closed orbit and the upper an escape, otherwise a BracketingError
    reports both classifications.

    Probe orbits discriminate closed from open by boundedness: open orbits
    march down the well column (|Im z| grows without bound at nearly fixed
    Re z), while closed ones stay within a cell of their start for the
    whole horizon.  Near the critical offset both kinds plunge deep into
    the steep outer region before deciding, which leaves the energy check
    at its conditioning floor there; the probe guard is therefore loose,
    and the plunge noise limits the trustworthy bisection width to ~1e-5,
    well inside the default width tolerance.
    """
    if direction not in (-1, 1):
        raise DomainError(f"direction must be +1 or -1, got {direction!r}")
    if cfg is None:
        cfg = IntegratorConfig(
            t_max=15.0,
            escape_radius=25.0,
            escape_y_span=2.0 * math.pi,
            energy_drift_limit=0.05,
        )
    center = well_center(idx, params)
    n_probes = 0
    max_drift = 0.0

    def probe(offset: float) -> OrbitKind:
        nonlocal n_probes, max_drift
        z0 = complex(center.real, center.imag + direction * offset)
        p0 = initial_momentum(z0, complex(energy_real), MomentumBranch.PRINCIPAL, params)
        local = cfg
        for _ in range(4):
            n_probes += 1
            traj = integrate(z0, p0, local, params)
            max_drift = max(max_drift, traj.max_drift)
            if traj.termination is Termination.ESCAPED:
                return OrbitKind.OPEN_ESCAPE
            if traj.termination is Termination.TIME_LIMIT:
                return OrbitKind.CLOSED
            # drift or step budget: retry with a looser guard and budget
            local = replace(
                local,
                energy_drift_limit=min(1.0, 10.0 * local.energy_drift_limit),
                max_steps=2 * local.max_steps,
            )
        raise AmbiguousOrbitError(
            f"probe at offset {offset!r} kept ending by {traj.termination.value}"
        )

    lo, hi = bracket
    k_lo, k_hi = probe(lo), probe(hi)
    if not (k_lo is OrbitKind.CLOSED and k_hi is OrbitKind.OPEN_ESCAPE):
        raise BracketingError(
            f"bracket does not straddle the boundary: offset {lo!r} -> {k_lo.value}, "
            f"offset {hi!r} -> {k_hi.value}"
        )
    while hi - lo > width_tol:
        mid = 0.5 * (lo + hi)
        kind = probe(mid)
        if kind is OrbitKind.CLOSED:
            lo = mid
        elif kind is OrbitKind.OPEN_ESCAPE:
            hi = mid
        else:
            raise AmbiguousOrbitError(f"mid-bracket probe at offset {mid!r} classified {kind.value}")
    return BoundaryResult(
        offset=0.5 * (lo + hi),
        closed_offset=lo,
        open_offset=hi,
        n_probes=n_probes,
        max_probe_drift=max_drift,
    )


def spiral_chirality(segment: Sequence[PhaseState], center: complex) -> Chirality:
    """Sense of rotation of a spiral segment about a well center.

    The accumulated winding angle of z - center decides: negative is
    clockwise, positive anticlockwise.  Zero net winding has no chirality
    and raises.
    """
    if len(segment) < 10:
        raise DomainError(f"need >= 10 samples, got {len(segment)}")
    rel = np.array([s.z - center for s in segment], dtype=complex)
    if np.any(np.abs(rel) > math.pi / 4):
        raise DomainError("all samples must lie within pi/4 of the center")
    if np.any(rel == 0):
        raise DomainError("segment passes exactly through the center")
    winding = float(np.sum(np.angle(rel[1:] / rel[:-1])))
    if abs(winding) <= 1e-9:
        raise DegenerateWindingError(f"zero net winding ({winding!r})")
    return Chirality.CLOCKWISE if winding < 0 else Chirality.ANTICLOCKWISE


def spiral_windows(
    traj: Trajectory,
    seg: DwellSegment,
    center: complex,
    radius: float = math.pi / 4,
) -> tuple[list[PhaseState], list[PhaseState]]:
    """Inward and outward spiral sample windows of one dwell.

    Both windows are contiguous sample runs inside ``radius`` of the well
    center, split at the closest approach: the inward window ends there,
    the outward one starts there.
    """
    if seg.i_last < seg.i_first:
        raise DomainError("dwell segment holds no samples")
    zseg = traj.z[seg.i_first : seg.i_last + 1]
    r = np.abs(zseg - center)
    k_min = int(np.argmin(r))
    lo = k_min
    while lo > 0 and r[lo - 1] <= radius:
        lo -= 1
    hi = k_min
    while hi + 1 < len(r) and r[hi + 1] <= radius:
        hi += 1
    inward = [traj.state(seg.i_first + i) for i in range(lo, k_min + 1)]
    outward = [traj.state(seg.i_first + i) for i in range(k_min, hi + 1)]
    return inward, outward


def _proper_crossings(pts: np.ndarray, pairs_i: np.ndarray, pairs_j: np.ndarray) -> int:
    """Count transversal interior intersections among the listed segment pairs."""
    a = pts[pairs_i]
    b = pts[pairs_i + 1]
    c = pts[pairs_j]
    d = pts[pairs_j + 1]

    def orient(p, q, r):
        return (q[:, 0] - p[:, 0]) * (r[:, 1] - p[:, 1]) - (q[:, 1] - p[:, 1]) * (r[:, 0] - p[:, 0])

    d1 = orient(c, d, a)
    d2 = orient(c, d, b)
    d3 = orient(a, b, c)
    d4 = orient(a, b, d)
    return int(np.count_nonzero((d1 * d2 < 0) & (d3 * d4 < 0)))


def self_intersections(traj: Trajectory) -> int:
    """Number of transversal self-crossings of the trajectory polyline.

    Segments are binned into a uniform grid (cell = twice the mean segment
    length) so only nearby pairs are tested; adjacent segments are skipped.
    Endpoint touches and collinear overlaps do not count.
    """
    if len(traj) < 4:
        raise DomainError(f"need >= 4 samples, got {len(traj)}")
    pts = np.column_stack([traj.z.real, traj.z.imag])
    n_seg = len(pts) - 1
    seg_len = np.hypot(*(pts[1:] - pts[:-1]).T)
    cell = max(2.0 * float(seg_len.mean()), 1e-12)

    lo = np.floor(np.minimum(pts[:-1], pts[1:]) / cell).astype(np.int64)
    hi = np.floor(np.maximum(pts[:-1], pts[1:]) / cell).astype(np.int64)

    grid: dict[tuple[int, int], list[int]] = {}
    for i in range(n_seg):
        for cx in range(lo[i, 0], hi[i, 0] + 1):
            for cy in range(lo[i, 1], hi[i, 1] + 1):
                grid.setdefault((cx, cy), []).append(i)

    keys: set[int] = set()
    for members in grid.values():
        m = len(members)
        if m < 2:
            continue
        for ai in range(m - 1):
            i = members[ai]
            for bi in range(ai + 1, m):
                j = members[bi]
                if j - i > 1:
                    keys.add(i * n_seg + j)
                elif i - j > 1:
                    keys.add(j * n_seg + i)
    if not keys:
        return 0
    karr = np.fromiter(keys, dtype=np.int64, count=len(keys))
    return _proper_crossings(pts, karr // n_seg, karr % n_seg)
