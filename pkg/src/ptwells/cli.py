"""Command-line drivers: single runs, dwell-time sweeps, boundary search.

Subcommands: ``simulate``, ``sweep-e2``, ``threshold``, ``wells``,
``spectrum``.  Complex numbers on the command line use the literal form
``a+bi`` with decimal reals (e.g. ``1+1i``, ``0.8``, ``-2.5i``).  A JSON
config file (``--config``) may supply any flag value; explicit flags win.

Exit codes: 0 success, 1 usage or config error, 2 numerical failure,
3 ambiguous classification.

Numeric output uses shortest round-trip decimal formatting, so identical
configs produce byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

from .analysis import (
    OrbitClass,
    OrbitKind,
    classify_orbit,
    closed_orbit_boundary,
    detect_axis_crossings,
    measure_tunneling,
)
from .dynamics import SystemParams
from .errors import (
    AmbiguousOrbitError,
    BracketingError,
    DomainError,
    InsufficientCrossingsError,
    NonFiniteStateError,
    PtwellsError,
    UnsupportedOrderError,
)
from .integrator import (
    IntegratorConfig,
    MomentumBranch,
    Termination,
    Trajectory,
    initial_momentum,
    integrate,
)
from .spectrum import pt_phase, qes_levels
from .wells import Side, WellIndex, well_center

__all__ = ["main", "RunConfig", "parse_complex", "cmd_simulate", "cmd_sweep_e2", "cmd_threshold"]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2
EXIT_AMBIGUOUS = 3

# Expected dwell-average scale: tau ~ TAU_SCALE / E2 (the observed product
# E2 * tau stays near 16); tunneling horizons default to 40 expected taus.
TAU_SCALE = 16.0
TMAX_FLOOR = 200.0

# Tunneling orbits whip through regions steep enough that the energy check
# saturates at the double-precision representation floor (~1e-5 relative
# for the deepest whips); the relaxed guard still catches real blow-ups.
TUNNELING_DRIFT_LIMIT = 1e-3
TUNNELING_ESCAPE_RADIUS = 12.0

def parse_complex(text: str) -> complex:
    """Parse ``a+bi`` literals: '1+1i', '0.8', '-2.5i', '3.2e-1-0.4i'."""
    s = text.strip().replace(" ", "")
    if not s:
        raise DomainError("empty complex literal")
    if s.endswith(("i", "I")):
        body = s[:-1]
        # split into real part and trailing signed imaginary coefficient
        m = re.match(
            r"^(?P<re>[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?(?P<im>[+-]?(?:\d+\.?\d*|\.\d+)?(?:[eE][+-]?\d+)?)$",
            body,
        )
        if m is None or (m.group("re") is None and m.group("im") is None):
            raise DomainError(f"bad complex literal {text!r}")
        re_part = m.group("re")
        im_part = m.group("im")
        if im_part is None or im_part == "":
            # the whole body was the imaginary coefficient
            re_part, im_part = None, re_part
        if im_part in ("+", "-"):
            im_part += "1"
        return complex(float(re_part) if re_part else 0.0, float(im_part) if im_part else 1.0)
    try:
        return complex(float(s))
    except ValueError as exc:
        raise DomainError(f"bad complex literal {text!r}") from exc


def fmt(x: float) -> str:
    """Shortest round-trip decimal representation."""
    return repr(float(x))


@dataclass(frozen=True)
class RunConfig:
    params: SystemParams
    energy: complex
    start: str  # 'origin', 'well:<side>,<n>', or 'point:<re>,<im>'
    branch: MomentumBranch
    integrator: IntegratorConfig
    trajectory_path: str | None = None
    events_path: str | None = None
    summary_path: str | None = None

    def start_point(self) -> complex:
        return _resolve_start(self.start, self.params)


def _resolve_start(spec: str, params: SystemParams) -> complex:
    s = spec.strip().lower()
    if s == "origin":
        return 0j
    if s.startswith("well:"):
        try:
            side_s, n_s = s[5:].split(",")
            side = Side(side_s.strip())
            return well_center(WellIndex(side, int(n_s)), params)
        except (ValueError, KeyError) as exc:
            raise DomainError(f"bad start spec {spec!r} (want well:<left|right>,<n>)") from exc
    if s.startswith("point:"):
        try:
            re_s, im_s = s[6:].split(",")
            return complex(float(re_s), float(im_s))
        except ValueError as exc:
            raise DomainError(f"bad start spec {spec!r} (want point:<re>,<im>)") from exc
    raise DomainError(f"bad start spec {spec!r}")


def default_t_max(energy: complex) -> float:
    if energy.imag == 0:
        return TMAX_FLOOR
    return max(TMAX_FLOOR, 40.0 * TAU_SCALE / abs(energy.imag))


def _well_label(idx: WellIndex) -> dict:
    return {"side": idx.side.value, "n": idx.n}


def _classification_payload(oc: OrbitClass) -> dict:
    out: dict = {"kind": oc.kind.value}
    if oc.kind is OrbitKind.CLOSED:
        out["period"] = oc.period
        out["anchor"] = _well_label(oc.anchor)
    elif oc.kind is OrbitKind.OPEN_ESCAPE:
        out["escape_side"] = oc.escape_side.value
    elif oc.kind is OrbitKind.TUNNELING:
        out["wells"] = {"left": _well_label(oc.wells[0]), "right": _well_label(oc.wells[1])}
    return out


def write_trajectory_csv(traj: Trajectory, path: str) -> None:
    err1, err2 = traj.energy_component_errors()
    with open(path, "w") as fh:
        fh.write("t,re_z,im_z,re_p,im_p,e1_err,e2_err\n")
        for i in range(len(traj)):
            fh.write(
                f"{fmt(traj.t[i])},{fmt(traj.z[i].real)},{fmt(traj.z[i].imag)},"
                f"{fmt(traj.p[i].real)},{fmt(traj.p[i].imag)},{fmt(err1[i])},{fmt(err2[i])}\n"
            )


def write_events_jsonl(traj: Trajectory, oc: OrbitClass | None, path: str) -> None:
    with open(path, "w") as fh:
        for ev in detect_axis_crossings(traj):
            fh.write(
                json.dumps(
                    {"type": "crossing", "t": ev.t_cross, "y": ev.y_at_cross, "dir": ev.direction.value}
                )
                + "\n"
            )
        if oc is not None:
            fh.write(json.dumps({"type": "classification", **_classification_payload(oc)}) + "\n")


def run_simulation(config: RunConfig) -> dict:
    """Integrate, classify, and measure one run; returns the summary dict.

    Raises the underlying package error when the run cannot be analyzed.
    """
    z0 = config.start_point()
    p0 = initial_momentum(z0, config.energy, config.branch, config.params)
    traj = integrate(z0, p0, config.integrator, config.params)

    try:
        oc = classify_orbit(traj)
    except AmbiguousOrbitError:
        if traj.termination in (Termination.DRIFT_EXCEEDED, Termination.STEP_LIMIT):
            raise NonFiniteStateError(
                f"run ended by {traj.termination.value} at t={traj.t[-1]:.6g} "
                "before any orbit class emerged"
            ) from None
        raise

    summary: dict = {
        "zeta": config.params.zeta,
        "m": config.params.m_int,
        "energy": {"re": config.energy.real, "im": config.energy.imag},
        "start": config.start,
        "branch": config.branch.value,
        "classification": _classification_payload(oc),
        "tunneling": None,
        "termination": traj.termination.value,
        "max_drift": traj.max_drift,
        "t_final": float(traj.t[-1]),
        "n_samples": len(traj),
    }
    if oc.kind is OrbitKind.TUNNELING:
        stats = measure_tunneling(traj)
        summary["tunneling"] = {
            "tau": stats.tunneling_time,
            "dwell_left": stats.dwell_left_mean,
            "dwell_right": stats.dwell_right_mean,
            "n_cycles": stats.n_cycles,
        }

    if config.trajectory_path:
        write_trajectory_csv(traj, config.trajectory_path)
    if config.events_path:
        write_events_jsonl(traj, oc, config.events_path)
    if config.summary_path:
        with open(config.summary_path, "w") as fh:
            json.dump(summary, fh, indent=2)
            fh.write("\n")
    return summary


def cmd_simulate(config: RunConfig) -> int:
    try:
        summary = run_simulation(config)
    except AmbiguousOrbitError as exc:
        print(f"ambiguous classification: {exc}", file=sys.stderr)
        return EXIT_AMBIGUOUS
    except (NonFiniteStateError, InsufficientCrossingsError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except PtwellsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(json.dumps(summary))
    return EXIT_OK


def _sweep_row(args: tuple) -> dict:
    """Worker for one sweep row; never raises, reports failures in 'error'."""
    zeta, m_int, e1, e2, cfg = args
    row = {
        "e2": e2,
        "tau": None,
        "dwell_left": None,
        "dwell_right": None,
        "n_left": None,
        "n_right": None,
        "error": "",
        "max_drift": None,
        "termination": None,
    }
    try:
        config = RunConfig(
            params=SystemParams(zeta, m_int),
            energy=complex(e1, e2),
            start="origin",
            branch=MomentumBranch.PRINCIPAL,
            integrator=cfg if cfg is not None else sweep_integrator_config(e2),
        )
        summary = run_simulation(config)
        row["max_drift"] = summary["max_drift"]
        row["termination"] = summary["termination"]
        if summary["classification"]["kind"] != OrbitKind.TUNNELING.value:
            row["error"] = f"classified {summary['classification']['kind']}, not tunneling"
            return row
        row["tau"] = summary["tunneling"]["tau"]
        row["dwell_left"] = summary["tunneling"]["dwell_left"]
        row["dwell_right"] = summary["tunneling"]["dwell_right"]
        row["n_left"] = summary["classification"]["wells"]["left"]["n"]
        row["n_right"] = summary["classification"]["wells"]["right"]["n"]
    except PtwellsError as exc:
        row["error"] = str(exc)
    return row


def sweep_integrator_config(e2: float) -> IntegratorConfig:
    return IntegratorConfig(
        t_max=default_t_max(complex(0.0, e2)),
        energy_drift_limit=TUNNELING_DRIFT_LIMIT,
        escape_radius=TUNNELING_ESCAPE_RADIUS,
        max_steps=10_000_000,
    )


def cmd_sweep_e2(
    params: SystemParams,
    e1: float,
    e2_list: list[float],
    cfg: IntegratorConfig | None = None,
    out_path: str | None = None,
    workers: int | None = None,
) -> list[dict]:
    """Run one tunneling measurement per E2, concurrently, in input order."""
    if not e2_list:
        raise DomainError("empty E2 list")
    if not (all(e2 > 0 for e2 in e2_list) or all(e2 < 0 for e2 in e2_list)):
        raise DomainError("E2 values must all have the same sign")
    jobs = [(params.zeta, params.m_int, e1, e2, cfg) for e2 in e2_list]
    if workers is None:
        workers = min(len(jobs), os.cpu_count() or 1)
    if workers <= 1 or len(jobs) == 1:
        rows = [_sweep_row(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sweep_row, jobs))
    if out_path:
        write_sweep_csv(rows, out_path)
    return rows


def write_sweep_csv(rows: list[dict], path: str) -> None:
    with open(path, "w") as fh:
        fh.write("e2,tau,dwell_left,dwell_right,n_left,n_right,error\n")
        for r in rows:
            cells = [fmt(r["e2"])]
            for key in ("tau", "dwell_left", "dwell_right"):
                cells.append("" if r[key] is None else fmt(r[key]))
            for key in ("n_left", "n_right"):
                cells.append("" if r[key] is None else str(r[key]))
            cells.append(r["error"])
            fh.write(",".join(cells) + "\n")


def cmd_threshold(
    params: SystemParams,
    energy_real: float,
    idx: WellIndex,
    direction: int = 1,
    bracket: tuple[float, float] = (0.30, 0.80),
    width_tol: float = 1e-4,
    cfg: IntegratorConfig | None = None,
) -> dict:
    res = closed_orbit_boundary(
        idx, energy_real, params, cfg=cfg, direction=direction, bracket=bracket, width_tol=width_tol
    )
    return {
        "side": idx.side.value,
        "n": idx.n,
        "direction": direction,
        "critical_offset": res.offset,
        "closed_offset": res.closed_offset,
        "open_offset": res.open_offset,
        "n_probes": res.n_probes,
    }


def write_wells_csv(params: SystemParams, n_min: int, n_max: int, fh) -> None:
    fh.write("side,n,x,y\n")
    for side in (Side.RIGHT, Side.LEFT):
        for n in range(n_min, n_max + 1):
            c = well_center(WellIndex(side, n), params)
            fh.write(f"{side.value},{n},{fmt(c.real)},{fmt(c.imag)}\n")


def write_spectrum_csv(m_int: int, zeta: float, fh) -> str:
    levels = qes_levels(m_int, zeta)
    fh.write("label,re_E,im_E,is_real\n")
    for lv in levels:
        fh.write(f"{lv.label},{fmt(lv.energy.real)},{fmt(lv.energy.imag)},{str(lv.is_real).lower()}\n")
    report = pt_phase(m_int, zeta)
    zc = "none" if report.zeta_critical is None else fmt(report.zeta_critical)
    return f"phase={report.phase.value} zeta_c={zc}"


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # usage errors exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _load_file_config(path: str | None) -> dict:
    if not path:
        return {}
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise DomainError(f"cannot read config {path!r}: {exc}") from exc
    if not isinstance(data, dict):
        raise DomainError(f"config {path!r} must hold a JSON object")
    return data


def _pick(flag_value, file_config: dict, key: str, default):
    if flag_value is not None:
        return flag_value
    if key in file_config:
        return file_config[key]
    return default


def _build_integrator(args, file_config: dict, energy: complex) -> IntegratorConfig:
    tunneling = energy.imag != 0
    base = IntegratorConfig(
        t_max=default_t_max(energy),
        energy_drift_limit=TUNNELING_DRIFT_LIMIT if tunneling else 1e-8,
        escape_radius=TUNNELING_ESCAPE_RADIUS if tunneling else 8.0,
        max_steps=10_000_000,
    )
    overrides = {}
    for key in ("dt_init", "rel_tol", "abs_tol", "t_max", "max_steps", "energy_drift_limit", "escape_radius"):
        v = _pick(getattr(args, key, None), file_config, key, None)
        if v is not None:
            overrides[key] = type(getattr(base, key))(v)
    return replace(base, **overrides) if overrides else base


def _add_integrator_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--dt-init", dest="dt_init", type=float)
    p.add_argument("--rel-tol", dest="rel_tol", type=float)
    p.add_argument("--abs-tol", dest="abs_tol", type=float)
    p.add_argument("--t-max", dest="t_max", type=float)
    p.add_argument("--max-steps", dest="max_steps", type=int)
    p.add_argument("--energy-drift-limit", dest="energy_drift_limit", type=float)
    p.add_argument("--escape-radius", dest="escape_radius", type=float)


def main(argv: list[str] | None = None) -> int:
    parser = _Parser(prog="ptwells", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="integrate one run and classify its orbit")
    p_sim.add_argument("--config", help="JSON file with flag defaults")
    p_sim.add_argument("--zeta", type=float)
    p_sim.add_argument("--M", dest="m", type=int)
    p_sim.add_argument("--e", dest="energy", help="complex energy, e.g. 1+1i")
    p_sim.add_argument("--start", help="origin | well:<side>,<n> | point:<re>,<im>")
    p_sim.add_argument("--branch", choices=[b.value for b in MomentumBranch])
    p_sim.add_argument("--trajectory-out", dest="trajectory_out")
    p_sim.add_argument("--events-out", dest="events_out")
    p_sim.add_argument("--summary-out", dest="summary_out")
    _add_integrator_flags(p_sim)

    p_sweep = sub.add_parser("sweep-e2", help="tunneling time vs imaginary energy")
    p_sweep.add_argument("--config", help="JSON file with flag defaults")
    p_sweep.add_argument("--zeta", type=float)
    p_sweep.add_argument("--M", dest="m", type=int)
    p_sweep.add_argument("--e1", type=float)
    p_sweep.add_argument("--e2", dest="e2_list", help="comma-separated E2 values")
    p_sweep.add_argument("--out", help="sweep CSV path")
    p_sweep.add_argument("--workers", type=int)
    _add_integrator_flags(p_sweep)

    p_thr = sub.add_parser("threshold", help="closed-orbit boundary offset for one well")
    p_thr.add_argument("--config", help="JSON file with flag defaults")
    p_thr.add_argument("--zeta", type=float)
    p_thr.add_argument("--M", dest="m", type=int)
    p_thr.add_argument("--e", dest="energy", type=float, help="real energy")
    p_thr.add_argument("--side", choices=[s.value for s in Side])
    p_thr.add_argument("--n", type=int)
    p_thr.add_argument("--direction", type=int, choices=[1, -1])
    p_thr.add_argument("--bracket", help="lo,hi start offsets (default 0.30,0.80)")
    p_thr.add_argument("--width", type=float, help="bisection width tolerance (default 1e-4)")
    _add_integrator_flags(p_thr)

    p_wells = sub.add_parser("wells", help="well lattice table as CSV")
    p_wells.add_argument("--zeta", type=float, required=True)
    p_wells.add_argument("--M", dest="m", type=int, required=True)
    p_wells.add_argument("--n-min", dest="n_min", type=int, default=-10)
    p_wells.add_argument("--n-max", dest="n_max", type=int, default=10)
    p_wells.add_argument("--out")

    p_spec = sub.add_parser("spectrum", help="solvable levels and PT phase")
    p_spec.add_argument("--zeta", type=float, required=True)
    p_spec.add_argument("--M", dest="m", type=int, required=True)
    p_spec.add_argument("--out")

    args = parser.parse_args(argv)

    try:
        return _dispatch(args)
    except (DomainError, UnsupportedOrderError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BracketingError as exc:
        print(f"bracket failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except AmbiguousOrbitError as exc:
        print(f"ambiguous classification: {exc}", file=sys.stderr)
        return EXIT_AMBIGUOUS
    except NonFiniteStateError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


def _dispatch(args) -> int:
    if args.command == "simulate":
        file_config = _load_file_config(args.config)
        zeta = _pick(args.zeta, file_config, "zeta", None)
        m = _pick(args.m, file_config, "m", None)
        e_raw = _pick(args.energy, file_config, "e", None)
        if zeta is None or m is None or e_raw is None:
            raise DomainError("simulate needs --zeta, --M and --e (flags or config file)")
        energy = parse_complex(str(e_raw))
        params = SystemParams(float(zeta), int(m))
        config = RunConfig(
            params=params,
            energy=energy,
            start=str(_pick(args.start, file_config, "start", "origin")),
            branch=MomentumBranch(_pick(args.branch, file_config, "branch", "principal")),
            integrator=_build_integrator(args, file_config, energy),
            trajectory_path=_pick(args.trajectory_out, file_config, "trajectory_out", None),
            events_path=_pick(args.events_out, file_config, "events_out", None),
            summary_path=_pick(args.summary_out, file_config, "summary_out", None),
        )
        return cmd_simulate(config)

    if args.command == "sweep-e2":
        file_config = _load_file_config(args.config)
        zeta = _pick(args.zeta, file_config, "zeta", None)
        m = _pick(args.m, file_config, "m", None)
        e1 = _pick(args.e1, file_config, "e1", 1.0)
        e2_raw = _pick(args.e2_list, file_config, "e2", None)
        if zeta is None or m is None or e2_raw is None:
            raise DomainError("sweep-e2 needs --zeta, --M and --e2 (flags or config file)")
        if isinstance(e2_raw, str):
            e2_list = [float(s) for s in e2_raw.split(",") if s.strip()]
        else:
            e2_list = [float(v) for v in e2_raw]
        params = SystemParams(float(zeta), int(m))
        cfg = None
        if any(getattr(args, k, None) is not None for k in ("dt_init", "rel_tol", "abs_tol", "t_max", "max_steps", "energy_drift_limit", "escape_radius")):
            cfg = _build_integrator(args, file_config, complex(float(e1), e2_list[0]))
        rows = cmd_sweep_e2(params, float(e1), e2_list, cfg=cfg, out_path=_pick(args.out, file_config, "out", None), workers=args.workers)
        failed = [r for r in rows if r["error"]]
        for r in rows:
            tau = "" if r["tau"] is None else f"{r['tau']:.6g}"
            print(f"e2={r['e2']:g} tau={tau} {r['error']}".rstrip())
        return EXIT_NUMERICAL if len(failed) == len(rows) else EXIT_OK

    if args.command == "threshold":
        file_config = _load_file_config(args.config)
        zeta = _pick(args.zeta, file_config, "zeta", None)
        m = _pick(args.m, file_config, "m", None)
        e_v = _pick(args.energy, file_config, "e", None)
        side = _pick(args.side, file_config, "side", "left")
        n = _pick(args.n, file_config, "n", 0)
        if zeta is None or m is None or e_v is None:
            raise DomainError("threshold needs --zeta, --M and --e (flags or config file)")
        bracket_raw = _pick(args.bracket, file_config, "bracket", "0.30,0.80")
        lo_s, hi_s = str(bracket_raw).split(",")
        cfg = None
        if any(getattr(args, k, None) is not None for k in ("dt_init", "rel_tol", "abs_tol", "t_max", "max_steps", "energy_drift_limit", "escape_radius")):
            cfg = _build_integrator(args, file_config, complex(float(e_v)))
        result = cmd_threshold(
            SystemParams(float(zeta), int(m)),
            float(e_v),
            WellIndex(Side(side), int(n)),
            direction=int(_pick(args.direction, file_config, "direction", 1)),
            bracket=(float(lo_s), float(hi_s)),
            width_tol=float(_pick(args.width, file_config, "width", 1e-4)),
            cfg=cfg,
        )
        print(json.dumps(result))
        return EXIT_OK

    if args.command == "wells":
        params = SystemParams(args.zeta, args.m)
        if args.n_min > args.n_max:
            raise DomainError(f"n-min {args.n_min} exceeds n-max {args.n_max}")
        if args.out:
            with open(args.out, "w") as fh:
                write_wells_csv(params, args.n_min, args.n_max, fh)
        else:
            write_wells_csv(params, args.n_min, args.n_max, sys.stdout)
        return EXIT_OK

    if args.command == "spectrum":
        if args.out:
            with open(args.out, "w") as fh:
                phase_line = write_spectrum_csv(args.m, args.zeta, fh)
        else:
            phase_line = write_spectrum_csv(args.m, args.zeta, sys.stdout)
        print(phase_line)
        return EXIT_OK

    raise DomainError(f"unknown command {args.command!r}")


if __name__ == "__main__":
    sys.exit(main())
