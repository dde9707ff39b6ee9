"""Command-line front end: evolutions, front sweeps, bulk and edge datasets.

Commands
    evolve   one evolution; density.csv + summary.json
    fronts   g sweep of the front diagram; fronts.csv + gc.json
    scaling  bulk scaling comparison; bulk.csv + bulk_report.json
    edge     edge profile and staircase; edge.csv + staircase.csv + edge.json

Outputs are deterministic: fixed 17-significant-digit formatting, LF line
endings, canonical row ordering, independent of --jobs.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import airy as airy_mod
from . import hydro as hydro_mod
from .dispersion import WalkParams
from .evolve import (
    GuardError,
    cumulative,
    cumulative_moment,
    current_density,
    evolve,
    position_moment,
    probability_density,
    skewness,
)
from .fronts import FrontScanError, cone_topology, critical_coupling, degeneracy

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_GUARD = 3


class ConfigError(Exception):
    pass


def _fmt(x) -> str:
    return format(float(x), ".17g")


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(str(c) if isinstance(c, (str, int)) else _fmt(c) for c in row) + "\n")


def _write_json(path: Path, payload: dict) -> None:
    with open(path, "w", newline="") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _params(args) -> WalkParams:
    try:
        return WalkParams(args.g, args.phi)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _lattice(args):
    if args.lattice in (None, "auto"):
        return None
    try:
        return int(args.lattice)
    except ValueError as exc:
        raise ConfigError(f"--lattice must be an integer or 'auto', got {args.lattice!r}") from exc


def _outdir(args) -> Path:
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output directory {out}: {exc}") from exc
    return out


# ----------------------------------------------------------------- evolve --

def cmd_evolve(args) -> int:
    p = _params(args)
    if args.t < 0:
        raise ConfigError("t must be >= 0")
    out = _outdir(args)
    wf = evolve(p, args.t, _lattice(args))
    prob = probability_density(wf)
    cur = current_density(wf)
    cpd = cumulative(prob)
    ccd = cumulative(cur)
    moments = [cumulative_moment(prob, k) for k in (1, 2, 3)]
    rows = zip(
        wf.sites,
        prob.values,
        cur.values,
        cpd.values,
        ccd.values,
        moments[0].values,
        moments[1].values,
        moments[2].values,
    )
    _write_csv(out / "density.csv", ["n", "p", "j", "Phi", "J", "M1", "M2", "M3"], rows)
    diagram = cone_topology(p)
    mu = {f"mu{k}": position_moment(prob, k) for k in range(5)}
    summary = {
        "g": p.g,
        "phi": p.phi,
        "t": wf.t,
        "lattice": wf.L,
        "moments": mu,
        "gamma": skewness(prob) if wf.t > 0 else None,
        "v_lm": diagram.v_lm,
        "v_rm": diagram.v_rm,
        "topology": diagram.topology.value,
        "fronts": [
            {
                "q_star": fr.q_star,
                "velocity": fr.velocity,
                "order": fr.order,
                "kappa": fr.kappa,
                "chirality": fr.chirality,
                "position": fr.velocity * wf.t,
            }
            for fr in diagram.fronts
        ],
    }
    _write_json(out / "summary.json", summary)
    return EXIT_OK


# ----------------------------------------------------------------- fronts --

def _sweep_point(task):
    g, phi, tol_root = task
    try:
        from .fronts import build_diagram, find_extremal_fronts

        p = WalkParams(g, phi)
        diagram = build_diagram(p, tuple(find_extremal_fronts(p, tol_root=tol_root)))
        return [
            (phi, g, fr.q_star, fr.velocity, fr.order, fr.kappa, diagram.topology.value, "ok")
            for fr in diagram.fronts
        ]
    except Exception as exc:  # recorded per row, sweep continues
        return [(phi, g, "", "", "", "", "", f"error: {exc}")]


def cmd_fronts(args) -> int:
    if args.g_steps < 1 or args.g_max < args.g_min:
        raise ConfigError("empty g range: need g-steps >= 1 and g-max >= g-min")
    if args.g_min < 0:
        raise ConfigError(f"g must be >= 0, got g-min={args.g_min}")
    phis = [args.phi] if not args.phi_list else [float(s) for s in args.phi_list.split(",")]
    for phi in phis:
        if not 0.0 <= phi <= math.pi / 2 + 1e-15:
            raise ConfigError(f"phi {phi} outside the canonical window [0, pi/2]")
    if args.tol_root <= 0 or args.tol_g <= 0:
        raise ConfigError("tolerances must be positive")
    out = _outdir(args)
    gs = np.linspace(args.g_min, args.g_max, args.g_steps)
    tasks = [(float(g), float(phi), args.tol_root) for phi in phis for g in gs]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            chunks = list(pool.map(_sweep_point, tasks))
    else:
        chunks = [_sweep_point(t) for t in tasks]
    rows = [row for chunk in chunks for row in chunk]
    rows.sort(key=lambda r: (r[0], r[1], r[3] if isinstance(r[3], float) else math.inf))
    _write_csv(
        out / "fronts.csv",
        ["phi", "g", "q_star", "velocity", "order", "kappa", "topology", "status"],
        rows,
    )
    gc_entries = []
    for phi in phis:
        try:
            gc_entries.append({"phi": phi, "g_c": critical_coupling(phi, tol_g=args.tol_g)})
        except FrontScanError as exc:
            gc_entries.append({"phi": phi, "g_c": None, "error": str(exc)})
    _write_json(out / "gc.json", {"tol_g": args.tol_g, "critical_couplings": gc_entries})
    return EXIT_OK


# ---------------------------------------------------------------- scaling --

def cmd_scaling(args) -> int:
    p = _params(args)
    if args.t <= 0:
        raise ConfigError("t must be > 0 for scaling comparisons")
    out = _outdir(args)
    wf = evolve(p, args.t, _lattice(args))
    prob = probability_density(wf)
    phi_num = cumulative(prob).values
    j_num = cumulative(current_density(wf)).values
    m_num = [cumulative_moment(prob, k).values / args.t**k for k in (1, 2, 3)]
    curve = hydro_mod.scaling_curve(p, num=args.grid)

    def at_nu(values, nu):
        n = math.floor(nu * args.t)
        i = min(max(n + wf.L // 2, 0), wf.L - 1)
        return values[i]

    rows = []
    for i, nu in enumerate(curve.nu):
        rows.append(
            (
                nu,
                at_nu(phi_num, nu),
                curve.phi_scaled[i],
                at_nu(j_num, nu),
                curve.j_scaled[i],
                at_nu(m_num[0], nu),
                curve.m_scaled[0][i],
                at_nu(m_num[1], nu),
                curve.m_scaled[1][i],
                at_nu(m_num[2], nu),
                curve.m_scaled[2][i],
            )
        )
    _write_csv(
        out / "bulk.csv",
        [
            "nu",
            "Phi_num", "Phi_hydro",
            "J_num", "J_hydro",
            "M1_num", "M1_hydro",
            "M2_num", "M2_hydro",
            "M3_num", "M3_hydro",
        ],
        rows,
    )
    report = hydro_mod.compare_bulk(p, args.t, exclusion=args.exclusion, lattice=_lattice(args))
    payload = {
        "g": p.g,
        "phi": p.phi,
        "t": args.t,
        "exclusion": report.exclusion,
        "windows": [{"velocity": v, "half_width": h} for v, h in report.windows],
        "deviations": {
            name: {
                "sup_outside": dev.sup_outside,
                "l1_outside": dev.l1_outside,
                "sup_inside": dev.sup_inside,
            }
            for name, dev in report.deviations.items()
        },
    }
    _write_json(out / "bulk_report.json", payload)
    return EXIT_OK


# ------------------------------------------------------------------- edge --

def _select_front(diagram, which: str):
    if which == "left":
        return next(fr for fr in diagram.fronts if fr.velocity == diagram.v_lm)
    if which == "right":
        return next(fr for fr in diagram.fronts if fr.velocity == diagram.v_rm)
    inner = [
        fr
        for fr in diagram.fronts
        if abs(fr.velocity - diagram.v_lm) > 1e-9 and abs(fr.velocity - diagram.v_rm) > 1e-9
    ]
    if not inner:
        raise ConfigError("no internal front at these couplings")
    vels = sorted({round(fr.velocity, 9) for fr in inner})
    if len(vels) > 1:
        raise ConfigError(f"ambiguous internal front, velocities {vels}")
    return inner[0]


def cmd_edge(args) -> int:
    p = _params(args)
    if args.t <= 0:
        raise ConfigError("t must be > 0")
    out = _outdir(args)
    diagram = cone_topology(p)
    front = _select_front(diagram, args.front)
    meta = {
        "g": p.g,
        "phi": p.phi,
        "t": args.t,
        "front": args.front,
        "q_star": front.q_star,
        "velocity": front.velocity,
        "order": front.order,
        "kappa": front.kappa,
        "scaling_exponent": 1.0 / (front.order + 2),
        "degeneracy": degeneracy(diagram, front),
    }
    stair_header = ["front", "observable", "step_index", "height", "width", "area", "note"]
    if front.order % 2 == 0:
        meta["staircase"] = "none"
        meta["reason"] = "even-order front: amplitude equation has no real staircase"
        _write_json(out / "edge.json", meta)
        _write_csv(out / "edge.csv", ["xi", "dPhi_scaled_num", "dPhi_scaled_pred", "dJ_scaled_num"], [])
        _write_csv(
            out / "staircase.csv",
            stair_header,
            [(args.front, "", "", "", "", "", "even-order front: no real staircase")],
        )
        return EXIT_OK
    scale = airy_mod.edge_scale(front, args.t)
    window = args.window if args.window else int(math.ceil(args.xi_max * scale))
    meta["window"] = window
    numeric = airy_mod.measure_edge(p, front, args.t, window, _lattice(args))
    predicted = airy_mod.predict_edge(front, args.t, numeric.xi)
    factor = meta["degeneracy"]
    rows = zip(numeric.xi, numeric.dphi_scaled, factor * predicted.dphi_scaled, numeric.djs_scaled)
    _write_csv(out / "edge.csv", ["xi", "dPhi_scaled_num", "dPhi_scaled_pred", "dJ_scaled_num"], rows)
    stair_rows = []
    for obs in ("cpd", "ccd"):
        for step in airy_mod.extract_staircase(numeric, observable=obs):
            stair_rows.append((args.front, obs, step.index, step.height, step.width, step.area, ""))
    if not stair_rows:
        stair_rows.append((args.front, "", "", "", "", "", "fewer than two detectable steps"))
    _write_csv(out / "staircase.csv", stair_header, stair_rows)
    _write_json(out / "edge.json", meta)
    return EXIT_OK


# ------------------------------------------------------------------ parser --

def _add_common(sub, t_default=None):
    sub.add_argument("--g", type=float, required=True, help="NNN/NN coupling ratio, >= 0")
    sub.add_argument("--phi", type=float, default=math.pi / 2, help="NNN phase in [0, pi/2] (radians)")
    if t_default is not None:
        sub.add_argument("--t", type=float, default=t_default, help="evolution time")
    sub.add_argument("--lattice", default=None, help="ring size (even int) or 'auto'")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="chiralwalk", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common_tail(s):
        s.add_argument("--out", default=".", help="output directory")
        s.add_argument("--jobs", type=int, default=1, help="parallel workers for sweeps")
        s.add_argument("--config", default=None, help="flat key=value config file; flags win")

    s = sub.add_parser("evolve", help="evolve and dump densities, currents, moments")
    _add_common(s, t_default=50.0)
    common_tail(s)
    s.set_defaults(func=cmd_evolve)

    s = sub.add_parser("fronts", help="sweep the front diagram in g, find g_c")
    s.add_argument("--phi", type=float, default=math.pi / 2)
    s.add_argument("--phi-list", default=None, help="comma-separated phi values for g_c")
    s.add_argument("--g-min", type=float, default=0.01)
    s.add_argument("--g-max", type=float, default=0.5)
    s.add_argument("--g-steps", type=int, default=50)
    s.add_argument("--tol-g", type=float, default=1e-6, help="bisection tolerance for g_c")
    s.add_argument("--tol-root", type=float, default=1e-12, help="front root residual bound")
    common_tail(s)
    s.set_defaults(func=cmd_fronts)

    s = sub.add_parser("scaling", help="bulk scaling comparison, numeric vs hydrodynamic")
    _add_common(s, t_default=2000.0)
    s.add_argument("--grid", type=int, default=4001, help="nu grid points for bulk.csv")
    s.add_argument("--exclusion", type=float, default=8.0, help="front window half-width factor")
    common_tail(s)
    s.set_defaults(func=cmd_scaling)

    s = sub.add_parser("edge", help="edge profile and staircase at one front")
    _add_common(s, t_default=10000.0)
    s.add_argument("--front", choices=("left", "right", "internal"), default="left")
    s.add_argument("--window", type=int, default=None, help="sites around the front (default from --xi-max)")
    s.add_argument("--xi-max", type=float, default=13.5,
                   help="profile extent in the edge coordinate (13.5 reaches five staircase steps)")
    common_tail(s)
    s.set_defaults(func=cmd_edge)
    return ap


def _inject_config(argv: list[str]) -> list[str]:
    """Insert key=value pairs from --config FILE before the explicit flags."""
    if "--config" not in argv:
        return argv
    i = argv.index("--config")
    if i + 1 >= len(argv):
        raise ConfigError("--config requires a file path")
    path = Path(argv[i + 1])
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    extra: list[str] = []
    for lineno, line in enumerate(path.read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        extra.extend([f"--{key.replace('_', '-')}", value])
    return argv[:1] + extra + argv[1:]


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    ap = build_parser()
    try:
        if argv and not argv[0].startswith("-"):
            argv = _inject_config(argv)
        args = ap.parse_args(argv)
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except GuardError as exc:
        print(f"numerical guard violation: {exc}", file=sys.stderr)
        return EXIT_GUARD


if __name__ == "__main__":
    raise SystemExit(main())
