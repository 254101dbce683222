"""Command-line front end.

    fibretrap mode
    fibretrap polar [--wavenumber W] [--scan LO HI STEP]
    fibretrap trap grid|analyze
    fibretrap cp [--distance NM]

Common flags: --config PATH, --state SPEC (repeatable), --out DIR.
Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .casimir import cp_shift, effective_input
from .config import ROLES, RunConfig, build_mode, load_config, state_tensors
from .errors import ConfigError, NoMinimum, NumericalError
from .export import grid_csv_text, json_text, write_text
from .fibre_modes import power_watts
from .molecular_structure import build_transitions, load_manifest
from .polarisability import parse_state, polar_report, polarisability_tensor
from .trap import TrapConfiguration, analyze, find_minimum, grid_export
from . import constants as C

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3


def _tag(state) -> str:
    return re.sub(r"[^A-Za-z0-9]+", "_", state.spec()).strip("_")


def _header(rc: RunConfig, command: str, units: dict) -> dict:
    return {"tool": "fibretrap", "version": __version__, "command": command,
            "config_hash": rc.hash, "units": units}


def _csv_header(rc: RunConfig, command: str, units: str, extra=()):
    return [f"fibretrap {__version__} {command}", f"config_hash: {rc.hash}", f"units: {units}", *extra]


class _Run:
    def __init__(self, args):
        self.args = args
        self.rc = load_config(args.config)
        self.out = Path(args.out) if args.out else self.rc.out_dir
        self.states = [parse_state(s) for s in args.state] if args.state else list(self.rc.states)
        if not self.states:
            raise ConfigError("no molecular state selected")
        self._transitions = {}

    def emit(self, name, text):
        path = write_text(self.out / name, text)
        print(path)

    def transitions(self, v):
        if self.rc.source != "computed":
            return None
        if v not in self._transitions:
            try:
                data = load_manifest(self.rc.manifest)
            except OSError as exc:
                raise ConfigError(f"cannot read manifest data: {exc}") from None
            self._transitions[v] = build_transitions(data, v=v, J=0)
        return self._transitions[v]

    def modes(self):
        return build_mode(self.rc, "travelling"), build_mode(self.rc, "standing")


def cmd_mode(run: _Run) -> int:
    args, rc = run.args, run.rc
    if args.amplitude is not None and args.power is not None:
        raise ConfigError("--amplitude and --power are mutually exclusive")
    report = {"header": _header(rc, "mode", {
        "wavenumber_cm": "cm-1", "ka, beta_a, ha, qa, s": "dimensionless",
        "amplitude_au": "atomic units of field", "power_au": "atomic units of power", "power_W": "W"})}
    report["fibre"] = {"radius_nm": rc.fibre.radius_nm, "n1": rc.fibre.n1, "n2": rc.fibre.n2}
    for role in ROLES:
        mode = build_mode(rc, role)
        if role == args.laser:
            if args.amplitude is not None:
                mode = mode.with_amplitude(args.amplitude)
            elif args.power is not None:
                mode = mode.with_power(args.power)
        row = mode.adimensioned()
        row["power_W"] = power_watts(mode, mode.amplitude)
        if role == "standing":
            row["standing_period_nm"] = C.bohr_to_nm(mode.standing_period)
        report[role] = row
    run.emit("mode.json", json_text(report))
    return EXIT_OK


def _polar_units():
    return {"frequency_cm": "cm-1", "alpha": "atomic units (e^2 a0^2 / Eh)", "alignment": "dimensionless",
            "detuning_cm": "cm-1", "dipole_au": "e a0"}


def cmd_polar(run: _Run) -> int:
    args, rc = run.args, run.rc
    if args.scan is not None and rc.source != "computed":
        raise ConfigError("--scan needs [molecule] source = computed (tables only cover the laser frequencies)")
    for state in run.states:
        trans = run.transitions(state.v)
        reports = []
        wavenumbers = [args.wavenumber] if args.wavenumber is not None else [rc.lasers[r].wavenumber for r in ROLES]
        for wn in wavenumbers:
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always")
                if trans is None:
                    match = [r for r in ROLES if rc.lasers[r].wavenumber == wn]
                    if not match:
                        raise ConfigError(f"source = table has no values at {wn} cm-1")
                    tensor = state_tensors(rc, state)[ROLES.index(match[0])]
                else:
                    tensor = polarisability_tensor(state, wn, trans, rc.guard_cm)
            reports.append(polar_report(tensor, trans or (), [str(w.message) for w in caught]))
        doc = {"header": _header(rc, "polar", _polar_units()), "source": rc.source, "tensors": reports}
        run.emit(f"polar_{_tag(state)}.json", json_text(doc))

        if args.scan is not None:
            lo, hi, step = args.scan
            if not (step > 0 and hi > lo):
                raise ConfigError("--scan needs LO < HI and STEP > 0")
            grid = lo + step * np.arange(int(np.floor((hi - lo) / step + 1e-9)) + 1)
            rows = []
            for wn in grid:
                with warnings.catch_warnings(record=True) as caught:
                    warnings.simplefilter("always")
                    t = polarisability_tensor(state, float(wn), trans, rc.guard_cm)
                xx, _, zz = t.cartesian_diag
                rows.append((wn, t.scalar, xx, zz, 1.0 if caught else 0.0))
            text = grid_csv_text(
                ["wavenumber_cm", "alpha_scalar_au", "alpha_XX_au", "alpha_ZZ_au", "near_resonance"], rows,
                _csv_header(rc, "polar --scan", "wavenumber cm-1, polarisability atomic units",
                            [f"state: {state.spec()}", f"guard_cm: {rc.guard_cm}"]))
            run.emit(f"polar_scan_{_tag(state)}.csv", text)
    return EXIT_OK


def _trap_config(run: _Run) -> TrapConfiguration:
    rc = run.rc
    m1, m2 = run.modes()
    cfg = TrapConfiguration(m1, m2, mass=C.molecule_mass(rc.isotope), fd_step=rc.fd_step, ftol=rc.ftol)
    for state in run.states:
        cfg.add_state(state, *state_tensors(rc, state, run.transitions(state.v)))
    return cfg


def cmd_trap(run: _Run) -> int:
    rc = run.rc
    cfg = _trap_config(run)
    for state in run.states:
        try:
            if run.args.action == "analyze":
                an = analyze(cfg, state, rc.boundary_mK)
                doc = {"header": _header(rc, "trap analyze", {
                    "R_min": "a and nm", "U_min_mK": "mK", "spring_constants": "mK / a^2",
                    "hbar_omega": "uK", "boundary_mK": "mK", "depth_uK": "uK", "lobe_extent": "a and nm",
                    "tunneling": "dimensionless"})}
                doc["fibre_radius_nm"] = rc.fibre.radius_nm
                doc.update(an.as_dict())
                run.emit(f"trap_analysis_{_tag(state)}.json", json_text(doc))
            else:
                minimum = find_minimum(cfg, state)
                for plane in rc.planes:
                    cols, rows = grid_export(cfg, state, plane, rc.grid_points, rc.grid_extent, minimum)
                    text = grid_csv_text(cols, rows, _csv_header(
                        rc, f"trap grid {plane}", "lengths in units of a, angles in rad, U in mK",
                        [f"state: {state.spec()}", f"fibre_radius_nm: {rc.fibre.radius_nm}",
                         f"R_min_a: {minimum.R!r}", "inside-fibre points: nan"]))
                    run.emit(f"trap_{plane}_{_tag(state)}.csv", text)
        except NoMinimum as exc:
            if exc.scan:
                text = grid_csv_text(["R_over_a", "U_mK"], exc.scan,
                                     _csv_header(rc, "trap scan (no minimum)", "R in a, U in mK",
                                                 [f"state: {state.spec()}"]))
                run.emit(f"trap_noMinimum_{_tag(state)}.csv", text)
            raise
    return EXIT_OK


def cmd_cp(run: _Run) -> int:
    rc = run.rc
    distance = rc.cp_distance_nm if run.args.distance is None else run.args.distance
    if not distance > 0:
        raise ConfigError("distance must be positive")
    shift = cp_shift(effective_input(distance, rc.fibre.n1, rc.cp_moment_au))
    line = json.dumps({"distance_nm": distance, "shift_uK": shift})
    print(line)
    doc = {"header": _header(rc, "cp", {"distance_nm": "nm", "shift_uK": "uK", "moment_au": "e a0"}),
           "distance_nm": distance, "n1": rc.fibre.n1, "moment_au": rc.cp_moment_au, "shift_uK": shift}
    write_text(run.out / "cp.json", json_text(doc))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI run configuration (default: packaged paper.cfg)")
    common.add_argument("--state", action="append", help="state spec, e.g. b:L=0,S=1,N=0,v=0,J=1,M=0")
    common.add_argument("--out", help="output directory (default: [output] dir)")

    p = argparse.ArgumentParser(prog="fibretrap", description="Two-colour nanofibre trap for diatomic molecules")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    m = sub.add_parser("mode", parents=[common], help="guided-mode parameters of both lasers")
    m.add_argument("--laser", choices=ROLES, default="travelling", help="laser the overrides apply to")
    m.add_argument("--amplitude", type=float, help="field amplitude override (au)")
    m.add_argument("--power", type=float, help="power override (au)")
    m.set_defaults(func=cmd_mode)

    pol = sub.add_parser("polar", parents=[common], help="polarisability tensor report")
    pol.add_argument("--wavenumber", type=float, help="single wavenumber in cm-1 (default: both lasers)")
    pol.add_argument("--scan", nargs=3, type=float, metavar=("LO", "HI", "STEP"), help="scalar scan in cm-1")
    pol.set_defaults(func=cmd_polar)

    t = sub.add_parser("trap", parents=[common], help="trap potential grids or analysis")
    t.add_argument("action", choices=("grid", "analyze"))
    t.set_defaults(func=cmd_trap)

    c = sub.add_parser("cp", parents=[common], help="Casimir-Polder shift estimate")
    c.add_argument("--distance", type=float, help="distance to the surface in nm")
    c.set_defaults(func=cmd_cp)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        return args.func(_Run(args))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical failure ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
