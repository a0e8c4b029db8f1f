"""Command-line frontend.

Subcommands: ground, qet, spectrum, sweep, rydberg, minimal.  Flags override
values from ``--config``; results go to ``--out`` or standard output.
Exit status: 0 success, 1 compute failure, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from kondoqet.config import ConfigError, RunConfig, config_from_dict, read_document
from kondoqet.eigen import ground_state
from kondoqet.entanglement import (
    bound_eq10_margin,
    delta_S_AB,
    half_chain_entropy,
    magnetization,
    minimal_model_case,
    operator_norm,
    reduced_density,
    schmidt_coefficients,
    von_neumann_entropy,
)
from kondoqet.errors import KondoQetError
from kondoqet.model import bob_local_hamiltonian, build_hamiltonian
from kondoqet.qet import protocol_for_ground
from kondoqet.sweep import emit_csv, emit_heatmap, rydberg_config, rydberg_scan, run_grid

log = logging.getLogger("kondoqet")

# flag dest -> config key
MODEL_FLAGS = {
    "n": "N",
    "j": "J",
    "delta": "Delta",
    "jk": "Jk",
    "b": "B",
    "coupled_site": "coupled_site",
    "na": "n_A",
    "nb": "n_B",
    "sigma_a": "sigma_A_axis",
    "sigma_b": "sigma_B_axis",
}


class UsageError(Exception):
    pass


def _add_model_flags(p: argparse.ArgumentParser):
    g = p.add_argument_group("model (energies in the same units as J)")
    g.add_argument("--config", metavar="PATH", help="JSON config file; flags override its values")
    g.add_argument("--out", metavar="PATH", help="output file (default: standard output)")
    g.add_argument("--n", type=int, help="number of spins N (sites 1..N, impurity at site 1)")
    g.add_argument("--j", type=float, help="bulk XXZ coupling J [energy] (default 0.5)")
    g.add_argument("--delta", type=float, help="XXZ anisotropy Delta [dimensionless] (default 1.0)")
    g.add_argument("--jk", type=float, help="Kondo coupling J_K [energy] (default 0.2)")
    g.add_argument("--b", type=float, help="uniform field B [energy] (default 0.4)")
    g.add_argument("--coupled-site", type=int, help="host site bonded to the impurity [site index] (default 2)")
    g.add_argument("--na", type=int, help="Alice's site [site index] (default 4)")
    g.add_argument("--nb", type=int, help="Bob's site [site index] (default 7)")
    g.add_argument("--sigma-a", choices=["X", "Y", "Z"], help="Alice's Pauli axis (default X)")
    g.add_argument("--sigma-b", choices=["X", "Y", "Z"], help="Bob's Pauli axis (default Y)")
    g.add_argument(
        "--impurity-bulk-bond",
        action="store_true",
        default=None,
        help="also add a bulk J bond between sites 1 and 2",
    )


def _axis_arg(text: str) -> dict:
    parts = text.split(":")
    if len(parts) != 4:
        raise argparse.ArgumentTypeError("axis must be NAME:LO:HI:STEPS, e.g. Delta:-2:2:41")
    try:
        return {"name": parts[0], "lo": float(parts[1]), "hi": float(parts[2]), "steps": int(parts[3])}
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _add_sweep_flags(p: argparse.ArgumentParser, two_axes: bool = True):
    g = p.add_argument_group("grid")
    g.add_argument("--axis1", type=_axis_arg, metavar="NAME:LO:HI:STEPS", help="outer axis; NAME in Delta, B, Jk")
    if two_axes:
        g.add_argument("--axis2", type=_axis_arg, metavar="NAME:LO:HI:STEPS", help="inner axis")
        g.add_argument("--emit", help="comma list of csv, svg (default csv)")
        g.add_argument("--outputs", help="comma list of observables rendered as SVG heatmaps")
        g.add_argument("--svg-prefix", metavar="PATH", help="SVG files are written to PATH_<observable>.svg")
    g.add_argument("--workers", type=int, help="worker processes (results identical for any count)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kondoqet", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ground", help="ground energy, gap, magnetization and half-chain entropy")
    _add_model_flags(p)
    p = sub.add_parser("qet", help="full QET protocol at one parameter point")
    _add_model_flags(p)
    p = sub.add_parser("spectrum", help="Schmidt coefficients of the ground state at a cut")
    _add_model_flags(p)
    p.add_argument("--cut", type=int, help="bond after site CUT [site index] (default N//2)")
    p = sub.add_parser("sweep", help="2-axis parameter grid to CSV and/or SVG")
    _add_model_flags(p)
    _add_sweep_flags(p)
    p = sub.add_parser("rydberg", help="B scan with 1/d^6-scaled Kondo coupling at d=1 and d=2")
    _add_model_flags(p)
    _add_sweep_flags(p, two_axes=False)
    p = sub.add_parser("minimal", help="two-qubit entanglement/energy bound over a log (h, k) grid")
    p.add_argument("--config", metavar="PATH", help="JSON config file (uses minimal_grid)")
    p.add_argument("--out", metavar="PATH", help="output file (default: standard output)")
    p.add_argument("--lo", type=float, help="smallest h and k [energy] (default 0.1)")
    p.add_argument("--hi", type=float, help="largest h and k [energy] (default 10)")
    p.add_argument("--steps", type=int, help="grid points per axis (default 10)")
    return parser


def _resolve(args, command: str) -> RunConfig:
    doc = {}
    if command == "rydberg":
        doc.update(rydberg_config().base.to_dict())
        doc.update(axis1={"name": "B", "lo": 0.0, "hi": 1.5, "steps": 41}, axis2=None)
    if getattr(args, "config", None):
        doc.update(read_document(args.config))
    for dest, key in MODEL_FLAGS.items():
        value = getattr(args, dest, None)
        if value is not None:
            doc[key] = value
    if getattr(args, "impurity_bulk_bond", None):
        doc["include_impurity_bulk_bond"] = True
    for key in ("axis1", "axis2", "workers", "cut", "out", "svg_prefix"):
        value = getattr(args, key, None)
        if value is not None:
            doc[key] = value
    for key in ("emit", "outputs"):
        value = getattr(args, key, None)
        if value is not None:
            doc[key] = [v.strip() for v in value.split(",") if v.strip()]
    if command == "minimal":
        grid = dict(doc.get("minimal_grid") or {})
        for key in ("lo", "hi", "steps"):
            if getattr(args, key, None) is not None:
                grid[key] = getattr(args, key)
        doc["minimal_grid"] = grid
    require = command in ("qet", "sweep", "rydberg")
    try:
        return config_from_dict(doc, require_protocol=require)
    except ConfigError as exc:
        if getattr(args, "config", None):
            raise ConfigError(f"{args.config}: {exc}") from exc
        raise


def _record(d: dict) -> str:
    return json.dumps(d, sort_keys=False) + "\n"


def cmd_ground(cfg: RunConfig) -> str:
    p = cfg.model
    h = build_hamiltonian(p)
    gr = ground_state(h, n=p.N)
    s_lr = half_chain_entropy(gr.state) if p.N >= 2 else 0.0
    return _record(
        {"N": p.N, "e0": gr.e0, "gap": gr.gap, "m": magnetization(gr.state), "s_lr": s_lr, "degenerate": gr.degenerate}
    )


def cmd_qet(cfg: RunConfig) -> str:
    p = cfg.model
    h = build_hamiltonian(p)
    gr = ground_state(h, n=p.N)
    res = protocol_for_ground(p, h, gr)
    block = bob_local_hamiltonian(p, gr.state)
    s_a = von_neumann_entropy(reduced_density(gr.state, [p.n_A]))
    cut = cfg.cut or (p.n_A + p.n_B) // 2
    rec = res.to_dict()
    rec.update(
        s_a_comp=s_a,
        bound_margin=bound_eq10_margin(s_a, res.e_teleported, operator_norm(block.op)),
        delta_S_AB=delta_S_AB(gr.state, p.sigma_A, cut),
        delta_S_cut=cut,
    )
    return _record(rec)


def cmd_spectrum(cfg: RunConfig) -> str:
    p = cfg.model
    gr = ground_state(build_hamiltonian(p), n=p.N)
    cut = cfg.cut or p.N // 2
    sch = schmidt_coefficients(gr.state, cut)
    return _record({"cut": cut, "entropy": sch.entropy(), "coefficients": [float(c) for c in sch.coefficients]})


def _write(text: str, out: str | None):
    if out:
        Path(out).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


def cmd_sweep(cfg: RunConfig) -> str | None:
    sweep = cfg.sweep
    if sweep.axis2 is None:
        raise UsageError("sweep needs two axes (use --axis2)")
    if "svg" in sweep.emit and not cfg.svg_prefix:
        raise UsageError("emitting svg requires --svg-prefix")
    rows = run_grid(sweep)
    if "svg" in sweep.emit:
        for obs in sweep.outputs:
            svg = emit_heatmap(rows, obs, sweep.axis1.name, sweep.axis2.name)
            Path(f"{cfg.svg_prefix}_{obs}.svg").write_text(svg, encoding="utf-8", newline="\n")
    return emit_csv(rows) if "csv" in sweep.emit else None


def cmd_rydberg(cfg: RunConfig) -> str:
    sweep = replace(cfg.sweep, axis2=None)
    return emit_csv(rydberg_scan(sweep))


def cmd_minimal(cfg: RunConfig) -> str:
    values = cfg.minimal_grid.values()
    lines = ["h,k,lambda,delta_S,e_b,rhs_eq9,margin"]
    for h in values:
        for k in values:
            c = minimal_model_case(h, k)
            lines.append(",".join(repr(float(v)) for v in (c.h, c.k, c.lam, c.delta_S, c.e_b, c.rhs_eq9, c.margin)))
    return "\n".join(lines) + "\n"


COMMANDS = {
    "ground": cmd_ground,
    "qet": cmd_qet,
    "spectrum": cmd_spectrum,
    "sweep": cmd_sweep,
    "rydberg": cmd_rydberg,
    "minimal": cmd_minimal,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = _resolve(args, args.command)
        if args.command == "rydberg" and cfg.sweep.axis1.name != "B":
            raise UsageError("rydberg needs a B axis (e.g. --axis1 B:0:1.5:41)")
    except (ConfigError, UsageError) as exc:
        print(f"kondoqet {args.command}: error: {exc}", file=sys.stderr)
        return 2
    try:
        text = COMMANDS[args.command](cfg)
    except UsageError as exc:
        print(f"kondoqet {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (KondoQetError, ArithmeticError, ValueError) as exc:
        print(f"kondoqet {args.command}: compute error: {exc}", file=sys.stderr)
        return 1
    if text is not None:
        try:
            _write(text, cfg.out)
        except OSError as exc:
            print(f"kondoqet {args.command}: error: cannot write {cfg.out}: {exc.strerror}", file=sys.stderr)
            return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
