"""Command-line entry point: ``he3light <command> [options]``.

Every command writes its results into ``--out`` (default: current directory).
Floats are written with 12 significant digits; trajectory times are given in
nuclear Larmor periods.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from . import __version__
from .constants import GHZ, CellParams, larmor_frequency, load_config


def _fmt(v) -> str:
    return f"{v:.12g}" if isinstance(v, (float, np.floating)) else str(v)


def _dump_json(obj, path: Path) -> None:
    def default(o):
        if isinstance(o, np.ndarray):
            return o.tolist()
        if isinstance(o, (np.floating, np.integer, np.bool_)):
            return o.item()
        raise TypeError(type(o).__name__)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True, default=default) + "\n")


def parse_grid(text: str) -> List[float]:
    """'a:b:c' -> a, a+c, ..., up to b inclusive; also accepts a comma list."""
    if ":" in text:
        try:
            a, b, c = (float(x) for x in text.split(":"))
        except ValueError:
            raise argparse.ArgumentTypeError("grid must be start:stop:step")
        if c <= 0 or b < a:
            raise argparse.ArgumentTypeError("grid needs step > 0 and stop >= start")
        n = int(np.floor((b - a) / c + 1e-9)) + 1
        return [round(a + i * c, 12) for i in range(n)]
    try:
        return [float(x) for x in text.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError("grid must be start:stop:step or a comma list")


def _cell(args) -> CellParams:
    base = load_config(args.config).cell if args.config else CellParams.from_ratio(1e3)
    kw = {}
    if args.ratio is not None:
        kw["n_cell"] = base.N_cell / args.ratio
    if args.nph is not None:
        kw["n_ph"] = args.nph
    if args.field is not None:
        kw["B_x"] = args.field
    return base.with_(**kw) if kw else base


def _detuning(args, config: int) -> float:
    from .analysis import DEFAULT_DETUNING_GHZ
    if args.detuning is not None:
        return args.detuning
    if args.config:
        d = load_config(args.config).detuning_ghz
        if d is not None:
            return d
    return DEFAULT_DETUNING_GHZ[config]


def _couplings(args, cell: CellParams, config: int):
    from .polarizability import coupling_closed_form
    return coupling_closed_form(_detuning(args, config) * GHZ, cell=cell)


def _config_of(model: str) -> int:
    return 1 if model in ("full", "config1") else 2


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_spectrum(args, out: Path) -> int:
    from .polarizability import spectrum_scan, write_spectrum_csv
    path = out / "spectrum.csv"
    write_spectrum_csv(path, spectrum_scan(args.from_ghz, args.to_ghz, args.step))
    print(path)
    return 0


def cmd_steady(args, out: Path) -> int:
    from .dynamics import full_rhs
    from .steady import stationary_state
    cell = _cell(args).with_(M=args.M)
    cpl = _couplings(args, cell, 1)
    st = stationary_state(args.M, cell)
    res = full_rhs(st, cpl, cell).total
    _dump_json({"M": args.M, "state": st.to_dict(), "rhs_max_abs": float(np.max(np.abs(res))),
                "cell": cell.to_dict()}, out / "steady.json")
    print(out / "steady.json")
    return 0


def cmd_jacobian(args, out: Path) -> int:
    from .steady import analytic_linearization, numeric_jacobian
    from .validation import linearization_errors
    cell = _cell(args).with_(M=args.M)
    cpl = _couplings(args, cell, 1)
    ana = analytic_linearization(args.M, cpl, cell)
    num = numeric_jacobian(args.M, cpl, cell)
    err_a, err_b, cross = linearization_errors(ana, num)
    _dump_json({"ordering_a": ana.ordering_a, "ordering_b": ana.ordering_b,
                "A": ana.matrix_A, "B": ana.matrix_B, "A_numeric": num.matrix_A, "B_numeric": num.matrix_B,
                "max_rel_error_A": err_a, "max_rel_error_B": err_b, "cross_norm": cross},
               out / "jacobian.json")
    print(out / "jacobian.json")
    return 0


def _write_traj(traj, cell: CellParams, path: Path) -> None:
    traj.write_csv(path, time_scale=larmor_frequency(cell) / (2 * np.pi), time_label="t_larmor_periods")


def cmd_simulate(args, out: Path) -> int:
    from .analysis import simulate
    cell = _cell(args).with_(M=args.M)
    cpl = _couplings(args, cell, _config_of(args.model))
    traj = simulate(args.model, args.M, cpl, cell, args.tilt, args.periods)
    path = out / f"trajectory_{args.model}_M{args.M:g}.csv"
    _write_traj(traj, cell, path)
    print(path)
    return 0


def cmd_compare(args, out: Path) -> int:
    from .analysis import compare_trajectories, fluctuations, simulate
    from .steady import stationary_state
    cell = _cell(args).with_(M=args.M)
    cpl = _couplings(args, cell, _config_of(args.model))
    full = simulate("full", args.M, cpl, cell, args.tilt, args.periods)
    red = simulate(args.model, args.M, cpl, cell, args.tilt, args.periods)
    fl = fluctuations(full, stationary_state(args.M, cell).to_dict(), red.names)
    rep = compare_trajectories(fl, red, red.names)
    _write_traj(fl, cell, out / f"compare_full_M{args.M:g}.csv")
    _write_traj(red, cell, out / f"compare_{args.model}_M{args.M:g}.csv")
    _dump_json({"model": args.model, "M": args.M, **asdict(rep)}, out / f"compare_{args.model}_M{args.M:g}.json")
    for k, v in rep.nrms.items():
        print(f"{k}\t{_fmt(v)}")
    return 0


def _scan_task(task):
    from .analysis import coupling_point
    config, M, cell, source, detuning = task
    return coupling_point(config, M, cell, source, detuning)


def cmd_coupling_scan(args, out: Path) -> int:
    cell = _cell(args)
    configs = {"config1": [1], "config2": [2], "both": [1, 2]}[args.model]
    sources = ["reduced", "full"] if args.full else ["reduced"]
    tasks = [(c, M, cell, s, args.detuning) for s in sources for c in configs for M in args.m_grid]
    if args.workers > 1:
        with ProcessPoolExecutor(args.workers) as pool:
            points = list(pool.map(_scan_task, tasks))
    else:
        points = [_scan_task(t) for t in tasks]
    path = out / "coupling_scan.csv"
    cols = ("M", "config", "source", "omega_extracted", "f_extracted", "f_analytic", "rel_error", "residual",
            "low_confidence")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(cols)
        for p in points:
            w.writerow([_fmt(getattr(p, c)) for c in cols])
    print(path)
    return 0


def cmd_validate(args, out: Path) -> int:
    from .validation import run_validation
    report = run_validation(n_samples=args.samples, seed=args.seed)
    _dump_json(report, out / "validation.json")
    failed = [name for name, item in report["checks"].items() if not item["passed"]]
    for name, item in report["checks"].items():
        print(f"{'PASS' if item['passed'] else 'FAIL'}  {name}  {_fmt(item['value'])} (limit {_fmt(item['limit'])})")
    return 1 if failed else 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration; flags override it")
    common.add_argument("--out", default=".", help="output directory")
    common.add_argument("--ratio", type=float, help="N_cell / n_cell (= T / tau)")
    common.add_argument("--nph", type=float, help="photon number n_ph (in units of N_cell)")
    common.add_argument("--field", type=float, help="B_x in tesla")
    common.add_argument("--detuning", type=float, help="detuning from C8 in GHz")

    p = argparse.ArgumentParser(prog="he3light", description="Metastable helium-3 light-atom spin dynamics.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("spectrum", parents=[common], help="coupling constants vs detuning")
    s.add_argument("--from-ghz", type=float, default=-40.0)
    s.add_argument("--to-ghz", type=float, default=10.0)
    s.add_argument("--step", type=float, default=0.05)
    s.set_defaults(func=cmd_spectrum)

    s = sub.add_parser("steady", parents=[common], help="stationary state")
    s.add_argument("--M", type=float, required=True)
    s.set_defaults(func=cmd_steady)

    s = sub.add_parser("jacobian", parents=[common], help="analytic and numeric linearization")
    s.add_argument("--M", type=float, required=True)
    s.set_defaults(func=cmd_jacobian)

    for name, fn, models in (("simulate", cmd_simulate, ("full", "config1", "config2", "config2-full-adiab")),
                             ("compare", cmd_compare, ("config1", "config2", "config2-full-adiab"))):
        s = sub.add_parser(name, parents=[common])
        s.add_argument("--model", choices=models, required=True)
        s.add_argument("--M", type=float, required=True)
        s.add_argument("--tilt", type=float, default=0.01)
        s.add_argument("--periods", type=float, default=3.0)
        s.set_defaults(func=fn)

    s = sub.add_parser("coupling-scan", parents=[common], help="effective coupling vs M")
    s.add_argument("--model", choices=("config1", "config2", "both"), default="both")
    s.add_argument("--m-grid", type=parse_grid, default=parse_grid("0.1:0.9:0.1"))
    s.add_argument("--full", action="store_true", help="also extract from full-model runs (slow)")
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(func=cmd_coupling_scan)

    s = sub.add_parser("validate", parents=[common], help="oracle and invariant suites")
    s.add_argument("--samples", type=int, default=100)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_validate)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    try:
        return args.func(args, out)
    except (ValueError, FileNotFoundError) as exc:
        parser.exit(2, f"he3light: error: {exc}\n")


if __name__ == "__main__":
    sys.exit(main())
