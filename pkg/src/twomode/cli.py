"""
Command-line front end.

    twomode negativity --coherent 0.5 0 --n 4 --bipartition both
    twomode evolve --coherent 0.5 0 --n 4 --gamma 1 --t 0:2:21 --out traj.csv
    twomode squeeze --fock 4 --n 4 --gamma 1 --t 0:1:5
    twomode scan --fock 4 --n 4 --gamma 1 --t 0:2:40 --out sweep.json

Exit status: 0 success, 2 invalid configuration, 3 invalid input state,
4 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .dephasing import DephasingParams, evolve
from .entanglement import is_separable, negativity_closed_form, negativity_trace_norm
from .errors import (
    DomainError,
    InvalidBipartitionError,
    InvalidLabelError,
    InvariantError,
    NumericError,
    PremiseError,
    QuadratureError,
    UndefinedSqueezingError,
)
from .fock import (
    ENERGY,
    SPATIAL,
    FockDensityMatrix,
    ModeBipartition,
    PureState,
    change_bipartition,
    coherent_state,
    fock_state,
)
from .io import (
    SUMMARY_COLUMNS,
    SWEEP_COLUMNS,
    atomic_write_text,
    csv_text,
    load_state,
    save_state,
    trajectory_rows,
)
from .metrology import (
    DirectionTriplet,
    direction_triplets,
    min_squeezing_scan,
    spin_mean,
    spin_variance,
    squeezing_sweep,
)

COMMANDS = ("negativity", "evolve", "squeeze", "scan")
EXIT_OK, EXIT_CONFIG, EXIT_STATE, EXIT_NUMERIC = 0, 2, 3, 4


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    n_total: int | None = None
    fock: int | None = None
    coherent: tuple[float, float] | None = None
    state_path: str | None = None
    random: bool = False
    seed: int = 0
    basis: str = "spatial"
    bipartition: str = "spatial"
    gamma: float = 0.0
    time_grid: tuple[float, float, int] | None = None
    backend: str = "closed_form"
    out: str | None = None
    fmt: str | None = None
    nodes: int = 64
    grid_resolution: int = 16
    sweep_resolution: int = 8
    n2: tuple[float, float, float] | None = None
    n3: tuple[float, float, float] | None = None
    save_state: str | None = None
    extra: dict = field(default_factory=dict)

    def validate(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        sources = [self.fock is not None, self.coherent is not None, self.state_path is not None, self.random]
        if sum(sources) != 1:
            raise ConfigError("exactly one state source is required: --fock, --coherent, --state or --random")
        if self.state_path is None and self.n_total is None:
            raise ConfigError("--n is required unless the state is loaded with --state")
        if self.command in ("evolve", "scan") and self.time_grid is None:
            raise ConfigError(f"{self.command} requires a time grid (--t start:end:steps)")
        if self.gamma < 0:
            raise ConfigError("--gamma must be non-negative")
        if self.bipartition not in ("spatial", "energy", "both"):
            raise ConfigError(f"--bipartition must be spatial, energy or both, got {self.bipartition!r}")
        if (self.n2 is None) != (self.n3 is None):
            raise ConfigError("--n2 and --n3 must be given together")
        fmt = self.output_format
        if fmt not in ("csv", "json"):
            raise ConfigError(f"--format must be csv or json, got {fmt!r}")

    @property
    def output_format(self) -> str:
        if self.fmt is not None:
            return self.fmt
        if self.out is not None and self.out.endswith(".csv"):
            return "csv"
        return "json"

    def times(self) -> np.ndarray:
        if self.time_grid is None:
            return np.array([0.0])
        start, end, steps = self.time_grid
        return np.linspace(start, end, steps)


def parse_time_grid(text: str) -> tuple[float, float, int]:
    """``start:end:steps`` with inclusive endpoints."""
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"time grid must be start:end:steps, got {text!r}")
    try:
        start, end, steps = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise argparse.ArgumentTypeError(f"time grid must be start:end:steps, got {text!r}") from None
    if steps < 1 or start < 0 or (steps > 1 and end <= start):
        raise argparse.ArgumentTypeError(f"need 0 <= start < end and steps >= 1, got {text!r}")
    return start, end, steps


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="twomode", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("command", choices=COMMANDS)
    src = parser.add_mutually_exclusive_group()
    src.add_argument("--fock", type=int, metavar="K", help="number state |K, N-K>")
    src.add_argument("--coherent", type=float, nargs=2, metavar=("XI", "PHI"), help="discrete coherent state")
    src.add_argument("--state", dest="state_path", metavar="PATH", help="JSON state file")
    src.add_argument("--random", action="store_true", help="random pure state drawn with --seed")
    parser.add_argument("--n", dest="n_total", type=int, metavar="N", help="total particle number")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument(
        "--basis",
        choices=("spatial", "energy"),
        default="spatial",
        help="modes in which --fock/--coherent/--random are defined (default spatial)",
    )
    parser.add_argument("--bipartition", default="spatial", help="spatial, energy or both")
    parser.add_argument("--gamma", type=float, default=0.0)
    parser.add_argument("--t", dest="time_grid", type=parse_time_grid, metavar="GRID", help="start:end:steps")
    parser.add_argument("--backend", choices=("closed_form", "ode", "kraus_quadrature"), default="closed_form")
    parser.add_argument("--nodes", type=int, default=64, metavar="Q")
    parser.add_argument("--grid-res", dest="grid_resolution", type=int, default=16, metavar="R")
    parser.add_argument("--sweep-res", dest="sweep_resolution", type=int, default=8, metavar="R",
                        help="scan sweeps R^2 direction triplets")
    parser.add_argument("--n2", type=float, nargs=3, metavar=("X", "Y", "Z"))
    parser.add_argument("--n3", type=float, nargs=3, metavar=("X", "Y", "Z"))
    parser.add_argument("--out", metavar="PATH")
    parser.add_argument("--format", dest="fmt", choices=("csv", "json"))
    parser.add_argument("--save-state", metavar="PATH", help="also write the input state as JSON")
    return parser


def config_from_args(argv=None) -> RunConfig:
    ns = build_parser().parse_args(argv)
    kw = vars(ns)
    kw["coherent"] = tuple(kw["coherent"]) if kw["coherent"] else None
    kw["n2"] = tuple(kw["n2"]) if kw["n2"] else None
    kw["n3"] = tuple(kw["n3"]) if kw["n3"] else None
    return RunConfig(**kw)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _input_state(cfg: RunConfig) -> FockDensityMatrix:
    if cfg.state_path is not None:
        rho = load_state(cfg.state_path)
        if cfg.n_total is not None and cfg.n_total != rho.n_total:
            raise ConfigError(f"--n {cfg.n_total} disagrees with n_total={rho.n_total} in {cfg.state_path}")
        return change_bipartition(rho, SPATIAL)
    n = cfg.n_total
    if cfg.fock is not None:
        psi = fock_state(cfg.fock, n)
    elif cfg.coherent is not None:
        psi = coherent_state(cfg.coherent[0], cfg.coherent[1], n)
    else:
        rng = np.random.default_rng(cfg.seed)
        psi = PureState.normalized(n, rng.standard_normal(n + 1) + 1j * rng.standard_normal(n + 1))
    rho = psi.density_matrix(ModeBipartition.from_name(cfg.basis))
    return change_bipartition(rho, SPATIAL)


def _bipartitions(cfg) -> list[ModeBipartition]:
    if cfg.bipartition == "both":
        return [SPATIAL, ENERGY]
    return [ModeBipartition.from_name(cfg.bipartition)]


def _vec(v) -> list[float]:
    return [float(x) for x in v]


def _cmd_negativity(cfg, rho):
    results = []
    for bp in _bipartitions(cfg):
        r = change_bipartition(rho, bp)
        results.append(
            {
                "bipartition": bp.tag,
                "closed_form": negativity_closed_form(r).value,
                "trace_norm": negativity_trace_norm(r).value,
                "separable": is_separable(r, 1e-10),
            }
        )
    payload = {"command": "negativity", "n_total": rho.n_total, "results": results}
    cols = ("bipartition", "closed_form", "trace_norm", "separable")
    tables = [(None, cols, [[r[c] for c in cols] for r in results])]
    return payload, tables


def _cmd_evolve(cfg, rho):
    params = DephasingParams(cfg.gamma, cfg.times())
    kwargs = {"nodes": cfg.nodes} if cfg.backend == "kraus_quadrature" else {}
    result = evolve(rho, params, backend=cfg.backend, **kwargs)
    export_bp = ENERGY if cfg.bipartition == "energy" else SPATIAL
    states = [change_bipartition(s, export_bp) for s in result.states]
    neg0 = negativity_closed_form(rho).value
    summary = []
    for t, s in result:
        summary.append(
            (
                float(t),
                negativity_closed_form(s).value,
                negativity_closed_form(change_bipartition(s, ENERGY)).value,
                float(np.exp(-0.5 * t * cfg.gamma) * neg0),
            )
        )
    payload = {
        "command": "evolve",
        "n_total": rho.n_total,
        "gamma": cfg.gamma,
        "backend": result.backend,
        "basis": export_bp.tag,
        "trajectory": [
            {"t": float(t), "entries": [[[float(z.real), float(z.imag)] for z in row] for row in s.entries]}
            for t, s in zip(result.times, states)
        ],
        "summary": [dict(zip(SUMMARY_COLUMNS, row)) for row in summary],
    }
    tables = [
        (None, ("t", "k", "l", "re", "im"), trajectory_rows(result.times, states)),
        ("summary", SUMMARY_COLUMNS, summary),
    ]
    return payload, tables


def _cmd_squeeze(cfg, rho):
    if cfg.n3 is not None:
        triplet = DirectionTriplet.from_n2_n3(cfg.n2, cfg.n3)
        min_xi = None
    else:
        scan = min_squeezing_scan(rho, cfg.grid_resolution)
        triplet, min_xi = scan.argmin_triplet, scan.min_xi
    times = cfg.times()
    states = evolve(rho, DephasingParams(cfg.gamma, times)).states
    reports = []
    n = rho.n_total
    for t, s in zip(times, states):
        mean = spin_mean(s, triplet.n3)
        var = spin_variance(s, triplet.n2)
        if abs(mean) <= 1e-8:
            raise UndefinedSqueezingError(f"|<J_n3>| = {abs(mean):.3e} vanishes at t={t}")
        xi2 = n * var / mean ** 2
        reports.append(
            {
                "t": float(t),
                "xi_w_squared": xi2,
                "delta_theta_squared": xi2 / n,
                "mean_n3": mean,
                "variance_n2": var,
            }
        )
    payload = {
        "command": "squeeze",
        "n_total": n,
        "gamma": cfg.gamma,
        "triplet": {"n1": _vec(triplet.n1), "n2": _vec(triplet.n2), "n3": _vec(triplet.n3)},
        "scan_min_xi": min_xi,
        "reports": reports,
    }
    cols = ("t", "xi_w_squared", "delta_theta_squared", "mean_n3", "variance_n2",
            "n1_x", "n1_y", "n1_z", "n2_x", "n2_y", "n2_z", "n3_x", "n3_y", "n3_z")
    rows = [
        [r["t"], r["xi_w_squared"], r["delta_theta_squared"], r["mean_n3"], r["variance_n2"],
         *triplet.n1, *triplet.n2, *triplet.n3]
        for r in reports
    ]
    return payload, [(None, cols, rows)]


def _cmd_scan(cfg, rho):
    triplets = direction_triplets(cfg.sweep_resolution)
    premise, rows = squeezing_sweep(rho, triplets, cfg.gamma, cfg.times(), cfg.nodes, cfg.grid_resolution)
    tp = premise.argmin_triplet
    lhs = [r["bound_lhs"] for r in rows]
    payload = {
        "command": "scan",
        "n_total": rho.n_total,
        "gamma": cfg.gamma,
        "premise": {
            "min_xi": premise.min_xi,
            "grid_resolution": cfg.grid_resolution,
            "n1": _vec(tp.n1),
            "n2": _vec(tp.n2),
            "n3": _vec(tp.n3),
        },
        "triplets": len(triplets),
        "min_bound_lhs": min(lhs) if lhs else None,
        "all_hold": all(v >= 1.0 - 1e-8 for v in lhs),
        "sweep": [
            {**{k: r[k] for k in SWEEP_COLUMNS[:4]}, "n2": _vec(r["n2"]), "n3": _vec(r["n3"])} for r in rows
        ],
    }
    sweep_rows = [
        [r["t"], r["xi_w_squared"], r["delta_theta_squared"], r["bound_lhs"], *r["n2"], *r["n3"]] for r in rows
    ]
    premise_cols = ("min_xi", "n2_x", "n2_y", "n2_z", "n3_x", "n3_y", "n3_z")
    tables = [
        (None, SWEEP_COLUMNS, sweep_rows),
        ("premise", premise_cols, [[premise.min_xi, *tp.n2, *tp.n3]]),
    ]
    return payload, tables


_HANDLERS = {
    "negativity": _cmd_negativity,
    "evolve": _cmd_evolve,
    "squeeze": _cmd_squeeze,
    "scan": _cmd_scan,
}


def _sidecar(path: Path, suffix: str) -> Path:
    return path.with_name(f"{path.stem}_{suffix}{path.suffix}")


def _emit(cfg, payload, tables, stdout):
    if cfg.output_format == "json":
        text = json.dumps(payload, indent=1) + "\n"
        if cfg.out is None:
            stdout.write(text)
        else:
            atomic_write_text(cfg.out, text)
        return
    if cfg.out is None:
        stdout.write("\n".join(csv_text(cols, rows) for _, cols, rows in tables))
        return
    out = Path(cfg.out)
    for suffix, cols, rows in tables:
        atomic_write_text(out if suffix is None else _sidecar(out, suffix), csv_text(cols, rows))


def run(cfg: RunConfig, stdout=None, stderr=None) -> int:
    """Execute one command; returns the process exit status."""
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    try:
        cfg.validate()
        rho = _input_state(cfg)
        if cfg.save_state:
            save_state(rho, cfg.save_state)
        payload, tables = _HANDLERS[cfg.command](cfg, rho)
        _emit(cfg, payload, tables, stdout)
    except InvariantError as exc:
        print(f"twomode: invalid input state: {exc}", file=stderr)
        return EXIT_STATE
    except (ConfigError, DomainError, InvalidLabelError, InvalidBipartitionError, PremiseError) as exc:
        print(f"twomode: invalid configuration: {exc}", file=stderr)
        return EXIT_CONFIG
    except (NumericError, UndefinedSqueezingError) as exc:
        print(f"twomode: numerical failure: {exc}", file=stderr)
        if isinstance(exc, QuadratureError):
            print(f"twomode: residual={exc.residual!r} nodes={exc.nodes!r}", file=stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"twomode: {exc}", file=stderr)
        return EXIT_CONFIG
    return EXIT_OK


def main(argv=None) -> int:
    cfg = config_from_args(argv)
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
