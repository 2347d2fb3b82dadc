import logging
import os
import sys
from pathlib import Path
from typing import Any, Callable, Dict, Optional

import numpy as np
import typer
from dotenv import load_dotenv
from pydantic import ValidationError
from rich.console import Console

from kgalerkin import __version__
from kgalerkin.application.critical import (
    find_critical_points,
    landscape_axes,
    landscape_grid,
    trivial_critical_point,
)
from kgalerkin.application.dynamics import cauchy_from_field, field_snapshot, integrate
from kgalerkin.application.residual import default_grid, residual_report
from kgalerkin.application.stationary import (
    UNBOUNDED,
    branch_profile,
    count_branches,
    enumerate_solutions,
    trivial_energy,
)
from kgalerkin.connectors.export import ResultWriter, read_field, read_state
from kgalerkin.core.params import (
    nondimensionalize,
    to_physical_coordinate,
    to_physical_energy,
    to_physical_field,
    to_physical_time,
)
from kgalerkin.core.spectral import COUPLING
from kgalerkin.utils.errors import (
    DivergenceError,
    DomainError,
    InputFormatError,
    KleinGordonError,
)
from kgalerkin.utils.history import get_history_logger
from kgalerkin.utils.objects import GridFunction, OutputFormat, RunConfig
from kgalerkin.utils.utils import parse_coefficient_spec, resize_state

load_dotenv()

# Configure logging
logging.basicConfig(
    level=os.getenv("KG_LOG_LEVEL", "INFO").upper(),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    handlers=[logging.StreamHandler(sys.stderr)]
)

logger = logging.getLogger(__name__)

app = typer.Typer(help="Spectral Galerkin toolkit for the nonlinear Klein-Gordon equation")
console = Console(stderr=True)

EXIT_INPUT = 2
EXIT_DIVERGENCE = 3

LambdaOption = typer.Option(None, "--lambda", help="Dimensionless parameter lambda")
BetaOption = typer.Option(None, "--beta", help="Physical nonlinearity strength")
Phi0Option = typer.Option(None, "--phi0", help="Physical potential minimum")
EllOption = typer.Option(None, "--ell", help="Physical domain length")
OutOption = typer.Option(None, "--out", help="Output directory (default: $KG_OUTPUT_DIR or .)")
FormatOption = typer.Option(OutputFormat.csv, "--format", help="Tables as csv files or inside the json summary")


def _execute(command: str, parameters: Dict[str, Any], body: Callable[[], Dict[str, Any]]) -> None:
    """Run a command body, record it in the run history and map failures to exit codes."""
    history = get_history_logger()
    try:
        result = body()
        history.log_cli_command(command=command, parameters=parameters, result=result, success=True)
    except DivergenceError as e:
        console.print(f"[red]Divergence: {e}[/red]")
        history.log_cli_command(command=command, parameters=parameters, success=False, error=str(e))
        raise typer.Exit(code=EXIT_DIVERGENCE)
    except (KleinGordonError, ValidationError) as e:
        console.print(f"[red]Error: {e}[/red]")
        history.log_cli_command(command=command, parameters=parameters, success=False, error=str(e))
        raise typer.Exit(code=EXIT_INPUT)


def _config(**kwargs: Any) -> RunConfig:
    return RunConfig(**{k: v for k, v in kwargs.items() if v is not None})


def _lambda(config: RunConfig) -> float:
    if config.lam is not None:
        return config.lam
    return nondimensionalize(config.physical).lam


def _writer(command: str, config: RunConfig, out: Optional[str], **extra: Any) -> ResultWriter:
    metadata = {
        "tool": "kg-galerkin",
        "version": __version__,
        "command": command,
        "config": config.model_dump(mode="json", exclude={"output_path"}),
        "seed": config.seed,
        **extra,
    }
    return ResultWriter(out, metadata)


@app.command()
def stationary(
    lam: Optional[float] = LambdaOption,
    beta: Optional[float] = BetaOption,
    phi0: Optional[float] = Phi0Option,
    ell: Optional[float] = EllOption,
    nmax: int = typer.Option(10, "--nmax", help="Number of Fourier coefficients per branch"),
    branches: Optional[int] = typer.Option(None, "--branches", help="Maximum number of branches"),
    profiles: bool = typer.Option(False, "--profiles", help="Also write the exact solution profiles"),
    grid: int = typer.Option(513, "--grid", help="Profile grid points"),
    out: Optional[str] = OutOption,
    output_format: OutputFormat = FormatOption,
) -> None:
    """
    Exact stationary solutions: branch table and Fourier coefficients
    """
    parameters = {"lambda": lam, "beta": beta, "phi0": phi0, "ell": ell, "nmax": nmax, "branches": branches}

    def body() -> Dict[str, Any]:
        config = _config(lam=lam, beta=beta, phi0=phi0, ell=ell, N=nmax, grid=grid, output_format=output_format)
        value = _lambda(config)
        if value == 0:
            raise DomainError("lambda = 0 is the linear theory: only the trivial stationary solution exists")
        available = count_branches(value)
        if branches is not None:
            max_count = branches
        elif available == UNBOUNDED:
            max_count = 3
        else:
            max_count = max(int(available), 1)
        console.print(f"[cyan]Stationary solutions for lambda={value} (branches available: {available})[/cyan]")

        solutions = enumerate_solutions(value, max_count, nmax)
        if not solutions:
            console.print("[yellow]Warning: no nontrivial stationary solutions[/yellow]")

        physical = config.physical
        branch_columns = ["label", "branch_n", "kind", "modulus", "wavenumber", "amplitude", "phase", "energy"]
        branch_rows = []
        for s in solutions:
            b = s.branch
            row = [s.label, b.branch_n, b.kind.value, b.modulus, b.wavenumber, b.amplitude, b.phase, s.energy]
            if physical is not None:
                row.append(to_physical_energy(s.energy, physical))
            branch_rows.append(row)
        if physical is not None:
            branch_columns.append("energy_physical")

        coeff_columns = ["n"] + [f"S_{s.label}" for s in solutions]
        coeff_rows = [[n] + [s.coefficients.values[n - 1] for s in solutions] for n in range(1, nmax + 1)]

        writer = _writer("stationary", config, out, lam=value)
        summary: Dict[str, Any] = {
            "lambda": value,
            "branches_available": available,
            "count": len(solutions),
            "energies": [s.energy for s in solutions],
            "moduli": [s.branch.modulus for s in solutions],
            "trivial_energy": trivial_energy(value),
        }
        if output_format is OutputFormat.csv:
            writer.write_csv("stationary_branches.csv", branch_columns, branch_rows)
            writer.write_csv("stationary_coefficients.csv", coeff_columns, coeff_rows)
        else:
            summary["branch_columns"] = branch_columns
            summary["branch_rows"] = branch_rows
            summary["coefficients"] = {f"S_{s.label}": s.coefficients.values for s in solutions}

        if profiles and solutions:
            columns, arrays = ["xi"], []
            for s in solutions:
                u, du = branch_profile(s.branch, grid)
                if not arrays:
                    arrays.append(np.asarray(u.xi))
                columns += [f"u_{s.label}", f"du_{s.label}"]
                arrays += [np.asarray(u.values), np.asarray(du.values)]
            if physical is not None:
                columns.append("x")
                arrays.append(to_physical_coordinate(arrays[0], physical.ell))
                for s in solutions:
                    columns.append(f"phi_{s.label}")
                    arrays.append(to_physical_field(arrays[columns.index(f"u_{s.label}")], physical))
            writer.write_csv("stationary_profiles.csv", columns, np.column_stack(arrays).tolist())

        writer.write_json("stationary_summary.json", summary)
        for s in solutions:
            console.print(
                f"[green]{s.label}: n={s.branch.branch_n} {s.branch.kind.value} "
                f"modulus={s.branch.modulus:.6f} energy={s.energy:.6f}[/green]"
            )
        return {"count": len(solutions), "energies": summary["energies"]}

    _execute("stationary", parameters, body)


def _initial_state(init: str, init_velocity: Optional[str], N: int):
    if Path(init).is_file():
        u0 = read_field(init)
        if init_velocity:
            v0 = read_field(init_velocity)
        else:
            v0 = GridFunction(xi=u0.xi, values=[0.0] * len(u0.xi))
        return cauchy_from_field(u0, v0, N)
    if init_velocity:
        raise InputFormatError("--init-velocity only applies to sampled-field initial data")
    return resize_state(parse_coefficient_spec(init), N)


@app.command()
def evolve(
    lam: Optional[float] = LambdaOption,
    beta: Optional[float] = BetaOption,
    phi0: Optional[float] = Phi0Option,
    ell: Optional[float] = EllOption,
    n: int = typer.Option(10, "--n", help="Number of particles N"),
    init: str = typer.Option(..., "--init", help="'A=...;V=...' or a (xi,value) CSV file"),
    init_velocity: Optional[str] = typer.Option(None, "--init-velocity", help="(xi,value) CSV of the initial velocity"),
    tmax: float = typer.Option(10.0, "--tmax", help="Final dimensionless time"),
    dt: float = typer.Option(1e-3, "--dt", help="Time step"),
    sample_every: int = typer.Option(10, "--sample-every", help="Record every k-th step"),
    snapshot_grid: int = typer.Option(0, "--snapshot-grid", help="Write the final field on this many points"),
    out: Optional[str] = OutOption,
    output_format: OutputFormat = FormatOption,
) -> None:
    """
    Integrate the truncated N-particle system from given initial data
    """
    parameters = {"lambda": lam, "beta": beta, "phi0": phi0, "ell": ell, "n": n, "init": init, "tmax": tmax, "dt": dt}

    def body() -> Dict[str, Any]:
        config = _config(lam=lam, beta=beta, phi0=phi0, ell=ell, N=n, dt=dt, tau_end=tmax, output_format=output_format)
        value = _lambda(config)
        s0 = _initial_state(init, init_velocity, n)
        console.print(f"[cyan]Evolving N={n} particles, lambda={value}, tau in [0, {tmax}] with dt={dt}[/cyan]")
        trajectory = integrate(s0, value, tmax, dt, sample_every)

        writer = _writer("evolve", config, out, lam=value, init=init, sample_every=sample_every)
        columns = ["tau"] + [f"A_{i}" for i in range(1, n + 1)] + [f"V_{i}" for i in range(1, n + 1)] + ["H"]
        rows = [[s.tau] + s.A + s.V + [h] for s, h in zip(trajectory.samples, trajectory.hamiltonian_series)]
        final = trajectory.final
        summary: Dict[str, Any] = {
            "lambda": value,
            "N": n,
            "samples": len(trajectory.samples),
            "H_initial": trajectory.hamiltonian_series[0],
            "H_final": trajectory.hamiltonian_series[-1],
            "energy_drift": trajectory.energy_drift(),
            "final_tau": final.tau,
            "final_A": final.A,
            "final_V": final.V,
        }
        if config.physical is not None:
            summary["final_t"] = float(to_physical_time(final.tau, config.physical.ell))
        if output_format is OutputFormat.csv:
            writer.write_csv("trajectory.csv", columns, rows)
        else:
            summary["trajectory_columns"] = columns
            summary["trajectory"] = rows
        if snapshot_grid:
            snapshot = field_snapshot(final, snapshot_grid)
            writer.write_csv("snapshot.csv", ["xi", "u"], zip(snapshot.xi, snapshot.values))
        writer.write_json("evolve_summary.json", summary)
        console.print(f"[green]Reached tau={final.tau:.6g}, energy drift {summary['energy_drift']:.3e}[/green]")
        return {"energy_drift": summary["energy_drift"], "final_tau": final.tau}

    _execute("evolve", parameters, body)


def _landscape_rows(value: float, half_range: float, resolution: int):
    axis = landscape_axes((-half_range, half_range), resolution)
    grid = landscape_grid(value, (-half_range, half_range), (-half_range, half_range), resolution)
    return [[a1, a3, grid[i, j]] for i, a1 in enumerate(axis) for j, a3 in enumerate(axis)]


@app.command()
def critical(
    lam: Optional[float] = LambdaOption,
    beta: Optional[float] = BetaOption,
    phi0: Optional[float] = Phi0Option,
    ell: Optional[float] = EllOption,
    n: int = typer.Option(5, "--n", help="Number of particles N"),
    points: int = typer.Option(3, "--points", help="Number of nontrivial critical points"),
    seed: int = typer.Option(12345, "--seed", help="Seed of the random Newton starts"),
    draws: int = typer.Option(200, "--draws", help="Number of random Newton starts"),
    landscape: bool = typer.Option(False, "--landscape", help="Also write the A2 = 0 slice of U^(3)"),
    half_range: float = typer.Option(4.0, "--range", help="Landscape half-width"),
    resolution: int = typer.Option(101, "--resolution", help="Landscape points per axis"),
    out: Optional[str] = OutOption,
    output_format: OutputFormat = FormatOption,
) -> None:
    """
    Critical points of the truncated potential, ordered by |U|
    """
    parameters = {"lambda": lam, "beta": beta, "phi0": phi0, "ell": ell, "n": n, "points": points, "seed": seed}

    def body() -> Dict[str, Any]:
        config = _config(lam=lam, beta=beta, phi0=phi0, ell=ell, N=n, seed=seed, output_format=output_format)
        value = _lambda(config)
        console.print(f"[cyan]Searching critical points of U^({n}) for lambda={value}[/cyan]")
        found = find_critical_points(n, value, points, seed=seed, draws=draws)
        trivial = trivial_critical_point(n, value)

        writer = _writer("critical", config, out, lam=value, draws=draws)
        columns = (
            ["label", "U", "classification"]
            + [f"A_{i}" for i in range(1, n + 1)]
            + [f"eig_{i}" for i in range(1, n + 1)]
        )
        rows = [[p.label_i, p.U_value, p.classification.value] + p.A + p.hessian_eigenvalues for p in found]
        summary: Dict[str, Any] = {
            "lambda": value,
            "N": n,
            "count": len(found),
            "U_values": [p.U_value for p in found],
            "classifications": [p.classification.value for p in found],
            "trivial_U": trivial.U_value,
            "trivial_classification": trivial.classification.value,
        }
        if output_format is OutputFormat.csv:
            writer.write_csv("critical_points.csv", columns, rows)
        else:
            summary["points_columns"] = columns
            summary["points"] = rows
        if landscape:
            writer.write_csv("landscape.csv", ["A1", "A3", "U"], _landscape_rows(value, half_range, resolution))
        writer.write_json("critical_summary.json", summary)
        for p in found:
            console.print(f"[green]{p.label_i}: U={p.U_value:.6f} {p.classification.value}[/green]")
        return {"count": len(found), "U_values": summary["U_values"]}

    _execute("critical", parameters, body)


@app.command("landscape")
def landscape_command(
    lam: Optional[float] = LambdaOption,
    beta: Optional[float] = BetaOption,
    phi0: Optional[float] = Phi0Option,
    ell: Optional[float] = EllOption,
    half_range: float = typer.Option(4.0, "--range", help="Half-width of the (A1, A3) window"),
    resolution: int = typer.Option(101, "--resolution", help="Points per axis"),
    out: Optional[str] = OutOption,
) -> None:
    """
    Potential U^(3) on the A2 = 0 plane, long CSV format
    """
    parameters = {"lambda": lam, "range": half_range, "resolution": resolution}

    def body() -> Dict[str, Any]:
        config = _config(lam=lam, beta=beta, phi0=phi0, ell=ell, N=3, grid=resolution)
        value = _lambda(config)
        rows = _landscape_rows(value, half_range, resolution)
        writer = _writer("landscape", config, out, lam=value, range=half_range)
        writer.write_csv("landscape.csv", ["A1", "A3", "U"], rows)
        values = [r[2] for r in rows]
        console.print(f"[green]Landscape min {min(values):.6f}, max {max(values):.6f}[/green]")
        return {"min": min(values), "max": max(values)}

    _execute("landscape", parameters, body)


@app.command()
def residual(
    state: str = typer.Option(..., "--state", help="'A=...;V=...', an evolve JSON summary or a trajectory CSV"),
    n: Optional[int] = typer.Option(None, "--n", help="Number of particles N (default: length of the state)"),
    grid: Optional[int] = typer.Option(None, "--grid", help="Grid points (default 48 N + 1)"),
    out: Optional[str] = OutOption,
    output_format: OutputFormat = FormatOption,
) -> None:
    """
    Local and total Galerkin residual of a truncated state
    """
    parameters = {"state": state, "n": n, "grid": grid}

    def body() -> Dict[str, Any]:
        s = read_state(state) if Path(state).is_file() else parse_coefficient_spec(state)
        N = n or s.N
        s = resize_state(s, N)
        points = grid or default_grid(N)
        config = _config(parameter_free=True, N=N, grid=points, output_format=output_format)
        report = residual_report(s, points)

        writer = _writer("residual", config, out, state=state)
        summary = {"N": N, "tau": report.tau, "grid": points, "total": report.total}
        if output_format is OutputFormat.csv:
            writer.write_csv("residual_local.csv", ["xi", "R_local"], zip(report.local.xi, report.local.values))
        else:
            summary["xi"] = report.local.xi
            summary["R_local"] = report.local.values
        writer.write_json("residual_summary.json", summary)
        console.print(f"[green]Total residual R({N}) = {report.total:.10g}[/green]")
        return {"total": report.total}

    _execute("residual", parameters, body)


@app.command()
def tensor(
    max_index: int = typer.Option(8, "--max-index", help="Largest mode index"),
    out: Optional[str] = OutOption,
) -> None:
    """
    Dump the nonzero couplings D_nmpq with n <= m <= p <= q <= max-index
    """
    parameters = {"max_index": max_index}

    def body() -> Dict[str, Any]:
        if max_index < 1:
            raise DomainError("--max-index must be at least 1")
        table = COUPLING.dense(max_index)
        idx = np.argwhere(table != 0)
        rows = [
            [int(a) + 1, int(b) + 1, int(c) + 1, int(d) + 1, float(table[a, b, c, d])]
            for a, b, c, d in idx
            if a <= b <= c <= d
        ]
        config = _config(parameter_free=True, N=max_index)
        writer = _writer("tensor", config, out)
        writer.write_csv("tensor.csv", ["n", "m", "p", "q", "D"], rows)
        console.print(f"[green]{len(rows)} nonzero couplings up to index {max_index}[/green]")
        return {"nonzero": len(rows)}

    _execute("tensor", parameters, body)


if __name__ == "__main__":
    app()
