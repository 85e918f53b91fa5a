"""Single runs and their diagnostic dumps (singular values, |u| at T)."""

import csv
from dataclasses import dataclass, field
import json
import math
from pathlib import Path
import warnings

import numpy as np

from ..exceptions import DegeneracyWarning
from ..flows import SplitStepper, lie_trotter_step
from ..fracgrid import Grid
from ..lowrank import integrate_lowrank, reconstruct, truncate_svd, write_diagnostics_csv
from ..problems import initial_field
from ..reference import reference_solution, relerr, restrict
from .config import FULL

FMT = "{:.4E}"
N_SINGULAR = 60


@dataclass
class RunResult:
    params: object
    grid: Grid
    rank: object
    final: np.ndarray
    steps: list = field(default_factory=list)
    state: object = None

    @property
    def tag(self):
        a, b = self.params.alpha, self.params.beta
        return f"a{a:g}_b{b:g}_n{self.grid.n_x}_m{self.grid.m}_r{self.rank}"


def single_run(params, n, m, rank, *, backend="auto", rk4_substeps=1, track_residual=True):
    """Integrate once, recording per-step singular values.

    For ``rank="full"`` the leading singular values of the dense iterate are
    recorded instead of the factor diagnostics.
    """
    grid = Grid.from_params(params, n, m)
    stepper = SplitStepper.build(params, grid, backend=backend, substeps=rk4_substeps)
    u0 = initial_field(params, grid)
    if rank == FULL:
        u = u0
        steps = []
        for k in range(1, m + 1):
            u = lie_trotter_step(u, stepper)
            sv = np.linalg.svd(u, compute_uv=False)[:N_SINGULAR]
            steps.append((k, k * grid.tau, sv))
        return RunResult(params, grid, rank, u, steps)
    x0, _ = truncate_svd(u0, rank)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegeneracyWarning)
        traj = integrate_lowrank(x0, stepper, m, track_residual=track_residual)
    return RunResult(params, grid, rank, reconstruct(traj.final), traj.diagnostics, traj.final)


def final_singular_values(run):
    sv = np.linalg.svd(run.final, compute_uv=False)
    r_eff = min(sv.size, N_SINGULAR) if run.rank == FULL else min(run.rank, N_SINGULAR)
    return sv[:r_eff]


def dump_diagnostics(run, out_dir):
    """Write step, singular-value, magnitude and coordinate files for one run."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    tag = run.tag
    paths = {}

    paths["steps"] = out / f"{tag}_steps.csv"
    if run.rank == FULL:
        width = max((len(sv) for _, _, sv in run.steps), default=0)
        with open(paths["steps"], "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["step", "t"] + [f"sigma_{i + 1}" for i in range(width)])
            for k, t, sv in run.steps:
                writer.writerow([k, FMT.format(t)] + [FMT.format(s) for s in sv])
    else:
        write_diagnostics_csv(run.steps, paths["steps"], FMT)

    paths["singular_values"] = out / f"{tag}_singular_values.csv"
    with open(paths["singular_values"], "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "sigma"])
        for i, s in enumerate(final_singular_values(run), 1):
            writer.writerow([i, FMT.format(s)])

    paths["magnitude"] = out / f"{tag}_magnitude.csv"
    with open(paths["magnitude"], "w", newline="") as fh:
        writer = csv.writer(fh)
        for row in np.abs(run.final):
            writer.writerow([FMT.format(v) for v in row])

    paths["coords"] = out / f"{tag}_coords.csv"
    with open(paths["coords"], "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["axis", "index", "value"])
        for name, values in (("x", run.grid.x), ("y", run.grid.y)):
            for i, v in enumerate(values, 1):
                writer.writerow([name, i, repr(float(v))])

    paths["meta"] = out / f"{tag}_meta.json"
    meta = {
        "tag": tag,
        "rank": run.rank,
        "n": run.grid.n_x,
        "m": run.grid.m,
        "domain": list(run.grid.domain),
        "h": [run.grid.h_x, run.grid.h_y],
        "params": run.params.to_dict(),
    }
    paths["meta"].write_text(json.dumps(meta, indent=1, sort_keys=True) + "\n")
    return paths


def run_config(cfg, out_dir, *, diagnostics=False, cache_dir=None):
    """Execute a ``single``-mode config; one row per (pair, rank) in ``run.csv``.

    Returns ``(rows, paths)``; each row carries ``error`` when the run failed.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if cache_dir is None:
        cache_dir = out / "cache"
    n, m = cfg.n_values[0], cfg.m_values[0]
    rows, paths = [], []
    for pair in cfg.pairs:
        params = cfg.model_params(*pair)
        ref = None
        if cfg.n_ref is not None and cfg.m_ref is not None:
            ref = restrict(reference_solution(params, cfg.n_ref, cfg.m_ref, cache_dir), cfg.n_ref, n)
        for rank in cfg.ranks:
            row = {"alpha": pair[0], "beta": pair[1], "N": n, "M": m, "rank": rank}
            try:
                run = single_run(params, n, m, rank, backend=cfg.backend,
                                 rk4_substeps=cfg.rk4_substeps, track_residual=diagnostics)
            except Exception as exc:
                row["error"] = f"{type(exc).__name__}: {exc}"
                rows.append(row)
                continue
            row["relerr"] = relerr(run.final, ref) if ref is not None else math.nan
            if rank != FULL and run.steps:
                row["max_cond"] = max(d.cond for d in run.steps)
            if diagnostics:
                paths.extend(dump_diagnostics(run, out).values())
            rows.append(row)
    summary = out / "run.csv"
    with open(summary, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["alpha", "beta", "N", "M", "rank", "relerr", "max_cond", "error"])
        for row in rows:
            writer.writerow([
                row["alpha"], row["beta"], row["N"], row["M"], row["rank"],
                _fmt(row.get("relerr")), _fmt(row.get("max_cond")), row.get("error", ""),
            ])
    return rows, [summary] + paths


def _fmt(v):
    if v is None or not math.isfinite(v):
        return "--"
    return FMT.format(v)
