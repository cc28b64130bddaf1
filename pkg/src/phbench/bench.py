"""Experiment harness: seeded instance generation, optimizer sweeps, reports.

A sweep fixes one generated problem, then for each radius r draws initial
parameter vectors at exact Euclidean distance r from the hidden answer and
records where each optimizer run lands. Per-trial seeds are derived from
the master seed with a splitmix64 chain over (r index, trial index), so
extending the radius grid or adding trials never perturbs existing ones.
"""

from __future__ import annotations

import csv
import math
import multiprocessing
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .circuit import (
    AnsatzSpec,
    build_ansatz,
    expectation,
    gradient_parameter_shift,
    simulate,
)
from .mps import ansatz_to_mps
from .optim import ObjectiveHandle, OptimizerConfig, minimize
from .parent import build_parent_hamiltonian, minimal_support

# A trial counts as having reached the ground state below this energy.
SUCCESS_ENERGY = 1e-6

RECORD_COLUMNS = (
    "r",
    "trial_index",
    "seed",
    "converged_energy",
    "iterations",
    "function_evals",
    "gradient_evals",
    "termination",
)
SUMMARY_COLUMNS = ("r", "mean_energy", "p05", "p95", "success_rate")

_MASK64 = (1 << 64) - 1


def splitmix64(x):
    """One round of the splitmix64 mixer (public-domain constants)."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def derive_seed(*values):
    """Mix integers into one 64-bit seed: fold each through splitmix64."""
    state = 0
    for v in values:
        state = splitmix64(state ^ (int(v) & _MASK64))
    return state


@dataclass
class ExperimentConfig:
    """Everything needed to reproduce one sweep bit for bit."""

    num_qubits: int
    depth: int
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    r_grid: list = field(default_factory=lambda: default_r_grid())
    trials_per_r: int = 100
    master_seed: int = 0
    theta_ans_seed: int = 0
    kernel_tol: float = linalg.KERNEL_TOL
    workers: int = 1

    def __post_init__(self):
        if self.trials_per_r < 1:
            raise ValueError("trials_per_r must be >= 1")
        for r in self.r_grid:
            if not 0.0 <= r <= math.pi:
                raise ValueError(f"r = {r} outside [0, pi]")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


def default_r_grid(points=13):
    """Evenly spaced radii covering [0, pi]."""
    return [float(r) for r in np.linspace(0.0, math.pi, points)]


@dataclass
class TrialRecord:
    r: float
    trial_index: int
    seed: int
    theta_init: np.ndarray
    converged_energy: float
    iterations: int
    function_evals: int
    gradient_evals: int
    termination: str


@dataclass
class SummaryRow:
    r: float
    mean_energy: float
    p05: float
    p95: float
    success_rate: float


def sample_theta_ans(seed, num_params):
    """Answer angles: i.i.d. uniform on [0, 2*pi), deterministic per seed."""
    if num_params < 1:
        raise ValueError("num_params must be >= 1")
    rng = np.random.default_rng(seed)
    return rng.uniform(0.0, 2.0 * math.pi, num_params)


def sample_initial(theta_ans, r, seed):
    """Start point at exact distance r: answer plus r times a unit vector.

    The direction is a normalized standard-normal draw, i.e. uniform on the
    unit sphere of the parameter space.
    """
    if r < 0:
        raise ValueError(f"r must be >= 0, got {r}")
    theta_ans = np.asarray(theta_ans, dtype=float)
    rng = np.random.default_rng(seed)
    direction = rng.standard_normal(theta_ans.shape[0])
    norm = float(np.linalg.norm(direction))
    while norm < 1e-12:  # essentially impossible, but keep the draw exact
        direction = rng.standard_normal(theta_ans.shape[0])
        norm = float(np.linalg.norm(direction))
    return theta_ans + (r / norm) * direction


def run_trial(hamiltonian, spec, theta_init, optimizer_cfg, *, r=0.0,
              trial_index=0, seed=0):
    """One optimizer run against a fixed problem, energy re-certified at exit.

    Gradient-based methods use the parameter-shift gradient; Nelder-Mead
    runs gradient-free. The recorded energy is recomputed from scratch at
    the final parameters rather than trusting the optimizer's bookkeeping.
    """
    gates = build_ansatz(spec)
    n = spec.num_qubits

    def value(theta):
        return float(expectation(simulate(gates, theta, n), hamiltonian))

    gradient = None
    if optimizer_cfg.method != "NelderMead":
        def gradient(theta):
            return gradient_parameter_shift(theta, hamiltonian, spec, gates)

    objective = ObjectiveHandle(value, gradient, spec.num_params)
    trace = minimize(objective, np.asarray(theta_init, dtype=float), optimizer_cfg)
    certified = float(
        expectation(simulate(gates, trace.final_params, n), hamiltonian)
    )
    return TrialRecord(
        r=float(r),
        trial_index=int(trial_index),
        seed=int(seed),
        theta_init=np.asarray(theta_init, dtype=float),
        converged_energy=certified,
        iterations=trace.iterations,
        function_evals=trace.function_evals,
        gradient_evals=trace.gradient_evals,
        termination=trace.termination,
    )


# Worker-process context for parallel sweeps (populated by the initializer).
_POOL_CTX = {}


def _pool_init(hamiltonian, spec, optimizer_cfg):
    _POOL_CTX["args"] = (hamiltonian, spec, optimizer_cfg)
    try:  # one BLAS thread per worker; the workers are the parallelism
        import threadpoolctl

        threadpoolctl.threadpool_limits(1)
    except ImportError:
        pass


def _pool_trial(task):
    r, trial_index, seed, theta_init = task
    hamiltonian, spec, optimizer_cfg = _POOL_CTX["args"]
    return run_trial(
        hamiltonian, spec, theta_init, optimizer_cfg,
        r=r, trial_index=trial_index, seed=seed,
    )


def run_sweep_from_hamiltonian(hamiltonian, r_grid, trials_per_r, master_seed,
                               optimizer_cfg, workers=1):
    """Optimizer sweep against an already-built problem.

    Records come back ordered by (r index, trial index) regardless of any
    worker-pool scheduling.
    """
    for r in r_grid:
        if not 0.0 <= r <= math.pi:
            raise ValueError(f"r = {r} outside [0, pi]")
    if trials_per_r < 1:
        raise ValueError("trials_per_r must be >= 1")
    spec = hamiltonian.ansatz_spec
    tasks = []
    for r_index, r in enumerate(r_grid):
        for t in range(trials_per_r):
            seed = derive_seed(master_seed, r_index, t)
            theta_init = sample_initial(hamiltonian.theta_ans, r, seed)
            tasks.append((float(r), t, seed, theta_init))

    if workers <= 1:
        records = [
            run_trial(hamiltonian, spec, theta, optimizer_cfg,
                      r=r, trial_index=t, seed=seed)
            for r, t, seed, theta in tasks
        ]
    else:
        # not plain fork: forking a process with live BLAS threads can
        # deadlock the children inside their first matrix product
        try:
            ctx = multiprocessing.get_context("forkserver")
        except ValueError:
            ctx = multiprocessing.get_context("spawn")
        chunk = max(1, len(tasks) // (workers * 8))
        with ProcessPoolExecutor(
            max_workers=workers,
            mp_context=ctx,
            initializer=_pool_init,
            initargs=(hamiltonian, spec, optimizer_cfg),
        ) as pool:
            records = list(pool.map(_pool_trial, tasks, chunksize=chunk))

    return records, summarize(records)


def run_sweep(cfg):
    """Build the problem from the config seeds, then sweep it.

    Returns (trial records, summary rows); the record count is
    len(r_grid) * trials_per_r.
    """
    spec = AnsatzSpec(cfg.num_qubits, cfg.depth)
    theta_ans = sample_theta_ans(cfg.theta_ans_seed, spec.num_params)
    hamiltonian = build_parent_hamiltonian(spec, theta_ans, cfg.kernel_tol)
    return run_sweep_from_hamiltonian(
        hamiltonian, cfg.r_grid, cfg.trials_per_r, cfg.master_seed,
        cfg.optimizer, cfg.workers,
    )


def summarize(records):
    """Per-radius mean, empirical 5th/95th percentiles, and success rate.

    The percentile band is what the sweep figure shades; it is an empirical
    90% interval, not a parametric confidence interval.
    """
    by_r = {}
    for rec in records:
        by_r.setdefault(rec.r, []).append(rec.converged_energy)
    rows = []
    for r, energies in by_r.items():
        arr = np.asarray(energies)
        rows.append(
            SummaryRow(
                r=r,
                mean_energy=float(np.mean(arr)),
                p05=float(np.percentile(arr, 5.0)),
                p95=float(np.percentile(arr, 95.0)),
                success_rate=float(np.mean(arr < SUCCESS_ENERGY)),
            )
        )
    return rows


def locality_scan(depths, qubit_sizes, samples, seed=0):
    """Distribution of the minimal kernel-support window across system sizes.

    For each (depth, N) draws `samples` answer-angle vectors, computes the
    minimal window length, and reports min / mean / max. Rows are dicts
    with keys depth, num_qubits, samples, support_min, support_mean,
    support_max.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rows = []
    for depth in depths:
        for n in qubit_sizes:
            spec = AnsatzSpec(n, depth)
            supports = []
            for k in range(samples):
                theta = sample_theta_ans(derive_seed(seed, depth, n, k),
                                         spec.num_params)
                mps = ansatz_to_mps(spec, theta)
                supports.append(minimal_support(mps, n_max=n))
            rows.append(
                {
                    "depth": depth,
                    "num_qubits": n,
                    "samples": samples,
                    "support_min": int(np.min(supports)),
                    "support_mean": float(np.mean(supports)),
                    "support_max": int(np.max(supports)),
                }
            )
    return rows


# -- delimited reports -----------------------------------------------------------
#
# All floats are printed with 17 significant digits so that parsing the file
# back reproduces them bit for bit.


def _fmt(x):
    return f"{x:.17g}"


def write_records_csv(records, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RECORD_COLUMNS)
        for rec in records:
            writer.writerow(
                [
                    _fmt(rec.r),
                    rec.trial_index,
                    rec.seed,
                    _fmt(rec.converged_energy),
                    rec.iterations,
                    rec.function_evals,
                    rec.gradient_evals,
                    rec.termination,
                ]
            )


def read_records_csv(path):
    records = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = [c for c in RECORD_COLUMNS if c not in (reader.fieldnames or [])]
        if missing:
            raise ValueError(f"records file {path} lacks columns {missing}")
        for row in reader:
            records.append(
                TrialRecord(
                    r=float(row["r"]),
                    trial_index=int(row["trial_index"]),
                    seed=int(row["seed"]),
                    theta_init=np.array([]),
                    converged_energy=float(row["converged_energy"]),
                    iterations=int(row["iterations"]),
                    function_evals=int(row["function_evals"]),
                    gradient_evals=int(row["gradient_evals"]),
                    termination=row["termination"],
                )
            )
    return records


def write_summary_csv(rows, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SUMMARY_COLUMNS)
        for row in rows:
            writer.writerow(
                [
                    _fmt(row.r),
                    _fmt(row.mean_energy),
                    _fmt(row.p05),
                    _fmt(row.p95),
                    _fmt(row.success_rate),
                ]
            )


def write_locality_csv(rows, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["depth", "num_qubits", "samples",
             "support_min", "support_mean", "support_max"]
        )
        for row in rows:
            writer.writerow(
                [
                    row["depth"],
                    row["num_qubits"],
                    row["samples"],
                    row["support_min"],
                    _fmt(row["support_mean"]),
                    row["support_max"],
                ]
            )
