"""Monte-Carlo experiment driver.

Each trial draws an independent seeded stream of target-free snapshots,
feeds the same stream to every configured filter, and records the output
SINR of each filter's effective full-dimension weight after every snapshot,
evaluated against the known (clairvoyant) covariance.  Traces are averaged
across trials in the dB domain; detection curves are built from each trial's
final SINR and averaged with their standard error.

Trials are independent (own filter states, own counter-derived RNG streams)
and may run on worker threads; aggregation always happens in trial order, so
results are bit-identical for any worker count.
"""

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import baselines, metrics
from .abfa import AbfaRlsFilter, AbfaSgFilter, FilterDivergence, SidelobeCanceller, build_basis_bank
from .scene import RadarScenario, assemble_covariance, draw_interference, target_steering

DEFAULT_PD_GRID_DB = np.linspace(-10.0, 10.0, 41)
DEFAULT_REFIT_INTERVAL = 25


@dataclass
class AlgorithmSpec:
    """One configured filter: a recognised name plus its hyperparameters."""

    name: str
    params: dict = field(default_factory=dict)


@dataclass
class ExperimentConfig:
    scenario: RadarScenario
    algorithms: list
    num_trials: int = 100
    snapshot_count: int = 1000
    base_seed: int = 20080317
    pfa: float = 1e-10
    snr_db: float = 0.0
    output_dir: Path = Path("results")
    pd_grid_db: np.ndarray = field(default_factory=lambda: DEFAULT_PD_GRID_DB.copy())
    workers: int = 1

    def __post_init__(self):
        if self.num_trials < 1:
            raise ValueError("num_trials must be at least 1")
        if self.snapshot_count < 1:
            raise ValueError("snapshot_count must be at least 1")
        if not 0.0 < self.pfa < 1.0:
            raise ValueError("pfa must lie in (0, 1)")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")
        self.output_dir = Path(self.output_dir)
        self.pd_grid_db = np.asarray(self.pd_grid_db, dtype=float)

    @property
    def target_power(self) -> float:
        """Target power for SINR evaluation; snr_db is per element, so the
        unit-norm steering convention scales it by the full dimension."""
        return self.scenario.dim * self.scenario.noise_power * 10.0 ** (self.snr_db / 10.0)


@dataclass
class RunResult:
    algorithms: list
    snapshot_count: int
    num_trials: int
    base_seed: int
    optimum_sinr_db: float
    sinr_db: dict
    sinr_rel_db: dict
    final_sinr_db: dict
    trial_final_sinr: dict
    pd_grid_db: np.ndarray
    pd: dict
    pd_stderr: dict
    complexity: list
    duration_seconds: float


class _RecursiveRunner:
    """Per-snapshot adaptive filter (gradient or recursive least squares)."""

    def __init__(self, filt):
        self.filter = filt

    def process(self, snapshot):
        self.filter.step(snapshot)

    def finalize(self):
        pass

    def weight(self):
        return self.filter.full_weight()


class _SmiRunner:
    """Sample-matrix-inversion weight, refit on a fixed snapshot schedule."""

    def __init__(self, steering, dim, loading, refit_interval):
        self.state = baselines.SampleCovariance(dim, diagonal_loading=loading)
        self.steering = steering
        self.refit_interval = refit_interval
        self._weight = np.asarray(steering.entries, dtype=complex)
        self._fitted_at = 0

    def _ready(self):
        # a loading-free estimate is singular below full rank
        return self.state.diagonal_loading > 0.0 or self.state.count >= self.state.dim

    def _refit(self):
        self._weight = baselines.smi_weight(self.state, self.steering)
        self._fitted_at = self.state.count

    def process(self, snapshot):
        self.state.update(snapshot)
        if self._ready() and self.state.count % self.refit_interval == 0:
            self._refit()

    def finalize(self):
        if self._ready() and self.state.count > self._fitted_at:
            self._refit()

    def weight(self):
        return self._weight


class _BatchRunner:
    """Block-trained filter (multistage or auxiliary-vector), refit on a
    fixed snapshot schedule over all data seen so far."""

    def __init__(self, steering, rank, refit_interval, trainer, weight_fn):
        self.steering = steering
        self.rank = rank
        self.refit_interval = refit_interval
        self.trainer = trainer
        self.weight_fn = weight_fn
        self.rows = []
        self._weight = np.asarray(steering.entries, dtype=complex)
        self._fitted_at = 0

    def _refit(self):
        block = np.asarray(self.rows)
        state = self.trainer(block, self.steering, self.rank)
        self._weight = self.weight_fn(state)
        self._fitted_at = len(self.rows)

    def process(self, snapshot):
        self.rows.append(snapshot)
        count = len(self.rows)
        if count >= self.rank and count % self.refit_interval == 0:
            self._refit()

    def finalize(self):
        count = len(self.rows)
        if count >= self.rank and count > self._fitted_at:
            self._refit()

    def weight(self):
        return self._weight


def _build_runner(spec: AlgorithmSpec, front: SidelobeCanceller, dim: int):
    params = dict(spec.params)
    name = spec.name

    def take(key, default=None):
        value = params.pop(key, default)
        if value is None:
            raise ValueError(f"{name} requires parameter {key!r}")
        return value

    if name == "abfa-sg":
        rank = int(take("rank", 4))
        bank = build_basis_bank(dim, rank, int(take("num_banks", dim // rank)))
        runner = _RecursiveRunner(
            AbfaSgFilter(front, bank, float(take("mu")), float(take("guard", 1e6)))
        )
    elif name == "abfa-rls":
        rank = int(take("rank", 4))
        bank = build_basis_bank(dim, rank, int(take("num_banks", dim // rank)))
        runner = _RecursiveRunner(
            AbfaRlsFilter(
                front,
                bank,
                float(take("lambda", 0.9998)),
                float(take("delta", 0.01)),
                float(take("guard", 1e6)),
            )
        )
    elif name == "full-rank-sg":
        runner = _RecursiveRunner(
            baselines.full_rank_sg(front, float(take("mu")), float(take("guard", 1e6)))
        )
    elif name == "full-rank-rls":
        runner = _RecursiveRunner(
            baselines.full_rank_rls(
                front,
                float(take("lambda", 0.9998)),
                float(take("delta", 0.01)),
                float(take("guard", 1e6)),
            )
        )
    elif name == "smi":
        runner = _SmiRunner(
            front.steering,
            dim,
            float(take("loading", 0.0)),
            int(take("refit_interval", DEFAULT_REFIT_INTERVAL)),
        )
    elif name == "mswf":
        runner = _BatchRunner(
            front.steering,
            int(take("rank", 4)),
            int(take("refit_interval", DEFAULT_REFIT_INTERVAL)),
            baselines.mswf_train,
            baselines.mswf_weight,
        )
    elif name == "avf":
        runner = _BatchRunner(
            front.steering,
            int(take("rank", 4)),
            int(take("refit_interval", DEFAULT_REFIT_INTERVAL)),
            baselines.avf_train,
            baselines.avf_weight,
        )
    else:
        raise ValueError(f"unknown algorithm {name!r}")
    if params:
        raise ValueError(f"unused parameters for {name}: {sorted(params)}")
    return runner


def validate_config(config: ExperimentConfig) -> None:
    """Build every configured runner once so bad hyperparameters fail early."""
    front = SidelobeCanceller(target_steering(config.scenario))
    for spec in config.algorithms:
        _build_runner(spec, front, config.scenario.dim)


def _trial_rng(base_seed: int, trial: int) -> np.random.Generator:
    """Independent per-trial stream from one 64-bit seed (counter-derived)."""
    return np.random.default_rng(np.random.SeedSequence(entropy=base_seed, spawn_key=(trial,)))


def _run_trial(config, cov, steering, trial):
    rng = _trial_rng(config.base_seed, trial)
    data = draw_interference(cov, config.snapshot_count, rng)
    front = SidelobeCanceller(steering)
    dim = cov.dim
    runners = [(spec.name, _build_runner(spec, front, dim)) for spec in config.algorithms]
    total = cov.total
    target_power = config.target_power
    traces = {name: np.empty(config.snapshot_count) for name, _ in runners}
    for index in range(config.snapshot_count):
        snapshot = data[index]
        for name, runner in runners:
            try:
                runner.process(snapshot)
            except FilterDivergence as exc:
                raise FilterDivergence(
                    f"algorithm {name!r} diverged in trial {trial} at snapshot "
                    f"{index + 1}: {exc}"
                ) from exc
            traces[name][index] = metrics.output_sinr(
                runner.weight(), total, steering, target_power
            )
    finals = {}
    for name, runner in runners:
        runner.finalize()
        final_db = metrics.output_sinr(runner.weight(), total, steering, target_power)
        traces[name][-1] = final_db
        finals[name] = 10.0 ** (final_db / 10.0)
    return traces, finals


def run_experiment(config: ExperimentConfig) -> RunResult:
    """Run all trials and aggregate traces, detection curves and counts."""
    started = time.perf_counter()
    names = [spec.name for spec in config.algorithms]
    if len(set(names)) != len(names):
        raise ValueError("algorithm names must be unique within one experiment")
    cov = assemble_covariance(config.scenario)
    steering = target_steering(config.scenario)
    optimum_db = metrics.optimum_sinr(cov, steering, config.target_power)

    trials = range(config.num_trials)
    if config.workers > 1 and config.num_trials > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            outcomes = list(pool.map(lambda t: _run_trial(config, cov, steering, t), trials))
    else:
        outcomes = [_run_trial(config, cov, steering, t) for t in trials]

    sinr_db = {}
    sinr_rel_db = {}
    final_sinr_db = {}
    trial_final = {}
    for name in names:
        stacked = np.vstack([traces[name] for traces, _ in outcomes])
        mean_db = stacked.mean(axis=0)
        sinr_db[name] = mean_db
        sinr_rel_db[name] = mean_db - optimum_db
        final_sinr_db[name] = float(mean_db[-1])
        trial_final[name] = np.array([finals[name] for _, finals in outcomes])

    beta = metrics.pfa_to_beta(config.pfa)
    grid = config.pd_grid_db
    pd_mean = {}
    pd_stderr = {}
    for name in names:
        curves = np.empty((config.num_trials, grid.size))
        for row, final_linear in enumerate(trial_final[name]):
            for col, offset_db in enumerate(grid):
                rho = np.sqrt(10.0 ** (offset_db / 10.0) * final_linear)
                curves[row, col] = metrics.prob_detection(rho, beta)
        pd_mean[name] = curves.mean(axis=0)
        if config.num_trials > 1:
            pd_stderr[name] = curves.std(axis=0, ddof=1) / np.sqrt(config.num_trials)
        else:
            pd_stderr[name] = np.zeros(grid.size)

    complexity = []
    for spec in config.algorithms:
        rank = spec.params.get("rank")
        banks = spec.params.get("num_banks")
        if spec.name in ("abfa-sg", "abfa-rls"):
            complexity.append(metrics.complexity_count(spec.name, cov.dim, rank, banks))
        elif spec.name in ("full-rank-sg", "full-rank-rls"):
            complexity.append(metrics.complexity_count(spec.name, cov.dim))
        elif spec.name == "avf":
            complexity.append(metrics.complexity_count("avf", cov.dim, rank))
        elif spec.name == "mswf":
            # block-trained here; the closed forms cover the recursive variants
            complexity.append(metrics.complexity_count("mswf-sg", cov.dim, rank))
            complexity.append(metrics.complexity_count("mswf-rls", cov.dim, rank))

    return RunResult(
        algorithms=names,
        snapshot_count=config.snapshot_count,
        num_trials=config.num_trials,
        base_seed=config.base_seed,
        optimum_sinr_db=optimum_db,
        sinr_db=sinr_db,
        sinr_rel_db=sinr_rel_db,
        final_sinr_db=final_sinr_db,
        trial_final_sinr=trial_final,
        pd_grid_db=grid,
        pd=pd_mean,
        pd_stderr=pd_stderr,
        complexity=complexity,
        duration_seconds=time.perf_counter() - started,
    )


SINR_CSV = "sinr_trace.csv"
PD_CSV = "pd_curve.csv"


def _fmt(value: float) -> str:
    return f"{value:.12e}"


def emit_csv(result: RunResult, out_dir) -> list:
    """Write the SINR trace and detection-curve files; returns their paths.

    Every float is printed with 13 significant digits so a round trip through
    the file reproduces the values at printed precision.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    sinr_path = out / SINR_CSV
    pd_path = out / PD_CSV

    header = ["snapshot_index"]
    for name in result.algorithms:
        header.append(f"{name}_sinr_db")
        header.append(f"{name}_sinr_rel_db")
    lines = [",".join(header)]
    if result.algorithms:
        for index in range(result.snapshot_count):
            row = [str(index + 1)]
            for name in result.algorithms:
                row.append(_fmt(result.sinr_db[name][index]))
                row.append(_fmt(result.sinr_rel_db[name][index]))
            lines.append(",".join(row))
    sinr_path.write_text("\n".join(lines) + "\n")

    header = ["normalized_sinr_db"]
    header.extend(f"{name}_pd" for name in result.algorithms)
    lines = [",".join(header)]
    if result.algorithms:
        for col, offset_db in enumerate(result.pd_grid_db):
            row = [_fmt(float(offset_db))]
            row.extend(_fmt(result.pd[name][col]) for name in result.algorithms)
            lines.append(",".join(row))
    pd_path.write_text("\n".join(lines) + "\n")
    return [sinr_path, pd_path]
