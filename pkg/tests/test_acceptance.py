"""End-to-end acceptance checks for the simulator.

Each test prints one PASS/FAIL line.  Two checks (the convergence experiment
and the detection-curve ordering) encode performance targets that the
configured scenario provably cannot meet; they run faithfully and report the
measured numbers rather than being loosened to pass.
"""

import math
import time

import numpy as np
import pytest
from scipy.special import i0e

from stapsim.abfa import (
    AbfaRlsFilter,
    AbfaSgFilter,
    FilterDivergence,
    SidelobeCanceller,
    build_basis_bank,
    effective_full_weight,
)
from stapsim.baselines import full_rank_rls, full_rank_sg
from stapsim.cli import cli_main
from stapsim.harness import AlgorithmSpec, ExperimentConfig, emit_csv, run_experiment
from stapsim.metrics import optimum_sinr, output_sinr, pfa_to_beta, prob_detection
from stapsim.scene import (
    RadarScenario,
    SteeringVector,
    assemble_covariance,
    clutter_covariance,
    draw_interference,
    target_steering,
)

TARGET_POWER = 64.0  # 0 dB per-element SNR at unit noise for the default scenario


def _report(label, detail=""):
    suffix = f" ({detail})" if detail else ""
    print(f"[PASS] {label}{suffix}")


def test_criterion_1_complexity_regression(capsys):
    started = time.perf_counter()
    code = cli_main(["complexity", "--M", "64", "--D", "4", "--B", "16"])
    elapsed = time.perf_counter() - started
    out = capsys.readouterr().out
    assert code == 0
    for value in ("21380", "21456", "66822", "4316", "4238"):
        assert value in out, f"missing count {value} in output"
    assert "4233" in out, "count discrepancy note missing from output"
    assert elapsed < 1.0
    with capsys.disabled():
        _report("criterion 1: complexity counts", f"{elapsed * 1e3:.0f} ms")


def test_criterion_2_blocking_and_distortionless():
    started = time.perf_counter()
    rng = np.random.default_rng(2024)
    dim = 64
    bank = build_basis_bank(dim, 4, 16)
    for _ in range(1000):
        vec = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        vec /= np.linalg.norm(vec)
        front = SidelobeCanceller(SteeringVector(entries=vec, look_azimuth=0.0, look_doppler=0.0))
        snap = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        leak = abs(np.vdot(vec, front.block(snap)))
        assert leak <= 1e-12 * np.linalg.norm(snap)
        weight = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        branch = int(rng.integers(16))
        full = effective_full_weight(front, bank, weight, branch)
        assert abs(np.vdot(full, vec) - 1.0) <= 1e-12
    elapsed = time.perf_counter() - started
    assert elapsed < 1.0
    _report("criterion 2: blocking and unit response", f"1000 pairs, {elapsed * 1e3:.0f} ms")


def test_criterion_3_rls_matches_batch_solve():
    started = time.perf_counter()
    scenario = RadarScenario()
    cov = assemble_covariance(scenario)
    steer = target_steering(scenario)
    front = SidelobeCanceller(steer)
    bank = build_basis_bank(64, 4, 1)
    filt = AbfaRlsFilter(front, bank, forgetting=1.0, delta=0.01)
    data = draw_interference(cov, 200, np.random.default_rng(31))
    for snap in data:
        filt.step(snap)
    beams = data @ np.conj(steer.entries)
    blocked = data - np.outer(beams, steer.entries)
    reduced = blocked[:, bank.index_table[0]]
    batch = np.linalg.solve(reduced.T @ reduced.conj(), reduced.T @ np.conj(beams))
    rel = np.linalg.norm(filt.weight - batch) / np.linalg.norm(batch)
    elapsed = time.perf_counter() - started
    assert rel <= 1e-6
    assert elapsed < 1.0
    _report("criterion 3: recursive vs batch least squares", f"rel err {rel:.2e}")


def test_criterion_4_full_rank_structural_equivalence():
    scenario = RadarScenario()
    cov = assemble_covariance(scenario)
    steer = target_steering(scenario)
    data = draw_interference(cov, 100, np.random.default_rng(41))

    front = SidelobeCanceller(steer)
    bank = build_basis_bank(64, 64, 1)
    mu = 1e-7
    reduced_sg = AbfaSgFilter(front, bank, step_size=mu)
    plain_sg = full_rank_sg(front, step_size=mu)
    reduced_rls = AbfaRlsFilter(front, bank, forgetting=0.9998, delta=0.01)
    plain_rls = full_rank_rls(front, forgetting=0.9998, delta=0.01)

    worst_sg = 0.0
    worst_rls = 0.0
    for snap in data:
        reduced_sg.step(snap)
        plain_sg.step(snap)
        reduced_rls.step(snap)
        plain_rls.step(snap)
        scale_sg = max(np.linalg.norm(plain_sg.weight), 1e-300)
        scale_rls = max(np.linalg.norm(plain_rls.weight), 1e-300)
        worst_sg = max(worst_sg, np.linalg.norm(reduced_sg.weight - plain_sg.weight) / scale_sg)
        worst_rls = max(
            worst_rls, np.linalg.norm(reduced_rls.weight - plain_rls.weight) / scale_rls
        )
    assert worst_sg <= 1e-12
    assert worst_rls <= 1e-12
    _report(
        "criterion 4: reduced filter at full rank equals plain recursions",
        f"max dev sg {worst_sg:.1e}, rls {worst_rls:.1e}",
    )


def _tail_table(rhos, betas, points_per_row):
    """Trapezoid oracle on a shared fine grid per rho (>1e6 points per pair)."""
    table = np.empty((rhos.size, betas.size))
    for row, rho in enumerate(rhos):
        upper = max(betas.max(), rho) + 14.0
        grid = np.union1d(np.linspace(0.0, upper, points_per_row), betas)
        values = grid * np.exp(-0.5 * (grid - rho) ** 2) * i0e(rho * grid)
        segments = 0.5 * (values[1:] + values[:-1]) * np.diff(grid)
        tail = np.concatenate([np.cumsum(segments[::-1])[::-1], [0.0]])
        indices = np.searchsorted(grid, betas)
        table[row] = tail[indices]
    return table


def test_criterion_5_detection_math():
    started = time.perf_counter()
    for pfa in (1e-2, 1e-6, 1e-10):
        beta = pfa_to_beta(pfa)
        assert abs(prob_detection(0.0, beta) - pfa) <= 1e-12

    oracle_beta = math.sqrt(-2.0 * math.log(1e-10))
    assert abs(oracle_beta - 6.786140424415112) < 1e-12
    assert abs(pfa_to_beta(1e-10) - oracle_beta) <= 1e-4

    rhos = np.linspace(0.0, 9.0, 20)
    betas = np.linspace(0.05, 9.0, 20)
    oracle = _tail_table(rhos, betas, points_per_row=2_500_000)
    worst = 0.0
    for row, rho in enumerate(rhos):
        for col, beta in enumerate(betas):
            worst = max(worst, abs(prob_detection(rho, beta) - oracle[row, col]))
    elapsed = time.perf_counter() - started
    assert worst <= 1e-7
    assert elapsed < 10.0
    _report(
        "criterion 5: detection probabilities",
        f"max quadrature dev {worst:.1e}, {elapsed:.1f} s",
    )


def _reachability_diagnostics(scenario):
    """Best SINR any basis-selected canceller weight can reach, plus the
    gradient stability limit, for the configured scenario."""
    cov = assemble_covariance(scenario)
    steer = target_steering(scenario)
    entries = steer.entries
    dim = scenario.dim
    bank = build_basis_bank(dim, 4, 16)
    projector = np.eye(dim) - np.outer(entries, entries.conj())
    blocked_cov = projector @ cov.total @ projector.conj().T
    cross = projector @ cov.total @ entries
    best = -np.inf
    for branch in range(bank.num_banks):
        idx = bank.index_table[branch]
        weight = np.linalg.solve(blocked_cov[np.ix_(idx, idx)], cross[idx])
        scattered = np.zeros(dim, dtype=complex)
        scattered[idx] = weight
        full = entries - (projector @ scattered)
        best = max(best, output_sinr(full, cov, steer, TARGET_POWER))
    step_limit = 2.0 / np.trace(blocked_cov[np.ix_(bank.index_table[0], bank.index_table[0])]).real
    return best, optimum_sinr(cov, steer, TARGET_POWER), step_limit


def test_criterion_6_sinr_convergence_experiment():
    scenario = RadarScenario()
    config = ExperimentConfig(
        scenario=scenario,
        algorithms=[
            AlgorithmSpec(
                "abfa-rls", {"rank": 4, "num_banks": 16, "lambda": 0.9998, "delta": 0.01}
            ),
            AlgorithmSpec("abfa-sg", {"rank": 4, "num_banks": 16, "mu": 0.005}),
            AlgorithmSpec("full-rank-sg", {"mu": 0.005}),
        ],
        num_trials=100,
        snapshot_count=1000,
        base_seed=600,
    )
    started = time.perf_counter()
    try:
        result = run_experiment(config)
    except FilterDivergence as exc:
        best, optimum, step_limit = _reachability_diagnostics(scenario)
        print("[FAIL] criterion 6: SINR convergence experiment")
        pytest.fail(
            "the configured experiment cannot run to completion: "
            f"{exc}. The gradient recursion is unstable at step size 0.005 for "
            f"this interference level (mean-square stability needs roughly "
            f"mu < {step_limit:.1e}); furthermore every weight the "
            "basis-selected canceller can express is bounded by the best "
            f"static selection, {best:.1f} dB, which is "
            f"{optimum - best:.1f} dB below the optimum {optimum:.1f} dB, so "
            "the within-3-dB target is unreachable at rank 4 regardless of "
            "adaptation."
        )
    elapsed = time.perf_counter() - started
    assert elapsed < 300.0
    optimum = result.optimum_sinr_db
    final_rls = result.final_sinr_db["abfa-rls"]
    final_sg = result.final_sinr_db["abfa-sg"]
    final_full = result.final_sinr_db["full-rank-sg"]
    assert final_rls >= optimum - 3.0, (
        f"reduced-rank RLS final SINR {final_rls:.2f} dB not within 3 dB of "
        f"optimum {optimum:.2f} dB"
    )
    assert final_rls > final_sg > final_full, "mean final SINR ordering violated"
    crossing = np.nonzero(result.sinr_db["abfa-sg"] >= final_full)[0]
    assert crossing.size and crossing[0] <= 299, (
        "reduced-rank gradient filter did not reach the full-rank final SINR "
        "within 300 snapshots"
    )
    _report("criterion 6: SINR convergence experiment", f"{elapsed:.0f} s")


def test_criterion_7_detection_curve_ordering():
    scenario = RadarScenario()
    config = ExperimentConfig(
        scenario=scenario,
        algorithms=[
            AlgorithmSpec(
                "abfa-rls", {"rank": 4, "num_banks": 16, "lambda": 0.9998, "delta": 0.01}
            ),
            AlgorithmSpec("mswf", {"rank": 4, "refit_interval": 25}),
            AlgorithmSpec("full-rank-rls", {"lambda": 0.9998, "delta": 0.01}),
        ],
        num_trials=100,
        snapshot_count=1000,
        base_seed=700,
        pfa=1e-10,
    )
    result = run_experiment(config)

    for name in result.algorithms:
        assert np.all(np.diff(result.pd[name]) >= -1e-12), f"{name} curve not monotone"

    violations = []
    for rival in ("mswf", "full-rank-rls"):
        gap = result.pd["abfa-rls"] - result.pd[rival]
        noise = 2.0 * np.hypot(result.pd_stderr["abfa-rls"], result.pd_stderr[rival])
        bad = np.nonzero(gap < -noise)[0]
        if bad.size:
            at = result.pd_grid_db[bad[0]]
            violations.append(
                f"abfa-rls below {rival} by more than twice the standard error "
                f"at {bad.size} grid points (first at {at:+.1f} dB; final SINR "
                f"{result.final_sinr_db['abfa-rls']:.1f} vs "
                f"{result.final_sinr_db[rival]:.1f} dB)"
            )
    if violations:
        print("[FAIL] criterion 7: detection curve ordering")
        pytest.fail(
            "detection curves are monotone but the selected-basis canceller "
            "does not dominate: " + "; ".join(violations)
        )
    _report("criterion 7: detection curve ordering")


def test_criterion_8_scene_statistics():
    scenario = RadarScenario()
    cov = assemble_covariance(scenario)
    rng = np.random.default_rng(818)
    total_draws = 100_000
    chunk = 10_000
    acc = np.zeros((scenario.dim, scenario.dim), dtype=complex)
    for _ in range(total_draws // chunk):
        block = draw_interference(cov, chunk, rng)
        acc += block.T @ block.conj()
    estimate = acc / total_draws
    rel = np.linalg.norm(estimate - cov.total) / np.linalg.norm(cov.total)
    assert rel <= 0.05

    eigs = np.linalg.eigvalsh(clutter_covariance(scenario))
    significant = int(np.sum(eigs > scenario.noise_power))
    assert abs(significant - 15) <= 3
    _report(
        "criterion 8: scene statistics",
        f"covariance rel err {rel:.3f}, {significant} significant clutter eigenvalues",
    )


def test_criterion_9_run_determinism(tmp_path):
    def config():
        return ExperimentConfig(
            scenario=RadarScenario(),
            algorithms=[
                AlgorithmSpec("abfa-rls", {"rank": 4, "num_banks": 16}),
                AlgorithmSpec("mswf", {"rank": 4, "refit_interval": 20}),
                AlgorithmSpec("smi", {"refit_interval": 20}),
            ],
            num_trials=4,
            snapshot_count=120,
            base_seed=909,
        )

    outputs = []
    for label, workers in (("a", 1), ("b", 1), ("c", 3)):
        cfg = config()
        cfg.workers = workers
        emit_csv(run_experiment(cfg), tmp_path / label)
        outputs.append(
            (
                (tmp_path / label / "sinr_trace.csv").read_bytes(),
                (tmp_path / label / "pd_curve.csv").read_bytes(),
            )
        )
    assert outputs[0] == outputs[1], "repeat run with same seed differs"
    assert outputs[0] == outputs[2], "worker count changed the output"
    _report("criterion 9: byte-identical reruns across worker counts")
