"""Reference filters: sample matrix inversion, full-rank recursions on the
canceller structure, a multistage nested canceller, and an auxiliary-vector
filter.  All batch trainers are pure functions of the snapshot block."""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .abfa import AbfaRlsFilter, AbfaSgFilter, SidelobeCanceller, build_basis_bank


class DegenerateTrainingData(ValueError):
    """Training block carries no usable correlation structure."""


@dataclass
class SampleCovariance:
    """Running sample covariance accumulator with optional diagonal loading."""

    dim: int
    diagonal_loading: float = 0.0

    def __post_init__(self):
        if self.diagonal_loading < 0:
            raise ValueError("diagonal_loading must be nonnegative")
        self._sum = np.zeros((self.dim, self.dim), dtype=complex)
        self.count = 0

    def update(self, snapshot: np.ndarray) -> None:
        data = np.asarray(snapshot, dtype=complex)
        self._sum += np.outer(data, data.conj())
        self.count += 1

    def update_block(self, snapshots: np.ndarray) -> None:
        block = np.asarray(snapshots, dtype=complex)
        self._sum += block.T @ block.conj()
        self.count += block.shape[0]

    def matrix(self) -> np.ndarray:
        if self.count < 1:
            raise ValueError("no snapshots accumulated")
        return self._sum / self.count


def smi_weight(state: SampleCovariance, steering) -> np.ndarray:
    """Plug-in weight (R_hat + loading*I)^{-1} s.

    Raises LinAlgError when the estimate is rank deficient and no loading is
    configured (fewer snapshots than the dimension).
    """
    entries = getattr(steering, "entries", steering)
    estimate = state.matrix()
    if state.diagonal_loading > 0.0:
        estimate = estimate + state.diagonal_loading * np.eye(state.dim)
    elif state.count < state.dim:
        raise np.linalg.LinAlgError(
            f"sample covariance from {state.count} snapshots is singular at "
            f"dimension {state.dim} and diagonal loading is zero"
        )
    try:
        factor = scipy.linalg.cho_factor(estimate)
    except scipy.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError(
            "sample covariance is not positive definite; add diagonal loading"
        ) from exc
    return scipy.linalg.cho_solve(factor, np.asarray(entries, dtype=complex))


def full_rank_sg(
    front: SidelobeCanceller, step_size: float, weight_guard: float = 1e6
) -> AbfaSgFilter:
    """Full-dimension gradient canceller: the reduced filter with an identity bank."""
    bank = build_basis_bank(front.dim, front.dim, 1)
    return AbfaSgFilter(front, bank, step_size, weight_guard)


def full_rank_rls(
    front: SidelobeCanceller,
    forgetting: float = 0.9998,
    delta: float = 0.01,
    weight_guard: float = 1e6,
) -> AbfaRlsFilter:
    """Full-dimension recursive least-squares canceller (identity bank)."""
    bank = build_basis_bank(front.dim, front.dim, 1)
    return AbfaRlsFilter(front, bank, forgetting, delta, weight_guard)


@dataclass
class MswfState:
    """Trained multistage canceller: per-stage match filters and blocking
    live implicitly in the composed weights."""

    rank: int
    stage_filters: list
    stage_weights: list
    aux_weight: np.ndarray
    full_weight: np.ndarray


def mswf_train(snapshots: np.ndarray, steering, rank: int) -> MswfState:
    """Train the multistage canceller on a block of target-free snapshots.

    Forward pass: at each stage the match filter is the normalized sample
    cross-correlation between the current data and the previous stage output,
    and the data is blocked by subtracting the matched component.  Backward
    pass: scalar Wiener weights synthesise the interference estimate from the
    innermost stage outwards.

    ``snapshots`` has one snapshot per row.  The returned state carries the
    composed full-dimension weight (unit response in the steering direction).
    """
    entries = np.asarray(getattr(steering, "entries", steering), dtype=complex)
    data = np.asarray(snapshots, dtype=complex)
    if data.ndim != 2 or data.shape[1] != entries.size:
        raise ValueError("snapshots must be (count, dim) matching the steering")
    count, dim = data.shape
    if not 0 < rank <= dim:
        raise ValueError(f"rank must lie in [1, {dim}]")
    if count < rank:
        raise ValueError(f"need at least {rank} snapshots, got {count}")

    norm_sq = float(np.vdot(entries, entries).real)
    desired = data @ entries.conj()
    blocked = data - np.outer(desired, entries) / norm_sq

    # forward recursion on the data block; functionals track each stage
    # output as a linear map of the blocked snapshot
    stage_filters = []
    stage_outputs = [desired]
    functionals = []
    x = blocked
    mapping = np.eye(dim, dtype=complex)
    current = desired
    # the blocking projector has rank dim-1, so the blocked data can never
    # span more stages than that (nor more than the sample count)
    max_stages = min(rank, dim - 1, count)
    first_norm = None
    for stage in range(max_stages):
        cross = x.T @ np.conj(current) / count
        # the cross-correlation lies in the complement of the earlier match
        # filters in exact arithmetic; re-project to stop float drift from
        # re-introducing removed directions (twice, for ill-conditioned data)
        for _ in range(2):
            for match in stage_filters:
                cross -= match * np.vdot(match, cross)
        cross_norm = np.linalg.norm(cross)
        if cross_norm == 0.0 and stage == 0:
            raise DegenerateTrainingData("zero cross-correlation at the first stage")
        if first_norm is None:
            first_norm = cross_norm
        elif cross_norm < 1e-13 * first_norm:
            # the data block is exhausted; further stages would only fit
            # floating-point residue
            break
        match = cross / cross_norm
        output = x @ np.conj(match)
        stage_functional = mapping.conj().T @ match
        functionals.append(stage_functional)
        mapping = mapping - np.outer(match, np.conj(stage_functional))
        x = x - np.outer(output, match)
        stage_filters.append(match)
        stage_outputs.append(output)
        current = output

    stages = len(stage_filters)
    if stages == 0:
        # nothing to cancel with (dim 1 front); fall back to the main beam
        return MswfState(
            rank=rank,
            stage_filters=[],
            stage_weights=[],
            aux_weight=np.zeros(dim, dtype=complex),
            full_weight=entries.copy(),
        )

    # backward scalar Wiener synthesis over the stages actually built
    stage_weights = [0.0 + 0.0j] * stages
    residual = stage_outputs[stages]
    functional = functionals[stages - 1]
    for stage in range(stages, 0, -1):
        power = float(np.vdot(residual, residual).real)
        if power == 0.0:
            scalar = 0.0 + 0.0j
        else:
            scalar = complex(np.vdot(residual, stage_outputs[stage - 1]) / power)
        stage_weights[stage - 1] = scalar
        residual = stage_outputs[stage - 1] - scalar * residual
        if stage > 1:
            functional = functionals[stage - 2] - functional * np.conj(scalar)

    aux = functional * np.conj(stage_weights[0])
    full = entries - (aux - entries * (np.vdot(entries, aux) / norm_sq))
    return MswfState(
        rank=rank,
        stage_filters=stage_filters,
        stage_weights=stage_weights,
        aux_weight=aux,
        full_weight=full,
    )


def mswf_weight(state: MswfState) -> np.ndarray:
    return state.full_weight


@dataclass
class AvfState:
    """Trained auxiliary-vector filter: unit-norm auxiliaries with scalar
    leakage weights, applied to the raw (unblocked) data."""

    rank: int
    aux_vectors: list
    leakage_weights: list
    weight: np.ndarray


def avf_train(snapshots: np.ndarray, steering, rank: int) -> AvfState:
    """Train the auxiliary-vector filter on a block of target-free snapshots.

    Starting from the steering vector, each iteration forms the component of
    the sample-covariance gradient orthogonal to the steering, normalises it,
    and subtracts it with the output-power-minimising scalar weight.  The
    auxiliaries are not orthogonalised against each other.  Iteration stops
    early once the gradient vanishes (the weight is already optimal for the
    observed statistics).
    """
    entries = np.asarray(getattr(steering, "entries", steering), dtype=complex)
    data = np.asarray(snapshots, dtype=complex)
    if data.ndim != 2 or data.shape[1] != entries.size:
        raise ValueError("snapshots must be (count, dim) matching the steering")
    if rank < 0:
        raise ValueError("rank must be nonnegative")
    count = data.shape[0]
    if count < 1:
        raise ValueError("need at least one snapshot")

    estimate = data.T @ data.conj() / count
    if not estimate.any():
        raise DegenerateTrainingData("all-zero training block")
    norm_sq = float(np.vdot(entries, entries).real)

    weight = entries.copy()
    aux_vectors = []
    leakage_weights = []
    for _ in range(rank):
        gradient = estimate @ weight
        aux = gradient - entries * (np.vdot(entries, gradient) / norm_sq)
        aux_norm = np.linalg.norm(aux)
        if aux_norm == 0.0:
            break
        aux /= aux_norm
        r_aux = estimate @ aux
        leak = complex(np.vdot(aux, gradient) / np.vdot(aux, r_aux).real)
        weight = weight - leak * aux
        aux_vectors.append(aux)
        leakage_weights.append(leak)
    return AvfState(
        rank=rank,
        aux_vectors=aux_vectors,
        leakage_weights=leakage_weights,
        weight=weight,
    )


def avf_weight(state: AvfState) -> np.ndarray:
    return state.weight
