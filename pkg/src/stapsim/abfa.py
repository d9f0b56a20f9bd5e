"""Reduced-rank sidelobe canceller with per-snapshot basis-set selection.

The canceller keeps the main-beam output of a fixed steering vector and
subtracts an adaptive estimate of its interference, formed from a handful of
entries of the blocked (steering-nulled) data.  Which entries feed the
reduced filter is re-decided every snapshot: a bank of pre-stored index sets
is scanned and the set with the smallest instantaneous squared error wins.
The reduced weight is adapted either by a stochastic-gradient step or by an
exponentially weighted recursive least-squares update.
"""

from dataclasses import dataclass

import numpy as np

from .matio import read_complex_matrix, write_complex_matrix
from .scene import SteeringVector


class FilterDivergence(RuntimeError):
    """Adaptive weight left the finite/guarded region."""


@dataclass
class BasisBank:
    """Pre-stored selection index sets.

    ``index_table[b, d]`` is the 0-based position picked by set ``b`` for
    reduced coordinate ``d``; within a set the positions are an arithmetic
    progression of stride ``dim // rank`` starting at ``b``.
    """

    dim: int
    rank: int
    num_banks: int
    index_table: np.ndarray


def build_basis_bank(dim: int, rank: int, num_banks: int) -> BasisBank:
    """Construct the stride-partition bank; requires rank to divide dim.

    Set b selects positions (dim/rank)*d + b for d = 0..rank-1, so banks are
    disjoint column shifts of one another and every index stays inside
    [0, dim).  ``num_banks`` may not exceed dim/rank.
    """
    if dim <= 0 or rank <= 0:
        raise ValueError("dim and rank must be positive")
    if dim % rank != 0:
        raise ValueError(f"rank {rank} does not divide dim {dim}")
    stride = dim // rank
    if not 1 <= num_banks <= stride:
        raise ValueError(f"num_banks must lie in [1, {stride}], got {num_banks}")
    table = stride * np.arange(rank)[None, :] + np.arange(num_banks)[:, None]
    return BasisBank(dim=dim, rank=rank, num_banks=num_banks, index_table=table)


class SidelobeCanceller:
    """Fixed main beam plus projection of the data onto the steering null space.

    The blocking operation applies I - s s^H / ||s||^2 without materialising
    the projector.
    """

    def __init__(self, steering: SteeringVector):
        self.steering = steering
        self._s = np.asarray(steering.entries, dtype=complex)
        self._norm_sq = float(np.vdot(self._s, self._s).real)
        if self._norm_sq == 0.0:
            raise ValueError("steering vector must be nonzero")

    @property
    def dim(self) -> int:
        return self._s.size

    def main_beam(self, snapshot: np.ndarray) -> complex:
        """Inner product s^H r."""
        return complex(np.vdot(self._s, snapshot))

    def block(self, snapshot: np.ndarray) -> np.ndarray:
        """Project the snapshot onto the orthogonal complement of the steering."""
        return snapshot - self._s * (np.vdot(self._s, snapshot) / self._norm_sq)


def branch_outputs(bank: BasisBank, weight: np.ndarray, blocked: np.ndarray) -> np.ndarray:
    """Reduced-filter output of every bank: w^H gather(blocked, set b).

    Implemented as index gathers (rank multiplies per bank), never as a dense
    projection multiply.
    """
    return blocked[bank.index_table] @ np.conj(weight)


def select_branch(beam_output: complex, branch_values: np.ndarray):
    """Pick the bank minimising |beam_output - y_b|^2 (ties: lowest index).

    Returns ``(branch, error)`` with ``error = beam_output - y_branch``.
    """
    errors = beam_output - branch_values
    branch = int(np.argmin(np.abs(errors) ** 2))
    return branch, complex(errors[branch])


def effective_full_weight(
    front: SidelobeCanceller, bank: BasisBank, weight: np.ndarray, branch: int
) -> np.ndarray:
    """Full-dimension weight whose output equals the canceller output.

    For any snapshot r, w^H r = main_beam(r) - y_branch(r); the blocking
    guarantees w^H s = 1.
    """
    scattered = np.zeros(front.dim, dtype=complex)
    scattered[bank.index_table[branch]] = weight
    return front.steering.entries - front.block(scattered)


class AbfaSgFilter:
    """Stochastic-gradient adaptation of the reduced canceller weight.

    Each step scans the bank, keeps the minimising set, and moves the weight
    along the instantaneous gradient: w += step_size * reduced * conj(error).
    """

    def __init__(
        self,
        front: SidelobeCanceller,
        bank: BasisBank,
        step_size: float,
        weight_guard: float = 1e6,
    ):
        if bank.dim != front.dim:
            raise ValueError(f"bank dim {bank.dim} != front dim {front.dim}")
        if step_size < 0:
            raise ValueError("step_size must be nonnegative")
        self.front = front
        self.bank = bank
        self.step_size = float(step_size)
        self.weight_guard = float(weight_guard)
        self.weight = np.zeros(bank.rank, dtype=complex)
        self.last_branch = 0

    def step(self, snapshot: np.ndarray):
        """Process one snapshot; returns (a-priori error, selected branch)."""
        beam = self.front.main_beam(snapshot)
        blocked = self.front.block(snapshot)
        outputs = branch_outputs(self.bank, self.weight, blocked)
        branch, error = select_branch(beam, outputs)
        reduced = blocked[self.bank.index_table[branch]]
        self.weight = self.weight + self.step_size * reduced * np.conj(error)
        self._check_weight()
        self.last_branch = branch
        return error, branch

    def full_weight(self, branch: int | None = None) -> np.ndarray:
        if branch is None:
            branch = self.last_branch
        return effective_full_weight(self.front, self.bank, self.weight, branch)

    def _check_weight(self):
        norm = np.linalg.norm(self.weight)
        if not np.isfinite(norm) or norm > self.weight_guard:
            raise FilterDivergence(
                f"weight norm {norm:.3e} exceeded guard {self.weight_guard:.3e}"
            )

    def save_state(self, prefix) -> None:
        write_complex_matrix(f"{prefix}_weight.bin", self.weight)

    def load_state(self, prefix) -> None:
        weight = read_complex_matrix(f"{prefix}_weight.bin").ravel()
        if weight.size != self.bank.rank:
            raise ValueError(
                f"stored weight has length {weight.size}, expected {self.bank.rank}"
            )
        self.weight = weight


class AbfaRlsFilter:
    """Recursive least-squares adaptation of the reduced canceller weight.

    Keeps the inverse of the exponentially weighted reduced correlation
    matrix, initialised to I/delta.  Selection runs before the gain update
    each snapshot, using the current weight.
    """

    def __init__(
        self,
        front: SidelobeCanceller,
        bank: BasisBank,
        forgetting: float = 0.9998,
        delta: float = 0.01,
        weight_guard: float = 1e6,
    ):
        if bank.dim != front.dim:
            raise ValueError(f"bank dim {bank.dim} != front dim {front.dim}")
        if not 0.0 < forgetting <= 1.0:
            raise ValueError("forgetting factor must lie in (0, 1]")
        if delta <= 0:
            raise ValueError("delta must be positive")
        self.front = front
        self.bank = bank
        self.forgetting = float(forgetting)
        self.delta = float(delta)
        self.weight_guard = float(weight_guard)
        self.weight = np.zeros(bank.rank, dtype=complex)
        self.inv_correlation = np.eye(bank.rank, dtype=complex) / delta
        self.last_branch = 0

    def step(self, snapshot: np.ndarray):
        """Process one snapshot; returns (a-priori error, selected branch)."""
        beam = self.front.main_beam(snapshot)
        blocked = self.front.block(snapshot)
        outputs = branch_outputs(self.bank, self.weight, blocked)
        branch, error = select_branch(beam, outputs)
        reduced = blocked[self.bank.index_table[branch]]
        self.last_branch = branch
        if not reduced.any():
            # zero reduced data carries no information; gain would be zero
            return error, branch
        p_r = self.inv_correlation @ reduced
        denom = self.forgetting + float(np.vdot(reduced, p_r).real)
        gain = p_r / denom
        self.inv_correlation = (
            self.inv_correlation - np.outer(gain, np.conj(p_r))
        ) / self.forgetting
        self.inv_correlation = (
            self.inv_correlation + self.inv_correlation.conj().T
        ) / 2.0
        self.weight = self.weight + gain * np.conj(error)
        self._check_weight()
        return error, branch

    def full_weight(self, branch: int | None = None) -> np.ndarray:
        if branch is None:
            branch = self.last_branch
        return effective_full_weight(self.front, self.bank, self.weight, branch)

    def _check_weight(self):
        norm = np.linalg.norm(self.weight)
        if not np.isfinite(norm) or norm > self.weight_guard:
            raise FilterDivergence(
                f"weight norm {norm:.3e} exceeded guard {self.weight_guard:.3e}"
            )

    def save_state(self, prefix) -> None:
        write_complex_matrix(f"{prefix}_weight.bin", self.weight)
        write_complex_matrix(f"{prefix}_pmatrix.bin", self.inv_correlation)

    def load_state(self, prefix) -> None:
        weight = read_complex_matrix(f"{prefix}_weight.bin").ravel()
        pmatrix = read_complex_matrix(f"{prefix}_pmatrix.bin")
        rank = self.bank.rank
        if weight.size != rank or pmatrix.shape != (rank, rank):
            raise ValueError("stored state does not match the filter rank")
        self.weight = weight
        self.inv_correlation = pmatrix
