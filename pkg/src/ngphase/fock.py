"""Truncated Fock-space engine: states, operators, expectations.

Everything lives in a finite basis |0>..|D-1>.  The truncation dimension is
chosen so that the probability mass the untruncated state would carry above
the cutoff ("leakage") stays below a configurable tolerance; see
``recommend_dim``.  All values are immutable after construction and safe to
share between threads.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

logger = logging.getLogger(__name__)

# Extra levels on top of the leakage-based cutoff.  Matrix exponentials
# corrupt the top of a truncated basis; the margin quarantines that block.
DIM_MARGIN = 20

DEFAULT_TAIL_TOL = 1e-12

# Low-block unitarity defect above which an operator exponential is rejected.
UNITARITY_GUARD = 1e-6


class LeakageError(RuntimeError):
    """A state cannot be represented in the space within its tail tolerance."""


class ConvergenceError(RuntimeError):
    """An operator exponential failed to reach the required accuracy."""


class SpaceMismatchError(ValueError):
    """Operands live in different Fock spaces."""


@dataclass(frozen=True)
class FockSpace:
    """Finite photon-number basis |0>..|dim-1| with a leakage budget."""

    dim: int
    tail_tol: float = DEFAULT_TAIL_TOL

    def __post_init__(self):
        if self.dim < 2:
            raise ValueError(f"dim must be >= 2, got {self.dim}")
        if not self.tail_tol > 0:
            raise ValueError(f"tail_tol must be > 0, got {self.tail_tol}")

    @property
    def levels(self) -> np.ndarray:
        return np.arange(self.dim)


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


def _check_same_space(a, b) -> None:
    if a.space != b.space:
        raise SpaceMismatchError(f"space mismatch: {a.space} vs {b.space}")


@dataclass(frozen=True)
class PureState:
    """Unit-norm complex amplitude vector over the Fock basis.

    ``leakage`` is the constructor's estimate of the probability mass the
    untruncated state would carry at n >= dim (0 for exact finite states).
    """

    space: FockSpace
    amplitudes: np.ndarray
    leakage: float = 0.0

    def __post_init__(self):
        amps = np.ascontiguousarray(self.amplitudes, dtype=complex)
        if amps.shape != (self.space.dim,):
            raise ValueError(
                f"amplitude vector has shape {amps.shape}, expected ({self.space.dim},)"
            )
        # Gross-error guard only; constructors guarantee 1e-12, while apply()
        # without renormalization may drift by the (controlled) leakage.
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > 1e-6:
            raise ValueError(f"state norm {norm} too far from 1")
        object.__setattr__(self, "amplitudes", _freeze(amps))

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def density(self) -> "DensityOperator":
        """Rank-one density operator |psi><psi|."""
        rho = np.outer(self.amplitudes, self.amplitudes.conj())
        return DensityOperator(self.space, rho)


@dataclass(frozen=True)
class DensityOperator:
    """Hermitian, unit-trace, positive matrix over the Fock basis."""

    space: FockSpace
    matrix: np.ndarray

    HERM_ATOL = 1e-12
    TRACE_ATOL = 1e-10
    EIG_ATOL = 1e-10

    def __post_init__(self):
        mat = np.ascontiguousarray(self.matrix, dtype=complex)
        d = self.space.dim
        if mat.shape != (d, d):
            raise ValueError(f"matrix has shape {mat.shape}, expected ({d}, {d})")
        herm_defect = np.max(np.abs(mat - mat.conj().T))
        if herm_defect > self.HERM_ATOL:
            raise ValueError(f"matrix not Hermitian: defect {herm_defect:.3e}")
        tr = mat.trace().real
        if abs(tr - 1.0) > self.TRACE_ATOL:
            raise ValueError(f"trace {tr!r} differs from 1 beyond {self.TRACE_ATOL}")
        min_eig = float(np.linalg.eigvalsh(mat)[0])
        if min_eig < -self.EIG_ATOL:
            raise ValueError(f"matrix not positive: min eigenvalue {min_eig:.3e}")
        object.__setattr__(self, "matrix", _freeze(mat))

    @property
    def trace(self) -> float:
        return float(self.matrix.trace().real)


@dataclass(frozen=True)
class LinearOperator:
    """Dense operator matrix on a Fock space."""

    space: FockSpace
    matrix: np.ndarray

    def __post_init__(self):
        mat = np.ascontiguousarray(self.matrix, dtype=complex)
        d = self.space.dim
        if mat.shape != (d, d):
            raise ValueError(f"matrix has shape {mat.shape}, expected ({d}, {d})")
        object.__setattr__(self, "matrix", _freeze(mat))

    def dagger(self) -> "LinearOperator":
        return LinearOperator(self.space, self.matrix.conj().T)

    def __matmul__(self, other: "LinearOperator") -> "LinearOperator":
        _check_same_space(self, other)
        return LinearOperator(self.space, self.matrix @ other.matrix)


# ---------------------------------------------------------------------------
# operators


def annihilation(space: FockSpace) -> LinearOperator:
    """Ladder operator with <m|a|n> = sqrt(n) for m = n-1."""
    mat = np.diag(np.sqrt(np.arange(1, space.dim, dtype=float)), k=1)
    return LinearOperator(space, mat.astype(complex))


def creation(space: FockSpace) -> LinearOperator:
    return annihilation(space).dagger()


def number_operator(space: FockSpace) -> LinearOperator:
    return LinearOperator(space, np.diag(space.levels.astype(complex)))


def parity_operator(space: FockSpace) -> LinearOperator:
    """(-1)^n on the number basis."""
    signs = np.where(space.levels % 2 == 0, 1.0, -1.0)
    return LinearOperator(space, np.diag(signs.astype(complex)))


def identity(space: FockSpace) -> LinearOperator:
    return LinearOperator(space, np.eye(space.dim, dtype=complex))


def _low_block_unitarity_defect(mat: np.ndarray) -> float:
    half = mat.shape[0] // 2
    gram = mat.conj().T @ mat
    block = gram[:half, :half] - np.eye(half)
    return float(np.linalg.norm(block))


def _checked_exponential(space: FockSpace, generator: np.ndarray, label: str) -> LinearOperator:
    mat = expm(generator)
    if not np.all(np.isfinite(mat.view(float))):
        raise ConvergenceError(f"{label}: matrix exponential produced non-finite entries")
    defect = _low_block_unitarity_defect(mat)
    if defect > UNITARITY_GUARD:
        raise ConvergenceError(
            f"{label}: low-block unitarity defect {defect:.3e} exceeds "
            f"{UNITARITY_GUARD:.0e}; increase dim"
        )
    return LinearOperator(space, mat)


def displacement(space: FockSpace, delta: float) -> LinearOperator:
    """Displacement exp(i*delta*(a + a†)) along the phase quadrature."""
    a = annihilation(space).matrix
    return _checked_exponential(space, 1j * delta * (a + a.conj().T), f"displacement({delta})")


def squeeze(space: FockSpace, r: float) -> LinearOperator:
    """Squeeze operator S(r) with S†(r) a S(r) = a cosh r + a† sinh r."""
    a = annihilation(space).matrix
    adag = a.conj().T
    return _checked_exponential(space, 0.5 * r * (adag @ adag - a @ a), f"squeeze({r})")


# ---------------------------------------------------------------------------
# states


def fock_state(space: FockSpace, n: int) -> PureState:
    """Number state |n>."""
    if not 0 <= n < space.dim:
        raise ValueError(f"n={n} outside [0, {space.dim})")
    amps = np.zeros(space.dim, dtype=complex)
    amps[n] = 1.0
    return PureState(space, amps, leakage=0.0)


def _coherent_amplitudes(space: FockSpace, alpha: complex) -> np.ndarray:
    """Untruncated coherent amplitudes <n|alpha> on the finite basis."""
    amps = np.empty(space.dim, dtype=complex)
    amps[0] = math.exp(-0.5 * abs(alpha) ** 2)
    for n in range(1, space.dim):
        amps[n] = amps[n - 1] * alpha / math.sqrt(n)
    return amps


def coherent_state(space: FockSpace, alpha: complex) -> PureState:
    """Coherent state |alpha> with Poissonian number statistics."""
    amps = _coherent_amplitudes(space, alpha)
    captured = float(np.vdot(amps, amps).real)
    leakage = max(0.0, 1.0 - captured)
    if leakage > space.tail_tol:
        raise LeakageError(
            f"coherent_state(alpha={alpha}): leakage {leakage:.3e} exceeds "
            f"tail_tol {space.tail_tol:.3e} at dim {space.dim}"
        )
    return PureState(space, amps / math.sqrt(captured), leakage=leakage)


def cat_state(space: FockSpace, alpha: float) -> PureState:
    """Even superposition (|alpha> + |-alpha>)/sqrt(K), K = 2(1+exp(-2 alpha^2)).

    Contains even photon numbers only; the odd amplitudes are exactly zero.
    """
    alpha = float(alpha)
    base = _coherent_amplitudes(space, alpha)
    amps = base.copy()
    amps[1::2] = 0.0
    amps[0::2] *= 2.0
    norm_exact = 2.0 * (1.0 + math.exp(-2.0 * alpha * alpha))
    captured = float(np.vdot(amps, amps).real)
    leakage = max(0.0, 1.0 - captured / norm_exact)
    if leakage > space.tail_tol:
        raise LeakageError(
            f"cat_state(alpha={alpha}): leakage {leakage:.3e} exceeds "
            f"tail_tol {space.tail_tol:.3e} at dim {space.dim}"
        )
    return PureState(space, amps / math.sqrt(captured), leakage=leakage)


# ---------------------------------------------------------------------------
# expectations and maps


def overlap(a: PureState, b: PureState) -> complex:
    """Inner product <a|b>."""
    _check_same_space(a, b)
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def photon_distribution(state: PureState | DensityOperator) -> np.ndarray:
    """Probability of each photon number; sums to 1 for valid inputs."""
    if isinstance(state, PureState):
        return np.abs(state.amplitudes) ** 2
    return np.real(np.diag(state.matrix)).copy()


def parity_expectation(state: PureState | DensityOperator) -> float:
    """Expectation of (-1)^n; lies in [-1, 1]."""
    p = photon_distribution(state)
    signs = np.where(np.arange(p.size) % 2 == 0, 1.0, -1.0)
    return float(np.dot(signs, p))


def mean_photon_number(state: PureState | DensityOperator) -> float:
    p = photon_distribution(state)
    return float(np.dot(np.arange(p.size), p))


def apply(op: LinearOperator, state: PureState, *, renormalize: bool = False) -> PureState:
    """Matrix-vector product op @ state.

    Truncation makes nominally unitary operators lose a little norm; the
    deficit is folded into the returned state's leakage estimate.
    Renormalization is opt-in and logged, never silent; genuinely non-unitary
    operators (ladder operators etc.) require it, since the result must still
    be a valid unit-norm state.
    """
    _check_same_space(op, state)
    out = op.matrix @ state.amplitudes
    norm = float(np.linalg.norm(out))
    norm_loss = abs(1.0 - norm * norm)
    if renormalize:
        logger.info("apply: renormalizing, norm changed by %.3e", norm - 1.0)
        out = out / norm
    return PureState(state.space, out, leakage=max(state.leakage, norm_loss))


def conjugate(op: LinearOperator, rho: DensityOperator) -> DensityOperator:
    """Map rho -> op @ rho @ op†."""
    _check_same_space(op, rho)
    out = op.matrix @ rho.matrix @ op.matrix.conj().T
    out = 0.5 * (out + out.conj().T)  # rounding symmetrization; exact in real arithmetic
    return DensityOperator(rho.space, out)


def expectation(op: LinearOperator, state: PureState | DensityOperator) -> complex:
    _check_same_space(op, state)
    if isinstance(state, PureState):
        return complex(np.vdot(state.amplitudes, op.matrix @ state.amplitudes))
    return complex(np.trace(op.matrix @ state.matrix))


# ---------------------------------------------------------------------------
# metrics


def trace_distance(rho: DensityOperator, sigma: DensityOperator) -> float:
    """(1/2)||rho - sigma||_1."""
    _check_same_space(rho, sigma)
    eigs = np.linalg.eigvalsh(rho.matrix - sigma.matrix)
    return 0.5 * float(np.sum(np.abs(eigs)))


def fidelity_with_pure(psi: PureState, rho: DensityOperator) -> float:
    """<psi|rho|psi>."""
    _check_same_space(psi, rho)
    return float(np.vdot(psi.amplitudes, rho.matrix @ psi.amplitudes).real)


# ---------------------------------------------------------------------------
# truncation sizing


def poisson_tail_cutoff(lam: float, tail_tol: float) -> int:
    """Smallest n0 with P(Poisson(lam) >= n0) <= tail_tol."""
    if lam <= 0.0:
        return 1
    pmf = math.exp(-lam)
    cdf = pmf
    n = 0
    target = 1.0 - tail_tol
    while cdf < target:
        n += 1
        pmf *= lam / n
        cdf += pmf
        if n > 100_000:  # unreachable for sane inputs
            raise RuntimeError("Poisson tail summation did not terminate")
    return n + 1


def recommend_dim(max_alpha: float, max_delta: float,
                  tail_tol: float = DEFAULT_TAIL_TOL) -> int:
    """Basis size for states of coherent amplitude up to sqrt(alpha^2 + delta^2).

    The returned dimension keeps the Poisson tail above ``dim - DIM_MARGIN``
    below ``tail_tol``; the margin absorbs top-of-basis corruption from
    operator exponentials.  Monotone nondecreasing in both amplitudes and in
    1/tail_tol.
    """
    if max_alpha < 0 or max_delta < 0:
        raise ValueError("amplitudes must be nonnegative")
    if not tail_tol > 0:
        raise ValueError("tail_tol must be > 0")
    lam = max_alpha * max_alpha + max_delta * max_delta
    return max(2, poisson_tail_cutoff(lam, tail_tol)) + DIM_MARGIN
