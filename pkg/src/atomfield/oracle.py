"""Exact propagation of the full Hamiltonian in a truncated Fock basis.

    H = omega0/2 sigma_z + omega a^dag a + g sigma_x (a + a^dag)

Basis ordering is ``|a,0..N>`` followed by ``|b,0..N>``.  ``H`` is real and
commutes with the parity ``sigma_z (-1)^{a^dag a}``; in each parity sector it
is a real symmetric tridiagonal chain ``|a,0>-|b,1>-|a,2>-...`` (and its
partner starting at ``|b,0>``).  Diagonalization is done per chain, which is
exact and keeps the eigenvector storage at two ``(N+1)^2`` real blocks.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .analytic import evolve_composite_samples
from .decoherence import reduced_density_closed
from .errors import (
    CutoffTooSmall,
    DimensionMismatch,
    NormalizationError,
    NotConverged,
    RepresentationMismatch,
)
from .model_core import (
    FOCK,
    DensityMatrix2,
    EnvWavefunction,
    ModelParams,
    PositionGrid,
    QubitAmplitudes,
    gaussian_package,
    gaussian_to_fock,
    project_to_fock,
    projection_grid,
)

log = logging.getLogger(__name__)

CONVERGENCE_TOL = 1e-8
#: generic qubit used to probe convergence; a |a> or |b> initial state keeps
#: rho_ab identically zero by parity and would hide truncation error.
PROBE_QUBIT = QubitAmplitudes.from_bloch(1.1, 0.7)


@dataclass(frozen=True)
class ParityChain:
    """One parity sector: basis indices in chain order and the tridiagonal entries."""

    indices: np.ndarray
    diagonal: np.ndarray
    offdiagonal: np.ndarray


@dataclass(frozen=True)
class TruncatedHamiltonian:
    params: ModelParams
    cutoff: int

    def __post_init__(self):
        if int(self.cutoff) != self.cutoff or self.cutoff < 1:
            raise CutoffTooSmall(f"cutoff must be an integer >= 1, got {self.cutoff!r}")
        object.__setattr__(self, "cutoff", int(self.cutoff))

    @property
    def dim(self) -> int:
        return 2 * (self.cutoff + 1)

    def diagonal(self) -> np.ndarray:
        p = self.params
        n = np.arange(self.cutoff + 1)
        return np.concatenate([0.5 * p.omega0 + p.omega * n, -0.5 * p.omega0 + p.omega * n])

    @property
    def matrix(self) -> np.ndarray:
        """Dense ``dim x dim`` matrix (real; the Hamiltonian has no complex entries)."""
        n1 = self.cutoff + 1
        x = np.diag(np.sqrt(np.arange(1, n1)), 1)
        x = x + x.T
        h = np.diag(self.diagonal())
        h[:n1, n1:] = self.params.g * x
        h[n1:, :n1] = self.params.g * x
        return h

    def apply(self, psi: np.ndarray) -> np.ndarray:
        """``H @ psi`` without forming the dense matrix."""
        psi = np.asarray(psi)
        if psi.shape[-1] != self.dim:
            raise DimensionMismatch(f"vector length {psi.shape[-1]} != {self.dim}")
        n1 = self.cutoff + 1
        sq = np.sqrt(np.arange(1, n1))

        def xop(v):
            out = np.zeros_like(v)
            out[..., :-1] += sq * v[..., 1:]
            out[..., 1:] += sq * v[..., :-1]
            return out

        a, b = psi[..., :n1], psi[..., n1:]
        out = self.diagonal() * psi
        out[..., :n1] += self.params.g * xop(b)
        out[..., n1:] += self.params.g * xop(a)
        return out

    def parity_chains(self) -> tuple[ParityChain, ParityChain]:
        p, n1 = self.params, self.cutoff + 1
        k = np.arange(n1)
        chains = []
        for first_is_a in (True, False):
            on_a = (k % 2 == 0) == first_is_a
            indices = np.where(on_a, k, n1 + k)
            diag = p.omega * k + np.where(on_a, 0.5, -0.5) * p.omega0
            off = p.g * np.sqrt(k[1:].astype(float))
            chains.append(ParityChain(indices, diag, off))
        return tuple(chains)


def parity_diagonal(cutoff: int) -> np.ndarray:
    """Diagonal of ``sigma_z (-1)^{a^dag a}`` in the composite basis."""
    sign = (-1.0) ** np.arange(cutoff + 1)
    return np.concatenate([sign, -sign])


def build_hamiltonian(params: ModelParams, cutoff: int) -> TruncatedHamiltonian:
    return TruncatedHamiltonian(params, cutoff)


@dataclass(frozen=True, eq=False)
class SpectralPropagator:
    """Eigendecomposition of a :class:`TruncatedHamiltonian`, one block per parity sector."""

    hamiltonian: TruncatedHamiltonian
    blocks: tuple = field(repr=False)

    @property
    def params(self) -> ModelParams:
        return self.hamiltonian.params

    @property
    def cutoff(self) -> int:
        return self.hamiltonian.cutoff

    @property
    def dim(self) -> int:
        return self.hamiltonian.dim

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.concatenate([w for _, w, _ in self.blocks])

    @property
    def eigenvectors(self) -> np.ndarray:
        """Dense unitary with columns ordered like :attr:`eigenvalues`."""
        v = np.zeros((self.dim, self.dim))
        col = 0
        for idx, w, vecs in self.blocks:
            v[np.ix_(idx, np.arange(col, col + len(w)))] = vecs
            col += len(w)
        return v

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.T

    def propagate_many(self, psi0: np.ndarray, times: Sequence[float]) -> np.ndarray:
        """Schrodinger-picture states at each time, shape ``(len(times), dim)``."""
        psi0 = _check_state(psi0, self.dim)
        times = np.asarray(times, dtype=float)
        out = np.empty((times.shape[0], self.dim), dtype=complex)
        for idx, w, vecs in self.blocks:
            coeff = vecs.T @ psi0[idx]
            phases = np.exp(-1j * np.outer(times, w))
            out[:, idx] = (phases * coeff) @ vecs.T
        return out


def diagonalize(ham: TruncatedHamiltonian) -> SpectralPropagator:
    blocks = []
    for chain in ham.parity_chains():
        w, v = eigh_tridiagonal(chain.diagonal, chain.offdiagonal, lapack_driver="stemr")
        blocks.append((chain.indices, w, v))
    return SpectralPropagator(ham, tuple(blocks))


def _check_state(psi0, dim: int) -> np.ndarray:
    psi0 = np.asarray(psi0, dtype=complex)
    if psi0.shape != (dim,):
        raise DimensionMismatch(f"state has shape {psi0.shape}, expected ({dim},)")
    norm = float(np.vdot(psi0, psi0).real)
    if abs(norm - 1.0) > 1e-8:
        raise NormalizationError(f"initial state norm {norm!r}, expected 1")
    return psi0


def propagate(prop: SpectralPropagator, psi0: np.ndarray, t: float) -> np.ndarray:
    """``psi(t) = V exp(-i lambda t) V^dag psi0`` (Schrodinger picture)."""
    return prop.propagate_many(psi0, [t])[0]


def energy(ham: TruncatedHamiltonian, psi: np.ndarray) -> float:
    return float(np.vdot(psi, ham.apply(psi)).real)


def to_interaction_picture(psi_s, params: ModelParams, t) -> np.ndarray:
    """Apply ``exp(+i H0 t)``, ``H0 = omega0/2 sigma_z + omega a^dag a``.

    ``psi_s`` may be a single vector (scalar ``t``) or a stack matching ``t``.
    """
    psi_s = np.asarray(psi_s, dtype=complex)
    n1 = psi_s.shape[-1] // 2
    n = np.arange(n1)
    e = np.concatenate([0.5 * params.omega0 + params.omega * n,
                        -0.5 * params.omega0 + params.omega * n])
    t = np.asarray(t, dtype=float)
    return psi_s * np.exp(1j * np.multiply.outer(t, e))


def product_state(qubit: QubitAmplitudes, env: EnvWavefunction) -> np.ndarray:
    if env.representation != FOCK:
        raise RepresentationMismatch("oracle needs a Fock-basis environment state")
    return np.concatenate([qubit.alpha * env.values, qubit.beta * env.values])


def _rho_arrays(psi: np.ndarray) -> np.ndarray:
    """Reduced density entries for one vector or a stack, shape ``(..., 2, 2)``."""
    n1 = psi.shape[-1] // 2
    a, b = psi[..., :n1], psi[..., n1:]
    raa = np.sum(np.abs(a) ** 2, -1)
    rbb = np.sum(np.abs(b) ** 2, -1)
    rab = np.sum(a * np.conj(b), -1)
    return np.stack([np.stack([raa, rab], -1), np.stack([np.conj(rab), rbb], -1)], -2)


def reduced_density_exact(psi: np.ndarray) -> DensityMatrix2:
    """Trace over the Fock index: ``rho_ab = sum_n c_{a,n} conj(c_{b,n})``."""
    return DensityMatrix2.from_array(_rho_arrays(np.asarray(psi)))


# ---------------------------------------------------------------------------
# Cutoff convergence
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConvergenceRow:
    cutoff: int
    next_cutoff: int
    drift: float


@dataclass(frozen=True)
class ConvergenceReport:
    rows: tuple
    tol: float
    converged_cutoff: Optional[int]

    @property
    def converged(self) -> bool:
        return self.converged_cutoff is not None

    def to_dict(self) -> dict:
        return {
            "tol": self.tol,
            "converged_cutoff": self.converged_cutoff,
            "rows": [{"cutoff": r.cutoff, "next_cutoff": r.next_cutoff, "drift": r.drift}
                     for r in self.rows],
        }


def _rho_series(params, env_alpha0, cutoff, times, qubit):
    try:
        env = gaussian_to_fock(env_alpha0, params, cutoff)
    except CutoffTooSmall:
        return None
    prop = diagonalize(build_hamiltonian(params, cutoff))
    psi = prop.propagate_many(product_state(qubit, env), times)
    return _rho_arrays(psi)


def convergence_report(params: ModelParams, env_alpha0: float, t_max: float,
                       cutoffs: Sequence[int], n_times: int = 41,
                       qubit: QubitAmplitudes = PROBE_QUBIT,
                       tol: float = CONVERGENCE_TOL, stop_early: bool = True,
                       raise_on_failure: bool = True) -> ConvergenceReport:
    """Drift of the reduced density matrix between consecutive cutoffs.

    For each pair ``(N_k, N_k+1)`` the drift is the largest entrywise change of
    the reduced density matrix over ``n_times`` samples in ``[0, t_max]``.  The
    converged cutoff is the first ``N_k`` whose drift is below ``tol``; with
    ``stop_early`` no larger cutoffs are diagonalized after that.

    Raises
    ------
    NotConverged
        If no pair drifts less than ``tol`` (always the case for one cutoff).
    """
    cutoffs = [int(c) for c in cutoffs]
    if any(b <= a for a, b in zip(cutoffs, cutoffs[1:])):
        raise ValueError("cutoffs must be strictly increasing")
    times = np.linspace(0.0, t_max, n_times)
    rows, converged = [], None
    prev = _rho_series(params, env_alpha0, cutoffs[0], times, qubit) if cutoffs else None
    for lo, hi in zip(cutoffs, cutoffs[1:]):
        cur = _rho_series(params, env_alpha0, hi, times, qubit)
        drift = math.inf if prev is None or cur is None else float(np.max(np.abs(cur - prev)))
        rows.append(ConvergenceRow(lo, hi, drift))
        log.info("cutoff %d -> %d: drift %.3e", lo, hi, drift)
        prev = cur
        if drift < tol:
            converged = lo
            if stop_early:
                break
    report = ConvergenceReport(tuple(rows), tol, converged)
    if converged is None and raise_on_failure:
        err = NotConverged(
            f"reduced density still drifts at cutoff {cutoffs[-1] if cutoffs else None}: "
            f"{rows[-1].drift if rows else 'no cutoff pair'}"
        )
        err.report = report
        raise err
    return report


def doubling_cutoffs(start: int = 128, max_cutoff: int = 8192) -> list[int]:
    out, c = [], int(start)
    while c <= max_cutoff:
        out.append(c)
        c *= 2
    return out


# ---------------------------------------------------------------------------
# Analytic versus exact comparison
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Comparison:
    """Per-time agreement between the closed-form state and exact propagation."""

    times: np.ndarray
    fidelity: np.ndarray
    rho_ab_abs_error: np.ndarray
    rho_ab_error: np.ndarray
    rz_error: np.ndarray
    analytic_weight: np.ndarray
    cutoff: int

    @property
    def min_fidelity(self) -> float:
        return float(np.min(self.fidelity))

    @property
    def max_rho_ab_abs_error(self) -> float:
        return float(np.max(self.rho_ab_abs_error))


def analytic_fock_states(params: ModelParams, qubit: QubitAmplitudes, times, cutoff: int,
                         grid: Optional[PositionGrid] = None) -> np.ndarray:
    """Closed-form interaction-picture states projected onto Fock states ``n <= cutoff``."""
    grid = grid or projection_grid(params.alpha0, params, cutoff)
    env = gaussian_package(params.alpha0, grid)
    a, b = evolve_composite_samples(params, qubit, env, times)
    ca = project_to_fock(a, grid, params.m, params.omega, cutoff)
    cb = project_to_fock(b, grid, params.m, params.omega, cutoff)
    return np.concatenate([ca, cb], axis=-1)


def compare_with_analytic(params: ModelParams, qubit: QubitAmplitudes, times,
                          cutoff: int, grid: Optional[PositionGrid] = None,
                          prop: Optional[SpectralPropagator] = None) -> Comparison:
    """Fidelity ``|<psi_analytic|psi_exact>|^2`` in the interaction picture, per time."""
    times = np.asarray(times, dtype=float)
    prop = prop or diagonalize(build_hamiltonian(params, cutoff))
    env = gaussian_to_fock(params.alpha0, params, prop.cutoff)
    exact_s = prop.propagate_many(product_state(qubit, env), times)
    exact_i = to_interaction_picture(exact_s, params, times)
    approx = analytic_fock_states(params, qubit, times, prop.cutoff, grid)
    fid = np.abs(np.sum(np.conj(approx) * exact_i, axis=-1)) ** 2
    weight = np.sum(np.abs(approx) ** 2, axis=-1)
    rho_exact = _rho_arrays(exact_i)
    closed = np.array([reduced_density_closed(params, qubit, t).as_array() for t in times])
    return Comparison(
        times=times,
        fidelity=fid,
        rho_ab_abs_error=np.abs(np.abs(rho_exact[:, 0, 1]) - np.abs(closed[:, 0, 1])),
        rho_ab_error=np.abs(rho_exact[:, 0, 1] - closed[:, 0, 1]),
        rz_error=np.abs((rho_exact[:, 0, 0] - rho_exact[:, 1, 1]).real
                        - (closed[:, 0, 0] - closed[:, 1, 1]).real),
        analytic_weight=weight,
        cutoff=prop.cutoff,
    )


__all__ = [
    "ConvergenceReport", "Comparison", "SpectralPropagator", "TruncatedHamiltonian",
    "analytic_fock_states", "build_hamiltonian", "compare_with_analytic",
    "convergence_report", "diagonalize", "doubling_cutoffs", "energy",
    "parity_diagonal", "product_state", "propagate", "reduced_density_exact",
    "to_interaction_picture",
]
