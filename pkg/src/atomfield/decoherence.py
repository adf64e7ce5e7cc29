"""Reduced density matrix, Bloch trajectories and coherence observables.

Two bases are used.  The atomic basis ``{|a>, |b>}`` and the frozen initial
pointer basis ``|+-(t0)> = (|a> +- |b>)/sqrt(2)``; coefficients in the latter
are written ``alpha_p, beta_p`` throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analytic import env_overlap, pointer_states_system
from .errors import NormalizationError, RepresentationMismatch, ZeroCoupling
from .model_core import (
    CompositeState,
    DensityMatrix2,
    ModelParams,
    QubitAmplitudes,
    bloch_from_density,
)

ATOMIC_BASIS = "ab"
POINTER_BASIS = "pointer"

# columns are |+(t0)>, |-(t0)> in the atomic basis
_POINTER_U = np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2.0)

CSV_COLUMNS = ("t", "rho_aa", "re_rho_ab", "im_rho_ab", "r_x", "r_y", "r_z", "decay_factor")


def decay_factor(params: ModelParams, t) -> np.ndarray:
    """Gaussian suppression ``exp(-(g chi t)^2 / (2 alpha0))``."""
    return env_overlap(params, t)


def reduced_density_closed(params: ModelParams, qubit: QubitAmplitudes, t: float) -> DensityMatrix2:
    a, b = qubit.alpha, qubit.beta
    d = float(decay_factor(params, t))
    raa = 0.5 * (1.0 + (abs(a) ** 2 - abs(b) ** 2) * d)
    sym = a * b.conjugate() + b * a.conjugate()
    anti = a * b.conjugate() - b * a.conjugate()
    rab = 0.5 * (sym + anti * d) * np.exp(1j * params.omega0 * t)
    return DensityMatrix2(raa, rab, np.conj(rab), 1.0 - raa)


def reduced_density_from_composite(state: CompositeState) -> DensityMatrix2:
    """Partial trace over ``x`` by quadrature of the two branches."""
    if state.representation != "position":
        raise RepresentationMismatch("expected a position-grid composite state")
    a, b = state.psi_a, state.psi_b
    raa = a.norm2()
    rbb = b.norm2()
    rab = b.inner(a)  # int psi_a conj(psi_b) dx
    return DensityMatrix2(raa, rab, np.conj(rab), rbb)


def decoherence_time(params: ModelParams) -> float:
    """``tau = sqrt(alpha0 / (m omega)) / |g|`` (hbar = 1).

    Raises
    ------
    ZeroCoupling
        If ``g == 0``.
    """
    if params.g == 0.0:
        raise ZeroCoupling("g = 0: no decoherence, tau is infinite")
    return math.sqrt(params.alpha0 / (params.m * params.omega)) / abs(params.g)


def large_time(params: ModelParams, decay: float = 1e-6) -> float:
    """Earliest time with decay factor below ``decay``."""
    return math.sqrt(2.0 * math.log(1.0 / decay) * params.alpha0) / abs(params.gchi)


def purity(rho: DensityMatrix2) -> float:
    return rho.purity


@dataclass(frozen=True, eq=False)
class DecoherenceSeries:
    times: np.ndarray
    rho: np.ndarray  # (n, 2, 2)
    bloch: np.ndarray  # (n, 3)
    decay: np.ndarray
    basis: str = ATOMIC_BASIS

    def __post_init__(self):
        if np.any(np.diff(self.times) < 0):
            raise ValueError("times must be sorted ascending")
        for r in self.rho:
            DensityMatrix2.from_array(r)

    @property
    def coherence(self) -> np.ndarray:
        return np.abs(self.rho[:, 0, 1])

    def densities(self) -> list[DensityMatrix2]:
        return [DensityMatrix2.from_array(r) for r in self.rho]

    def columns(self) -> dict:
        """CSV columns in the fixed order of ``CSV_COLUMNS``."""
        return {
            "t": self.times,
            "rho_aa": self.rho[:, 0, 0].real,
            "re_rho_ab": self.rho[:, 0, 1].real,
            "im_rho_ab": self.rho[:, 0, 1].imag,
            "r_x": self.bloch[:, 0],
            "r_y": self.bloch[:, 1],
            "r_z": self.bloch[:, 2],
            "decay_factor": self.decay,
        }

    def to_dict(self) -> dict:
        cols = {k: np.asarray(v).tolist() for k, v in self.columns().items()}
        cols["basis"] = self.basis
        cols["coherence"] = self.coherence.tolist()
        return cols


def bloch_components(params: ModelParams, qubit: QubitAmplitudes, times) -> np.ndarray:
    """Bloch vector per time, shape ``(n, 3)``, from the closed-form expressions."""
    t = np.asarray(times, dtype=float)
    a, b = qubit.alpha, qubit.beta
    sym = (a * b.conjugate() + b * a.conjugate()).real
    anti_i = (1j * (a * b.conjugate() - b * a.conjugate())).real
    d = decay_factor(params, t)
    w = params.omega0 * t
    rx = sym * np.cos(w) + anti_i * np.sin(w) * d
    ry = -sym * np.sin(w) + anti_i * np.cos(w) * d
    rz = (abs(a) ** 2 - abs(b) ** 2) * d
    return np.stack([rx, ry, rz], -1)


def bloch_series(params: ModelParams, qubit: QubitAmplitudes, times) -> DecoherenceSeries:
    times = np.asarray(times, dtype=float)
    rho = np.array([reduced_density_closed(params, qubit, t).as_array() for t in times])
    return DecoherenceSeries(times, rho, bloch_components(params, qubit, times),
                             decay_factor(params, times), ATOMIC_BASIS)


# ---------------------------------------------------------------------------
# Pointer-basis coherences
# ---------------------------------------------------------------------------


def _check_pointer_coeffs(alpha_p, beta_p) -> tuple[complex, complex]:
    alpha_p, beta_p = complex(alpha_p), complex(beta_p)
    norm = abs(alpha_p) ** 2 + abs(beta_p) ** 2
    if abs(norm - 1.0) > 1e-12:
        raise NormalizationError(f"|alpha'|^2 + |beta'|^2 = {norm!r}, expected 1")
    return alpha_p, beta_p


def rho12_pointer_basis(params: ModelParams, alpha_p, beta_p, t):
    """Off-diagonal element ``<+(t0)|rho|-(t0)>`` for all times (vectorized in ``t``)."""
    alpha_p, beta_p = _check_pointer_coeffs(alpha_p, beta_p)
    t = np.asarray(t, dtype=float)
    d = decay_factor(params, t)
    w = params.omega0 * t
    osc = (abs(beta_p) ** 2 - abs(alpha_p) ** 2) * 0.5j * np.sin(w)
    return (osc + alpha_p * beta_p.conjugate() * np.cos(0.5 * w) ** 2 * d
            + beta_p * alpha_p.conjugate() * np.sin(0.5 * w) ** 2 * d)


def rho12_short_time(params: ModelParams, alpha_p, beta_p, t):
    """Leading behaviour for ``t << 1/omega0``: ``alpha' conj(beta') * decay``."""
    alpha_p, beta_p = _check_pointer_coeffs(alpha_p, beta_p)
    return alpha_p * beta_p.conjugate() * decay_factor(params, t)


def rho12_asymptotic(params: ModelParams, alpha_p, beta_p, t):
    """Long-time oscillation ``(|beta'|^2 - |alpha'|^2) (i/2) sin(omega0 t)``."""
    alpha_p, beta_p = _check_pointer_coeffs(alpha_p, beta_p)
    t = np.asarray(t, dtype=float)
    return (abs(beta_p) ** 2 - abs(alpha_p) ** 2) * 0.5j * np.sin(params.omega0 * t)


def density_from_pointer_states(params: ModelParams, alpha_p, beta_p, t: float) -> DensityMatrix2:
    """Atomic-basis density matrix assembled from the evolved pointer states.

    ``rho = |a'|^2 |+><+| + |b'|^2 |-><-| + a' b'* O |+><-| + b' a'* O |-><+|``,
    with ``|+-(t)>`` the evolved system pointer states and ``O`` the overlap of
    the environment pointer states.
    """
    alpha_p, beta_p = _check_pointer_coeffs(alpha_p, beta_p)
    plus = pointer_states_system(params, t, 1).as_array()
    minus = pointer_states_system(params, t, -1).as_array()
    o = float(env_overlap(params, t))
    rho = (abs(alpha_p) ** 2 * np.outer(plus, plus.conj())
           + abs(beta_p) ** 2 * np.outer(minus, minus.conj())
           + alpha_p * beta_p.conjugate() * o * np.outer(plus, minus.conj())
           + beta_p * alpha_p.conjugate() * o * np.outer(minus, plus.conj()))
    return DensityMatrix2.from_array(rho)


def to_pointer_basis(rho: DensityMatrix2) -> DensityMatrix2:
    """Express ``rho`` in the ``|+-(t0)>`` basis."""
    return DensityMatrix2.from_array(_POINTER_U.T @ rho.as_array() @ _POINTER_U)


def from_pointer_basis(rho: DensityMatrix2) -> DensityMatrix2:
    return DensityMatrix2.from_array(_POINTER_U @ rho.as_array() @ _POINTER_U.T)


def rho12_pointer_from_states(params: ModelParams, alpha_p, beta_p, t: float) -> complex:
    rho = to_pointer_basis(density_from_pointer_states(params, alpha_p, beta_p, t))
    return rho.rho_ab


def pointer_basis_series(params: ModelParams, alpha_p, beta_p, times) -> DecoherenceSeries:
    """Series of the reduced density matrix written in the ``|+-(t0)>`` basis."""
    alpha_p, beta_p = _check_pointer_coeffs(alpha_p, beta_p)
    times = np.asarray(times, dtype=float)
    qubit = QubitAmplitudes.from_pointer_basis(alpha_p, beta_p)
    rho = np.array([to_pointer_basis(reduced_density_closed(params, qubit, t)).as_array()
                    for t in times])
    bloch = np.array([bloch_from_density(r).as_array() for r in rho])
    return DecoherenceSeries(times, rho, bloch, decay_factor(params, times), POINTER_BASIS)


@dataclass(frozen=True)
class Revival:
    time: float
    magnitude: float


def find_revivals(times, rho12, tau_dec: float | None = None,
                  drop_fraction: float = 0.1) -> list[Revival]:
    """Local maxima of ``|rho12|`` after the initial decay.

    The search starts once ``|rho12|`` first falls below ``drop_fraction``
    of its initial value, or after ``tau_dec`` when ``rho12(0) == 0``.
    """
    times = np.asarray(times, dtype=float)
    mag = np.abs(np.asarray(rho12))
    if mag[0] > 0:
        below = np.nonzero(mag < drop_fraction * mag[0])[0]
        if below.size == 0:
            return []
        start = int(below[0])
    else:
        if tau_dec is None:
            raise ValueError("tau_dec is required when rho12(0) = 0")
        start = int(np.searchsorted(times, tau_dec))
    out = []
    for i in range(max(start, 1), len(mag) - 1):
        if mag[i] > mag[i - 1] and mag[i] >= mag[i + 1]:
            out.append(Revival(float(times[i]), float(mag[i])))
    return out
