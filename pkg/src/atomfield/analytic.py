"""Closed-form interaction-picture propagator for omega << omega0 << g chi.

In the position representation the four environment operators are plain
functions of ``(t, x)``::

    E1 = cos(g chi x t) e^{+i omega0 t/2}     E2 = -i sin(g chi x t) e^{+i omega0 t/2}
    E3 = -i sin(g chi x t) e^{-i omega0 t/2}  E4 = cos(g chi x t) e^{-i omega0 t/2}

and the propagator is ``U = E1|a><a| + E2|a><b| + E3|b><a| + E4|b><b|``.
Everything here is therefore pointwise on the grid, O(n_points) per time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NormalizationError, RepresentationMismatch
from .model_core import (
    INTERACTION,
    CompositeState,
    EnvWavefunction,
    ModelParams,
    PositionGrid,
    QubitAmplitudes,
    gaussian_package,
)

SQRT_HALF = 1.0 / math.sqrt(2.0)


@dataclass(frozen=True)
class EOperators:
    """The four diagonal-in-x environment operators of the propagator."""

    params: ModelParams

    def _parts(self, t, x):
        t = np.asarray(t, dtype=float)
        x = np.asarray(x, dtype=float)
        arg = self.params.gchi * x * t
        half = 0.5 * self.params.omega0 * t
        return np.cos(arg), np.sin(arg), np.exp(1j * half)

    def e1(self, t, x):
        c, _, ph = self._parts(t, x)
        return c * ph

    def e2(self, t, x):
        _, s, ph = self._parts(t, x)
        return -1j * s * ph

    def e3(self, t, x):
        _, s, ph = self._parts(t, x)
        return -1j * s * np.conj(ph)

    def e4(self, t, x):
        c, _, ph = self._parts(t, x)
        return c * np.conj(ph)

    def all(self, t, x):
        c, s, ph = self._parts(t, x)
        return c * ph, -1j * s * ph, -1j * s * np.conj(ph), c * np.conj(ph)

    def matrix(self, t, x) -> np.ndarray:
        """``[[E1, E2], [E3, E4]]`` with shape ``broadcast(t, x).shape + (2, 2)``."""
        e1, e2, e3, e4 = self.all(t, x)
        return np.stack([np.stack([e1, e2], -1), np.stack([e3, e4], -1)], -2)


def e_operators(params: ModelParams) -> EOperators:
    return EOperators(params)


def _rhs_first_order(ops, t, x):
    k = ops.params.gchi * x
    w0 = ops.params.omega0
    e1, e2, e3, e4 = ops.all(t, x)
    up, down = np.exp(1j * w0 * t), np.exp(-1j * w0 * t)
    return np.array([k * up * e3, k * up * e4, k * down * e1, k * down * e2])


def _rhs_second_order(ops, t, x):
    k = ops.params.gchi * x
    w0 = ops.params.omega0
    e1, e2, e3, e4 = ops.all(t, x)
    up, down = np.exp(1j * w0 * t), np.exp(-1j * w0 * t)
    return np.array([
        -k * k * e1 + k * w0 * up * e3,
        -k * k * e2 + k * w0 * up * e4,
        -k * k * e3 - k * w0 * down * e1,
        -k * k * e4 - k * w0 * down * e2,
    ])


def ode_residual(params: ModelParams, t: float, x: float, dt: float | None = None,
                 order: int = 2) -> float:
    """Relative finite-difference residual of the closed forms in their equations of motion.

    ``order=1`` checks the coupled first-order system ``i dE/dt = g chi x e^{+-i omega0 t} E'``;
    ``order=2`` checks the second-order equations obtained by eliminating the partner
    operator, ``d2E1/dt2 = -(g chi x)^2 E1 + g chi x omega0 e^{i omega0 t} E3`` and its
    three analogues.  The closed forms solve the second-order system up to a relative
    error ``<= (omega0 / (2 g chi x))^2`` and the first-order system up to
    ``omega0 / (2 g chi x)``.

    Returns ``max_k |LHS_k - RHS_k| / max_k |RHS_k|`` using centered differences.
    The default step minimizes truncation plus roundoff, leaving a difference
    floor near ``sqrt(eps * g chi x t)`` for order 2.
    """
    ops = EOperators(params)
    scale = max(abs(params.gchi * x), params.omega0)
    # phase roundoff grows with the argument; balance it against truncation
    eps = np.finfo(float).eps * max(1.0, scale * abs(t))
    if order == 1:
        dt = dt if dt is not None else (3.0 * eps) ** (1 / 3) / scale
        plus, minus = np.array(ops.all(t + dt, x)), np.array(ops.all(t - dt, x))
        lhs = 1j * (plus - minus) / (2 * dt)
        rhs = _rhs_first_order(ops, t, x)
    elif order == 2:
        dt = dt if dt is not None else (12.0 * eps) ** 0.25 / scale
        plus, minus = np.array(ops.all(t + dt, x)), np.array(ops.all(t - dt, x))
        mid = np.array(ops.all(t, x))
        lhs = (plus - 2 * mid + minus) / dt ** 2
        rhs = _rhs_second_order(ops, t, x)
    else:
        raise ValueError(f"order must be 1 or 2, got {order}")
    if dt <= 0:
        raise ValueError("dt must be positive")
    denom = np.max(np.abs(rhs))
    err = np.max(np.abs(lhs - rhs))
    return float(err / denom) if denom > 0 else float(err)


def _require_position(env: EnvWavefunction):
    if not env.is_position:
        raise RepresentationMismatch("analytic propagator needs a position-grid environment")


def apply_propagator(params: ModelParams, alpha: complex, beta: complex,
                     env: EnvWavefunction, t: float) -> tuple[np.ndarray, np.ndarray]:
    """Branch samples ``A = (alpha E1 + beta E2) env``, ``B = (alpha E3 + beta E4) env``."""
    _require_position(env)
    e1, e2, e3, e4 = EOperators(params).all(t, env.grid.x)
    return (alpha * e1 + beta * e2) * env.values, (alpha * e3 + beta * e4) * env.values


def evolve_composite(params: ModelParams, qubit: QubitAmplitudes, env: EnvWavefunction,
                     t: float) -> CompositeState:
    """Interaction-picture state ``psi_a(x,t)|a> + psi_b(x,t)|b>`` from a product initial state."""
    if t < 0:
        raise ValueError("t must be >= 0")
    a, b = apply_propagator(params, qubit.alpha, qubit.beta, env, t)
    return CompositeState(env.with_values(a), env.with_values(b), INTERACTION, t)


def evolve_composite_samples(params: ModelParams, qubit: QubitAmplitudes,
                             env: EnvWavefunction, times) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized :func:`evolve_composite`: arrays of shape ``(n_times, n_points)``."""
    _require_position(env)
    times = np.asarray(times, dtype=float)[:, None]
    e1, e2, e3, e4 = EOperators(params).all(times, env.grid.x[None, :])
    al, be = qubit.alpha, qubit.beta
    return (al * e1 + be * e2) * env.values, (al * e3 + be * e4) * env.values


def g_of_x(params: ModelParams, qubit: QubitAmplitudes, t: float, x) -> np.ndarray:
    """Pointwise ratio ``psi_a(x,t) / psi_b(x,t)``; x-independent only for pointer states."""
    e1, e2, e3, e4 = EOperators(params).all(t, np.asarray(x, dtype=float))
    al, be = qubit.alpha, qubit.beta
    return (al * e1 + be * e2) / (al * e3 + be * e4)


@dataclass(frozen=True)
class GFunction:
    """Samples of the relating factor ``A(t) = G(t) B(t)``.

    ``is_scalar`` records whether ``G`` is a number (pointer condition holds)
    rather than an x-dependent operator.
    """

    times: np.ndarray
    values: np.ndarray
    is_scalar: bool


def pointer_g_function(params: ModelParams, sign: int, times) -> GFunction:
    """``G(t) = sign * exp(i omega0 t)`` for the initial states ``alpha = sign * beta``."""
    _check_sign(sign)
    times = np.asarray(times, dtype=float)
    return GFunction(times, sign * np.exp(1j * params.omega0 * times), True)


def _check_sign(sign: int):
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign!r}")


def pointer_states_system(params: ModelParams, t: float, sign: int) -> QubitAmplitudes:
    """``|+-(t)> = (e^{i omega0 t}|a> +- |b>) / sqrt(2)``."""
    _check_sign(sign)
    return QubitAmplitudes(SQRT_HALF * np.exp(1j * params.omega0 * t), sign * SQRT_HALF)


def pointer_states_env(params: ModelParams, t: float, sign: int,
                       grid: PositionGrid) -> EnvWavefunction:
    """``Phi_+-(x,t) = (2 alpha0/pi)^(1/4) exp(-alpha0 x^2 -+ i (g chi x +- omega0/2) t)``."""
    _check_sign(sign)
    base = gaussian_package(params.alpha0, grid)
    x = grid.x
    phase = np.exp(-1j * sign * (params.gchi * x + sign * 0.5 * params.omega0) * t)
    return base.with_values(base.values * phase)


def env_overlap(params: ModelParams, t: float) -> float:
    """``<Phi_-(t)|Phi_+(t)> = exp(-(g chi t)^2 / (2 alpha0))``."""
    if np.any(np.asarray(t) < 0):
        raise ValueError("t must be >= 0")
    return np.exp(-(params.gchi * np.asarray(t, dtype=float)) ** 2 / (2.0 * params.alpha0))


def evolve_pointer_decomposition(params: ModelParams, alpha_p: complex, beta_p: complex,
                                 grid: PositionGrid, t: float) -> CompositeState:
    """Assemble ``alpha' |+(t)>|Phi_+(t)> + beta' |-(t)>|Phi_-(t)>`` into branches.

    ``alpha'`` and ``beta'`` are the coefficients on ``|+-(t0)> = (|a> +- |b>)/sqrt(2)``.
    """
    alpha_p, beta_p = complex(alpha_p), complex(beta_p)
    norm = abs(alpha_p) ** 2 + abs(beta_p) ** 2
    if abs(norm - 1.0) > 1e-12:
        raise NormalizationError(f"|alpha'|^2 + |beta'|^2 = {norm!r}, expected 1")
    plus, minus = pointer_states_system(params, t, 1), pointer_states_system(params, t, -1)
    phi_p = pointer_states_env(params, t, 1, grid).values
    phi_m = pointer_states_env(params, t, -1, grid).values
    psi_a = alpha_p * plus.alpha * phi_p + beta_p * minus.alpha * phi_m
    psi_b = alpha_p * plus.beta * phi_p + beta_p * minus.beta * phi_m
    env = gaussian_package(params.alpha0, grid)
    return CompositeState(env.with_values(psi_a), env.with_values(psi_b), INTERACTION, t)
