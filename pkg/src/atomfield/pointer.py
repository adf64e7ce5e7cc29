"""Search for pointer states of a two-level system from a propagator ansatz.

Given ``U = E1|a><a| + E2|a><b| + E3|b><a| + E4|b><b|`` and an initial field
state ``Phi``, the composite state is ``A(t)|a> + B(t)|b>`` with
``A = (alpha E1 + beta E2) Phi`` and ``B = (alpha E3 + beta E4) Phi``.
An initial qubit state is a pointer state when ``A`` and ``B`` stay parallel.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .analytic import GFunction, EOperators
from .decoherence import decoherence_time
from .errors import NotParallel, RepresentationMismatch
from .model_core import FOCK, POSITION, EnvWavefunction, ModelParams, QubitAmplitudes

Applier = Callable[[EnvWavefunction, float], EnvWavefunction]

POINTER_THRESHOLD = 1e-6
G_THRESHOLD = 1e-8
#: neighbours must exceed a minimum by at least this much; suppresses
#: roundoff-level "minima" on flat plateaus.
MIN_CONTRAST = 1e-12
_TINY = 1e-30


@dataclass(frozen=True)
class PropagatorAnsatz:
    """Four environment-operator appliers plus the representation they act on.

    ``representation`` is ``"position"``, ``"fock"`` or ``None`` for appliers
    that work on either.
    """

    e1: Applier
    e2: Applier
    e3: Applier
    e4: Applier
    label: str = "custom"
    representation: Optional[str] = None

    @property
    def appliers(self) -> tuple:
        return self.e1, self.e2, self.e3, self.e4

    def check_env(self, env: EnvWavefunction):
        if self.representation is not None and env.representation != self.representation:
            raise RepresentationMismatch(
                f"{self.label} ansatz acts on {self.representation} states, "
                f"got {env.representation}"
            )

    def apply_all(self, env: EnvWavefunction, t: float) -> tuple:
        self.check_env(env)
        return tuple(op(env, t) for op in self.appliers)

    def identity_residual(self, probe: EnvWavefunction) -> float:
        """``max`` deviation from ``E1 = E4 = 1, E2 = E3 = 0`` at ``t = 0``."""
        u1, u2, u3, u4 = self.apply_all(probe, 0.0)
        v = probe.values
        return float(max(np.max(np.abs(u1.values - v)), np.max(np.abs(u4.values - v)),
                         np.max(np.abs(u2.values)), np.max(np.abs(u3.values))))


def atom_field_ansatz(params: ModelParams) -> PropagatorAnsatz:
    """Closed-form strong-coupling operators, acting on position-grid states."""
    ops = EOperators(params)

    def make(fn):
        def apply(env: EnvWavefunction, t: float) -> EnvWavefunction:
            return env.with_values(fn(t, env.grid.x) * env.values)
        return apply

    return PropagatorAnsatz(make(ops.e1), make(ops.e2), make(ops.e3), make(ops.e4),
                            "atom-field", POSITION)


def trivial_ansatz() -> PropagatorAnsatz:
    """No interaction: ``E1 = E4 = 1``, ``E2 = E3 = 0``."""
    def ident(env, t):
        return env

    def zero(env, t):
        return env.with_values(np.zeros_like(env.values))

    return PropagatorAnsatz(ident, zero, zero, ident, "trivial", None)


def jcm_operators(g: float, cutoff: int) -> PropagatorAnsatz:
    """Resonant Jaynes-Cummings operators (rotating-wave approximation).

    ``E1 = cos(g t sqrt(n+1))``, ``E2 = -i sin(g t sqrt(n+1))/sqrt(n+1) a``,
    ``E3 = -i a^dag sin(g t sqrt(n+1))/sqrt(n+1)``, ``E4 = cos(g t sqrt(n))``.
    ``E3`` maps ``n = cutoff`` out of the truncated space; that amplitude is
    dropped, so unitarity holds only for states with no weight near the cutoff.
    """
    if cutoff < 1:
        raise ValueError("cutoff must be >= 1")
    g = float(g)
    root = np.sqrt(np.arange(cutoff + 1, dtype=float))
    root1 = np.sqrt(np.arange(1, cutoff + 2, dtype=float))

    def check(env):
        if env.representation != FOCK:
            raise RepresentationMismatch("JCM operators act on Fock states")
        if env.cutoff != cutoff:
            raise RepresentationMismatch(f"state cutoff {env.cutoff} != {cutoff}")

    def e1(env, t):
        check(env)
        return env.with_values(np.cos(g * t * root1) * env.values)

    def e2(env, t):
        check(env)
        c = env.values
        out = np.zeros_like(c)
        out[:-1] = -1j * np.sin(g * t * root1[:-1]) * c[1:]
        return env.with_values(out)

    def e3(env, t):
        check(env)
        c = env.values
        out = np.zeros_like(c)
        out[1:] = -1j * np.sin(g * t * root[1:]) * c[:-1]
        return env.with_values(out)

    def e4(env, t):
        check(env)
        return env.with_values(np.cos(g * t * root) * env.values)

    return PropagatorAnsatz(e1, e2, e3, e4, "jcm", FOCK)


def compute_ab(ansatz: PropagatorAnsatz, qubit: QubitAmplitudes, env: EnvWavefunction,
               t: float) -> tuple[EnvWavefunction, EnvWavefunction]:
    """Unnormalized branch vectors ``A(t)`` and ``B(t)``."""
    u1, u2, u3, u4 = ansatz.apply_all(env, t)
    al, be = qubit.alpha, qubit.beta
    return (env.with_values(al * u1.values + be * u2.values),
            env.with_values(al * u3.values + be * u4.values))


def _defect_from_gram(ab, aa, bb):
    """Vectorized defect from ``<B,A>``, ``||A||^2``, ``||B||^2``."""
    ab, aa, bb = np.asarray(ab), np.asarray(aa, dtype=float), np.asarray(bb, dtype=float)
    degenerate = (aa <= _TINY) | (bb <= _TINY)
    with np.errstate(divide="ignore", invalid="ignore"):
        d = 1.0 - np.abs(ab) ** 2 / (aa * bb)
    d = np.where(degenerate, 0.0, d)
    return np.clip(d, 0.0, 1.0)


def parallelism_defect(a: EnvWavefunction, b: EnvWavefunction) -> float:
    """``1 - |<B,A>|^2 / (||A||^2 ||B||^2)``; zero when either branch vanishes."""
    return float(_defect_from_gram(b.inner(a), a.norm2(), b.norm2()))


def extract_g(a: EnvWavefunction, b: EnvWavefunction, t: float = float("nan"),
              threshold: float = G_THRESHOLD) -> GFunction:
    """Scalar ``G = <B,A> / ||B||^2`` relating parallel branches.

    Raises
    ------
    NotParallel
        If the defect exceeds ``threshold``: ``G`` is then an operator, and the
        initial state is not a pointer state.
    """
    d = parallelism_defect(a, b)
    if d > threshold:
        raise NotParallel(f"parallelism defect {d:.3e} > {threshold:g}")
    nb = b.norm2()
    if nb <= _TINY:
        raise NotParallel("B vanishes; G is undefined")
    return GFunction(np.array([t]), np.array([b.inner(a) / nb]), True)


# ---------------------------------------------------------------------------
# Bloch-sphere scan
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScanPoint:
    theta: float
    phi: float
    defect: float

    def qubit(self) -> QubitAmplitudes:
        return QubitAmplitudes.from_bloch(self.theta, self.phi)

    def to_dict(self) -> dict:
        return {"theta": self.theta, "phi": self.phi, "defect": self.defect}


@dataclass(frozen=True, eq=False)
class ScanResult:
    """Max-over-times defect on a ``(theta, phi)`` grid.

    ``minima`` lists every strict local minimum (periodic in ``phi``, each pole
    counted once); ``candidates`` are those below ``threshold``.
    """

    thetas: np.ndarray
    phis: np.ndarray
    defect: np.ndarray
    times: np.ndarray
    minima: tuple
    threshold: float = POINTER_THRESHOLD
    label: str = ""

    @property
    def candidates(self) -> list[ScanPoint]:
        return [p for p in self.minima if p.defect < self.threshold]

    def csv_text(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["theta", "phi", "defect"])
        for i, th in enumerate(self.thetas):
            for j, ph in enumerate(self.phis):
                w.writerow([f"{th:.16e}", f"{ph:.16e}", f"{self.defect[i, j]:.16e}"])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "threshold": self.threshold,
            "resolution": [len(self.thetas), len(self.phis)],
            "minima": [p.to_dict() for p in self.minima],
            "candidates": [p.to_dict() for p in self.candidates],
        }


def default_scan_times(params: ModelParams, n_log: int = 25, n_periods: int = 3) -> np.ndarray:
    """Log-spaced samples on ``[1e-3, 10] * tau_dec`` plus quarter periods of ``omega0``."""
    tau = decoherence_time(params)
    log_part = tau * np.logspace(-3, 1, n_log)
    quarter = 0.5 * math.pi / params.omega0
    periodic = quarter * np.arange(1, 4 * n_periods + 1)
    return np.unique(np.concatenate([log_part, periodic]))


def _local_minima(thetas, phis, defect) -> list[ScanPoint]:
    n_t, n_p = defect.shape
    pole = [abs(math.sin(th)) < 1e-12 for th in thetas]
    out = []
    for i in range(n_t):
        if pole[i]:
            js = [0]
        else:
            js = range(n_p)
        for j in js:
            v = defect[i, j]
            neigh = []
            for di in (-1, 0, 1):
                ii = i + di
                if not 0 <= ii < n_t:
                    continue
                if pole[ii]:
                    if ii != i:
                        neigh.extend(defect[ii, :].tolist())
                    continue
                if pole[i]:
                    neigh.extend(defect[ii, :].tolist())
                    continue
                for dj in (-1, 0, 1):
                    if di == 0 and dj == 0:
                        continue
                    neigh.append(defect[ii, (j + dj) % n_p])
            if neigh and all(v < n - MIN_CONTRAST for n in neigh):
                out.append(ScanPoint(float(thetas[i]), float(phis[j]), float(v)))
    return sorted(out, key=lambda p: p.defect)


def scan_bloch_sphere(ansatz: PropagatorAnsatz, env: EnvWavefunction, times: Sequence[float],
                      resolution: int = 16, theta_offset: float = 0.0,
                      phi_offset: float = 0.0,
                      threshold: float = POINTER_THRESHOLD) -> ScanResult:
    """Evaluate the max-over-times parallelism defect on the Bloch sphere.

    The grid is ``theta_i = theta_offset + pi i / resolution`` (``i = 0..resolution``,
    kept inside ``[0, pi]``) and ``phi_j = phi_offset + 2 pi j / resolution``.
    With zero offsets and even ``resolution`` it contains ``(|a> +- |b>)/sqrt(2)``.

    Work per time is four applier calls plus a 4x4 Gram matrix; every grid
    point then follows from bilinear forms in ``(alpha, beta)``.
    """
    if resolution < 8:
        raise ValueError("resolution must be >= 8")
    times = np.asarray(times, dtype=float)
    if times.size == 0:
        raise ValueError("times must be nonempty")
    thetas = theta_offset + math.pi * np.arange(resolution + 1) / resolution
    thetas = thetas[(thetas >= 0) & (thetas <= math.pi + 1e-15)]
    phis = phi_offset + 2 * math.pi * np.arange(resolution) / resolution
    alpha = np.cos(thetas / 2)[:, None] * np.ones_like(phis)[None, :]
    beta = np.sin(thetas / 2)[:, None] * np.exp(1j * phis)[None, :]
    ca, cb = np.conj(alpha), np.conj(beta)

    worst = np.zeros(alpha.shape)
    for t in times:
        u = ansatz.apply_all(env, float(t))
        gram = np.array([[ui.inner(uj) for uj in u] for ui in u])  # <u_i|u_j>
        ab = (ca * alpha * gram[2, 0] + ca * beta * gram[2, 1]
              + cb * alpha * gram[3, 0] + cb * beta * gram[3, 1])
        aa = (ca * alpha * gram[0, 0] + ca * beta * gram[0, 1]
              + cb * alpha * gram[1, 0] + cb * beta * gram[1, 1]).real
        bb = (ca * alpha * gram[2, 2] + ca * beta * gram[2, 3]
              + cb * alpha * gram[3, 2] + cb * beta * gram[3, 3]).real
        worst = np.maximum(worst, _defect_from_gram(ab, aa, bb))
    minima = _local_minima(thetas, phis, worst)
    return ScanResult(thetas, phis, worst, times, tuple(minima), threshold, ansatz.label)


def angular_distance(theta1, phi1, theta2, phi2):
    """Great-circle distance between two Bloch directions."""
    c = (np.cos(theta1) * np.cos(theta2)
         + np.sin(theta1) * np.sin(theta2) * np.cos(np.asarray(phi1) - phi2))
    return np.arccos(np.clip(c, -1.0, 1.0))
