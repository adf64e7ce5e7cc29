"""Domain types, the Gaussian field state and position/Fock conversions.

Units are atomic (hbar = 1).  The field quadrature is ``x`` with
``chi * x = a + a^dagger`` and ``chi = sqrt(2 m omega)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterator, Optional

import numpy as np

from .errors import (
    CutoffTooSmall,
    DimensionMismatch,
    GridTooNarrow,
    NonHermitianInput,
    NonPositiveParameter,
    NormalizationError,
    RepresentationMismatch,
)

POSITION = "position"
FOCK = "fock"
SCHRODINGER = "schrodinger"
INTERACTION = "interaction"

QUBIT_NORM_TOL = 1e-12
STATE_NORM_TOL = 1e-10
DENSITY_TOL = 1e-10
BLOCH_TOL = 1e-9
GAUSSIAN_TAIL_TOL = 1e-12
FOCK_NORM_TOL = 1e-8


def _finite(name: str, value) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise NonPositiveParameter(f"{name} must be finite, got {value!r}")
    return value


def _finite_complex(name: str, value) -> complex:
    value = complex(value)
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise NormalizationError(f"{name} must be finite, got {value!r}")
    return value


def _complex_pair(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def _pair_complex(v) -> complex:
    if isinstance(v, (list, tuple)):
        re, im = v
        return complex(float(re), float(im))
    return complex(v)


def _frozen_array(values, dtype=complex) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


# ---------------------------------------------------------------------------
# Parameters and qubit states
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ModelParams:
    """Physical constants of one run.

    ``chi`` and ``delta`` are derived on construction and never passed in.
    ``g`` may be zero or negative; the remaining inputs must be positive.
    """

    omega0: float
    omega: float
    g: float
    m: float
    alpha0: float
    chi: float = field(init=False)
    delta: float = field(init=False)

    def __post_init__(self):
        for name in ("omega0", "omega", "g", "m", "alpha0"):
            object.__setattr__(self, name, _finite(name, getattr(self, name)))
        for name in ("omega0", "omega", "m", "alpha0"):
            if getattr(self, name) <= 0.0:
                raise NonPositiveParameter(
                    f"{name} must be > 0, got {getattr(self, name)!r}"
                )
        object.__setattr__(self, "chi", math.sqrt(2.0 * self.m * self.omega))
        object.__setattr__(self, "delta", self.omega0 - self.omega)

    @classmethod
    def from_gchi(cls, omega0, omega, gchi, m, alpha0) -> "ModelParams":
        """Build parameters from the product ``g * chi`` instead of ``g``."""
        chi = math.sqrt(2.0 * float(m) * float(omega))
        return cls(omega0, omega, float(gchi) / chi, m, alpha0)

    @property
    def gchi(self) -> float:
        return self.g * self.chi

    @property
    def ground_alpha0(self) -> float:
        """Width parameter for which the Gaussian is the oscillator ground state."""
        return 0.5 * self.m * self.omega

    @property
    def x_rms(self) -> float:
        """Standard deviation of ``x`` in the Gaussian package."""
        return 0.5 / math.sqrt(self.alpha0)

    def replace(self, **changes) -> "ModelParams":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        return {
            "omega0": self.omega0,
            "omega": self.omega,
            "g": self.g,
            "m": self.m,
            "alpha0": self.alpha0,
            "chi": self.chi,
            "delta": self.delta,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ModelParams":
        return cls(d["omega0"], d["omega"], d["g"], d["m"], d["alpha0"])


def make_params(omega0, omega, g, m, alpha0) -> ModelParams:
    """Validate inputs and return a :class:`ModelParams`.

    Raises
    ------
    NonPositiveParameter
        If any input is not finite, or ``omega0``, ``omega``, ``m`` or
        ``alpha0`` is not strictly positive.
    """
    return ModelParams(omega0, omega, g, m, alpha0)


@dataclass(frozen=True)
class QubitAmplitudes:
    """Normalized pair ``alpha |a> + beta |b>``."""

    alpha: complex
    beta: complex

    def __post_init__(self):
        a = _finite_complex("alpha", self.alpha)
        b = _finite_complex("beta", self.beta)
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)
        norm = abs(a) ** 2 + abs(b) ** 2
        if abs(norm - 1.0) > QUBIT_NORM_TOL:
            raise NormalizationError(
                f"|alpha|^2 + |beta|^2 = {norm!r}, expected 1"
            )

    @classmethod
    def normalized(cls, alpha, beta) -> "QubitAmplitudes":
        alpha, beta = complex(alpha), complex(beta)
        n = math.sqrt(abs(alpha) ** 2 + abs(beta) ** 2)
        if n == 0.0:
            raise NormalizationError("zero qubit vector")
        return cls(alpha / n, beta / n)

    @classmethod
    def from_bloch(cls, theta: float, phi: float) -> "QubitAmplitudes":
        """``cos(theta/2)|a> + e^{i phi} sin(theta/2)|b>``."""
        return cls(
            complex(math.cos(theta / 2.0)),
            complex(np.exp(1j * phi) * math.sin(theta / 2.0)),
        )

    @classmethod
    def from_pointer_basis(cls, alpha_p, beta_p) -> "QubitAmplitudes":
        """Convert coefficients on ``(|a> +- |b>)/sqrt(2)`` to the ``{|a>,|b>}`` basis."""
        s = 1.0 / math.sqrt(2.0)
        return cls(s * (complex(alpha_p) + complex(beta_p)),
                   s * (complex(alpha_p) - complex(beta_p)))

    def pointer_coefficients(self) -> tuple[complex, complex]:
        """Coefficients ``(alpha', beta')`` on ``(|a> +- |b>)/sqrt(2)``."""
        s = 1.0 / math.sqrt(2.0)
        return s * (self.alpha + self.beta), s * (self.alpha - self.beta)

    def as_array(self) -> np.ndarray:
        return np.array([self.alpha, self.beta], dtype=complex)

    def bloch_vector(self) -> np.ndarray:
        a, b = self.alpha, self.beta
        rab = a * b.conjugate()
        return np.array([2 * rab.real, -2 * rab.imag, abs(a) ** 2 - abs(b) ** 2])

    def to_dict(self) -> dict:
        return {"alpha": _complex_pair(self.alpha), "beta": _complex_pair(self.beta)}

    @classmethod
    def from_dict(cls, d: dict) -> "QubitAmplitudes":
        return cls(_pair_complex(d["alpha"]), _pair_complex(d["beta"]))


# ---------------------------------------------------------------------------
# Grids and environment wavefunctions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PositionGrid:
    """Uniform grid symmetric about ``x = 0``; quadrature is the trapezoid rule."""

    x_min: float
    x_max: float
    n_points: int
    quad_tol: float = 1e-10

    def __post_init__(self):
        x_min = _finite("x_min", self.x_min)
        x_max = _finite("x_max", self.x_max)
        if not x_min < x_max:
            raise GridTooNarrow(f"need x_min < x_max, got {x_min}, {x_max}")
        if x_min != -x_max:
            raise GridTooNarrow("grid must be symmetric about 0 (x_min = -x_max)")
        n = int(self.n_points)
        if n != self.n_points or n < 2:
            raise GridTooNarrow(f"n_points must be an integer >= 2, got {self.n_points!r}")
        object.__setattr__(self, "x_min", x_min)
        object.__setattr__(self, "x_max", x_max)
        object.__setattr__(self, "n_points", n)

    @classmethod
    def symmetric(cls, x_max: float, n_points: int = 2048) -> "PositionGrid":
        return cls(-float(x_max), float(x_max), n_points)

    @classmethod
    def for_gaussian(cls, alpha0: float, n_points: int = 2048, width: float = 8.0) -> "PositionGrid":
        """Default grid ``x_max = width / sqrt(alpha0)``."""
        return cls.symmetric(width / math.sqrt(alpha0), n_points)

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.n_points - 1)

    @cached_property
    def x(self) -> np.ndarray:
        # exact mirror symmetry: x[i] == -x[n-1-i]
        half = np.linspace(self.x_min, self.x_max, self.n_points)
        x = 0.5 * (half - half[::-1])
        x.setflags(write=False)
        return x

    @cached_property
    def weights(self) -> np.ndarray:
        w = np.full(self.n_points, self.dx)
        w[0] = w[-1] = 0.5 * self.dx
        w.setflags(write=False)
        return w

    def integrate(self, f: np.ndarray) -> complex:
        return np.dot(self.weights, f)

    def to_dict(self) -> dict:
        return {"x_min": self.x_min, "x_max": self.x_max, "n_points": self.n_points,
                "dx": self.dx}


@dataclass(frozen=True, eq=False)
class EnvWavefunction:
    """Field state as grid samples ``psi(x_i)`` or Fock coefficients ``c_n``.

    The constructor does not force unit norm so the same type can hold the
    unnormalized branches ``A(t)`` and ``B(t)``; factory functions in this
    module return normalized states.
    """

    representation: str
    values: np.ndarray
    grid: Optional[PositionGrid] = None

    def __post_init__(self):
        values = _frozen_array(self.values)
        if values.ndim != 1:
            raise DimensionMismatch("wavefunction values must be one-dimensional")
        if not np.all(np.isfinite(values)):
            raise NormalizationError("wavefunction contains NaN or Inf")
        if self.representation == POSITION:
            if self.grid is None:
                raise RepresentationMismatch("position wavefunction needs a grid")
            if values.shape[0] != self.grid.n_points:
                raise DimensionMismatch(
                    f"{values.shape[0]} samples on a {self.grid.n_points}-point grid"
                )
        elif self.representation == FOCK:
            if self.grid is not None:
                raise RepresentationMismatch("fock wavefunction takes no grid")
        else:
            raise RepresentationMismatch(f"unknown representation {self.representation!r}")
        object.__setattr__(self, "values", values)

    @classmethod
    def position(cls, values, grid: PositionGrid) -> "EnvWavefunction":
        return cls(POSITION, values, grid)

    @classmethod
    def fock(cls, values) -> "EnvWavefunction":
        return cls(FOCK, values)

    @property
    def is_position(self) -> bool:
        return self.representation == POSITION

    @property
    def cutoff(self) -> int:
        if self.is_position:
            raise RepresentationMismatch("position wavefunction has no Fock cutoff")
        return self.values.shape[0] - 1

    def _check_compatible(self, other: "EnvWavefunction"):
        if self.representation != other.representation:
            raise RepresentationMismatch(
                f"{self.representation} vs {other.representation} wavefunction"
            )
        if self.is_position:
            if self.grid != other.grid:
                raise RepresentationMismatch("wavefunctions live on different grids")
        elif self.values.shape != other.values.shape:
            raise DimensionMismatch("Fock cutoffs differ")

    def inner(self, other: "EnvWavefunction") -> complex:
        """``<self|other>``."""
        self._check_compatible(other)
        if self.is_position:
            return complex(self.grid.integrate(np.conj(self.values) * other.values))
        return complex(np.vdot(self.values, other.values))

    def norm2(self) -> float:
        if self.is_position:
            return float(self.grid.integrate(np.abs(self.values) ** 2))
        return float(np.vdot(self.values, self.values).real)

    def with_values(self, values) -> "EnvWavefunction":
        return EnvWavefunction(self.representation, values, self.grid)

    def scaled(self, c: complex) -> "EnvWavefunction":
        return self.with_values(c * self.values)

    def to_dict(self) -> dict:
        d = {
            "representation": self.representation,
            "values": {"re": self.values.real.tolist(), "im": self.values.imag.tolist()},
        }
        if self.grid is not None:
            d["grid"] = self.grid.to_dict()
        return d


@dataclass(frozen=True, eq=False)
class CompositeState:
    """Entangled state ``psi_a |a> + psi_b |b>`` at a given time."""

    psi_a: EnvWavefunction
    psi_b: EnvWavefunction
    picture: str = INTERACTION
    time: float = 0.0
    check_norm: bool = True

    def __post_init__(self):
        self.psi_a._check_compatible(self.psi_b)
        if self.picture not in (SCHRODINGER, INTERACTION):
            raise ValueError(f"unknown picture {self.picture!r}")
        object.__setattr__(self, "time", _finite("time", self.time))
        if self.check_norm:
            total = self.norm2()
            if abs(total - 1.0) > STATE_NORM_TOL:
                raise NormalizationError(f"composite norm {total!r}, expected 1")

    @classmethod
    def from_fock_vector(cls, vec: np.ndarray, picture: str, time: float,
                         check_norm: bool = True) -> "CompositeState":
        """Split a vector ordered ``|a,0..N>, |b,0..N>``."""
        vec = np.asarray(vec)
        if vec.ndim != 1 or vec.shape[0] % 2:
            raise DimensionMismatch("composite Fock vector must have even length")
        half = vec.shape[0] // 2
        return cls(EnvWavefunction.fock(vec[:half]), EnvWavefunction.fock(vec[half:]),
                   picture, time, check_norm)

    @property
    def representation(self) -> str:
        return self.psi_a.representation

    def norm2(self) -> float:
        return self.psi_a.norm2() + self.psi_b.norm2()

    def gram(self) -> np.ndarray:
        """Gram matrix ``[[<a|a>, <a|b>], [<b|a>, <b|b>]]`` of the two branches."""
        a, b = self.psi_a, self.psi_b
        return np.array([[a.inner(a), a.inner(b)], [b.inner(a), b.inner(b)]])

    def fock_vector(self) -> np.ndarray:
        if self.representation != FOCK:
            raise RepresentationMismatch("state is not in the Fock representation")
        return np.concatenate([self.psi_a.values, self.psi_b.values])

    def to_dict(self) -> dict:
        return {"psi_a": self.psi_a.to_dict(), "psi_b": self.psi_b.to_dict(),
                "picture": self.picture, "time": self.time}


# ---------------------------------------------------------------------------
# Reduced density matrices and Bloch vectors
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DensityMatrix2:
    rho_aa: complex
    rho_ab: complex
    rho_ba: complex
    rho_bb: complex

    def __post_init__(self):
        for name in ("rho_aa", "rho_ab", "rho_ba", "rho_bb"):
            object.__setattr__(self, name, _finite_complex(name, getattr(self, name)))
        if (abs(self.rho_ba - self.rho_ab.conjugate()) > DENSITY_TOL
                or abs(self.rho_aa.imag) > DENSITY_TOL
                or abs(self.rho_bb.imag) > DENSITY_TOL):
            raise NonHermitianInput(f"density matrix not Hermitian: {self.as_array()}")
        tr = (self.rho_aa + self.rho_bb).real
        if abs(tr - 1.0) > DENSITY_TOL:
            raise NormalizationError(f"trace {tr!r}, expected 1")
        ev = self.eigenvalues()
        if ev[0] < -DENSITY_TOL or ev[1] > 1.0 + DENSITY_TOL:
            raise NormalizationError(f"eigenvalues {ev} outside [0, 1]")

    @classmethod
    def from_array(cls, rho) -> "DensityMatrix2":
        rho = np.asarray(rho, dtype=complex)
        if rho.shape != (2, 2):
            raise DimensionMismatch(f"expected a 2x2 matrix, got shape {rho.shape}")
        return cls(rho[0, 0], rho[0, 1], rho[1, 0], rho[1, 1])

    @classmethod
    def pure(cls, qubit: QubitAmplitudes) -> "DensityMatrix2":
        v = qubit.as_array()
        return cls.from_array(np.outer(v, v.conj()))

    def as_array(self) -> np.ndarray:
        return np.array([[self.rho_aa, self.rho_ab], [self.rho_ba, self.rho_bb]])

    def eigenvalues(self) -> np.ndarray:
        m = self.as_array()
        return np.linalg.eigvalsh(0.5 * (m + m.conj().T))

    @property
    def purity(self) -> float:
        m = self.as_array()
        return float(np.trace(m @ m).real)

    def to_dict(self) -> dict:
        return {name: _complex_pair(getattr(self, name))
                for name in ("rho_aa", "rho_ab", "rho_ba", "rho_bb")}


@dataclass(frozen=True)
class BlochVector:
    r_x: float
    r_y: float
    r_z: float

    def __post_init__(self):
        for name in ("r_x", "r_y", "r_z"):
            object.__setattr__(self, name, _finite(name, getattr(self, name)))
        if self.norm2 > 1.0 + BLOCH_TOL:
            raise NormalizationError(f"Bloch vector longer than 1: |R|^2 = {self.norm2!r}")

    @property
    def norm2(self) -> float:
        return self.r_x ** 2 + self.r_y ** 2 + self.r_z ** 2

    def as_array(self) -> np.ndarray:
        return np.array([self.r_x, self.r_y, self.r_z])

    def to_density(self) -> DensityMatrix2:
        """``rho = (I + R . sigma) / 2``."""
        x, y, z = self.r_x, self.r_y, self.r_z
        return DensityMatrix2(0.5 * (1 + z), 0.5 * (x - 1j * y), 0.5 * (x + 1j * y),
                              0.5 * (1 - z))

    def to_dict(self) -> dict:
        return {"r_x": self.r_x, "r_y": self.r_y, "r_z": self.r_z}


def bloch_from_density(rho) -> BlochVector:
    """Bloch components ``R_x = rho_ab + rho_ba``, ``R_y = i(rho_ab - rho_ba)``,
    ``R_z = rho_aa - rho_bb``.

    Accepts a :class:`DensityMatrix2` or any 2x2 array.
    """
    if not isinstance(rho, DensityMatrix2):
        rho = DensityMatrix2.from_array(rho)
    rx = rho.rho_ab + rho.rho_ba
    ry = 1j * (rho.rho_ab - rho.rho_ba)
    rz = rho.rho_aa - rho.rho_bb
    for name, v in (("R_x", rx), ("R_y", ry), ("R_z", rz)):
        if abs(v.imag) > 1e-12:
            raise NonHermitianInput(f"{name} has imaginary part {v.imag!r}")
    return BlochVector(rx.real, ry.real, rz.real)


# ---------------------------------------------------------------------------
# Gaussian package and oscillator eigenfunctions
# ---------------------------------------------------------------------------


def gaussian_tail(alpha0: float, grid: PositionGrid) -> float:
    return math.exp(-alpha0 * grid.x_max ** 2)


def gaussian_package(alpha0: float, grid: PositionGrid) -> EnvWavefunction:
    """``(2 alpha0/pi)^(1/4) exp(-alpha0 x^2)`` sampled on ``grid``.

    Raises
    ------
    GridTooNarrow
        If ``exp(-alpha0 x_max^2)`` is not below 1e-12.
    """
    alpha0 = _finite("alpha0", alpha0)
    if alpha0 <= 0:
        raise NonPositiveParameter(f"alpha0 must be > 0, got {alpha0!r}")
    tail = gaussian_tail(alpha0, grid)
    if tail >= GAUSSIAN_TAIL_TOL:
        raise GridTooNarrow(
            f"Gaussian tail exp(-alpha0 x_max^2) = {tail:.3e} >= {GAUSSIAN_TAIL_TOL:g}; "
            f"use x_max >= {math.sqrt(-math.log(GAUSSIAN_TAIL_TOL) / alpha0):.6g}"
        )
    n0 = (2.0 * alpha0 / math.pi) ** 0.25
    return EnvWavefunction.position(n0 * np.exp(-alpha0 * grid.x ** 2), grid)


def iter_ho_eigenfunctions(x: np.ndarray, mass: float, omega: float,
                           n_max: int) -> Iterator[np.ndarray]:
    """Yield ``phi_0(x) .. phi_{n_max}(x)`` for the oscillator of ``mass``, ``omega``.

    Uses the normalized three-term recurrence, which is stable to large ``n``
    (unlike evaluating Hermite polynomials directly).
    """
    s = math.sqrt(mass * omega)
    xi = s * np.asarray(x, dtype=float)
    prev = None
    # (m omega / pi)^(1/4) exp(-xi^2 / 2)
    cur = math.sqrt(s) * math.pi ** -0.25 * np.exp(-0.5 * xi ** 2)
    yield cur
    for n in range(n_max):
        nxt = math.sqrt(2.0 / (n + 1)) * xi * cur
        if prev is not None:
            nxt -= math.sqrt(n / (n + 1)) * prev
        prev, cur = cur, nxt
        yield cur


def ho_eigenfunctions(x: np.ndarray, mass: float, omega: float, n_max: int) -> np.ndarray:
    """Array of shape ``(n_max + 1, len(x))`` with rows ``phi_n(x)``."""
    return np.array(list(iter_ho_eigenfunctions(x, mass, omega, n_max)))


def project_to_fock(values: np.ndarray, grid: PositionGrid, mass: float, omega: float,
                    cutoff: int) -> np.ndarray:
    """Trapezoid projection ``c_n = int phi_n(x) psi(x) dx`` for ``n <= cutoff``.

    ``values`` may be one sample vector or a stack of shape ``(k, n_points)``;
    the result has shape ``(cutoff + 1,)`` or ``(k, cutoff + 1)``.
    Eigenfunctions are generated on the fly so memory stays ``O(n_points)``.
    """
    values = np.asarray(values, dtype=complex)
    single = values.ndim == 1
    stack = np.atleast_2d(values)
    if stack.shape[1] != grid.n_points:
        raise DimensionMismatch("sample vector does not match the grid")
    weighted = (stack * grid.weights).T
    out = np.empty((stack.shape[0], cutoff + 1), dtype=complex)
    for n, phi in enumerate(iter_ho_eigenfunctions(grid.x, mass, omega, cutoff)):
        out[:, n] = phi @ weighted
    return out[0] if single else out


def fock_to_position(coeffs, grid: PositionGrid, mass: float, omega: float) -> np.ndarray:
    """Synthesize ``sum_n c_n phi_n(x)`` on ``grid``."""
    coeffs = np.asarray(coeffs, dtype=complex)
    out = np.zeros(grid.n_points, dtype=complex)
    for c, phi in zip(coeffs, iter_ho_eigenfunctions(grid.x, mass, omega, len(coeffs) - 1)):
        out += c * phi
    return out


def projection_grid(alpha0: float, params: ModelParams, cutoff: int,
                    points_per_wavelength: float = 8.0, min_points: int = 2048) -> PositionGrid:
    """Grid covering the Gaussian and resolving ``phi_n`` up to ``cutoff``.

    Spacing is chosen so the fastest local oscillation of ``phi_cutoff``
    (wavenumber ``sqrt((2n+1) m omega)``) gets ``points_per_wavelength`` samples.
    """
    x_max = 8.0 / math.sqrt(alpha0)
    k_max = math.sqrt((2 * cutoff + 1) * params.m * params.omega)
    n = int(math.ceil(2 * x_max * k_max * points_per_wavelength / (2 * math.pi))) + 1
    return PositionGrid.symmetric(x_max, max(min_points, n))


def gaussian_to_fock(alpha0: float, params: ModelParams, cutoff: int,
                     grid: Optional[PositionGrid] = None,
                     tol: float = FOCK_NORM_TOL) -> EnvWavefunction:
    """Fock coefficients of the Gaussian package in the oscillator basis of ``params``.

    Coefficients are obtained by trapezoid quadrature on a dense uniform grid
    (see :func:`projection_grid`); odd coefficients are set to zero because the
    integrand is odd.

    Raises
    ------
    CutoffTooSmall
        If ``sum |c_n|^2 < 1 - tol``.
    """
    cutoff = int(cutoff)
    if cutoff < 0:
        raise CutoffTooSmall(f"cutoff must be >= 0, got {cutoff}")
    grid = grid or projection_grid(alpha0, params, cutoff)
    psi = gaussian_package(alpha0, grid)
    c = project_to_fock(psi.values.real, grid, params.m, params.omega, cutoff).real
    c[1::2] = 0.0
    weight = float(np.sum(c ** 2))
    if weight < 1.0 - tol:
        raise CutoffTooSmall(
            f"sum |c_n|^2 = {weight:.12f} at cutoff {cutoff}; need >= 1 - {tol:g}"
        )
    return EnvWavefunction.fock(c.astype(complex))


def coherent_state(amplitude: complex, cutoff: int,
                   tol: float = FOCK_NORM_TOL) -> EnvWavefunction:
    """Truncated coherent state ``|beta>`` with ``beta = amplitude``."""
    amplitude = complex(amplitude)
    c = np.empty(cutoff + 1, dtype=complex)
    c[0] = math.exp(-0.5 * abs(amplitude) ** 2)
    for n in range(1, cutoff + 1):
        c[n] = c[n - 1] * amplitude / math.sqrt(n)
    weight = float(np.sum(np.abs(c) ** 2))
    if weight < 1.0 - tol:
        raise CutoffTooSmall(f"coherent state weight {weight:.12f} at cutoff {cutoff}")
    return EnvWavefunction.fock(c)
