"""Run configuration read from a TOML file.

Grammar (all tables optional unless noted, keys order-insensitive)::

    seed = 0                      # integer, recorded in metadata

    [params]                      # required
    omega0 = 1.0                  # > 0
    omega  = 1e-3                 # > 0
    g      = 0.7                  # or `gchi = 100.0` (exactly one of the two)
    m      = 1.0                  # > 0
    alpha0 = 5e-4                 # > 0; omitted means the oscillator ground state m*omega/2

    [qubit]                       # one of three forms, default alpha = 1, beta = 0
    alpha = [1.0, 0.0]            # [re, im]
    beta  = [0.0, 0.0]
    # theta = 1.5707963267948966  # Bloch angles
    # phi   = 0.0
    # alpha_p = [1.0, 0.0]        # coefficients on (|a> +- |b>)/sqrt(2)
    # beta_p  = [0.0, 0.0]

    [grid]
    x_max    = 12.0               # omitted: 8 / sqrt(alpha0)
    n_points = 2048

    [fock]
    cutoff     = 256              # omitted: chosen by the convergence scan
    start      = 128              # doubling scan start
    max_cutoff = 8192

    [time]                        # required for evolve, decohere, compare
    t_max     = 5.0               # > 0
    n_samples = 101               # >= 2
    spacing   = "linear"          # or "log"
    t_min     = 1e-3              # first sample for log spacing

    [output]
    directory = "out"
    formats   = ["csv", "json"]

    [regime]
    threshold = 100.0

    [scan]
    ansatz     = "atom-field"     # or "trivial", "jcm"
    resolution = 16
    times      = [..]             # omitted: log samples around tau_dec plus quarter periods
    jcm_mean_photons = 20.0
    jcm_cutoff       = 80
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import AtomFieldError, ConfigError
from .model_core import ModelParams, QubitAmplitudes

LINEAR = "linear"
LOG = "log"
FORMATS = ("csv", "json")
ANSATZE = ("atom-field", "trivial", "jcm")

_TOP_KEYS = {"seed", "params", "qubit", "grid", "fock", "time", "output", "regime", "scan"}
_KEYS = {
    "params": {"omega0", "omega", "g", "gchi", "m", "alpha0"},
    "qubit": {"alpha", "beta", "theta", "phi", "alpha_p", "beta_p"},
    "grid": {"x_max", "n_points"},
    "fock": {"cutoff", "start", "max_cutoff"},
    "time": {"t_max", "n_samples", "spacing", "t_min"},
    "output": {"directory", "formats"},
    "regime": {"threshold"},
    "scan": {"ansatz", "resolution", "times", "jcm_mean_photons", "jcm_cutoff"},
}


@dataclass(frozen=True)
class TimeSpec:
    t_max: float
    n_samples: int
    spacing: str = LINEAR
    t_min: Optional[float] = None

    def samples(self) -> np.ndarray:
        if self.spacing == LOG:
            t_min = self.t_min if self.t_min is not None else self.t_max * 1e-3
            return np.logspace(math.log10(t_min), math.log10(self.t_max), self.n_samples)
        return np.linspace(0.0, self.t_max, self.n_samples)

    def to_dict(self) -> dict:
        return {"t_max": self.t_max, "n_samples": self.n_samples, "spacing": self.spacing,
                "t_min": self.t_min}


@dataclass(frozen=True)
class ScanSpec:
    ansatz: str = "atom-field"
    resolution: int = 16
    times: Optional[tuple] = None
    jcm_mean_photons: float = 20.0
    jcm_cutoff: int = 80

    def to_dict(self) -> dict:
        return {"ansatz": self.ansatz, "resolution": self.resolution,
                "times": list(self.times) if self.times is not None else None,
                "jcm_mean_photons": self.jcm_mean_photons, "jcm_cutoff": self.jcm_cutoff}


@dataclass(frozen=True)
class RunConfig:
    params: ModelParams
    qubit: QubitAmplitudes
    time: Optional[TimeSpec] = None
    x_max: Optional[float] = None
    n_points: int = 2048
    cutoff: Optional[int] = None
    cutoff_start: int = 128
    max_cutoff: int = 8192
    directory: str = "out"
    formats: tuple = FORMATS
    threshold: float = 100.0
    scan: ScanSpec = field(default_factory=ScanSpec)
    seed: int = 0
    source: Optional[str] = None

    def require_time(self) -> TimeSpec:
        if self.time is None:
            raise ConfigError("time: block is required for this command")
        return self.time

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "params": self.params.to_dict(),
            "qubit": self.qubit.to_dict(),
            "grid": {"x_max": self.x_max, "n_points": self.n_points},
            "fock": {"cutoff": self.cutoff, "start": self.cutoff_start,
                     "max_cutoff": self.max_cutoff},
            "time": self.time.to_dict() if self.time else None,
            "output": {"directory": self.directory, "formats": list(self.formats)},
            "regime": {"threshold": self.threshold},
            "scan": self.scan.to_dict(),
        }


# ---------------------------------------------------------------------------
# field readers
# ---------------------------------------------------------------------------


def _table(doc: dict, name: str, required: bool = False) -> dict:
    if name not in doc:
        if required:
            raise ConfigError(f"{name}: missing required table [{name}]")
        return {}
    t = doc[name]
    if not isinstance(t, dict):
        raise ConfigError(f"{name}: expected a table, got {type(t).__name__}")
    unknown = set(t) - _KEYS[name]
    if unknown:
        raise ConfigError(f"{name}.{sorted(unknown)[0]}: unknown key")
    return t


def _number(t: dict, block: str, key: str, default=None, positive=False, required=False):
    if key not in t:
        if required:
            raise ConfigError(f"{block}.{key}: missing required key")
        return default
    v = t[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{block}.{key}: expected a number, got {v!r}")
    v = float(v)
    if not math.isfinite(v):
        raise ConfigError(f"{block}.{key}: must be finite, got {v!r}")
    if positive and v <= 0:
        raise ConfigError(f"{block}.{key}: must be > 0, got {v!r}")
    return v


def _integer(t: dict, block: str, key: str, default=None, minimum=None):
    if key not in t:
        return default
    v = t[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(f"{block}.{key}: expected an integer, got {v!r}")
    if minimum is not None and v < minimum:
        raise ConfigError(f"{block}.{key}: must be >= {minimum}, got {v}")
    return v


def _complex(t: dict, block: str, key: str) -> complex:
    v = t[key]
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return complex(v)
    if (isinstance(v, list) and len(v) == 2
            and all(isinstance(p, (int, float)) and not isinstance(p, bool) for p in v)):
        return complex(v[0], v[1])
    raise ConfigError(f"{block}.{key}: expected [re, im], got {v!r}")


def _params(doc: dict) -> ModelParams:
    t = _table(doc, "params", required=True)
    omega0 = _number(t, "params", "omega0", positive=True, required=True)
    omega = _number(t, "params", "omega", positive=True, required=True)
    m = _number(t, "params", "m", positive=True, required=True)
    if ("g" in t) == ("gchi" in t):
        raise ConfigError("params.g: give exactly one of `g` or `gchi`")
    alpha0 = _number(t, "params", "alpha0", default=0.5 * m * omega, positive=True)
    try:
        if "g" in t:
            return ModelParams(omega0, omega, _number(t, "params", "g"), m, alpha0)
        return ModelParams.from_gchi(omega0, omega, _number(t, "params", "gchi"), m, alpha0)
    except AtomFieldError as exc:
        raise ConfigError(f"params: {exc}") from exc


def _qubit(doc: dict) -> QubitAmplitudes:
    t = _table(doc, "qubit")
    forms = [k for k in (("alpha", "beta"), ("theta", "phi"), ("alpha_p", "beta_p"))
             if any(x in t for x in k)]
    if not forms:
        return QubitAmplitudes(1.0, 0.0)
    if len(forms) > 1:
        raise ConfigError(f"qubit.{forms[1][0]}: mixes two qubit forms")
    k1, k2 = forms[0]
    for k in (k1, k2):
        if k not in t:
            raise ConfigError(f"qubit.{k}: missing (required together with {k1 if k == k2 else k2})")
    try:
        if k1 == "theta":
            return QubitAmplitudes.from_bloch(_number(t, "qubit", "theta"),
                                              _number(t, "qubit", "phi"))
        a, b = _complex(t, "qubit", k1), _complex(t, "qubit", k2)
        if k1 == "alpha_p":
            return QubitAmplitudes.from_pointer_basis(a, b)
        return QubitAmplitudes(a, b)
    except ConfigError:
        raise
    except (AtomFieldError, ValueError) as exc:
        raise ConfigError(f"qubit.{k1}: {exc}") from exc


def _time(doc: dict) -> Optional[TimeSpec]:
    if "time" not in doc:
        return None
    t = _table(doc, "time")
    if not t:
        raise ConfigError("time: block is empty; t_max and n_samples are required")
    t_max = _number(t, "time", "t_max", positive=True, required=True)
    if "n_samples" not in t:
        raise ConfigError("time.n_samples: missing required key")
    n = _integer(t, "time", "n_samples", minimum=2)
    spacing = t.get("spacing", LINEAR)
    if spacing not in (LINEAR, LOG):
        raise ConfigError(f"time.spacing: expected 'linear' or 'log', got {spacing!r}")
    t_min = _number(t, "time", "t_min", positive=True)
    if t_min is not None and spacing != LOG:
        raise ConfigError("time.t_min: only valid with spacing = 'log'")
    if t_min is not None and t_min >= t_max:
        raise ConfigError(f"time.t_min: must be < t_max, got {t_min!r}")
    return TimeSpec(t_max, n, spacing, t_min)


def _scan(doc: dict) -> ScanSpec:
    t = _table(doc, "scan")
    ansatz = t.get("ansatz", "atom-field")
    if ansatz not in ANSATZE:
        raise ConfigError(f"scan.ansatz: expected one of {', '.join(ANSATZE)}, got {ansatz!r}")
    res = _integer(t, "scan", "resolution", default=16, minimum=8)
    times = None
    if "times" in t:
        v = t["times"]
        if (not isinstance(v, list) or not v
                or not all(isinstance(x, (int, float)) and not isinstance(x, bool) and x >= 0
                           for x in v)):
            raise ConfigError("scan.times: expected a nonempty list of times >= 0")
        times = tuple(float(x) for x in v)
    mean = _number(t, "scan", "jcm_mean_photons", default=20.0, positive=True)
    cutoff = _integer(t, "scan", "jcm_cutoff", default=80, minimum=1)
    return ScanSpec(ansatz, res, times, mean, cutoff)


def parse_config(doc: dict, source: Optional[str] = None) -> RunConfig:
    """Validate a decoded TOML document."""
    unknown = set(doc) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"{sorted(unknown)[0]}: unknown top-level key")
    params = _params(doc)
    qubit = _qubit(doc)
    time = _time(doc)

    grid = _table(doc, "grid")
    x_max = _number(grid, "grid", "x_max", positive=True)
    n_points = _integer(grid, "grid", "n_points", default=2048, minimum=16)

    fock = _table(doc, "fock")
    cutoff = _integer(fock, "fock", "cutoff", minimum=1)
    start = _integer(fock, "fock", "start", default=128, minimum=1)
    max_cutoff = _integer(fock, "fock", "max_cutoff", default=8192, minimum=1)
    if max_cutoff < start:
        raise ConfigError(f"fock.max_cutoff: must be >= fock.start ({start}), got {max_cutoff}")

    out = _table(doc, "output")
    directory = out.get("directory", "out")
    if not isinstance(directory, str) or not directory:
        raise ConfigError(f"output.directory: expected a nonempty string, got {directory!r}")
    formats = out.get("formats", list(FORMATS))
    if (not isinstance(formats, list) or not formats
            or any(f not in FORMATS for f in formats)):
        raise ConfigError(f"output.formats: expected a nonempty subset of {list(FORMATS)}, "
                          f"got {formats!r}")

    regime = _table(doc, "regime")
    threshold = _number(regime, "regime", "threshold", default=100.0, positive=True)

    seed = doc.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise ConfigError(f"seed: expected an integer, got {seed!r}")

    return RunConfig(params, qubit, time, x_max, n_points, cutoff, start, max_cutoff,
                     directory, tuple(dict.fromkeys(formats)), threshold, _scan(doc), seed,
                     source)


def loads(text: str, source: Optional[str] = None) -> RunConfig:
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{source or '<string>'}: {exc}") from exc
    return parse_config(doc, source)


def load(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config ({exc.strerror})") from exc
    return loads(text, str(path))
