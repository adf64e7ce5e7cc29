"""Command-line entry point: ``atomfield <command> --config run.toml``.

Exit codes: 0 success, 1 library failure (for example no converged cutoff),
2 configuration error, 3 regime FAIL, 4 acceptance breach, 5 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .config import RunConfig, load
from .decoherence import (
    bloch_series,
    decoherence_time,
    find_revivals,
    pointer_basis_series,
    rho12_asymptotic,
    rho12_pointer_basis,
    rho12_short_time,
)
from .errors import AtomFieldError, ConfigError, ZeroCoupling
from .model_core import PositionGrid, coherent_state, gaussian_package
from .oracle import compare_with_analytic, convergence_report, doubling_cutoffs
from .pointer import (
    angular_distance,
    atom_field_ansatz,
    default_scan_times,
    jcm_operators,
    scan_bloch_sphere,
    trivial_ansatz,
)

log = logging.getLogger("atomfield")

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_REGIME = 3
EXIT_ACCEPTANCE = 4
EXIT_IO = 5

PASS, WARN, FAIL = "PASS", "WARN", "FAIL"
WARN_FLOOR = 10.0

FIDELITY_MIN = 0.99
RHO_AB_MAX_ERROR = 0.01


class OutputError(Exception):
    pass


# ---------------------------------------------------------------------------
# regime check
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RegimeReport:
    """Ratios ``r1 = omega0/omega`` and ``r2 = (g chi)^2 / omega0^2``."""

    r1: float
    r2: float
    threshold: float
    status: str
    message: str

    def to_dict(self) -> dict:
        return {"r1": self.r1, "r2": self.r2, "threshold": self.threshold,
                "status": self.status, "message": self.message}


def _grade(r: float, threshold: float) -> str:
    if r >= threshold:
        return PASS
    if r >= WARN_FLOOR:
        return WARN
    return FAIL


def regime_report(config: RunConfig) -> RegimeReport:
    p = config.params
    r1 = p.omega0 / p.omega
    r2 = p.gchi ** 2 / p.omega0 ** 2
    if p.g == 0.0:
        return RegimeReport(r1, r2, config.threshold, FAIL,
                            "g = 0: zero coupling, the atom and field never interact")
    grades = [_grade(r1, config.threshold), _grade(r2, config.threshold)]
    status = FAIL if FAIL in grades else WARN if WARN in grades else PASS
    msg = (f"omega0/omega = {r1:.6g} ({grades[0]}), "
           f"(g chi)^2/omega0^2 = {r2:.6g} ({grades[1]})")
    return RegimeReport(r1, r2, config.threshold, status, msg)


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------


def fmt(v: float) -> str:
    """17 significant digits, round-trip exact."""
    return f"{float(v):.16e}"


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


def write_csv(path: Path, columns: dict) -> None:
    names = list(columns)
    data = [np.asarray(columns[k], dtype=float) for k in names]
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(names)
            for row in zip(*data):
                w.writerow([fmt(v) for v in row])
    except OSError as exc:
        raise OutputError(f"{path}: {exc.strerror}") from exc


def write_json(path: Path, obj) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(_jsonable(obj), fh, indent=2, sort_keys=True)
            fh.write("\n")
    except OSError as exc:
        raise OutputError(f"{path}: {exc.strerror}") from exc


def _out_dir(config: RunConfig, override: Optional[str]) -> Path:
    path = Path(override or config.directory)
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OutputError(f"{path}: cannot create output directory ({exc.strerror})") from exc
    return path


def _tau(config: RunConfig) -> Optional[float]:
    try:
        return decoherence_time(config.params)
    except ZeroCoupling:
        return None


def _metadata(config: RunConfig, command: str, **extra) -> dict:
    meta = {
        "command": command,
        "version": __version__,
        "config_path": config.source,
        "config": config.to_dict(),
        "tau_dec": _tau(config),
        "regime": regime_report(config).to_dict(),
    }
    meta.update(extra)
    return meta


def _grid(config: RunConfig) -> PositionGrid:
    if config.x_max is not None:
        return PositionGrid.symmetric(config.x_max, config.n_points)
    return PositionGrid.for_gaussian(config.params.alpha0, config.n_points)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_validate(config: RunConfig, out: Optional[str] = None,
                 require_regime: bool = False) -> int:
    report = regime_report(config)
    print(f"{report.status}: {report.message}")
    if out is not None:
        write_json(_out_dir(config, out) / "validate.json", _metadata(config, "validate"))
    if report.status == FAIL and require_regime:
        return EXIT_REGIME
    return EXIT_OK


def cmd_evolve(config: RunConfig, out: Optional[str] = None) -> int:
    times = config.require_time().samples()
    series = bloch_series(config.params, config.qubit, times)
    d = _out_dir(config, out)
    if "csv" in config.formats:
        write_csv(d / "evolve.csv", series.columns())
    if "json" in config.formats:
        write_json(d / "evolve.json", series.to_dict())
    write_json(d / "metadata.json", _metadata(config, "evolve"))
    print(f"wrote {len(times)} samples to {d}")
    return EXIT_OK


def _scan_setup(config: RunConfig):
    spec = config.scan
    if spec.ansatz == "jcm":
        env = coherent_state(math.sqrt(spec.jcm_mean_photons), spec.jcm_cutoff)
        ansatz = jcm_operators(config.params.g, spec.jcm_cutoff)
    else:
        env = gaussian_package(config.params.alpha0, _grid(config))
        ansatz = atom_field_ansatz(config.params) if spec.ansatz == "atom-field" else trivial_ansatz()
    if spec.times is not None:
        times = np.array(spec.times)
    else:
        times = default_scan_times(config.params)
    return ansatz, env, times


def scan_self_test(result, ansatz_name: str) -> list[str]:
    """Problems with a built-in ansatz scan; empty when the expected minima are present."""
    problems = []
    if ansatz_name == "atom-field":
        cands = result.candidates
        if len(cands) != 2:
            problems.append(f"expected 2 pointer minima, found {len(cands)}")
        for phi in (0.0, math.pi):
            dist = [float(angular_distance(c.theta, c.phi, math.pi / 2, phi)) for c in cands]
            if not dist or min(dist) > 1e-9:
                problems.append(f"no pointer minimum at theta = pi/2, phi = {phi:.6g}")
    elif ansatz_name == "trivial":
        worst = float(np.max(result.defect))
        if worst > 1e-12:
            problems.append(f"trivial ansatz defect {worst:.3e} is not zero")
    else:
        if not result.minima:
            problems.append("no defect minima found for the JCM ansatz")
    return problems


def cmd_pointer_scan(config: RunConfig, out: Optional[str] = None,
                     self_test: bool = False) -> int:
    ansatz, env, times = _scan_setup(config)
    result = scan_bloch_sphere(ansatz, env, times, config.scan.resolution)
    d = _out_dir(config, out)
    try:
        (d / "pointer_scan.csv").write_text(result.csv_text(), encoding="utf-8")
    except OSError as exc:
        raise OutputError(f"{d / 'pointer_scan.csv'}: {exc.strerror}") from exc
    write_json(d / "pointer_minima.json", result.to_dict())
    write_json(d / "metadata.json", _metadata(config, "pointer-scan", scan_times=times))
    for p in result.candidates:
        print(f"pointer candidate theta={p.theta:.12g} phi={p.phi:.12g} defect={p.defect:.3e}")
    if self_test:
        problems = scan_self_test(result, config.scan.ansatz)
        for msg in problems:
            print(f"self-test FAIL: {msg}")
        if problems:
            return EXIT_ACCEPTANCE
        print("self-test PASS")
    return EXIT_OK


def cmd_decohere(config: RunConfig, out: Optional[str] = None) -> int:
    times = config.require_time().samples()
    p = config.params
    alpha_p, beta_p = config.qubit.pointer_coefficients()
    series = pointer_basis_series(p, alpha_p, beta_p, times)
    rho12 = rho12_pointer_basis(p, alpha_p, beta_p, times)
    short = rho12_short_time(p, alpha_p, beta_p, times)
    late = rho12_asymptotic(p, alpha_p, beta_p, times)
    cols = {
        "t": times,
        "rho11": series.rho[:, 0, 0].real,
        "re_rho12": rho12.real,
        "im_rho12": rho12.imag,
        "abs_rho12": np.abs(rho12),
        "re_rho12_short": np.real(short),
        "im_rho12_short": np.imag(short),
        "re_rho12_late": np.real(late),
        "im_rho12_late": np.imag(late),
        "decay_factor": series.decay,
    }
    d = _out_dir(config, out)
    if "csv" in config.formats:
        write_csv(d / "decohere.csv", cols)
    revivals = find_revivals(times, rho12, _tau(config))
    if "json" in config.formats:
        write_json(d / "decohere.json", {
            **{k: v for k, v in cols.items()},
            "revivals": [{"time": r.time, "magnitude": r.magnitude} for r in revivals],
        })
    write_json(d / "metadata.json", _metadata(config, "decohere",
                                              pointer_coefficients=[alpha_p, beta_p]))
    print(f"wrote {len(times)} samples to {d}; {len(revivals)} revivals")
    return EXIT_OK


def cmd_compare(config: RunConfig, out: Optional[str] = None) -> int:
    """Closed form against exact propagation; exit 3 or 4 on an acceptance breach.

    A breach is reported as exit 3 when the regime check does not PASS (the
    approximation is simply outside its domain) and as exit 4 otherwise.
    """
    times = config.require_time().samples()
    p = config.params
    conv = None
    if config.cutoff is not None:
        cutoff = config.cutoff
    else:
        conv = convergence_report(p, p.alpha0, float(times[-1]),
                                  doubling_cutoffs(config.cutoff_start, config.max_cutoff))
        cutoff = conv.converged_cutoff
    cmp = compare_with_analytic(p, config.qubit, times, cutoff)
    regime = regime_report(config)
    ok = cmp.min_fidelity >= FIDELITY_MIN and cmp.max_rho_ab_abs_error <= RHO_AB_MAX_ERROR
    summary = {
        "cutoff": cutoff,
        "convergence": conv.to_dict() if conv else None,
        "min_fidelity": cmp.min_fidelity,
        "max_rho_ab_abs_error": cmp.max_rho_ab_abs_error,
        "fidelity_threshold": FIDELITY_MIN,
        "rho_ab_threshold": RHO_AB_MAX_ERROR,
        "acceptance": ok,
        "regime": regime.status,
        "verdict": "ok" if ok else ("regime violated" if regime.status != PASS
                                    else "in-regime breach"),
    }
    d = _out_dir(config, out)
    write_csv(d / "compare.csv", {
        "t": cmp.times,
        "fidelity": cmp.fidelity,
        "rho_ab_abs_error": cmp.rho_ab_abs_error,
        "rho_ab_error": cmp.rho_ab_error,
        "rz_error": cmp.rz_error,
        "analytic_weight": cmp.analytic_weight,
    })
    write_json(d / "compare_summary.json", summary)
    write_json(d / "metadata.json", _metadata(config, "compare"))
    print(f"cutoff {cutoff}: min fidelity {cmp.min_fidelity:.6f}, "
          f"max |rho_ab| error {cmp.max_rho_ab_abs_error:.3e}, regime {regime.status}: "
          f"{summary['verdict']}")
    if ok:
        return EXIT_OK
    return EXIT_REGIME if regime.status != PASS else EXIT_ACCEPTANCE


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="atomfield", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("validate", "evolve", "pointer-scan", "decohere", "compare"):
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True, metavar="PATH")
        sp.add_argument("--out", metavar="DIR", help="overrides output.directory")
        sp.add_argument("--require-regime", action="store_true",
                        help="exit 3 unless the regime check passes")
        if name == "pointer-scan":
            sp.add_argument("--self-test", action="store_true",
                            help="exit 4 if the expected built-in ansatz minima are absent")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        config = load(args.config)
        if args.require_regime and args.command != "validate":
            report = regime_report(config)
            if report.status == FAIL:
                print(f"FAIL: {report.message}", file=sys.stderr)
                return EXIT_REGIME
        if args.command == "validate":
            return cmd_validate(config, args.out, args.require_regime)
        if args.command == "evolve":
            return cmd_evolve(config, args.out)
        if args.command == "pointer-scan":
            return cmd_pointer_scan(config, args.out, args.self_test)
        if args.command == "decohere":
            return cmd_decohere(config, args.out)
        return cmd_compare(config, args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OutputError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except AtomFieldError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
