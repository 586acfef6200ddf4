"""Run configuration and persistence of candidates and curves.

Candidates serialize as one JSON object per line; curves as one JSON-lines
file per curve (appendable while a long track runs).  Floats round-trip
losslessly (json emits shortest-repr doubles).  Field order of a candidate
record: family, params, R, lambda, parity, residual, M, N, y0, coeffs,
verification, provenance.
"""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass, field, fields
from pathlib import Path

from . import __version__
from .errors import DomainError
from .search import MaassCandidate
from .system import SolveSettings
from .tracking import DeformationCurve, StepPolicy


@dataclass
class RunConfig:
    """Tunable knobs shared by the CLI subcommands."""

    eps: float = 1e-6
    oversample: float = 1.25
    y0_factor: float = 0.8
    scan_step: float = 0.005
    step_initial: float = 0.005
    step_min: float = 1e-5
    step_max: float = 0.02
    thread_count: int = field(default_factory=lambda: os.cpu_count() or 1)
    output_dir: Path = field(default_factory=Path.cwd)

    def __post_init__(self):
        if not 1e-10 <= self.eps <= 1e-3:
            raise DomainError(f"eps={self.eps} outside [1e-10, 1e-3]")
        for name in ("oversample", "y0_factor", "scan_step", "step_initial",
                     "step_min", "step_max"):
            if getattr(self, name) <= 0:
                raise DomainError(f"{name} must be positive")
        if self.thread_count < 1:
            raise DomainError("thread_count must be a positive integer")
        self.output_dir = Path(self.output_dir)

    def step_policy(self) -> StepPolicy:
        return StepPolicy(initial=self.step_initial, minimum=self.step_min,
                          maximum=self.step_max)


_FLOAT_KEYS = {"eps", "oversample", "y0_factor", "scan_step",
               "step_initial", "step_min", "step_max"}


def parse_config_file(path: str | Path) -> dict:
    """Parse ``key = value`` lines; '#' starts a comment."""
    values: dict = {}
    known = {f.name for f in fields(RunConfig)}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DomainError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in known:
            raise DomainError(f"{path}:{lineno}: unknown key {key!r}")
        if key in _FLOAT_KEYS:
            values[key] = float(value)
        elif key == "thread_count":
            values[key] = int(value)
        else:
            values[key] = value
    return values


def load_config(path: str | Path | None = None, overrides: dict | None = None) -> RunConfig:
    """Config precedence: explicit overrides > config file > defaults.

    The MAASS_THREADS environment variable overrides thread_count below
    explicit flags.
    """
    values: dict = {}
    if path is not None:
        values.update(parse_config_file(path))
    env_threads = os.environ.get("MAASS_THREADS")
    if env_threads:
        values["thread_count"] = int(env_threads)
    for key, val in (overrides or {}).items():
        if val is not None:
            values[key] = val
    return RunConfig(**values)


def candidate_to_record(candidate: MaassCandidate, verification: dict | None = None,
                        provenance_extra: dict | None = None) -> dict:
    settings = candidate.settings
    provenance = {"tool_version": __version__,
                  "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())}
    if settings is not None and settings.sector is not None:
        provenance["sector"] = list(settings.sector)
    if candidate.normalize_index != 1:
        provenance["normalize_index"] = candidate.normalize_index
    provenance.update(provenance_extra or {})
    coeffs = [[n, candidate.coefficients[n].real, candidate.coefficients[n].imag]
              for n in sorted(candidate.coefficients)]
    return {
        "family": candidate.family,
        "params": list(candidate.params),
        "R": candidate.R,
        "lambda": candidate.eigenvalue,
        "parity": candidate.parity,
        "residual": candidate.residual,
        "M": settings.M if settings else None,
        "N": candidate.collocation_size,
        "y0": settings.y0 if settings else None,
        "coeffs": coeffs,
        "verification": verification or {},
        "provenance": provenance,
    }


def record_to_candidate(record: dict) -> MaassCandidate:
    coeffs = {int(n): complex(re, im) for n, re, im in record["coeffs"]}
    sector = record.get("provenance", {}).get("sector")
    settings = None
    if record.get("M") is not None:
        settings = SolveSettings(
            M=int(record["M"]), y0=float(record["y0"]),
            sector=tuple(sector) if sector else None)
    return MaassCandidate(
        family=record["family"],
        params=tuple(record["params"]),
        R=float(record["R"]),
        coefficients=coeffs,
        residual=float(record["residual"]),
        parity=record.get("parity", "unknown"),
        settings=settings,
        collocation_size=int(record.get("N") or 0),
        normalize_index=int(record.get("provenance", {}).get("normalize_index", 1)),
    )


def write_records(path: str | Path, records: list[dict]) -> None:
    with open(path, "w") as fh:
        for record in records:
            fh.write(json.dumps(record) + "\n")


def read_records(path: str | Path) -> list[dict]:
    records = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(json.loads(line))
    return records


def write_curve(path: str | Path, curve: DeformationCurve,
                verification_per_point: list[dict] | None = None) -> None:
    """One JSON-lines file per curve; a header line then one point per line."""
    with open(path, "w") as fh:
        header = {
            "curve": {
                "family": curve.family,
                "free_axes": list(curve.free_axes),
                "termination": curve.termination,
                "num_points": len(curve.points),
            }
        }
        fh.write(json.dumps(header) + "\n")
        for i, cand in enumerate(curve.points):
            ver = verification_per_point[i] if verification_per_point else None
            fh.write(json.dumps(candidate_to_record(cand, ver)) + "\n")


def read_curve(path: str | Path) -> DeformationCurve:
    lines = read_records(path)
    if not lines or "curve" not in lines[0]:
        raise DomainError(f"{path} is not a curve file")
    head = lines[0]["curve"]
    curve = DeformationCurve(
        family=head["family"],
        free_axes=tuple(head["free_axes"]),
        termination=head.get("termination", "unknown"),
    )
    curve.points = [record_to_candidate(rec) for rec in lines[1:]]
    return curve


_PARAM_NAMES = {"gamma222": ("a", "b"), "gamma2222": ("a", "b", "c", "d")}


def export_plot_csv(curve_path: str | Path, out_path: str | Path) -> int:
    """Curve file -> CSV with columns (params..., R); returns the row count."""
    curve = read_curve(curve_path)
    names = _PARAM_NAMES.get(curve.family)
    if names is None:
        names = tuple(f"p{i}" for i in range(len(curve.points[0].params)))
    with open(out_path, "w") as fh:
        fh.write(",".join(names) + ",R\n")
        for cand in curve.points:
            fh.write(",".join(repr(p) for p in cand.params) + f",{cand.R!r}\n")
    return len(curve.points)
