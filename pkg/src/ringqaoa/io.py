"""Schedule files, CSV tables and run manifests."""
from __future__ import annotations

import csv
import datetime as _dt
import hashlib
import json
import math
import sys
from dataclasses import asdict, dataclass, field, is_dataclass
from importlib import metadata
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from .pseudospin import AngleSchedule
from .schedules import FAMILIES, ContinuousSchedule


class ScheduleFormatError(ValueError):
    """Schema violation in a schedule file; the message names the offending field."""


def schedule_to_dict(sched: AngleSchedule | ContinuousSchedule) -> dict:
    if isinstance(sched, AngleSchedule):
        # float() of a numpy scalar keeps every bit; json writes repr (17 digits max)
        return {"P": sched.P, "gamma": [float(g) for g in sched.gamma], "beta": [float(b) for b in sched.beta]}
    if isinstance(sched, ContinuousSchedule):
        return {"family": sched.family, "C": float(sched.parameter_C), "tau": float(sched.total_time_tau)}
    raise TypeError(f"cannot serialise {type(sched).__name__}")


def _number_list(obj: dict, key: str, path: str) -> list[float]:
    value = obj[key]
    if not isinstance(value, list):
        raise ScheduleFormatError(f"{path}: field {key!r} must be a list of numbers")
    for i, v in enumerate(value):
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            raise ScheduleFormatError(f"{path}: field {key!r}[{i}] = {v!r} is not a finite number")
    return [float(v) for v in value]


def schedule_from_dict(obj: Any, path: str = "<schedule>") -> AngleSchedule | ContinuousSchedule:
    if not isinstance(obj, dict):
        raise ScheduleFormatError(f"{path}: top level must be a JSON object")
    if "family" in obj:
        missing = {"family", "C", "tau"} - obj.keys()
        if missing:
            raise ScheduleFormatError(f"{path}: continuous schedule lacks field(s) {sorted(missing)}")
        if obj["family"] not in FAMILIES:
            raise ScheduleFormatError(f"{path}: field 'family' = {obj['family']!r}, expected one of {FAMILIES}")
        for key in ("C", "tau"):
            v = obj[key]
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
                raise ScheduleFormatError(f"{path}: field {key!r} = {v!r} is not a finite number")
        if obj["tau"] <= 0:
            raise ScheduleFormatError(f"{path}: field 'tau' = {obj['tau']!r} must be positive")
        try:
            return ContinuousSchedule(obj["family"], float(obj["C"]), float(obj["tau"]))
        except ValueError as exc:
            raise ScheduleFormatError(f"{path}: {exc}") from exc
    missing = {"P", "gamma", "beta"} - obj.keys()
    if missing:
        raise ScheduleFormatError(f"{path}: angle schedule lacks field(s) {sorted(missing)}")
    gamma = _number_list(obj, "gamma", path)
    beta = _number_list(obj, "beta", path)
    if len(gamma) != len(beta):
        raise ScheduleFormatError(
            f"{path}: field 'gamma' has length {len(gamma)} but field 'beta' has length {len(beta)}"
        )
    P = obj["P"]
    if isinstance(P, bool) or not isinstance(P, int) or P != len(gamma):
        raise ScheduleFormatError(f"{path}: field 'P' = {P!r} does not match len(gamma) = {len(gamma)}")
    if P < 1:
        raise ScheduleFormatError(f"{path}: field 'P' must be >= 1")
    durations = np.array(gamma) + np.array(beta)
    if np.any(durations < 0):
        bad = (np.flatnonzero(durations < 0) + 1).tolist()
        raise ScheduleFormatError(f"{path}: negative step duration gamma_m + beta_m at m = {bad}")
    return AngleSchedule(np.array(gamma), np.array(beta))


def write_schedule(path: str | Path, sched: AngleSchedule | ContinuousSchedule) -> Path:
    path = Path(path)
    path.write_text(json.dumps(schedule_to_dict(sched), indent=2) + "\n", encoding="utf-8")
    return path


def read_schedule(path: str | Path) -> AngleSchedule | ContinuousSchedule:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScheduleFormatError(f"{path}: malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return schedule_from_dict(obj, str(path))


def write_csv(path: str | Path, columns: Sequence[str], rows: Iterable[Sequence], meta: dict | None = None) -> Path:
    """UTF-8 CSV preceded by ``# key: value`` metadata lines."""
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as fh:
        for key, value in (meta or {}).items():
            fh.write(f"# {key}: {value}\n")
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return path


def read_csv(path: str | Path) -> tuple[dict, list[str], list[list[str]]]:
    meta, lines = {}, []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.startswith("#"):
            key, _, value = line[1:].partition(":")
            meta[key.strip()] = value.strip()
        elif line:
            lines.append(line)
    rows = list(csv.reader(lines))
    return meta, rows[0], rows[1:]


def sha256_file(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def package_version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "0+unknown"


def _jsonable(obj):
    if is_dataclass(obj):
        return {k: _jsonable(v) for k, v in asdict(obj).items()}
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, Path):
        return str(obj)
    return obj


def _now() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")


@dataclass
class RunManifest:
    argv: list[str]
    config: dict
    rng_seed: int
    version: str = field(default_factory=package_version)
    started: str = field(default_factory=_now)
    finished: str | None = None
    outputs: dict[str, str] = field(default_factory=dict)
    python: str = field(default_factory=lambda: sys.version.split()[0])

    def record(self, path: str | Path) -> None:
        path = Path(path)
        self.outputs[path.name] = sha256_file(path)

    def write(self, path: str | Path) -> Path:
        self.finished = _now()
        path = Path(path)
        path.write_text(json.dumps(_jsonable(asdict(self)), indent=2) + "\n", encoding="utf-8")
        return path

    @classmethod
    def read(cls, path: str | Path) -> "RunManifest":
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(**obj)
