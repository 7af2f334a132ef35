"""Reference data ingestion and result persistence.

The volume table is vendored as a small CSV for deterministic offline runs;
result records are JSON files under results/<digest>/ written atomically
(write to a temp file, then rename).
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Mapping


@dataclass(frozen=True)
class VolumeRecord:
    name: str
    volume: float
    source: str = ""

    def __post_init__(self) -> None:
        if self.volume < 0:
            raise ValueError(f"negative volume for {self.name}")


class VolumeTable:
    def __init__(self, records: list[VolumeRecord]):
        self._by_name: dict[str, VolumeRecord] = {}
        for rec in records:
            if rec.name in self._by_name:
                raise ValueError(f"duplicate volume entry {rec.name!r}")
            self._by_name[rec.name] = rec

    def __contains__(self, name: str) -> bool:
        return name in self._by_name

    def __len__(self) -> int:
        return len(self._by_name)

    def volume(self, name: str) -> float:
        return self._by_name[name].volume

    def get(self, name: str) -> VolumeRecord | None:
        return self._by_name.get(name)

    def names(self) -> list[str]:
        return sorted(self._by_name)


def load_volumes(path: str | Path, source: str | None = None) -> VolumeTable:
    """Parse a CSV volume table with header 'name,volume'."""
    path = Path(path)
    records: list[VolumeRecord] = []
    with open(path, newline="") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise ValueError(f"{path}: empty file, expected a name,volume header")
    header = [h.strip() for h in lines[0].split(",")]
    if header[:2] != ["name", "volume"]:
        raise ValueError(f"{path}: line 1: expected header 'name,volume'")
    for lineno, raw in enumerate(lines[1:], start=2):
        if not raw.strip():
            continue
        parts = [p.strip() for p in raw.split(",")]
        if len(parts) < 2 or not parts[0]:
            raise ValueError(f"{path}: line {lineno}: malformed row {raw!r}")
        try:
            vol = float(parts[1])
        except ValueError:
            raise ValueError(
                f"{path}: line {lineno}: bad volume value {parts[1]!r}"
            ) from None
        records.append(
            VolumeRecord(name=parts[0], volume=vol, source=source or str(path))
        )
    try:
        return VolumeTable(records)
    except ValueError as err:
        raise ValueError(f"{path}: {err}") from None


def census_volumes() -> VolumeTable:
    """The vendored census table."""
    with resources.as_file(
        resources.files("l2torsion").joinpath("data/volumes.csv")
    ) as path:
        return load_volumes(path, source="vendored census table")


# ---------------------------------------------------------------------------
# result records
# ---------------------------------------------------------------------------

TOOLCHAIN_VERSION = "l2torsion 0.1.0"


def spec_digest(spec_json: Mapping) -> str:
    canonical = json.dumps(spec_json, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()[:16]


@dataclass
class ResultRecord:
    spec: dict
    curve_file: str
    fit: dict = field(default_factory=dict)
    bounds: dict = field(default_factory=dict)
    created: str = ""
    version: str = TOOLCHAIN_VERSION

    @property
    def digest(self) -> str:
        return spec_digest(self.spec)

    def to_json(self) -> dict:
        return {
            "digest": self.digest,
            "spec": self.spec,
            "curve_file": self.curve_file,
            "fit": self.fit,
            "bounds": self.bounds,
            "created": self.created,
            "version": self.version,
        }

    @staticmethod
    def from_json(payload: dict) -> "ResultRecord":
        rec = ResultRecord(
            spec=payload["spec"],
            curve_file=payload["curve_file"],
            fit=payload.get("fit", {}),
            bounds=payload.get("bounds", {}),
            created=payload.get("created", ""),
            version=payload.get("version", TOOLCHAIN_VERSION),
        )
        stored = payload.get("digest")
        if stored and stored != rec.digest:
            raise ValueError(
                f"digest mismatch: stored {stored}, recomputed {rec.digest}"
            )
        return rec


def _atomic_write(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=".json")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def store_result(record: ResultRecord, root: str | Path) -> Path:
    """Write results/<digest>/report.json atomically; returns the report path."""
    root = Path(root)
    directory = root / record.digest
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / "report.json"
    _atomic_write(path, json.dumps(record.to_json(), indent=1, sort_keys=True))
    return path


def load_result(path: str | Path) -> ResultRecord:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"no result record at {path}")
    with open(path) as fh:
        raw = fh.read()
    try:
        payload = json.loads(raw)
    except json.JSONDecodeError as err:
        raise ValueError(f"{path}: corrupted JSON at offset {err.pos}: {err.msg}") from None
    return ResultRecord.from_json(payload)


def results_root(override: str | None = None) -> Path:
    """Output root: explicit argument, else $L2T_RESULTS_DIR, else ./results."""
    if override:
        return Path(override)
    env = os.environ.get("L2T_RESULTS_DIR")
    if env:
        return Path(env)
    return Path("results")
