"""CSV/JSON serialization of simulation reports and their run manifests."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Optional

from . import __version__
from .preferences import parse_spec
from .sampling import parse_sampler
from .simulation import BLOCK_SIZE, SimulationConfig, SimulationReport, SpecResult

CSV_COLUMNS = ("spec", "mean_alpha", "gm_growth", "relative_loss")


@dataclass
class RunManifest:
    seed: int
    generations: int
    sampler: str
    specs: list[str]
    cond_base: str = "main"
    tool_version: str = __version__
    duration_s: Optional[float] = None
    workers: int = 1
    block_size: int = BLOCK_SIZE

    @classmethod
    def for_run(cls, cfg: SimulationConfig, duration_s: Optional[float] = None, workers: int = 1) -> "RunManifest":
        return cls(
            seed=cfg.sampler.seed,
            generations=cfg.generations,
            sampler=cfg.sampler.label,
            specs=[s.label for s in cfg.specs],
            cond_base=cfg.sampler.base,
            duration_s=duration_s,
            workers=workers,
        )

    def to_config(self) -> SimulationConfig:
        """Rebuild the simulation configuration this manifest describes."""
        sampler = parse_sampler(self.sampler, seed=self.seed, base=self.cond_base)
        return SimulationConfig(self.generations, sampler, tuple(parse_spec(s) for s in self.specs))


def report_to_dict(report: SimulationReport, manifest: RunManifest) -> dict:
    return {
        "manifest": asdict(manifest),
        "rows": [asdict(r) for r in report.rows],
        "gm_growth_optimal": report.gm_growth_optimal,
    }


def report_to_json(report: SimulationReport, manifest: RunManifest) -> str:
    return json.dumps(report_to_dict(report, manifest), indent=2) + "\n"


def report_to_csv(report: SimulationReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in report.rows:
        writer.writerow([r.spec, f"{r.mean_alpha:.6g}", f"{r.gm_growth:.6g}", f"{r.relative_loss:.6g}"])
    return buf.getvalue()


def manifest_path_for(csv_path: Path) -> Path:
    return csv_path.with_name(csv_path.stem + ".manifest.json")


def write_report(path, report: SimulationReport, manifest: RunManifest, fmt: str = "csv") -> list[Path]:
    """Write the report and its manifest; returns the paths written.

    JSON reports embed the manifest. CSV reports get a sidecar
    ``<stem>.manifest.json`` next to them.
    """
    path = Path(path)
    if fmt == "json":
        path.write_text(report_to_json(report, manifest))
        return [path]
    if fmt != "csv":
        raise ValueError(f"unknown format {fmt!r}")
    path.write_text(report_to_csv(report), newline="")
    side = manifest_path_for(path)
    side.write_text(json.dumps(asdict(manifest), indent=2) + "\n")
    return [path, side]


def read_csv_report(path) -> list[SpecResult]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
            raise ValueError(f"unexpected CSV header {reader.fieldnames!r}")
        return [
            SpecResult(row["spec"], float(row["mean_alpha"]), float(row["gm_growth"]), float(row["relative_loss"]))
            for row in reader
        ]


def read_json_report(path) -> tuple[list[SpecResult], RunManifest, float]:
    data = json.loads(Path(path).read_text())
    rows = [SpecResult(**r) for r in data["rows"]]
    return rows, RunManifest(**data["manifest"]), data["gm_growth_optimal"]
