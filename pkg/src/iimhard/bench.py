"""Benchmark harness: budget sweeps (ENH) and protect-set sweeps (TEH).

Every (method, sweep value) cell becomes one row. A cell that cannot run
(class mismatch, search cap) is kept with ``skipped`` set to the reason.
"""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import asdict, dataclass, field
from importlib import metadata
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .cascade import final_failed_mask
from .estimators import solve_enh, solve_teh
from .exact import DEFAULT_MAX_SUBSETS, EnhInstance, SearchSpaceTooLarge, TehInstance, k_most_vulnerable
from .ilp import encode_enh_ilp, encode_teh_ilp, format_lp
from .restricted import IdrClassError
from .system import System, load_system

METHODS = ("exact", "heuristic", "case1", "case2", "ilp-export")
CSV_HEADER = ("dataset", "mode", "method", "sweep", "quality", "seconds")


class BoundViolation(AssertionError):
    """A heuristic scored better than the exact optimum."""


@dataclass
class BenchmarkSpec:
    system: System | str | Path
    mode: str = "enh"
    methods: Sequence[str] = ("exact", "heuristic")
    initial_failed: Optional[Sequence[str]] = None
    K: Optional[int] = None  # None with no initial_failed: smallest K killing >= |E|/2
    sweep: Optional[Sequence[int]] = None
    protect: Optional[Sequence[str]] = None  # TEH: fixed protect set instead of sampling
    rng_seed: int = 0
    dataset: Optional[str] = None
    max_subsets: int = DEFAULT_MAX_SUBSETS
    lp_dir: Optional[str | Path] = None

    def __post_init__(self):
        if self.mode not in ("enh", "teh"):
            raise ValueError("mode must be 'enh' or 'teh'")
        bad = [m for m in self.methods if m not in METHODS]
        if bad:
            raise ValueError(f"unknown methods {bad}; choose from {list(METHODS)}")


@dataclass
class BenchmarkRow:
    dataset: str
    mode: str
    method: str
    sweep: int
    quality: Optional[int]
    seconds: Optional[float]
    hardened: tuple[str, ...] = ()
    protect: tuple[str, ...] = ()
    skipped: Optional[str] = None


@dataclass
class BenchmarkReport:
    rows: list[BenchmarkRow] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def cell(self, method: str, sweep: int) -> BenchmarkRow:
        for r in self.rows:
            if r.method == method and r.sweep == sweep:
                return r
        raise KeyError((method, sweep))

    def to_dict(self) -> dict:
        rows = []
        for r in self.rows:
            d = asdict(r)
            d["hardened"] = list(r.hardened)
            d["protect"] = list(r.protect)
            rows.append(d)
        return {"metadata": self.metadata, "rows": rows}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in self.rows:
            quality = "" if r.quality is None else r.quality
            seconds = "" if r.seconds is None else f"{r.seconds:.6f}"
            w.writerow([r.dataset, r.mode, r.method, r.sweep, quality, seconds])
        return buf.getvalue()

    def write(self, csv_path=None, json_path=None):
        if csv_path:
            Path(csv_path).write_text(self.to_csv(), encoding="utf-8")
        if json_path:
            Path(json_path).write_text(self.to_json() + "\n", encoding="utf-8")


def _version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "unknown"


def auto_vulnerable(system: System, max_subsets: int = DEFAULT_MAX_SUBSETS):
    """Smallest K whose K-most-vulnerable set kills at least half the entities."""
    n = len(system)
    for K in range(1, n + 1):
        vs = k_most_vulnerable(system, K, max_subsets)
        if 2 * len(vs.killed) >= n:
            return K, vs
    return n, k_most_vulnerable(system, n, max_subsets)


def default_sweep(upper: int, count: int = 5) -> list[int]:
    """Up to ``count`` evenly spread integers in ``[1, upper]``."""
    if upper < 1:
        return []
    return sorted({int(round(v)) for v in np.linspace(1, upper, count)})


def _check_bounds(report: BenchmarkReport, mode: str):
    done = {(r.method, r.sweep): r for r in report.rows if r.skipped is None and r.quality is not None}
    for (method, sweep), r in done.items():
        ex = done.get(("exact", sweep))
        if method == "exact" or ex is None:
            continue
        if mode == "enh" and r.quality > ex.quality:
            raise BoundViolation(
                f"{method} protected {r.quality} > exact {ex.quality} at budget {sweep}"
            )
        if mode == "teh" and r.quality < ex.quality:
            raise BoundViolation(f"{method} |H|={r.quality} < exact {ex.quality} at |P|={sweep}")


def run_benchmark(spec: BenchmarkSpec) -> BenchmarkReport:
    system = spec.system
    dataset = spec.dataset
    if not isinstance(system, System):
        dataset = dataset or Path(system).stem
        system = load_system(system)
    dataset = dataset or "system"

    meta = {"tool_version": _version(), "rng_seed": spec.rng_seed, "mode": spec.mode,
            "dataset": dataset, "n_entities": len(system), "caps_hit": []}
    report = BenchmarkReport(metadata=meta)
    if not spec.methods:
        return report

    if spec.initial_failed is not None:
        seed = frozenset(spec.initial_failed)
        system.mask(seed)  # validates labels
        meta["seed_selection"] = "explicit"
    else:
        if spec.K is None:
            K, vs = auto_vulnerable(system, spec.max_subsets)
            meta["seed_selection"] = "auto"
        else:
            K, vs = spec.K, k_most_vulnerable(system, spec.K, spec.max_subsets)
            meta["seed_selection"] = "k-most-vulnerable"
        meta["K"] = K
        meta["vulnerable_method"] = vs.method
        seed = vs.entities
    killed = system.decode(final_failed_mask(system, system.mask(seed)))
    meta["initial_failed"] = sorted(seed)
    meta["kill_set_size"] = len(killed)

    if spec.mode == "teh" and spec.protect is not None:
        fixed = tuple(sorted(set(spec.protect)))
        system.mask(fixed)
        sweep = [len(fixed)]
        upper = len(system)
    elif spec.mode == "enh":
        upper = len(system)
        sweep = list(spec.sweep) if spec.sweep is not None else default_sweep(max(1, len(seed) - 1))
    else:
        upper = len(killed)
        sweep = list(spec.sweep) if spec.sweep is not None else default_sweep(len(killed) - 1)
    for v in sweep:
        if not 1 <= v <= upper:
            raise ValueError(f"sweep value {v} outside [1, {upper}]")
    meta["sweep"] = sweep

    rng = np.random.default_rng(spec.rng_seed)
    pool = sorted(killed)
    protects = {}
    if spec.mode == "teh" and spec.protect is not None:
        protects[sweep[0]] = fixed
    elif spec.mode == "teh":
        for v in sweep:
            protects[v] = tuple(sorted(str(x) for x in rng.choice(pool, size=v, replace=False)))

    for v in sweep:
        if spec.mode == "enh":
            inst = EnhInstance(system, seed, v)
        else:
            inst = TehInstance(system, seed, protects[v])
        for method in spec.methods:
            report.rows.append(_run_cell(spec, system, dataset, method, v, inst, protects.get(v, ())))

    meta["caps_hit"] = sorted({f"{r.method}@{r.sweep}" for r in report.rows
                               if r.skipped and r.skipped.startswith("cap")})
    _check_bounds(report, spec.mode)
    return report


def _run_cell(spec, system, dataset, method, v, inst, protect) -> BenchmarkRow:
    row = BenchmarkRow(dataset, spec.mode, method, v, None, None, protect=protect)
    started = time.perf_counter()
    try:
        if method == "ilp-export":
            enc = encode_enh_ilp(inst) if spec.mode == "enh" else encode_teh_ilp(inst)
            text = format_lp(enc)
            row.seconds = time.perf_counter() - started
            if spec.lp_dir is not None:
                out = Path(spec.lp_dir) / f"{dataset}_{spec.mode}_{v}.lp"
                out.parent.mkdir(parents=True, exist_ok=True)
                out.write_text(text, encoding="utf-8")
            return row
        solve = solve_enh if spec.mode == "enh" else solve_teh
        rep = solve(inst, method, spec.max_subsets)
    except SearchSpaceTooLarge as exc:
        row.skipped = f"cap exceeded: {exc}"
        return row
    except IdrClassError as exc:
        row.skipped = f"not applicable: {exc}"
        return row
    except Exception as exc:  # recorded per cell; the sweep goes on
        row.skipped = f"error: {type(exc).__name__}: {exc}"
        return row
    row.seconds = time.perf_counter() - started
    row.quality = rep.protected if spec.mode == "enh" else len(rep.hardened)
    row.hardened = tuple(sorted(rep.hardened))
    return row
