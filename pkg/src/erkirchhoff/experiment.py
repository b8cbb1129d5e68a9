"""Monte Carlo harness: realizations of X_n over a grid of densities and sizes.

Every realization is seeded by :func:`derive_seed`, a pure function of
``(master_seed, scenario_id, n, replicate)``, so results do not depend on
execution order or on the number of worker threads.

Seed function (version ``sha256-trunc64/1``): the UTF-8 string
``"erkirchhoff-seed/1|{master}|{scenario_id}|{n}|{replicate}"`` (decimal
integers) is hashed with SHA-256 (FIPS 180-4) and the first 8 digest bytes
are read as a big-endian unsigned integer.
"""

import csv
import hashlib
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from typing import Optional, Tuple, Union

import numpy as np

from . import __version__
from ._validation import ContractError, check_seed
from .er import SAMPLER_VERSION, ErParams, en_threshold, l1_norm_from_laplacian_eigenvalues, sample_er
from .graph import build_laplacian, is_connected
from .spectral import summarize_eigenvalues
from .theory import expected_xn, expected_xn_vanishing, fluctuation_bound, power_law_p

SEED_FUNCTION_VERSION = "sha256-trunc64/1"

DESK_GRID = (100, 200, 400, 800)
FULL_GRID = tuple(int(v) for v in np.unique(np.round(np.geomspace(100, 2000, 15)).astype(int)))

RECORD_HEADER = ("scenario_id", "n", "p", "replicate", "seed", "xn", "connected", "event_en", "eigen_ms")
SUMMARY_HEADER = (
    "scenario_id", "n", "p", "mean_xn", "predicted_mean", "band_halfwidth",
    "coverage", "connected_frac", "en_frac",
)


class ConfigError(ContractError):
    """Invalid experiment configuration."""


def derive_seed(master, scenario_id, n, replicate):
    """64-bit per-realization seed; see the module docstring for the exact function."""
    master = check_seed(master, "master_seed")
    key = f"erkirchhoff-seed/1|{master}|{int(scenario_id)}|{int(n)}|{int(replicate)}"
    return int.from_bytes(hashlib.sha256(key.encode("utf-8")).digest()[:8], "big")


@dataclass(frozen=True)
class PowerLaw:
    """Density rule ``p = gamma * n**(alpha - 1)``."""

    gamma: float
    alpha: float
    kind: str = field(default="power_law", init=False)

    def p(self, n):
        return power_law_p(n, self.gamma, self.alpha)

    def predicted_mean(self, n):
        return expected_xn_vanishing(n, self.gamma, self.alpha)

    @property
    def label(self):
        return f"power_law(gamma={self.gamma:g}, alpha={self.alpha:g})"


@dataclass(frozen=True)
class Constant:
    value: float
    kind: str = field(default="constant", init=False)

    def p(self, n):
        return float(self.value)

    def predicted_mean(self, n):
        return expected_xn(n, self.value)

    @property
    def label(self):
        return f"constant(p={self.value:g})"


Scenario = Union[PowerLaw, Constant]


def parse_scenario(text):
    """Parse ``power_law:GAMMA:ALPHA`` or ``constant:P`` (``pl``/``const`` also accepted)."""
    parts = [s.strip() for s in str(text).split(":")]
    kind = parts[0].lower()
    try:
        if kind in ("power_law", "powerlaw", "pl") and len(parts) == 3:
            return PowerLaw(float(parts[1]), float(parts[2]))
        if kind in ("constant", "const") and len(parts) == 2:
            return Constant(float(parts[1]))
    except ValueError:
        pass
    raise ConfigError(f"cannot parse scenario {text!r}; use power_law:GAMMA:ALPHA or constant:P")


def scenario_from_dict(d):
    kind = str(d.get("kind", "")).lower()
    if kind == "power_law":
        return PowerLaw(float(d["gamma"]), float(d["alpha"]))
    if kind == "constant":
        return Constant(float(d["p"]))
    raise ConfigError(f"unknown scenario kind {kind!r}")


def scenario_to_dict(s):
    if isinstance(s, PowerLaw):
        return {"kind": "power_law", "gamma": s.gamma, "alpha": s.alpha}
    return {"kind": "constant", "p": s.value}


@dataclass(frozen=True)
class ExperimentConfig:
    scenarios: Tuple[Scenario, ...]
    n_grid: Tuple[int, ...]
    replicates: int
    epsilon: float = 0.004
    master_seed: int = 0
    output_path: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "scenarios", tuple(self.scenarios))
        object.__setattr__(self, "n_grid", tuple(int(n) for n in self.n_grid))

    def validate(self):
        if not self.scenarios:
            raise ConfigError("at least one scenario is required")
        if not self.n_grid:
            raise ConfigError("n_grid must not be empty")
        if any(n < 2 for n in self.n_grid):
            raise ConfigError("every n in n_grid must be >= 2")
        if any(b <= a for a, b in zip(self.n_grid, self.n_grid[1:])):
            raise ConfigError("n_grid must be strictly increasing")
        if int(self.replicates) < 1:
            raise ConfigError("replicates must be >= 1")
        if not 0 < self.epsilon <= 0.5:
            raise ConfigError(f"epsilon must lie in (0, 1/2], got {self.epsilon}")
        try:
            check_seed(self.master_seed, "master_seed")
        except ContractError as exc:
            raise ConfigError(str(exc)) from None
        for sid, s in enumerate(self.scenarios):
            for n in self.n_grid:
                p = s.p(n)
                if not 0 < p < 1:
                    raise ConfigError(f"scenario {sid} ({s.label}) gives p={p:g} outside (0, 1) at n={n}")
        return self

    def to_dict(self):
        return {
            "scenarios": [scenario_to_dict(s) for s in self.scenarios],
            "n_grid": list(self.n_grid),
            "replicates": int(self.replicates),
            "epsilon": self.epsilon,
            "master_seed": self.master_seed,
            "output_path": self.output_path,
        }


def default_scenarios(constant_p=0.5):
    return (PowerLaw(1.0, 0.5), PowerLaw(1.0, 0.75), Constant(constant_p))


def sweep_config(full=False, replicates=None, master_seed=0, epsilon=0.004, output_path=None, constant_p=0.5):
    """The three-density sweep; desk grid by default, 15-point grid with ``full``."""
    if replicates is None:
        replicates = 500 if full else 100
    return ExperimentConfig(
        scenarios=default_scenarios(constant_p),
        n_grid=FULL_GRID if full else DESK_GRID,
        replicates=replicates,
        epsilon=epsilon,
        master_seed=master_seed,
        output_path=output_path,
    )


def load_config(path):
    """Read a TOML config file into a dict of ExperimentConfig keyword arguments."""
    try:
        import tomllib
    except ModuleNotFoundError:  # Python < 3.11
        import tomli as tomllib
    with open(path, "rb") as fh:
        try:
            raw = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from None
    out = {}
    if "scenario" in raw:
        out["scenarios"] = tuple(
            parse_scenario(s) if isinstance(s, str) else scenario_from_dict(s) for s in raw["scenario"]
        )
    if "n_grid" in raw:
        out["n_grid"] = tuple(int(n) for n in raw["n_grid"])
    for key in ("replicates", "master_seed"):
        if key in raw:
            out[key] = int(raw[key])
    if "epsilon" in raw:
        out["epsilon"] = float(raw["epsilon"])
    if "output" in raw:
        out["output_path"] = str(raw["output"])
    unknown = set(raw) - {"scenario", "n_grid", "replicates", "master_seed", "epsilon", "output"}
    if unknown:
        raise ConfigError(f"{path}: unknown keys {sorted(unknown)}")
    return out


@dataclass(frozen=True)
class RealizationRecord:
    scenario_id: int
    n: int
    p: float
    replicate: int
    seed: int
    xn: float
    connected: bool
    event_en: bool
    eigen_ms: float = math.nan

    @property
    def key(self):
        return (self.scenario_id, self.n, self.replicate)


@dataclass(frozen=True)
class SummaryRow:
    scenario_id: int
    n: int
    p: float
    mean_xn: float
    predicted_mean: float
    band_halfwidth: float
    coverage: float
    connected_frac: float
    en_frac: float


def run_realization(scenario_id, n, p, replicate, master_seed, timing=False):
    seed = derive_seed(master_seed, scenario_id, n, replicate)
    g = sample_er(ErParams(n, p, seed))
    lap = build_laplacian(g)
    t0 = time.perf_counter()
    w = np.linalg.eigvalsh(lap)
    elapsed = (time.perf_counter() - t0) * 1e3
    xn = p * summarize_eigenvalues(w).pinv_trace()
    l1_norm = l1_norm_from_laplacian_eigenvalues(w, n, p)
    return RealizationRecord(
        scenario_id=scenario_id,
        n=n,
        p=p,
        replicate=replicate,
        seed=seed,
        xn=xn,
        connected=is_connected(g),
        event_en=l1_norm <= en_threshold(n, p),
        eigen_ms=elapsed if timing else math.nan,
    )


def summarize(records, epsilon):
    """Aggregate records per (scenario_id, n).

    The centre of the band is ``expected_xn(n, p)``; for power-law
    densities this coincides exactly with ``expected_xn_vanishing``.
    """
    cells = {}
    for r in records:
        cells.setdefault((r.scenario_id, r.n), []).append(r)
    rows = []
    for (sid, n), rs in sorted(cells.items()):
        p = rs[0].p
        xs = np.array([r.xn for r in rs])
        mean = expected_xn(n, p)
        half = fluctuation_bound(n, p, epsilon)
        rows.append(SummaryRow(
            scenario_id=sid,
            n=n,
            p=p,
            mean_xn=float(np.mean(xs)),
            predicted_mean=mean,
            band_halfwidth=half,
            coverage=float(np.mean(np.abs(xs - mean) <= half)),
            connected_frac=float(np.mean([r.connected for r in rs])),
            en_frac=float(np.mean([r.event_en for r in rs])),
        ))
    return rows


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return "%.17g" % v


def _record_row(r):
    return [_fmt(getattr(r, k)) for k in RECORD_HEADER]


def _parse_bool(s):
    if s not in ("true", "false"):
        raise ValueError(f"expected true/false, got {s!r}")
    return s == "true"


def output_paths(prefix):
    prefix = os.fspath(prefix)
    return prefix + ".records.csv", prefix + ".summary.csv"


def _write_rows(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def write_records(records, path):
    rec_path = output_paths(path)[0]
    _write_rows(rec_path, RECORD_HEADER, (_record_row(r) for r in sorted(records, key=lambda r: r.key)))
    return rec_path


def write_summary(summary, path):
    sum_path = output_paths(path)[1]
    rows = sorted(summary, key=lambda s: (s.scenario_id, s.n))
    _write_rows(sum_path, SUMMARY_HEADER, ([_fmt(getattr(s, k)) for k in SUMMARY_HEADER] for s in rows))
    return sum_path


def write_csv(records, summary, path):
    """Write ``<path>.records.csv`` and ``<path>.summary.csv``; return both paths.

    Floats use 17 significant digits so they parse back to the same double.
    """
    try:
        return write_records(records, path), write_summary(summary, path)
    except OSError as exc:
        raise OSError(f"cannot write experiment output under {os.fspath(path)!r}: {exc}") from exc


def read_records(path):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != RECORD_HEADER:
            raise ValueError(f"{path}: unexpected header {header}")
        return [
            RealizationRecord(
                scenario_id=int(row[0]), n=int(row[1]), p=float(row[2]), replicate=int(row[3]),
                seed=int(row[4]), xn=float(row[5]), connected=_parse_bool(row[6]),
                event_en=_parse_bool(row[7]), eigen_ms=float(row[8]),
            )
            for row in reader
        ]


def read_summary(path):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != SUMMARY_HEADER:
            raise ValueError(f"{path}: unexpected header {header}")
        return [
            SummaryRow(int(row[0]), int(row[1]), *(float(v) for v in row[2:]))
            for row in reader
        ]


def write_manifest(config, path, **extra):
    """Write ``<path>.manifest.json`` echoing config, master seed and grid."""
    manifest = {
        "config": config.to_dict(),
        "seed": config.master_seed,
        "grid": list(config.n_grid),
        "code_version": __version__,
        "seed_function": SEED_FUNCTION_VERSION,
        "sampler": SAMPLER_VERSION,
    }
    manifest.update(extra)
    out = os.fspath(path) + ".manifest.json"
    with open(out, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return out


def _tasks(config):
    for sid, scenario in enumerate(config.scenarios):
        for n in config.n_grid:
            p = scenario.p(n)
            for rep in range(config.replicates):
                yield sid, n, p, rep


def run_experiment(config, threads=1, timing=False, progress=None):
    """Draw every realization of ``config`` and aggregate per cell.

    With ``config.output_path`` set, records are appended to
    ``<path>.records.csv.partial`` as they finish (so an interrupted run
    keeps its work), then the sorted record and summary files are written
    and the partial file removed. The output location is probed before
    any sampling, so an unwritable path fails fast with ``OSError``.

    Returns ``(records, summary)`` with records sorted by
    ``(scenario_id, n, replicate)``.
    """
    config.validate()
    threads = max(1, int(threads))
    partial = None
    partial_path = None
    if config.output_path is not None:
        partial_path = output_paths(config.output_path)[0] + ".partial"
        try:
            partial = open(partial_path, "w", newline="", encoding="utf-8")
        except OSError as exc:
            raise OSError(f"cannot write experiment output under {config.output_path!r}: {exc}") from exc
        writer = csv.writer(partial, lineterminator="\n")
        writer.writerow(RECORD_HEADER)

    records = []
    tasks = list(_tasks(config))
    try:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [
                pool.submit(run_realization, sid, n, p, rep, config.master_seed, timing)
                for sid, n, p, rep in tasks
            ]
            try:
                for done, fut in enumerate(as_completed(futures), start=1):
                    rec = fut.result()
                    records.append(rec)
                    if partial is not None:
                        writer.writerow(_record_row(rec))
                        partial.flush()
                    if progress is not None:
                        progress(done, len(tasks))
            except BaseException:
                for fut in futures:
                    fut.cancel()
                raise
    finally:
        if partial is not None:
            partial.close()

    records.sort(key=lambda r: r.key)
    if config.output_path is None:
        return records, summarize(records, config.epsilon)
    try:
        rec_path = write_records(records, config.output_path)
        # Summary is rebuilt from what actually landed on disk.
        summary = summarize(read_records(rec_path), config.epsilon)
        write_summary(summary, config.output_path)
    except OSError as exc:
        raise OSError(f"cannot write experiment output under {config.output_path!r}: {exc}") from exc
    os.remove(partial_path)
    return records, summary
