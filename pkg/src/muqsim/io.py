"""Run configuration, experimental data ingestion and result files.

Configs are TOML.  Every section has a fixed key set; anything else is an
error, so a misspelt physics parameter cannot silently fall back to a
default.  See ``docs/config.md`` for the schema.
"""

from __future__ import annotations

import json
import math
import platform
import re
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from . import __version__
from .evolution import EvolutionPlan
from .polarisation import PREP_METHODS, MethodConfig, PolarisationSeries, default_times
from .spins import GAMMA_FLUORINE, GAMMA_MUON, Particle, SpinSystem


class ConfigError(ValueError):
    pass


class DataError(ValueError):
    pass


METHODS = ("exact-diag", "noisy") + PREP_METHODS
STOCHASTIC = ("rpa", "dephasing", "basis-sample")

_SCHEMA = {
    "": {"seed", "workers", "allow_large_memory", "geometry", "particles", "hamiltonian", "method",
         "evolution", "times", "noise", "fit", "resources", "bounds", "output"},
    "geometry": {"shell_count", "lattice_constant", "displacements"},
    "particles": {"label", "kind", "spin", "gyromagnetic_ratio", "position", "quadrupole", "efg"},
    "hamiltonian": {"field", "nuclear_nuclear", "muon_index"},
    "method": {"name", "samples", "angular_average", "phases", "shots", "adaptive_ref"},
    "evolution": {"method", "steps", "ordering"},
    "times": {"values", "n", "t_max"},
    "noise": {"p", "lam"},
    "fit": {"data", "free", "x0", "step", "xatol", "fatol", "maxiter"},
    "resources": {"preset", "p", "eps", "t_per_rotation", "cycle_time_us", "distillation_tiles",
                  "cycles_per_magic_state", "t_count", "n_qubits"},
    "bounds": {"orders", "times", "steps", "norms"},
    "output": {"dir", "prefix"},
}

_KINDS = {"muon": (0.5, GAMMA_MUON), "fluorine": (0.5, GAMMA_FLUORINE)}


def _check_keys(section: str, table: dict, where: str | None = None):
    unknown = set(table) - _SCHEMA[section]
    if unknown:
        raise ConfigError(f"unknown key(s) {sorted(unknown)} in [{where or section or 'top level'}]; "
                          f"allowed: {sorted(_SCHEMA[section])}")


@dataclass
class RunConfig:
    seed: int | None = None
    workers: int = 1
    allow_large_memory: bool = False
    shell_count: int | None = None
    lattice_constant: float = 2.72
    displacements: dict = field(default_factory=dict)
    particles: list = field(default_factory=list)
    efg: dict = field(default_factory=dict)
    muon_index: int = 0
    magnetic_field: tuple | None = None
    nuclear_nuclear: bool = True
    method: str = "exact-diag"
    samples: int = 1
    angular_average: bool = False
    phases: str = "basis"
    shots: int | None = None
    adaptive_ref: float | None = None
    plan: EvolutionPlan = field(default_factory=lambda: EvolutionPlan("trotter2", 40))
    times: np.ndarray = field(default_factory=default_times)
    noise_p: float = 0.0
    noise_lam: float = 1.1
    fit: dict = field(default_factory=dict)
    resources: dict = field(default_factory=dict)
    bounds: dict = field(default_factory=dict)
    out_dir: Path = Path("out")
    prefix: str = "run"
    source: Path | None = None
    raw: dict = field(default_factory=dict, repr=False)

    def system(self) -> SpinSystem:
        from .geometry import ShellGeometry

        if self.particles:
            return SpinSystem(tuple(self.particles), muon_index=self.muon_index)
        return ShellGeometry(self.shell_count, self.lattice_constant, dict(self.displacements)).system()

    def method_config(self) -> MethodConfig:
        prep = "exact-mixed" if self.method in ("exact-diag", "noisy") else self.method
        return MethodConfig(prep, self.samples, self.plan, self.angular_average, self.phases,
                            self.shots, self.adaptive_ref)

    @property
    def stochastic(self) -> bool:
        return self.method in STOCHASTIC or self.plan.stochastic and self.method != "exact-diag"


def _particle(entry: dict, k: int) -> tuple[Particle, object]:
    _check_keys("particles", entry, f"particles #{k + 1}")
    kind = entry.get("kind")
    if kind is not None and kind not in _KINDS:
        raise ConfigError(f"particles #{k + 1}: unknown kind {kind!r}; use {sorted(_KINDS)} or give spin and "
                          "gyromagnetic_ratio")
    spin, gamma = _KINDS.get(kind, (None, None))
    spin = entry.get("spin", spin)
    gamma = entry.get("gyromagnetic_ratio", gamma)
    if spin is None or gamma is None:
        raise ConfigError(f"particles #{k + 1}: needs 'kind' or both 'spin' and 'gyromagnetic_ratio'")
    q = entry.get("quadrupole")
    try:
        p = Particle(entry.get("label", f"P{k}"), spin, gamma, tuple(entry.get("position", (0, 0, 0))),
                     tuple(q) if q is not None else None)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"particles #{k + 1}: {exc}") from exc
    return p, entry.get("efg")


def parse_config(doc: dict, source: Path | None = None, seed: int | None = None) -> RunConfig:
    """``seed``, when given, overrides the document's seed before validation."""
    _check_keys("", doc)
    cfg = RunConfig(source=source, raw=doc)
    base = source.parent if source is not None else Path.cwd()
    try:
        cfg.seed = doc.get("seed") if seed is None else seed
        if cfg.seed is not None and (not isinstance(cfg.seed, int) or cfg.seed < 0):
            raise ConfigError("seed must be a non-negative integer")
        cfg.workers = int(doc.get("workers", 1))
        cfg.allow_large_memory = bool(doc.get("allow_large_memory", False))

        if "geometry" in doc and "particles" in doc:
            raise ConfigError("give either [geometry] or [[particles]], not both")
        if "geometry" in doc:
            g = doc["geometry"]
            _check_keys("geometry", g)
            cfg.shell_count = int(g.get("shell_count", 1))
            cfg.lattice_constant = float(g.get("lattice_constant", 2.72))
            cfg.displacements = {str(k): float(v) for k, v in g.get("displacements", {}).items()}
        elif "particles" in doc:
            for k, entry in enumerate(doc["particles"]):
                p, efg = _particle(entry, k)
                cfg.particles.append(p)
                if efg is not None:
                    cfg.efg[k] = np.asarray(efg, dtype=float)
        else:
            cfg.shell_count = 1

        h = doc.get("hamiltonian", {})
        _check_keys("hamiltonian", h)
        if "field" in h:
            cfg.magnetic_field = tuple(float(x) for x in h["field"])
            if len(cfg.magnetic_field) != 3:
                raise ConfigError("hamiltonian.field must have three components (Tesla)")
        cfg.nuclear_nuclear = bool(h.get("nuclear_nuclear", True))
        cfg.muon_index = int(h.get("muon_index", 0))

        m = doc.get("method", {})
        _check_keys("method", m)
        cfg.method = m.get("name", "exact-diag")
        if cfg.method not in METHODS:
            raise ConfigError(f"method.name must be one of {METHODS}, got {cfg.method!r}")
        cfg.samples = int(m.get("samples", 1))
        cfg.angular_average = bool(m.get("angular_average", False))
        cfg.phases = m.get("phases", "basis")
        cfg.shots = m.get("shots") or None
        cfg.adaptive_ref = m.get("adaptive_ref")

        e = doc.get("evolution", {})
        _check_keys("evolution", e)
        cfg.plan = EvolutionPlan(e.get("method", "trotter2"), int(e.get("steps", 40)),
                                 e.get("ordering", "magnitude"))

        t = doc.get("times", {})
        _check_keys("times", t)
        if "values" in t:
            if "n" in t or "t_max" in t:
                raise ConfigError("times: give either 'values' or 'n'/'t_max'")
            cfg.times = np.asarray(t["values"], dtype=float)
        else:
            cfg.times = default_times(int(t.get("n", 191)), float(t.get("t_max", 9.5)))
        if cfg.times.ndim != 1 or cfg.times.size == 0 or np.any(np.diff(cfg.times) <= 0) \
                or cfg.times[0] < 0:
            raise ConfigError("times must be non-negative and strictly increasing")

        nz = doc.get("noise", {})
        _check_keys("noise", nz)
        cfg.noise_p = float(nz.get("p", 0.0))
        cfg.noise_lam = float(nz.get("lam", 1.1))
        if cfg.method == "noisy" and not cfg.noise_lam > 1:
            raise ConfigError("noise.lam must exceed 1")

        for name in ("fit", "resources", "bounds"):
            sec = doc.get(name, {})
            _check_keys(name, sec)
            setattr(cfg, name, dict(sec))
        if "data" in cfg.fit:
            cfg.fit["data"] = (base / cfg.fit["data"]).resolve()
            if not cfg.fit["data"].is_file():
                raise ConfigError(f"fit.data: no such file {cfg.fit['data']}")

        o = doc.get("output", {})
        _check_keys("output", o)
        cfg.out_dir = Path(o.get("dir", "out"))
        cfg.prefix = str(o.get("prefix", "run"))
        # building these validates spins, positions and method combinations
        cfg.system()
        cfg.method_config()
    except ConfigError:
        raise
    except (TypeError, ValueError, KeyError) as exc:
        raise ConfigError(str(exc)) from exc
    if cfg.stochastic and cfg.seed is None:
        raise ConfigError(f"method {cfg.method!r} is stochastic and needs a seed")
    return cfg


def load_config(path, seed: int | None = None) -> RunConfig:
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return parse_config(doc, path, seed)


# --- experimental data ------------------------------------------------------

@dataclass(frozen=True)
class ExperimentalDataset:
    times: np.ndarray
    asymmetry: np.ndarray
    sigma: np.ndarray | None
    header: dict

    def __len__(self):
        return self.times.size

    def to_series(self):
        from .fitting import AsymmetrySeries

        return AsymmetrySeries(self.times, self.asymmetry, self.sigma)


_HEADER_KV = re.compile(r"^#\s*([A-Za-z_][A-Za-z0-9_]*)\s*[=:]\s*([-+0-9.eE]+)\s*$")


def parse_dataset(text: str, name: str = "<data>") -> ExperimentalDataset:
    """Rows of ``time asymmetry [sigma]`` separated by commas or whitespace.

    Lines starting with ``#`` are comments; ``# A0 = 0.25`` style comments are
    kept as header metadata.
    """
    rows, header, ncols = [], {}, None
    for lineno, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        if not s:
            continue
        if s.startswith("#"):
            m = _HEADER_KV.match(s)
            if m:
                header[m.group(1)] = float(m.group(2))
            continue
        fields = [f for f in re.split(r"[,\s]+", s) if f]
        if len(fields) not in (2, 3):
            raise DataError(f"{name}:{lineno}: expected 2 or 3 columns, found {len(fields)}")
        if ncols is None:
            ncols = len(fields)
        elif len(fields) != ncols:
            raise DataError(f"{name}:{lineno}: expected {ncols} columns like the first row, found {len(fields)}")
        try:
            vals = [float(f) for f in fields]
        except ValueError:
            raise DataError(f"{name}:{lineno}: non-numeric field in {s!r}") from None
        if not all(math.isfinite(v) for v in vals):
            raise DataError(f"{name}:{lineno}: non-finite value")
        if rows and vals[0] <= rows[-1][1][0]:
            raise DataError(f"{name}:{lineno}: time {vals[0]} does not increase "
                            f"(previous {rows[-1][1][0]} on line {rows[-1][0]})")
        if ncols == 3 and vals[2] <= 0:
            raise DataError(f"{name}:{lineno}: sigma must be positive, got {vals[2]}")
        rows.append((lineno, vals))
    if len(rows) < 2:
        raise DataError(f"{name}: need at least 2 data rows, found {len(rows)}")
    arr = np.array([v for _, v in rows])
    return ExperimentalDataset(arr[:, 0], arr[:, 1], arr[:, 2] if ncols == 3 else None, header)


def ingest_dataset(path) -> ExperimentalDataset:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    return parse_dataset(text, str(path))


# --- output -----------------------------------------------------------------

def write_series_csv(series: PolarisationSeries, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write("time_us,P,sigma_P\n")
        for t, p, s in zip(series.times, series.values, series.sigma):
            fh.write(f"{t:.17g},{p:.17g},{s:.17g}\n")
    return path


def read_series_csv(path) -> PolarisationSeries:
    arr = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return PolarisationSeries(arr[:, 0], arr[:, 1], arr[:, 2])


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, Path):
        return str(x)
    return x


def write_manifest(path, cfg: RunConfig | None, command: str, outputs: list, extra: dict | None = None) -> Path:
    """Config echo, seed, versions and output list.  Only ``created`` varies between reruns."""
    import scipy

    man = {
        "command": command,
        "created": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "seed": cfg.seed if cfg else None,
        "config": _jsonable(cfg.raw) if cfg else None,
        "config_path": str(cfg.source) if cfg and cfg.source else None,
        "versions": {"muqsim": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
                     "python": platform.python_version()},
        "outputs": [str(Path(p).name) for p in outputs],
    }
    if extra:
        man.update(_jsonable(extra))
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(man, indent=2, sort_keys=True) + "\n")
    return path


def write_report(path, mapping: dict) -> Path:
    """``key = value`` text report with full-precision floats."""
    lines = []
    for k, v in mapping.items():
        if isinstance(v, float):
            v = f"{v:.17g}"
        lines.append(f"{k} = {v}")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n")
    return path


__all__ = [
    "ConfigError", "DataError", "ExperimentalDataset", "RunConfig", "ingest_dataset", "load_config",
    "parse_config", "parse_dataset", "read_series_csv", "write_manifest", "write_report",
    "write_series_csv",
]
