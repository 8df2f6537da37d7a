"""Pipeline configuration: ``key = value`` files overridable by CLI flags."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field, fields
from pathlib import Path

from ontorec.errors import ConfigError
from ontorec.evaluation import parse_thresholds
from ontorec.logs import DEFAULT_ASSET_SUFFIXES, DEFAULT_CRAWLER_KEYWORDS, LOG_FORMATS
from ontorec.rules import parse_delta

# Stage artifact names inside the work directory.
SESSIONS_FILE = "sessions.tsv"
SEQUENCES_FILE = "sequences.tsv"
FREQUENT_FILE = "frequent.tsv"
RULES_FILE = "rules.tsv"
REPORT_FILE = "report.tsv"
SYNTHETIC_LOG = "access.log"
SYNTHETIC_ONTOLOGY = "ontology.txt"
SYNTHETIC_ANNOTATIONS = "annotations.tsv"


def _str_tuple(text: str) -> tuple[str, ...]:
    return tuple(p.strip() for p in text.split(",") if p.strip())


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _opt_int(text: str) -> int | None:
    return None if text.strip().lower() in ("", "none") else int(text)


def _opt_path(text: str) -> Path | None:
    return None if text.strip().lower() in ("", "none") else Path(text.strip())


@dataclass
class PipelineConfig:
    # paths; unset input paths fall back to the synthetic names inside workdir
    workdir: Path = Path("work")
    log: Path | None = None
    ontology: Path | None = None
    annotations: Path | None = None
    rules: Path | None = None
    # preprocessing
    log_format: str = "combined"
    timeout: float = 1800.0
    asset_suffixes: tuple[str, ...] = DEFAULT_ASSET_SUFFIXES
    crawler_keywords: tuple[str, ...] = DEFAULT_CRAWLER_KEYWORDS
    strip_query: bool = True
    skip_malformed: bool = False
    # mapping and mining
    min_len: int = 2
    collapse_duplicates: bool = True
    min_sup: float = 0.01
    delta: float = 10
    max_len: int | None = None
    min_conf: float = 0.0
    workers: int = 1
    # recommendation
    window: int = 2
    max_results: int = 10
    threshold: float = 0.0
    # evaluation
    folds: int = 10
    thresholds: str = "0.1:1.0:0.1"
    seed: int = 0
    # synthetic corpus
    products: int = 300
    categories: int = 60
    sessions: int = 1600
    mean_session_length: float = 4.0
    # service
    host: str = "127.0.0.1"
    port: int = 8080
    _sources: dict = field(default_factory=dict, repr=False, compare=False)

    def validate(self) -> "PipelineConfig":
        checks = [
            (self.log_format in LOG_FORMATS, f"log_format must be one of {LOG_FORMATS}"),
            (self.timeout >= 0, "timeout must be non-negative"),
            (self.min_len >= 1, "min_len must be at least 1"),
            (0 < self.min_sup <= 1, f"min_sup must be in (0, 1], got {self.min_sup}"),
            (self.delta >= 0, "delta must be non-negative"),
            (self.max_len is None or self.max_len >= 1, "max_len must be positive"),
            (0 <= self.min_conf <= 1, "min_conf must be in [0, 1]"),
            (self.workers >= 1, "workers must be at least 1"),
            (self.window >= 1, "window must be at least 1"),
            (self.max_results >= 1, "max_results must be at least 1"),
            (0 <= self.threshold <= 1, "threshold must be in [0, 1]"),
            (self.folds >= 2, "folds must be at least 2"),
            (0 < self.port < 65536 or self.port == 0, "port out of range"),
        ]
        for ok, message in checks:
            if not ok:
                raise ConfigError(message)
        try:
            parse_thresholds(self.thresholds)
        except ValueError as exc:
            raise ConfigError(f"bad thresholds: {exc}") from None
        return self

    @property
    def threshold_list(self) -> list[float]:
        return parse_thresholds(self.thresholds)

    def path(self, name: str) -> Path:
        """Resolve an input path, defaulting into the work directory."""
        defaults = {"log": SYNTHETIC_LOG, "ontology": SYNTHETIC_ONTOLOGY,
                    "annotations": SYNTHETIC_ANNOTATIONS, "rules": RULES_FILE}
        value = getattr(self, name)
        return value if value is not None else self.workdir / defaults[name]

    def artifact(self, filename: str) -> Path:
        return self.workdir / filename


_PARSERS = {
    "workdir": lambda s: Path(s.strip()),
    "log": _opt_path, "ontology": _opt_path, "annotations": _opt_path, "rules": _opt_path,
    "log_format": str.strip,
    "timeout": float,
    "asset_suffixes": _str_tuple,
    "crawler_keywords": _str_tuple,
    "strip_query": _bool, "skip_malformed": _bool, "collapse_duplicates": _bool,
    "min_len": int, "max_len": _opt_int, "workers": int, "window": int, "max_results": int,
    "folds": int, "seed": int, "products": int, "categories": int, "sessions": int, "port": int,
    "min_sup": float, "min_conf": float, "threshold": float, "mean_session_length": float,
    "delta": parse_delta,
    "thresholds": str.strip, "host": str.strip,
}

CONFIG_KEYS = tuple(f.name for f in fields(PipelineConfig) if not f.name.startswith("_"))
assert set(CONFIG_KEYS) == set(_PARSERS)


def normalize_key(key: str) -> str:
    return key.strip().replace("-", "_")


def apply_settings(cfg: PipelineConfig, settings: dict[str, str], origin: str) -> PipelineConfig:
    """Return a copy of ``cfg`` with string ``settings`` parsed and applied."""
    updates = {}
    for raw_key, raw_value in settings.items():
        key = normalize_key(raw_key)
        if key not in _PARSERS:
            raise ConfigError(f"unknown config key {raw_key!r} ({origin})")
        try:
            updates[key] = _PARSERS[key](raw_value)
        except ValueError as exc:
            raise ConfigError(f"bad value for {key}: {raw_value!r} ({origin}): {exc}") from None
    new = dataclasses.replace(cfg, **updates)
    new._sources = {**cfg._sources, **{k: origin for k in updates}}
    return new


def read_config_file(path: Path) -> dict[str, str]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc.strerror}") from None
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        out[key.strip()] = value.strip()
    return out


def format_config(cfg: PipelineConfig) -> str:
    lines = []
    for key in CONFIG_KEYS:
        value = getattr(cfg, key)
        if isinstance(value, tuple):
            value = ",".join(value)
        elif value is None:
            value = "none"
        elif isinstance(value, float) and math.isinf(value):
            value = "inf"
        elif isinstance(value, bool):
            value = str(value).lower()
        lines.append(f"{key} = {value}")
    return "\n".join(lines) + "\n"
