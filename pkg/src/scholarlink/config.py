"""Pipeline configuration: flat ``key = value`` file, environment, then flags."""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any, Mapping

ENV_PREFIX = "SCHOLARLINK_"
INPUT_KEYS = ("authors", "works", "events", "tweeters", "golden")


class ConfigError(ValueError):
    pass


@dataclass
class PipelineConfig:
    authors: Path | None = None
    works: Path | None = None
    events: Path | None = None
    tweeters: Path | None = None
    golden: Path | None = None
    out: Path = Path("out")
    steps: tuple[int, ...] = (1, 2, 3, 4, 5, 6, 7, 8, 9)
    disable_steps: tuple[int, ...] = ()
    honorifics: tuple[str, ...] | None = None
    top_countries: int = 19
    workers: int = 1
    export_variants: bool = False
    # synthetic / oracle modes
    seed: int = 1
    n_authors: int = 200
    n_planted: int = 45
    n_distractors: int = 50
    homonym_rate: float = 0.0
    n_events: int = 0

    def enabled_steps(self) -> tuple[int, ...]:
        return tuple(s for s in self.steps if s not in set(self.disable_steps))

    def as_dict(self) -> dict[str, Any]:
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            out[f.name] = str(v) if isinstance(v, Path) else list(v) if isinstance(v, tuple) else v
        return out


def _int_list(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.replace(" ", "").split(",") if x)


def _bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off", ""):
        return False
    raise ValueError(f"not a boolean: {text!r}")


_PARSERS = {
    "steps": _int_list,
    "disable_steps": _int_list,
    "honorifics": lambda s: tuple(x.strip().lower() for x in s.split(",") if x.strip()),
    "top_countries": int,
    "workers": int,
    "seed": int,
    "n_authors": int,
    "n_planted": int,
    "n_distractors": int,
    "n_events": int,
    "homonym_rate": float,
    "export_variants": _bool,
}


def _coerce(key: str, value: Any, base: Path | None = None) -> Any:
    if value is None:
        return None
    if key in INPUT_KEYS or key == "out":
        p = Path(value)
        return base / p if base is not None and not p.is_absolute() else p
    parse = _PARSERS.get(key)
    if parse is None or not isinstance(value, str):
        return value
    try:
        return parse(value)
    except ValueError as exc:
        raise ConfigError(f"{key}: {exc}") from None


def read_config_file(path) -> dict[str, Any]:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
    try:
        parser.read_string("[pipeline]\n" + path.read_text(encoding="utf-8"))
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from None
    known = {f.name for f in fields(PipelineConfig)}
    values = {}
    for key, raw in parser["pipeline"].items():
        key = key.replace("-", "_")
        if key not in known:
            raise ConfigError(f"{path}: unknown key {key!r}")
        values[key] = _coerce(key, raw, base=path.parent)
    return values


def env_overrides(environ: Mapping[str, str] | None = None) -> dict[str, Any]:
    environ = os.environ if environ is None else environ
    known = {f.name for f in fields(PipelineConfig)}
    out = {}
    for name, raw in environ.items():
        if not name.startswith(ENV_PREFIX):
            continue
        key = name[len(ENV_PREFIX):].lower()
        if key not in known:
            raise ConfigError(f"unknown environment override {name}")
        out[key] = _coerce(key, raw)
    return out


def build_config(
    config_path=None,
    cli_values: Mapping[str, Any] | None = None,
    environ: Mapping[str, str] | None = None,
) -> PipelineConfig:
    """Defaults < config file < environment < command line."""
    values: dict[str, Any] = {}
    if config_path is not None:
        values.update(read_config_file(config_path))
    values.update(env_overrides(environ))
    for key, v in (cli_values or {}).items():
        if v is not None:
            values[key] = _coerce(key, v)
    cfg = PipelineConfig(**values)
    validate(cfg)
    return cfg


def validate(cfg: PipelineConfig) -> None:
    if cfg.workers < 1:
        raise ConfigError("workers must be >= 1")
    if cfg.top_countries < 0:
        raise ConfigError("top_countries must be >= 0")
    if list(cfg.steps) != sorted(set(cfg.steps)) or any(s not in range(1, 10) for s in cfg.steps):
        raise ConfigError(f"steps must be a subsequence of 1..9 in order, got {list(cfg.steps)}")
    bad = [s for s in cfg.disable_steps if s not in range(1, 10)]
    if bad:
        raise ConfigError(f"cannot disable unknown step(s) {bad}")
    if cfg.out.exists() and not cfg.out.is_dir():
        raise ConfigError(f"output path {cfg.out} is not a directory")
