"""Run configuration: command-line flags > config file (JSON) > defaults."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

from germforge.fatou import FatouControls
from germforge.formal import default_order
from germforge.modulus import ExtractionControls


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    order: int | None = None        # truncation order N (None: max(jet order, 32))
    tol: float = 1e-5               # zero floor: coefficients must be certified to this
    newton_tol: float = 1e-14
    abel_tol: float = 1e-15         # truncation error of the formal Fatou series
    height: float = 2.0             # quadrature line |Im W| = Y
    samples: int = 256              # M
    nmax: int = 12
    delta: float | None = None      # petal radius (None: derived from b)
    cap: int = 20_000
    escape: float = 1.0
    out: str | None = None
    format: str = "text"

    def __post_init__(self):
        for name in ("tol", "newton_tol", "abel_tol", "height", "escape"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)!r}")
        if self.delta is not None and not self.delta > 0:
            raise ConfigError(f"delta must be positive, got {self.delta!r}")
        for name in ("samples", "nmax", "cap"):
            if not isinstance(getattr(self, name), int) or getattr(self, name) < 1:
                raise ConfigError(f"{name} must be a positive integer")
        if self.nmax >= self.samples // 2:
            raise ConfigError(f"nmax={self.nmax} needs samples > {2 * self.nmax}")
        if self.format not in ("text", "json"):
            raise ConfigError(f"format must be 'text' or 'json', got {self.format!r}")

    def check_order(self, k: int) -> None:
        if self.order is not None and self.order < default_order(k):
            raise ConfigError(f"order {self.order} is below 2k+4 = {default_order(k)} for k = {k}")

    def extraction(self, negatives: bool = False) -> ExtractionControls:
        fc = FatouControls(stop_tol=self.abel_tol, cap=self.cap, escape=self.escape)
        return ExtractionControls(order=self.order, height=self.height, samples=self.samples, n_max=self.nmax,
                                  resolve=self.tol, negatives=negatives, fatou=fc)

    def as_dict(self) -> dict:
        return asdict(self)


FIELDS = {f.name for f in fields(RunConfig)}


def load_config(path: str | None = None, overrides: dict | None = None) -> RunConfig:
    """Defaults, then the JSON file at ``path``, then non-``None`` ``overrides``."""
    cfg = {}
    if path:
        try:
            cfg = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: line {exc.lineno}: {exc.msg}") from None
        if not isinstance(cfg, dict):
            raise ConfigError(f"{path}: top level must be an object")
        unknown = sorted(set(cfg) - FIELDS)
        if unknown:
            raise ConfigError(f"{path}: unknown keys {unknown}")
    cfg.update({k: v for k, v in (overrides or {}).items() if v is not None})
    try:
        return replace(RunConfig(), **cfg)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


__all__ = ["ConfigError", "RunConfig", "load_config"]
