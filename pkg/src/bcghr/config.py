"""Pipeline configuration and the flat ``key = value`` config file format."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigError, ParseError

WINDOW_FUNCTIONS = ("rectangular", "hann")


@dataclass(frozen=True)
class PipelineConfig:
    window_s: float = 30.0
    hop_s: float = 15.0
    band_low_hz: float = 0.7
    band_high_hz: float = 10.0
    filter_order: int = 4
    search_low_hz: float = 0.6
    search_high_hz: float = 4.0
    continuity_bpm: float = 10.0
    pad_factor: int = 8
    window_fn: str = "hann"

    def __post_init__(self):
        for name in ("window_s", "hop_s", "band_low_hz", "band_high_hz",
                     "search_low_hz", "search_high_hz", "continuity_bpm"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)!r}")
        for name in ("filter_order", "pad_factor"):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise ConfigError(f"{name} must be a positive integer, got {value!r}")
        if self.band_low_hz >= self.band_high_hz:
            raise ConfigError("band_low_hz must be below band_high_hz")
        if self.search_low_hz >= self.search_high_hz:
            raise ConfigError("search_low_hz must be below search_high_hz")
        if self.hop_s > self.window_s:
            raise ConfigError("hop_s must not exceed window_s")
        if self.window_fn not in WINDOW_FUNCTIONS:
            raise ConfigError(f"window_fn must be one of {WINDOW_FUNCTIONS}, got {self.window_fn!r}")

    def check_rate(self, sample_rate_hz: float) -> None:
        """Raise if the band-pass edges do not fit below Nyquist at this rate."""
        if self.band_high_hz >= sample_rate_hz / 2:
            raise ConfigError(
                f"band_high_hz {self.band_high_hz} is not below Nyquist "
                f"({sample_rate_hz / 2} Hz)"
            )

    @property
    def global_band_hz(self) -> tuple[float, float]:
        return (self.search_low_hz, self.search_high_hz)

    def replace(self, **changes) -> "PipelineConfig":
        changes = {k: v for k, v in changes.items() if v is not None}
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


_FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(PipelineConfig)}


def coerce_field(name: str, text: str):
    """Convert a textual config value to the declared field type."""
    if name not in _FIELD_TYPES:
        raise ConfigError(f"unknown config key {name!r}")
    kind = _FIELD_TYPES[name]
    try:
        if kind == "int":
            value = float(text)
            if value != int(value):
                raise ValueError
            return int(value)
        if kind == "float":
            return float(text)
    except ValueError:
        raise ConfigError(f"{name}: cannot interpret {text!r} as {kind}") from None
    return text.strip()


def parse_key_values(text: str, source: str = "<string>") -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"expected 'key = value', got {raw.strip()!r}", f"{source}:{lineno}")
        key, _, value = line.partition("=")
        out[key.strip()] = value.strip()
    return out


def load_config(path=None, **overrides) -> PipelineConfig:
    """Build a config from an optional file, then apply non-None ``overrides``."""
    values = {}
    if path is not None:
        path = Path(path)
        if not path.is_file():
            raise FileNotFoundError(path)
        raw = parse_key_values(path.read_text(encoding="utf-8"), str(path))
        values = {k: coerce_field(k, v) for k, v in raw.items()}
    values.update({k: v for k, v in overrides.items() if v is not None})
    return PipelineConfig(**values)
