"""Run configuration: INI-style ``key = value`` sections with command-line overrides."""

from __future__ import annotations

import configparser
import hashlib
import io
from dataclasses import dataclass, field

DEFAULTS: dict[str, dict[str, str]] = {
    "data": {
        "bars": "",
        "symbols": "",
        "sessions": "09:00-11:00, 12:30-15:00",
        "skip_open_minutes": "30",
        "delta_t": "1",
    },
    "eigen": {
        "daily_delta_t": "1",
        "sliding_delta_t": "5",
        "width_days": "5",
        "step_days": "1",
        "block_days": "5",
        "global_weights": "false",
        "weights": "false",
        "index": "",
        "max_lag": "20",
    },
    "mrw": {
        "lambda2": "0.014",
        "L_over_dt": "1024",
        "sigma": "1",
        "delta_t": "1",
        "length": "131072",
        "series": "",
        "column": "",
        "max_lag": "1024",
        "fit_lo": "10",
        "fit_hi": "",
    },
    "precursor": {
        "series": "",
        "column": "",
        "delta_t": "5",
        "window_width": "20000",
        "step": "242",
        "fit_lo": "10",
        "fit_hi": "",
        "max_lag": "",
        "slope_window": "10",
        "index": "",
        "events": "",
        "threshold": "-0.05",
        "basis": "daily",
    },
    "correlogram": {
        "input": "",
        "column": "",
        "input_b": "",
        "column_b": "",
        "max_lag": "20",
    },
    "run": {
        "out_dir": "out",
        "seed": "0",
        "threads": "1",
    },
}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    sections: dict[str, dict[str, str]] = field(
        default_factory=lambda: {s: dict(kv) for s, kv in DEFAULTS.items()})

    @classmethod
    def from_text(cls, text: str, source: str = "<config>") -> "RunConfig":
        cfg = cls()
        cfg.update_from_text(text, source)
        return cfg

    @classmethod
    def load(cls, path=None) -> "RunConfig":
        cfg = cls()
        if path is not None:
            try:
                with open(path, encoding="utf-8") as fh:
                    text = fh.read()
            except OSError as exc:
                raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
            cfg.update_from_text(text, str(path))
        return cfg

    def update_from_text(self, text: str, source: str):
        parser = configparser.ConfigParser(interpolation=None)
        parser.optionxform = str
        try:
            parser.read_string(text, source=source)
        except configparser.Error as exc:
            raise ConfigError(f"{source}: {exc}") from None
        for section in parser.sections():
            for key, value in parser[section].items():
                self.set(section, key, value)

    def set(self, section: str, key: str, value):
        if section not in self.sections:
            raise ConfigError(f"unknown config section [{section}]")
        if key not in self.sections[section]:
            raise ConfigError(f"unknown config key {section}.{key}")
        self.sections[section][key] = "" if value is None else str(value).strip()

    def get(self, section: str, key: str) -> str:
        return self.sections[section][key]

    def get_int(self, section: str, key: str, default=None):
        return self._typed(section, key, int, default)

    def get_float(self, section: str, key: str, default=None):
        return self._typed(section, key, float, default)

    def get_bool(self, section: str, key: str) -> bool:
        v = self.get(section, key).lower()
        if v in ("1", "true", "yes", "on"):
            return True
        if v in ("0", "false", "no", "off", ""):
            return False
        raise ConfigError(f"{section}.{key}: expected a boolean, got {v!r}")

    def get_list(self, section: str, key: str) -> list[str]:
        return [p.strip() for p in self.get(section, key).split(",") if p.strip()]

    def _typed(self, section, key, kind, default):
        v = self.get(section, key)
        if v == "":
            return default
        try:
            return kind(v)
        except ValueError:
            raise ConfigError(f"{section}.{key}: expected {kind.__name__}, got {v!r}") from None

    def to_text(self) -> str:
        """Canonical form: sections and keys sorted, one ``key = value`` per line."""
        out = io.StringIO()
        for section in sorted(self.sections):
            out.write(f"[{section}]\n")
            for key in sorted(self.sections[section]):
                out.write(f"{key} = {self.sections[section][key]}\n")
            out.write("\n")
        return out.getvalue()

    def digest(self) -> str:
        return hashlib.sha256(self.to_text().encode()).hexdigest()

    def __eq__(self, other):
        return isinstance(other, RunConfig) and self.sections == other.sections
