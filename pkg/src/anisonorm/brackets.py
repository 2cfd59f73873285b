"""Versioned store for empirically frozen equivalence constants.

The underlying theorems assert two-sided equivalences with unspecified
constants; tests freeze the constant measured on first run and later runs
must stay within a +-20% band.  The store is a JSON file committed to the
repository; the ANISONORM_BRACKETS environment variable overrides its
location.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path

from .errors import ValidationError

__all__ = ["BracketStore", "default_store_path", "RELATIVE_BAND"]

RELATIVE_BAND = 0.20
ENV_VAR = "ANISONORM_BRACKETS"


def default_store_path() -> Path:
    env = os.environ.get(ENV_VAR)
    if env:
        return Path(env)
    return Path(__file__).parent / "data" / "brackets.json"


@dataclass
class BracketStore:
    path: Path
    values: dict

    @classmethod
    def load(cls, path=None) -> "BracketStore":
        p = Path(path) if path is not None else default_store_path()
        if p.exists():
            values = json.loads(p.read_text())
        else:
            values = {}
        return cls(path=p, values=values)

    def get(self, name: str) -> float:
        if name not in self.values:
            raise ValidationError(
                f"no frozen bracket named {name!r}; run `anisonorm selftest "
                "--freeze` first"
            )
        return float(self.values[name])

    def set(self, name: str, value: float) -> None:
        self.values[name] = float(value)

    def save(self) -> None:
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self.path.write_text(json.dumps(self.values, indent=2, sort_keys=True)
                             + "\n")

    def check(self, name: str, measured: float,
              band: float = RELATIVE_BAND) -> tuple[bool, float]:
        """True when measured lies within the relative band of the frozen value."""
        frozen = self.get(name)
        if frozen == 0.0:
            return measured == 0.0, frozen
        ok = abs(measured - frozen) <= band * abs(frozen)
        return ok, frozen
