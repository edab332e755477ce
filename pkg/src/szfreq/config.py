"""Run configuration: one JSON file covering a whole pipeline run.

Groups the normalization constants, teacher-client connection settings,
and screening settings, plus a seed for anything sampled. Decoding
temperature defaults to 0 so repeated runs are reproducible. The client
credential is read from the environment variable named here; it has no
place in this file.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from .clients import ClientConfig
from .errors import DataError
from .labels import DEFAULT_NORM_CONFIG, NormConfig
from .pipeline import DEFAULT_SCREENING_CONFIG, ScreeningConfig


@dataclass(frozen=True)
class RunConfig:
    normalization: NormConfig = field(default_factory=lambda: DEFAULT_NORM_CONFIG)
    client: ClientConfig = field(default_factory=ClientConfig)
    screening: ScreeningConfig = field(default_factory=lambda: DEFAULT_SCREENING_CONFIG)
    seed: int = 0

    def to_dict(self) -> dict:
        return {
            "normalization": self.normalization.to_dict(),
            "client": self.client.to_dict(),
            "screening": self.screening.to_dict(),
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "RunConfig":
        return cls(
            normalization=(
                NormConfig.from_dict(d["normalization"])
                if "normalization" in d
                else DEFAULT_NORM_CONFIG
            ),
            client=(
                ClientConfig.from_dict(d["client"]) if "client" in d else ClientConfig()
            ),
            screening=(
                ScreeningConfig.from_dict(d["screening"])
                if "screening" in d
                else DEFAULT_SCREENING_CONFIG
            ),
            seed=int(d.get("seed", 0)),
        )

    @classmethod
    def from_file(cls, path: str | Path) -> "RunConfig":
        path = Path(path)
        try:
            obj = json.loads(path.read_text(encoding="utf-8"))
        except OSError as err:
            raise DataError(f"{path}: {err}") from err
        except json.JSONDecodeError as err:
            raise DataError(f"{path}: not valid JSON: {err.msg}") from err
        if not isinstance(obj, dict):
            raise DataError(f"{path}: expected a JSON object")
        try:
            return cls.from_dict(obj)
        except (KeyError, TypeError, ValueError) as err:
            raise DataError(f"{path}: {err}") from err

    def to_file(self, path: str | Path) -> None:
        Path(path).write_text(
            json.dumps(self.to_dict(), indent=2) + "\n", encoding="utf-8"
        )


DEFAULT_RUN_CONFIG = RunConfig()
