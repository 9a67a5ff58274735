"""Engine configuration: JSON config file plus environment overrides.

Resolution order, lowest to highest precedence: built-in defaults, the
config file (explicit path argument, else the IVY_CONFIG environment
variable), then individual IVY_* environment variables.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, replace
from pathlib import Path

from . import canonical

CONFIG_ENV = "IVY_CONFIG"

_FILE_KEYS = {"host", "port", "storeDir", "maxDatasetBytes"}


@dataclass(frozen=True)
class EngineConfig:
    host: str = "127.0.0.1"
    port: int = 8799
    store_dir: str = "./ivy-store"
    max_dataset_bytes: int = 10 * 1024 * 1024

    def to_json_value(self) -> dict:
        return {
            "host": self.host,
            "port": self.port,
            "storeDir": self.store_dir,
            "maxDatasetBytes": self.max_dataset_bytes,
        }


def _from_file(path: Path) -> dict:
    doc = canonical.loads(path.read_bytes())
    if not isinstance(doc, dict):
        raise ValueError(f"{path}: config must be a JSON object")
    unknown = set(doc) - _FILE_KEYS
    if unknown:
        raise ValueError(f"{path}: unknown config key(s) {sorted(unknown)}")
    return doc


def _int_env(name: str, raw: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"{name} must be an integer, got {raw!r}") from None


def load_config(
    path: str | Path | None = None,
    environ: dict[str, str] | None = None,
) -> EngineConfig:
    env = os.environ if environ is None else environ
    config = EngineConfig()

    file_path = Path(path) if path is not None else (
        Path(env[CONFIG_ENV]) if env.get(CONFIG_ENV) else None
    )
    if file_path is not None:
        doc = _from_file(file_path)
        config = replace(
            config,
            host=doc.get("host", config.host),
            port=doc.get("port", config.port),
            store_dir=doc.get("storeDir", config.store_dir),
            max_dataset_bytes=doc.get("maxDatasetBytes", config.max_dataset_bytes),
        )

    if env.get("IVY_HOST"):
        config = replace(config, host=env["IVY_HOST"])
    if env.get("IVY_PORT"):
        config = replace(config, port=_int_env("IVY_PORT", env["IVY_PORT"]))
    if env.get("IVY_STORE_DIR"):
        config = replace(config, store_dir=env["IVY_STORE_DIR"])
    if env.get("IVY_MAX_DATASET_BYTES"):
        config = replace(
            config,
            max_dataset_bytes=_int_env(
                "IVY_MAX_DATASET_BYTES", env["IVY_MAX_DATASET_BYTES"]
            ),
        )
    return config
