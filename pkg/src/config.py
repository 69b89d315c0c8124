"""Centralized runtime configuration for netmrt - the networked MRT laboratory."""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

logger = logging.getLogger(__name__)

ORACLE_HARD_MAX = 20


@dataclass
class Config:
    """Runtime settings shared by every command."""

    # Base directory - output paths derive from this
    base_dir: Path = Path(__file__).resolve().parent.parent
    out_dir_override: Optional[Path] = None

    # Parallelism
    workers: int = 4

    # Solver settings
    mf_tol: float = 1e-10
    oracle_tol: float = 1e-13
    oracle_cap: int = 12
    oracle_max_iter: int = 100_000

    # Output settings
    log_level: str = "INFO"
    output_format: str = "csv"

    @property
    def data_dir(self) -> Path:
        """Data directory path."""
        return self.base_dir / "data"

    @property
    def out_dir(self) -> Path:
        """Directory experiment and dump files are written to."""
        return self.out_dir_override or self.data_dir / "runs"

    @property
    def scenarios_dir(self) -> Path:
        """Shipped scenario files."""
        return Path(__file__).resolve().parent.parent / "scenarios"

    @classmethod
    def load(cls, env_path: Optional[Path] = None) -> Config:
        """Load configuration from environment and .env file.

        Priority: .env file > environment variables > defaults
        """
        config = cls()

        project_dir = Path(__file__).resolve().parent.parent
        config.base_dir = project_dir

        if env_path is None:
            env_path = project_dir / ".env"

        env_vars = {}
        env_path = Path(env_path)
        if env_path.exists():
            try:
                for line in env_path.read_text(encoding="utf-8").splitlines():
                    line = line.strip()
                    if not line or line.startswith("#") or "=" not in line:
                        continue
                    key, value = line.split("=", 1)
                    env_vars[key.strip()] = value.strip().strip('"').strip("'")
            except OSError as e:
                logger.warning("Could not read .env file %s: %s", env_path, e)

        def lookup(key: str) -> Optional[str]:
            return env_vars.get(key, os.environ.get(key))

        if base := lookup("MRT_BASE_DIR"):
            config.base_dir = Path(base).expanduser()
        if out := lookup("MRT_OUT_DIR"):
            config.out_dir_override = Path(out).expanduser()
        if workers := lookup("MRT_WORKERS"):
            config.workers = max(1, int(workers))
        if tol := lookup("MRT_MF_TOL"):
            config.mf_tol = float(tol)
        if tol := lookup("MRT_ORACLE_TOL"):
            config.oracle_tol = float(tol)
        if cap := lookup("MRT_ORACLE_CAP"):
            config.oracle_cap = min(int(cap), ORACLE_HARD_MAX)
            if int(cap) > ORACLE_HARD_MAX:
                logger.warning("MRT_ORACLE_CAP=%s clipped to the hard maximum %d", cap, ORACLE_HARD_MAX)
        if level := lookup("MRT_LOG_LEVEL"):
            config.log_level = level.upper()
        if fmt := lookup("MRT_FORMAT"):
            config.output_format = fmt.lower()

        return config

    def save_env(self, env_path: Optional[Path] = None) -> Path:
        """Save current configuration to a .env file."""
        if env_path is None:
            env_path = Path(__file__).resolve().parent.parent / ".env"

        lines = [
            "# netmrt - runtime configuration",
            f"# MRT_BASE_DIR={self.base_dir}",
            f"# MRT_OUT_DIR={self.out_dir}",
            "",
            "# Parallelism",
            f"MRT_WORKERS={self.workers}",
            "",
            "# Solver settings",
            f"MRT_MF_TOL={self.mf_tol:g}",
            f"MRT_ORACLE_TOL={self.oracle_tol:g}",
            f"MRT_ORACLE_CAP={self.oracle_cap}",
            "",
            "# Output settings",
            f"MRT_LOG_LEVEL={self.log_level}",
            f"MRT_FORMAT={self.output_format}",
        ]

        env_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        return env_path


# Global configuration instance
_config: Optional[Config] = None


def get_config(force_reload: bool = False) -> Config:
    """Get the global configuration instance."""
    global _config
    if _config is None or force_reload:
        _config = Config.load()
    return _config


def reset_config() -> None:
    """Reset the global configuration (mainly for testing)."""
    global _config
    _config = None
