"""
Configuration for the rearrangement toolkit.

Settings are layered: config.yaml, then <env>.yaml next to it, then RKIT_* variables.
"""

import os
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Dict, List, Tuple

import yaml

from ..checks.report import SuiteConfig
from ..solvers.gradient_flow import FlowConfig


@dataclass
class GridDefaults:
    """Default grid parameters for commands that take no --grid."""

    length: float
    h: float
    dim: int

    def to_dict(self) -> Dict[str, Any]:
        return {"L": self.length, "h": self.h, "dim": self.dim}


def read_sections(path: Path) -> Dict[str, Any]:
    """Read a YAML mapping of sections; an empty file yields {}."""
    with open(path, "r") as f:
        return yaml.safe_load(f) or {}


def overlay(sections: Dict[str, Any], patch: Dict[str, Any]) -> None:
    """Apply patch onto sections in place, descending into nested mappings."""
    for name, value in patch.items():
        current = sections.get(name)
        if isinstance(current, dict) and isinstance(value, dict):
            overlay(current, value)
        else:
            sections[name] = value


class ConfigManager:
    """
    Layered configuration for the rkit command and the test suite.

    Features:
    - Base YAML file plus an optional per-environment overlay
    - RKIT_SEED, RKIT_JOBS and RKIT_LOG_LEVEL overrides
    - Dotted lookups and typed views for the flow, suite and grid sections
    """

    # Environment variable -> (section path, converter)
    ENV_MAPPINGS: Dict[str, Tuple[List[str], Callable[[str], Any]]] = {
        "RKIT_SEED": (["verify", "seed"], int),
        "RKIT_JOBS": (["verify", "jobs"], int),
        "RKIT_LOG_LEVEL": (["logging", "level"], str),
    }

    def __init__(self, config_path: str = "config/config.yaml", env: str = "development"):
        self.config_path = Path(config_path)
        self.env = env
        if not self.config_path.is_file():
            raise FileNotFoundError(f"Configuration file not found: {self.config_path}")

        self.config: Dict[str, Any] = read_sections(self.config_path)
        env_file = self.config_path.with_name(f"{env}.yaml")
        if env_file.is_file():
            overlay(self.config, read_sections(env_file))
        self._apply_environment()

    def _apply_environment(self) -> None:
        for variable, (section_path, convert) in self.ENV_MAPPINGS.items():
            raw = os.getenv(variable)
            if not raw:
                continue
            *parents, leaf = section_path
            section = self.config
            for name in parents:
                section = section.setdefault(name, {})
            section[leaf] = convert(raw)

    def get(self, path: str, default: Any = None) -> Any:
        """
        Look up a dotted path such as "flow.max_iter".

        Returns:
            The stored value, or default when any segment is missing
        """
        node: Any = self.config
        for name in path.split("."):
            if not isinstance(node, dict) or name not in node:
                return default
            node = node[name]
        return node

    def section(self, name: str) -> Dict[str, Any]:
        return dict(self.config.get(name) or {})

    def get_flow_config(self) -> FlowConfig:
        return FlowConfig.from_dict(self.section("flow"))

    def get_suite_config(self) -> SuiteConfig:
        """Suite parameters with the flow section embedded."""
        verify = self.section("verify")
        verify["flow"] = self.get_flow_config()
        return SuiteConfig.from_dict(verify)

    def get_grid_defaults(self) -> GridDefaults:
        grid = self.section("grid")
        return GridDefaults(
            length=float(grid.get("length", 30.0)),
            h=float(grid.get("h", 0.05)),
            dim=int(grid.get("dim", 1)),
        )

    def is_testing(self) -> bool:
        return self.env == "testing"
