"""
Run manifests embedded in every JSON output.
"""

import platform
from dataclasses import dataclass, field
from datetime import datetime
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from ..core import __version__

# Keys that vary between otherwise identical runs
VOLATILE_KEYS = ("timestamp", "timings")


@dataclass
class RunManifest:
    """
    Everything needed to reproduce a run: command line, configuration snapshot,
    seed, grid parameters and tool version. timestamp and timings are excluded
    from the reproduction contract.
    """

    command: List[str]
    config: Dict[str, Any]
    seed: Optional[int] = None
    grid: Optional[Dict[str, Any]] = None
    tool_version: str = __version__
    timestamp: str = ""
    timings: Dict[str, float] = field(default_factory=dict)

    @classmethod
    def capture(
        cls,
        command: Sequence[str],
        config: Dict[str, Any],
        seed: Optional[int] = None,
        grid: Optional[Dict[str, Any]] = None,
    ) -> "RunManifest":
        return cls(
            command=list(command),
            config=config,
            seed=seed,
            grid=grid,
            timestamp=datetime.now().isoformat(timespec="seconds"),
        )

    @property
    def environment(self) -> Dict[str, str]:
        return {"python": platform.python_version(), "numpy": np.__version__}

    def to_dict(self) -> Dict[str, Any]:
        return {
            "command": self.command,
            "config": self.config,
            "seed": self.seed,
            "grid": self.grid,
            "tool_version": self.tool_version,
            "environment": self.environment,
            "timestamp": self.timestamp,
            "timings": dict(sorted(self.timings.items())),
        }

    def reproducible_dict(self) -> Dict[str, Any]:
        """The manifest without timestamp and timings."""
        return {k: v for k, v in self.to_dict().items() if k not in VOLATILE_KEYS}
