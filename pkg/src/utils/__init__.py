"""
Utilities package initialization.
"""

from .field_io import emit_plot_data, load_field, save_field, write_json
from .logger import setup_logging
from .manifest import RunManifest

__all__ = [
    "setup_logging",
    "load_field",
    "save_field",
    "write_json",
    "emit_plot_data",
    "RunManifest",
]
