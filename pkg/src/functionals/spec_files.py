"""
Loader for flat key=value nonlinearity spec files.
"""

import configparser
import logging
from pathlib import Path
from typing import Dict, List, Optional, Union

import pandas as pd

from ..core.exceptions import InvalidSpecError
from .nonlinearity import CoupledGSpec, NonlinearitySpec

logger = logging.getLogger(__name__)

SECTION = "spec"
COUPLED_KEYS = ("a1", "a2", "r1", "r2", "beta", "gamma1", "gamma2")

AnySpec = Union[NonlinearitySpec, CoupledGSpec]


def _read_flat(path: Path) -> Dict[str, str]:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"), interpolation=None)
    try:
        text = path.read_text()
        parser.read_string(f"[{SECTION}]\n{text}", source=str(path))
    except (OSError, configparser.Error) as e:
        raise InvalidSpecError(f"cannot read spec file {path}: {e}") from e
    return dict(parser[SECTION])


def _floats(raw: str, key: str) -> List[float]:
    try:
        return [float(item) for item in raw.split(",") if item.strip()]
    except ValueError as e:
        raise InvalidSpecError(f"key '{key}' must be a comma-separated list of numbers") from e


def _number(entries: Dict[str, str], key: str, default: Optional[float] = None) -> float:
    if key not in entries:
        if default is None:
            raise InvalidSpecError(f"spec file is missing '{key}'")
        return default
    try:
        return float(entries[key])
    except ValueError as e:
        raise InvalidSpecError(f"key '{key}' is not a number: {entries[key]!r}") from e


def parse_spec(entries: Dict[str, str], base_dir: Path = Path(".")) -> AnySpec:
    """
    Build a spec from parsed key=value entries.

    Args:
        entries: Keys `kind`, `dim` and the family parameters
        base_dir: Directory that relative `table` paths resolve against

    Returns:
        NonlinearitySpec for kind power/tabulated, CoupledGSpec for kind coupled
    """
    kind = entries.get("kind", "").strip().lower()
    dim = int(_number(entries, "dim", 1.0))

    if kind == "power":
        return NonlinearitySpec.power(_number(entries, "p"), dim=dim)

    if kind == "tabulated":
        if "table" in entries:
            table_path = base_dir / entries["table"].strip()
            try:
                frame = pd.read_csv(table_path, float_precision="round_trip")
            except (OSError, ValueError) as e:
                raise InvalidSpecError(f"cannot read table {table_path}: {e}") from e
            if not {"s", "F"} <= set(frame.columns):
                raise InvalidSpecError(f"table {table_path} needs columns s and F")
            return NonlinearitySpec.tabulated(frame["s"].to_numpy(), frame["F"].to_numpy(), dim=dim)
        if "s" not in entries or "f" not in entries:
            raise InvalidSpecError("tabulated spec needs 's' and 'F' lists or a 'table' path")
        return NonlinearitySpec.tabulated(
            _floats(entries["s"], "s"), _floats(entries["f"], "F"), dim=dim
        )

    if kind == "coupled":
        defaults = CoupledGSpec()
        params = {key: _number(entries, key, getattr(defaults, key)) for key in COUPLED_KEYS}
        return CoupledGSpec(dim=dim, **params)

    raise InvalidSpecError(f"unknown spec kind {kind!r}; expected power, tabulated or coupled")


def load_spec(path: Union[str, Path]) -> AnySpec:
    """Read a spec file from disk."""
    path = Path(path)
    spec = parse_spec(_read_flat(path), base_dir=path.parent)
    logger.info(f"Loaded {type(spec).__name__} from {path}")
    return spec


def dump_spec(spec: AnySpec) -> str:
    """Serialize a spec back to key=value text."""
    data = spec.to_dict()
    lines = []
    for key, value in data.items():
        if isinstance(value, list):
            value = ",".join(repr(float(item)) for item in value)
        lines.append(f"{key} = {value}")
    return "\n".join(lines) + "\n"
