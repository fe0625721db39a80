"""
Rearrangement toolkit - command-line entry point.
Equivalent to the installed `rkit` script.
"""

import sys
from pathlib import Path

# Allow `python main.py ...` from a source checkout
sys.path.insert(0, str(Path(__file__).parent))

from src.cli import main  # noqa: E402

if __name__ == "__main__":
    main()
