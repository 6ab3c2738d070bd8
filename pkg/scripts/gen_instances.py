#!/usr/bin/env python3
"""Write every constructible benchmark file (mycielN/queenR_C .col plus
burma14.tsp) into ./data."""

import sys
from pathlib import Path

from multising.instances import write_instance_files

if __name__ == "__main__":
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("data")
    for path in write_instance_files(out):
        print(path)
