#!/usr/bin/env python3
"""End-to-end demo: build the synthetic workspace and run the 5-strategy benchmark.

Usage: python scripts/run_benchmark.py [workspace_dir] [--jobs N]

Roughly 2-3 minutes single-threaded. Prints the summary table and leaves all
artifacts under <workspace_dir>/runs/xx/.
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))
from make_synthetic import make_workspace  # noqa: E402

from tokbench import cli  # noqa: E402


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("workspace", nargs="?", default="synthetic_workspace")
    parser.add_argument("--jobs", type=int, default=1)
    args = parser.parse_args()
    config_path = make_workspace(Path(args.workspace))
    return cli.main(["run-all", "--config", str(config_path), "--jobs", str(args.jobs)])


if __name__ == "__main__":
    sys.exit(main())
