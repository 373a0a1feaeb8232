"""Print the dimension records of every ``*_dims.yaml`` manifest as one table.

    python scripts/dims_table.py [manifest ...]
"""

import glob
import os
import sys

from cotlab.cli import cmd_dims
from cotlab.experiments import ExperimentManifest

HERE = os.path.dirname(os.path.abspath(__file__))


def main(paths) -> None:
    paths = paths or sorted(glob.glob(os.path.join(HERE, "manifests", "*_dims.yaml")))
    for path in paths:
        man = ExperimentManifest.load(path)
        recs = cmd_dims(man)
        cells = "  ".join(f"{r.metric}={r.value}" for r in recs)
        print(f"{man.id:18s} M={man.M:<4d} {cells}")


if __name__ == "__main__":
    main(sys.argv[1:])
