"""Randomized product formulas (qDRIFT) with error bounds and experiments."""

import csv
import io

from ._core import *  # noqa: F401,F403
from ._core import __version__, run_experiment


def run_experiment_rows(name, **overrides):
    """Like run_experiment, parsed into a list of dicts with typed fields."""
    rows = []
    for r in csv.DictReader(io.StringIO(run_experiment(name, overrides))):
        r["n"] = int(r["n"])
        r["N"] = int(r["N"])
        r["rep"] = int(r["rep"])
        r["seed"] = int(r["seed"])
        r["value"] = float(r["value"])
        rows.append(r)
    return rows
