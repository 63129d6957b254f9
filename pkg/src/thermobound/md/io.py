"""Trajectory checkpoints and statistics export.

Checkpoint format: one flat binary file of little-endian float64 values
(times, positions, velocities, forces, local potentials, virials, neighbor
counts in that order) plus a JSON sidecar header carrying shapes, N, dt,
units, and the seed.  Statistics export is a two-column CSV.
"""

import csv
import json
import pathlib

import numpy as np

from .system import Langevin, MDSystem, MDTrajectory

_ORDER = ["times", "positions", "velocities", "forces", "local_potentials",
          "virials", "neighbor_counts"]


def write_checkpoint(traj: MDTrajectory, path):
    path = pathlib.Path(path)
    arrays = {name: np.asarray(getattr(traj, name), dtype="<f8") for name in _ORDER}
    sys_ = traj.system
    header = {
        "format": "thermobound-trajectory-v1",
        "dtype": "<f8",
        "order": _ORDER,
        "shapes": {name: list(a.shape) for name, a in arrays.items()},
        "n": sys_.n if sys_ else None,
        "dt": sys_.dt if sys_ else None,
        "box": sys_.box if sys_ else None,
        "mass": sys_.mass if sys_ else None,
        "potential": [sys_.potential[0], sys_.potential[1]] if sys_ else None,
        "thermostat": ({"gamma": sys_.thermostat.gamma, "T": sys_.thermostat.T,
                        "seed": sys_.thermostat.seed}
                       if sys_ and sys_.thermostat else None),
        "units": "reduced-lj",
        "seed": traj.metadata.get("seed"),
    }
    with open(path, "wb") as fh:
        for name in _ORDER:
            fh.write(arrays[name].tobytes())
    with open(path.with_suffix(path.suffix + ".json"), "w", encoding="utf-8") as fh:
        json.dump(header, fh, indent=1, sort_keys=True)
    return path


def read_checkpoint(path) -> MDTrajectory:
    path = pathlib.Path(path)
    with open(path.with_suffix(path.suffix + ".json"), "r", encoding="utf-8") as fh:
        header = json.load(fh)
    if header.get("format") != "thermobound-trajectory-v1":
        raise IOError(f"unrecognized checkpoint format in {path}")
    raw = np.fromfile(path, dtype="<f8")
    arrays = {}
    offset = 0
    for name in header["order"]:
        shape = header["shapes"][name]
        size = int(np.prod(shape))
        arrays[name] = raw[offset: offset + size].reshape(shape)
        offset += size
    arrays["neighbor_counts"] = arrays["neighbor_counts"].astype(np.int64)
    system = None
    if header.get("n") is not None:
        thermo = header.get("thermostat")
        system = MDSystem(
            n=header["n"], box=header["box"], mass=header["mass"],
            potential=(header["potential"][0], header["potential"][1]),
            dt=header["dt"],
            thermostat=Langevin(**thermo) if thermo else None,
        )
    return MDTrajectory(system=system, metadata={"seed": header.get("seed")}, **arrays)


def write_statistics_csv(stats: dict, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["statistic", "value"])
        for key in sorted(stats):
            value = stats[key]
            writer.writerow([key, repr(value) if isinstance(value, float) else value])
    return path
