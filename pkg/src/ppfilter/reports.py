"""CSV and manifest serialization.

Numbers are written as shortest round-trip decimals (`repr` of a Python
float), except spike times and marks which use 17 significant digits, so a
file read back reproduces the doubles bit for bit. Rows end with a plain
newline and files are written in deterministic order; rerunning a report
with the same config and seed yields byte-identical output.
"""

from __future__ import annotations

import hashlib
import io
import json
from importlib import metadata

import numpy as np

from .encoding import SpikeTrain
from .filtering import FilterDiagnostics, FilterResult


def format_value(value) -> str:
    """Shortest round-trip text for one CSV field."""
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv(path, header: list[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write(",".join(header) + "\n")
        for row in rows:
            handle.write(",".join(format_value(v) for v in row) + "\n")


def read_csv(path) -> tuple[list[str], np.ndarray]:
    """Read a numeric CSV written by `write_csv` back into an array."""
    with open(path, "r", encoding="utf-8") as handle:
        header = handle.readline().strip().split(",")
        body = handle.read()
    if not body.strip():
        return header, np.zeros((0, len(header)))
    data = np.loadtxt(io.StringIO(body), delimiter=",", ndmin=2)
    return header, data


def write_spike_train(path, train: SpikeTrain) -> None:
    """Spike train schema: t, theta_1 .. theta_m at 17 significant digits."""
    m = train.marks.shape[1]
    header = ["t"] + [f"theta_{j + 1}" for j in range(m)]
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write(",".join(header) + "\n")
        for t, mark in zip(train.times, train.marks):
            fields = [format(t, ".17g")] + [format(v, ".17g") for v in mark]
            handle.write(",".join(fields) + "\n")


def read_spike_train(path, horizon: float) -> SpikeTrain:
    header, data = read_csv(path)
    if header[0] != "t":
        raise ValueError(f"not a spike-train CSV: header {header}")
    return SpikeTrain(times=data[:, 0], marks=data[:, 1:], horizon=horizon)


def write_path(path, times: np.ndarray, states: np.ndarray) -> None:
    """State path schema: t, x_1 .. x_n."""
    n = states.shape[1]
    header = ["t"] + [f"x_{i + 1}" for i in range(n)]
    rows = ([t] + list(row) for t, row in zip(times, states))
    write_csv(path, header, rows)


def belief_header(n: int) -> list[str]:
    cols = ["t"] + [f"mu_{i + 1}" for i in range(n)]
    for i in range(n):
        for j in range(i, n):
            cols.append(f"sigma_{i + 1}{j + 1}")
    return cols


def write_belief_series(path, result: FilterResult) -> None:
    """Belief schema: t, mu_1..mu_n, then the row-major upper triangle
    sigma_11, sigma_12, ..., sigma_1n, sigma_22, ..., sigma_nn."""
    n = result.means.shape[1]
    iu = np.triu_indices(n)

    def rows():
        for k in range(result.times.size):
            yield ([result.times[k]] + list(result.means[k])
                   + list(result.covs[k][iu]))

    write_csv(path, belief_header(n), rows())


def read_belief_series(path) -> FilterResult:
    header, data = read_csv(path)
    n = sum(1 for name in header if name.startswith("mu_"))
    iu = np.triu_indices(n)
    times = data[:, 0]
    means = data[:, 1:1 + n]
    covs = np.zeros((data.shape[0], n, n))
    covs[:, iu[0], iu[1]] = data[:, 1 + n:]
    covs[:, iu[1], iu[0]] = data[:, 1 + n:]
    zeros = np.zeros(times.size)
    return FilterResult(times=times, means=means, covs=covs,
                        diagnostics=FilterDiagnostics(zeros, zeros, 0))


def config_digest(config_text: str) -> str:
    return hashlib.sha256(config_text.encode("utf-8")).hexdigest()


def write_manifest(path, command: str, config_text: str, settings: dict) -> None:
    """Run metadata: config hash, resolved settings, library versions.

    Deliberately excludes anything volatile (timestamps, paths, worker
    counts) so identical runs produce identical files.
    """
    try:
        version = metadata.version("ppfilter")
    except metadata.PackageNotFoundError:
        version = "unknown"
    payload = {
        "command": command,
        "config_sha256": config_digest(config_text),
        "settings": settings,
        "versions": {
            "ppfilter": version,
            "numpy": np.__version__,
        },
    }
    with open(path, "w", encoding="utf-8", newline="") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True)
        handle.write("\n")
