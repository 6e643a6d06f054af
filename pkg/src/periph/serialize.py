"""JSON wire formats: channel files, matrix files, and check reports.

Channel files use the ``periph-channel/1`` schema: complex entries are
``[re, im]`` pairs, matrices are row-major lists of such pairs, and floats
round-trip bit-exactly (Python's repr-based JSON float formatting is
shortest-round-trip).  Reports serialize the :class:`periph.reporting`
records; skipped checks carry ``"pass": null`` plus a reason, and their
undefined numeric fields become null rather than NaN so the output stays
strict JSON.
"""

import json
import math

import numpy as np

from .channel import KrausChannel
from .errors import ChannelFormatError
from .reporting import VerificationReport

CHANNEL_SCHEMA = "periph-channel/1"

__all__ = [
    "CHANNEL_SCHEMA", "matrix_to_pairs", "pairs_to_matrix",
    "channel_to_json", "channel_from_json", "load_channel", "dump_channel",
    "load_matrix", "complex_to_pair", "report_to_json",
]


def complex_to_pair(z: complex) -> list:
    return [float(np.real(z)), float(np.imag(z))]


def matrix_to_pairs(m) -> list:
    a = np.asarray(m, dtype=complex)
    return [[complex_to_pair(a[i, j]) for j in range(a.shape[1])]
            for i in range(a.shape[0])]


def pairs_to_matrix(rows, what: str = "matrix") -> np.ndarray:
    if not isinstance(rows, list) or not rows:
        raise ChannelFormatError(f"{what}: expected a non-empty list of rows")
    width = None
    out = []
    for i, row in enumerate(rows):
        if not isinstance(row, list):
            raise ChannelFormatError(f"{what}: row {i} is not a list")
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise ChannelFormatError(
                f"{what}: row {i} has length {len(row)}, expected {width}")
        vals = []
        for j, entry in enumerate(row):
            if (not isinstance(entry, list) or len(entry) != 2
                    or not all(isinstance(t, (int, float)) for t in entry)):
                raise ChannelFormatError(
                    f"{what}: entry ({i},{j}) must be a [re, im] pair")
            if not all(math.isfinite(t) for t in entry):
                raise ChannelFormatError(
                    f"{what}: entry ({i},{j}) is not finite")
            vals.append(complex(entry[0], entry[1]))
        out.append(vals)
    return np.array(out, dtype=complex)


def channel_to_json(c: KrausChannel, metadata: dict | None = None) -> dict:
    return {
        "schema": CHANNEL_SCHEMA,
        "dim": c.dim,
        "label": c.label,
        "kraus": [matrix_to_pairs(k) for k in c.kraus],
        "metadata": metadata or {},
    }


def channel_from_json(obj) -> KrausChannel:
    if not isinstance(obj, dict):
        raise ChannelFormatError("channel file must be a JSON object")
    schema = obj.get("schema")
    if schema != CHANNEL_SCHEMA:
        raise ChannelFormatError(
            f"unsupported schema {schema!r}, expected {CHANNEL_SCHEMA!r}")
    if "dim" not in obj or "kraus" not in obj:
        raise ChannelFormatError("channel file needs 'dim' and 'kraus' fields")
    dim = obj["dim"]
    if not isinstance(dim, int) or dim < 1:
        raise ChannelFormatError(f"dim must be a positive integer, got {dim!r}")
    kraus_raw = obj["kraus"]
    if not isinstance(kraus_raw, list) or not kraus_raw:
        raise ChannelFormatError("'kraus' must be a non-empty list of matrices")
    ops = []
    for i, rows in enumerate(kraus_raw):
        mat = pairs_to_matrix(rows, what=f"kraus[{i}]")
        if mat.shape != (dim, dim):
            raise ChannelFormatError(
                f"kraus[{i}] has shape {mat.shape}, expected ({dim}, {dim})")
        ops.append(mat)
    label = obj.get("label", "")
    if not isinstance(label, str):
        raise ChannelFormatError("label must be a string")
    return KrausChannel(tuple(ops), label=label)


def load_channel(path) -> KrausChannel:
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise ChannelFormatError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ChannelFormatError(f"{path} is not valid JSON: {exc}") from exc
    return channel_from_json(obj)


def dump_channel(c: KrausChannel, path, metadata: dict | None = None) -> None:
    with open(path, "w") as fh:
        json.dump(channel_to_json(c, metadata), fh, indent=2)
        fh.write("\n")


def load_matrix(path) -> np.ndarray:
    """Load a matrix file: either bare rows of [re, im] pairs or
    an object with a 'matrix' field holding them."""
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise ChannelFormatError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ChannelFormatError(f"{path} is not valid JSON: {exc}") from exc
    if isinstance(obj, dict):
        obj = obj.get("matrix")
    return pairs_to_matrix(obj, what=str(path))


def _num_or_null(x: float):
    x = float(x)
    return None if math.isnan(x) else x


def report_to_json(report: VerificationReport, command: str,
                   channel_label: str = "", seed: int | None = None,
                   tolerances: dict | None = None,
                   data: dict | None = None,
                   timings: dict | None = None) -> dict:
    checks = []
    for c in report.checks:
        entry = {
            "name": c.name,
            "paper_anchor": c.anchor,
            "value": _num_or_null(c.value),
            "threshold": _num_or_null(c.threshold),
            "pass": c.passed,
        }
        if c.reason:
            entry["reason"] = c.reason
        checks.append(entry)
    out = {
        "command": command,
        "channel_label": channel_label,
        "seed": seed,
        "tolerances": tolerances or {},
        "checks": checks,
        "meta": _jsonable(report.meta),
        "all_pass": report.passed,
    }
    if data is not None:
        out["data"] = _jsonable(data)
    out["timings"] = timings or {}
    return out


def _jsonable(obj):
    """Recursively coerce numpy scalars/arrays and complex numbers to JSON."""
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (complex, np.complexfloating)):
        z = complex(obj)
        if z.imag == 0.0:
            return z.real
        return complex_to_pair(z)
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    return obj
