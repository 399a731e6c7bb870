"""File formats for traces, analysis series, and tabular inputs.

Trace files come in two flavors:

* CSV: header ``index,volts,monitor_volts``, one row per sample.
* Binary: little-endian float32, all volts then all monitor samples.

Both carry a JSON sidecar (``<file>.json``) recording the sample rate and
channel layout, since neither payload is self-describing.  All writes are
atomic (temp file + rename) so a crashed run never leaves a half-written
file behind.
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .errors import ScenarioFormatError

_BINARY_DTYPE = "<f4"
DEFAULT_SAMPLE_RATE = 5e8


def _atomic_write(path: Path, data: bytes) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or Path("."), prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def atomic_write_text(path, text: str) -> None:
    _atomic_write(Path(path), text.encode("utf-8"))


def _sidecar_path(path: Path) -> Path:
    return path.with_name(path.name + ".json")


def _write_sidecar(path: Path, fmt: str, sample_rate: float, n: int, meta: dict | None) -> None:
    sidecar = {
        "format": fmt,
        "sample_rate_hz": sample_rate,
        "n_samples": n,
        "channels": ["volts", "monitor_volts"],
        "meta": meta or {},
    }
    atomic_write_text(_sidecar_path(path), json.dumps(sidecar, indent=2) + "\n")


def _read_sidecar(path: Path) -> dict | None:
    sp = _sidecar_path(path)
    if not sp.exists():
        return None
    try:
        return json.loads(sp.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ScenarioFormatError(f"{sp}: unreadable trace sidecar: {exc}") from exc


def write_trace_csv(path, volts, monitor, sample_rate: float, meta: dict | None = None) -> None:
    volts = np.asarray(volts, dtype=np.float64)
    monitor = np.asarray(monitor, dtype=np.float64)
    buf = io.StringIO()
    buf.write("index,volts,monitor_volts\n")
    for i in range(volts.size):
        buf.write(f"{i},{volts[i]:.9g},{monitor[i]:.9g}\n")
    _atomic_write(Path(path), buf.getvalue().encode("ascii"))
    _write_sidecar(Path(path), "csv", sample_rate, volts.size, meta)


def read_trace_csv(path) -> tuple[np.ndarray, np.ndarray, float]:
    """Returns (volts, monitor, sample_rate); rate falls back to 500 MS/s."""
    path = Path(path)
    try:
        data = np.loadtxt(path, delimiter=",", skiprows=1, usecols=(1, 2), ndmin=2)
    except (OSError, ValueError) as exc:
        raise ScenarioFormatError(f"{path}: not a readable trace CSV: {exc}") from exc
    sidecar = _read_sidecar(path)
    rate = float(sidecar["sample_rate_hz"]) if sidecar else DEFAULT_SAMPLE_RATE
    return data[:, 0].copy(), data[:, 1].copy(), rate


def write_trace_binary(path, volts, monitor, sample_rate: float, meta: dict | None = None) -> None:
    volts = np.asarray(volts, dtype=_BINARY_DTYPE)
    monitor = np.asarray(monitor, dtype=_BINARY_DTYPE)
    _atomic_write(Path(path), volts.tobytes() + monitor.tobytes())
    _write_sidecar(Path(path), "f32", sample_rate, volts.size, meta)


def read_trace_binary(path) -> tuple[np.ndarray, np.ndarray, float]:
    """Reads the float32 pair format; the sidecar supplies the sample count."""
    path = Path(path)
    sidecar = _read_sidecar(path)
    raw = np.fromfile(path, dtype=_BINARY_DTYPE)
    if sidecar is not None:
        n = int(sidecar["n_samples"])
        if raw.size != 2 * n:
            raise ScenarioFormatError(
                f"{path}: expected {2 * n} float32 values per sidecar, found {raw.size}"
            )
        rate = float(sidecar["sample_rate_hz"])
    else:
        if raw.size % 2:
            raise ScenarioFormatError(f"{path}: odd float32 count with no sidecar")
        n = raw.size // 2
        rate = DEFAULT_SAMPLE_RATE
    return raw[:n].astype(np.float64), raw[n:].astype(np.float64), rate


def read_trace(path) -> tuple[np.ndarray, np.ndarray, float]:
    """Dispatch on the sidecar's format field, else the file extension."""
    path = Path(path)
    sidecar = _read_sidecar(path)
    fmt = sidecar.get("format") if sidecar else ("csv" if path.suffix.lower() == ".csv" else "f32")
    if fmt == "csv":
        return read_trace_csv(path)
    return read_trace_binary(path)


def write_analysis_csv(path, time_ms, v_plus, v_minus, v_sn_plus, v_sn_minus) -> None:
    """Rolling-variance series export: one row per window position."""
    cols = [np.asarray(c, dtype=np.float64) for c in (time_ms, v_plus, v_minus, v_sn_plus, v_sn_minus)]
    n = cols[0].size
    if any(c.size != n for c in cols):
        raise ScenarioFormatError("analysis columns must share one length")
    buf = io.StringIO()
    buf.write("time_ms,V_plus,V_minus,V_SN_plus,V_SN_minus\n")
    for i in range(n):
        buf.write(",".join(f"{c[i]:.9g}" for c in cols) + "\n")
    _atomic_write(Path(path), buf.getvalue().encode("ascii"))


def read_sweep_csv(path):
    """Pump-power sweep rows: columns p_w_watts, level_db, branch."""
    from .fitting import PowerSweepPoint

    path = Path(path)
    points = []
    try:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or not {"p_w_watts", "level_db", "branch"} <= set(
                reader.fieldnames
            ):
                raise ScenarioFormatError(
                    f"{path}: sweep CSV needs columns p_w_watts, level_db, branch"
                )
            for k, row in enumerate(reader, start=2):
                try:
                    points.append(
                        PowerSweepPoint(
                            float(row["p_w_watts"]), float(row["level_db"]), row["branch"].strip()
                        )
                    )
                except (TypeError, ValueError, KeyError) as exc:
                    raise ScenarioFormatError(f"{path}:{k}: bad sweep row: {exc}") from exc
    except OSError as exc:
        raise ScenarioFormatError(f"{path}: cannot read sweep CSV: {exc}") from exc
    if not points:
        raise ScenarioFormatError(f"{path}: sweep CSV has no data rows")
    return points


def read_peaks_csv(path):
    """Spectrum peak rows: columns freq_hz, power_dbm, kind."""
    from .sideband import SpectralPeak

    path = Path(path)
    peaks = []
    try:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or not {"freq_hz", "power_dbm", "kind"} <= set(
                reader.fieldnames
            ):
                raise ScenarioFormatError(f"{path}: peaks CSV needs columns freq_hz, power_dbm, kind")
            for k, row in enumerate(reader, start=2):
                try:
                    peaks.append(
                        SpectralPeak(float(row["freq_hz"]), float(row["power_dbm"]), row["kind"].strip())
                    )
                except (TypeError, ValueError, KeyError) as exc:
                    raise ScenarioFormatError(f"{path}:{k}: bad peak row: {exc}") from exc
    except OSError as exc:
        raise ScenarioFormatError(f"{path}: cannot read peaks CSV: {exc}") from exc
    if not peaks:
        raise ScenarioFormatError(f"{path}: peaks CSV has no data rows")
    return peaks
