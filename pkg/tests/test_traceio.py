"""Trace/CSV file formats: round trips, sidecars, malformed-input errors."""

import json

import numpy as np
import pytest

from sqzkit import traceio
from sqzkit.errors import ScenarioFormatError


@pytest.fixture
def trace():
    rng = np.random.default_rng(0)
    volts = 0.05 * rng.standard_normal(500)
    monitor = np.zeros(500)
    monitor[250:260] = 2.0
    return volts, monitor


def test_csv_round_trip(tmp_path, trace):
    volts, monitor = trace
    p = tmp_path / "t.csv"
    traceio.write_trace_csv(p, volts, monitor, 5e8, meta={"channel": 1})
    v, m, rate = traceio.read_trace_csv(p)
    np.testing.assert_allclose(v, volts, rtol=1e-8)
    np.testing.assert_allclose(m, monitor, rtol=1e-8)
    assert rate == 5e8
    sidecar = json.loads((tmp_path / "t.csv.json").read_text())
    assert sidecar["format"] == "csv"
    assert sidecar["n_samples"] == 500
    assert sidecar["meta"]["channel"] == 1


def test_binary_round_trip(tmp_path, trace):
    volts, monitor = trace
    p = tmp_path / "t.f32"
    traceio.write_trace_binary(p, volts, monitor, 2.5e8)
    v, m, rate = traceio.read_trace_binary(p)
    np.testing.assert_allclose(v, volts, atol=1e-8)  # float32 storage
    np.testing.assert_allclose(m, monitor, atol=1e-8)
    assert rate == 2.5e8
    assert p.stat().st_size == 2 * 500 * 4


def test_read_trace_dispatch(tmp_path, trace):
    volts, monitor = trace
    traceio.write_trace_csv(tmp_path / "a.csv", volts, monitor, 1e6)
    traceio.write_trace_binary(tmp_path / "b.f32", volts, monitor, 1e6)
    for name in ("a.csv", "b.f32"):
        v, _, rate = traceio.read_trace(tmp_path / name)
        assert v.size == 500
        assert rate == 1e6


def test_missing_sidecar_defaults_rate(tmp_path, trace):
    volts, monitor = trace
    p = tmp_path / "t.f32"
    traceio.write_trace_binary(p, volts, monitor, 1e6)
    (tmp_path / "t.f32.json").unlink()
    v, m, rate = traceio.read_trace_binary(p)
    assert v.size == 500
    assert rate == traceio.DEFAULT_SAMPLE_RATE


def test_corrupt_sidecar_raises(tmp_path, trace):
    volts, monitor = trace
    p = tmp_path / "t.f32"
    traceio.write_trace_binary(p, volts, monitor, 1e6)
    (tmp_path / "t.f32.json").write_text("{not json")
    with pytest.raises(ScenarioFormatError):
        traceio.read_trace_binary(p)


def test_truncated_binary_raises(tmp_path, trace):
    volts, monitor = trace
    p = tmp_path / "t.f32"
    traceio.write_trace_binary(p, volts, monitor, 1e6)
    data = p.read_bytes()
    p.write_bytes(data[:-8])
    with pytest.raises(ScenarioFormatError):
        traceio.read_trace_binary(p)


def test_unreadable_csv_raises(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("index,volts,monitor_volts\n0,abc,def\n")
    with pytest.raises(ScenarioFormatError):
        traceio.read_trace_csv(p)


def test_no_leftover_temp_files(tmp_path, trace):
    volts, monitor = trace
    traceio.write_trace_binary(tmp_path / "t.f32", volts, monitor, 1e6)
    traceio.write_trace_csv(tmp_path / "t.csv", volts, monitor, 1e6)
    names = sorted(q.name for q in tmp_path.iterdir())
    assert names == ["t.csv", "t.csv.json", "t.f32", "t.f32.json"]


def test_analysis_csv(tmp_path):
    t = np.linspace(0, 1, 5)
    cols = [t, t + 1, t + 2, t + 3, t + 4]
    p = tmp_path / "series.csv"
    traceio.write_analysis_csv(p, *cols)
    lines = p.read_text().splitlines()
    assert lines[0] == "time_ms,V_plus,V_minus,V_SN_plus,V_SN_minus"
    assert len(lines) == 6
    with pytest.raises(ScenarioFormatError):
        traceio.write_analysis_csv(p, t, t, t, t, t[:-1])


def test_sweep_csv(tmp_path):
    p = tmp_path / "sweep.csv"
    p.write_text(
        "p_w_watts,level_db,branch\n"
        "0.1,-0.5,squeezed\n"
        "0.1,1.5,antisqueezed\n"
    )
    points = traceio.read_sweep_csv(p)
    assert len(points) == 2
    assert points[0].pump_power_watts == 0.1
    assert points[0].branch == "squeezed"


def test_sweep_csv_bad_rows(tmp_path):
    p = tmp_path / "sweep.csv"
    p.write_text("p_w_watts,level_db,branch\n0.1,-0.5,squeezed\n0.2,oops,squeezed\n")
    with pytest.raises(ScenarioFormatError, match=":3:"):
        traceio.read_sweep_csv(p)
    p.write_text("power,level\n1,2\n")
    with pytest.raises(ScenarioFormatError, match="columns"):
        traceio.read_sweep_csv(p)
    p.write_text("p_w_watts,level_db,branch\n")
    with pytest.raises(ScenarioFormatError, match="no data"):
        traceio.read_sweep_csv(p)


def test_peaks_csv(tmp_path):
    p = tmp_path / "peaks.csv"
    p.write_text(
        "freq_hz,power_dbm,kind\n"
        "10e6,0.0,fundamental\n"
        "20e6,-40.0,harmonic\n"
        "15e6,-35.0,spur\n"
    )
    peaks = traceio.read_peaks_csv(p)
    assert [pk.kind for pk in peaks] == ["fundamental", "harmonic", "spur"]


def test_peaks_csv_bad_kind(tmp_path):
    p = tmp_path / "peaks.csv"
    p.write_text("freq_hz,power_dbm,kind\n10e6,0.0,sideways\n")
    with pytest.raises(ScenarioFormatError, match=":2:"):
        traceio.read_peaks_csv(p)
