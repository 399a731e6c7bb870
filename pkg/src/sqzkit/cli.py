"""Scenario-driven command line: predict, synthesize, analyze, fit, RF math.

Subcommands
-----------
expect      loss budget -> predicted squeezing/anti-squeezing
simulate    write synthetic dual-detector traces for a scenario
analyze     run the full post-processing chain on recorded/synthetic traces
fit         pump-coupling fit from a power-sweep CSV
sideband    modulation-depth and RF drive-power math
rf-metrics  THD/SFDR from a spectrum peak list CSV

A scenario is a JSON file (or the name of a bundled one) holding the source
strength, the per-arm loss budget, synthesis parameters, and analysis
defaults.  Reports go to stdout as JSON by default (``--format table|csv``
for humans/spreadsheets, ``--out`` to write a file atomically).  Errors
print a one-object JSON diagnostic to stderr and exit 1.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__, fitting, pipeline, synth, traceio
from .budget import ARM_FIRST, ARM_SECOND, ARMS, ChannelBudget, LossItem, predict
from .errors import ScenarioFormatError, SqzkitError

_ARM_NAMES = (ARM_FIRST, ARM_SECOND)
_TOP_KEYS = {"name", "description", "source", "budget", "synthesis", "analysis"}
_SOURCE_KEYS = {"r", "pump"}
_PUMP_KEYS = {"a", "L", "eta_w", "eta_p", "p_w"}
_BUDGET_KEYS = {"electronics_noise_db", "items", "stated_total_db"}
_ITEM_KEYS = {"label", "loss_db", "arm"}
_ANALYSIS_KEYS = {"window", "max_delay", "discard_fraction"}
_SYNTH_KEYS = set(synth.config_as_dict(synth.SynthConfig(r=0.0))) - {"r", "t_b", "t_c"}

_DEFAULT_MAX_DELAY = 25
_DEFAULT_FIT = {"t_b": 0.3097, "t_c": 0.2576, "a": 0.24, "L": 2.5, "eta_w": 0.53}


# ---------------------------------------------------------------- scenarios


def bundled_scenario_names() -> list[str]:
    root = resources.files("sqzkit").joinpath("scenarios")
    return sorted(p.name[: -len(".json")] for p in root.iterdir() if p.name.endswith(".json"))


def _check_keys(obj: dict, allowed: set, path: str) -> None:
    unknown = set(obj) - allowed
    if unknown:
        raise ScenarioFormatError(
            f"{path}: unknown key(s) {sorted(unknown)}; allowed: {sorted(allowed)}"
        )


def _need(obj: dict, key: str, path: str):
    if key not in obj:
        raise ScenarioFormatError(f"{path}: missing required key {key!r}")
    return obj[key]


def _as_dict(value, path: str) -> dict:
    if not isinstance(value, dict):
        raise ScenarioFormatError(f"{path}: expected an object")
    return value


def load_scenario(spec: str) -> dict:
    """Load and validate a scenario by bundled name or file path."""
    path = Path(spec)
    if path.suffix == ".json" or path.exists():
        try:
            text = path.read_text()
        except OSError as exc:
            raise ScenarioFormatError(f"{path}: cannot read scenario: {exc}") from exc
        origin = str(path)
    else:
        res = resources.files("sqzkit").joinpath("scenarios", f"{spec}.json")
        if not res.is_file():
            raise ScenarioFormatError(
                f"unknown scenario {spec!r}: not a file, and bundled scenarios are "
                f"{bundled_scenario_names()}"
            )
        text = res.read_text()
        origin = f"bundled:{spec}"
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioFormatError(
            f"{origin}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from exc
    validate_scenario(doc, origin)
    return doc


def validate_scenario(doc, origin: str = "scenario") -> None:
    doc = _as_dict(doc, origin)
    _check_keys(doc, _TOP_KEYS, origin)
    _need(doc, "name", origin)

    source = _as_dict(_need(doc, "source", origin), f"{origin}/source")
    _check_keys(source, _SOURCE_KEYS, f"{origin}/source")
    if ("r" in source) == ("pump" in source):
        raise ScenarioFormatError(f"{origin}/source: give exactly one of 'r' or 'pump'")
    if "pump" in source:
        pump = _as_dict(source["pump"], f"{origin}/source/pump")
        _check_keys(pump, _PUMP_KEYS, f"{origin}/source/pump")
        for key in _PUMP_KEYS:
            _need(pump, key, f"{origin}/source/pump")

    bdoc = _as_dict(_need(doc, "budget", origin), f"{origin}/budget")
    _check_keys(bdoc, _BUDGET_KEYS, f"{origin}/budget")
    items = bdoc.get("items", [])
    if not isinstance(items, list):
        raise ScenarioFormatError(f"{origin}/budget/items: expected a list")
    for k, item in enumerate(items):
        ipath = f"{origin}/budget/items/{k}"
        item = _as_dict(item, ipath)
        _check_keys(item, _ITEM_KEYS, ipath)
        _need(item, "label", ipath)
        _need(item, "loss_db", ipath)
        if item.get("arm", "both") not in ARMS:
            raise ScenarioFormatError(f"{ipath}/arm: must be one of {ARMS}")
    stated = bdoc.get("stated_total_db", {})
    if stated:
        _check_keys(_as_dict(stated, f"{origin}/budget/stated_total_db"), set(_ARM_NAMES),
                    f"{origin}/budget/stated_total_db")

    if "synthesis" in doc:
        sdoc = _as_dict(doc["synthesis"], f"{origin}/synthesis")
        _check_keys(sdoc, _SYNTH_KEYS, f"{origin}/synthesis")
    if "analysis" in doc:
        adoc = _as_dict(doc["analysis"], f"{origin}/analysis")
        _check_keys(adoc, _ANALYSIS_KEYS, f"{origin}/analysis")


def scenario_budget(doc: dict) -> ChannelBudget:
    bdoc = doc["budget"]
    items = tuple(
        LossItem(str(i["label"]), float(i["loss_db"]), str(i.get("arm", "both")))
        for i in bdoc.get("items", [])
    )
    return ChannelBudget(
        items=items,
        electronics_noise_db=bdoc.get("electronics_noise_db"),
        stated_total_db={k: float(v) for k, v in bdoc.get("stated_total_db", {}).items()},
    )


def scenario_r(doc: dict) -> float:
    source = doc["source"]
    if "r" in source:
        return float(source["r"])
    pump = source["pump"]
    params = fitting.SqueezeParams(
        gain_per_watt_cm2=float(pump["a"]),
        length_cm=float(pump["L"]),
        waveguide_efficiency=float(pump["eta_w"]),
        pump_coupling=float(pump["eta_p"]),
        pump_power_watts=float(pump["p_w"]),
    )
    return fitting.r_from_power(params)


def scenario_synth_config(
    doc: dict, seed: int | None = None, duration: float | None = None
) -> synth.SynthConfig:
    """Synthesis config for a scenario: optical transmittances from the budget,
    electronics noise from the synthesis section (falling back to the budget's
    ratio), optional seed/duration overrides."""
    budget = scenario_budget(doc)
    spec = dict(doc.get("synthesis", {}))
    if "electronics_noise_db" not in spec:
        spec["electronics_noise_db"] = budget.electronics_noise_db
    spec["r"] = scenario_r(doc)
    spec["t_b"] = budget.optical_transmittance(ARM_FIRST)
    spec["t_c"] = budget.optical_transmittance(ARM_SECOND)
    if seed is not None:
        spec["rng_seed"] = seed
    if duration is not None:
        spec["duration"] = duration
    return synth.config_from_dict(spec)


def scenario_analysis_defaults(doc: dict | None) -> dict:
    adoc = (doc or {}).get("analysis", {}) or {}
    return {
        "window": adoc.get("window"),
        "max_delay": adoc.get("max_delay", _DEFAULT_MAX_DELAY),
        "discard_fraction": adoc.get("discard_fraction", pipeline.DISCARD_FRACTION),
    }


# ------------------------------------------------------------------ output


def _json_safe(value):
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    if isinstance(value, (np.floating, np.integer)):
        value = value.item()
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
    return value


def _flatten(report: dict, prefix: str = "") -> list[tuple[str, object]]:
    rows = []
    for key, value in report.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            rows.extend(_flatten(value, f"{name}."))
        else:
            rows.append((name, value))
    return rows


def _render(report: dict, fmt: str) -> str:
    report = _json_safe(report)
    if fmt == "json":
        return json.dumps(report, indent=2) + "\n"
    rows = _flatten(report)
    if fmt == "csv":
        def cell(v):
            if isinstance(v, list):
                return ";".join(str(x) for x in v)
            return str(v)

        header = ",".join(k for k, _ in rows)
        return header + "\n" + ",".join(cell(v) for _, v in rows) + "\n"
    width = max((len(k) for k, _ in rows), default=0)
    lines = []
    for key, value in rows:
        if isinstance(value, float):
            value = f"{value:.6g}"
        lines.append(f"{key:<{width}}  {value}")
    return "\n".join(lines) + "\n"


def _emit(report: dict, args) -> None:
    text = _render(report, args.format)
    if args.out:
        traceio.atomic_write_text(args.out, text)
    else:
        sys.stdout.write(text)


# ------------------------------------------------------------- subcommands


def _cmd_expect(args) -> dict:
    doc = load_scenario(args.scenario)
    budget = scenario_budget(doc)
    r = scenario_r(doc)
    pred = predict(budget, r, name=doc.get("name", ""))
    report = {
        "scenario": pred.name,
        "r": r,
        "arm_loss_db": {
            ARM_FIRST: -10.0 * math.log10(pred.t_b),
            ARM_SECOND: -10.0 * math.log10(pred.t_c),
        },
        "transmittance": {ARM_FIRST: pred.t_b, ARM_SECOND: pred.t_c},
        "squeezing_db": pred.squeezing_db,
        "antisqueezing_db": pred.antisqueezing_db,
    }
    if budget.electronics_noise_db is not None:
        report["electronics_noise_db"] = budget.electronics_noise_db
    return report


def _trace_writer(fmt: str):
    if fmt == "csv":
        return traceio.write_trace_csv, ".csv"
    return traceio.write_trace_binary, ".f32"


def _cmd_simulate(args) -> dict:
    doc = load_scenario(args.scenario)
    config = scenario_synth_config(doc, seed=args.seed, duration=args.duration)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write, ext = _trace_writer(args.trace_format)

    sig = synth.synthesize_pair(config)
    ref = synth.synthesize_shot_noise(config)
    files = {}
    for stem, trace in (
        (f"signal_{ARM_FIRST}", sig[0]),
        (f"signal_{ARM_SECOND}", sig[1]),
        (f"shot_noise_{ARM_FIRST}", ref[0]),
        (f"shot_noise_{ARM_SECOND}", ref[1]),
    ):
        path = out_dir / (stem + ext)
        write(path, trace.samples, trace.monitor, trace.sample_rate, trace.meta)
        files[stem] = str(path)
    meta = {
        "scenario": doc.get("name", ""),
        "synthesis": synth.config_as_dict(config),
        "files": files,
        "format": args.trace_format,
    }
    traceio.atomic_write_text(out_dir / "meta.json", json.dumps(_json_safe(meta), indent=2) + "\n")
    return {
        "scenario": doc.get("name", ""),
        "out_dir": str(out_dir),
        "files": files,
        "n_samples": config.n_samples,
        "sample_rate_hz": config.sample_rate,
        "rng_seed": config.rng_seed,
    }


def _parse_window(text: str | None):
    if text is None or text == "full":
        return None
    return int(text)


def _cmd_analyze(args) -> dict:
    if len(args.trace) != 2 or len(args.shot_noise) != 2:
        raise ScenarioFormatError("analyze needs exactly two --trace and two --shot-noise files")
    defaults = scenario_analysis_defaults(load_scenario(args.scenario) if args.scenario else None)
    window = _parse_window(args.window) if args.window is not None else defaults["window"]
    max_delay = args.max_delay if args.max_delay is not None else defaults["max_delay"]
    fraction = (
        args.discard_fraction if args.discard_fraction is not None else defaults["discard_fraction"]
    )

    volts = [traceio.read_trace(p) for p in args.trace]
    refs = [traceio.read_trace(p) for p in args.shot_noise]
    rate = volts[0][2]
    sn_stats = [pipeline.shot_noise_stats(v, fraction) for v, _, _ in refs]
    quads = [
        pipeline.raw_to_quadratures(v, sn, rate, fraction)
        for (v, _, _), sn in zip(volts, sn_stats)
    ]
    sn_quads = [
        pipeline.raw_to_quadratures(v, sn, rate, fraction)
        for (v, _, _), sn in zip(refs, sn_stats)
    ]

    report = pipeline.analysis_report(
        quads[0].q,
        quads[1].q,
        sn_quads[0].q,
        sn_quads[1].q,
        window=window,
        max_delay=max_delay,
        quadrature_rate=quads[0].quadrature_rate,
    )
    report = {
        "squeezing_db": report["squeezing_db"],
        "antisqueezing_db": report["antisqueezing_db"],
        "error_db": report["error_db"],
        "optimal_delay": report["optimal_delay"],
        "fwhm_samples": report["fwhm_samples"],
        "fwhm_ns": report["fwhm_ns"],
        "window": "full" if window is None else window,
        "max_delay": max_delay,
        "n_quadrature_samples": len(quads[0].q),
        "quadrature_rate_hz": quads[0].quadrature_rate,
    }

    if args.series_out:
        _write_series(args.series_out, quads, sn_quads, window, max_delay, report["optimal_delay"])
        report["series_file"] = args.series_out
    return report


def _write_series(path, quads, sn_quads, window, max_delay, delay) -> None:
    """Rolling-variance traces of both combinations and their references."""
    q1, q2 = pipeline.align(quads[0].q, quads[1].q, delay, max_delay)
    lo, hi = max_delay, len(sn_quads[0].q) - max_delay
    s1, s2 = sn_quads[0].q[lo:hi], sn_quads[1].q[lo:hi]
    w = window or max(2, min(pipeline.DEFAULT_WINDOW, q1.size // 4))
    v_plus = pipeline.rolling_variance(q1 + q2, w).values
    v_minus = pipeline.rolling_variance(q1 - q2, w).values
    sn_plus = pipeline.rolling_variance(s1 + s2, w).values
    sn_minus = pipeline.rolling_variance(s1 - s2, w).values
    time_ms = np.arange(v_plus.size) / quads[0].quadrature_rate * 1e3
    traceio.write_analysis_csv(path, time_ms, v_plus, v_minus, sn_plus, sn_minus)


def _cmd_fit(args) -> dict:
    points = traceio.read_sweep_csv(args.sweep)
    params = fitting.SqueezeParams(
        gain_per_watt_cm2=args.gain,
        length_cm=args.length,
        waveguide_efficiency=args.eta_w,
        pump_coupling=None,
        pump_power_watts=max(pt.pump_power_watts for pt in points),
    )
    result = fitting.fit_eta_p(points, args.t_b, args.t_c, params)
    return {
        "eta_p": result.parameter,
        "r_squared": result.r_squared,
        "r_at_max_power": fitting.r_from_power(params, pump_coupling=result.parameter),
        "n_points": len(points),
        "max_pump_power_watts": params.pump_power_watts,
    }


def _cmd_sideband(args) -> dict:
    from . import sideband as sb

    if (args.theta is None) == (args.optimize is None):
        raise ScenarioFormatError("give exactly one of --theta or --optimize")
    report = {}
    if args.optimize is not None:
        theta = sb.optimal_theta(args.optimize)
        report["optimized_order"] = args.optimize
    else:
        theta = args.theta
    drive = sb.SidebandDrive(theta, args.v_pi, args.drive_freq, args.load)
    powers = sb.sideband_powers(theta, args.n_max)
    report.update(
        {
            "theta": theta,
            "v_pi_volts": args.v_pi,
            "v_peak_volts": theta * args.v_pi / math.pi,
            "rf_power_dbm": sb.rf_power_required(drive),
            "sideband_power_fractions": powers,
        }
    )
    return report


def _cmd_rf_metrics(args) -> dict:
    from . import sideband as sb

    peaks = traceio.read_peaks_csv(args.peaks)
    return {
        "thd_dbc": sb.thd(peaks),
        "sfdr_dbc": sb.sfdr(peaks),
        "n_peaks": len(peaks),
    }


# --------------------------------------------------------------- arg wiring


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("json", "table", "csv"), default="json",
                   help="report format (default json)")
    p.add_argument("--out", metavar="FILE", help="write the report to FILE instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sqzkit",
        description="Distributed two-mode squeezing: prediction, synthesis, analysis.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("expect", help="predict squeezing from a scenario's loss budget")
    p.add_argument("--scenario", required=True,
                   help=f"bundled name {bundled_scenario_names()} or a JSON file path")
    _add_common(p)
    p.set_defaults(func=_cmd_expect)

    p = sub.add_parser("simulate", help="synthesize dual-detector traces for a scenario")
    p.add_argument("--scenario", required=True)
    p.add_argument("--out-dir", required=True, help="directory for trace files and meta.json")
    p.add_argument("--seed", type=int, default=None, help="override the scenario rng_seed")
    p.add_argument("--duration", type=float, default=None, help="override duration in seconds")
    p.add_argument("--trace-format", choices=("f32", "csv"), default="f32")
    _add_common(p)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("analyze", help="post-process two traces against shot-noise references")
    p.add_argument("--trace", action="append", default=[], metavar="FILE",
                   help="signal trace (give twice: first then second detector)")
    p.add_argument("--shot-noise", action="append", default=[], metavar="FILE",
                   help="shot-noise trace (give twice, matching --trace order)")
    p.add_argument("--window", default=None,
                   help="rolling window in quadrature samples, or 'full' (default: scenario or full)")
    p.add_argument("--max-delay", type=int, default=None,
                   help="delay search range in quadrature samples")
    p.add_argument("--discard-fraction", type=float, default=None,
                   help="central fraction of raw samples dropped around the trigger")
    p.add_argument("--scenario", default=None, help="scenario supplying analysis defaults")
    p.add_argument("--series-out", metavar="FILE",
                   help="also write the rolling-variance series as CSV")
    _add_common(p)
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("fit", help="fit pump coupling from a power-sweep CSV")
    p.add_argument("--sweep", required=True, metavar="FILE",
                   help="CSV with columns p_w_watts,level_db,branch")
    p.add_argument("--t-b", type=float, default=_DEFAULT_FIT["t_b"])
    p.add_argument("--t-c", type=float, default=_DEFAULT_FIT["t_c"])
    p.add_argument("--gain", type=float, default=_DEFAULT_FIT["a"],
                   help="normalized gain in 1/(W cm^2)")
    p.add_argument("--length", type=float, default=_DEFAULT_FIT["L"], help="waveguide length, cm")
    p.add_argument("--eta-w", type=float, default=_DEFAULT_FIT["eta_w"],
                   help="tap-to-waveguide power calibration ratio")
    _add_common(p)
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("sideband", help="modulation depth and RF drive power")
    p.add_argument("--theta", type=float, default=None, help="modulation depth in radians")
    p.add_argument("--optimize", type=int, default=None, metavar="ORDER",
                   help="instead of --theta, maximize this sideband order")
    p.add_argument("--v-pi", type=float, default=5.65, help="half-wave voltage (volts)")
    p.add_argument("--load", type=float, default=50.0, help="drive load in ohms")
    p.add_argument("--drive-freq", type=float, default=25e9, help="drive frequency in Hz")
    p.add_argument("--n-max", type=int, default=6, help="report sidebands up to this order")
    _add_common(p)
    p.set_defaults(func=_cmd_sideband)

    p = sub.add_parser("rf-metrics", help="THD and SFDR from a peak-list CSV")
    p.add_argument("--peaks", required=True, metavar="FILE",
                   help="CSV with columns freq_hz,power_dbm,kind")
    _add_common(p)
    p.set_defaults(func=_cmd_rf_metrics)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        report = args.func(args)
    except SqzkitError as exc:
        diag = {"error": {"type": type(exc).__name__, "message": str(exc)}}
        sys.stderr.write(json.dumps(diag, indent=2) + "\n")
        return 1
    _emit(report, args)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
