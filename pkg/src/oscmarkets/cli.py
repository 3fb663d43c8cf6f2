"""Command-line front end: ingest, estimate, synth, predict, backtest.

Every run resolves its parameters from three layers (command-line flags
override an optional key=value config file named by OSC_MARKETS_CONFIG,
which overrides defaults) and echoes the fully-resolved set at the top of
its output: a `# config:` comment line for text and csv formats, a
"config" member for structured (JSON) output. Runs contain no timestamps,
so identical invocations over identical files are byte-identical.

Exit codes: 0 success, 1 usage or configuration error, 2 data/validation
error, 3 numeric/domain failure.

The estimate command accepts either raw prices (`date,close` header) or
ready-made displacements (`week_end,x_a,x_b,ratio` header) and detects
which by the header; `synth ... | oscmarkets estimate --stdin` therefore
composes, since comment lines are skipped by the parsers.
"""

from __future__ import annotations

import argparse
import datetime as dt
import io
import json
import math
import os
import sys
from pathlib import Path
from typing import Optional

from . import backtest as bt
from . import estimate as est
from .errors import DataError, DomainError, OscMarketsError
from .ingest import (
    parse_displacements,
    parse_prices,
    to_displacements,
    window,
    write_displacements,
    write_prices,
)
from .model import OscillatorParams, extreme_displacement
from .synth import SynthSpec, sample_displacements

__all__ = ["main", "run"]

CONFIG_ENV = "OSC_MARKETS_CONFIG"
_CONFIG_KEYS = ("t", "train_count", "grid", "seed", "crash_week",
                "prior_close", "m_hat")


class UsageError(OscMarketsError):
    """Bad flags, bad flag values, or a bad config file."""


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on errors; route through our taxonomy
    def error(self, message):
        raise UsageError(message)


def _positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (math.isfinite(value) and value > 0.0):
        raise argparse.ArgumentTypeError(f"must be finite and > 0: {text}")
    return value


def _seed_value(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return value


def _window_value(text: str) -> tuple[int, int]:
    parts = text.split(":")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(
            f"window must be START:COUNT, got {text!r}")
    try:
        start, count = int(parts[0]), int(parts[1])
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"window must be START:COUNT integers, got {text!r}") from None
    if start < 0 or count < 1:
        raise argparse.ArgumentTypeError(
            f"window needs START >= 0 and COUNT >= 1, got {text!r}")
    return start, count


def _grid_value(text: str) -> est.GridSpec:
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(
            f"grid must be LO:HI:N, got {text!r}")
    try:
        spec = est.GridSpec(lo=float(parts[0]), hi=float(parts[1]),
                            n=int(parts[2]))
    except (ValueError, DataError) as exc:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}: {exc}") from None
    return spec


def _date_value(text: str) -> dt.date:
    try:
        return dt.date.fromisoformat(text)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"dates are YYYY-MM-DD, got {text!r}") from None


def _coerce(kind, text: str, key: str):
    """Config-file variant of the argparse type functions."""
    try:
        return kind(text)
    except argparse.ArgumentTypeError as exc:
        raise UsageError(f"config key {key}: {exc}") from None


def _load_config_file() -> dict:
    path = os.environ.get(CONFIG_ENV)
    if not path:
        return {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from None
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        if key not in _CONFIG_KEYS:
            raise UsageError(f"{path}:{lineno}: unknown config key {key!r}")
        values[key] = value
    return values


def _layer(cli_value, file_cfg: dict, key: str, kind, default):
    """Flag > config file > default."""
    if cli_value is not None:
        return cli_value
    if key in file_cfg:
        return _coerce(kind, file_cfg[key], key)
    return default


def _read_input(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read input {path}: {exc}") from None


def _asset_label(path: str) -> str:
    return "stdin" if path == "-" else Path(path).stem


def _echo_line(pairs) -> str:
    return "# config: " + " ".join(f"{k}={v}" for k, v in pairs)


def _grid_label(spec: Optional[est.GridSpec]) -> str:
    if spec is None:
        return f"auto:{est.DEFAULT_GRID_POINTS}"
    if spec.lo is None:
        return f"auto:{spec.n}"
    return f"{spec.lo!r}:{spec.hi!r}:{spec.n}"


def _emit(ns, text: str) -> None:
    if ns.output == "-":
        sys.stdout.write(text)
    else:
        try:
            Path(ns.output).write_text(text, encoding="utf-8")
        except OSError as exc:
            raise DataError(
                f"cannot write output {ns.output}: {exc}") from None


def _structured(config_pairs, payload_key, payload) -> str:
    return json.dumps({"config": dict(config_pairs), payload_key: payload},
                      indent=2) + "\n"


def _point_records(series):
    return [{"date": p.week_end.isoformat(), "close": p.close}
            for p in series.points]


def _entry_records(series):
    return [{"week_end": e.week_end.isoformat(), "x_a": e.x_a, "x_b": e.x_b,
             "ratio": e.ratio} for e in series.entries]


def _cmd_ingest(ns, file_cfg) -> str:
    fmt = "daily_csv" if ns.resample == "daily-to-weekly" else "weekly_csv"
    asset = ns.asset or _asset_label(ns.input)
    series = parse_prices(_read_input(ns.input), fmt=fmt, asset_id=asset)
    pairs = [("command", "ingest"), ("input", ns.input),
             ("output", ns.output), ("format", ns.format),
             ("resample", ns.resample), ("emit", ns.emit), ("asset", asset)]
    if ns.format == "structured":
        if ns.emit == "prices":
            payload = {"asset_id": series.asset_id, "unit": series.unit,
                       "points": _point_records(series)}
        else:
            d = to_displacements(series)
            payload = {"asset_id": d.asset_id,
                       "entries": _entry_records(d)}
        return _structured(pairs, "series", payload)
    if ns.format == "csv":
        buf = io.StringIO()
        if ns.emit == "prices":
            write_prices(series, buf)
        else:
            write_displacements(to_displacements(series), buf)
        return _echo_line(pairs) + "\n" + buf.getvalue()
    d = to_displacements(series)
    lines = [
        _echo_line(pairs),
        f"asset: {series.asset_id}",
        f"unit: {series.unit}",
        f"points: {len(series.points)}",
        f"first_week: {series.points[0].week_end.isoformat()}",
        f"last_week: {series.points[-1].week_end.isoformat()}",
        f"displacements: {len(d)}",
    ]
    return "\n".join(lines) + "\n"


def _detect_displacement_input(text: str) -> bool:
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        cells = {c.strip().lower() for c in line.split(",")}
        if {"week_end", "x_a", "x_b", "ratio"} <= cells:
            return True
        if {"date", "close"} <= cells:
            return False
        raise DataError(
            "unrecognized input header: expected date,close or "
            "week_end,x_a,x_b,ratio")
    raise DataError("no rows: input is empty")


def _cmd_estimate(ns, file_cfg) -> str:
    if ns.stdin and ns.input is not None:
        raise UsageError("give either --input or --stdin, not both")
    source = "-" if ns.stdin else ns.input
    if source is None:
        raise UsageError("estimate needs --input PATH or --stdin")
    t = _layer(ns.t, file_cfg, "t", _positive_float, 1.0)
    grid = _layer(ns.grid, file_cfg, "grid", _grid_value, None)
    text = _read_input(source)
    asset = _asset_label(source)
    if _detect_displacement_input(text):
        series = parse_displacements(text, asset_id=asset)
    else:
        fmt = "daily_csv" if ns.resample == "daily-to-weekly" else "weekly_csv"
        series = to_displacements(parse_prices(text, fmt=fmt, asset_id=asset))
    if ns.window is not None:
        series = window(series, ns.window[0], ns.window[1])
    result = est.fit_m_hat(series, t=t, grid_spec=grid, method=ns.r2_method)
    window_label = (f"{ns.window[0]}:{ns.window[1]}" if ns.window is not None
                    else "all")
    pairs = [("command", "estimate"), ("input", source),
             ("output", ns.output), ("format", ns.format),
             ("t", repr(t)), ("window", window_label),
             ("grid", _grid_label(grid)), ("r2_method", ns.r2_method),
             ("resample", ns.resample), ("emit", ns.emit), ("asset", asset)]
    if ns.format == "structured":
        return _structured(pairs, "result", est.as_record(result))
    if ns.format == "csv":
        buf = io.StringIO()
        if ns.emit == "grid":
            est.write_grid_csv(result, buf)
        else:
            est.write_table_csv(result, buf)
        head = _echo_line(pairs) + "\n" + (
            f"# result: m_hat={result.m_hat!r} r2={result.r2!r} "
            f"sample_size={result.sample_size}\n")
        return head + buf.getvalue()
    return _echo_line(pairs) + "\n" + est.format_report(result)


def _cmd_synth(ns, file_cfg) -> str:
    t = _layer(ns.t, file_cfg, "t", _positive_float, 1.0)
    seed = _layer(ns.seed, file_cfg, "seed", _seed_value, 0)
    spec = SynthSpec(m=ns.m, t=t, n=ns.n, seed=seed)
    series = sample_displacements(spec)
    pairs = [("command", "synth"), ("output", ns.output),
             ("format", ns.format), ("m", repr(ns.m)), ("t", repr(t)),
             ("n", str(ns.n)), ("seed", str(seed))]
    if ns.format == "structured":
        payload = {"asset_id": series.asset_id,
                   "entries": _entry_records(series)}
        return _structured(pairs, "series", payload)
    # text and csv agree here: the displacement table IS the artifact,
    # which keeps `synth | estimate --stdin` composable either way
    buf = io.StringIO()
    write_displacements(series, buf)
    return _echo_line(pairs) + "\n" + buf.getvalue()


def _cmd_predict(ns, file_cfg) -> str:
    m_hat = _layer(ns.m_hat, file_cfg, "m_hat", _positive_float, None)
    prior = _layer(ns.prior_close, file_cfg, "prior_close",
                   _positive_float, None)
    t = _layer(ns.t, file_cfg, "t", _positive_float, 1.0)
    if m_hat is None:
        raise UsageError("predict needs --m-hat (flag or config file)")
    if prior is None:
        raise UsageError("predict needs --prior-close (flag or config file)")
    ratio = extreme_displacement(OscillatorParams(m=m_hat, t=t))
    points = bt.predict_extreme_points(m_hat, t, prior)
    pairs = [("command", "predict"), ("output", ns.output),
             ("format", ns.format), ("m_hat", repr(m_hat)), ("t", repr(t)),
             ("prior_close", repr(prior))]
    if ns.format == "structured":
        payload = {"m_hat": m_hat, "t": t, "prior_close": prior,
                   "predicted_extreme_ratio": ratio,
                   "predicted_extreme_points": points}
        return _structured(pairs, "result", payload)
    if ns.format == "csv":
        return (_echo_line(pairs) + "\n"
                + "m_hat,t,prior_close,predicted_extreme_ratio,"
                  "predicted_extreme_points\n"
                + f"{m_hat!r},{t!r},{prior!r},{ratio!r},{points!r}\n")
    lines = [
        _echo_line(pairs),
        f"m_hat: {m_hat:.4f}",
        f"t: {t:g}",
        f"prior_close: {prior:.4f}",
        f"predicted_extreme_ratio: {ratio:.6f}",
        f"predicted_extreme_points: {points:.2f}",
    ]
    return "\n".join(lines) + "\n"


def _cmd_backtest(ns, file_cfg) -> str:
    if ns.input is None:
        raise UsageError("backtest needs --input PATH")
    t = _layer(ns.t, file_cfg, "t", _positive_float, 1.0)
    grid = _layer(ns.grid, file_cfg, "grid", _grid_value, None)
    crash = _layer(ns.crash_week, file_cfg, "crash_week", _date_value, None)
    if crash is None:
        raise UsageError("backtest needs --crash-week (flag or config file)")
    if ns.window is not None:
        start, count = ns.window
    else:
        start = 0
        count = _layer(None, file_cfg, "train_count",
                       lambda s: int(s), 100)
        if count < 1:
            raise UsageError(f"config key train_count must be >= 1, "
                             f"got {count}")
    fmt = "daily_csv" if ns.resample == "daily-to-weekly" else "weekly_csv"
    asset = ns.asset or _asset_label(ns.input)
    series = parse_prices(_read_input(ns.input), fmt=fmt, asset_id=asset)
    config = bt.BacktestConfig(crash_week_end=crash, train_start_index=start,
                               train_count=count, t=t)
    report = bt.run_backtest(series, config, grid_spec=grid)
    pairs = [("command", "backtest"), ("input", ns.input),
             ("output", ns.output), ("format", ns.format),
             ("t", repr(t)), ("window", f"{start}:{count}"),
             ("grid", _grid_label(grid)),
             ("crash_week", crash.isoformat()),
             ("resample", ns.resample), ("asset", asset)]
    if ns.format == "structured":
        return _structured(pairs, "result", bt.as_record(report))
    if ns.format == "csv":
        rec = bt.as_record(report)
        keys = list(rec)
        vals = []
        for k in keys:
            v = rec[k]
            if isinstance(v, bool):
                vals.append("true" if v else "false")
            elif isinstance(v, float):
                vals.append(repr(v))
            else:
                vals.append(str(v))
        return (_echo_line(pairs) + "\n" + ",".join(keys) + "\n"
                + ",".join(vals) + "\n")
    return _echo_line(pairs) + "\n" + bt.format_backtest(report)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="oscmarkets",
        description="Oscillator model of weekly price displacements: "
                    "estimate inertial coefficients, bound extreme moves.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_input=True):
        if needs_input:
            p.add_argument("--input", help="input CSV path, or - for stdin")
        p.add_argument("--output", default="-",
                       help="output path (default: stdout)")
        p.add_argument("--format", choices=("text", "csv", "structured"),
                       default="text")

    p = sub.add_parser("ingest", parents=[], help="parse and resample prices")
    common(p)
    p.add_argument("--resample", choices=("none", "daily-to-weekly"),
                   default="none")
    p.add_argument("--emit", choices=("prices", "displacements"),
                   default="displacements",
                   help="csv/structured payload (default: displacements)")
    p.add_argument("--asset", help="asset label (default: input file stem)")
    p.set_defaults(handler=_cmd_ingest)

    p = sub.add_parser("estimate", help="fit the inertial coefficient")
    common(p)
    p.add_argument("--stdin", action="store_true",
                   help="read displacements or prices from stdin")
    p.add_argument("--t", type=_positive_float, default=None)
    p.add_argument("--window", type=_window_value, metavar="START:COUNT")
    p.add_argument("--grid", type=_grid_value, metavar="LO:HI:N")
    p.add_argument("--r2-method", choices=("pearson", "identity"),
                   default="pearson")
    p.add_argument("--resample", choices=("none", "daily-to-weekly"),
                   default="none")
    p.add_argument("--emit", choices=("table", "grid"), default="table",
                   help="csv payload (default: threshold table)")
    p.set_defaults(handler=_cmd_estimate)

    p = sub.add_parser("synth", help="draw synthetic displacements")
    common(p, needs_input=False)
    p.add_argument("--m", type=_positive_float, required=True)
    p.add_argument("--t", type=_positive_float, default=None)
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--seed", type=_seed_value, default=None)
    p.set_defaults(handler=_cmd_synth)

    p = sub.add_parser("predict", help="extreme move in price points")
    common(p, needs_input=False)
    p.add_argument("--m-hat", type=_positive_float, default=None)
    p.add_argument("--prior-close", type=_positive_float, default=None)
    p.add_argument("--t", type=_positive_float, default=None)
    p.set_defaults(handler=_cmd_predict)

    p = sub.add_parser("backtest", help="crash-week bound check")
    common(p)
    p.add_argument("--crash-week", type=_date_value, metavar="YYYY-MM-DD",
                   default=None)
    p.add_argument("--window", type=_window_value, metavar="START:COUNT",
                   help="training window (default 0:100)")
    p.add_argument("--t", type=_positive_float, default=None)
    p.add_argument("--grid", type=_grid_value, metavar="LO:HI:N")
    p.add_argument("--resample", choices=("none", "daily-to-weekly"),
                   default="none")
    p.add_argument("--asset", help="asset label (default: input file stem)")
    p.set_defaults(handler=_cmd_backtest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    try:
        file_cfg = _load_config_file()
        output = ns.handler(ns, file_cfg)
        _emit(ns, output)
        return 0
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except (DomainError, FloatingPointError, OverflowError,
            ZeroDivisionError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 3


def run() -> None:
    sys.exit(main())
