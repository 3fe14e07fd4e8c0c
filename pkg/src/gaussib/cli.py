"""Command-line interface: ``gaussib <command> [options]``.

Every JSON report carries ``schema_version``, ``units`` (bits) and the grid
size used; output files are written atomically. Exit codes: 0 success,
2 malformed configuration or model file, 3 source-model invariant
violation, 4 any other numerical failure. Errors are printed to stderr as
a JSON object ``{"error": <kind>, "message": ..., "path": [...]}``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError, GaussIBError, ModelError
from .models import SCHEMA_VERSION, load_model, load_pf_instance

COMMANDS = ("ib-rate", "filters", "simulate", "comib", "pf", "szego", "audit")
FORMATS = ("json", "csv")


@dataclass
class RunConfig:
    command: str
    model_path: str | None = None
    parameters: dict = field(default_factory=dict)
    output: str | None = None
    fmt: str = "json"

    def validate(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}", ["command"])
        if self.fmt not in FORMATS:
            raise ConfigError(f"unknown format {self.fmt!r}", ["format"])
        p = self.parameters
        if self.command in ("ib-rate", "filters", "simulate", "szego", "audit"):
            if self.model_path is None:
                raise ConfigError("--model is required", ["model"])
            if not Path(self.model_path).is_file():
                raise ConfigError(f"model file not found: {self.model_path}", ["model"])
        for key in ("c", "c1", "c2"):
            if key in p and p[key] is not None and not (p[key] >= 0 and math.isfinite(p[key])):
                raise ConfigError(f"{key} must be finite and >= 0", [key])
        for key, low in (("order", 1), ("length", 2), ("restarts", 1), ("taps", 1),
                         ("grid_points", 1), ("saddle_check", 1)):
            if p.get(key) is not None and p[key] < low:
                raise ConfigError(f"{key} must be >= {low}", [key])
        if p.get("delay") is not None and not 0 <= p["delay"] < p.get("taps", 257):
            raise ConfigError("delay must lie in [0, taps)", ["delay"])
        sweep = p.get("sweep")
        if sweep is not None:
            if any(c < 0 or not math.isfinite(c) for c in sweep):
                raise ConfigError("sweep values must be finite and >= 0", ["sweep"])
            if list(sweep) != sorted(sweep):
                raise ConfigError("sweep values must be ascending", ["sweep"])
        sizes = p.get("sizes")
        if sizes is not None:
            if not sizes or min(sizes) < 1 or list(sizes) != sorted(sizes):
                raise ConfigError("sizes must be ascending positive integers", ["sizes"])
        if self.command == "pf" and not p.get("instance"):
            raise ConfigError("--instance is required", ["instance"])
        if self.command == "pf" and not Path(p["instance"]).is_file():
            raise ConfigError(f"instance file not found: {p['instance']}", ["instance"])


def thread_cap() -> int:
    raw = os.environ.get("GAUSSIB_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _clean(obj):
    """JSON-safe copy: numpy to Python, non-finite floats to null."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


def dumps(report: dict) -> str:
    return json.dumps(_clean(report), sort_keys=True, indent=2) + "\n"


def _fmt(x) -> str:
    return format(float(x), ".17g")


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def write_atomic(path, text: str):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _report(command, **fields):
    return {"schema_version": SCHEMA_VERSION, "command": command, "units": "bits", **fields}


# commands ---------------------------------------------------------------

def _ib_rate(cfg, src):
    from .spectra import mi_rate, snr_spectrum
    from .waterfill import ib_rate

    gamma = snr_spectrum(src)
    n = src.grid.n_points
    sweep = cfg.parameters.get("sweep")
    if sweep is not None:
        rows = []
        for c in sweep:
            sol = ib_rate(gamma, c)
            rows.append({"C_bits": float(c), "theta": sol.theta, "R_bits": sol.r})
        if cfg.fmt == "csv":
            return csv_text(["C_bits", "theta", "R_bits"],
                            [(r["C_bits"], r["theta"], r["R_bits"]) for r in rows])
        return _report("sweep", grid_points=n, rows=rows)
    c = cfg.parameters["c"]
    sol = ib_rate(gamma, c)
    if cfg.fmt == "csv":
        return csv_text(["C_bits", "theta", "R_bits"], [(float(c), sol.theta, sol.r)])
    return _report(
        "ib-rate", grid_points=n, c_bits=sol.c, c_target=c, theta=sol.theta,
        rate_bits=sol.r, active_fraction=float(np.mean(sol.active_mask)),
        mi_rate_bits=mi_rate(src),
    )


def _filters(cfg, src):
    from .channel import design_forward_channel, realize_fir

    p = cfg.parameters
    ch = design_forward_channel(src, p["c"])
    if cfg.fmt == "csv":
        f = src.grid.frequencies
        rows = zip(f, ch.omega_sq.values, ch.g_sq.values, ch.h1_sq.values)
        return csv_text(["f", "omega_sq", "g_sq", "h1_sq"], rows)
    taps = p.get("taps") or 257
    delay = p.get("delay")
    delay = taps // 2 if delay is None else delay
    fir = realize_fir(ch, taps, delay)
    return _report(
        "filters", grid_points=src.grid.n_points, c_bits=p["c"], theta=ch.theta,
        taps={k: v for k, v in fir.taps.items()}, delays=dict(fir.delays),
        linf_error=dict(fir.errors), total_delay=fir.total_delay,
    )


def _audit(cfg, src):
    from .channel import audit_rates, design_forward_channel

    ch = design_forward_channel(src, cfg.parameters["c"])
    c_ach, r_ach = audit_rates(ch, src)
    wiener = np.abs(src.s_xy.values) ** 2 / (src.s_x.values * src.s_y.values)
    return _report(
        "audit", grid_points=src.grid.n_points, theta=ch.theta,
        c_target=ch.solution.c, r_target=ch.solution.r,
        c_achieved=c_ach, r_achieved=r_ach,
        wiener_max_error=float(np.max(np.abs(ch.g_sq.values - wiener))),
    )


def _simulate(cfg, src):
    from .dpcm import end_to_end_rates

    p = cfg.parameters
    length = p.get("length") or 2 ** 20
    est, trace = end_to_end_rates(src, p["c"], order=p.get("order") or 64, length=length,
                                  seed=p.get("seed", 0), keep_trace=True)
    if p.get("trace_csv"):
        cols = ("u", "u_hat", "w", "q", "v", "n_noise")
        data = np.column_stack([getattr(trace, c) for c in cols])
        write_atomic(p["trace_csv"], csv_text(cols, (map(float, row) for row in data)))
    fields = {k: getattr(est, k) for k in est.__dataclass_fields__}
    fields["theta"] = est.theta
    return _report("simulate", grid_points=src.grid.n_points, length=length,
                   seed=p.get("seed", 0), **fields)


def _comib(cfg, _src):
    from .compound import comib_rate, construct_optimal, saddle_check
    from .spectra import FrequencyGrid, Spectrum

    p = cfg.parameters
    c1, c2 = p["c1"], p["c2"]
    unit = Spectrum.constant(FrequencyGrid(p.get("grid_points") or 4096), 1.0)
    sol = construct_optimal(unit, unit, c1, c2)
    report = _report(
        "comib", c1=c1, c2=c2, rate_bits=comib_rate(c1, c2), gamma=sol.gamma,
        **{"lambda": sol.lam},
        audit={"i_xy": sol.audit[0], "i_yz": sol.audit[1], "i_xz": sol.audit[2]},
        grid_points=unit.grid.n_points,
    )
    if p.get("saddle_check"):
        rep = saddle_check(c1, c2, p["saddle_check"])
        report["saddle_check"] = {
            "family_size": p["saddle_check"], "white_value": rep.white_value,
            "min_margin": rep.min_margin, "max_margin": rep.max_margin,
            "certified": rep.certified,
        }
    return report


def _pf(cfg, _src):
    from .pf import minimize_pf

    p = cfg.parameters
    inst = load_pf_instance(p["instance"], p["c1"])
    sol = minimize_pf(inst, restarts=p.get("restarts") or 16, seed=p.get("seed", 0),
                      workers=min(thread_cap(), p.get("restarts") or 16))
    return _report(
        "pf", n=inst.n, c1=inst.c1, value_bits=sol.value, phi=sol.phi, rates=sol.rates,
        u1=sol.u1, grad_norm=sol.grad_norm, iterations=sol.iterations,
        restart_values=sol.restart_values, relaxed=True, seed=p.get("seed", 0),
    )


def _szego(cfg, src):
    from .analysis import szego_convergence

    rate, rows = szego_convergence(src, cfg.parameters.get("sizes") or [32, 64, 128, 256, 512])
    if cfg.fmt == "csv":
        return csv_text(["n", "per_symbol_mi", "gap"],
                        [(r.n, r.per_symbol_mi, r.gap) for r in rows])
    return _report("szego", grid_points=src.grid.n_points, rate_bits=rate,
                   rows=[{"n": r.n, "per_symbol_mi": r.per_symbol_mi, "gap": r.gap} for r in rows])


_HANDLERS = {
    "ib-rate": _ib_rate, "filters": _filters, "simulate": _simulate, "comib": _comib,
    "pf": _pf, "szego": _szego, "audit": _audit,
}


def execute(cfg: RunConfig) -> str:
    """Run a validated config and return the report text."""
    cfg.validate()
    src = None
    if cfg.model_path is not None and cfg.command not in ("comib", "pf"):
        src = load_model(cfg.model_path, cfg.parameters.get("grid_points"))
    out = _HANDLERS[cfg.command](cfg, src)
    return out if isinstance(out, str) else dumps(out)


def _error_json(exc) -> str:
    kind = type(exc).__name__
    return json.dumps({"error": kind, "message": str(exc), "path": list(getattr(exc, "path", []))},
                      sort_keys=True)


def run(cfg: RunConfig, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        text = execute(cfg)
    except ConfigError as exc:
        print(_error_json(exc), file=stderr)
        return 2
    except ModelError as exc:
        print(_error_json(exc), file=stderr)
        return 3
    except (GaussIBError, ValueError) as exc:
        print(_error_json(exc), file=stderr)
        return 4
    if cfg.output:
        write_atomic(cfg.output, text)
    else:
        stdout.write(text)
    return 0


def _floats(text):
    text = text.strip()
    if not text:
        return []
    return [float(t) for t in text.split(",")]


def _ints(text):
    return [int(t) for t in text.split(",") if t.strip()]


class _Parser(argparse.ArgumentParser):
    """Usage errors are configuration errors: JSON on stderr, exit 2."""

    def error(self, message):
        print(_error_json(ConfigError(message, [])), file=sys.stderr)
        raise SystemExit(2)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gaussib", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, model=True, fmt=("json",)):
        if model:
            p.add_argument("--model", required=True, help="source-model JSON file")
            p.add_argument("--grid-points", type=int, default=None,
                           help="override the model grid size")
        p.add_argument("--output", "-o", default=None, help="write here instead of stdout")
        p.add_argument("--format", choices=fmt, default=fmt[0])
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("ib-rate", help="water-filling IB rate")
    common(p, fmt=FORMATS)
    p.add_argument("--c", type=float, default=None, help="bottleneck rate in bits")
    p.add_argument("--sweep", type=_floats, default=None,
                   help="comma-separated ascending C values (rate curve)")

    p = sub.add_parser("filters", help="forward-channel responses and FIR taps")
    common(p, fmt=FORMATS)
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--taps", type=int, default=257)
    p.add_argument("--delay", type=int, default=None)

    p = sub.add_parser("audit", help="recompute (C, R) from the filter chain")
    common(p)
    p.add_argument("--c", type=float, required=True)

    p = sub.add_parser("simulate", help="predictive-loop Monte Carlo")
    common(p)
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--order", type=int, default=64)
    p.add_argument("--length", type=int, default=2 ** 20)
    p.add_argument("--trace-csv", default=None, help="dump the full loop trace (large)")

    p = sub.add_parser("comib", help="compound IB closed form")
    common(p, model=False)
    p.add_argument("--c1", type=float, required=True)
    p.add_argument("--c2", type=float, required=True)
    p.add_argument("--saddle-check", type=int, default=None, metavar="M")
    p.add_argument("--grid-points", type=int, default=None)

    p = sub.add_parser("pf", help="relaxed vector privacy funnel")
    common(p, model=False)
    p.add_argument("--instance", required=True)
    p.add_argument("--c1", type=float, required=True)
    p.add_argument("--restarts", type=int, default=16)

    p = sub.add_parser("szego", help="Toeplitz MI against the spectral rate")
    common(p, fmt=("csv", "json"))
    p.add_argument("--sizes", type=_ints, default=[32, 64, 128, 256, 512])
    return parser


_PARAM_KEYS = ("c", "c1", "c2", "sweep", "taps", "delay", "order", "length", "seed", "sizes",
               "restarts", "grid_points", "saddle_check", "instance", "trace_csv")


def config_from_args(args) -> RunConfig:
    params = {k: getattr(args, k) for k in _PARAM_KEYS if hasattr(args, k)}
    if args.command == "ib-rate" and params.get("c") is None and params.get("sweep") is None:
        raise ConfigError("ib-rate needs --c or --sweep", ["c"])
    return RunConfig(args.command, getattr(args, "model", None), params, args.output, args.format)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
    except ConfigError as exc:
        print(_error_json(exc), file=sys.stderr)
        return 2
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
