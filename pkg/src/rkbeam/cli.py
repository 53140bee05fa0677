"""Command-line front end.

Exit codes: 0 success, 1 self-test failure, 2 configuration error,
3 numerical failure (singular ``C`` without regularization).
"""
import argparse
import math
import sys
from pathlib import Path

from .beamformer import pattern_table, simple_weights
from .kernelfield import SingularMatrixError, build_c
from .selftest import run_all
from .simharness import (
    ConfigError,
    ScenarioConfig,
    _atomic_write,
    _csv_text,
    run_beamforming,
    run_extraction,
    run_reconstruction,
    scenario_array,
    wavenumber,
    write_result,
)

RUNNERS = {
    "reconstruct": run_reconstruction,
    "beamform": run_beamforming,
    "extract": run_extraction,
}


def _float_list(text):
    try:
        return [float(x) for x in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a list of numbers: {text!r}") from None


def _snr(text):
    if text.lower() in ("inf", "+inf", "infinity"):
        return math.inf
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number or 'inf': {text!r}") from None


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="flat key = value config file")
    common.add_argument("--seed", type=int)
    common.add_argument("--n-mics", type=int, metavar="N", help="number of microphones")
    common.add_argument("--freq-list", type=_float_list, metavar="F1,F2,...", help="frequencies in Hz")
    common.add_argument("--lambda", dest="lam", type=float, metavar="X", help="regularization parameter")
    common.add_argument("--snr", type=_snr, metavar="X|inf", help="sensor SNR in dB")
    common.add_argument("--out", default="results", metavar="DIR", help="output directory (default: results)")

    parser = argparse.ArgumentParser(prog="rkbeam", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("reconstruct", parents=[common], help="plane-wave reconstruction sweep (MNE)")
    sub.add_parser("beamform", parents=[common], help="simple beamformer sweep (DI and patterns)")
    sub.add_parser("extract", parents=[common], help="directional field extraction sweep")
    pat = sub.add_parser("pattern", parents=[common], help="single-frequency beam pattern dump")
    pat.add_argument("--freq", type=float, help="frequency in Hz (default: first of the sweep)")
    sub.add_parser("selftest", help="run the property suites")
    return parser


def effective_config(args):
    """Defaults, then the config file, then command-line overrides."""
    cfg = ScenarioConfig.load(args.config) if args.config else ScenarioConfig()
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.n_mics is not None:
        overrides["n_mics"] = args.n_mics
    if args.freq_list is not None:
        overrides["frequencies"] = tuple(args.freq_list)
    if args.lam is not None:
        overrides["lam"] = args.lam
    if args.snr is not None:
        overrides["snr_db"] = args.snr
    return cfg.replace(**overrides) if overrides else cfg


def _selftest():
    results = run_all()
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{r.name:18s} {status}  max_error={r.max_error:.3e}  tol={r.tolerance:.0e}  ({r.seconds:.2f} s)")
    return 0 if all(r.passed for r in results) else 1


def _summary(result):
    cols = result.columns
    for row in result.rows:
        print("  ".join(f"{c}={v:.6g}" if isinstance(v, float) else f"{c}={v}" for c, v in zip(cols, row)))


def _pattern(cfg, args):
    array = scenario_array(cfg)
    freq = args.freq if args.freq is not None else cfg.frequencies[0]
    k = wavenumber(freq, cfg.c_sound)
    w = simple_weights(build_c(array, k), array, k, cfg.look_direction, None, cfg.lam, cfg.relative_lambda)
    rows = pattern_table(w, array, k, cfg.look_direction)
    path = Path(args.out) / "pattern.csv"
    _atomic_write(path, _csv_text(["angle_deg", "re", "im", "magnitude_db"], rows))
    peak = max(rows, key=lambda r: r[3])
    print(f"freq_hz={freq:.6g}  peak_angle_deg={peak[0]:.6g}  wrote {path}")


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "selftest":
        return _selftest()
    try:
        cfg = effective_config(args)
        if args.command == "pattern":
            _pattern(cfg, args)
            return 0
        result = RUNNERS[args.command](cfg)
    except ConfigError as exc:
        print(f"rkbeam: config error: {exc}", file=sys.stderr)
        return 2
    except SingularMatrixError as exc:
        print(f"rkbeam: numerical failure: {exc}", file=sys.stderr)
        return 3
    _summary(result)
    for p in write_result(result, args.out):
        print(f"wrote {p}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
