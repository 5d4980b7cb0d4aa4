"""Command-line entry point: ``taperlab <verb> ...``.

Verbs: simulate, correct, tune, gate, compare, dpss.  Failures exit with a
non-zero status and a one-line JSON object on stderr::

    {"error": "LoadError", "message": "sweep.csv: line 7: duplicate sample ..."}
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import logging
import os
import sys

from . import __version__
from .config import RunConfig
from .dpss import TaperSpec, dpss_basis
from .engine import correct_pattern
from .errors import TaperlabError
from .gating import METHODS, GateSpec, gated_pattern
from .metrics import compare, emit_plot_data
from .sweep import FrequencyGrid, load_pattern, load_sweep, save_pattern, save_sweep
from .synth import ChannelSpec, synthesize
from .tuner import tune


class UsageError(TaperlabError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _fail(kind, message, code):
    sys.stderr.write(json.dumps({"error": kind, "message": message}) + "\n")
    return code


def _config(args):
    cfg = RunConfig.load(args.config) if args.config else RunConfig()
    if args.seed is not None:
        cfg = cfg.replace(seed=args.seed)
    return cfg


def _path(args, cfg, attr, key):
    p = getattr(args, attr, None) or cfg.paths.get(key)
    if not p:
        raise UsageError(f"--{attr} is required (or set paths.{key} in the config)")
    return p


def _f0(args, cfg):
    if args.f0 is not None:
        return args.f0
    if len(cfg.f0_hz) == 1:
        return cfg.f0_hz[0]
    return None


def _sweep_at(args, cfg):
    sweep = load_sweep(_path(args, cfg, "sweep", "sweep"))
    f0 = _f0(args, cfg)
    return sweep if f0 is None else sweep.select(f0, cfg.bandwidth_hz)


def cmd_simulate(args, cfg):
    truth = load_pattern(_path(args, cfg, "truth", "truth"), f0=args.f0)
    freq = FrequencyGrid.centered(args.f0, args.bw, args.k)
    with open(args.spec) as fh:
        spec_d = json.load(fh)
    if args.seed is not None:
        spec_d["seed"] = args.seed
    spec = ChannelSpec.from_dict(spec_d)
    save_sweep(synthesize(truth, freq, spec), args.out)


def cmd_correct(args, cfg):
    sweep = _sweep_at(args, cfg)
    thb = args.thb if args.thb is not None else cfg.t_hb
    save_pattern(correct_pattern(sweep, args.n, args.s, thb), args.out)


def cmd_tune(args, cfg):
    sweep = _sweep_at(args, cfg)
    ref = load_pattern(_path(args, cfg, "ref", "reference"), f0=sweep.f0)
    thb = args.thb if args.thb is not None else cfg.t_hb
    sigma = args.sigma if args.sigma is not None else cfg.sigma
    o = cfg.objective
    report = tune(sweep, ref, thb, sigma, cfg.grid, form=o.form, normalize=o.normalize,
                  domain=o.domain)
    os.makedirs(args.out, exist_ok=True)
    with open(os.path.join(args.out, "report.json"), "w") as fh:
        json.dump(report.to_dict(), fh, indent=1)
    save_pattern(report.result, os.path.join(args.out, "pattern.csv"))
    with open(os.path.join(args.out, "landscape.csv"), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(("n", "s", "U"))
        w.writerows((n, s, repr(u)) for n, s, u in report.landscape())
    emit_plot_data([("reference", ref), ("uncorrected", sweep.uncorrected_pattern()),
                    ("corrected", report.result)], os.path.join(args.out, "plot.csv"))


def cmd_gate(args, cfg):
    sweep = _sweep_at(args, cfg)
    g = cfg.gating
    width = args.width
    if width is None:
        width = g.rect_width_s if args.method == "rect" else g.hann_width_s
    spec = GateSpec(
        args.method,
        width=width,
        distance=args.distance if args.distance is not None else g.distance_m,
        center=args.center if args.center is not None else g.hann_center_s,
        rel_start=args.rel_start if args.rel_start is not None else g.rel_start,
        rel_stop=args.rel_stop if args.rel_stop is not None else g.rel_stop,
        taper_fraction=(args.taper_fraction if args.taper_fraction is not None
                        else g.taper_fraction),
    )
    save_pattern(gated_pattern(sweep, spec), args.out)


def cmd_compare(args, cfg):
    sweeps = args.sweep or [cfg.paths.get("sweep")]
    refs = args.ref or [cfg.paths.get("reference")]
    if not sweeps[0] or not refs[0]:
        raise UsageError("--sweep and --ref are required (or set them in the config paths)")
    f0s = args.f0 or list(cfg.f0_hz)
    if args.distance is not None:
        cfg = cfg.replace(gating=dataclasses.replace(cfg.gating, distance_m=args.distance))
    loaded = [load_sweep(p) for p in sweeps]
    if len(loaded) == 1:
        sweep = loaded[0]
        f0s = f0s or [sweep.f0]
    else:
        f0s = f0s or [s.f0 for s in loaded]
        if len(f0s) != len(loaded):
            raise UsageError("give one --f0 per --sweep")
        sweep = dict(zip(f0s, loaded))
    if len(refs) == 1:
        reference = load_pattern(refs[0])
    else:
        if len(refs) != len(f0s):
            raise UsageError("give one --ref per --f0")
        reference = {f: load_pattern(p, f0=f) for f, p in zip(f0s, refs)}
    report = compare(sweep, reference, f0s, cfg)
    with open(args.out, "w") as fh:
        json.dump(report.to_dict(), fh, indent=1)
    if args.table:
        print(report.table())


def cmd_dpss(args, cfg):
    thb = args.thb if args.thb is not None else cfg.t_hb
    basis = dpss_basis(TaperSpec(args.n, thb))
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(out)
        w.writerow(("order", "eigenvalue", "index", "value"))
        for k, (taper, lam) in enumerate(zip(basis.tapers, basis.eigenvalues)):
            for i, x in enumerate(taper):
                w.writerow((k, repr(float(lam)), i, repr(float(x))))
    finally:
        if out is not sys.stdout:
            out.close()


def build_parser():
    p = _Parser(prog="taperlab", description=__doc__.splitlines()[0])
    p.add_argument("--config", help="run configuration JSON")
    p.add_argument("--seed", type=int, help="RNG seed (overrides config and channel spec)")
    p.add_argument("-v", "--verbose", action="store_true")
    p.add_argument("--version", action="version", version=f"taperlab {__version__}")
    sub = p.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    s = sub.add_parser("simulate", help="synthesise a non-anechoic sweep")
    s.add_argument("--truth", required=True)
    s.add_argument("--f0", type=float, required=True)
    s.add_argument("--bw", type=float, required=True)
    s.add_argument("--k", type=int, default=201)
    s.add_argument("--spec", required=True, help="channel spec JSON")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("correct", help="multitaper correction for one (n, s) design")
    s.add_argument("--sweep")
    s.add_argument("--f0", type=float)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--s", type=int, required=True)
    s.add_argument("--thb", type=float)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_correct)

    s = sub.add_parser("tune", help="exhaustive (n, s) search against a reference")
    s.add_argument("--sweep")
    s.add_argument("--ref")
    s.add_argument("--f0", type=float)
    s.add_argument("--thb", type=float)
    s.add_argument("--sigma", type=float)
    s.add_argument("--out", required=True, help="output directory")
    s.set_defaults(func=cmd_tune)

    s = sub.add_parser("gate", help="time-gating baseline")
    s.add_argument("--method", required=True, choices=METHODS)
    s.add_argument("--sweep")
    s.add_argument("--f0", type=float)
    s.add_argument("--distance", type=float, help="RA-AUT distance in m (rect)")
    s.add_argument("--width", type=float, help="gate width in s (rect, hann)")
    s.add_argument("--center", type=float, help="gate centre in s (hann; default: peak)")
    s.add_argument("--rel-start", type=float)
    s.add_argument("--rel-stop", type=float)
    s.add_argument("--taper-fraction", type=float)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_gate)

    s = sub.add_parser("compare", help="e_R of every correction method")
    s.add_argument("--sweep", action="append", help="sweep CSV (repeat per f0)")
    s.add_argument("--ref", action="append", help="reference CSV (repeat per f0)")
    s.add_argument("--f0", type=float, nargs="+")
    s.add_argument("--distance", type=float, help="RA-AUT distance in m for the rectangular gate")
    s.add_argument("--table", action="store_true", help="also print a text table")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_compare)

    s = sub.add_parser("dpss", help="dump DPSS tapers and eigenvalues as CSV")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--thb", type=float)
    s.add_argument("--out")
    s.set_defaults(func=cmd_dpss)
    return p


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        args.func(args, _config(args))
    except UsageError as exc:
        return _fail("UsageError", str(exc), 2)
    except TaperlabError as exc:
        return _fail(type(exc).__name__, str(exc), 1)
    except (OSError, ValueError, KeyError) as exc:
        return _fail(type(exc).__name__, str(exc), 1)
    return 0


if __name__ == "__main__":
    sys.exit(main())
