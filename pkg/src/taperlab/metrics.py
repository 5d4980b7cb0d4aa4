"""Pattern fidelity metrics, method comparison and plot-data export."""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .config import RunConfig
from .errors import ParameterError, TaperlabError
from .gating import GateSpec, gated_pattern
from .sweep import Pattern
from .tuner import tune

log = logging.getLogger(__name__)

ER_FLOOR_DB = -100.0

# report columns; "uncorrected" is reported alongside
METHODS = ("rect", "hann", "composite", "multitaper")
METHOD_LABELS = {
    "uncorrected": "uncorrected",
    "rect": "rectangular",
    "hann": "Hann",
    "composite": "composite",
    "multitaper": "multitaper",
}


def _normalized(values, normalization):
    v = np.asarray(values, dtype=float)
    if normalization == "peak":
        scale = np.max(v)
    elif normalization == "energy":
        scale = np.sqrt(np.mean(v ** 2))
    else:
        raise ParameterError(f"unknown normalization {normalization!r}")
    if not scale > 0:
        raise ParameterError("pattern has zero peak; cannot normalise")
    return v / scale


def e_r(candidate, reference, normalization="peak"):
    """RMS difference of the normalised patterns in dB, floored at -100 dB."""
    if not candidate.same_grid(reference):
        raise ParameterError("patterns use different angle grids")
    d = _normalized(candidate.values, normalization) - _normalized(reference.values, normalization)
    rms = math.sqrt(float(np.mean(d * d)))
    if rms == 0:
        return ER_FLOOR_DB
    return max(20.0 * math.log10(rms), ER_FLOOR_DB)


def delta(e_r_corrected, e_r_uncorrected):
    return abs(e_r_corrected - e_r_uncorrected)


@dataclass
class FidelityReport:
    """Per-frequency and frequency-averaged e_R (dB) for every method.

    A method that failed at some frequency is stored as ``None`` there and
    averaged over the frequencies where it succeeded.
    """

    f0_hz: tuple
    per_f0: dict = field(default_factory=dict)
    failures: dict = field(default_factory=dict)

    @property
    def averaged(self):
        out = {}
        for m in ("uncorrected",) + METHODS:
            vals = [row[m] for row in self.per_f0.values() if row.get(m) is not None]
            out[m] = float(np.mean(vals)) if vals else None
        return out

    @property
    def e_r_uncorrected(self):
        return self.averaged["uncorrected"]

    @property
    def e_r_corrected(self):
        return self.averaged["multitaper"]

    @property
    def delta(self):
        a = self.averaged
        if a["multitaper"] is None or a["uncorrected"] is None:
            return None
        return delta(a["multitaper"], a["uncorrected"])

    def to_dict(self):
        return {
            "f0_hz": list(self.f0_hz),
            "methods": list(METHODS),
            "per_f0": [{"f0_hz": f, **row} for f, row in self.per_f0.items()],
            "averaged": self.averaged,
            "e_r_uncorrected": self.e_r_uncorrected,
            "e_r_corrected": self.e_r_corrected,
            "delta": self.delta,
            "failures": {f"{k[0]:g}:{k[1]}": v for k, v in self.failures.items()},
        }

    def table(self):
        """Plain-text table with one column per method."""
        cols = ("uncorrected",) + METHODS
        head = ["f0 [GHz]"] + [METHOD_LABELS[c] for c in cols]
        rows = []
        for f, row in self.per_f0.items():
            rows.append([f"{f / 1e9:g}"] + [_fmt(row.get(c)) for c in cols])
        avg = self.averaged
        rows.append(["average"] + [_fmt(avg[c]) for c in cols])
        widths = [max(len(r[i]) for r in [head] + rows) for i in range(len(head))]
        return "\n".join("  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in [head] + rows)


def _fmt(x):
    return "-" if x is None else f"{x:.1f}"


def _pick(obj, f0):
    if isinstance(obj, Mapping):
        for k, v in obj.items():
            if math.isclose(float(k), f0, rel_tol=1e-9):
                return v
        raise ParameterError(f"no entry for f0={f0:g} Hz")
    return obj


def _gate_specs(cfg):
    g = cfg.gating
    specs = {}
    if g.distance_m is not None:
        specs["rect"] = GateSpec("rect", width=g.rect_width_s, distance=g.distance_m)
    specs["hann"] = GateSpec("hann", width=g.hann_width_s, center=g.hann_center_s)
    specs["composite"] = GateSpec("composite", rel_start=g.rel_start, rel_stop=g.rel_stop,
                                  taper_fraction=g.taper_fraction)
    return specs


def compare(sweep, reference, f0_list=None, config=None, executor=None):
    """Score the uncorrected data, the three gates and the tuned multitaper.

    ``sweep`` and ``reference`` are either single objects or mappings keyed
    by f0.  A single sweep not centred on a requested f0 is cut down to the
    sub-band of ``config.bandwidth_hz`` (default: its own bandwidth) around it.
    The rectangular gate needs ``config.gating.distance_m``; without it the method is
    reported as absent.
    """
    cfg = config or RunConfig()
    f0_list = tuple(f0_list if f0_list is not None else cfg.f0_hz)
    if not f0_list:
        if isinstance(sweep, Mapping):
            f0_list = tuple(sorted(float(k) for k in sweep))
        else:
            f0_list = (sweep.f0,)
    report = FidelityReport(f0_list)
    gates = _gate_specs(cfg)
    if "rect" not in gates:
        for f0 in f0_list:
            report.failures[(f0, "rect")] = "no RA-AUT distance configured"
    for f0 in f0_list:
        sw = _pick(sweep, f0).select(f0, cfg.bandwidth_hz)
        ref = _pick(reference, f0)
        row = {"uncorrected": e_r(sw.uncorrected_pattern(), ref, cfg.er_normalization)}
        for name in METHODS:
            try:
                if name == "multitaper":
                    o = cfg.objective
                    pat = tune(sw, ref, cfg.t_hb, cfg.sigma, cfg.grid, form=o.form,
                               normalize=o.normalize, domain=o.domain,
                               executor=executor).result
                elif name in gates:
                    pat = gated_pattern(sw, gates[name])
                else:
                    row[name] = None
                    continue
                row[name] = e_r(pat, ref, cfg.er_normalization)
            except TaperlabError as exc:
                log.warning("method %s failed at f0=%g Hz: %s", name, f0, exc)
                report.failures[(f0, name)] = str(exc)
                row[name] = None
        report.per_f0[f0] = row
    return report


def emit_plot_data(patterns, out):
    """Write ``label,angle_deg,mag_db_normalized`` rows, each pattern peaked at 0 dB."""
    with open(out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(("label", "angle_deg", "mag_db_normalized"))
        for label, p in patterns:
            v = _normalized(p.values, "peak")
            with np.errstate(divide="ignore"):
                db = np.maximum(20.0 * np.log10(v), ER_FLOOR_DB)
            for a, x in zip(p.angles.angles_deg, db):
                w.writerow((label, repr(float(a)), repr(float(x))))
    return out
