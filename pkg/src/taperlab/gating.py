"""Classical time-gating baselines.

Three gates operate on the centred time response produced by
:func:`taperlab.engine.to_time_domain`:

* ``rect`` -- rectangular window around the delay of a known RA-AUT distance;
* ``hann`` -- Hann window around the impulse-response peak (or a given time);
* ``composite`` -- Tukey window over the interval found by relative
  thresholds around the peak.

Gates act per angle; the Hann and composite gates locate the peak of every
angle column separately.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.constants import c as SPEED_OF_LIGHT
from scipy.signal.windows import tukey

from .engine import from_time_domain, to_time_domain
from .errors import ParameterError
from .sweep import Pattern

METHODS = ("rect", "hann", "composite")

_ALIASES = {
    "rect": "rect", "rectangular": "rect", "rectangular-at-distance": "rect",
    "hann": "hann", "hann-on-impulse": "hann",
    "composite": "composite", "threshold-composite": "composite",
}


@dataclass(frozen=True)
class GateSpec:
    """Parameters of one gating method.

    ``distance`` (m) is used by ``rect``; ``center`` (s) by ``hann``, where
    ``None`` picks the peak of each angle; ``width`` (s) by both.  The
    relative thresholds and the taper fraction configure ``composite``.
    """

    method: str
    width: Optional[float] = None
    distance: Optional[float] = None
    center: Optional[float] = None
    rel_start: float = 0.5
    rel_stop: float = 0.25
    taper_fraction: float = 0.25

    def __post_init__(self):
        m = _ALIASES.get(self.method)
        if m is None:
            raise ParameterError(f"unknown gating method {self.method!r}")
        object.__setattr__(self, "method", m)
        if m == "rect" and (self.distance is None or self.width is None):
            raise ParameterError("rectangular gating needs a distance and a width")
        if m == "hann" and self.width is None:
            raise ParameterError("Hann gating needs a width")
        if self.width is not None and not self.width > 0:
            raise ParameterError("gate width must be positive")

    def apply(self, time):
        if self.method == "rect":
            return gate_rectangular(time, self.distance, self.width)
        if self.method == "hann":
            return gate_hann(time, self.width, self.center)
        return gate_threshold_composite(time, self.rel_start, self.rel_stop,
                                        self.taper_fraction)


def _column_view(samples):
    return samples if samples.ndim == 2 else samples[:, None]


def _check_window(time, lo, hi):
    t = time.times
    if hi < t[0] or lo > t[-1]:
        raise ParameterError(
            f"gate [{lo:.4g}, {hi:.4g}] s lies outside the time axis "
            f"[{t[0]:.4g}, {t[-1]:.4g}] s")


def gate_rectangular(time, distance, width):
    """Zero every sample outside ``[tau - width/2, tau + width/2]``, ``tau = distance/c``.

    Gate edges are snapped to the nearest sample, so a ``width`` of ``N*dt``
    centred within half a sample of ``t = 0`` keeps the whole axis.
    """
    if not distance > 0:
        raise ParameterError("distance must be positive")
    if not width > 0:
        raise ParameterError("gate width must be positive")
    tau = distance / SPEED_OF_LIGHT
    lo, hi = tau - width / 2.0, tau + width / 2.0
    _check_window(time, lo, hi)
    m = time.index_vector
    keep = (m >= np.rint(lo / time.dt)) & (m <= np.rint(hi / time.dt))
    mask = keep if time.samples.ndim == 1 else keep[:, None]
    return time.replace(np.where(mask, time.samples, 0))


def peak_times(time):
    """Time of the largest-magnitude sample of each angle column."""
    cols = _column_view(time.samples)
    idx = np.argmax(np.abs(cols), axis=0)
    out = time.times[idx]
    return out if time.samples.ndim == 2 else out[0]


def hann_window(t, center, width):
    x = (np.asarray(t) - center) / width
    return np.where(np.abs(x) <= 0.5, np.cos(np.pi * x) ** 2, 0.0)


def gate_hann(time, width, center=None):
    """Multiply by a Hann window of total support ``width`` around ``center``.

    With ``center=None`` each angle is centred on its own peak sample.
    """
    if not width > 0:
        raise ParameterError("gate width must be positive")
    centers = peak_times(time) if center is None else center
    centers = np.atleast_1d(np.asarray(centers, dtype=float))
    for c0 in centers:
        _check_window(time, c0 - width / 2.0, c0 + width / 2.0)
    win = hann_window(time.times[:, None], centers[None, :], width)
    if time.samples.ndim == 1:
        win = win[:, 0]
    return time.replace(time.samples * win)


def threshold_interval(magnitude, rel_start, rel_stop):
    """Sample interval ``[lo, hi]`` around the peak of ``magnitude``.

    ``lo`` is the first sample of the run before the peak that stays above
    ``rel_start * peak``; ``hi`` the last sample after the peak before the
    magnitude drops below ``rel_stop * peak``.
    """
    p = int(np.argmax(magnitude))
    peak = magnitude[p]
    if not peak > 0:
        raise ParameterError("no sample exceeds the gating threshold")
    below = np.flatnonzero(magnitude[:p] <= rel_start * peak)
    lo = below[-1] + 1 if below.size else 0
    drop = np.flatnonzero(magnitude[p:] < rel_stop * peak)
    hi = p + drop[0] - 1 if drop.size else magnitude.size - 1
    return lo, hi


def gate_threshold_composite(time, rel_start=0.5, rel_stop=0.25, taper_fraction=0.25):
    """Tukey-window the threshold interval of each angle, zero elsewhere."""
    if not 0 < rel_stop <= rel_start < 1:
        raise ParameterError("thresholds must satisfy 0 < rel_stop <= rel_start < 1")
    if not 0 <= taper_fraction <= 0.5:
        raise ParameterError("taper_fraction must lie in [0, 0.5]")
    cols = _column_view(time.samples)
    out = np.zeros_like(cols)
    for a in range(cols.shape[1]):
        lo, hi = threshold_interval(np.abs(cols[:, a]), rel_start, rel_stop)
        out[lo:hi + 1, a] = cols[lo:hi + 1, a] * tukey(hi - lo + 1, 2.0 * taper_fraction)
    return time.replace(out if time.samples.ndim == 2 else out[:, 0])


def gated_pattern(sweep, spec):
    """Gate every angle and read the band-centre magnitude of the gated band.

    Angles whose time response is identically zero stay zero.
    """
    time = to_time_domain(sweep.data, sweep.freq)
    live = np.any(time.samples != 0, axis=0)
    values = np.zeros(sweep.angles.A)
    if np.any(live):
        gated = spec.apply(time.replace(time.samples[:, live]))
        band = from_time_domain(gated)
        values[live] = np.abs(band[sweep.freq.center_index])
    return Pattern(sweep.angles, values, sweep.f0)
