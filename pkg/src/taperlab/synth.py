"""Synthetic non-anechoic sweeps with a known line-of-sight pattern.

Each angle receives the ground-truth line-of-sight term, a set of delayed
echoes whose strength may depend on the rotation angle, and complex white
Gaussian noise::

    R(f, a) = truth(a) g(f) exp(-2j pi f tau_los)
              + sum_e amp_e(a) g(f) exp(-2j pi f tau_e) + noise

Echo amplitudes and the noise deviation are relative to ``max(truth)``.
The noise comes from ``numpy.random.Generator(PCG64(seed))``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError
from .sweep import AngleGrid, Pattern, SweepSet

PROFILES = ("isotropic", "lobed")


@dataclass(frozen=True)
class Echo:
    """One reflected path.

    ``profile="lobed"`` scales the echo by ``(1 + cos(theta - lobe_center_deg)) / 2``.
    """

    delay: float
    amplitude: float
    profile: str = "isotropic"
    lobe_center_deg: float = 0.0

    def __post_init__(self):
        if self.profile not in PROFILES:
            raise ParameterError(f"unknown echo profile {self.profile!r}")
        if self.amplitude < 0:
            raise ParameterError("echo amplitude must be non-negative")

    def gains(self, angles_deg):
        if self.profile == "isotropic":
            return np.full(np.shape(angles_deg), self.amplitude)
        return self.amplitude * 0.5 * (1.0 + np.cos(np.deg2rad(angles_deg - self.lobe_center_deg)))


@dataclass(frozen=True)
class ChannelSpec:
    """Line-of-sight delay, echoes, noise floor and RNG seed.

    ``band_edge_db`` sets a parabolic gain taper ``g(f)`` that is 0 dB at the
    band centre and ``band_edge_db`` at both band edges (0 means flat).
    """

    los_delay: float
    echoes: tuple = field(default=())
    noise_floor: float = 0.0
    seed: int = 0
    band_edge_db: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "echoes", tuple(
            e if isinstance(e, Echo) else Echo(**e) for e in self.echoes))
        if self.noise_floor < 0:
            raise ParameterError("noise floor must be non-negative")
        for e in self.echoes:
            if not e.delay > self.los_delay:
                raise ParameterError(
                    f"echo delay {e.delay} must exceed the line-of-sight delay {self.los_delay}")

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        d["echoes"] = tuple(Echo(**e) for e in d.get("echoes", ()))
        return cls(**d)


def band_gain(freq, band_edge_db):
    x = (freq.values - freq.f0) / (freq.bandwidth / 2.0)
    return 10.0 ** (band_edge_db * x ** 2 / 20.0)


def synthesize(truth, freq, spec):
    """Build a :class:`SweepSet` from ``truth`` and the channel ``spec``."""
    if truth.f0 is not None and not np.isclose(truth.f0, freq.f0, rtol=1e-9, atol=0):
        raise ParameterError(f"truth pattern f0={truth.f0} differs from band centre {freq.f0}")
    f = freq.values[:, None]
    g = band_gain(freq, spec.band_edge_db)[:, None]
    ang = truth.angles.angles_deg
    peak = float(np.max(truth.values)) if truth.values.size else 0.0
    data = truth.values[None, :] * g * np.exp(-2j * np.pi * f * spec.los_delay)
    for e in spec.echoes:
        data = data + peak * e.gains(ang)[None, :] * g * np.exp(-2j * np.pi * f * e.delay)
    if spec.noise_floor > 0:
        rng = np.random.Generator(np.random.PCG64(spec.seed))
        sd = spec.noise_floor * peak / np.sqrt(2.0)
        data = data + sd * (rng.standard_normal(data.shape) + 1j * rng.standard_normal(data.shape))
    return SweepSet(freq, truth.angles, data)


def monopole_pattern(angles_deg, floor=0.05, f0=None):
    """Smooth figure-eight cut ``sqrt(floor + (1 - floor) sin^2(theta))``.

    A stand-in for the elevation cut of a small monopole, with shallow
    rather than infinitely deep nulls.
    """
    th = np.deg2rad(np.asarray(angles_deg, dtype=float))
    return Pattern(AngleGrid(angles_deg), np.sqrt(floor + (1.0 - floor) * np.sin(th) ** 2), f0)


def db_to_linear(db):
    return 10.0 ** (np.asarray(db, dtype=float) / 20.0)
