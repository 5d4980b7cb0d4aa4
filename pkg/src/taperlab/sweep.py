"""Frequency/angle sweep containers and their CSV interchange.

Sweeps are stored long-form, one row per (frequency, angle) sample::

    freq_hz,angle_deg,re,im

and reference patterns as ``angle_deg,mag_linear``.  Pattern values are
always linear magnitudes; conversion to dB happens only in the metrics and
plot-export code.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import LoadError, ParameterError

SWEEP_HEADER = ("freq_hz", "angle_deg", "re", "im")
PATTERN_HEADER = ("angle_deg", "mag_linear")

# relative tolerance when deciding whether a grid read from text is uniform
_GRID_RTOL = 1e-6


def _readonly(a):
    a = np.array(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class FrequencyGrid:
    """Uniform frequency sweep of ``K`` points from ``f_start`` to ``f_stop`` (Hz)."""

    f_start: float
    f_stop: float
    K: int

    def __post_init__(self):
        if not (math.isfinite(self.f_start) and math.isfinite(self.f_stop)):
            raise ParameterError("frequency limits must be finite")
        if self.f_stop <= self.f_start:
            raise ParameterError(
                f"f_stop ({self.f_stop}) must exceed f_start ({self.f_start})")
        if int(self.K) != self.K or self.K < 2:
            raise ParameterError(f"K must be an integer >= 2, got {self.K}")
        object.__setattr__(self, "K", int(self.K))

    @classmethod
    def centered(cls, f0, bandwidth, K):
        return cls(f0 - bandwidth / 2.0, f0 + bandwidth / 2.0, K)

    @property
    def f0(self):
        return (self.f_start + self.f_stop) / 2.0

    @property
    def bandwidth(self):
        return self.f_stop - self.f_start

    @property
    def spacing(self):
        return (self.f_stop - self.f_start) / (self.K - 1)

    @property
    def center_index(self):
        """Index of the sample treated as the band centre.

        Exactly ``f0`` for odd ``K``; for even ``K`` the sample just above it.
        """
        return self.K // 2

    @property
    def values(self):
        return np.linspace(self.f_start, self.f_stop, self.K)


@dataclass(frozen=True, eq=False)
class AngleGrid:
    """Strictly increasing, uniformly stepped rotation angles in degrees."""

    angles_deg: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.angles_deg, dtype=float).ravel()
        if a.size < 1:
            raise ParameterError("angle grid is empty")
        if not np.all(np.isfinite(a)):
            raise ParameterError("angles must be finite")
        if a.size > 1:
            step = np.diff(a)
            if np.any(step <= 0):
                raise ParameterError("angles must be strictly increasing")
            if a[-1] - a[0] >= 360.0:
                raise ParameterError(
                    "angle span must stay below 360 deg (0 and 360 may not both appear)")
            if np.max(np.abs(step - step[0])) > _GRID_RTOL * max(abs(step[0]), 1.0):
                raise ParameterError("angle grid is not uniformly stepped")
        object.__setattr__(self, "angles_deg", _readonly(a))

    def __len__(self):
        return self.angles_deg.size

    def __eq__(self, other):
        return isinstance(other, AngleGrid) and np.array_equal(
            self.angles_deg, other.angles_deg)

    __hash__ = None

    @property
    def A(self):
        return self.angles_deg.size

    @property
    def step(self):
        return float(self.angles_deg[1] - self.angles_deg[0]) if self.A > 1 else 0.0

    @classmethod
    def uniform(cls, start, step, count):
        return cls(start + step * np.arange(count))


@dataclass(frozen=True, eq=False)
class SweepSet:
    """Complex transmission ``data[k, a]`` over a frequency and angle grid."""

    freq: FrequencyGrid
    angles: AngleGrid
    data: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.data, dtype=complex)
        if d.shape != (self.freq.K, self.angles.A):
            raise ParameterError(
                f"data shape {d.shape} does not match K x A = "
                f"{self.freq.K} x {self.angles.A}")
        if not np.all(np.isfinite(d)):
            raise ParameterError("sweep data contains non-finite entries")
        object.__setattr__(self, "data", _readonly(d))

    @property
    def f0(self):
        return self.freq.f0

    def column(self, a):
        return self.data[:, a]

    def uncorrected_pattern(self):
        """|R_u| at the band-centre sample for every angle."""
        return Pattern(self.angles, np.abs(self.data[self.freq.center_index]), self.f0)

    def subband(self, f0, bandwidth):
        """Return the sub-sweep of width ``bandwidth`` centred on ``f0``.

        Both band edges must fall on existing grid points.
        """
        f = self.freq.values
        tol = 1e-6 * self.freq.spacing
        lo = np.flatnonzero(np.abs(f - (f0 - bandwidth / 2.0)) <= tol)
        hi = np.flatnonzero(np.abs(f - (f0 + bandwidth / 2.0)) <= tol)
        if lo.size != 1 or hi.size != 1:
            raise ParameterError(
                f"no sub-band of width {bandwidth:g} Hz centred on {f0:g} Hz "
                f"lies on the sweep grid {self.freq.f_start:g}..{self.freq.f_stop:g} Hz")
        i, j = int(lo[0]), int(hi[0])
        return SweepSet(FrequencyGrid(f[i], f[j], j - i + 1), self.angles,
                        self.data[i:j + 1])

    def select(self, f0, bandwidth=None):
        """The sweep itself when already centred on ``f0``, else a sub-band."""
        if math.isclose(f0, self.f0, rel_tol=1e-9, abs_tol=1e-6 * self.freq.spacing):
            if bandwidth is None or math.isclose(bandwidth, self.freq.bandwidth,
                                                 rel_tol=1e-9):
                return self
        return self.subband(f0, self.freq.bandwidth if bandwidth is None else bandwidth)


@dataclass(frozen=True, eq=False)
class Pattern:
    """Non-negative linear magnitude per angle at frequency ``f0``."""

    angles: AngleGrid
    values: np.ndarray
    f0: Optional[float] = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).ravel()
        if v.size != self.angles.A:
            raise ParameterError(
                f"pattern has {v.size} values for {self.angles.A} angles")
        if not np.all(np.isfinite(v)):
            raise ParameterError("pattern values must be finite")
        if np.any(v < 0):
            raise ParameterError("pattern values must be non-negative")
        object.__setattr__(self, "values", _readonly(v))

    def __len__(self):
        return self.values.size

    def scaled(self, c):
        return Pattern(self.angles, self.values * c, self.f0)

    def same_grid(self, other):
        return self.angles == other.angles


def _open_rows(path, header):
    if not os.path.exists(path):
        raise LoadError(f"{path}: file does not exist")
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            first = next(reader)
        except StopIteration:
            raise LoadError(f"{path}: file is empty") from None
        if tuple(c.strip() for c in first) != header:
            raise LoadError(
                f"{path}: line 1: expected header {','.join(header)!r}, "
                f"got {','.join(first)!r}")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise LoadError(
                    f"{path}: line {lineno}: expected {len(header)} fields, got {len(row)}")
            try:
                vals = tuple(float(c) for c in row)
            except ValueError:
                raise LoadError(f"{path}: line {lineno}: non-numeric field in {row!r}") from None
            if not all(math.isfinite(v) for v in vals):
                raise LoadError(f"{path}: line {lineno}: non-finite value in {row!r}")
            rows.append((lineno, vals))
    return rows


def _uniform_axis(values, what, path):
    """Sorted distinct values; raises LoadError if the spacing is not constant."""
    v = np.array(sorted(values))
    if v.size > 2:
        step = np.diff(v)
        if np.max(np.abs(step - step[0])) > _GRID_RTOL * step[0]:
            bad = int(np.argmax(np.abs(step - step[0]))) + 1
            raise LoadError(f"{path}: non-uniform {what} grid at value {float(v[bad])!r}")
    return v


def load_sweep(path):
    """Read a sweep CSV into a validated :class:`SweepSet`.

    Row order is free.  Every (frequency, angle) cell of the reconstructed
    grid must appear exactly once.
    """
    rows = _open_rows(path, SWEEP_HEADER)
    if not rows:
        raise LoadError(f"{path}: no data rows")
    cells = {}
    for lineno, (f, a, re, im) in rows:
        key = (f, a)
        if key in cells:
            raise LoadError(
                f"{path}: line {lineno}: duplicate sample freq_hz={f!r}, angle_deg={a!r}")
        cells[key] = complex(re, im)
    freqs = _uniform_axis({k[0] for k in cells}, "frequency", path)
    angs = _uniform_axis({k[1] for k in cells}, "angle", path)
    if freqs.size < 2:
        raise LoadError(f"{path}: at least two distinct frequencies are required")
    data = np.empty((freqs.size, angs.size), dtype=complex)
    for i, f in enumerate(freqs):
        for j, a in enumerate(angs):
            try:
                data[i, j] = cells[(f, a)]
            except KeyError:
                raise LoadError(f"{path}: missing sample freq_hz={float(f)!r}, "
                                f"angle_deg={float(a)!r}") from None
    try:
        return SweepSet(FrequencyGrid(freqs[0], freqs[-1], freqs.size), AngleGrid(angs), data)
    except ParameterError as exc:
        raise LoadError(f"{path}: {exc}") from None


def save_sweep(sweep, path):
    f = sweep.freq.values
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(SWEEP_HEADER)
        for i in range(sweep.freq.K):
            for j in range(sweep.angles.A):
                z = sweep.data[i, j]
                w.writerow([repr(float(f[i])), repr(float(sweep.angles.angles_deg[j])),
                            repr(float(z.real)), repr(float(z.imag))])


def load_pattern(path, f0=None):
    """Read a reference pattern CSV; rows are sorted by angle."""
    rows = _open_rows(path, PATTERN_HEADER)
    if len(rows) < 2:
        raise LoadError(f"{path}: a pattern needs at least two angles, found {len(rows)}")
    seen = {}
    for lineno, (a, m) in rows:
        if m < 0:
            raise LoadError(f"{path}: line {lineno}: negative magnitude {m!r}")
        if a in seen:
            raise LoadError(f"{path}: line {lineno}: duplicate angle {a!r}")
        seen[a] = m
    angles = sorted(seen)
    try:
        return Pattern(AngleGrid(angles), [seen[a] for a in angles], f0)
    except ParameterError as exc:
        raise LoadError(f"{path}: {exc}") from None


def save_pattern(pattern, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(PATTERN_HEADER)
        for a, m in zip(pattern.angles.angles_deg, pattern.values):
            w.writerow([repr(float(a)), repr(float(m))])
