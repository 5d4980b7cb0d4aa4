"""Multitaper correction of a frequency sweep at its band centre.

Pipeline for one angle (vectorised over angles where the caller passes a
``K x A`` block):

1. zero-pad the ``K`` sweep samples to ``N = 2**(ceil(log2 K) + 3)`` points,
   inverse-transform and re-centre so time index ``m`` runs over
   ``-N/2 .. N/2-1``;
2. cut the time response into segments of ``n`` points every ``s`` points;
3. taper each segment with the DPSS basis, transform, and combine the
   spectra with eigenvalue weights;
4. place segment ``i`` on global bins ``M_s(i)``, average overlaps;
5. read the magnitude at global bin 0, which is the band centre.

Transform normalisation is fixed: forward unscaled, inverse scaled by
``1/N``, so ``sum |T|**2 == sum |R|**2 / N``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .dpss import TaperSpec, dpss_basis
from .errors import CoverageError, NumericError, ParameterError
from .sweep import Pattern


def padded_length(K):
    """``2**(ceil(log2 K) + 3)``."""
    if K < 2:
        raise ParameterError(f"K must be at least 2, got {K}")
    return 1 << ((int(K) - 1).bit_length() + 3)


def sample_interval(freq, N):
    """Time step ``(1/B) * (K-1)/(N-1)``."""
    return (freq.K - 1) / (freq.bandwidth * (N - 1))


@dataclass(frozen=True, eq=False)
class TimeResponse:
    """Centred time response; axis 0 is time, an optional axis 1 is angle.

    ``center_bin`` is the sweep index that was demodulated to zero
    frequency, and ``K`` the number of sweep points, both needed to map the
    response back to the original band.
    """

    samples: np.ndarray
    dt: float
    K: int
    center_bin: int

    @property
    def N(self):
        return self.samples.shape[0]

    @property
    def index_vector(self):
        return np.arange(-self.N // 2, self.N // 2)

    @property
    def times(self):
        return self.dt * self.index_vector

    def replace(self, samples):
        return TimeResponse(samples, self.dt, self.K, self.center_bin)


def _demodulation(N, center_bin):
    m = np.arange(-N // 2, N // 2)
    return np.exp(-2j * np.pi * center_bin * m / N)


def to_time_domain(sweep_column, freq):
    """Inverse transform of ``K`` sweep samples into a centred ``N``-point response.

    The sweep occupies the first ``K`` bins of the padded input.  After the
    circular shift that puts ``m = -N/2`` first, the response is multiplied
    by ``exp(-2j pi c m / N)`` with ``c = freq.center_index``; this moves the
    band-centre sample to zero frequency and leaves magnitudes untouched, so
    a path delay ``tau`` still peaks near ``t = tau``.
    """
    R = np.asarray(sweep_column, dtype=complex)
    K = freq.K
    if R.shape[0] != K:
        raise ParameterError(f"expected {K} sweep samples, got {R.shape[0]}")
    N = padded_length(K)
    T = np.fft.ifft(R, n=N, axis=0)
    T = np.fft.fftshift(T, axes=0)
    demod = _demodulation(N, freq.center_index)
    T *= demod if T.ndim == 1 else demod[:, None]
    return TimeResponse(T, sample_interval(freq, N), K, freq.center_index)


def from_time_domain(time):
    """Forward transform back to the ``K`` original sweep bins."""
    demod = _demodulation(time.N, time.center_bin)
    T = time.samples * (np.conj(demod) if time.samples.ndim == 1 else np.conj(demod)[:, None])
    X = np.fft.fft(np.fft.ifftshift(T, axes=0), axis=0)
    return X[:time.K]


def band_center_value(time):
    """Forward transform evaluated at the band-centre bin only."""
    return time.samples.sum(axis=0)


@dataclass(frozen=True)
class SegmentPlan:
    """Overlapping segmentation of an ``N``-point axis.

    Segment ``i`` (1-based) covers indices
    ``-N/2 + (i-1)*s .. -N/2 + (i-1)*s + n - 1``.
    """

    N: int
    n: int
    s: int

    @property
    def count(self):
        return (self.N - self.n + self.s) // self.s

    @property
    def span(self):
        """Number of global bins covered, ``(count-1)*s + n``."""
        return (self.count - 1) * self.s + self.n

    @property
    def offsets(self):
        """0-based array offset of every segment start."""
        return self.s * np.arange(self.count)

    def index_set(self, i):
        if not 1 <= i <= self.count:
            raise ParameterError(f"segment index {i} outside 1..{self.count}")
        start = -self.N // 2 + (i - 1) * self.s
        return np.arange(start, start + self.n)

    @property
    def bin_indices(self):
        """Global index set ``M_omega``."""
        return np.arange(-self.N // 2, -self.N // 2 + self.span)


def plan_segments(N, n, s):
    if not (1 <= s <= n <= N // 2):
        raise ParameterError(f"segmentation requires 1 <= s <= n <= N/2; got N={N}, n={n}, s={s}")
    return SegmentPlan(int(N), int(n), int(s))


def segment_spectrum(segment, basis, axis=-1):
    """Eigenvalue-weighted combination of the tapered ``n``-point spectra.

    Returns the spectrum in centred order (zero frequency at index ``n//2``)
    along ``axis``; any other axes are carried through.

    The transform is linear, so the weighted sum of the per-taper spectra is
    computed as one transform of the segment times the weighted taper sum.
    """
    seg = np.asarray(segment)
    n = basis.spec.n
    if seg.shape[axis] != n:
        raise ParameterError(f"segment length {seg.shape[axis]} does not match taper length {n}")
    window = basis.weights @ basis.tapers
    seg = np.moveaxis(seg, axis, -1)
    out = np.fft.fftshift(np.fft.fft(seg * window, axis=-1), axes=-1)
    return np.moveaxis(out, -1, axis)


@dataclass(frozen=True, eq=False)
class AssembledSpectrum:
    """Overlap-averaged spectrum on the global bins ``M_omega``."""

    values: np.ndarray
    d_omega: float
    coverage_counts: np.ndarray
    N: int

    @property
    def bin_indices(self):
        return np.arange(-self.N // 2, -self.N // 2 + self.values.shape[0])

    @property
    def offsets(self):
        return self.d_omega * self.bin_indices

    def value_at(self, m=0):
        j = m + self.N // 2
        if not 0 <= j < self.values.shape[0] or self.coverage_counts[j] == 0:
            raise CoverageError(f"global bin {m} is not covered by any segment")
        return self.values[j]


def assemble(plan, per_segment, d_omega):
    """Place segment spectra on the global bins and average the overlaps.

    ``per_segment`` holds ``plan.count`` spectra; axis 0 of each is
    frequency, any further axes (angles) are carried through.
    """
    if len(per_segment) != plan.count:
        raise ParameterError(f"expected {plan.count} segment spectra, got {len(per_segment)}")
    first = np.asarray(per_segment[0])
    acc = np.zeros((plan.span,) + first.shape[1:], dtype=complex)
    counts = np.zeros(plan.span, dtype=int)
    for off, spec in zip(plan.offsets, per_segment):
        spec = np.asarray(spec)
        if spec.shape[0] != plan.n:
            raise ParameterError(f"segment spectrum has {spec.shape[0]} bins, expected {plan.n}")
        acc[off:off + plan.n] += spec
        counts[off:off + plan.n] += 1
    covered = counts > 0
    shape = (-1,) + (1,) * (acc.ndim - 1)
    acc[covered] /= counts[covered].reshape(shape)
    acc[~covered] = np.nan
    return AssembledSpectrum(acc, float(d_omega), counts, plan.N)


def _basis_for(n, t_hb, dt):
    return dpss_basis(TaperSpec(n, t_hb, dt))


def corrected_spectrum(block, freq, n, s, t_hb=4.0):
    """Assembled spectrum for a ``K`` or ``K x A`` block of sweep samples."""
    time = to_time_domain(block, freq)
    plan = plan_segments(time.N, n, s)
    basis = _basis_for(n, t_hb, time.dt)
    # (count, n, ...) view of the overlapping segments
    segs = sliding_window_view(time.samples, n, axis=0)[::s]
    segs = np.moveaxis(segs, -1, 1)
    spectra = segment_spectrum(segs, basis, axis=1)
    return assemble(plan, spectra, freq.spacing)


def _extract(block, freq, n, s, t_hb):
    spectrum = corrected_spectrum(block, freq, n, s, t_hb)
    return np.abs(spectrum.value_at(0))


def correct_angle(sweep_column, freq, n, s, t_hb=4.0):
    """Corrected linear magnitude at the band centre for one angle."""
    value = _extract(np.asarray(sweep_column, dtype=complex), freq, n, s, t_hb)
    if not np.isfinite(value):
        raise NumericError("corrected value is not finite")
    return float(value)


def correct_pattern(sweep, n, s, t_hb=4.0):
    """Apply :func:`correct_angle` to every angle column of ``sweep``."""
    values = _extract(sweep.data, sweep.freq, n, s, t_hb)
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        raise NumericError(
            f"non-finite corrected value at angle {sweep.angles.angles_deg[bad[0]]} deg")
    return Pattern(sweep.angles, values, sweep.f0)
