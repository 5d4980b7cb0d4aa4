"""Discrete prolate spheroidal sequences (Slepian tapers).

The tapers are the leading eigenvectors of the ``n x n`` sinc kernel::

    A[g, r] = sin(2 pi W (g - r)) / (pi (g - r)),    A[g, g] = 2 W

with ``W`` the half-bandwidth in cycles per sample.  Solving that dense
problem directly is ill-conditioned once several eigenvalues crowd towards
one, so the eigenvectors are taken from the symmetric tridiagonal matrix that
commutes with the kernel.  The concentration ratios are then recovered as
Rayleigh quotients of the dense kernel, evaluated by direct summation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import LinAlgError, eigh_tridiagonal

from .errors import NumericError, ParameterError


def w_opt(t_hb):
    """Number of well-concentrated tapers, ``floor(2 * t_hb) - 1``."""
    # guard against t_hb = n*dt*W landing a hair below an integer multiple of 1/2
    return math.floor(2.0 * t_hb + 1e-9) - 1


@dataclass(frozen=True)
class TaperSpec:
    """Segment length ``n`` (points), sample interval ``dt`` (s) and ``t_hb``.

    The half-bandwidth in Hz follows from ``t_hb = n * dt * W``.
    """

    n: int
    t_hb: float
    dt: float = 1.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ParameterError(f"segment length must be a positive integer, got {self.n}")
        object.__setattr__(self, "n", int(self.n))
        if not self.dt > 0:
            raise ParameterError("sample interval dt must be positive")
        if not self.t_hb > 0:
            raise ParameterError("time-half-bandwidth product must be positive")
        if self.t_hb >= self.n / 2.0:
            raise ParameterError(
                f"t_hb={self.t_hb} must be below n/2={self.n / 2} (W < 1/(2 dt))")

    @classmethod
    def from_bandwidth(cls, n, W, dt):
        return cls(n, n * dt * W, dt)

    @property
    def W(self):
        """Half-bandwidth in Hz."""
        return self.t_hb / (self.n * self.dt)

    @property
    def normalized_bandwidth(self):
        """Half-bandwidth in cycles per sample, ``W * dt``."""
        return self.t_hb / self.n

    @property
    def w_opt(self):
        return w_opt(self.t_hb)


@dataclass(frozen=True, eq=False)
class TaperBasis:
    """``tapers[w]`` is the order-``w`` sequence; ``eigenvalues`` descend."""

    spec: TaperSpec
    tapers: np.ndarray
    eigenvalues: np.ndarray

    def __len__(self):
        return self.tapers.shape[0]

    @property
    def weights(self):
        """Convex recombination weights ``lambda_w / sum(lambda)``."""
        return self.eigenvalues / self.eigenvalues.sum()


def sinc_kernel_row(n, half_bandwidth):
    """Kernel values for lags ``-(n-1) .. n-1``."""
    lag = np.arange(-(n - 1), n, dtype=float)
    out = np.empty_like(lag)
    nz = lag != 0
    out[nz] = np.sin(2.0 * np.pi * half_bandwidth * lag[nz]) / (np.pi * lag[nz])
    out[~nz] = 2.0 * half_bandwidth
    return out


def concentration(tapers, half_bandwidth):
    """Rayleigh quotients ``v^T A v`` of the sinc kernel, by direct summation."""
    tapers = np.atleast_2d(tapers)
    n = tapers.shape[1]
    row = sinc_kernel_row(n, half_bandwidth)
    lam = np.empty(tapers.shape[0])
    for w, v in enumerate(tapers):
        Av = np.convolve(v, row, mode="valid")
        lam[w] = v @ Av / (v @ v)
    return lam


def _fix_signs(tapers):
    for v in tapers:
        # first non-negligible sample decides the sign
        big = np.flatnonzero(np.abs(v) > 1e-10 * np.max(np.abs(v)))
        if big.size and v[big[0]] < 0:
            v *= -1.0
    return tapers


@lru_cache(maxsize=64)
def _dpss_cached(n, half_bandwidth, count):
    if n == 1:
        tapers = np.ones((1, 1))
    else:
        i = np.arange(n, dtype=float)
        diag = ((n - 1 - 2 * i) / 2.0) ** 2 * np.cos(2.0 * np.pi * half_bandwidth)
        off = i[1:] * (n - i[1:]) / 2.0
        try:
            _, vecs = eigh_tridiagonal(diag, off, select="i",
                                       select_range=(n - count, n - 1))
        except LinAlgError as exc:
            raise NumericError(f"tridiagonal eigen-solve failed for n={n}: {exc}") from exc
        tapers = np.ascontiguousarray(vecs[:, ::-1].T)
        tapers /= np.linalg.norm(tapers, axis=1, keepdims=True)
        _fix_signs(tapers)
    lam = concentration(tapers, half_bandwidth)
    if not (np.all(np.isfinite(tapers)) and np.all(np.isfinite(lam))):
        raise NumericError(f"non-finite DPSS output for n={n}, W={half_bandwidth}")
    tapers.setflags(write=False)
    lam.setflags(write=False)
    return tapers, lam


def dpss_sequences(n, half_bandwidth, count):
    """The ``count`` leading Slepian sequences of length ``n``.

    Parameters
    ----------
    n : int
        Sequence length in samples.
    half_bandwidth : float
        Half-bandwidth in cycles per sample, ``0 < half_bandwidth < 0.5``.
    count : int
        Number of sequences, ``1 <= count <= n``.

    Returns
    -------
    tapers : ndarray, shape (count, n)
        Unit-norm sequences, lowest order first, each scaled so that its first
        non-negligible sample is positive.
    eigenvalues : ndarray, shape (count,)
        Spectral concentration ratios in descending order.
    """
    if not 0 < half_bandwidth < 0.5:
        raise ParameterError(f"half-bandwidth must lie in (0, 0.5), got {half_bandwidth}")
    if not 1 <= count <= n:
        raise ParameterError(f"taper count must lie in [1, {n}], got {count}")
    return _dpss_cached(int(n), float(half_bandwidth), int(count))


def dpss_basis(spec):
    """Tapers of orders ``0 .. w_opt - 1`` for ``spec``."""
    k = spec.w_opt
    if k < 1:
        raise ParameterError(
            f"t_hb={spec.t_hb} gives w_opt={k}; at least one taper is required")
    if spec.n < 2:
        raise ParameterError("segment length must be at least 2")
    tapers, lam = dpss_sequences(spec.n, spec.normalized_bandwidth, k)
    return TaperBasis(spec, tapers, lam)
