"""Exhaustive (n, s) search for the multitaper correction.

Every design of a grid is scored by how well its corrected pattern matches a
least-squares scaled reference.  Designs whose score is no worse than any of
their grid neighbours are local minima; the best ``sigma`` fraction of those
are averaged into the final pattern.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .engine import correct_pattern, padded_length
from .errors import CoverageError, ParameterError, TuningError
from .sweep import Pattern

log = logging.getLogger(__name__)

DB_FLOOR = -100.0


def _check_pair(candidate, reference):
    if not candidate.same_grid(reference):
        raise ParameterError("candidate and reference patterns use different angle grids")


def _to_domain(values, domain):
    if domain == "linear":
        return np.asarray(values, dtype=float)
    if domain == "db":
        with np.errstate(divide="ignore"):
            return np.maximum(20.0 * np.log10(values), DB_FLOOR)
    raise ParameterError(f"unknown fit domain {domain!r}")


def alpha_fit(candidate, reference, domain="linear"):
    """Least-squares scale ``alpha`` minimising ``|candidate - alpha * reference|``."""
    _check_pair(candidate, reference)
    c = _to_domain(candidate.values, domain)
    r = _to_domain(reference.values, domain)
    rr = r @ r
    if rr == 0:
        raise ParameterError("reference pattern is identically zero")
    return float(r @ c / rr)


def objective(candidate, reference, form="squared", normalize=False, domain="linear"):
    """Residual of ``candidate`` against the scaled ``reference``.

    ``form="squared"`` gives ``|c - alpha r|**2``; ``form="signed"`` the plain
    sum ``sum(c - alpha r)``.  With ``normalize`` the squared residual is
    divided by ``|c|**2``, which makes it independent of the overall gain of
    the candidate (a zero candidate scores 0).
    """
    alpha = alpha_fit(candidate, reference, domain)
    c = _to_domain(candidate.values, domain)
    r = _to_domain(reference.values, domain)
    resid = c - alpha * r
    if form == "signed":
        return float(resid.sum())
    if form != "squared":
        raise ParameterError(f"unknown objective form {form!r}")
    u = float(resid @ resid)
    if normalize:
        cc = float(c @ c)
        return u / cc if cc > 0 else 0.0
    return u


def _round_half_up(x_num, x_den):
    return (2 * x_num + x_den) // (2 * x_den)


@dataclass(frozen=True, order=True)
class Design:
    """Setup parameters; ``n_index``/``q_index`` locate the design on its grid."""

    n: int
    s: int
    n_index: int = field(default=0, compare=False)
    q_index: int = field(default=0, compare=False)


@dataclass(frozen=True)
class SearchGrid:
    """Segment lengths ``n_min..n_max`` by ``n_step``; steps ``s = round(q n)``.

    ``tenths`` lists the step fractions ``q`` in tenths.  Steps are clamped
    to ``[ceil(0.1 n), floor(0.9 n)]``, which keeps every design inside the
    search bounds.
    """

    n_min: int = 101
    n_max: int = 901
    n_step: int = 50
    tenths: tuple = (1, 2, 3, 4, 5, 6, 7, 8, 9)

    def designs(self, N=None):
        out = []
        for i, n in enumerate(range(self.n_min, self.n_max + 1, self.n_step)):
            if N is not None and n > N // 2:
                continue
            s_lo = -(-n // 10)
            s_hi = (9 * n) // 10
            for j, q in enumerate(sorted(self.tenths)):
                s = min(max(_round_half_up(q * n, 10), s_lo), s_hi)
                out.append(Design(n, max(1, s), i, j))
        return out

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        if "tenths" in d:
            d["tenths"] = tuple(int(t) for t in d["tenths"])
        return cls(**d)


@dataclass(frozen=True, eq=False)
class DesignResult:
    design: Design
    U: Optional[float]
    pattern: Optional[Pattern]
    failure: Optional[str] = None

    @property
    def ok(self):
        return self.failure is None


@dataclass(frozen=True, eq=False)
class TuneReport:
    designs: tuple
    x_opt: tuple
    selected: tuple
    result: Pattern
    sigma: float
    t_hb: float

    @property
    def excluded(self):
        return tuple(r for r in self.designs if not r.ok)

    def landscape(self):
        """``(n, s, U)`` rows for every evaluated design."""
        return [(r.design.n, r.design.s, r.U) for r in self.designs if r.ok]

    def to_dict(self):
        def ds(d):
            return {"n": d.n, "s": d.s}
        return {
            "t_hb": self.t_hb,
            "sigma": self.sigma,
            "f0_hz": self.result.f0,
            "designs": [
                {**ds(r.design), "U": r.U, "failure": r.failure} for r in self.designs
            ],
            "x_opt": [ds(d) for d in self.x_opt],
            "selected": [ds(d) for d in self.selected],
            "angles_deg": self.result.angles.angles_deg.tolist(),
            "result": self.result.values.tolist(),
        }


def selection_size(sigma, count):
    """``max(1, ceil(sigma * count))``, robust to binary rounding of sigma."""
    return max(1, math.ceil(round(sigma * count, 9)))


def local_minima(results):
    """Designs whose U is no larger than that of any valid 8-neighbour."""
    by_pos = {(r.design.n_index, r.design.q_index): r for r in results if r.ok}
    out = []
    for (i, j), r in by_pos.items():
        neigh = (by_pos.get((i + di, j + dj)) for di in (-1, 0, 1) for dj in (-1, 0, 1)
                 if di or dj)
        if all(r.U <= o.U for o in neigh if o is not None):
            out.append(r)
    return out


def tune(sweep, reference, t_hb=4.0, sigma=0.1, grid=None, designs=None,
         form="squared", normalize=True, domain="linear", executor=None):
    """Search the design grid and average the best local optima.

    Parameters
    ----------
    sweep : SweepSet
        Uncorrected measurement.
    reference : Pattern
        Reference pattern on the same angle grid.
    t_hb : float
        Time-half-bandwidth product of the tapers.
    sigma : float
        Fraction of the locally optimal designs that is averaged, in (0, 1].
    grid : SearchGrid, optional
        Defaults to ``SearchGrid()``.
    designs : sequence of Design, optional
        Explicit designs (with grid indices) to evaluate instead of
        ``grid.designs(N)``; their order does not affect the report.
    form, normalize, domain
        Objective options, see :func:`objective`.
    executor : concurrent.futures.Executor, optional
        Used to evaluate designs concurrently.

    Returns
    -------
    TuneReport
    """
    if not 0 < sigma <= 1:
        raise ParameterError(f"sigma must lie in (0, 1], got {sigma}")
    _check_pair(sweep.uncorrected_pattern(), reference)
    if not np.any(reference.values):
        raise ParameterError("reference pattern is identically zero")
    N = padded_length(sweep.freq.K)
    if designs is None:
        designs = (grid or SearchGrid()).designs(N)
    if not designs:
        raise TuningError("the search grid is empty")

    def evaluate(d):
        try:
            p = correct_pattern(sweep, d.n, d.s, t_hb)
        except (CoverageError, ParameterError) as exc:
            return DesignResult(d, None, None, str(exc))
        return DesignResult(d, objective(p, reference, form, normalize, domain), p)

    mapper = executor.map if executor is not None else map
    results = sorted(mapper(evaluate, designs), key=lambda r: (r.design.n, r.design.s))
    for r in results:
        if not r.ok:
            log.info("design n=%d s=%d excluded: %s", r.design.n, r.design.s, r.failure)
    if not any(r.ok for r in results):
        raise TuningError("no design produced a covered band-centre bin")

    ranked = sorted(local_minima(results), key=lambda r: (r.U, r.design.n, r.design.s))
    chosen = ranked[:selection_size(sigma, len(ranked))]
    mean = np.mean([r.pattern.values for r in chosen], axis=0)
    return TuneReport(
        designs=tuple(results),
        x_opt=tuple(r.design for r in ranked),
        selected=tuple(r.design for r in chosen),
        result=Pattern(sweep.angles, mean, sweep.f0),
        sigma=sigma,
        t_hb=t_hb,
    )
