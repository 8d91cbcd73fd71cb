"""Band-limited random evolution-time distributions.

Two families are provided, both constructed so that the characteristic
function vanishes outside [-Delta, Delta] (the density is the squared inverse
Fourier transform of a kernel supported on [-Delta/2, Delta/2], and squaring
convolves the kernel with itself):

* ``MEAN_OPTIMIZED``:   p(t) proportional to (J_p(Delta|t|/2) / |t|^p)^2 with
  p = 1.165, tuned for a small expected |t|.
* ``VARIANCE_OPTIMIZED``: p(t) = 4 pi Delta (cos(Delta t/2)/(pi^2 -
  (Delta t)^2))^2, which minimizes the variance of |t| instead.

All moments scale as powers of 1/Delta; the dimensionless coefficients are
stored below.  The normalization and the second moment follow in closed form
from Parseval's identity applied to the kernel (they reduce to Gamma-function
ratios); the mean-of-|t| coefficients have no such form and are frozen from a
high-precision quadrature.  The unit tests re-derive every constant by
numerical integration and compare against the published 5-7 digit values.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import DomainError
from .special import bessel_j

P_ORDER = 1.165

# canonical (Delta = 1) constants ------------------------------------------------


def _meanopt_normalization(p: float = P_ORDER) -> float:
    # integral of (J_p(u/2)/u^p)^2 over the real line, via Parseval
    return math.exp(
        0.5 * math.log(math.pi)
        + math.lgamma(2 * p)
        - (2 * p - 1) * math.log(4.0)
        - 2 * math.lgamma(p + 0.5)
        - math.lgamma(2 * p + 0.5)
    )


def _meanopt_second_moment(p: float = P_ORDER) -> float:
    # <t^2> = (integral of kernel'^2) / (integral of kernel^2)
    return 2.0 * (p - 0.5) * (2.0 * p - 0.5) / (p - 1.0)


MEANOPT_NORMALIZATION = _meanopt_normalization()  # 0.23791283706194405
MEANOPT_MEAN_ABS = 2.3213203343673404  # frozen quadrature value
MEANOPT_SECOND_MOMENT = _meanopt_second_moment()  # 14.750909090909...

VAROPT_MEAN_ABS = 2.4306345592297697  # frozen quadrature value
VAROPT_SECOND_MOMENT = math.pi ** 2

_TAIL_CUT = 200.0  # tabulated-CDF cut in units of 1/Delta; tail mass < 1e-5


class Kind(str, enum.Enum):
    MEAN_OPTIMIZED = "mean-opt"
    VARIANCE_OPTIMIZED = "var-opt"


@dataclass(frozen=True)
class TimeDistribution:
    """A band-limited evolution-time distribution with gap parameter delta."""

    kind: Kind
    delta: float

    def __post_init__(self) -> None:
        if not (0.0 < self.delta <= 1.0):
            raise DomainError("delta in (0, 1]")


@dataclass(frozen=True)
class MomentTable:
    """Dimensionless moment coefficients: <|t|> = mean_abs_coeff/Delta, etc."""

    mean_abs_coeff: float
    second_moment_coeff: float
    variance_coeff: float
    normalization: float

    def __post_init__(self) -> None:
        expected = self.second_moment_coeff - self.mean_abs_coeff ** 2
        assert abs(self.variance_coeff - expected) < 1e-12


def moments(dist: TimeDistribution) -> MomentTable:
    """Moment coefficients of the distribution (independent of delta)."""
    if dist.kind is Kind.MEAN_OPTIMIZED:
        return MomentTable(
            mean_abs_coeff=MEANOPT_MEAN_ABS,
            second_moment_coeff=MEANOPT_SECOND_MOMENT,
            variance_coeff=MEANOPT_SECOND_MOMENT - MEANOPT_MEAN_ABS ** 2,
            normalization=MEANOPT_NORMALIZATION,
        )
    return MomentTable(
        mean_abs_coeff=VAROPT_MEAN_ABS,
        second_moment_coeff=VAROPT_SECOND_MOMENT,
        variance_coeff=VAROPT_SECOND_MOMENT - VAROPT_MEAN_ABS ** 2,
        normalization=1.0 / (4.0 * math.pi),
    )


# canonical densities -------------------------------------------------------------

def _bessel_ratio_small(u: np.ndarray, p: float = P_ORDER) -> np.ndarray:
    """J_p(u/2)/u^p for u <= 2, as a ratio series (removes the 0^p/0^p form)."""
    z2 = (u / 4.0) ** 2
    term = np.full_like(u, 1.0 / math.gamma(p + 1.0))
    total = term.copy()
    for m in range(24):
        term = term * (-z2) / ((m + 1.0) * (p + m + 1.0))
        total += term
    return 4.0 ** (-p) * total


def _pdf1_meanopt(u: np.ndarray) -> np.ndarray:
    u = np.abs(np.asarray(u, dtype=float))
    out = np.empty_like(u)
    small = u <= 2.0
    if np.any(small):
        out[small] = _bessel_ratio_small(u[small]) ** 2
    if np.any(~small):
        ub = u[~small]
        out[~small] = (bessel_j(P_ORDER, ub / 2.0) / ub ** P_ORDER) ** 2
    return out / MEANOPT_NORMALIZATION


def _pdf1_varopt(u: np.ndarray) -> np.ndarray:
    u = np.abs(np.asarray(u, dtype=float))
    out = np.empty_like(u)
    near = np.abs(u - math.pi) < 0.5
    if np.any(near):
        # cos(u/2)/(pi^2-u^2) = sin(h/2)/(h (u+pi)) with h = u - pi
        h = u[near] - math.pi
        ratio = np.where(h == 0.0, 0.5, np.sin(h / 2.0) / np.where(h == 0.0, 1.0, h))
        out[near] = (ratio / (u[near] + math.pi)) ** 2
    if np.any(~near):
        uf = u[~near]
        out[~near] = (np.cos(uf / 2.0) / (math.pi ** 2 - uf ** 2)) ** 2
    return 4.0 * math.pi * out


def _pdf1(kind: Kind, u: np.ndarray) -> np.ndarray:
    return _pdf1_meanopt(u) if kind is Kind.MEAN_OPTIMIZED else _pdf1_varopt(u)


def pdf(dist: TimeDistribution, t) -> float | np.ndarray:
    """Probability density of the (two-sided, even) time distribution."""
    t_arr = np.asarray(t, dtype=float)
    scalar = t_arr.ndim == 0
    out = dist.delta * _pdf1(dist.kind, np.atleast_1d(dist.delta * np.abs(t_arr)))
    return float(out[0]) if scalar else out


# quadrature machinery -------------------------------------------------------------

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(12)


def _panelize(boundaries: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    a = boundaries[:-1]
    h = np.diff(boundaries)
    nodes = (a[:, None] + (0.5 * (1.0 + _GL_NODES))[None, :] * h[:, None]).ravel()
    weights = (0.5 * h[:, None] * _GL_WEIGHTS[None, :]).ravel()
    return nodes, weights


@lru_cache(maxsize=4)
def _chi_grid(kind: Kind) -> tuple[np.ndarray, np.ndarray]:
    # static Gauss-Legendre grid on [0, 4000] resolving both the density's
    # own period-2pi oscillation and cos(w u) up to w ~ 12
    boundaries = np.linspace(0.0, 4000.0, 10187)
    nodes, weights = _panelize(boundaries)
    return nodes, weights * _pdf1(kind, nodes)


def characteristic_fn(dist: TimeDistribution, omega: float) -> float:
    """Fourier transform of the density at frequency omega (real by symmetry).

    Numeric quadrature with a truncation floor around 1e-8; the exact value
    vanishes for |omega| > delta.
    """
    w = abs(float(omega)) / dist.delta
    if w > 12.0:
        # beyond the certified quadrature band the integral is astronomically
        # small; resolve it with a dedicated fine grid
        boundaries = np.linspace(0.0, 4000.0, int(4000.0 * w / 2.2) + 2)
        nodes, weights = _panelize(boundaries)
        return 2.0 * float(np.dot(weights * _pdf1(dist.kind, nodes), np.cos(w * nodes)))
    nodes, wp = _chi_grid(dist.kind)
    return 2.0 * float(np.dot(wp, np.cos(w * nodes)))


# sampling -------------------------------------------------------------------------

@dataclass(frozen=True)
class _SamplerTable:
    grid_u: np.ndarray
    grid_cdf: np.ndarray
    inverse: PchipInterpolator
    forward: PchipInterpolator
    table_mass: float
    tail_mass: float
    tail_exponent: float
    tail_envelope: float  # sup over the tail of 2*pdf1(u)*u^tail_exponent+1...


@lru_cache(maxsize=4)
def _sampler_table(kind: Kind) -> _SamplerTable:
    boundaries = np.concatenate([
        np.linspace(0.0, 2.0, 65),
        np.linspace(2.0, _TAIL_CUT, 1585)[1:],
    ])
    nodes, weights = _panelize(boundaries)
    dens = 2.0 * _pdf1(kind, nodes)  # one-sided magnitude density
    per_panel = (weights * dens).reshape(-1, 12).sum(axis=1)
    cdf = np.concatenate([[0.0], np.cumsum(per_panel)])
    table_mass = float(cdf[-1])
    tail_mass = 1.0 - table_mass
    # strictly increasing is guaranteed: the density is positive
    inverse = PchipInterpolator(cdf, boundaries, extrapolate=False)
    forward = PchipInterpolator(boundaries, cdf, extrapolate=False)
    expo = 2.0 * P_ORDER if kind is Kind.MEAN_OPTIMIZED else 3.0
    ug = np.linspace(_TAIL_CUT, 4000.0, 80001)
    envelope = 1.02 * float(np.max(2.0 * _pdf1(kind, ug) * ug ** (expo + 1.0)))
    return _SamplerTable(
        grid_u=boundaries, grid_cdf=cdf, inverse=inverse, forward=forward,
        table_mass=table_mass, tail_mass=tail_mass,
        tail_exponent=expo, tail_envelope=envelope,
    )


def _sample_tail(kind: Kind, rng: np.random.Generator, n: int, table: _SamplerTable) -> np.ndarray:
    """Rejection sampling of the tail magnitude against a Pareto envelope."""
    expo = table.tail_exponent
    out = np.empty(n)
    filled = 0
    while filled < n:
        m = max(2 * (n - filled), 16)
        u = _TAIL_CUT * rng.uniform(size=m) ** (-1.0 / expo)
        env = table.tail_envelope * u ** (-(expo + 1.0))
        accept = rng.uniform(size=m) * env <= 2.0 * _pdf1(kind, u)
        got = u[accept]
        take = min(got.size, n - filled)
        out[filled:filled + take] = got[:take]
        filled += take
    return out


def sample_times(dist: TimeDistribution, rng: np.random.Generator, n: int) -> np.ndarray:
    """Draw n evolution times: symmetric sign, magnitude by inverse CDF.

    Magnitudes below the tabulation cut (200/delta) come from a monotone
    spline of the numeric CDF; the heavy tail beyond is drawn from a Pareto
    envelope with rejection against the true density.
    """
    table = _sampler_table(dist.kind)
    v = rng.uniform(size=n)
    u = np.empty(n)
    in_table = v < table.table_mass
    u[in_table] = table.inverse(v[in_table])
    n_tail = int(np.count_nonzero(~in_table))
    if n_tail:
        u[~in_table] = _sample_tail(dist.kind, rng, n_tail, table)
    signs = np.where(rng.uniform(size=n) < 0.5, -1.0, 1.0)
    return signs * u / dist.delta


def sample(dist: TimeDistribution, rng: np.random.Generator) -> float:
    """Draw a single random evolution time."""
    return float(sample_times(dist, rng, 1)[0])


def cdf_abs(dist: TimeDistribution, t) -> np.ndarray:
    """Numeric CDF of |t| (used for goodness-of-fit checks).

    Beyond the tabulation cut the tail is approximated by its power-law
    envelope average, accurate to a few parts in 1e6 of total mass.
    """
    table = _sampler_table(dist.kind)
    u = np.atleast_1d(np.asarray(t, dtype=float)) * dist.delta
    out = np.empty_like(u)
    low = u <= _TAIL_CUT
    out[low] = table.forward(np.clip(u[low], 0.0, _TAIL_CUT))
    out[~low] = 1.0 - table.tail_mass * (_TAIL_CUT / u[~low]) ** table.tail_exponent
    return out
