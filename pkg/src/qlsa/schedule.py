"""Adiabatic trajectory mathematics.

The discrete adiabatic trajectory is parametrized by v on [v_a, v_b] with a
gap-adapted reparametrization s(v) satisfying ds/dv = Delta(s)/sqrt(2), where
Delta(s) = sqrt((1-s)^2 + (s/kappa)^2) lower-bounds the spectral gap.  This
module provides the endpoints, the reparametrization, the step counts (exact
minimal integer and analytic closed form), and the materialized grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

KAPPA_MIN = math.sqrt(12.0)
GAMMA_DEFAULT = 0.61


@dataclass(frozen=True)
class ProblemParams:
    """Validated top-level problem parameters.

    Parameters
    ----------
    kappa : float
        Upper bound on the condition number of the rescaled matrix.
    eps : float
        Target 1-norm error of the output state.
    alpha : float
        Block-encoding scale of the system matrix.
    gamma : float
        Adiabatic infidelity target (the adiabatic stage aims at fidelity
        1 - gamma before filtering).
    """

    kappa: float
    eps: float
    alpha: float = 1.0
    gamma: float = GAMMA_DEFAULT

    def __post_init__(self) -> None:
        if not (self.kappa >= KAPPA_MIN):
            raise DomainError("kappa >= sqrt(12)")
        if not (0.0 < self.eps <= 0.24):
            raise DomainError("eps <= 0.24 (and > 0)")
        if not (self.alpha > 0.0):
            raise DomainError("alpha > 0")
        if not (0.0 < self.gamma < 1.0):
            raise DomainError("gamma in (0, 1)")


@dataclass(frozen=True)
class ScheduleGrid:
    """Materialized adiabatic grid: uniform v, reparametrized s, gap bounds."""

    kappa: float
    q: int
    v_a: float
    v_b: float
    v: np.ndarray = field(repr=False)
    s: np.ndarray = field(repr=False)
    delta: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        if self.q < 1:
            raise DomainError("q >= 1")
        assert len(self.v) == len(self.s) == len(self.delta) == self.q + 1
        assert abs(self.s[0]) <= 1e-12 and abs(self.s[-1] - 1.0) <= 1e-12
        assert np.all(np.diff(self.s) > 0.0), "s strictly increasing"


def gap_lower_bound(s: float, kappa: float) -> float:
    """Lower bound sqrt((1-s)^2 + (s/kappa)^2) on the spectral gap at s."""
    if not (0.0 <= s <= 1.0):
        raise DomainError("s in [0, 1]")
    if not (kappa >= 1.0):
        raise DomainError("kappa >= 1")
    return math.hypot(1.0 - s, s / kappa)


def path_endpoints(kappa: float) -> tuple[float, float]:
    """Endpoints (v_a, v_b) of the reparametrized trajectory.

    v_a is the closed form (sqrt(2)k/sqrt(1+k^2)) * log(k*sqrt(1+k^2) - k^2);
    the log argument is rewritten as k/(sqrt(1+k^2)+k) by conjugate
    multiplication, which avoids the catastrophic cancellation the printed
    form suffers for kappa >~ 1e7.
    """
    if not (kappa >= 1.0):
        raise DomainError("kappa >= 1")
    r = math.sqrt(1.0 + kappa ** -2)  # sqrt(1+k^2)/k, safe for huge kappa
    pref = math.sqrt(2.0) / r
    v_a = pref * (math.log(kappa) - math.log(kappa * (r + 1.0)))
    v_b = pref * (math.log(kappa) + math.log(r + 1.0 / kappa))
    return v_a, v_b


def path_length(kappa: float) -> float:
    """v_b - v_a, evaluated in a single cancellation-free expression."""
    if not (kappa >= 1.0):
        raise DomainError("kappa >= 1")
    r = math.sqrt(1.0 + kappa ** -2)
    # (v_b - v_a) = sqrt(2)/r * log((sqrt(1+k^2)+1)(sqrt(1+k^2)+k)/k)
    return math.sqrt(2.0) / r * (math.log(r + 1.0 / kappa) + math.log(kappa) + math.log(r + 1.0))


def schedule_s(v, kappa: float):
    """Reparametrization s(v) with s(v_a) = 0 and s(v_b) = 1.

    Evaluated as an expm1 combination anchored at v_a, which is exact at the
    left endpoint and stable for large kappa; tiny overshoot outside [0, 1]
    is clamped.  Accepts scalars or arrays.
    """
    if not (kappa >= 1.0):
        raise DomainError("kappa >= 1")
    v_arr = np.asarray(v, dtype=float)
    scalar = v_arr.ndim == 0
    r = math.sqrt(1.0 + kappa ** -2)  # sqrt(1+k^2)/k
    phi = r / math.sqrt(2.0)
    v_a, _ = path_endpoints(kappa)
    dv = (v_arr - v_a) * phi
    # s(v) = c1*expm1(dv) - c2*expm1(-dv) with the constant parts cancelling
    # identically at v_a; c1 = k(sqrt(1+k^2)-k)/(2(k^2+1)), c2 = (r+1)/(2 r^2)
    c1 = 1.0 / (2.0 * (r + 1.0) * (kappa ** 2 + 1.0))
    c2 = (r + 1.0) / (2.0 * r * r)
    s = c1 * np.expm1(dv) - c2 * np.expm1(-dv)
    s = np.clip(s, 0.0, 1.0)
    return float(s) if scalar else s


def step_prefactor(kappa: float) -> float:
    """Interpolated prefactor a(kappa) = 1.064 + 0.16/kappa^(1/3)."""
    return 1.064 + 0.16 / kappa ** (1.0 / 3.0)


def min_steps_for_path(length: float, gamma: float) -> int:
    """Smallest integer q with (1 - (length/q)^2)^q >= 1 - gamma.

    Scans upward from max(1, ceil(length)+1); the left-hand side is monotone
    increasing in q on q > length (checked against the previous iterate while
    scanning), so the first hit is the minimum.
    """
    if not (0.0 < gamma < 1.0):
        raise DomainError("gamma in (0, 1)")
    if length < 0.0:
        raise DomainError("length >= 0")
    if length == 0.0:
        return 1
    target = math.log1p(-gamma)
    q = 1 if length < 1.0 else int(math.ceil(length)) + 1
    if q == 1 and length >= 1.0:
        q = 2
    prev = -math.inf
    while True:
        val = q * math.log1p(-(length / q) ** 2) if length < q else -math.inf
        assert val >= prev - 1e-12, "fidelity bound must be nondecreasing in q"
        if val >= target:
            return q
        prev = val
        q += 1


def num_steps_exact(kappa: float, gamma: float = GAMMA_DEFAULT) -> int:
    """Minimal step count satisfying the discrete adiabatic fidelity bound."""
    return min_steps_for_path(path_length(kappa), gamma)


def num_steps_analytic(kappa: float) -> int:
    """Closed-form step count ceil((1.064 + 0.16 kappa^(-1/3)) (v_b-v_a)^2).

    Valid for kappa >= 2 with gamma fixed at 0.61; always sufficient for the
    fidelity bound (and hence >= num_steps_exact(kappa, 0.61)).
    """
    if not (kappa >= 2.0):
        raise DomainError("kappa >= 2")
    length = path_length(kappa)
    return int(math.ceil(step_prefactor(kappa) * length * length))


def build_grid(kappa: float, q: int) -> ScheduleGrid:
    """Materialize the q-step grid {v_j}, {s_j}, {Delta(s_j)}."""
    if q < 1:
        raise DomainError("q >= 1")
    if not (kappa >= 1.0):
        raise DomainError("kappa >= 1")
    v_a, v_b = path_endpoints(kappa)
    v = v_a + (v_b - v_a) * np.arange(q + 1) / q
    s = np.asarray(schedule_s(v, kappa))
    s[0], s[-1] = 0.0, 1.0
    delta = np.hypot(1.0 - s, s / kappa)
    return ScheduleGrid(kappa=kappa, q=q, v_a=v_a, v_b=v_b, v=v, s=s, delta=delta)
