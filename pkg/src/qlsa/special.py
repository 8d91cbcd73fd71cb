"""Self-contained special-function kernel.

Provides Bessel functions of the first kind for real nonnegative order
(fractional and integer), the principal branch of the Lambert W function, and
Chebyshev polynomials of the first kind on scalars and Hermitian matrices.

No external special-function library is used.  Fractional-order Bessel values
come from the ascending power series evaluated in double-double arithmetic for
|x| <= 30 (the series suffers ~e^x cancellation, so plain float64 is not
enough) and from the Hankel asymptotic expansion beyond.  Integer orders use
the backward (Miller) recurrence stabilized by the normalization identity
J_0(x) + 2*sum_k J_{2k}(x) = 1, which also yields whole coefficient ladders
J_0..J_n in one pass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

_SERIES_CUTOFF = 30.0
_SPLITTER = 134217729.0  # 2**27 + 1, Dekker splitting constant


@dataclass(frozen=True)
class BesselOrder:
    """Validated order of a Bessel function of the first kind."""

    nu: float

    def __post_init__(self) -> None:
        if not (self.nu >= 0.0 and math.isfinite(self.nu)):
            raise DomainError("nu >= 0 and finite")


# ---------------------------------------------------------------------------
# double-double primitives (vectorized; error-free transforms)
# ---------------------------------------------------------------------------

def _two_sum(a, b):
    s = a + b
    v = s - a
    e = (a - (s - v)) + (b - v)
    return s, e


def _two_prod(a, b):
    p = a * b
    aa = _SPLITTER * a
    ahi = aa - (aa - a)
    alo = a - ahi
    bb = _SPLITTER * b
    bhi = bb - (bb - b)
    blo = b - bhi
    e = ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo
    return p, e


def _dd_add(ah, al, bh, bl):
    sh, se = _two_sum(ah, bh)
    se = se + (al + bl)
    h, l = _two_sum(sh, se)
    return h, l


def _dd_mul(ah, al, bh, bl):
    ph, pe = _two_prod(ah, bh)
    pe = pe + (ah * bl + al * bh)
    h, l = _two_sum(ph, pe)
    return h, l


def _dd_div_f(ah, al, b):
    # divide by an exact float64 divisor, keeping double-double accuracy
    q1 = ah / b
    ph, pe = _two_prod(q1, b)
    rh, rl = _dd_add(ah, al, -ph, -pe)
    q2 = (rh + rl) / b
    h, l = _two_sum(q1, q2)
    return h, l


def _dd_div_dd(ah, al, bh, bl):
    # b = bh + bl with |bl| <= ulp(bh): divide by bh, then first-order correct
    qh, ql = _dd_div_f(ah, al, bh)
    corr = bl / bh
    ch, cl = _dd_mul(qh, ql, -corr, 0.0 * corr)
    return _dd_add(qh, ql, ch, cl)


# ---------------------------------------------------------------------------
# Bessel J, fractional order
# ---------------------------------------------------------------------------

def _bessel_series(nu: float, x: np.ndarray) -> np.ndarray:
    """Ascending series for J_nu on |x| <= ~35, double-double inner loop."""
    x = np.asarray(x, dtype=float)
    zh, zl = _two_prod(x, x)
    zh, zl = _dd_div_f(zh, zl, 4.0)  # z = x^2/4, exactly rounded to DD

    term_h = np.ones_like(x)
    term_l = np.zeros_like(x)
    sum_h = np.ones_like(x)
    sum_l = np.zeros_like(x)
    m_min = float(np.max(x, initial=0.0)) / 2.0 + 4.0
    for m in range(300):
        th, tl = _dd_mul(term_h, term_l, -zh, -zl)
        th, tl = _dd_div_f(th, tl, float(m + 1))
        dh, dl = _two_sum(nu, float(m + 1))
        term_h, term_l = _dd_div_dd(th, tl, dh, dl)
        sum_h, sum_l = _dd_add(sum_h, sum_l, term_h, term_l)
        if m > m_min and np.all(np.abs(term_h) <= 1e-34 * np.abs(sum_h) + 1e-320):
            break

    with np.errstate(divide="ignore"):
        logpre = nu * np.log(x / 2.0) - math.lgamma(nu + 1.0)
    pre = np.exp(logpre)
    out = pre * (sum_h + sum_l)
    if nu == 0.0:
        out = np.where(x == 0.0, 1.0, out)
    else:
        out = np.where(x == 0.0, 0.0, out)
    return out


def _bessel_hankel(nu: float, x: np.ndarray) -> np.ndarray:
    """Hankel asymptotic expansion for J_nu, valid for x >> nu^2."""
    x = np.asarray(x, dtype=float)
    mu = 4.0 * nu * nu
    p_sum = np.ones_like(x)
    q_sum = np.zeros_like(x)
    term = np.ones_like(x)
    sign = 1.0
    for k in range(1, 26):
        term = term * (mu - (2 * k - 1) ** 2) / (8.0 * k * x)
        if k % 2 == 1:
            # odd k contributes to Q with sign (-1)^((k-1)/2)
            q_sum = q_sum + sign * term
        else:
            # even k contributes to P with sign (-1)^(k/2)
            sign = -sign
            p_sum = p_sum + sign * term
        if np.all(np.abs(term) < 1e-18):
            break
    chi = x - (0.5 * nu + 0.25) * math.pi
    return np.sqrt(2.0 / (math.pi * x)) * (p_sum * np.cos(chi) - q_sum * np.sin(chi))


def _bessel_miller_frac(nu: float, x: float) -> float:
    """Backward recurrence for fractional order, Neumann-series normalized.

    Used only in the corner 30 < x < nu^2 where neither the series nor the
    Hankel expansion is reliable.
    """
    nstart = int(x + 1.5 * math.sqrt(40.0 * max(x, nu)) + 40)
    jp = 0.0
    j = 1e-30
    out = 0.0
    norm = 0.0
    # Neumann normalization: sum_k (nu+2k) Gamma(nu+k)/k! * J_{nu+2k} = (x/2)^nu
    for k in range(nstart, 0, -1):
        order = nu + k
        jm = (2.0 * order / x) * j - jp
        jp, j = j, jm
        if abs(j) > 1e250:
            j *= 1e-250
            jp *= 1e-250
            out *= 1e-250
            norm *= 1e-250
        kk = k - 1
        if kk % 2 == 0:
            m = kk // 2
            w = math.exp(math.lgamma(nu + m) - math.lgamma(m + 1.0)) * (nu + 2 * m)
            norm += w * j
        if kk == 0:
            out = j
    target = math.exp(nu * math.log(x / 2.0))
    return out * target / norm


def bessel_j(nu: float, x) -> float | np.ndarray:
    """Bessel function of the first kind J_nu(x) for real order nu >= 0.

    Parameters
    ----------
    nu : float
        Order, nonnegative and finite.  Integer and fractional orders are
        both supported.
    x : float or ndarray
        Argument.  Negative arguments are allowed only for integer order
        (via the reflection J_n(-x) = (-1)^n J_n(x)).

    Returns
    -------
    float or ndarray
        J_nu(x), with relative accuracy ~1e-13 with respect to the
        oscillation envelope for |x| <= 1e4.
    """
    BesselOrder(nu)
    x_arr = np.asarray(x, dtype=float)
    scalar = x_arr.ndim == 0
    x_arr = np.atleast_1d(x_arr)
    if not np.all(np.isfinite(x_arr)):
        raise DomainError("x finite")

    if nu == round(nu):
        n = int(round(nu))
        signs = np.where((x_arr < 0) & (n % 2 == 1), -1.0, 1.0)
        out = bessel_jn_ladder(n, np.abs(x_arr))[n] * signs
        return float(out[0]) if scalar else out

    if np.any(x_arr < 0):
        raise DomainError("x >= 0 for non-integer nu")
    out = np.empty_like(x_arr)
    small = x_arr <= _SERIES_CUTOFF
    if np.any(small):
        out[small] = _bessel_series(nu, x_arr[small])
    big = ~small
    if np.any(big):
        if nu * nu <= _SERIES_CUTOFF:
            out[big] = _bessel_hankel(nu, x_arr[big])
        else:
            hank = x_arr >= nu * nu
            sel = big & hank
            if np.any(sel):
                out[sel] = _bessel_hankel(nu, x_arr[sel])
            for i in np.nonzero(big & ~hank)[0]:
                out[i] = _bessel_miller_frac(nu, float(x_arr[i]))
    return float(out[0]) if scalar else out


def bessel_jn_ladder(nmax: int, x) -> np.ndarray:
    """All integer-order values J_0(x)..J_nmax(x) in one backward recurrence.

    Parameters
    ----------
    nmax : int
        Largest order required (>= 0).
    x : float or 1d ndarray
        Argument(s); must be nonnegative (callers reflect if needed).

    Returns
    -------
    ndarray
        Shape ``(nmax+1,)`` for scalar ``x``, else ``(nmax+1, len(x))``.
    """
    if nmax < 0:
        raise DomainError("nmax >= 0")
    x_arr = np.asarray(x, dtype=float)
    scalar = x_arr.ndim == 0
    x_arr = np.atleast_1d(x_arr).copy()
    if np.any(x_arr < 0):
        raise DomainError("x >= 0")

    ncol = x_arr.size
    out = np.zeros((nmax + 1, ncol))
    zero = x_arr == 0.0
    xs = np.where(zero, 1.0, x_arr)  # dummy argument for the zero columns

    xmax = float(np.max(xs))
    mstart = int(max(nmax, math.ceil(xmax)) + 1.5 * math.sqrt(40.0 * max(xmax, nmax, 1.0)) + 40)
    jp = np.zeros(ncol)
    j = np.full(ncol, 1e-30)
    norm = np.zeros(ncol)
    for k in range(mstart, 0, -1):
        jm = (2.0 * k / xs) * j - jp
        jp, j = j, jm
        over = np.abs(j) > 1e250
        if np.any(over):
            j[over] *= 1e-250
            jp[over] *= 1e-250
            norm[over] *= 1e-250
            out[:, over] *= 1e-250
        kk = k - 1
        if kk <= nmax:
            out[kk] = j
        if kk > 0 and kk % 2 == 0:
            norm += 2.0 * j
    norm += j  # adds J_0 contribution: norm = J0 + 2*sum J_{2k}
    out /= norm
    out[:, zero] = 0.0
    out[0, zero] = 1.0
    return out[:, 0] if scalar else out


# ---------------------------------------------------------------------------
# Lambert W, principal branch
# ---------------------------------------------------------------------------

def lambert_w0(z: float) -> float:
    """Principal branch of the Lambert W function, w*exp(w) = z.

    Valid for z >= -1/e.  Halley iteration from a branch-appropriate initial
    guess; converges to relative residual ~1e-15 in a handful of steps.
    """
    z = float(z)
    if not math.isfinite(z):
        raise DomainError("z finite")
    if z < -math.exp(-1.0):
        raise DomainError("z >= -1/e")
    if z == 0.0:
        return 0.0

    if z > 3.0:
        l1 = math.log(z)
        l2 = math.log(l1)
        w = l1 - l2 + l2 / l1
    elif z > -0.25:
        w = z * (1.0 - z + 1.5 * z * z) if abs(z) < 0.4 else 0.5
    else:
        # near the branch point z = -1/e
        p = math.sqrt(2.0 * (math.e * z + 1.0))
        w = -1.0 + p - p * p / 3.0 + 11.0 * p ** 3 / 72.0

    for _ in range(60):
        ew = math.exp(w)
        f = w * ew - z
        wp1 = w + 1.0
        denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1)
        dw = f / denom
        w -= dw
        if abs(dw) <= 1e-16 * (abs(w) + 1e-300):
            break
    return w


# ---------------------------------------------------------------------------
# Chebyshev polynomials of the first kind
# ---------------------------------------------------------------------------

def chebyshev_t(k: int, x) -> float | np.ndarray:
    """T_k(x) by the three-term recurrence, elementwise on arrays."""
    if k < 0:
        raise DomainError("k >= 0")
    x_arr = np.asarray(x, dtype=float)
    if k == 0:
        return float(1.0) if x_arr.ndim == 0 else np.ones_like(x_arr)
    tm = np.ones_like(x_arr)
    t = x_arr.copy()
    for _ in range(k - 1):
        tm, t = t, 2.0 * x_arr * t - tm
    return float(t) if x_arr.ndim == 0 else t


def chebyshev_t_matrix(k: int, h: np.ndarray) -> np.ndarray:
    """T_k(H) for a square matrix H, by the matrix three-term recurrence."""
    if k < 0:
        raise DomainError("k >= 0")
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise DomainError("H square matrix")
    eye = np.eye(h.shape[0], dtype=h.dtype)
    if k == 0:
        return eye
    tm = eye
    t = h.copy()
    for _ in range(k - 1):
        tm, t = t, 2.0 * (h @ t) - tm
    return t
