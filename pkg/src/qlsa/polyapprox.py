"""Polynomial machinery for Hamiltonian simulation and eigenstate filtering.

Covers the truncated Chebyshev/Bessel expansion of exp(-i*tau*x) with its
Lambert-W truncation-order formula, the three-fold robust oblivious
amplitude amplification combination, and the Chebyshev-ratio filter
polynomial, on scalars and on Hermitian matrix arguments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SpectrumError
from .special import bessel_jn_ladder, chebyshev_t, lambert_w0

# prefactor of the factorial tail bound 4|tau|^r/(2^r r!) <= c * (e|tau|/2r)^r
TRUNCATION_C = 4.0 / (math.sqrt(2.0 * math.pi) * math.exp(1.0 / 13.0))  # ~1.47762

FILTER_GAP_MAX = 1.0 / math.sqrt(12.0)


@dataclass(frozen=True)
class TruncationSpec:
    """Truncation order r for approximating exp(-i*tau*x) on [-1, 1]."""

    tau: float
    delta: float
    r: int

    def __post_init__(self) -> None:
        if not (0.0 < self.delta < 1.0):
            raise DomainError("delta in (0, 1)")
        if self.r < max(abs(self.tau) * math.e / 2.0, abs(self.tau) + 1.0):
            raise DomainError("r >= max(|tau| e/2, |tau|+1)")


def truncation_order(tau: float, delta: float) -> int:
    """Exact truncation order via the Lambert-W closed form.

    Smallest certified order r = ceil((|tau| e/2) exp(W(2 log(c/delta)/(|tau| e))))
    such that the dropped Bessel tail keeps the uniform error below delta;
    the result also satisfies r >= |tau| + 1, required by the tail bound.
    """
    if not (0.0 < delta < 1.0):
        raise DomainError("delta in (0, 1)")
    at = abs(tau)
    if at == 0.0:
        raise DomainError("tau != 0")
    half_e_tau = at * math.e / 2.0
    z = math.log(TRUNCATION_C / delta) / half_e_tau
    r = half_e_tau * math.exp(lambert_w0(z))
    return int(math.ceil(max(r, at + 1.0)))


def truncation_order_bound(tau: float, delta: float) -> int:
    """Analytic upper bound ceil(|tau| e/2 + log(c/delta)); >= truncation_order."""
    if not (0.0 < delta < 1.0):
        raise DomainError("delta in (0, 1)")
    at = abs(tau)
    if at == 0.0:
        raise DomainError("tau != 0")
    return int(math.ceil(max(at * math.e / 2.0 + math.log(TRUNCATION_C / delta), at + 1.0)))


def truncation_spec(tau: float, delta: float) -> TruncationSpec:
    return TruncationSpec(tau=tau, delta=delta, r=truncation_order(tau, delta))


def _expansion_coeffs(tau: float, r: int) -> np.ndarray:
    """Chebyshev coefficients a_k of the order-(r-1) expansion of exp(-i tau x).

    a_0 = J_0(tau), a_k = 2 (-i)^k J_k(tau) sign(tau)^k for k >= 1 (J_k(-t) =
    (-1)^k J_k(t) folds the sign of tau into the phase).
    """
    j = bessel_jn_ladder(max(r - 1, 0), abs(tau))
    k = np.arange(r)
    coeff = j * (-1j) ** k * np.sign(tau) ** k if tau < 0 else j * (-1j) ** k
    coeff = coeff.astype(complex)
    coeff[1:] *= 2.0
    return coeff


def _clenshaw(coeff: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Clenshaw recurrence for sum_k coeff[k] T_k(x), elementwise in x."""
    b1 = np.zeros_like(x, dtype=complex)
    b2 = np.zeros_like(x, dtype=complex)
    for a in coeff[:0:-1]:
        b1, b2 = a + 2.0 * x * b1 - b2, b1
    return coeff[0] + x * b1 - b2


def jacobi_anger_truncation(x, tau: float, r: int):
    """Truncated expansion C(x) - i S(x) of exp(-i*tau*x) on [-1, 1].

    C keeps the even-order Chebyshev terms through order r-1 and S the odd
    ones; both are evaluated together by a single complex Clenshaw recurrence.
    """
    x_arr = np.asarray(x, dtype=float)
    scalar = x_arr.ndim == 0
    x_arr = np.atleast_1d(x_arr)
    if np.any(np.abs(x_arr) > 1.0 + 1e-12):
        raise DomainError("|x| <= 1")
    if r < 1 or tau == 0.0:
        out = np.ones_like(x_arr, dtype=complex)
        return complex(out[0]) if scalar else out
    out = _clenshaw(_expansion_coeffs(tau, r), x_arr)
    return complex(out[0]) if scalar else out


def _check_hermitian_contraction(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise DomainError("H square matrix")
    if not np.allclose(h, h.conj().T, atol=1e-12):
        raise SpectrumError("H Hermitian")
    evals, evecs = np.linalg.eigh(h)
    if np.max(np.abs(evals)) > 1.0 + 1e-10:
        raise SpectrumError("||H|| <= 1")
    return evals, evecs


def oaa_scalar_map(evals: np.ndarray, tau: float, delta: float) -> np.ndarray:
    """Eigenvalue action of the amplified truncated-expansion block.

    For each eigenvalue x of a Hermitian contraction, returns
    (3/s) l(x) - (4/s^3) |l(x)|^2 l(x) with l the truncated expansion of
    exp(-i tau x) at order truncation_order(tau, delta) and s = 2(1+delta).
    """
    s = 2.0 * (1.0 + delta)
    if tau == 0.0:
        return np.full_like(np.asarray(evals, dtype=float), 3.0 / s - 4.0 / s ** 3,
                            dtype=complex)
    r = truncation_order(tau, delta)
    lam = jacobi_anger_truncation(np.clip(evals, -1.0, 1.0), tau, r)
    return (3.0 / s) * lam - (4.0 / s ** 3) * np.abs(lam) ** 2 * lam


def oaa_operator(h: np.ndarray, tau: float, delta: float, method: str = "eig") -> np.ndarray:
    """Emulated Hamiltonian-simulation block M with ||M - exp(-i H tau)|| <= 2*delta.

    Builds the truncated expansion L = C(H) - i S(H) at order
    truncation_order(tau, delta) and applies the three-fold amplification
    combination M = (3/s) L - (4/s^3) L L^dag L with s = 2(1+delta), exactly
    mirroring what the quantum circuit realizes after post-selection.

    ``method="eig"`` applies the scalar polynomial to the eigenvalues;
    ``method="clenshaw"`` runs the recurrence on the matrix itself (slower,
    used as a cross-check at small dimensions).
    """
    if not (0.0 < delta < 0.1):
        raise DomainError("delta in (0, 0.1)")
    evals, evecs = _check_hermitian_contraction(h)
    s = 2.0 * (1.0 + delta)
    if method == "eig":
        m = oaa_scalar_map(evals, tau, delta)
        return (evecs * m) @ evecs.conj().T
    if tau == 0.0:
        scale = 3.0 / s - 4.0 / s ** 3
        return scale * np.eye(h.shape[0], dtype=complex)
    r = truncation_order(tau, delta)
    if method == "clenshaw":
        coeff = _expansion_coeffs(tau, r)
        h_c = np.asarray(h, dtype=complex)
        eye = np.eye(h_c.shape[0], dtype=complex)
        b1 = np.zeros_like(h_c)
        b2 = np.zeros_like(h_c)
        for a in coeff[:0:-1]:
            b1, b2 = a * eye + 2.0 * (h_c @ b1) - b2, b1
        big_l = coeff[0] * eye + h_c @ b1 - b2
        return (3.0 / s) * big_l - (4.0 / s ** 3) * (big_l @ big_l.conj().T @ big_l)
    raise DomainError("method in {'eig', 'clenshaw'}")


# ---------------------------------------------------------------------------
# eigenstate filter
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FilterSpec:
    """Half-degree l, gap Delta and error target of the Chebyshev-ratio filter."""

    l: int
    capital_delta: float
    eps_p: float

    def __post_init__(self) -> None:
        if not (0.0 < self.capital_delta <= FILTER_GAP_MAX):
            raise DomainError("Delta in (0, 1/sqrt(12)]")
        if not (0.0 < self.eps_p < 1.0):
            raise DomainError("eps_p in (0, 1)")
        if 2 * self.l < (1.0 / self.capital_delta) * math.log(2.0 / self.eps_p) - 1.0:
            raise DomainError("2l >= (1/Delta) log(2/eps_p) - 1")


def filter_query_count(alpha_h: float, capital_delta: float, eps_p: float) -> int:
    """Query count ceil((alpha_H/Delta) log(2/eps_p)) of the degree-2l filter."""
    if not (0.0 < eps_p < 1.0):
        raise DomainError("eps_p in (0, 1)")
    if not (0.0 < capital_delta <= FILTER_GAP_MAX):
        raise DomainError("Delta in (0, 1/sqrt(12)]")
    return int(math.ceil(alpha_h / capital_delta * math.log(2.0 / eps_p)))


def filter_spec_for_gap(capital_delta: float, eps_p: float, alpha_h: float = 1.0) -> FilterSpec:
    """Spec with the smallest even degree 2l covering the required query count."""
    count = filter_query_count(alpha_h, capital_delta, eps_p)
    return FilterSpec(l=(count + 1) // 2, capital_delta=capital_delta, eps_p=eps_p)


def _log_cosh(y: float) -> float:
    # log(cosh(y)) without overflow
    ay = abs(y)
    return ay + math.log1p(math.exp(-2.0 * ay)) - math.log(2.0)


def filter_value(x, spec: FilterSpec):
    """Chebyshev-ratio filter R_{2l}(x, Delta) on [-1, 1].

    Equals T_l(-1 + 2 (x^2 - Delta^2)/(1 - Delta^2)) over its value at x = 0;
    the denominator (and the numerator for |x| < Delta, where the Chebyshev
    argument leaves [-1, 1]) is evaluated in log-cosh form so that large
    degrees neither overflow nor lose the ratio.
    """
    x_arr = np.asarray(x, dtype=float)
    scalar = x_arr.ndim == 0
    x_arr = np.atleast_1d(x_arr)
    if np.any(np.abs(x_arr) > 1.0 + 1e-12):
        raise DomainError("|x| <= 1")
    l, d = spec.l, spec.capital_delta
    one_m = 1.0 - d * d
    dp = 2.0 * (d * d - 0.0) / one_m
    # denominator T_l(-1 - dp) = (-1)^l cosh(l * log(1 + dp + sqrt(2 dp + dp^2)))
    log_den = _log_cosh(l * math.log1p(dp + math.sqrt(2.0 * dp + dp * dp)))
    # excess = -1 - y >= -2; y leaves [-1, 1] only on the left (|x| < Delta),
    # and at x = 0 the excess equals dp bit-for-bit, making R(0) = 1 exact.
    excess = 2.0 * (d * d - x_arr * x_arr) / one_m
    out = np.empty_like(x_arr)
    inside = excess <= 0.0
    if np.any(inside):
        tl = chebyshev_t(l, -1.0 - excess[inside])
        out[inside] = (-1.0) ** l * np.asarray(tl) * math.exp(-log_den)
    if np.any(~inside):
        e = excess[~inside]
        # T_l(-1-e) = (-1)^l cosh(l * log(1 + e + sqrt(2e + e^2))); the (-1)^l
        # signs of numerator and denominator cancel in the ratio
        log_num = l * np.log1p(e + np.sqrt(2.0 * e + e * e))
        out[~inside] = np.exp(log_num + np.log1p(np.exp(-2.0 * log_num)) - math.log(2.0) - log_den)
    return float(out[0]) if scalar else out


def filter_matrix(h: np.ndarray, spec: FilterSpec) -> np.ndarray:
    """R_{2l}(H, Delta) via eigendecomposition of the Hermitian argument H."""
    evals, evecs = _check_hermitian_contraction(h)
    vals = filter_value(np.clip(evals, -1.0, 1.0), spec)
    return (evecs * vals) @ evecs.conj().T
