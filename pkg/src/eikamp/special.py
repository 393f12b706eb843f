"""Special functions used by the closed-form Bessel-product integrals.

All three functions accept scalars or numpy arrays and are safe to call on
the node batches produced by the adaptive quadrature engine.

``bessel_j0`` follows the classic Cephes decomposition (Moshier 1989): a
zero-factored rational approximation on [0, 5] and the Hankel asymptotic
form with rational P, Q beyond 5.  Peak error is ~4e-16 absolute, far
inside the 1e-13 relative contract away from the zeros of J0.

``elliptic_k`` takes the MODULUS k, not the parameter m = k^2.  This is the
convention every closed form in :mod:`eikamp.besselprod` is written in;
mixing it up with scipy's ``ellipk(m)`` is the classic mistake the docstring
warns about.
"""

from __future__ import annotations

import numpy as np

from .exceptions import EikampError

__all__ = ["bessel_j0", "bessel_i0", "bessel_i0e", "elliptic_k"]

SQ2OPI = 7.9788456080286535587989e-1  # sqrt(2/pi)
PIO4 = 7.85398163397448309616e-1      # pi/4

# Rational coefficients, Cephes Math Library Release 2.1 (public constants).
# Interval [0, 5]: J0(x) = (w - DR1)(w - DR2) RP(w)/RQ(w), w = x^2, with
# DR1, DR2 the first two zeros of J0 squared.
_RP = np.array([
    -4.79443220978201773821e9,
    1.95617491946556577543e12,
    -2.49248344360967716204e14,
    9.70862251047306323952e15,
])
_RQ = np.array([  # leading coefficient 1.0 implicit
    4.99563147152651017219e2,
    1.73785401676374683123e5,
    4.84409658339962045305e7,
    1.11855537045356834862e10,
    2.11277520115489217587e12,
    3.10518229857422583814e14,
    3.18121955943204943306e16,
    1.71086294081043136091e18,
])
# Interval (5, inf): Hankel form sqrt(2/(pi x)) [P cos(x-pi/4) - (5/x) Q sin(x-pi/4)]
_PP = np.array([
    7.96936729297347051624e-4,
    8.28352392107440799803e-2,
    1.23953371646414299388e0,
    5.44725003058768775090e0,
    8.74716500199817011941e0,
    5.30324038235394892183e0,
    9.99999999999999997821e-1,
])
_PQ = np.array([
    9.24408810558863637013e-4,
    8.56288474354474431428e-2,
    1.25352743901058953537e0,
    5.47097740330417105182e0,
    8.76190883237069594232e0,
    5.30605288235394617618e0,
    1.00000000000000000218e0,
])
_QP = np.array([
    -1.13663838898469149931e-2,
    -1.28252718670509318512e0,
    -1.95539544257735972385e1,
    -9.32060152123768231369e1,
    -1.77681167980488050595e2,
    -1.47077505154951170175e2,
    -5.14105326766599330220e1,
    -6.05014350600728481186e0,
])
_QQ = np.array([  # leading coefficient 1.0 implicit
    6.43178256118178023184e1,
    8.56430025976980587198e2,
    3.88240183605401609683e3,
    7.24046774195652478189e3,
    5.93072701187316984827e3,
    2.06209331660327847417e3,
    2.42005740240291393179e2,
])
_DR1 = 5.78318596294678452118e0
_DR2 = 3.04712623436620863991e1

# Seam between the power-series and asymptotic branches of I0.  Below it the
# all-positive Maclaurin series has condition number 1; above it the
# asymptotic series bottoms out below 1e-15 relative.
_I0_SERIES_CUT = 20.0
# exp(x) overflows float64 a little above 709.
_I0_OVERFLOW = 700.0

# Switch K(k) to its logarithmic asymptotic when 1 - k^2 < this; the AGM
# still converges there but the asymptotic is cheaper and avoids losing
# digits in 1 - k^2 underflow territory.
K_NEAR_ONE_CROSSOVER = 1e-12


def _polevl(x, coef):
    ans = np.full_like(x, coef[0])
    for c in coef[1:]:
        ans = ans * x + c
    return ans


def _p1evl(x, coef):
    # Leading coefficient 1.0 implicit.
    ans = x + coef[0]
    for c in coef[1:]:
        ans = ans * x + c
    return ans


def _as_array(x):
    arr = np.asarray(x, dtype=float)
    return arr, arr.ndim == 0


def bessel_j0(x):
    """Bessel function of the first kind, order zero.

    Parameters
    ----------
    x : float or ndarray
        Finite argument(s).  J0 is even, so the sign is dropped.

    Returns
    -------
    float or ndarray
        J0(x); relative accuracy <= 1e-13 for |x| <= 1e4 away from the
        zeros of J0 (absolute ~4e-16 everywhere), degrading gracefully
        beyond as the trigonometric phase loses significance.

    Raises
    ------
    EikampError
        Only for non-finite input.
    """
    arr, scalar = _as_array(x)
    if not np.all(np.isfinite(arr)):
        raise EikampError("bessel_j0: argument must be finite")
    ax = np.abs(arr)
    out = np.empty_like(ax)

    small = ax <= 5.0
    if np.any(small):
        z = ax[small] ** 2
        p = (z - _DR1) * (z - _DR2)
        out[small] = p * _polevl(z, _RP) / _p1evl(z, _RQ)
    large = ~small
    if np.any(large):
        xl = ax[large]
        w = 5.0 / xl
        q = w * w
        p = _polevl(q, _PP) / _polevl(q, _PQ)
        qf = _polevl(q, _QP) / _p1evl(q, _QQ)
        # cos(x - pi/4), sin(x - pi/4) expanded through cos x, sin x: forming
        # x - pi/4 first loses ulp(x) of phase for x in the thousands.
        c, s = np.cos(xl), np.sin(xl)
        cos_xn = (c + s) / np.sqrt(2.0)
        sin_xn = (s - c) / np.sqrt(2.0)
        out[large] = SQ2OPI * (p * cos_xn - w * qf * sin_xn) / np.sqrt(xl)

    return float(out) if scalar else out


def bessel_i0(x):
    """Modified Bessel function of the first kind, order zero.

    Power series for |x| <= 20 (all terms positive, no cancellation),
    asymptotic expansion e^x/sqrt(2 pi x) * sum a_k/x^k beyond.

    Raises
    ------
    EikampError
        If |x| > 700, where e^x overflows float64.  Callers needing the
        large-argument regime should use :func:`bessel_i0e` and carry the
        exponent themselves.
    """
    arr, scalar = _as_array(x)
    ax = np.abs(arr)
    if np.any(ax > _I0_OVERFLOW):
        raise EikampError(
            f"bessel_i0: |x| > {_I0_OVERFLOW:g} overflows; use bessel_i0e")
    out = _i0e_core(ax) * np.exp(ax)
    return float(out) if scalar else out


def bessel_i0e(x):
    """Exponentially scaled modified Bessel function, e^{-|x|} I0(x).

    Safe for arbitrarily large |x|; used by the Weber integral in log space.
    """
    arr, scalar = _as_array(x)
    out = _i0e_core(np.abs(arr))
    return float(out) if scalar else out


def _i0e_core(ax):
    out = np.empty_like(ax)
    small = ax <= _I0_SERIES_CUT
    if np.any(small):
        z = ax[small]
        q = 0.25 * z * z
        term = np.ones_like(z)
        acc = np.ones_like(z)
        # q <= 100 -> converged well before m = 60
        for m in range(1, 61):
            term = term * q / (m * m)
            acc += term
        out[small] = acc * np.exp(-z)
    large = ~small
    if np.any(large):
        z = ax[large]
        # I0(z) ~ e^z/sqrt(2 pi z) sum_k prod_j (2j-1)^2 / (k! 8^k z^k);
        # at z = 20 the smallest term is ~4e-18, well converged by k = 12.
        acc = np.ones_like(z)
        coeff = 1.0
        zk = np.ones_like(z)
        for k in range(1, 13):
            coeff *= (2 * k - 1) ** 2 / (8.0 * k)
            zk = zk * z
            acc = acc + coeff / zk
        out[large] = acc / np.sqrt(2.0 * np.pi * z)
    return out


def elliptic_k(k):
    """Complete elliptic integral of the first kind, K(k).

    CONVENTION: the argument is the MODULUS k, i.e.

        K(k) = integral_0^{pi/2} dtheta / sqrt(1 - k^2 sin^2 theta),

    NOT the parameter m = k^2 used by scipy.special.ellipk.  K(0) = pi/2
    exactly; K is strictly increasing; K(k) -> log(4/sqrt(1-k^2)) as k -> 1.

    Evaluated by the arithmetic-geometric mean, K = pi/(2 AGM(1, k')),
    k' = sqrt(1-k^2); for 1-k^2 < 1e-12 the logarithmic asymptotic is used
    (relative error there < 3e-13, dominated by the dropped (1-k^2)/4 log
    correction).

    Raises
    ------
    EikampError
        For k < 0 or k >= 1 (the integral diverges at k = 1).
    """
    arr, scalar = _as_array(k)
    if np.any(arr < 0.0) or np.any(arr >= 1.0):
        raise EikampError("elliptic_k: modulus must satisfy 0 <= k < 1 "
                          "(argument is the modulus k, not the parameter m = k^2)")
    out = _elliptic_k_core(arr)
    return float(out) if scalar else out


def _elliptic_k_core(k):
    """AGM evaluation without domain checks; k array in [0, 1)."""
    # (1-k)(1+k) keeps precision for k near 1 better than 1 - k*k.
    m1 = (1.0 - k) * (1.0 + k)
    out = np.empty_like(k)
    near1 = m1 < K_NEAR_ONE_CROSSOVER
    if np.any(near1):
        out[near1] = np.log(4.0 / np.sqrt(m1[near1]))
    rest = ~near1
    if np.any(rest):
        a = np.ones_like(k[rest])
        b = np.sqrt(m1[rest])
        # Quadratic convergence; 12 iterations cover the worst case
        # b0 ~ 1e-6 from the crossover above with margin.
        for _ in range(12):
            a, b = 0.5 * (a + b), np.sqrt(a * b)
        out[rest] = np.pi / (2.0 * a)
    return out
