"""Shared reference computations for the test suite.

Everything here is intentionally independent of the package's production
code paths: direct power series for the special functions, scipy
quadrature of defining integrals, and a scan-plus-bisection resolver for
the raw support indicator of the triple-kernel region.  Where a helper
does lean on package internals it says so explicitly.
"""

import math

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import integrate as sp_integrate


# ---------------------------------------------------------------------------
# series / definition oracles for special functions
# ---------------------------------------------------------------------------

def j0_series(x, terms=50):
    """Maclaurin J0(x) = sum (-x^2/4)^m / (m!)^2; accurate for |x| <= ~12."""
    q = -0.25 * x * x
    term = 1.0
    acc = 1.0
    for m in range(1, terms):
        term *= q / (m * m)
        acc += term
    return acc


def i0_series(x, terms=60):
    """Power series I0(x) = sum (x^2/4)^m / (m!)^2."""
    q = 0.25 * x * x
    term = 1.0
    acc = 1.0
    for m in range(1, terms):
        term *= q / (m * m)
        acc += term
    return acc


def k_by_definition(k):
    """K(k) by adaptive quadrature of the defining theta integral."""
    val, _ = sp_integrate.quad(
        lambda th: 1.0 / math.sqrt(1.0 - (k * math.sin(th)) ** 2),
        0.0, 0.5 * math.pi, epsabs=1e-14, epsrel=1e-13, limit=200)
    return val


# ---------------------------------------------------------------------------
# raw-indicator region of the A3 triple integral
# ---------------------------------------------------------------------------

def theta_argument(x1, x2, x3):
    """The raw support argument ((x3+1)^2 - x2^2)(x1^2 - (x3-1)^2).

    The constrained region is where this product is positive; no use is
    made of the five-block case analysis.
    """
    return ((x3 + 1.0) ** 2 - x2 * x2) * (x1 * x1 - (x3 - 1.0) ** 2)


def x3_support_segments(x1, x2, x3_hi, n_scan=401, iters=60):
    """Numerically resolve {x3 in [0, x3_hi] : theta_argument > 0}.

    Dense sign scan followed by bisection on each sign flip; returns a
    list of (lo, hi) segments.  Endpoint signs are sampled slightly
    inside the range.
    """
    if x3_hi <= 0.0:
        return []
    grid = np.linspace(0.0, x3_hi, n_scan)
    grid[0] += 1e-12 * x3_hi
    grid[-1] -= 1e-12 * x3_hi
    sign = np.sign(theta_argument(x1, x2, grid))
    sign[sign == 0.0] = 1.0
    flips = np.nonzero(sign[:-1] * sign[1:] < 0)[0]
    roots = []
    for i in flips:
        lo, hi = grid[i], grid[i + 1]
        flo = theta_argument(x1, x2, lo)
        for _ in range(iters):
            mid = 0.5 * (lo + hi)
            fm = theta_argument(x1, x2, mid)
            if flo * fm <= 0.0:
                hi = mid
            else:
                lo, flo = mid, fm
        roots.append(0.5 * (lo + hi))
    edges = [0.0] + roots + [x3_hi]
    segments = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        mid = 0.5 * (lo + hi)
        if hi > lo and theta_argument(x1, x2, mid) > 0.0:
            segments.append((lo, hi))
    return segments


def indicator_integral(inner_on_segments, x1_max, epsabs=1e-10, epsrel=1e-9):
    """Integral over {0 <= x2 <= x1 <= x1_max} of an inner x3 reduction.

    ``inner_on_segments(x1, x2, segments)`` receives the numerically
    resolved positive-indicator x3 segments on [0, x1 + 1] and returns
    the inner x3 integral.  The outer double integral runs through scipy
    with interior kinks at x1 = 1, 2 and x2 = 1 passed as points.
    """

    def inner(x2, x1):
        segs = x3_support_segments(x1, x2, x1 + 1.0)
        return inner_on_segments(x1, x2, segs)

    def outer(x1):
        pts = [p for p in (1.0,) if 0.0 < p < x1]
        val, _ = sp_integrate.quad(inner, 0.0, x1, args=(x1,),
                                   epsabs=epsabs * 0.1, epsrel=epsrel * 0.1,
                                   limit=200, points=pts or None)
        return val

    pts = [p for p in (1.0, 2.0) if 0.0 < p < x1_max]
    val, _ = sp_integrate.quad(outer, 0.0, x1_max, epsabs=epsabs,
                               epsrel=epsrel, limit=200, points=pts or None)
    return val


def modulus_one_points(xp, xm, lo, hi, n_scan=257):
    """x3 roots of Delta4^2(xp, xm, x3, 1) - xp*xm*x3 on (lo, hi).

    Locates the log-singular points of the kernel for the indicator-form
    oracle.  Self-contained: uses the discriminant's factored definition
    directly rather than the production classifier.
    """
    if hi <= lo:
        return []

    def phi(x3):
        a, b, c, d = xp, xm, x3, 1.0
        sixteen = (((c + d) ** 2 - (a - b) ** 2)
                   * ((a + b) ** 2 - (c - d) ** 2))
        return sixteen / 16.0 - a * b * c * d

    grid = np.linspace(lo + 1e-12 * (hi - lo), hi - 1e-12 * (hi - lo), n_scan)
    vals = phi(grid)
    sign = np.sign(vals)
    sign[sign == 0.0] = 1.0
    flips = np.nonzero(sign[:-1] * sign[1:] < 0)[0]
    roots = []
    for i in flips:
        a, b = grid[i], grid[i + 1]
        fa = phi(a)
        for _ in range(60):
            mid = 0.5 * (a + b)
            fm = phi(mid)
            if fa * fm <= 0.0:
                b = mid
            else:
                a, fa = mid, fm
        roots.append(0.5 * (a + b))
    return roots


def gauss_panels(edges, order=24):
    """Gauss-Legendre nodes/weights tiled over consecutive panel edges."""
    nodes, weights = leggauss(order)
    xs, ws = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        half = 0.5 * (hi - lo)
        xs.append(0.5 * (lo + hi) + half * nodes)
        ws.append(half * weights)
    return np.concatenate(xs), np.concatenate(ws)
