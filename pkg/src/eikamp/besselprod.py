"""Closed forms for moment integrals of products of Bessel functions.

The central objects are

    F_n(a_1..a_n) = int_0^inf x J0(a_1 x) ... J0(a_n x) dx

for n = 3..6.  F3 and F4 have algebraic/elliptic closed forms governed by
the quadrilateral invariant Delta^2; F5 and F6 reduce to low-dimensional
quadratures over F3 and F4.  All F_n vanish when one parameter exceeds the
sum of the others (the "polygon inequality" support rule), and F3/F4 have
branch boundaries where the closed forms jump or diverge, classified here
with an explicit tolerance so callers never silently evaluate on a
boundary.

Scalar entry points validate and raise on boundaries; the vectorized
``*_values`` helpers are branch-safe (boundary windows evaluate the nearest
branch with a clamped modulus) and exist for quadrature integrands, where
nodes never coincide with a boundary but may come arbitrarily close.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .exceptions import BoundaryCaseError
from .quadrature import IntegralResult, QuadratureConfig, _solve_batched
from .special import _elliptic_k_core, bessel_i0e

__all__ = [
    "Branch",
    "BranchReport",
    "delta3_sq",
    "delta4_sq",
    "delta4_sq_four_factor",
    "f3_eval",
    "f4_classify",
    "f4_eval",
    "g_kernel",
    "f5_eval",
    "f5_eval_symmetric",
    "f6_eval",
    "f6_eval_chain",
    "weber_integral",
    "smeared_delta_kernel",
]

# Relative half-width of the boundary window: |Delta^2 - threshold| within
# this (normalized by max(|Delta^2|, |threshold|, 1)) counts as ON the
# boundary and is an error for the scalar evaluators.
BOUNDARY_REL_TOL = 1e-12

_PI2 = math.pi * math.pi
# Hard clamp for elliptic moduli inside vectorized integrands; K(1-1e-16)
# is ~19, large but finite and integrable.
_MODULUS_CLAMP = 1.0 - 1e-16


class Branch(Enum):
    SUPER = "super"        # Delta^2 > abcd: K(sqrt(abcd)/Delta)/(pi^2 Delta)
    SUB = "sub"            # 0 < Delta^2 < abcd: K(Delta/sqrt(abcd))/(pi^2 sqrt(abcd))
    BOUNDARY = "boundary"  # Delta^2 = 0 (jump value) or Delta^2 = abcd (undefined)
    VANISH = "vanish"      # Delta^2 < 0: integral is zero


@dataclass(frozen=True)
class BranchReport:
    """Classification of a 4-parameter configuration.

    ``boundary_kind`` distinguishes the two boundaries lumped under
    BOUNDARY: "zero" (Delta^2 = 0, where the closed form takes the finite
    jump value) and "modulus_one" (Delta^2 = abcd, where the elliptic
    modulus reaches 1 and the value is not defined).
    """

    delta_sq: float
    product_abcd: float
    branch: Branch
    boundary_kind: str | None = None


def _check_positive(names, *vals):
    for n, v in zip(names.split(), vals):
        if not (v > 0.0) or not math.isfinite(v):
            raise ValueError(f"{n} must be positive and finite, got {v!r}")


def _near(x, thr):
    return abs(x - thr) <= BOUNDARY_REL_TOL * max(abs(x), abs(thr), 1.0)


def delta3_sq(a, b, c):
    """Triangle invariant: 16 Delta3^2 = [c^2-(a-b)^2][(a+b)^2-c^2].

    Delta3 is the area of a triangle with sides a, b, c when one exists;
    Delta3^2 < 0 means no triangle closes.  Arguments are sorted first, so
    the result is bitwise identical under permutations.
    """
    for v in (a, b, c):
        if not (v >= 0.0) or not math.isfinite(v):
            raise ValueError("sides must be nonnegative and finite")
    a, b, c = sorted((float(a), float(b), float(c)))
    return (c * c - (a - b) ** 2) * ((a + b) ** 2 - c * c) / 16.0


def delta4_sq(a, b, c, d):
    """Quadrilateral invariant in factored form:

        16 Delta4^2 = [(c+d)^2 - (a-b)^2] [(a+b)^2 - (c-d)^2]

    evaluated on sorted arguments, so permutations give bitwise identical
    results; reduces to delta3_sq at d = 0.  The factored grouping is
    better conditioned near the boundaries than expanding the product.
    """
    for v in (a, b, c, d):
        if not (v >= 0.0) or not math.isfinite(v):
            raise ValueError("parameters must be nonnegative and finite")
    a, b, c, d = sorted((float(a), float(b), float(c), float(d)))
    return ((c + d) ** 2 - (a - b) ** 2) * ((a + b) ** 2 - (c - d) ** 2) / 16.0


def delta4_sq_four_factor(a, b, c, d):
    """Same invariant as the product of the four signed sums:

        16 Delta4^2 = (a+b+c-d)(a+b+d-c)(a+c+d-b)(b+c+d-a).

    Exposed so tests can confirm both algebraic forms agree.
    """
    for v in (a, b, c, d):
        if not (v >= 0.0) or not math.isfinite(v):
            raise ValueError("parameters must be nonnegative and finite")
    a, b, c, d = sorted((float(a), float(b), float(c), float(d)))
    s = a + b + c + d
    return ((s - 2 * d) * (s - 2 * c) * (s - 2 * b) * (s - 2 * a)) / 16.0


def f3_eval(a, b, c):
    """F3(a,b,c) = 1/(2 pi Delta3) for Delta3^2 > 0, 0 for Delta3^2 < 0.

    Raises BoundaryCaseError on the degenerate triangle Delta3^2 = 0,
    where the integral diverges.
    """
    _check_positive("a b c", a, b, c)
    d2 = delta3_sq(a, b, c)
    if _near(d2, 0.0):
        raise BoundaryCaseError(
            f"F3 divergent: degenerate triangle, Delta3^2 = {d2:.3e}")
    if d2 < 0.0:
        return 0.0
    return 1.0 / (2.0 * math.pi * math.sqrt(d2))


def f4_classify(a, b, c, d):
    """Classify (a,b,c,d) into the F4 branch table with explicit
    boundary windows (relative half-width 1e-12)."""
    _check_positive("a b c d", a, b, c, d)
    d2 = delta4_sq(a, b, c, d)
    pr = float(a) * float(b) * float(c) * float(d)
    if _near(d2, pr):
        return BranchReport(d2, pr, Branch.BOUNDARY, "modulus_one")
    if _near(d2, 0.0):
        return BranchReport(d2, pr, Branch.BOUNDARY, "zero")
    if d2 < 0.0:
        return BranchReport(d2, pr, Branch.VANISH)
    if d2 > pr:
        return BranchReport(d2, pr, Branch.SUPER)
    return BranchReport(d2, pr, Branch.SUB)


def _f4_from_report(rep):
    if rep.branch is Branch.VANISH:
        return 0.0
    if rep.branch is Branch.BOUNDARY:
        if rep.boundary_kind == "zero":
            # finite jump value on the Delta4^2 = 0 line (the limit from
            # inside the support)
            return 1.0 / (2.0 * math.pi * math.sqrt(rep.product_abcd))
        raise BoundaryCaseError(
            "F4 not defined at Delta4^2 = abcd (elliptic modulus 1): "
            f"Delta4^2 = {rep.delta_sq:.6e}")
    if rep.branch is Branch.SUPER:
        delta = math.sqrt(rep.delta_sq)
        k = math.sqrt(rep.product_abcd) / delta
        return float(_elliptic_k_core(np.float64(k))) / (_PI2 * delta)
    root = math.sqrt(rep.product_abcd)
    k = math.sqrt(rep.delta_sq) / root
    return float(_elliptic_k_core(np.float64(k))) / (_PI2 * root)


def f4_eval(a, b, c, d):
    """F4(a,b,c,d) by the elliptic branch table.

    SUPER (Delta4^2 > abcd):  K(sqrt(abcd)/Delta4) / (pi^2 Delta4)
    SUB (0 < Delta4^2 < abcd): K(Delta4/sqrt(abcd)) / (pi^2 sqrt(abcd))
    Delta4^2 = 0:              1/(2 pi sqrt(abcd))   (jump value)
    Delta4^2 < 0:              0

    Raises BoundaryCaseError at Delta4^2 = abcd, where the modulus reaches
    1 and the closed form diverges.
    """
    return _f4_from_report(f4_classify(a, b, c, d))


def g_kernel(x, xp, xpp):
    """Angular kernel G(x, x', x''): the same branch table as F4 with the
    fourth parameter equal to 1, i.e. G = F4(x, x', x'', 1) wherever both
    are defined, but with zeros allowed in the first three slots.

    With A^2 the quadrilateral invariant of (x, x', x'', 1) and
    B = x x' x'': K(sqrt(B)/A)/(pi^2 A) for A^2 > B,
    K(A/sqrt(B))/(pi^2 sqrt(B)) for 0 <= A^2 < B, 0 for A^2 < 0.
    """
    for v in (x, xp, xpp):
        if not (v >= 0.0) or not math.isfinite(v):
            raise ValueError("kernel arguments must be nonnegative and finite")
    a_sq = delta4_sq(x, xp, xpp, 1.0)
    b = float(x) * float(xp) * float(xpp)
    if _near(a_sq, b):
        raise BoundaryCaseError(
            f"kernel not defined at A^2 = B (modulus 1): A^2 = {a_sq:.6e}")
    if a_sq < 0.0:
        return 0.0
    if a_sq > b:
        amp = math.sqrt(a_sq)
        return float(_elliptic_k_core(np.float64(math.sqrt(b) / amp))) / (_PI2 * amp)
    root = math.sqrt(b)
    return float(_elliptic_k_core(np.float64(math.sqrt(a_sq) / root))) / (_PI2 * root)


# ---------------------------------------------------------------------------
# vectorized branch-safe evaluators (quadrature integrand internals)
# ---------------------------------------------------------------------------

def _delta4_sq_values(a, b, c, d):
    """Factored-form invariant, broadcasting, no canonical sorting."""
    return (((c + d) ** 2 - (a - b) ** 2) * ((a + b) ** 2 - (c - d) ** 2)) / 16.0


def _f3_values(a, b, c):
    """Vectorized F3; inputs broadcast.  0 outside support, no boundary
    errors (nodes close to a boundary see the genuine 1/Delta3 growth)."""
    a, b, c = np.broadcast_arrays(*(np.asarray(v, float) for v in (a, b, c)))
    d2 = ((c * c - (a - b) ** 2) * ((a + b) ** 2 - c * c)) / 16.0
    out = np.zeros_like(d2)
    pos = d2 > 0.0
    out[pos] = 1.0 / (2.0 * math.pi * np.sqrt(d2[pos]))
    return out


def _f4_values(a, b, c, d):
    """Vectorized F4; inputs broadcast.  Boundary windows evaluate the
    nearest branch with the elliptic modulus clamped below 1."""
    a, b, c, d = np.broadcast_arrays(*(np.asarray(v, float) for v in (a, b, c, d)))
    d2 = _delta4_sq_values(a, b, c, d)
    pr = a * b * c * d
    out = np.zeros(d2.shape, dtype=float)

    sup = d2 > pr
    if sup.any():
        delta = np.sqrt(d2[sup])
        k = np.sqrt(np.minimum(pr[sup] / d2[sup], _MODULUS_CLAMP))
        out[sup] = _elliptic_k_core(k) / (_PI2 * delta)
    sub = (d2 >= 0.0) & ~sup
    if sub.any():
        root = np.sqrt(pr[sub])
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(pr[sub] > 0.0, d2[sub] / pr[sub], 0.0)
        k = np.sqrt(np.minimum(ratio, _MODULUS_CLAMP))
        out[sub] = _elliptic_k_core(k) / (_PI2 * root)
    return out


def _g_values(x, xp, xpp):
    """Vectorized kernel G = F4(x, x', x'', 1)."""
    return _f4_values(x, xp, xpp, np.ones_like(np.asarray(x, dtype=float)))


# ---------------------------------------------------------------------------
# F5/F6 reductions
# ---------------------------------------------------------------------------

def _f4_support_lo(c, d, e):
    return max(0.0, 2.0 * max(c, d, e) - (c + d + e))


def _log_singularity_points(phi, lo, hi, n_scan=257, iters=60):
    """Roots of a smooth scalar function phi (vectorized) in (lo, hi) by
    scan plus bisection; the quadrature engine grades panels toward them.
    Tangential touches without a sign change are invisible to the scan,
    which is acceptable: they cost panels, not correctness."""
    if not hi > lo:
        return []
    t = np.linspace(lo, hi, n_scan)
    # keep strictly interior sample points: the endpoints are support
    # edges where phi may be exactly 0 by construction
    t[0] = lo + 1e-12 * (hi - lo)
    t[-1] = hi - 1e-12 * (hi - lo)
    v = phi(t)
    s = np.sign(v)
    flips = np.nonzero(s[:-1] * s[1:] < 0)[0]
    roots = []
    if flips.size:
        lo_b, hi_b = t[flips].copy(), t[flips + 1].copy()
        lo_v = v[flips].copy()
        for _ in range(iters):
            mid = 0.5 * (lo_b + hi_b)
            mv = phi(mid)
            left = lo_v * mv <= 0.0
            hi_b = np.where(left, mid, hi_b)
            lo_b = np.where(left, lo_b, mid)
            lo_v = np.where(left, lo_v, mv)
        roots = (0.5 * (lo_b + hi_b)).tolist()
    return roots


def _empty_result():
    return IntegralResult(value=0.0, error_estimate=0.0, evaluations=1)


def f5_eval(a, b, c, d, e, cfg=None):
    """F5(a,b,c,d,e) reduced to a single quadrature:

        F5 = int dt t F3(a,b,t) F4(c,d,e,t)

    over the overlap of the two supports, with panel breakpoints at the
    interior points where the F4 elliptic modulus crosses 1 (logarithmic
    spikes of K).  Returns an IntegralResult; a value of 0 with zero error
    when the supports do not overlap (the vanishing rule).
    """
    _check_positive("a b c d e", a, b, c, d, e)
    cfg = cfg or QuadratureConfig()
    lo = max(abs(a - b), _f4_support_lo(c, d, e))
    hi = min(a + b, c + d + e)
    if not hi > lo + 1e-14 * max(1.0, hi):
        return _empty_result()

    def phi(t):
        return _delta4_sq_values(c, d, e, t) - (c * d * e) * t

    brk = _log_singularity_points(phi, lo, hi)

    def integrand(t):
        return t * _f3_values(a, b, t) * _f4_values(c, d, e, t)

    edges = np.unique(np.array([lo, *brk, hi]))
    vals, errs, evals, ok = _solve_batched(
        lambda _t, x: integrand(x), [edges], cfg.rel_tol, cfg.abs_tol,
        cfg.max_subdivisions, sqrt_edges=True)
    if not ok[0]:
        from .exceptions import NonConvergenceError
        raise NonConvergenceError(
            f"F5 quadrature did not converge: error {errs[0]:.3e}")
    return IntegralResult(value=float(vals[0]), error_estimate=float(errs[0]),
                          evaluations=int(evals[0]))


def _support_edges_1d(*pairs):
    """Intersection [lo, hi] of (lo_i, hi_i) support intervals."""
    lo = max(p[0] for p in pairs)
    hi = min(p[1] for p in pairs)
    return lo, hi


def f5_eval_symmetric(a, b, c, d, e, cfg=None):
    """Cross-check form of F5 as a double reduction through F3 only:

        F5 = int dt t F3(a,b,t) int dq q F3(c,d,q) F3(e,t,q).

    Slower than f5_eval and kept deliberately independent of the F4 branch
    table.  The outer integrand has integrable kinks/log points where the
    inner support edges collide; those t are supplied as breakpoints.
    """
    _check_positive("a b c d e", a, b, c, d, e)
    cfg = cfg or QuadratureConfig()
    t_lo, t_hi = abs(a - b), a + b
    if not t_hi > t_lo:
        return _empty_result()
    child = cfg.child(t_hi - t_lo)

    # inner q-support: (|c-d|, c+d) intersect (|e-t|, e+t); collisions at:
    coll = [e - abs(c - d), e + abs(c - d), c + d - e, e - (c + d), e + (c + d)]
    brk = sorted({t for t in coll if t_lo < t < t_hi})
    inner_evals = [0]
    # Outer nodes arbitrarily close to a collision t ask for inner
    # integrals with a log(1/distance) spike whose tolerance is limited by
    # the rounding noise of Delta3^2 near a support edge.  Inner
    # non-convergence is therefore not raised; the leftover inner error is
    # propagated into the outer estimate, which is what actually matters.
    inner_max_subdiv = min(child.max_subdivisions, 400)

    def fouter(_tid, ts):
        lo_q = np.maximum(abs(c - d), np.abs(e - ts))
        hi_q = np.minimum(c + d, e + ts)
        tasks = np.stack([lo_q, hi_q], axis=1)

        def finner(t_ids, qs):
            return qs * _f3_values(c, d, qs) * _f3_values(e, ts[t_ids], qs)

        v, er, ev, _ok = _solve_batched(finner, tasks, child.rel_tol,
                                        child.abs_tol, inner_max_subdiv)
        inner_evals[0] += int(ev.sum())
        w = ts * _f3_values(a, b, ts)
        return w * v, np.abs(w) * er

    edges = np.unique(np.array([t_lo, *brk, t_hi]))
    vals, errs, _, ok = _solve_batched(
        fouter, [edges], cfg.rel_tol, cfg.abs_tol, cfg.max_subdivisions,
        sqrt_edges=True)
    if not ok[0]:
        from .exceptions import NonConvergenceError
        raise NonConvergenceError(
            f"symmetric F5 quadrature did not converge: error {errs[0]:.3e}")
    return IntegralResult(value=float(vals[0]), error_estimate=float(errs[0]),
                          evaluations=max(inner_evals[0], 1))


def f6_eval(a, b, c, d, e, f, cfg=None):
    """F6(a..f) = int dt t F4(a,b,c,t) F4(d,e,f,t) over the support
    overlap, with breakpoints at both factors' modulus-1 crossings."""
    _check_positive("a b c d e f", a, b, c, d, e, f)
    cfg = cfg or QuadratureConfig()
    lo = max(_f4_support_lo(a, b, c), _f4_support_lo(d, e, f))
    hi = min(a + b + c, d + e + f)
    if not hi > lo + 1e-14 * max(1.0, hi):
        return _empty_result()

    brk = _log_singularity_points(
        lambda t: _delta4_sq_values(a, b, c, t) - (a * b * c) * t, lo, hi)
    brk += _log_singularity_points(
        lambda t: _delta4_sq_values(d, e, f, t) - (d * e * f) * t, lo, hi)

    def integrand(t):
        return t * _f4_values(a, b, c, t) * _f4_values(d, e, f, t)

    edges = np.unique(np.array([lo, *brk, hi]))
    vals, errs, evals, ok = _solve_batched(
        lambda _t, x: integrand(x), [edges], cfg.rel_tol, cfg.abs_tol,
        cfg.max_subdivisions, sqrt_edges=True)
    if not ok[0]:
        from .exceptions import NonConvergenceError
        raise NonConvergenceError(
            f"F6 quadrature did not converge: error {errs[0]:.3e}")
    return IntegralResult(value=float(vals[0]), error_estimate=float(errs[0]),
                          evaluations=int(evals[0]))


def f6_eval_chain(a, b, c, d, e, f, cfg=None):
    """Cross-check form of F6 as a triple reduction through F3 only:

        F6 = int dt t F3(a,b,t) int dq q F3(c,d,q) int dp p F3(e,f,p) F3(t,q,p).
    """
    _check_positive("a b c d e f", a, b, c, d, e, f)
    cfg = cfg or QuadratureConfig()
    t_lo, t_hi = abs(a - b), a + b
    if not t_hi > t_lo:
        return _empty_result()
    child = cfg.child(t_hi - t_lo)
    inner_evals = [0]

    # q-kinks at fixed t: inner p-support edges |t-q|, t+q colliding with
    # |e-f|, e+f; expressed as functions of t they cross the q-range edges
    # |c-d|, c+d at finitely many t, which become outer breakpoints.
    def q_kinks(t):
        return [t - abs(e - f), t + abs(e - f), abs(e - f) - t,
                e + f - t, t - (e + f), (e + f) + t]

    outer_brk = set()
    for qedge in (abs(c - d), c + d):
        for shift in (abs(e - f), -abs(e - f), e + f, -(e + f)):
            for tval in (qedge - shift, shift - qedge, qedge + shift):
                if t_lo < tval < t_hi:
                    outer_brk.add(tval)

    def fouter(_tid, ts):
        tasks = []
        for tv in ts:
            kinks = [q for q in q_kinks(tv) if abs(c - d) < q < c + d]
            tasks.append(np.unique(np.array([abs(c - d), *kinks, c + d])))
        gchild = child.child(2.0 * min(c, d))

        def fmiddle(t_ids, qs):
            tv = ts[t_ids]
            lo_p = np.maximum(abs(e - f), np.abs(tv - qs))
            hi_p = np.minimum(e + f, tv + qs)
            ptasks = np.stack([lo_p, hi_p], axis=1)

            def finner(p_ids, p):
                return p * _f3_values(e, f, p) * _f3_values(tv[p_ids], qs[p_ids], p)

            # see f5_eval_symmetric: inner shortfalls propagate as yerr
            v, er, ev, _ok = _solve_batched(finner, ptasks, gchild.rel_tol,
                                            gchild.abs_tol,
                                            min(gchild.max_subdivisions, 200))
            inner_evals[0] += int(ev.sum())
            w = qs * _f3_values(c, d, qs)
            return w * v, np.abs(w) * er

        v, er, _, _ok = _solve_batched(fmiddle, tasks, child.rel_tol,
                                       child.abs_tol,
                                       min(child.max_subdivisions, 400))
        w = ts * _f3_values(a, b, ts)
        return w * v, np.abs(w) * er

    edges = np.unique(np.array([t_lo, *sorted(outer_brk), t_hi]))
    vals, errs, _, ok = _solve_batched(
        fouter, [edges], cfg.rel_tol, cfg.abs_tol, cfg.max_subdivisions,
        sqrt_edges=True)
    if not ok[0]:
        from .exceptions import NonConvergenceError
        raise NonConvergenceError(
            f"chain F6 quadrature did not converge: error {errs[0]:.3e}")
    return IntegralResult(value=float(vals[0]), error_estimate=float(errs[0]),
                          evaluations=max(inner_evals[0], 1))


# ---------------------------------------------------------------------------
# smearing tools
# ---------------------------------------------------------------------------

def weber_integral(a, b, p):
    """Weber's second exponential integral,

        int_0^inf x e^{-p^2 x^2} J0(a x) J0(b x) dx
            = 1/(2 p^2) exp(-(a^2+b^2)/(4 p^2)) I0(a b / (2 p^2)),

    evaluated in log space: the exponential and the Bessel growth cancel
    to exp(-(a-b)^2/(4 p^2)) times the scaled I0, so no overflow occurs
    for small p where both factors alone overflow float64.

    a and b may be scalars or arrays (broadcast together); p is a scalar.
    """
    if not (p > 0.0) or not math.isfinite(p):
        raise ValueError("p must be positive and finite")
    aa = np.asarray(a, dtype=float)
    bb = np.asarray(b, dtype=float)
    if (not np.all(np.isfinite(aa)) or not np.all(np.isfinite(bb))
            or np.any(aa < 0.0) or np.any(bb < 0.0)):
        raise ValueError("a, b must be nonnegative and finite")
    inv = 1.0 / (2.0 * p * p)
    out = inv * np.exp(-((aa - bb) ** 2) * inv * 0.5) * bessel_i0e(aa * bb * inv)
    if aa.ndim == 0 and bb.ndim == 0:
        return float(out)
    return out


def smeared_delta_kernel(x, eps):
    """Unit-mass smearing kernel f_eps(x) = 1/(pi sqrt(eps^2 - x^2)) on
    |x| < eps, 0 outside: the arcsine-distribution density the delta
    function is replaced by when one Bessel scale degenerates."""
    if not (eps > 0.0) or not math.isfinite(eps):
        raise ValueError("eps must be positive and finite")
    arr = np.asarray(x, dtype=float)
    scalar = arr.ndim == 0
    out = np.zeros_like(arr, dtype=float)
    inside = np.abs(arr) < eps
    out[inside] = 1.0 / (math.pi * np.sqrt(eps * eps - arr[inside] ** 2))
    return float(out) if scalar else out
