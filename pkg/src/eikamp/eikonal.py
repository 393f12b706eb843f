"""Oscillation-free eikonal amplitude pipeline.

For a Born model A_B and kinematics (s, t) this module computes the first
three terms of the moderately-small-eikonal expansion,

    A(s, t) ~= [A1(s, t) - A3(s, t)] + i A2(s, t),

where A1 is the Born amplitude itself, A2 is a 2D integral of two Born
factors against an algebraic weight, and A3 is a sum of five 3D integrals
of three Born factors against the elliptic kernel G.  None of the
integrals oscillate: the Bessel products of the naive impact-parameter
representation have been integrated out in closed form, which is the
entire point of the construction.

The expansion is valid while the eikonal phase chi(s, b) stays moderately
small; a gate warns at max|chi| >= 0.5, refuses at >= 1 unless overridden,
and refuses unconditionally above 2.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .besselprod import _delta4_sq_values, _g_values
from .exceptions import ChiGateError, NonConvergenceError, RealityClassError
from .models import BornKind, BornModel, Kinematics
from .quadrature import (IntegralResult, QuadratureConfig, _solve_batched,
                         integrate_1d, integrate_2d)
from .special import bessel_j0

__all__ = [
    "CHI_WARN_THRESHOLD",
    "CHI_ERROR_THRESHOLD",
    "CHI_HARD_THRESHOLD",
    "EikonalProfile",
    "AmplitudeTerms",
    "BornReality",
    "DomainBlock",
    "eikonal_chi",
    "build_profile",
    "a1_term",
    "a2_term",
    "a3_term",
    "decompose_a3_domain",
    "assemble_amplitude",
    "diff_cross_section",
    "compute_terms",
    "infer_reality",
]

CHI_WARN_THRESHOLD = 0.5
CHI_ERROR_THRESHOLD = 1.0
CHI_HARD_THRESHOLD = 2.0

# relative decay level at which semi-infinite integration ranges are cut
_TAIL_DECAY = 1e-16
# |chi| level defining the impact-parameter cutoff of a profile
_CHI_CUTOFF_LEVEL = 1e-12


def eikonal_chi(model, s, b, cfg=None, *, force_quadrature=False):
    """Eikonal phase chi(s, b) = (1/4 pi s) int_0^inf dq q J0(q b) A_B(s, -q^2).

    Gaussian-family models use their closed form (the transform of a
    Gaussian is a Gaussian); ``force_quadrature`` bypasses it so the two
    routes can be cross-validated.  The quadrature path truncates where
    the model envelope has decayed by 1e-16 and supplies the Bessel zero
    spacing as panel breakpoints.
    """
    closed = model.chi_closed()
    if closed is not None and not force_quadrature:
        out = closed(b)
        return complex(out) if np.ndim(b) == 0 else out

    cfg = cfg or QuadratureConfig()
    if np.ndim(b) != 0:
        return np.array([eikonal_chi(model, s, bi, cfg,
                                     force_quadrature=force_quadrature)
                         for bi in np.asarray(b, dtype=float)])
    b = float(b)
    if b < 0.0:
        raise ValueError("impact parameter b must be >= 0")
    env0 = float(model.envelope(0.0))
    q_cut = model.q_cutoff(_TAIL_DECAY * env0)
    # the s in the prefactor cancels against A_B = s * a(q)
    def f(q):
        return (q / (4.0 * math.pi)) * bessel_j0(q * b) * model.reduced(q)

    brk = []
    if b * q_cut > 2.0 * math.pi:
        # panel edges near the J0 oscillation nodes
        n = min(int(b * q_cut / math.pi), 4000)
        brk += (np.arange(1, n + 1) * (math.pi / b)).tolist()
    grid = getattr(model, "q_grid", None)
    if grid is not None:
        # tabulated interpolants are C1 at the nodes; panel edges there
        # restore full quadrature order
        brk += [float(qn) for qn in grid if 0.0 < qn < q_cut]
    res = integrate_1d(f, 0.0, q_cut, cfg, breakpoints=sorted(brk) or None)
    return complex(res.value)


@dataclass(frozen=True)
class EikonalProfile:
    """chi(b) at fixed s with its peak magnitude and decay cutoff."""

    chi: object          # callable b -> complex, vectorized
    max_abs_chi: float
    b_cutoff: float


def _envelope_b_cutoff(model, level):
    """Impact parameter beyond which |chi| is certainly below ``level``.

    With |a(q)| <= M exp(-kappa q) the phase obeys the closed Hankel
    transform bound of the envelope,

        |chi(b)| <~ (M / 4 pi) kappa / (kappa^2 + b^2)^(3/2),

    which decays like b^-3; a 30x pad keeps the estimate conservative for
    tables that do not saturate their envelope profile.  The quadrature
    route cannot certify levels this small at such b (the J0 oscillation
    noise floor sits above them), so the cutoff must be analytic.
    """
    env0 = float(model.envelope(0.0))
    kappa = model.envelope_kappa
    scale = 30.0 * env0 * kappa / (4.0 * math.pi * level)
    return max(scale ** (1.0 / 3.0), 12.0 / kappa)


def _apply_chi_gate(max_abs_chi, override):
    if max_abs_chi >= CHI_HARD_THRESHOLD:
        raise ChiGateError(
            f"max|chi| = {max_abs_chi:.3g} >= {CHI_HARD_THRESHOLD}: far "
            "outside the moderately-small-eikonal regime; refusing even "
            "with override")
    if max_abs_chi >= CHI_ERROR_THRESHOLD:
        if not override:
            raise ChiGateError(
                f"max|chi| = {max_abs_chi:.3g} >= {CHI_ERROR_THRESHOLD}: "
                "moderately small regime violated (set the override to "
                "proceed anyway)")
        warnings.warn(
            f"max|chi| = {max_abs_chi:.3g} >= 1: proceeding under override; "
            "the three-term truncation error is uncontrolled", stacklevel=3)
    elif max_abs_chi >= CHI_WARN_THRESHOLD:
        warnings.warn(
            f"max|chi| = {max_abs_chi:.3g} in [0.5, 1): chi^4 truncation "
            "terms may be visible", stacklevel=3)


def build_profile(model, s, cfg=None, *, override_chi_gate=False):
    """Construct the eikonal profile at fixed s and run the smallness gate.

    For closed-form families the peak and cutoff are analytic.  Tabulated
    models get their peak from a quadrature scan over a few envelope decay
    lengths and their cutoff from the decay bound of the envelope
    transform.
    """
    cfg = cfg or QuadratureConfig()
    closed = model.chi_closed()
    if closed is not None:
        peak = float(model.chi0)
        # |chi| = chi0 exp(-beta b^2) for both closed families
        if model.kind is BornKind.GAUSSIAN:
            beta = 0.5 * model.lam ** 2
        else:
            beta = 1.0 / (4.0 * model.slope_b)
        arg = max(peak / _CHI_CUTOFF_LEVEL, math.e)
        b_cut = math.sqrt(math.log(arg) / beta)
        _apply_chi_gate(peak, override_chi_gate)
        return EikonalProfile(chi=closed, max_abs_chi=peak, b_cutoff=b_cut)

    def chi(b):
        return eikonal_chi(model, s, b, cfg, force_quadrature=True)

    # peak scan: |chi| decays on the scale of a few 1/kappa, so a short
    # geometric grid brackets the maximum; pushing the quadrature route to
    # extreme b would drown in J0 oscillation panels for no benefit
    kappa = model.envelope_kappa
    bs = np.concatenate([[0.0], np.geomspace(1e-2 / kappa, 12.0 / kappa, 40)])
    mags = np.abs(chi(bs))
    peak = float(mags.max())
    b_cut = _envelope_b_cutoff(model, _CHI_CUTOFF_LEVEL)
    _apply_chi_gate(peak, override_chi_gate)
    return EikonalProfile(chi=chi, max_abs_chi=peak, b_cutoff=b_cut)


# ---------------------------------------------------------------------------
# amplitude terms
# ---------------------------------------------------------------------------

def a1_term(model, kin):
    """First term: the Born amplitude itself, A1(s,t) = A_B(s, sqrt(-t)).

    Pure model evaluation; carries no quadrature error.
    """
    return complex(model.value(kin.s, kin.q))


def _a2_with_error(model, kin, cfg):
    s, qt = kin.s, kin.q
    env0 = float(model.envelope(0.0))
    q_cut = model.q_cutoff(_TAIL_DECAY * env0)
    # A_B(q-) may stay large, but A_B(q+) decays once cosh u is big:
    # q+ >= qt (cosh u - 1) / 2 pins the u-range
    u_max = math.acosh(1.0 + 2.0 * q_cut / qt + 2.0)

    # substitutions x1 = cosh u, x2 = sin v absorb both 1/sqrt edge
    # factors; the transformed weight is just (cosh^2 u - sin^2 v)
    def integrand(u, v):
        ch = np.cosh(u)
        sv = np.sin(v)
        qp = 0.5 * qt * (ch + sv)
        qm = 0.5 * qt * (ch - sv)
        return (ch * ch - sv * sv) * model.reduced(qp) * model.reduced(qm)

    res = integrate_2d(integrand, (0.0, u_max), (0.0, 0.5 * math.pi), cfg)
    pref = s * (-kin.t) / (16.0 * math.pi ** 2)
    return pref * res.value, abs(pref) * res.error_estimate


def a2_term(model, kin, cfg=None):
    """Second term: 2D integral of two Born factors,

        A2 = (1/16 pi^2)(-t/s) int_1^inf dx1 int_0^1 dx2
             (x1^2 - x2^2)/sqrt((x1^2-1)(1-x2^2))
             A_B(s, q(x1+x2)/2) A_B(s, q(x1-x2)/2),

    computed after x1 = cosh u, x2 = sin v, which removes both edge
    singularities.  The u-range comes from the model envelope.
    """
    cfg = cfg or QuadratureConfig()
    value, _err = _a2_with_error(model, kin, cfg)
    return complex(value)


@dataclass(frozen=True)
class DomainBlock:
    """One iterated-limit block (x1-range, x2(x1), x3(x1, x2))."""

    x1_range: tuple
    x2_lower: object
    x2_upper: object
    x3_lower: object
    x3_upper: object


def decompose_a3_domain():
    """The five-block decomposition of the constrained 3D region.

    The region {(x1, x2, x3) : x3 >= 0, [(x3+1)^2 - x2^2] [x1^2 - (x3-1)^2] > 0,
    0 <= x2 <= x1} splits into exactly five iterated-limit blocks:

        [0,1] x [0,x1]  x [1-x1, x1+1]
        [1,2] x [0,1]   x [0,    x1+1]
        [1,2] x [1,x1]  x [x2-1, x1+1]
        [2,inf) x [0,1] x [0,    x1+1]
        [2,inf) x [1,x1] x [x2-1, x1+1]

    applied to H(x1, x2, x3) + H(x1, -x2, x3).  All limit callables are
    vectorized.
    """
    inf = math.inf

    def lo_zero(x1):
        return np.zeros_like(np.asarray(x1, dtype=float))

    def hi_one(x1):
        return np.ones_like(np.asarray(x1, dtype=float))

    def hi_x1(x1):
        return np.asarray(x1, dtype=float)

    def lo_one(x1):
        return np.ones_like(np.asarray(x1, dtype=float))

    def x3_zero(x1, x2):
        return np.zeros_like(np.asarray(x1, dtype=float))

    def x3_one_minus(x1, x2):
        return 1.0 - np.asarray(x1, dtype=float)

    def x3_x2_minus(x1, x2):
        return np.asarray(x2, dtype=float) - 1.0

    def x3_hi(x1, x2):
        return np.asarray(x1, dtype=float) + 1.0

    return [
        DomainBlock((0.0, 1.0), lo_zero, hi_x1, x3_one_minus, x3_hi),
        DomainBlock((1.0, 2.0), lo_zero, hi_one, x3_zero, x3_hi),
        DomainBlock((1.0, 2.0), lo_one, hi_x1, x3_x2_minus, x3_hi),
        DomainBlock((2.0, inf), lo_zero, hi_one, x3_zero, x3_hi),
        DomainBlock((2.0, inf), lo_one, hi_x1, x3_x2_minus, x3_hi),
    ]


def _x3_breakpoints(xp, xm, lo3, hi3, n_scan=33, iters=45):
    """Per-task roots of A^2(xp, xm, x3) - B on (lo3, hi3).

    These are the log-singular x3 values of the kernel G (elliptic modulus
    reaching 1).  Vectorized over all tasks at once: a sign-change scan on
    a shared grid followed by batched bisection.  Returns a list of root
    arrays, one per task.
    """
    T = xp.size
    span = hi3 - lo3
    frac = np.linspace(1e-9, 1.0 - 1e-9, n_scan)
    grid = lo3[:, None] + span[:, None] * frac[None, :]
    phi = (_delta4_sq_values(xp[:, None], xm[:, None], grid, 1.0)
           - (xp * xm)[:, None] * grid)
    s = np.sign(phi)
    flip = s[:, :-1] * s[:, 1:] < 0
    rows, cols = np.nonzero(flip)
    out = [np.empty(0) for _ in range(T)]
    if rows.size == 0:
        return out
    lo_b = grid[rows, cols]
    hi_b = grid[rows, cols + 1]
    lo_v = phi[rows, cols]
    bxp, bxm = xp[rows], xm[rows]
    for _ in range(iters):
        mid = 0.5 * (lo_b + hi_b)
        mv = _delta4_sq_values(bxp, bxm, mid, 1.0) - bxp * bxm * mid
        left = lo_v * mv <= 0.0
        hi_b = np.where(left, mid, hi_b)
        lo_b = np.where(left, lo_b, mid)
        lo_v = np.where(left, lo_v, mv)
    roots = 0.5 * (lo_b + hi_b)
    for r in range(T):
        sel = rows == r
        if sel.any():
            out[r] = np.sort(roots[sel])
    return out


def _a3_block(model, qt, block, cfg, x1_cap, x3_cap, counters):
    """One block's contribution to the A3 triple integral (without the
    global prefactor), using reduced amplitudes:

        int dx1 int dx2 int dx3 (xp xm x3) a(qt xp) a(qt xm) a(qt x3)
                                G(xp, xm, x3)

    with xp = (x1+x2)/2, xm = (x1-x2)/2.  The weight xp xm x3 is the
    radial measure q dq of each momentum axis in the scaled variables;
    together with the 1/2 Jacobian of (x, x') -> (x1, x2) it exactly
    absorbs the x2 -> -x2 doubling, because the full integrand is even in
    x2 (the sign flip swaps xp and xm, a symmetry of both the kernel and
    the Born product).
    """
    x1_lo, x1_hi = block.x1_range
    x1_hi = min(x1_hi, x1_cap)
    if not x1_hi > x1_lo:
        return 0.0 + 0.0j, 0.0
    child = cfg.child(x1_hi - x1_lo)
    gchild = child.child(2.0)
    red = model.reduced

    def fouter(_tid, x1s):
        lo2 = block.x2_lower(x1s)
        hi2 = block.x2_upper(x1s)
        tasks = np.stack([lo2, hi2], axis=1)

        def fmiddle(t_ids, x2s):
            x1v = x1s[t_ids]
            xp = 0.5 * (x1v + x2s)
            xm = 0.5 * (x1v - x2s)
            lo3 = np.maximum(block.x3_lower(x1v, x2s), 0.0)
            hi3 = np.minimum(block.x3_upper(x1v, x2s), x3_cap)
            brks = _x3_breakpoints(xp, xm, lo3, np.maximum(hi3, lo3))
            ptasks = []
            for i in range(xp.size):
                if hi3[i] <= lo3[i]:
                    ptasks.append(np.array([0.0, 0.0]))
                else:
                    ptasks.append(np.unique(np.concatenate(
                        [[lo3[i]], brks[i], [hi3[i]]]).clip(lo3[i], hi3[i])))

            def finner(p_ids, x3):
                xpv, xmv = xp[p_ids], xm[p_ids]
                g = _g_values(xpv, xmv, x3)
                return (xpv * xmv * x3 * red(qt * xpv) * red(qt * xmv)
                        * red(qt * x3) * g)

            v, er, ev, _ok = _solve_batched(
                finner, ptasks, gchild.rel_tol, gchild.abs_tol,
                min(gchild.max_subdivisions, 200))
            counters[0] += int(ev.sum())
            return v, er

        v, er, _, _ok = _solve_batched(
            fmiddle, tasks, child.rel_tol, child.abs_tol,
            min(child.max_subdivisions, 400))
        return v, er

    vals, errs, _, ok = _solve_batched(
        fouter, [np.array([x1_lo, x1_hi])], cfg.rel_tol, cfg.abs_tol,
        cfg.max_subdivisions)
    if not ok[0]:
        raise NonConvergenceError(
            f"A3 block over x1 in [{x1_lo:g}, {x1_hi:g}] did not converge: "
            f"error estimate {errs[0]:.3e}")
    return complex(vals[0]), float(errs[0])


def _a3_with_error(model, kin, cfg):
    s, qt = kin.s, kin.q
    env0 = float(model.envelope(0.0))
    # truncate the semi-infinite ranges where the product of the three
    # envelope factors falls below abs_tol * 1e-2: env(q) env0^2 <= thr
    thr = max(cfg.abs_tol * 1e-2, 1e-300)
    q_far = model.q_cutoff(min(thr / env0 ** 2, 0.5 * env0))
    x1_cap = max(2.0 * q_far / qt, 4.0)
    x3_cap = max(q_far / qt, 4.0)
    counters = [0]
    total = 0.0 + 0.0j
    err = 0.0
    for block in decompose_a3_domain():
        v, e = _a3_block(model, qt, block, cfg, x1_cap, x3_cap, counters)
        total += v
        err += e
    # crude tail bound for the truncated x1/x3 ranges
    tail = thr * env0 ** 2 * (x1_cap + x3_cap)
    pref = s * kin.t ** 2 / (96.0 * math.pi ** 2)
    return pref * total, abs(pref) * (err + tail), counters[0]


def a3_term(model, kin, cfg=None):
    """Third term: sum of five 3D integrals of three Born factors against
    the elliptic kernel G,

        A3 = (1/96 pi^2)(-t/s)^2 sum_blocks
             int dx1 dx2 dx3 (xp xm x3) A_B(qt xp) A_B(qt xm) A_B(qt x3)
                             G(xp, xm, x3),

    xp = (x1+x2)/2, xm = (x1-x2)/2, qt = sqrt(-t): the scaled momentum
    integrals with their radial measures, restricted to the five-block
    region where the kernel has support.  The kernel's log-singular
    surfaces are located by a classifier scan along the innermost axis
    and inserted as panel breakpoints; semi-infinite ranges truncate on
    the model envelope with a tail bound added to the error estimate.
    """
    cfg = cfg or QuadratureConfig()
    value, _err, _n = _a3_with_error(model, kin, cfg)
    return complex(value)


# ---------------------------------------------------------------------------
# assembly and observables
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AmplitudeTerms:
    """The three computed terms with their quadrature error estimates
    (a1 is exact, so only a2 and a3 carry errors)."""

    a1: complex
    a2: complex
    a3: complex
    a2_error: float = 0.0
    a3_error: float = 0.0

    @property
    def assembled(self):
        return (self.a1 - self.a3) + 1j * self.a2


def assemble_amplitude(terms):
    """A(s,t) ~= (A1 - A3) + i A2."""
    return terms.assembled


class BornReality(Enum):
    GENERAL = "general"
    REAL = "real"
    PURE_IMAGINARY = "pure_imaginary"


# tolerance (relative to term magnitude) for declaring a reality class
# violated; looser than the 1e-10 the closed families achieve, so real
# quadrature noise does not trip it
_REALITY_RTOL = 1e-8


def _assert_reality(terms, reality):
    def offensive(part, mag):
        return abs(part) > _REALITY_RTOL * max(mag, 1e-300)

    if reality is BornReality.REAL:
        checks = [("Im a1", terms.a1.imag, abs(terms.a1)),
                  ("Im a2", terms.a2.imag, abs(terms.a2)),
                  ("Im a3", terms.a3.imag, abs(terms.a3))]
    elif reality is BornReality.PURE_IMAGINARY:
        checks = [("Re a1", terms.a1.real, abs(terms.a1)),
                  ("Im a2", terms.a2.imag, abs(terms.a2)),
                  ("Re a3", terms.a3.real, abs(terms.a3))]
    else:
        return
    for name, part, mag in checks:
        if offensive(part, mag):
            raise RealityClassError(
                f"{reality.value} declared but {name} = {part:.3e} is not "
                f"negligible against |term| = {mag:.3e}")


def diff_cross_section(terms, kin, born_reality=BornReality.GENERAL):
    """Differential cross section to chi^3 accuracy,

        dsigma/dt = (1/16 pi s^2) { |A1|^2 + 2 Im(A1 A2*) + |A2|^2
                                    - 2 Re(A1 A3*) },

    dropping the chi^4-and-beyond pieces |A3|^2, A2 A3 cross terms, etc.
    The REAL and PURE_IMAGINARY branches are this same expression
    restricted to their reality class (for pure-imaginary Born input the
    literal published symbols are ambiguous about which factors denote
    moduli; restriction of the general form fixes the convention).  The
    declared class is validated against the terms first.
    """
    _assert_reality(terms, born_reality)
    a1, a2, a3 = terms.a1, terms.a2, terms.a3
    norm = 1.0 / (16.0 * math.pi * kin.s ** 2)
    if born_reality is BornReality.REAL:
        r1, r2, r3 = a1.real, a2.real, a3.real
        return norm * (r1 * r1 + r2 * r2 - 2.0 * r1 * r3)
    if born_reality is BornReality.PURE_IMAGINARY:
        h1, h2, h3 = a1.imag, a2.real, a3.imag
        return norm * (h1 * h1 + 2.0 * h1 * h2 + h2 * h2 - 2.0 * h1 * h3)
    val = (abs(a1) ** 2 + 2.0 * (a1 * np.conj(a2)).imag + abs(a2) ** 2
           - 2.0 * (a1 * np.conj(a3)).real)
    return norm * float(val)


def infer_reality(model):
    """Reality class implied by the model family: the i*g*s families are
    pure imaginary; tabulated grids are inspected column-wise."""
    if model.kind in (BornKind.GAUSSIAN, BornKind.EXPONENTIAL_POLE):
        return BornReality.PURE_IMAGINARY
    vals = model.reduced(model.q_grid)
    re_zero = bool(np.all(vals.real == 0.0))
    im_zero = bool(np.all(vals.imag == 0.0))
    if im_zero and not re_zero:
        return BornReality.REAL
    if re_zero and not im_zero:
        return BornReality.PURE_IMAGINARY
    return BornReality.GENERAL


def compute_terms(model, kin, cfg=None, *, override_chi_gate=False):
    """Run the full pipeline at one (s, t): gate on max|chi|, then compute
    A1 (exact), A2, and A3 with error estimates."""
    cfg = cfg or QuadratureConfig()
    build_profile(model, kin.s, cfg, override_chi_gate=override_chi_gate)
    a1 = a1_term(model, kin)
    a2, a2_err = _a2_with_error(model, kin, cfg)
    a3, a3_err, _ = _a3_with_error(model, kin, cfg)
    return AmplitudeTerms(a1=a1, a2=complex(a2), a3=complex(a3),
                          a2_error=a2_err, a3_error=a3_err)
