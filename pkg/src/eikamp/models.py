"""Born amplitude models and kinematics.

The scattering pipeline is abstract in the Born amplitude A_B(s, t): any
function with a decaying envelope in q = sqrt(-t) works.  Three concrete
families are provided:

GAUSSIAN          A_B(s, q) = i g s exp(-q^2 / (2 Lambda^2))
EXPONENTIAL_POLE  A_B(s, q) = i C s exp(t B) = i C s exp(-q^2 B)
TABULATED         A_B(s, q) = s [Re a(q) + i Im a(q)] from a (q, Re, Im)
                  grid with monotone cubic interpolation and an
                  exponential tail beyond the last grid point

All models store the reduced amplitude a(q) = A_B(s, q) / s, so tables are
s-independent; the i*g*s normalization convention is adopted and
documented here because the underlying physics leaves it open.

Every model carries an envelope |a(q)| <= envelope(q) that decays at least
exponentially; the impact-parameter transform converges absolutely only
under such a bound, and the integrators use envelope crossings to truncate
semi-infinite ranges.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.interpolate import PchipInterpolator

from .exceptions import ModelFileError

__all__ = [
    "BornKind",
    "Kinematics",
    "BornModel",
    "GaussianBorn",
    "ExponentialPoleBorn",
    "TabulatedBorn",
    "load_model",
]


class BornKind(Enum):
    GAUSSIAN = "gaussian"
    EXPONENTIAL_POLE = "exponential_pole"
    TABULATED = "tabulated"


@dataclass(frozen=True)
class Kinematics:
    """Mandelstam pair (s, t) with s > 0, t < 0; q = sqrt(-t) in GeV."""

    s: float
    t: float

    def __post_init__(self):
        if not (math.isfinite(self.s) and self.s > 0.0):
            raise ValueError(f"s must be positive and finite, got {self.s!r}")
        if not (math.isfinite(self.t) and self.t < 0.0):
            raise ValueError(f"t must be negative and finite, got {self.t!r}")

    @property
    def q(self):
        return math.sqrt(-self.t)


class BornModel:
    """Common interface of the Born families.

    Subclasses implement ``reduced(q)`` (vectorized complex a(q) =
    A_B/s), ``envelope(q)`` (a decreasing positive bound on |a(q)|), and
    ``q_cutoff(threshold)`` (the envelope's crossing point).  ``value``
    restores the s factor.  ``chi_closed`` returns a closed-form eikonal
    phase function of b when the family admits one, else None.
    """

    kind: BornKind

    def value(self, s, q):
        return s * self.reduced(q)

    def reduced(self, q):
        raise NotImplementedError

    def envelope(self, q):
        raise NotImplementedError

    def q_cutoff(self, threshold):
        raise NotImplementedError

    def chi_closed(self):
        return None


class GaussianBorn(BornModel):
    """a(q) = i g exp(-q^2 / (2 lam^2)); the analytic workhorse.

    Its eikonal phase is Gaussian in b with peak chi0 = g lam^2 / (4 pi),
    which makes every pipeline stage checkable in closed form.
    """

    kind = BornKind.GAUSSIAN

    def __init__(self, g, lam):
        if not (g > 0.0 and math.isfinite(g)):
            raise ValueError("coupling g must be positive")
        if not (lam > 0.0 and math.isfinite(lam)):
            raise ValueError("scale lam must be positive")
        self.g = float(g)
        self.lam = float(lam)

    def reduced(self, q):
        q = np.asarray(q, dtype=float)
        return 1j * self.g * np.exp(-q * q / (2.0 * self.lam ** 2))

    def envelope(self, q):
        q = np.asarray(q, dtype=float)
        return self.g * np.exp(-q * q / (2.0 * self.lam ** 2))

    def q_cutoff(self, threshold):
        if threshold >= self.g:
            return 0.0
        return self.lam * math.sqrt(2.0 * math.log(self.g / threshold))

    @property
    def chi0(self):
        """Peak eikonal phase magnitude |chi(b=0)| = g lam^2 / (4 pi)."""
        return self.g * self.lam ** 2 / (4.0 * math.pi)

    def chi_closed(self):
        g, lam = self.g, self.lam
        chi0 = self.chi0

        def chi(b):
            b = np.asarray(b, dtype=float)
            return 1j * chi0 * np.exp(-(lam * lam) * b * b / 2.0)

        return chi


class ExponentialPoleBorn(BornModel):
    """a(q) = i C exp(-B q^2): exponential-in-t with slope B."""

    kind = BornKind.EXPONENTIAL_POLE

    def __init__(self, c, slope_b):
        if not (c > 0.0 and math.isfinite(c)):
            raise ValueError("normalization c must be positive")
        if not (slope_b > 0.0 and math.isfinite(slope_b)):
            raise ValueError("slope must be positive")
        self.c = float(c)
        self.slope_b = float(slope_b)

    def reduced(self, q):
        q = np.asarray(q, dtype=float)
        return 1j * self.c * np.exp(-self.slope_b * q * q)

    def envelope(self, q):
        q = np.asarray(q, dtype=float)
        return self.c * np.exp(-self.slope_b * q * q)

    def q_cutoff(self, threshold):
        if threshold >= self.c:
            return 0.0
        return math.sqrt(math.log(self.c / threshold) / self.slope_b)

    @property
    def chi0(self):
        """Peak phase magnitude |chi(b=0)| = C / (8 pi B)."""
        return self.c / (8.0 * math.pi * self.slope_b)

    def chi_closed(self):
        chi0 = self.chi0
        inv4b = 1.0 / (4.0 * self.slope_b)

        def chi(b):
            b = np.asarray(b, dtype=float)
            return 1j * chi0 * np.exp(-b * b * inv4b)

        return chi


class TabulatedBorn(BornModel):
    """Reduced amplitude from a grid (q_i, Re a_i, Im a_i).

    Interpolation is monotone cubic (no overshoot between grid points);
    beyond the last point the complex value decays as
    a(q_N) exp(-kappa_tail (q - q_N)) with kappa_tail fitted from the
    magnitudes of the last two grid points.  The stated envelope
    M exp(-kappa q) is validated against the grid at construction and
    must also dominate the fitted tail.
    """

    kind = BornKind.TABULATED

    def __init__(self, q_grid, re_vals, im_vals, envelope_m, envelope_kappa):
        q = np.asarray(q_grid, dtype=float)
        re = np.asarray(re_vals, dtype=float)
        im = np.asarray(im_vals, dtype=float)
        if q.ndim != 1 or q.size < 3:
            raise ValueError("grid needs at least 3 points")
        if re.shape != q.shape or im.shape != q.shape:
            raise ValueError("grid columns must have equal length")
        if q[0] != 0.0 or np.any(np.diff(q) <= 0.0):
            raise ValueError("q grid must start at 0 and increase strictly")
        if not (envelope_m > 0.0 and envelope_kappa > 0.0):
            raise ValueError("envelope requires M > 0 and kappa > 0")
        mag = np.hypot(re, im)
        bound = envelope_m * np.exp(-envelope_kappa * q)
        bad = mag > bound * (1.0 + 1e-9)
        if bad.any():
            i = int(np.argmax(bad))
            raise ValueError(
                f"envelope violated at q = {q[i]:g}: |a| = {mag[i]:.6g} > "
                f"M e^(-kappa q) = {bound[i]:.6g}")
        if not mag[-1] < mag[-2]:
            raise ValueError("grid magnitudes must decrease at the end "
                             "(needed for the exponential tail fit)")
        kappa_tail = math.log(mag[-2] / mag[-1]) / (q[-1] - q[-2])
        if kappa_tail < envelope_kappa * (1.0 - 1e-12):
            raise ValueError(
                f"fitted tail decays slower than the envelope: kappa_tail = "
                f"{kappa_tail:.6g} < kappa = {envelope_kappa:.6g}, so the "
                f"envelope would not bound the extrapolated amplitude")
        self.q_grid = q
        self._re = PchipInterpolator(q, re, extrapolate=False)
        self._im = PchipInterpolator(q, im, extrapolate=False)
        self._a_end = complex(re[-1], im[-1])
        self._kappa_tail = kappa_tail
        self.envelope_m = float(envelope_m)
        self.envelope_kappa = float(envelope_kappa)

    def reduced(self, q):
        q = np.asarray(q, dtype=float)
        scalar = q.ndim == 0
        q = np.atleast_1d(q)
        out = np.empty(q.shape, dtype=complex)
        inside = q <= self.q_grid[-1]
        out[inside] = self._re(q[inside]) + 1j * self._im(q[inside])
        tail = ~inside
        out[tail] = self._a_end * np.exp(
            -self._kappa_tail * (q[tail] - self.q_grid[-1]))
        return out[0] if scalar else out

    def envelope(self, q):
        q = np.asarray(q, dtype=float)
        return self.envelope_m * np.exp(-self.envelope_kappa * q)

    def q_cutoff(self, threshold):
        if threshold >= self.envelope_m:
            return 0.0
        return math.log(self.envelope_m / threshold) / self.envelope_kappa


def _get_float(section, key, path):
    if key not in section:
        raise ModelFileError(f"{path}: missing key '{key}' in [{section.name}]")
    try:
        return float(section[key])
    except ValueError as exc:
        raise ModelFileError(
            f"{path}: key '{key}' is not a number: {section[key]!r}") from exc


def load_model(path):
    """Parse a model definition file.

    Format (INI-style)::

        [model]
        kind = gaussian            ; or exponential_pole, tabulated
        g = 1.0                    ; gaussian: g, lambda
        lambda = 1.0
        ; exponential_pole: c, b_slope
        ; tabulated: multiline 'points', each row 'q  re  im' giving the
        ; reduced amplitude a(q) = A_B / s
        ; points =
        ;     0.0   0.0   1.0
        ;     0.5   0.0   0.8
        ;     ...

        [envelope]                 ; tabulated models only
        m = 1.0
        kappa = 2.0

    Raises ModelFileError with a location hint on any structural problem.
    """
    cp = configparser.ConfigParser()
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cp.read_file(fh)
    except OSError as exc:
        raise ModelFileError(f"cannot read model file {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ModelFileError(f"{path}: parse error: {exc}") from exc

    if "model" not in cp:
        raise ModelFileError(f"{path}: missing [model] section")
    sec = cp["model"]
    kind_raw = sec.get("kind", "").strip().lower()
    try:
        kind = BornKind(kind_raw)
    except ValueError:
        raise ModelFileError(
            f"{path}: unknown kind {kind_raw!r}; expected one of "
            f"{[k.value for k in BornKind]}") from None

    try:
        if kind is BornKind.GAUSSIAN:
            return GaussianBorn(_get_float(sec, "g", path),
                                _get_float(sec, "lambda", path))
        if kind is BornKind.EXPONENTIAL_POLE:
            return ExponentialPoleBorn(_get_float(sec, "c", path),
                                       _get_float(sec, "b_slope", path))
        if "points" not in sec:
            raise ModelFileError(f"{path}: tabulated model needs 'points'")
        rows = []
        for ln in sec["points"].strip().splitlines():
            parts = ln.split()
            if not parts:
                continue
            if len(parts) != 3:
                raise ModelFileError(
                    f"{path}: points row needs 'q re im', got {ln.strip()!r}")
            try:
                rows.append([float(p) for p in parts])
            except ValueError:
                raise ModelFileError(
                    f"{path}: non-numeric points row {ln.strip()!r}") from None
        if "envelope" not in cp:
            raise ModelFileError(
                f"{path}: tabulated model needs an [envelope] section")
        env = cp["envelope"]
        arr = np.asarray(rows, dtype=float)
        return TabulatedBorn(arr[:, 0], arr[:, 1], arr[:, 2],
                             _get_float(env, "m", path),
                             _get_float(env, "kappa", path))
    except ModelFileError:
        raise
    except ValueError as exc:
        raise ModelFileError(f"{path}: invalid model parameters: {exc}") from exc
