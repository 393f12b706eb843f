"""Born model families, kinematics validation, and the model file loader."""

import dataclasses
import math

import numpy as np
import pytest

from eikamp.exceptions import ModelFileError
from eikamp.models import (
    BornKind,
    ExponentialPoleBorn,
    GaussianBorn,
    Kinematics,
    TabulatedBorn,
    load_model,
)

# gaussian-shaped grid |a| = e^{-q^2/2} with a slowly rotating phase; the
# envelope 2.1 e^{-1.2 q} dominates every point and the fitted tail
TAB_Q = [0.0, 0.5, 1.0, 1.5, 2.0]
TAB_RE = [1.0, 0.87, 0.55, 0.28, 0.12]
TAB_IM = [0.0, 0.13, 0.25, 0.16, 0.07]
TAB_M, TAB_KAPPA = 2.1, 1.2


def make_tabulated():
    return TabulatedBorn(TAB_Q, TAB_RE, TAB_IM, TAB_M, TAB_KAPPA)


class TestKinematics:
    def test_valid_pair(self):
        kin = Kinematics(s=100.0, t=-1.0)
        assert kin.q == 1.0
        assert Kinematics(s=2.0, t=-0.25).q == 0.5

    @pytest.mark.parametrize("s,t", [(0.0, -1.0), (-5.0, -1.0),
                                     (math.nan, -1.0), (100.0, 0.0),
                                     (100.0, 1.0), (100.0, math.inf)])
    def test_invalid_pairs(self, s, t):
        with pytest.raises(ValueError):
            Kinematics(s=s, t=t)

    def test_frozen(self):
        kin = Kinematics(s=10.0, t=-1.0)
        with pytest.raises(dataclasses.FrozenInstanceError):
            kin.s = 20.0


class TestGaussianBorn:
    def test_constructor_validation(self):
        for bad in ((0.0, 1.0), (-1.0, 1.0), (1.0, 0.0), (1.0, -2.0),
                    (math.nan, 1.0), (1.0, math.inf)):
            with pytest.raises(ValueError):
                GaussianBorn(*bad)

    def test_reduced_values(self):
        m = GaussianBorn(g=2.0, lam=1.3)
        assert m.reduced(0.0) == 2.0j
        q = 0.7
        expect = 2.0j * math.exp(-q * q / (2.0 * 1.3 ** 2))
        assert m.reduced(q) == pytest.approx(expect, rel=1e-15)

    def test_value_restores_s(self):
        m = GaussianBorn(g=2.0, lam=1.3)
        assert m.value(50.0, 0.7) == pytest.approx(50.0 * m.reduced(0.7))

    def test_chi0(self):
        m = GaussianBorn(g=2.0, lam=1.3)
        assert m.chi0 == pytest.approx(2.0 * 1.3 ** 2 / (4.0 * math.pi),
                                       rel=1e-15)

    def test_chi_closed(self):
        m = GaussianBorn(g=2.0, lam=1.3)
        chi = m.chi_closed()
        assert chi(0.0) == pytest.approx(1j * m.chi0, rel=1e-15)
        b = 0.9
        assert chi(b) == pytest.approx(
            1j * m.chi0 * math.exp(-1.3 ** 2 * b * b / 2.0), rel=1e-15)
        arr = chi(np.array([0.0, 0.5, 1.0]))
        assert arr.shape == (3,)

    def test_kind(self):
        assert GaussianBorn(1.0, 1.0).kind is BornKind.GAUSSIAN


class TestExponentialPoleBorn:
    def test_constructor_validation(self):
        for bad in ((0.0, 1.0), (1.0, 0.0), (-1.0, 1.0), (1.0, -1.0)):
            with pytest.raises(ValueError):
                ExponentialPoleBorn(*bad)

    def test_reduced_values(self):
        m = ExponentialPoleBorn(c=1.1, slope_b=0.7)
        assert m.reduced(0.0) == 1.1j
        q = 1.2
        assert m.reduced(q) == pytest.approx(
            1.1j * math.exp(-0.7 * q * q), rel=1e-15)

    def test_chi0(self):
        m = ExponentialPoleBorn(c=1.1, slope_b=0.7)
        assert m.chi0 == pytest.approx(1.1 / (8.0 * math.pi * 0.7), rel=1e-15)

    def test_chi_closed(self):
        m = ExponentialPoleBorn(c=1.1, slope_b=0.7)
        chi = m.chi_closed()
        b = 1.4
        assert chi(b) == pytest.approx(
            1j * m.chi0 * math.exp(-b * b / (4.0 * 0.7)), rel=1e-15)

    def test_kind(self):
        m = ExponentialPoleBorn(1.0, 1.0)
        assert m.kind is BornKind.EXPONENTIAL_POLE


class TestTabulatedBorn:
    def test_interpolates_grid_nodes_exactly(self):
        m = make_tabulated()
        got = m.reduced(np.array(TAB_Q))
        expect = np.array(TAB_RE) + 1j * np.array(TAB_IM)
        assert np.allclose(got, expect, rtol=0.0, atol=1e-15)

    def test_scalar_and_array_shapes(self):
        m = make_tabulated()
        assert np.isscalar(m.reduced(0.25)) or m.reduced(0.25).ndim == 0
        assert m.reduced(np.array([0.25, 1.75])).shape == (2,)

    def test_exponential_tail(self):
        m = make_tabulated()
        mag = np.hypot(TAB_RE, TAB_IM)
        kappa_tail = math.log(mag[-2] / mag[-1]) / (TAB_Q[-1] - TAB_Q[-2])
        a_end = TAB_RE[-1] + 1j * TAB_IM[-1]
        for dq in (0.5, 2.0, 5.0):
            expect = a_end * math.exp(-kappa_tail * dq)
            assert m.reduced(TAB_Q[-1] + dq) == pytest.approx(expect,
                                                             rel=1e-12)

    def test_no_overshoot_between_nodes(self):
        # monotone cubic interpolation of monotone data stays monotone
        m = TabulatedBorn(TAB_Q, TAB_RE, [0.0] * 5, TAB_M, TAB_KAPPA)
        qs = np.linspace(0.0, 2.0, 301)
        vals = m.reduced(qs).real
        assert np.all(np.diff(vals) <= 1e-15)
        assert vals.max() <= TAB_RE[0] + 1e-15
        assert vals.min() >= TAB_RE[-1] - 1e-15

    def test_grid_validation(self):
        with pytest.raises(ValueError):
            TabulatedBorn([0.0, 1.0], [1.0, 0.5], [0.0, 0.0], 2.0, 0.5)
        with pytest.raises(ValueError):
            TabulatedBorn([0.1, 1.0, 2.0], [1.0, 0.5, 0.2],
                          [0.0, 0.0, 0.0], 2.0, 0.5)
        with pytest.raises(ValueError):
            TabulatedBorn([0.0, 1.0, 1.0], [1.0, 0.5, 0.2],
                          [0.0, 0.0, 0.0], 2.0, 0.5)
        with pytest.raises(ValueError):
            TabulatedBorn([0.0, 1.0, 2.0], [1.0, 0.5], [0.0, 0.0, 0.0],
                          2.0, 0.5)

    def test_envelope_violation_rejected(self):
        with pytest.raises(ValueError, match="envelope violated"):
            TabulatedBorn([0.0, 1.0, 2.0], [1.0, 0.9, 0.2],
                          [0.0, 0.0, 0.0], 1.0, 0.5)

    def test_flat_end_rejected(self):
        with pytest.raises(ValueError, match="decrease at the end"):
            TabulatedBorn([0.0, 1.0, 2.0], [1.0, 0.3, 0.3],
                          [0.0, 0.0, 0.0], 2.0, 0.1)

    def test_slow_tail_rejected(self):
        # last two magnitudes decay slower than the envelope: the
        # extrapolation would escape the stated bound
        with pytest.raises(ValueError, match="tail decays slower"):
            TabulatedBorn([0.0, 1.0, 2.0], [1.0, 0.5, 0.45],
                          [0.0, 0.0, 0.0], 1.0, 0.3)

    def test_bad_envelope_parameters(self):
        with pytest.raises(ValueError):
            TabulatedBorn(TAB_Q, TAB_RE, TAB_IM, 0.0, 1.0)
        with pytest.raises(ValueError):
            TabulatedBorn(TAB_Q, TAB_RE, TAB_IM, 1.0, -1.0)

    def test_chi_closed_absent(self):
        assert make_tabulated().chi_closed() is None


class TestEnvelopeContract:
    @pytest.mark.parametrize("model", [
        GaussianBorn(g=2.0, lam=1.3),
        ExponentialPoleBorn(c=1.1, slope_b=0.7),
        make_tabulated(),
    ], ids=["gaussian", "exponential_pole", "tabulated"])
    def test_envelope_dominates_everywhere(self, model):
        # including the extrapolated tail region of the tabulated family
        hi = 1.5 * model.q_cutoff(1e-10)
        qs = np.linspace(0.0, hi, 400)
        assert np.all(np.abs(model.reduced(qs))
                      <= model.envelope(qs) * (1.0 + 1e-9))

    @pytest.mark.parametrize("model", [
        GaussianBorn(g=2.0, lam=1.3),
        ExponentialPoleBorn(c=1.1, slope_b=0.7),
        make_tabulated(),
    ], ids=["gaussian", "exponential_pole", "tabulated"])
    def test_cutoff_inverts_envelope(self, model):
        for thr in (1e-3, 1e-8):
            qc = model.q_cutoff(thr)
            assert model.envelope(qc) == pytest.approx(thr, rel=1e-10)
        assert model.q_cutoff(1e9) == 0.0


class TestLoadModel:
    def test_gaussian_roundtrip(self, tmp_path):
        p = tmp_path / "gauss.ini"
        p.write_text("[model]\nkind = gaussian\ng = 2.0\nlambda = 1.3\n")
        m = load_model(p)
        assert isinstance(m, GaussianBorn)
        assert (m.g, m.lam) == (2.0, 1.3)

    def test_exponential_roundtrip(self, tmp_path):
        p = tmp_path / "exp.ini"
        p.write_text("[model]\nkind = exponential_pole\nc = 1.1\n"
                     "b_slope = 0.7\n")
        m = load_model(p)
        assert isinstance(m, ExponentialPoleBorn)
        assert (m.c, m.slope_b) == (1.1, 0.7)

    def test_tabulated_roundtrip(self, tmp_path):
        rows = "\n".join(f"    {q} {re} {im}"
                         for q, re, im in zip(TAB_Q, TAB_RE, TAB_IM))
        p = tmp_path / "tab.ini"
        p.write_text(f"[model]\nkind = tabulated\npoints =\n{rows}\n"
                     f"\n[envelope]\nm = {TAB_M}\nkappa = {TAB_KAPPA}\n")
        m = load_model(p)
        assert isinstance(m, TabulatedBorn)
        ref = make_tabulated()
        qs = np.linspace(0.0, 3.0, 50)
        assert np.allclose(m.reduced(qs), ref.reduced(qs), rtol=0.0,
                           atol=1e-15)

    def test_kind_case_and_whitespace(self, tmp_path):
        p = tmp_path / "g.ini"
        p.write_text("[model]\nkind =  GAUSSIAN \ng = 1.0\nlambda = 1.0\n")
        assert isinstance(load_model(p), GaussianBorn)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ModelFileError, match="cannot read"):
            load_model(tmp_path / "absent.ini")

    def test_parse_error(self, tmp_path):
        p = tmp_path / "bad.ini"
        p.write_text("this is not an ini file\n")
        with pytest.raises(ModelFileError, match="parse error"):
            load_model(p)

    def test_missing_model_section(self, tmp_path):
        p = tmp_path / "bad.ini"
        p.write_text("[envelope]\nm = 1.0\nkappa = 1.0\n")
        with pytest.raises(ModelFileError, match=r"missing \[model\]"):
            load_model(p)

    def test_unknown_kind(self, tmp_path):
        p = tmp_path / "bad.ini"
        p.write_text("[model]\nkind = yukawa\n")
        with pytest.raises(ModelFileError, match="unknown kind"):
            load_model(p)

    def test_missing_key(self, tmp_path):
        p = tmp_path / "bad.ini"
        p.write_text("[model]\nkind = gaussian\ng = 1.0\n")
        with pytest.raises(ModelFileError, match="missing key 'lambda'"):
            load_model(p)

    def test_non_numeric_value(self, tmp_path):
        p = tmp_path / "bad.ini"
        p.write_text("[model]\nkind = gaussian\ng = strong\nlambda = 1.0\n")
        with pytest.raises(ModelFileError, match="not a number"):
            load_model(p)

    def test_tabulated_missing_points(self, tmp_path):
        p = tmp_path / "bad.ini"
        p.write_text("[model]\nkind = tabulated\n\n[envelope]\nm = 1.0\n"
                     "kappa = 1.0\n")
        with pytest.raises(ModelFileError, match="needs 'points'"):
            load_model(p)

    def test_tabulated_short_row(self, tmp_path):
        p = tmp_path / "bad.ini"
        p.write_text("[model]\nkind = tabulated\npoints =\n    0.0 1.0\n"
                     "\n[envelope]\nm = 1.0\nkappa = 1.0\n")
        with pytest.raises(ModelFileError, match="needs 'q re im'"):
            load_model(p)

    def test_tabulated_non_numeric_row(self, tmp_path):
        p = tmp_path / "bad.ini"
        p.write_text("[model]\nkind = tabulated\npoints =\n    0.0 x 1.0\n"
                     "\n[envelope]\nm = 1.0\nkappa = 1.0\n")
        with pytest.raises(ModelFileError, match="non-numeric points row"):
            load_model(p)

    def test_tabulated_missing_envelope(self, tmp_path):
        p = tmp_path / "bad.ini"
        p.write_text("[model]\nkind = tabulated\npoints =\n    0.0 1.0 0.0\n"
                     "    1.0 0.5 0.0\n    2.0 0.2 0.0\n")
        with pytest.raises(ModelFileError, match=r"\[envelope\]"):
            load_model(p)

    def test_constructor_errors_are_wrapped(self, tmp_path):
        p = tmp_path / "bad.ini"
        p.write_text("[model]\nkind = gaussian\ng = -1.0\nlambda = 1.0\n")
        with pytest.raises(ModelFileError, match="invalid model parameters"):
            load_model(p)
