import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from minimax_detect.core import LengthMismatch, ValidationError
from minimax_detect.infotheory import kl_divergence
from minimax_detect.losses import ace_loss, evaluate_loss, fr_loss, gini_loss, kl_loss

# frozen with mpmath at 30 digits
ACE_HALF_QUARTER = 0.836988216785835773
KL_09_01 = 1.75777966186897554
FR_HALF_09 = 0.927295218001612232
GINI_UNIFORM10 = 0.683772233983162067
GINI_HALF = 0.292893218813452476

TOL = 1e-9


@st.composite
def distributions(draw, c=None):
    n = c if c is not None else draw(st.integers(2, 10))
    raw = draw(st.lists(st.floats(min_value=1e-4, max_value=1.0), min_size=n, max_size=n))
    p = np.asarray(raw)
    return p / p.sum()


class TestACE:
    def test_confident_match(self):
        assert ace_loss([0, 1, 0], [0, 1, 0]) == pytest.approx(0.0, abs=TOL)

    def test_half(self):
        assert ace_loss([1, 0], [0.5, 0.5]) == pytest.approx(math.log(2), abs=TOL)

    def test_soft_truth(self):
        assert ace_loss([0.5, 0.5], [0.25, 0.75]) == pytest.approx(ACE_HALF_QUARTER, abs=TOL)

    def test_zero_adv_is_clamped(self):
        assert ace_loss([1, 0], [0, 1]) == pytest.approx(-math.log(1e-12))


class TestKL:
    def test_equal(self):
        assert kl_loss([0.2, 0.3, 0.5], [0.2, 0.3, 0.5]) == pytest.approx(0.0, abs=TOL)

    def test_point_mass(self):
        assert kl_loss([1, 0], [0.5, 0.5]) == pytest.approx(math.log(2), abs=TOL)

    def test_matches_infotheory(self):
        assert kl_loss([0.9, 0.1], [0.1, 0.9]) == pytest.approx(KL_09_01, abs=TOL)
        assert kl_loss([0.9, 0.1], [0.1, 0.9]) == pytest.approx(
            kl_divergence([0.9, 0.1], [0.1, 0.9]), abs=1e-15)


class TestFR:
    def test_equal(self):
        assert fr_loss([0.3, 0.7], [0.3, 0.7]) == pytest.approx(0.0, abs=1e-12)

    def test_disjoint(self):
        assert fr_loss([1, 0], [0, 1]) == pytest.approx(math.pi, abs=TOL)

    def test_shifted(self):
        # 2 arccos(sqrt(0.45) + sqrt(0.05))
        assert fr_loss([0.5, 0.5], [0.9, 0.1]) == pytest.approx(FR_HALF_09, abs=TOL)


class TestGini:
    def test_one_hot(self):
        assert gini_loss([0, 0, 1]) == pytest.approx(0.0, abs=TOL)

    def test_uniform_ten(self):
        assert gini_loss(np.full(10, 0.1)) == pytest.approx(GINI_UNIFORM10, abs=TOL)

    def test_half(self):
        assert gini_loss([0.5, 0.5]) == pytest.approx(GINI_HALF, abs=TOL)

    @given(distributions(), distributions())
    def test_ignores_clean(self, a, b):
        assert evaluate_loss("Gini", a, b) == gini_loss(b)


def test_length_mismatch():
    for fn in (ace_loss, kl_loss, fr_loss):
        with pytest.raises(LengthMismatch):
            fn([0.5, 0.5], [0.2, 0.3, 0.5])


@pytest.mark.parametrize("bad", [[1.0], [0.6, 0.6], [-0.1, 1.1]])
def test_invalid_distribution(bad):
    with pytest.raises(ValidationError):
        gini_loss(bad)


def test_unknown_name():
    with pytest.raises(ValidationError):
        evaluate_loss("hinge", [0.5, 0.5], [0.5, 0.5])


@settings(max_examples=100)
@given(st.integers(2, 8).flatmap(lambda c: st.tuples(distributions(c), distributions(c))))
def test_fr_symmetric(pair):
    p, q = pair
    assert fr_loss(p, q) == pytest.approx(fr_loss(q, p), abs=1e-12)
    assert 0.0 <= fr_loss(p, q) <= math.pi


def test_kl_asymmetric():
    p, q = [0.9, 0.1], [0.5, 0.5]
    assert abs(kl_loss(p, q) - kl_loss(q, p)) > 1e-3


@given(distributions())
def test_nonnegative(p):
    uniform = np.full(p.size, 1 / p.size)
    assert kl_loss(p, uniform) >= 0
    assert ace_loss(p, uniform) >= 0
    assert 0 <= gini_loss(p) < 1
