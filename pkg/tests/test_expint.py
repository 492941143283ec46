"""Exponential integral E1: accuracy against the independent oracle."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vortexblob.errors import DomainError
from vortexblob.expint import CUTOFF, E1Regime, e1_reference, exp_integral_e1

# Reference values computed with the series / continued-fraction oracle
# (agrees with 50-digit arbitrary-precision evaluation to ~4e-16).
KNOWN_VALUES = {
    1e-12: 27.053805451028012,
    0.5: 0.5597735947761609,
    1.0: 0.21938393439552029,
    2.0: 0.04890051070806112,
    10.0: 4.156968929685325e-06,
    30.0: 3.0215520106888124e-15,
}


@pytest.mark.parametrize("x,expected", sorted(KNOWN_VALUES.items()))
def test_known_values(x, expected):
    assert exp_integral_e1(x) == pytest.approx(expected, rel=5e-15)


def test_matches_oracle_on_dense_grid():
    xs = np.minimum(np.exp(np.linspace(np.log(1e-12), np.log(CUTOFF), 20000)), CUTOFF)
    vals = exp_integral_e1(xs)
    refs = np.array([e1_reference(x) for x in xs])
    rel = np.abs(vals - refs) / np.abs(refs)
    assert rel.max() <= 5e-15


def test_exactly_zero_above_cutoff():
    assert exp_integral_e1(CUTOFF + 1e-9) == 0.0
    assert exp_integral_e1(1000.0) == 0.0
    out = exp_integral_e1(np.array([35.0, 50.0, 1e6]))
    assert np.all(out == 0.0)


def test_continuous_across_regime_boundaries():
    for boundary in E1Regime.boundaries():
        below = exp_integral_e1(boundary * (1.0 - 1e-12))
        above = exp_integral_e1(boundary * (1.0 + 1e-12))
        if above != 0.0:  # above the hard cutoff both sides are ~0 anyway
            assert below == pytest.approx(above, rel=1e-10)


def test_rejects_nonpositive_and_nonfinite():
    for bad in (0.0, -1.0, np.nan, np.inf):
        with pytest.raises(DomainError):
            exp_integral_e1(bad)
    with pytest.raises(DomainError):
        exp_integral_e1(np.array([1.0, -2.0]))


def test_scalar_and_array_agree():
    xs = np.array([1e-6, 0.3, 1.0, 5.0, 33.9])
    vec = exp_integral_e1(xs)
    assert vec.shape == xs.shape
    for x, v in zip(xs, vec):
        assert exp_integral_e1(float(x)) == v


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=-27.5, max_value=3.526))
def test_oracle_agreement_property(log_x):
    x = float(np.exp(log_x))  # log-uniform over ~[1e-12, 34]
    ref = e1_reference(x)
    assert abs(exp_integral_e1(x) - ref) <= 5e-15 * abs(ref)


@settings(max_examples=100, deadline=None)
@given(
    st.floats(min_value=1e-10, max_value=33.0),
    st.floats(min_value=1.0001, max_value=1.03),
)
def test_strictly_decreasing(x, factor):
    assert exp_integral_e1(x) > exp_integral_e1(x * factor) > 0.0
