import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zonecmc.elliptic import (EllipticArgs, amplitude_of, delta_identity, delta_of,
                              ellip_dEdk, ellip_dFdk, ellip_E, ellip_F, modulus_of,
                              zone_args)
from zonecmc.errors import DomainError, ModulusDomain, SingularModulus
from zonecmc.rigidity import fd_derivative

# frozen from an independent mpmath evaluation of the defining integrals (40 digits)
F_ORACLE = 0.3046636928274536779   # F(1.0062, 0.3)
E_ORACLE = 0.29546370277924628082  # E(1.0062, 0.3)


def test_k_zero_reduces_to_amplitude():
    assert ellip_F(0.0, 0.7) == 0.7
    assert ellip_E(0.0, 0.7) == 0.7


def test_k_one_closed_forms():
    a = 0.6
    th = math.acos(a)
    assert ellip_F(1.0, th) == pytest.approx(math.log((1 + math.sqrt(1 - a * a)) / a),
                                             abs=1e-14)
    assert ellip_E(1.0, th) == pytest.approx(math.sqrt(1 - a * a), abs=1e-15)


def test_k_one_closed_form_matches_quadrature_nearby():
    th = math.acos(0.6)
    assert ellip_F(1.0 - 1e-9, th) == pytest.approx(ellip_F(1.0, th), abs=1e-8)


def test_modulus_above_one_against_oracle():
    args = EllipticArgs(1.0062, 0.3)
    assert ellip_F(args) == pytest.approx(F_ORACLE, abs=1e-12)
    assert ellip_E(args) == pytest.approx(E_ORACLE, abs=1e-12)


def test_modulus_guard():
    with pytest.raises(ModulusDomain):
        EllipticArgs(2.0, math.pi / 2)
    with pytest.raises(DomainError):
        EllipticArgs(0.5, 2.0)


def test_dFdk_singular_at_one():
    with pytest.raises(SingularModulus):
        ellip_dFdk(1.0, 0.5)


def test_dEdk_at_zero_modulus():
    assert ellip_dEdk(0.0, 1.1) == 0.0


@pytest.mark.parametrize("fun,dfun", [(ellip_F, ellip_dFdk), (ellip_E, ellip_dEdk)])
def test_parameter_derivatives_match_finite_differences(fun, dfun):
    th = math.pi / 4
    fd = fd_derivative(lambda k: fun(k, th), 0.5, 1, steps=(1e-2, 5e-3, 2.5e-3))
    assert dfun(0.5, th) == pytest.approx(fd, abs=1e-8)


@pytest.mark.parametrize("k,th", [(0.3, 0.4), (0.9, 1.0), (1.05, 0.6)])
def test_amplitude_derivatives(k, th):
    dF = fd_derivative(lambda x: ellip_F(k, x), th, 1, steps=(1e-2, 5e-3, 2.5e-3))
    dE = fd_derivative(lambda x: ellip_E(k, x), th, 1, steps=(1e-2, 5e-3, 2.5e-3))
    assert dF == pytest.approx(1.0 / delta_of(k, th), abs=1e-8)
    assert dE == pytest.approx(delta_of(k, th), abs=1e-8)


@settings(max_examples=40, deadline=None)
@given(k=st.floats(0.0, 0.99), th1=st.floats(0.01, 1.5), th2=st.floats(0.01, 1.5))
def test_monotone_in_amplitude_and_ordering(k, th1, th2):
    lo, hi = sorted((th1, th2))
    if hi - lo < 1e-6:
        return
    assert ellip_F(k, lo) < ellip_F(k, hi)
    assert ellip_E(k, lo) < ellip_E(k, hi)
    F, E = ellip_F(k, hi), ellip_E(k, hi)
    assert F >= hi - 1e-15 and hi >= E - 1e-15
    if k > 1e-3:
        assert F > hi > E


def test_zone_bookkeeping():
    assert modulus_of(1.0) == 1.0
    assert amplitude_of(0.5, 1.0) == pytest.approx(math.pi / 3, abs=1e-15)
    assert delta_of(zone_args(0.5, 1.0)) == pytest.approx(0.5, abs=1e-15)
    args = zone_args(0.7, 0.95)
    assert abs(delta_of(args) - delta_identity(0.7, 0.95)) < 1e-12


@settings(max_examples=50, deadline=None)
@given(a=st.floats(0.1, 0.95), frac=st.floats(-0.9, 0.9))
def test_delta_identity_on_zone_args(a, frac):
    t = 1.0 + frac * min(a, 0.45)
    if not a <= t:
        return
    args = zone_args(a, t)
    assert abs(delta_of(args) - delta_identity(a, t)) < 1e-12


def test_zone_args_guard():
    with pytest.raises(DomainError):
        zone_args(0.1, 1.2)
    with pytest.raises(DomainError):
        modulus_of(0.5)
