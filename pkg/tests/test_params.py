import math

import pytest

from pdmosc.errors import DomainError, UnboundError
from pdmosc.params import ModelParams


def test_defaults_are_undeformed():
    P = ModelParams()
    assert P.is_undeformed
    assert P.sigma0 == 1.0
    assert P.W_gamma == math.inf
    assert P.wall == -math.inf


def test_derived_scales():
    P = ModelParams(m0=2.0, omega0=0.5, hbar=1.5, gamma=0.3)
    assert P.sigma0 == pytest.approx(math.sqrt(1.5))
    assert P.gamma_sigma0 == pytest.approx(0.3 * math.sqrt(1.5))
    assert P.s == pytest.approx(1.0 / (0.09 * 1.5))
    assert P.W_gamma == pytest.approx(2.0 * 0.25 / (2 * 0.09))


def test_from_gamma_sigma0_round_trip():
    P = ModelParams.from_gamma_sigma0(0.3, m0=2.0, omega0=3.0, hbar=0.5)
    assert P.gamma_sigma0 == pytest.approx(0.3, rel=1e-15)


@pytest.mark.parametrize("kw", [{"m0": 0.0}, {"omega0": -1.0}, {"hbar": math.nan}, {"gamma": -0.1},
                                {"gamma": math.inf}])
def test_rejects_invalid(kw):
    with pytest.raises(DomainError) as exc:
        ModelParams(**kw)
    assert exc.value.parameter == next(iter(kw))


def test_s_undefined_without_deformation():
    with pytest.raises(DomainError):
        ModelParams().s


def test_no_bound_states_beyond_sqrt2():
    with pytest.raises(UnboundError):
        ModelParams.from_gamma_sigma0(1.5).require_bound_ground()
    ModelParams.from_gamma_sigma0(1.4).require_bound_ground()


def test_underflowing_deformation_rejected():
    with pytest.raises(DomainError):
        ModelParams(gamma=1e-200)
    assert ModelParams.from_gamma_sigma0(1e-140).s > 1e279
