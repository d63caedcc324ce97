import math
import warnings

import pytest

from mbarnes import Verdict, analyze_convergence, gamma_magnitude_asymptotic, parse, strip
from mbarnes.analysis import tail_bound
from mbarnes.numerics import ln_gamma

B1 = parse("MB[z; Gamma(a1-z)*Gamma(a2-z)*Gamma(b1+z)*Gamma(b2+z)]")
ADD = parse("MB[z; phase(+1)*Gamma(a-z)*Gamma(b1+z)*Gamma(b2+z)/Gamma(g+z)]")
ADD_M = parse("MB[z; phase(-1)*Gamma(a-z)*Gamma(b1+z)*Gamma(b2+z)/Gamma(g+z)]")
HALF = {"a1": 0.5, "a2": 0.5, "b1": 0.5, "b2": 0.5}


def test_gamma_asymptotic_values():
    assert gamma_magnitude_asymptotic(0.5, 50) == pytest.approx(
        math.sqrt(2 * math.pi) * math.exp(-25 * math.pi), rel=1e-14)
    assert gamma_magnitude_asymptotic(0.5, 7.0) == gamma_magnitude_asymptotic(0.5, -7.0)
    exact = math.exp(ln_gamma(1 + 50j).real)
    assert exact == pytest.approx(gamma_magnitude_asymptotic(1.0, 50), rel=0.01)


def test_strip_examples():
    s = strip(B1, HALF)
    assert (s.lower, s.upper) == (-0.5, 0.5)
    s = strip(B1, {"a1": 1, "a2": 2, "b1": 0.5, "b2": 0.5})
    assert (s.lower, s.upper) == (-0.5, 1)
    f = parse("MB[z; Gamma(a-z)*Gamma(b+z)]")
    s = strip(f, {"a": -0.3, "b": 0.1})
    assert not s.nonempty
    assert (s.lower, s.upper) == pytest.approx((-0.1, -0.3))
    assert s.describe_failure() == "no straight contour: Re(a+b) = -0.2 ≤ 0"


def _additional(excess):
    return {"a": 0.5, "b1": 0.5, "b2": 0.5, "g": 1.5 + excess}


def test_phase_divergent_downward():
    a = _additional(-0.5)
    rep = analyze_convergence(ADD, a, 0.0)
    assert rep.verdict_up is Verdict.EXPONENTIAL
    assert rep.verdict_down is Verdict.DIVERGENT
    assert rep.poly_down == pytest.approx(-0.5)
    assert rep.exp_down == pytest.approx(0.0)


def test_phase_polynomial_downward():
    rep = analyze_convergence(ADD, _additional(0.5), 0.0)
    assert rep.verdict_down is Verdict.POLYNOMIAL
    assert rep.poly_down == pytest.approx(-1.5)
    assert rep.convergent
    assert rep.describe(-1) == "|Im z|^(-1.5) convergent"


def test_barnes1_exponential():
    rep = analyze_convergence(B1, HALF, 0.0)
    assert rep.exp_up == rep.exp_down == -2
    assert rep.verdict_up is rep.verdict_down is Verdict.EXPONENTIAL


def test_basic_phase_divergent():
    f = parse("MB[z; phase(+1)*pow(rho)*Gamma(-z)*Gamma(lam+z)]")
    rep = analyze_convergence(f, {"rho": 0.5, "lam": 0.5}, -0.25)
    assert rep.verdict_down is Verdict.DIVERGENT
    assert rep.poly_down == pytest.approx(-0.5)


def test_phase_flip_swaps():
    a = _additional(0.3)
    up = analyze_convergence(ADD, a, 0.1)
    down = analyze_convergence(ADD_M, a, 0.1)
    assert (up.exp_up, up.poly_up, up.verdict_up) == (down.exp_down, down.poly_down, down.verdict_down)
    assert (up.exp_down, up.poly_down, up.verdict_down) == (down.exp_up, down.poly_up, down.verdict_up)


def test_outside_strip_warns():
    with pytest.warns(UserWarning):
        analyze_convergence(B1, HALF, 0.9)


def test_unbalanced_is_heuristic():
    f = parse("MB[z; Gamma(a-z)*Gamma(b+z)*Gamma(c+z)]")
    with pytest.warns(UserWarning):
        rep = analyze_convergence(f, {"a": 0.5, "b": 0.5, "c": 0.5}, 0.0)
    assert rep.heuristic


def test_tail_bound_monotone_and_honest():
    a = _additional(0.5)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        b1 = tail_bound(ADD, a, 0.0, 100.0, -1)
        b2 = tail_bound(ADD, a, 0.0, 1000.0, -1)
    assert 0 < b2 < b1
    assert math.isinf(tail_bound(ADD, _additional(-0.3), 0.0, 100.0, -1))
