"""Straight-contour strip and large-|Im z| behaviour of MB integrands.

With ``z = x0 + i*y`` each gamma factor behaves like
``sqrt(2 pi) * exp(-pi*|Y|/2) * |Y|**(X - 1/2)`` for its own ``X + iY``,
so the integrand magnitude is ``C * exp(pi * E * |y|) * |y|**q`` in each
direction.  ``E`` (the exponential coefficient, in units of ``pi*|y|``)
and ``q`` decide convergence before any quadrature is attempted.
"""
from __future__ import annotations

import cmath
import enum
import math
import warnings
from dataclasses import dataclass
from typing import Optional

from .symexpr import Assignment, LinExpr, MBIntegrand, substitute

_EPS = 1e-12


def gamma_magnitude_asymptotic(x: float, y: float) -> float:
    """Leading large-|y| magnitude of Gamma(x + i*y)."""
    ay = abs(y)
    return math.sqrt(2 * math.pi) * math.exp(-ay * math.pi / 2) * ay ** (x - 0.5)


@dataclass(frozen=True)
class Strip:
    """Real-part interval of admissible straight contours.

    ``alpha``/``beta`` are the offsets that realise the two bounds (None for
    an unbounded side); ``alpha + beta`` is the tightest pair sum.
    """

    lower: float
    upper: float
    alpha: Optional[LinExpr] = None
    beta: Optional[LinExpr] = None

    @property
    def nonempty(self) -> bool:
        return self.lower < self.upper

    @property
    def midpoint(self) -> float:
        lo, hi = self.lower, self.upper
        if math.isinf(lo) and math.isinf(hi):
            return 0.0
        if math.isinf(lo):
            return hi - 1.0
        if math.isinf(hi):
            return lo + 1.0
        return 0.5 * (lo + hi)

    def contains(self, x0: float) -> bool:
        return self.lower < x0 < self.upper

    def describe_failure(self) -> str:
        pair = (self.alpha + self.beta).render()
        return (f"no straight contour: Re({pair}) = {self.upper - self.lower:.6g} ≤ 0")


def strip(f: MBIntegrand, a: Assignment) -> Strip:
    lower, upper = -math.inf, math.inf
    alpha = beta = None
    for g in f.num:
        re_off = g.offset.evaluate(a).real
        if g.zsign > 0 and -re_off > lower:
            lower, beta = -re_off, g.offset
        elif g.zsign < 0 and re_off < upper:
            upper, alpha = re_off, g.offset
    return Strip(lower, upper, alpha, beta)


class Verdict(enum.Enum):
    EXPONENTIAL = "ExponentialDecay"
    POLYNOMIAL = "PolynomialDecay"
    DIVERGENT = "Divergent"


@dataclass(frozen=True)
class ConvergenceReport:
    exp_up: float
    exp_down: float
    poly_up: float
    poly_down: float
    verdict_up: Verdict
    verdict_down: Verdict
    x0: float
    heuristic: bool = False

    @property
    def convergent(self) -> bool:
        return Verdict.DIVERGENT not in (self.verdict_up, self.verdict_down)

    def exponent(self, direction: int) -> float:
        return self.exp_up if direction > 0 else self.exp_down

    def poly(self, direction: int) -> float:
        return self.poly_up if direction > 0 else self.poly_down

    def verdict(self, direction: int) -> Verdict:
        return self.verdict_up if direction > 0 else self.verdict_down

    def verdict_text(self, direction: int) -> str:
        v = self.verdict(direction)
        if v is Verdict.POLYNOMIAL:
            return f"PolynomialDecay({self.poly(direction):.6g})"
        return v.value

    def describe(self, direction: int) -> str:
        v = self.verdict(direction)
        e, q = self.exponent(direction), self.poly(direction)
        if v is Verdict.EXPONENTIAL:
            return f"exponential decay, exp({e:.6g}*pi*|Im z|)*|Im z|^({q:.6g})"
        if v is Verdict.POLYNOMIAL:
            return f"|Im z|^({q:.6g}) convergent"
        if abs(e) <= _EPS:
            return f"|Im z|^({q:.6g}) divergent"
        return f"exp({e:.6g}*pi*|Im z|) divergent"

    def to_record(self) -> dict:
        return {
            "x0": self.x0,
            "expUp": self.exp_up,
            "expDown": self.exp_down,
            "polyUp": self.poly_up,
            "polyDown": self.poly_down,
            "verdictUp": self.verdict_text(1),
            "verdictDown": self.verdict_text(-1),
            "heuristic": self.heuristic,
        }


def _classify(e: float, q: float) -> Verdict:
    if e < -_EPS:
        return Verdict.EXPONENTIAL
    if abs(e) <= _EPS and q < -1:
        return Verdict.POLYNOMIAL
    return Verdict.DIVERGENT


def net_zsign(f: MBIntegrand) -> int:
    """Sum of zsign over numerator minus denominator gammas; 0 for every lemma shape."""
    return sum(g.zsign for g in f.num) - sum(g.zsign for g in f.den)


def _kin_log(f: MBIntegrand, a: Assignment) -> complex:
    base = f.kin.base
    r = substitute(LinExpr.symbol(base), a) if isinstance(base, str) else complex(base)
    return cmath.log(r)


def analyze_convergence(f: MBIntegrand, a: Assignment, x0: float) -> ConvergenceReport:
    s = strip(f, a)
    if not s.contains(x0):
        warnings.warn(f"x0={x0} lies outside the strip ({s.lower}, {s.upper}); "
                      "analysis assumes a deformed contour", stacklevel=2)
    heuristic = net_zsign(f) != 0
    if heuristic:
        warnings.warn("integrand has unequal numbers of +z and -z gammas; "
                      "the polynomial exponent depends on x0", stacklevel=2)
    count = len(f.num) - len(f.den)
    arg_r = _kin_log(f, a).imag / math.pi
    p = f.kin.phase
    # |exp(i pi p z)| = exp(-pi p y), |r^z| = r^x0 * exp(-y arg r)
    exp_up = -count / 2 - p - arg_r
    exp_down = -count / 2 + p + arg_r
    q = 0.0
    for g in f.num:
        q += g.zsign * x0 + g.offset.evaluate(a).real - 0.5
    for g in f.den:
        q -= g.zsign * x0 + g.offset.evaluate(a).real - 0.5
    return ConvergenceReport(exp_up, exp_down, q, q, _classify(exp_up, q),
                             _classify(exp_down, q), x0, heuristic)


def asymptotic_log_magnitude(f: MBIntegrand, a: Assignment, x0: float, y: float) -> float:
    """ln|integrand(x0 + i*y)| from the termwise gamma asymptotics (large |y| only)."""
    total = 0.0
    half_log_2pi = 0.5 * math.log(2 * math.pi)
    for eps, gs in ((1, f.num), (-1, f.den)):
        for g in gs:
            o = g.offset.evaluate(a)
            X = g.zsign * x0 + o.real
            Y = abs(g.zsign * y + o.imag)
            total += eps * (half_log_2pi - math.pi * Y / 2 + (X - 0.5) * math.log(Y))
    lr = _kin_log(f, a)
    total += x0 * lr.real - y * lr.imag - math.pi * f.kin.phase * y
    c = substitute(f.coef, a)
    if c == 0:
        return -math.inf
    return total + math.log(abs(c))


def tail_bound(f: MBIntegrand, a: Assignment, x0: float, Y: float, direction: int,
               report: Optional[ConvergenceReport] = None) -> float:
    """Bound on |(1/2pi) * integral_{|y|>Y} integrand dy| on one side.

    Integrates the asymptotic magnitude from Y to infinity with a safety
    factor of 2; returns inf when the tail does not converge.
    """
    if report is None:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            report = analyze_convergence(f, a, x0)
    e, q = report.exponent(direction), report.poly(direction)
    log_m = asymptotic_log_magnitude(f, a, x0, direction * Y)
    if log_m == -math.inf:
        return 0.0
    m = math.exp(log_m)
    kappa = -math.pi * e
    if kappa > _EPS:
        rate = kappa - max(q, 0.0) / Y
        if rate <= 0:
            return math.inf
        return 2 * m / rate / (2 * math.pi)
    if abs(kappa) <= _EPS and q < -1:
        return 2 * m * Y / (-q - 1) / (2 * math.pi)
    return math.inf
