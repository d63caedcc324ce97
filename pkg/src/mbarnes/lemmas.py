"""Closed-form evaluation of Barnes-type integrals by template matching.

Gamma factors are labelled by the sign of z only: ``Gamma(alpha - z)``
contributes right poles, ``Gamma(beta + z)`` left poles.  Every template
result depends on the offsets only through pair sums ``alpha + beta`` (and
gamma offsets), so the labelling order never matters.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field, replace
from typing import Optional

from .errors import ConstraintViolation, NoMatch, ShapeMismatch
from .symexpr import (Assignment, ClosedForm, CoefExpr, LinExpr, MBIntegrand, OnePlus,
                      canonicalize, render, shift_variable)


class Rule(enum.Enum):
    BASIC = "Basic"
    BARNES1 = "Barnes1"
    BARNES2 = "Barnes2"
    ADDITIONAL = "Additional"


@dataclass(frozen=True)
class ValidityCondition:
    """``NotNonpositiveInteger(e)`` or ``PositiveRealPart(e)``."""

    kind: str
    expr: LinExpr

    NOT_NONPOSITIVE_INTEGER = "NotNonpositiveInteger"
    POSITIVE_REAL_PART = "PositiveRealPart"

    def __post_init__(self):
        if self.kind not in (self.NOT_NONPOSITIVE_INTEGER, self.POSITIVE_REAL_PART):
            raise ValueError(f"unknown condition kind {self.kind!r}")

    def holds(self, a: Optional[Assignment] = None) -> Optional[bool]:
        """True/False when decidable, None if symbols remain and no assignment is given."""
        e = self.expr
        if e.is_constant:
            c = e.const
            if self.kind == self.POSITIVE_REAL_PART:
                return c > 0
            return not (c.denominator == 1 and c <= 0)
        if a is None:
            return None
        v = e.evaluate(a)
        if self.kind == self.POSITIVE_REAL_PART:
            return v.real > 0
        n = round(v.real)
        return not (abs(v.imag) < 1e-12 and abs(v.real - n) < 1e-12 and n <= 0)

    def render(self) -> str:
        return f"{self.kind}({self.expr.render()})"

    def __str__(self):
        return self.render()


def _nni(e):
    return ValidityCondition(ValidityCondition.NOT_NONPOSITIVE_INTEGER, e)


def _prp(e):
    return ValidityCondition(ValidityCondition.POSITIVE_REAL_PART, e)


@dataclass(frozen=True)
class SimplifyResult:
    closed: ClosedForm
    rule: Rule
    shift_applied: LinExpr = LinExpr()
    conditions: tuple = ()
    steps: tuple = field(default=(), compare=False)

    def violated(self, a: Optional[Assignment] = None) -> list:
        return [c for c in self.conditions if c.holds(a) is False]

    def undecided(self) -> list:
        return [c for c in self.conditions if c.holds(None) is None]

    def render(self) -> str:
        lines = [f"rule: {self.rule.value}",
                 f"shift: {self.shift_applied.render()}",
                 f"closed: {render(self.closed)}",
                 "conditions:"]
        lines += [f"  {c.render()}" for c in self.conditions]
        return "\n".join(lines)


def _split(f: MBIntegrand):
    alphas = [g.offset for g in f.num if g.zsign < 0]
    betas = [g.offset for g in f.num if g.zsign > 0]
    return alphas, betas


def _shape(f: MBIntegrand, n_alpha: int, n_beta: int, n_den: int):
    alphas, betas = _split(f)
    if (len(alphas), len(betas), len(f.den)) != (n_alpha, n_beta, n_den):
        raise ShapeMismatch(
            f"needs {n_alpha} Gamma(.-z), {n_beta} Gamma(.+z) and {n_den} denominator gammas, "
            f"found {len(alphas)}, {len(betas)}, {len(f.den)}")
    return alphas, betas


def _require_neutral(f: MBIntegrand):
    if not f.kin.is_neutral:
        raise ShapeMismatch("power or phase factor present")


def match_basic(f: MBIntegrand) -> SimplifyResult:
    """Gamma(alpha-z) Gamma(beta+z) (r e^{i pi p})^z, the shifted basic MB identity."""
    (alpha,), (beta,) = _shape(f, 1, 1, 0)
    r, p = f.kin.base, f.kin.phase
    total = alpha + beta
    coef = f.coef * CoefExpr(phase=alpha * p, powers=((r, alpha), (OnePlus(r, p), -total)))
    conditions = [_nni(total)]
    if p:
        # the e^{i pi p z} factor cancels the damping at one end
        conditions.append(_prp(-total))
    return SimplifyResult(ClosedForm((total,), (), coef), Rule.BASIC, LinExpr(), tuple(conditions))


def match_barnes1(f: MBIntegrand) -> SimplifyResult:
    alphas, betas = _shape(f, 2, 2, 0)
    _require_neutral(f)
    pairs = [a + b for a in alphas for b in betas]
    total = alphas[0] + alphas[1] + betas[0] + betas[1]
    closed = ClosedForm(tuple(pairs), (total,), f.coef)
    return SimplifyResult(closed, Rule.BARNES1, LinExpr(), tuple(_nni(e) for e in pairs))


def _barnes2_parts(f: MBIntegrand):
    alphas, betas = _shape(f, 2, 3, 1)
    _require_neutral(f)
    (g,) = f.den
    if g.zsign < 0:
        raise ShapeMismatch("denominator gamma must be Gamma(.+z)")
    residual = g.offset - (alphas[0] + alphas[1] + betas[0] + betas[1] + betas[2])
    if not residual.is_zero:
        raise ConstraintViolation(
            f"denominator offset differs from a1+a2+b1+b2+b3 by {residual.render()}", residual)
    return alphas, betas


def match_barnes2(f: MBIntegrand) -> SimplifyResult:
    alphas, betas = _barnes2_parts(f)
    a_sum = alphas[0] + alphas[1]
    pairs = [a + b for a in alphas for b in betas]
    den = [a_sum + b + c for b, c in itertools.combinations(betas, 2)]
    closed = ClosedForm(tuple(pairs), tuple(den), f.coef)
    return SimplifyResult(closed, Rule.BARNES2, LinExpr(), tuple(_nni(e) for e in pairs))


def match_additional(f: MBIntegrand) -> SimplifyResult:
    """e^{+-i pi z} Gamma(alpha-z) Gamma(b1+z) Gamma(b2+z) / Gamma(gamma+z)."""
    (alpha,), betas = _shape(f, 1, 2, 1)
    (g,) = f.den
    if g.zsign < 0:
        raise ShapeMismatch("denominator gamma must be Gamma(.+z)")
    if not f.kin.has_unit_base:
        raise ShapeMismatch("power factor r^z with r != 1")
    p = f.kin.phase
    if p == 0:
        raise ShapeMismatch("phase factor exp(+-i pi z) missing")
    gamma = g.offset
    b1, b2 = betas
    excess = gamma - alpha - b1 - b2
    closed = ClosedForm((alpha + b1, alpha + b2, excess), (gamma - b1, gamma - b2),
                        f.coef * CoefExpr(phase=alpha * p))
    conditions = (_nni(alpha + b1), _nni(alpha + b2), _prp(excess))
    return SimplifyResult(closed, Rule.ADDITIONAL, LinExpr(), conditions)


_DISPATCH = (
    (Rule.BARNES2, match_barnes2),
    (Rule.BARNES1, match_barnes1),
    (Rule.ADDITIONAL, match_additional),
    (Rule.BASIC, match_basic),
)


def canonical_shift(f: MBIntegrand) -> LinExpr:
    """Shift that zeroes the constant part of the first Gamma(.+z) offset."""
    betas = [g.offset for g in f.num if g.zsign > 0]
    if not betas:
        return LinExpr()
    return LinExpr(const=-betas[0].const)


def simplify(f: MBIntegrand) -> SimplifyResult:
    reasons = {}
    shifts = [LinExpr()]
    c = canonical_shift(f)
    if not c.is_zero:
        shifts.append(c)
    for rule, matcher in _DISPATCH:
        for c in shifts:
            try:
                res = matcher(shift_variable(f, c))
            except ShapeMismatch as exc:
                reasons.setdefault(rule.value, str(exc))
                continue
            return replace(res, closed=canonicalize(res.closed), shift_applied=c)
    raise NoMatch(reasons)


def _fresh(taken, stem="s"):
    name, k = stem, 0
    while name in taken:
        k += 1
        name = f"{stem}{k}"
    return name


def derive_barnes2_via_barnes1(f: MBIntegrand) -> SimplifyResult:
    """Second lemma from three applications of the first one.

    1. Gamma(b2+z) Gamma(b3+z) / Gamma(a1+a2+b1+b2+b3+z) is rewritten as an
       s-integral of Gamma(z-s) Gamma(a1+a2+b1-s) Gamma(b2+s) Gamma(b3+s)
       (first lemma read right to left; checked by applying it forward);
    2. the z-integral of Gamma(a1-z) Gamma(a2-z) Gamma(b1+z) Gamma(z-s) is
       done by the first lemma;
    3. the remaining s-integral is again of first-lemma type.
    """
    expected = match_barnes2(f)
    (a1, a2), (b1, b2, b3) = _split(f)
    z = f.var
    s = _fresh(f.symbols | {z})
    zl, sl = LinExpr.symbol(z), LinExpr.symbol(s)
    steps = []

    # step 1
    inner_args = (zl - sl, a1 + a2 + b1 - sl, b2 + sl, b3 + sl)
    inner = MBIntegrand.from_args(s, inner_args)
    prefactor = ClosedForm((), (a1 + a2 + b1 + b2, a1 + a2 + b1 + b3))
    replaced = ClosedForm((b2 + zl, b3 + zl), (a1 + a2 + b1 + b2 + b3 + zl,))
    check = canonicalize(prefactor * match_barnes1(inner).closed)
    if check != canonicalize(replaced):
        raise AssertionError(f"step 1 mismatch: {render(check)} != {render(replaced)}")
    steps.append(f"{render(replaced)} = {render(prefactor)} * {render(inner)}")

    # step 2
    z_int = MBIntegrand.from_args(z, (a1 - zl, a2 - zl, b1 + zl, zl - sl))
    z_res = match_barnes1(z_int).closed
    steps.append(f"{render(z_int)} = {render(z_res)}")

    # step 3
    s_cf = z_res * ClosedForm((a1 + a2 + b1 - sl, b2 + sl, b3 + sl))
    s_int = MBIntegrand.from_args(s, s_cf.num, s_cf.den, coef=s_cf.coef)
    s_res = match_barnes1(s_int).closed
    steps.append(f"{render(s_int)} = {render(s_res)}")

    closed = canonicalize(prefactor * s_res * ClosedForm(coef=f.coef))
    return SimplifyResult(closed, Rule.BARNES2, LinExpr(), expected.conditions, tuple(steps))
