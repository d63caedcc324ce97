"""Randomised closed-form vs. quadrature verification campaigns."""
from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import MBError
from .lemmas import Rule, simplify
from .numerics import QuadResult, contour_quadrature, eval_closed
from .symexpr import MBIntegrand, parse, render

TEMPLATES = {
    Rule.BARNES1: "MB[z; Gamma(a1-z)*Gamma(a2-z)*Gamma(b1+z)*Gamma(b2+z)]",
    Rule.BARNES2: ("MB[z; Gamma(a1-z)*Gamma(a2-z)*Gamma(b1+z)*Gamma(b2+z)*Gamma(b3+z)"
                   "/Gamma(a1+a2+b1+b2+b3+z)]"),
    Rule.ADDITIONAL: "MB[z; phase({p:+d})*Gamma(a-z)*Gamma(b1+z)*Gamma(b2+z)/Gamma(g+z)]",
    Rule.BASIC: "MB[z; pow(t)*Gamma(a-z)*Gamma(b+z)]",
}

MARGIN = 0.2


def rule_from_name(name: str) -> Rule:
    for r in Rule:
        if r.value.lower() == name.lower():
            return r
    raise ValueError(f"unknown rule {name!r}; choose from {', '.join(r.value for r in Rule)}")


@dataclass(frozen=True)
class CampaignConfig:
    rule: Rule
    samples: int = 100
    seed: int = 42
    re_range: tuple = (0.1, 1.0)
    im_range: tuple = (-1.0, 1.0)
    tol: float = 1e-8
    jobs: int = 1

    def __post_init__(self):
        if isinstance(self.rule, str):
            object.__setattr__(self, "rule", rule_from_name(self.rule))
        if self.samples < 0:
            raise ValueError("samples must be nonnegative")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        lo, hi = self.re_range
        if not lo <= hi or 2 * hi < MARGIN:
            raise ValueError(f"re_range {self.re_range} cannot give pair sums >= {MARGIN}")
        if not self.im_range[0] <= self.im_range[1]:
            raise ValueError("im_range must be an ordered interval")
        if not self.tol > 0:
            raise ValueError("tol must be positive")


@dataclass
class VerifyRecord:
    integrand: str
    rule: str
    assignment: dict
    closed_value: complex
    quad_value: complex
    abs_err: float
    rel_err: float
    passed: bool
    quad_meta: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps({
            "integrand": self.integrand,
            "rule": self.rule,
            "assignment": {k: [v.real, v.imag] for k, v in self.assignment.items()},
            "closedValue": [self.closed_value.real, self.closed_value.imag],
            "quadValue": [self.quad_value.real, self.quad_value.imag],
            "absErr": self.abs_err,
            "relErr": self.rel_err,
            "pass": self.passed,
            "quadMeta": self.quad_meta,
        })


def _cplx(rng, re_lo, re_hi, im_range):
    return complex(rng.uniform(re_lo, re_hi), rng.uniform(*im_range))


def sample_assignment(rule: Rule, rng: np.random.Generator, cfg: CampaignConfig) -> dict:
    lo, hi = cfg.re_range
    if rule is Rule.ADDITIONAL:
        a = {k: _cplx(rng, lo, hi, cfg.im_range) for k in ("a", "b1", "b2")}
        excess = _cplx(rng, MARGIN, MARGIN + 1.0, cfg.im_range)
        a["g"] = complex((a["a"] + a["b1"] + a["b2"] + excess).real,
                         rng.uniform(*cfg.im_range))
        return a
    names = {Rule.BARNES1: (("a1", "a2"), ("b1", "b2")),
             Rule.BARNES2: (("a1", "a2"), ("b1", "b2", "b3")),
             Rule.BASIC: (("a",), ("b",))}[rule]
    for _ in range(1000):
        a = {k: _cplx(rng, lo, hi, cfg.im_range) for k in names[0] + names[1]}
        if min((a[x] + a[y]).real for x in names[0] for y in names[1]) >= MARGIN:
            break
    else:
        raise ValueError("could not sample an admissible assignment from re_range")
    if rule is Rule.BASIC:
        a["t"] = complex(rng.uniform(0.2, 3.0), 0.0)
    return a


def check_margins(rule: Rule, a: dict):
    if rule is Rule.ADDITIONAL:
        alphas, betas = ("a",), ("b1", "b2")
        assert (a["g"] - a["a"] - a["b1"] - a["b2"]).real >= MARGIN
    elif rule is Rule.BASIC:
        alphas, betas = ("a",), ("b",)
    else:
        alphas, betas = ("a1", "a2"), tuple(k for k in ("b1", "b2", "b3") if k in a)
    assert min((a[x] + a[y]).real for x in alphas for y in betas) >= MARGIN


def verify(f: MBIntegrand, a: dict, tol: float = 1e-8, x0=None) -> VerifyRecord:
    """Compare the closed form of ``f`` with contour quadrature at ``a``."""
    res = simplify(f)
    bad = res.violated(a)
    if bad:
        raise MBError("validity condition violated: " + ", ".join(c.render() for c in bad))
    closed = eval_closed(res.closed, a)
    q: QuadResult = contour_quadrature(f, a, x0, max(tol / 10, 1e-12))
    abs_err = abs(closed - q.value)
    rel_err = abs_err / abs(closed) if closed else abs_err
    return VerifyRecord(render(f), res.rule.value, dict(a), closed, q.value, abs_err, rel_err,
                        abs_err <= tol * (1 + abs(closed)), q.to_record())


def _one(cfg: CampaignConfig, index: int, a: dict) -> VerifyRecord:
    check_margins(cfg.rule, a)
    text = TEMPLATES[cfg.rule]
    if cfg.rule is Rule.ADDITIONAL:
        text = text.format(p=1 if index % 2 == 0 else -1)
    return verify(parse(text), a, cfg.tol)


def run_campaign(cfg: CampaignConfig, out=None) -> tuple[list, dict]:
    """Run ``cfg``; write one JSON line per record to ``out`` in sample order."""
    rng = np.random.default_rng(cfg.seed)
    assignments = [sample_assignment(cfg.rule, rng, cfg) for _ in range(cfg.samples)]
    work = ((cfg, i, a) for i, a in enumerate(assignments))
    if cfg.jobs > 1:
        with ThreadPoolExecutor(cfg.jobs) as ex:
            records: Iterable = list(ex.map(lambda args: _one(*args), work))
    else:
        records = [_one(*args) for args in work]
    records = list(records)
    if out is not None:
        for r in records:
            out.write(r.to_json() + "\n")
    passed = sum(r.passed for r in records)
    summary = {"rule": cfg.rule.value, "samples": len(records), "pass": passed,
               "fail": len(records) - passed,
               "maxRelErr": max((r.rel_err for r in records), default=0.0)}
    return records, summary
