"""Log-gamma, beta, closed-form evaluation and contour quadrature.

The contour integral ``(1/2 pi i) * integral f(z) dz`` along
``z = x0 + i*y`` equals ``(1/2 pi) * integral f(x0 + i*y) dy``.  The
integrand is always assembled in log space.

Truncation follows the convergence analysis: exponentially damped sides
are cut at the Y where the asymptotic tail bound drops below a tenth of
the tolerance.  Power-law sides (phase-factor integrands) are integrated
in ``log y`` out to a cut-off and then closed with an asymptotic tail
``|y|**Q * (c0 + c1/|y| + ...)`` fitted at the cut-off.
"""
from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import loggamma

from .analysis import (ConvergenceReport, Verdict, analyze_convergence, net_zsign, strip,
                       tail_bound)
from .errors import (DivergenceError, PinchError, PoleError, RefinementError,
                     SingularBaseError, StripError)
from .symexpr import Assignment, ClosedForm, MBIntegrand

_LOG_2PI = math.log(2 * math.pi)


def _is_pole(w: complex) -> bool:
    return abs(w.imag) < 1e-12 and w.real < 0.5 and abs(w.real - round(w.real)) < 1e-12


def ln_gamma(w) -> complex:
    """Principal-branch log Gamma(w)."""
    w = complex(w)
    if _is_pole(w):
        raise PoleError(f"Gamma has a pole at {w}")
    return complex(loggamma(w))


def beta(a, b) -> complex:
    """Euler beta function Gamma(a) Gamma(b) / Gamma(a + b)."""
    a, b = complex(a), complex(b)
    if _is_pole(a + b):
        raise PoleError(f"Gamma(a+b) has a pole at {a + b}")
    return cmath.exp(ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b))


def eval_closed(cf: ClosedForm, a: Assignment) -> complex:
    if cf.coef.const == 0:
        return 0j
    log_total = 0j
    for g in cf.num:
        log_total += ln_gamma(g.evaluate(a))
    for g in cf.den:
        w = g.evaluate(a)
        if _is_pole(w):
            return 0j  # 1/Gamma vanishes there
        log_total -= ln_gamma(w)
    return cmath.exp(log_total + cf.coef.log_value(a))


@dataclass(frozen=True)
class QuadResult:
    value: complex
    err_estimate: float
    truncation_y: float
    evaluations: int

    def to_record(self) -> dict:
        return {
            "value": [self.value.real, self.value.imag],
            "errEstimate": self.err_estimate,
            "truncationY": self.truncation_y,
            "evaluations": self.evaluations,
        }


# ---------------------------------------------------------------------------
# Compiled integrand
# ---------------------------------------------------------------------------

# B_{2j} / (2j (2j-1))
_STIRLING = (1 / 12, -1 / 360, 1 / 1260, -1 / 1680, 1 / 1188, -691 / 360360)
_BIG_Y = 256.0


def _log1p_small(x):
    # |x| < 0.05 is guaranteed by the caller
    out = np.zeros_like(x)
    term = np.ones_like(x)
    for k in range(1, 16):
        term = term * x
        out = out + (term / k if k % 2 else -term / k)
    return out


class _Integrand:
    """f(x0 + i*y) at numeric parameter values, vectorised over y."""

    def __init__(self, f: MBIntegrand, a: Assignment, x0: float):
        self.x0 = float(x0)
        s_num = [g.zsign for g in f.num]
        s_den = [g.zsign for g in f.den]
        self.s_num = np.array(s_num, dtype=float)
        self.s_den = np.array(s_den, dtype=float)
        self.o_num = np.array([g.offset.evaluate(a) for g in f.num], dtype=complex)
        self.o_den = np.array([g.offset.evaluate(a) for g in f.den], dtype=complex)
        base = f.kin.base
        r = a[base] if isinstance(base, str) else base
        r = complex(r)
        if r == 0:
            raise SingularBaseError("power base vanishes")
        self.log_r = cmath.log(r)
        self.p = f.kin.phase
        self.zero = f.coef.const == 0
        self.log_c = 0j if self.zero else f.coef.log_value(a)
        self.evaluations = 0
        self.balanced = net_zsign(f) == 0 and (len(f.num) + len(f.den)) > 0
        eps = np.concatenate([np.ones(len(s_num)), -np.ones(len(s_den))])
        s = np.concatenate([self.s_num, self.s_den])
        o = np.concatenate([self.o_num, self.o_den])
        self._eps, self._s, self._o = eps, s, o
        # exponent of the power law |y|**Q (complex) for balanced shapes
        self.Q = complex(np.sum(eps * (o - 0.5))) if len(o) else 0j
        self._n_minus = float(np.sum(eps[s < 0]))
        self._R = complex(np.sum((eps * (o - 0.5))[s < 0]))
        self._E = complex(np.sum(eps * o))
        self._G = float(np.sum(eps))
        self.switch_y = max(_BIG_Y, 40.0 * float(np.max(np.abs(o)))) if len(o) else _BIG_Y

    def _direct(self, z):
        L = np.zeros(z.shape, dtype=complex)
        if len(self.o_num):
            lg = loggamma(self.s_num[:, None] * z[None, :] + self.o_num[:, None])
            lg[np.isnan(lg)] = np.inf
            L = L + lg.sum(axis=0)
        if len(self.o_den):
            lg = loggamma(self.s_den[:, None] * z[None, :] + self.o_den[:, None])
            lg[np.isnan(lg)] = np.inf
            L = L - lg.sum(axis=0)
        return L + z * (self.log_r + 1j * math.pi * self.p)

    def _combined(self, z):
        # Stirling series summed with the z*log z pieces cancelled analytically
        eps, s, o = self._eps[:, None], self._s[:, None], self._o[:, None]
        sz = s * z[None, :]
        w = sz + o
        ell = _log1p_small(o / sz)
        winv = 1 / w
        winv2 = winv * winv
        corr = np.zeros_like(w)
        power = winv
        for c in _STIRLING:
            corr = corr + c * power
            power = power * winv2
        per_term = (w - 0.5) * ell + corr
        tau = np.where(z.imag < 0, 1.0, -1.0)
        L = (1j * math.pi * (self.p - tau * self._n_minus) * z
             + self.Q * np.log(z)
             + 1j * math.pi * tau * self._R
             - self._E + 0.5 * _LOG_2PI * self._G
             + (eps * per_term).sum(axis=0))
        return L + z * self.log_r

    def log(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        z = self.x0 + 1j * y
        self.evaluations += y.size
        if not self.balanced:
            return self._direct(z) + self.log_c
        big = np.abs(y) >= self.switch_y
        out = np.empty(y.shape, dtype=complex)
        if np.any(~big):
            out[~big] = self._direct(z[~big])
        if np.any(big):
            out[big] = self._combined(z[big])
        return out + self.log_c

    def __call__(self, y) -> np.ndarray:
        return np.exp(self.log(y))


def log_integrand(f: MBIntegrand, a: Assignment, x0: float, y) -> np.ndarray:
    """ln f(x0 + i*y) for an array of y (principal branch not guaranteed)."""
    return _Integrand(f, a, x0).log(np.atleast_1d(np.asarray(y, dtype=float)))


# ---------------------------------------------------------------------------
# Adaptive Gauss-Legendre
# ---------------------------------------------------------------------------

_GL_X, _GL_W = np.polynomial.legendre.leggauss(15)
_MAX_PANELS = 40000
_ROUNDOFF = 1e-13  # loggamma at |z| ~ 1e2..1e3 is no better than this


def _panels(fun, lo, hi):
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    pts = mid[:, None] + half[:, None] * _GL_X[None, :]
    vals = fun(pts.ravel()).reshape(pts.shape)
    return (vals @ _GL_W) * half


def _adaptive(fun, a: float, b: float, tol: float, width: float = 1.0):
    """Bisection refinement; returns (value, error estimate).

    A panel is accepted once its 15-point value agrees with the sum over its
    two halves within its length-share of ``tol``.  Accepted panels are
    summed in left-to-right order so the result is reproducible.
    """
    if b <= a:
        return 0j, 0.0
    n0 = max(1, int(math.ceil((b - a) / width)))
    edges = np.linspace(a, b, n0 + 1)
    lo, hi = edges[:-1], edges[1:]
    whole = _panels(fun, lo, hi)
    length = b - a
    done_lo, done_val, done_err = [], [], []
    while lo.size:
        mid = 0.5 * (lo + hi)
        left = _panels(fun, lo, mid)
        right = _panels(fun, mid, hi)
        fine = left + right
        err = np.abs(whole - fine)
        # a panel cannot do better than the evaluation noise in its own value
        allowed = np.maximum(tol * (hi - lo) / length, _ROUNDOFF * np.abs(fine))
        bad = ~(err <= allowed)  # NaN counts as bad
        ok = ~bad
        done_lo.extend(lo[ok])
        done_val.extend(fine[ok])
        done_err.extend(err[ok])
        if np.any(bad & ~np.isfinite(fine)):
            raise RefinementError("integrand is not finite on the contour")
        lo, hi = np.concatenate([lo[bad], mid[bad]]), np.concatenate([mid[bad], hi[bad]])
        whole = np.concatenate([left[bad], right[bad]])
        if len(done_lo) + lo.size > _MAX_PANELS:
            raise RefinementError(f"no convergence after {_MAX_PANELS} panels")
    order = np.argsort(done_lo, kind="stable")
    vals = np.asarray(done_val)[order]
    value = complex(math.fsum(vals.real), math.fsum(vals.imag))
    return value, math.fsum(done_err)


def _log_segment(ci: _Integrand, direction: int, y_from: float, y_to: float, tol: float):
    """integral over direction*[y_from, y_to] in the variable u = log|y|."""
    def fun(u):
        v = y_from * np.exp(u)
        return ci(direction * v) * v

    length = math.log(y_to / y_from)
    cuts = [0.0, length]
    if ci.balanced and y_from < ci.switch_y < y_to:
        # the two evaluators agree only to rounding; keep panels off the seam
        cuts.insert(1, math.log(ci.switch_y / y_from))
    value, err = 0j, 0.0
    for lo, hi in zip(cuts, cuts[1:]):
        v, e = _adaptive(fun, lo, hi, tol * (hi - lo) / length, width=0.5)
        value, err = value + v, err + e
    return value, err


def _line_segment(ci: _Integrand, lo: float, hi: float, tol: float):
    cuts = [lo, hi]
    if ci.balanced:
        cuts[1:1] = [c for c in (-ci.switch_y, ci.switch_y) if lo < c < hi]
    value, err = 0j, 0.0
    for a, b in zip(cuts, cuts[1:]):
        v, e = _adaptive(ci, a, b, tol * (b - a) / (hi - lo))
        value, err = value + v, err + e
    return value, err


def _power_tail(ci: _Integrand, direction: int, Y: float, K: int = 4):
    """Fitted asymptotic tail integral beyond |y| = Y and an error estimate."""
    ys = Y * 2.0 ** np.arange(K)
    h = np.exp(ci.log(direction * ys) - ci.Q * np.log(ys))
    tau = Y / ys
    Q = ci.Q
    scale = cmath.exp((Q + 1) * math.log(Y))

    def tail(k):
        d = np.linalg.solve(np.vander(tau[:k], k, increasing=True), h[:k])
        return scale * sum(d[j] / (j - Q - 1) for j in range(k))

    t_hi, t_lo = tail(K), tail(K - 1)
    return complex(t_hi), abs(t_hi - t_lo)


# ---------------------------------------------------------------------------
# Contour quadrature
# ---------------------------------------------------------------------------

_Y_EXP_CAP = 1e4
_Y_POLY_CAP = 1e8


def _core_extent(ci: _Integrand) -> float:
    ims = np.abs(np.concatenate([ci.o_num.imag, ci.o_den.imag]))
    return 10.0 + (float(ims.max()) if ims.size else 0.0)


def _direction_name(d: int) -> str:
    return "z → +i∞" if d > 0 else "z → −i∞"


def _check_contour(f: MBIntegrand, a: Assignment, x0):
    st = strip(f, a)
    if not st.nonempty:
        raise StripError(st.describe_failure())
    if x0 is None:
        x0 = st.midpoint
    if not st.contains(x0):
        raise StripError(f"x0={x0} is outside the strip ({st.lower:.6g}, {st.upper:.6g})")
    if min(st.upper - x0, x0 - st.lower) < 1e-8:
        raise PinchError(f"a pole lies within 1e-8 of the contour Re z = {x0}")
    return float(x0)


def contour_quadrature(f: MBIntegrand, a: Assignment, x0=None, tol: float = 1e-8, *,
                       y_factor: float = 1.0) -> QuadResult:
    """Numerically integrate ``f`` along the straight line Re z = x0.

    ``tol`` is relative to the size of the integral (floored at 1e-4 of
    the integral of |f|, so vanishing integrals still terminate).
    ``y_factor`` scales every truncation point; it exists so callers can
    check that the result does not move when the cut-offs are pushed out.
    """
    if not tol >= 1e-12:
        raise ValueError("tol must be at least 1e-12")
    x0 = _check_contour(f, a, x0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rep = analyze_convergence(f, a, x0)
    for d in (1, -1):
        if rep.verdict(d) is Verdict.DIVERGENT:
            raise DivergenceError(f"Divergent at {_direction_name(d)}: {rep.describe(d)}", rep)
    ci = _Integrand(f, a, x0)
    if ci.zero:
        return QuadResult(0j, 0.0, 0.0, 0)

    ys = _core_extent(ci)
    grid = np.linspace(-ys, ys, 40 * int(ys) + 1)
    vals = ci(grid)
    dy = grid[1] - grid[0]
    rough = abs(np.sum(vals)) * dy / (2 * math.pi)
    l1 = np.sum(np.abs(vals)) * dy / (2 * math.pi)
    target = tol * max(rough, 1e-4 * l1, 1e-300)

    total = 0j
    err = 0.0
    ymax = 0.0
    core = {}
    for d in (1, -1):
        if rep.verdict(d) is Verdict.EXPONENTIAL:
            Y = ys
            while tail_bound(f, a, x0, Y, d, rep) > target / 10:
                Y *= 1.25
                if Y > _Y_EXP_CAP:
                    raise RefinementError("exponential tail bound not reached")
            Y *= y_factor
            core[d] = Y
            err += tail_bound(f, a, x0, Y, d, rep)
            ymax = max(ymax, Y)
        else:
            core[d] = ys
            value, e, Y = _power_side(f, a, x0, ci, rep, d, ys, target, y_factor)
            total += value
            err += e
            ymax = max(ymax, Y)
    value, e = _line_segment(ci, -core[-1], core[1], target / 4)
    total += value / (2 * math.pi)
    err += e / (2 * math.pi)
    return QuadResult(complex(total), float(err), float(ymax), int(ci.evaluations))


def _power_side(f, a, x0, ci, rep: ConvergenceReport, d: int, ys: float, target: float,
                y_factor: float):
    """Contribution of direction d beyond |y| = ys for a power-law tail."""
    if not ci.balanced:
        # no reliable asymptotic form: plain truncation with the analytic bound
        Y = ys
        while tail_bound(f, a, x0, Y, d, rep) > target / 10:
            Y *= 2
            if Y > _Y_POLY_CAP:
                raise RefinementError(
                    f"power-law tail at {_direction_name(d)} needs Y > {_Y_POLY_CAP:g}")
        Y *= y_factor
        value, e = _log_segment(ci, d, ys, Y, target / 8)
        return value / (2 * math.pi), (e / (2 * math.pi) + tail_bound(f, a, x0, Y, d, rep)), Y
    value, seg_err = 0j, 0.0
    start = ys
    Y = 1e3 * y_factor
    while True:
        v, e = _log_segment(ci, d, start, Y, target / 8)
        value += v
        seg_err += e
        tail, tail_err = _power_tail(ci, d, Y)
        if tail_err / (2 * math.pi) < target / 20:
            break
        start, Y = Y, Y * 10
        if Y > _Y_POLY_CAP * y_factor:
            raise RefinementError(
                f"power-law tail at {_direction_name(d)} did not settle by Y = {_Y_POLY_CAP:g}")
    return (value + tail) / (2 * math.pi), (seg_err + tail_err) / (2 * math.pi), Y


def truncated_integral(f: MBIntegrand, a: Assignment, x0: float, Y: float,
                       tol: float = 1e-10) -> complex:
    """Raw ``(1/2 pi) * integral_{-Y}^{Y} f(x0 + i*y) dy`` with no tail handling.

    No convergence check is made; this is the forced integral used to show
    empirically that a divergent integrand has no limit as Y grows.  ``tol``
    is relative to the integral of |f| over the same range.
    """
    ci = _Integrand(f, a, x0)
    ys = min(_core_extent(ci), Y)
    u = np.linspace(-math.log(Y), math.log(Y), 2001)
    y = np.sign(u) * np.exp(np.abs(u))
    l1 = float(np.sum(np.abs(ci(y)) * np.abs(y))) * (u[1] - u[0]) if Y > 1 else 0.0
    tol = tol * max(l1 + 2 * ys * float(np.max(np.abs(ci(np.linspace(-ys, ys, 201))))), 1e-300)
    value, _ = _line_segment(ci, -ys, ys, tol)
    for d in (1, -1):
        if Y > ys:
            v, _ = _log_segment(ci, d, ys, Y, tol)
            value += v
    return value / (2 * math.pi)
