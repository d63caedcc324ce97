"""Exact symbolic values for Mellin-Barnes integrands and their closed forms.

Everything here is immutable.  Offsets of gamma functions are ``LinExpr``
objects: sparse rational combinations of named symbols plus a rational
constant.  Symbols are plain identifier strings.

Text form (see ``parse``/``render``)::

    MB[z; phase(+1)*Gamma(a-z)*Gamma(b1+z)*Gamma(b2+z)/Gamma(g+z)]
    exp(I*pi*(a))*Gamma(a+b1)*Gamma(a+b2)/Gamma(g-b1)
"""
from __future__ import annotations

import cmath
import math
import re
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Union

from .errors import ParseError, SingularBaseError, UnassignedSymbolError

Assignment = Mapping[str, complex]

_IDENT_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")
_RESERVED = {"MB", "Gamma", "phase", "pow", "exp", "I", "pi"}


def check_symbol(name: str) -> str:
    if not isinstance(name, str) or not _IDENT_RE.match(name):
        raise ValueError(f"invalid symbol name {name!r}")
    if name in _RESERVED:
        raise ValueError(f"{name!r} is a reserved word")
    return name


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        # decimal reading, so 0.7 means 7/10
        return Fraction(repr(x))
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot convert {type(x).__name__} to a rational")


def format_fraction(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _lookup(a: Assignment, name: str) -> complex:
    try:
        return complex(a[name])
    except KeyError:
        raise UnassignedSymbolError(name) from None


# ---------------------------------------------------------------------------
# Linear expressions
# ---------------------------------------------------------------------------

class LinExpr:
    """Exact linear combination ``sum(c_i * sym_i) + const`` over the rationals."""

    __slots__ = ("terms", "const", "_hash")

    def __init__(self, terms: Union[Mapping[str, object], Iterable, None] = None, const=0):
        acc: dict[str, Fraction] = {}
        if terms:
            items = terms.items() if isinstance(terms, Mapping) else terms
            for name, c in items:
                c = as_fraction(c)
                if c:
                    acc[name] = acc.get(name, Fraction(0)) + c
        object.__setattr__(self, "terms", tuple(sorted((k, v) for k, v in acc.items() if v)))
        object.__setattr__(self, "const", as_fraction(const))
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, key, value):
        raise AttributeError("LinExpr is immutable")

    @classmethod
    def symbol(cls, name: str) -> "LinExpr":
        return cls({check_symbol(name): 1})

    @classmethod
    def coerce(cls, x) -> "LinExpr":
        if isinstance(x, LinExpr):
            return x
        if isinstance(x, str):
            return parse_lin(x)
        return cls(const=as_fraction(x))

    # -- queries --------------------------------------------------------
    @property
    def symbols(self) -> frozenset:
        return frozenset(k for k, _ in self.terms)

    @property
    def is_constant(self) -> bool:
        return not self.terms

    @property
    def is_zero(self) -> bool:
        return not self.terms and self.const == 0

    def coeff(self, name: str) -> Fraction:
        for k, v in self.terms:
            if k == name:
                return v
        return Fraction(0)

    def drop(self, name: str) -> "LinExpr":
        return LinExpr([(k, v) for k, v in self.terms if k != name], self.const)

    def sort_key(self):
        return (tuple(k for k, _ in self.terms), tuple(v for _, v in self.terms), self.const)

    def evaluate(self, a: Assignment) -> complex:
        total = complex(self.const)
        for name, c in self.terms:
            total += float(c) * _lookup(a, name)
        return total

    # -- arithmetic -----------------------------------------------------
    def __add__(self, other):
        other = _lin_or_none(other)
        if other is None:
            return NotImplemented
        return LinExpr(list(self.terms) + list(other.terms), self.const + other.const)

    __radd__ = __add__

    def __neg__(self):
        return LinExpr([(k, -v) for k, v in self.terms], -self.const)

    def __sub__(self, other):
        other = _lin_or_none(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _lin_or_none(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, k):
        if isinstance(k, LinExpr):
            if k.is_constant:
                k = k.const
            elif self.is_constant:
                return k * self.const
            else:
                raise TypeError("product of two non-constant LinExprs is not linear")
        try:
            k = as_fraction(k)
        except TypeError:
            return NotImplemented
        return LinExpr([(n, v * k) for n, v in self.terms], self.const * k)

    __rmul__ = __mul__

    def __truediv__(self, k):
        return self * (1 / as_fraction(k))

    def __eq__(self, other):
        if isinstance(other, LinExpr):
            return self.terms == other.terms and self.const == other.const
        if isinstance(other, (int, Fraction)):
            return not self.terms and self.const == other
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            object.__setattr__(self, "_hash", hash((self.terms, self.const)))
        return self._hash

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    # -- text -----------------------------------------------------------
    def render(self) -> str:
        parts = []
        for name, c in self.terms:
            mag = abs(c)
            body = name if mag == 1 else f"{format_fraction(mag)}*{name}"
            parts.append(("-" if c < 0 else "+", body))
        if self.const or not parts:
            parts.append(("-" if self.const < 0 else "+", format_fraction(abs(self.const))))
        out = "".join(sign + body for sign, body in parts)
        return out[1:] if out.startswith("+") else out

    def __str__(self):
        return self.render()

    def __repr__(self):
        return f"LinExpr({self.render()!r})"


def _lin_or_none(x):
    if isinstance(x, LinExpr):
        return x
    if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
        return LinExpr(const=x)
    return None


ZERO = LinExpr()


# ---------------------------------------------------------------------------
# Atoms
# ---------------------------------------------------------------------------

Base = Union[str, Fraction]


def _check_base(base) -> Base:
    if isinstance(base, str):
        return check_symbol(base)
    base = as_fraction(base)
    if base <= 0:
        raise ValueError(f"power base must be a positive rational, got {base}")
    return base


def _base_key(b):
    if isinstance(b, str):
        return (0, b, Fraction(0), 0)
    if isinstance(b, Fraction):
        return (1, "", b, 0)
    inner = _base_key(b.base)
    return (2, inner[1], inner[2], b.phase)


def _render_atom(b) -> str:
    return b if isinstance(b, str) else format_fraction(b)


def _atom_value(b, a: Assignment) -> complex:
    return _lookup(a, b) if isinstance(b, str) else complex(b)


@dataclass(frozen=True)
class GammaFactor:
    """``Gamma(zsign*z + offset)``."""

    zsign: int
    offset: LinExpr

    def __post_init__(self):
        if self.zsign not in (1, -1):
            raise ValueError(f"zsign must be +1 or -1, got {self.zsign!r}")
        object.__setattr__(self, "offset", LinExpr.coerce(self.offset))

    def sort_key(self):
        return (self.zsign, self.offset.sort_key())

    def render(self, var: str) -> str:
        zpart = f"+{var}" if self.zsign > 0 else f"-{var}"
        if self.offset.is_zero:
            zpart = var if self.zsign > 0 else f"-{var}"
            return f"Gamma({zpart})"
        return f"Gamma({self.offset.render()}{zpart})"


@dataclass(frozen=True)
class KinFactor:
    """``(r * exp(i*pi*p))**z``; base 1 and phase 0 is the neutral factor."""

    base: Base = Fraction(1)
    phase: int = 0

    def __post_init__(self):
        object.__setattr__(self, "base", _check_base(self.base))
        if self.phase not in (-1, 0, 1):
            raise ValueError(f"phase exponent must be -1, 0 or +1, got {self.phase!r}")

    @property
    def is_neutral(self) -> bool:
        return self.base == 1 and self.phase == 0

    @property
    def has_unit_base(self) -> bool:
        return isinstance(self.base, Fraction) and self.base == 1


@dataclass(frozen=True)
class OnePlus:
    """The atom ``1 + r*exp(i*pi*p)``; on the negative real axis read as ``1 - r +/- i0``."""

    base: Base
    phase: int = 0

    def __post_init__(self):
        object.__setattr__(self, "base", _check_base(self.base))
        if self.phase not in (-1, 0, 1):
            raise ValueError(f"phase exponent must be -1, 0 or +1, got {self.phase!r}")

    def folded(self):
        """Return a positive rational when the atom is one, else self."""
        if isinstance(self.base, Fraction):
            if self.phase == 0:
                return 1 + self.base
            if self.base < 1:
                return 1 - self.base
        return self

    def render(self) -> str:
        atom = _render_atom(self.base)
        if self.phase == 0:
            return f"1+{atom}"
        return f"1+{atom}*phase({self.phase:+d})"

    def log_value(self, a: Assignment) -> complex:
        r = _atom_value(self.base, a)
        w = 1 + r if self.phase == 0 else 1 - r
        if abs(w) < 1e-12:
            raise SingularBaseError(f"base ({self.render()}) vanishes")
        if self.phase and w.real < 0 and abs(w.imag) <= 1e-15 * abs(w):
            return complex(math.log(abs(w)), math.pi * self.phase)
        return cmath.log(w)


# ---------------------------------------------------------------------------
# Coefficients
# ---------------------------------------------------------------------------

def _cancel(num, den):
    cn, cd = Counter(num), Counter(den)
    common = cn & cd
    cn -= common
    cd -= common
    return (tuple(sorted(cn.elements(), key=lambda e: e.sort_key())),
            tuple(sorted(cd.elements(), key=lambda e: e.sort_key())))


@dataclass(frozen=True)
class CoefExpr:
    """Multiplicative coefficient ``const * e^{i pi phase} * prod(base**exp) * Gamma-ratio``.

    Stored in merged normal form: equal bases have their exponents summed,
    rational bases with integer exponents are folded into ``const``, the
    phase constant is reduced to [0, 1) with the sign moved into ``const``.
    Gamma atoms (``gnum``/``gden``) carry z-free gamma functions.
    """

    const: Fraction = Fraction(1)
    phase: LinExpr = ZERO
    powers: tuple = ()
    gnum: tuple = ()
    gden: tuple = ()

    def __post_init__(self):
        const = as_fraction(self.const)
        phase = LinExpr.coerce(self.phase)
        n = math.floor(phase.const)
        if n:
            phase = phase - n
            if n % 2:
                const = -const
        merged: dict = {}
        for base, expo in self.powers:
            if isinstance(base, OnePlus):
                base = base.folded()
            else:
                base = _check_base(base)
            expo = LinExpr.coerce(expo)
            key = _base_key(base)
            if key in merged:
                merged[key] = (base, merged[key][1] + expo)
            else:
                merged[key] = (base, expo)
        powers = []
        for key in sorted(merged):
            base, expo = merged[key]
            if expo.is_zero or (isinstance(base, Fraction) and base == 1):
                continue
            if isinstance(base, Fraction) and expo.is_constant and expo.const.denominator == 1:
                const *= base ** expo.const.numerator
                continue
            powers.append((base, expo))
        gnum, gden = _cancel([LinExpr.coerce(g) for g in self.gnum],
                             [LinExpr.coerce(g) for g in self.gden])
        object.__setattr__(self, "const", const)
        object.__setattr__(self, "phase", phase)
        object.__setattr__(self, "powers", tuple(powers))
        object.__setattr__(self, "gnum", gnum)
        object.__setattr__(self, "gden", gden)

    @property
    def is_one(self) -> bool:
        return self == ONE

    @property
    def symbols(self) -> frozenset:
        out = set(self.phase.symbols)
        for base, expo in self.powers:
            b = base.base if isinstance(base, OnePlus) else base
            if isinstance(b, str):
                out.add(b)
            out |= expo.symbols
        for g in self.gnum + self.gden:
            out |= g.symbols
        return frozenset(out)

    def without_gammas(self) -> "CoefExpr":
        return CoefExpr(self.const, self.phase, self.powers)

    def __mul__(self, other):
        if not isinstance(other, CoefExpr):
            return NotImplemented
        return CoefExpr(self.const * other.const, self.phase + other.phase,
                        self.powers + other.powers,
                        self.gnum + other.gnum, self.gden + other.gden)

    def inverse(self) -> "CoefExpr":
        if self.const == 0:
            raise ZeroDivisionError("inverse of a zero coefficient")
        return CoefExpr(1 / self.const, -self.phase,
                        tuple((b, -e) for b, e in self.powers), self.gden, self.gnum)

    def log_value(self, a: Assignment) -> complex:
        """Principal-branch log of the value; raises ZeroDivisionError-free on zero const."""
        if self.const == 0:
            return complex(-math.inf, 0.0)
        total = complex(math.log(abs(self.const)), math.pi if self.const < 0 else 0.0)
        if not self.phase.is_zero:
            total += 1j * math.pi * self.phase.evaluate(a)
        for base, expo in self.powers:
            u = expo.evaluate(a)
            if isinstance(base, OnePlus):
                total += u * base.log_value(a)
            else:
                r = _atom_value(base, a)
                if abs(r) < 1e-300:
                    raise SingularBaseError(f"base {_render_atom(base)} vanishes")
                total += u * cmath.log(r)
        if self.gnum or self.gden:
            from .numerics import ln_gamma
            for g in self.gnum:
                total += ln_gamma(g.evaluate(a))
            for g in self.gden:
                total -= ln_gamma(g.evaluate(a))
        return total

    def factor_texts(self) -> tuple[list, list]:
        """Numerator and denominator factor strings for rendering."""
        num, den = [], []
        if self.const.numerator != 1:
            num.append(str(self.const.numerator))
        if self.const.denominator != 1:
            den.append(str(self.const.denominator))
        if not self.phase.is_zero:
            num.append(f"exp(I*pi*({self.phase.render()}))")
        for base, expo in self.powers:
            if isinstance(base, str) and expo == 1:
                num.append(base)
            elif isinstance(base, str) and expo == -1:
                den.append(base)
            else:
                btxt = base.render() if isinstance(base, OnePlus) else _render_atom(base)
                num.append(f"pow({btxt}, {expo.render()})")
        num.extend(f"Gamma({g.render()})" for g in self.gnum)
        den.extend(f"Gamma({g.render()})" for g in self.gden)
        return num, den


ONE = CoefExpr()


# ---------------------------------------------------------------------------
# Integrands and closed forms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MBIntegrand:
    """Integrand of ``(1/2 pi i) * integral dz`` along a Barnes contour."""

    var: str
    num: tuple = ()
    den: tuple = ()
    kin: KinFactor = field(default_factory=KinFactor)
    coef: CoefExpr = ONE

    def __post_init__(self):
        check_symbol(self.var)
        for g in tuple(self.num) + tuple(self.den):
            if not isinstance(g, GammaFactor):
                raise TypeError("num/den must hold GammaFactor values")
            if self.var in g.offset.symbols:
                raise ValueError(f"integration variable {self.var!r} appears in offset {g.offset}")
        if self.kin.base == self.var:
            raise ValueError("integration variable used as power base")
        if self.var in self.coef.symbols:
            raise ValueError(f"integration variable {self.var!r} appears in the coefficient")
        num, den = _cancel(tuple(self.num), tuple(self.den))
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    @classmethod
    def from_args(cls, var: str, num_args=(), den_args=(), kin: KinFactor | None = None,
                  coef: CoefExpr = ONE) -> "MBIntegrand":
        """Build from raw gamma arguments; z-free arguments move into the coefficient."""
        num, den, gnum, gden = [], [], [], []
        for args, zs, cs in ((num_args, num, gnum), (den_args, den, gden)):
            for arg in args:
                arg = LinExpr.coerce(arg)
                c = arg.coeff(var)
                if c == 0:
                    cs.append(arg)
                elif c in (1, -1):
                    zs.append(GammaFactor(int(c), arg.drop(var)))
                else:
                    raise ValueError(
                        f"coefficient {format_fraction(c)} of {var!r} in Gamma({arg}) is not +1 or -1")
        coef = coef * CoefExpr(gnum=tuple(gnum), gden=tuple(gden))
        return cls(var, tuple(num), tuple(den), kin or KinFactor(), coef)

    @property
    def symbols(self) -> frozenset:
        out = set(self.coef.symbols)
        for g in self.num + self.den:
            out |= g.offset.symbols
        if isinstance(self.kin.base, str):
            out.add(self.kin.base)
        return frozenset(out)

    def render(self) -> str:
        return render(self)

    def __str__(self):
        return render(self)


@dataclass(frozen=True)
class ClosedForm:
    """``prod Gamma(num) / prod Gamma(den) * coef``."""

    num: tuple = ()
    den: tuple = ()
    coef: CoefExpr = ONE

    def __post_init__(self):
        num = [LinExpr.coerce(x) for x in self.num] + list(self.coef.gnum)
        den = [LinExpr.coerce(x) for x in self.den] + list(self.coef.gden)
        num, den = _cancel(num, den)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)
        object.__setattr__(self, "coef", self.coef.without_gammas())

    def __mul__(self, other):
        if isinstance(other, CoefExpr):
            other = ClosedForm(coef=other)
        if not isinstance(other, ClosedForm):
            return NotImplemented
        return ClosedForm(self.num + other.num, self.den + other.den, self.coef * other.coef)

    @property
    def symbols(self) -> frozenset:
        out = set(self.coef.symbols)
        for g in self.num + self.den:
            out |= g.symbols
        return frozenset(out)

    def render(self) -> str:
        return render(self)

    def __str__(self):
        return render(self)


def canonicalize(cf: ClosedForm) -> ClosedForm:
    """Canonical representative: sorted gamma multisets, cancellation, merged coefficient."""
    return ClosedForm(cf.num, cf.den, CoefExpr(cf.coef.const, cf.coef.phase, cf.coef.powers,
                                                cf.coef.gnum, cf.coef.gden))


def shift_variable(f: MBIntegrand, c) -> MBIntegrand:
    """Substitute ``z -> z + c``; the contour integral is unchanged."""
    c = LinExpr.coerce(c)
    if f.var in c.symbols:
        raise ValueError(f"shift {c} contains the integration variable {f.var!r}")
    if c.is_zero:
        return f
    num = tuple(GammaFactor(g.zsign, g.offset + g.zsign * c) for g in f.num)
    den = tuple(GammaFactor(g.zsign, g.offset + g.zsign * c) for g in f.den)
    extra = CoefExpr(phase=c * f.kin.phase, powers=((f.kin.base, c),))
    return MBIntegrand(f.var, num, den, f.kin, f.coef * extra)


def substitute(e, a: Assignment) -> complex:
    """Numeric value of a LinExpr or CoefExpr under ``a``."""
    if isinstance(e, LinExpr):
        return e.evaluate(a)
    if isinstance(e, CoefExpr):
        if e.const == 0:
            return 0j
        return cmath.exp(e.log_value(a))
    raise TypeError(f"cannot substitute into {type(e).__name__}")


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------

def _join(num, den) -> str:
    out = "*".join(num) if num else "1"
    if den:
        out += "/" + "*".join(den)
    return out


def render(value) -> str:
    if isinstance(value, MBIntegrand):
        cnum, cden = value.coef.factor_texts()
        # rational constant leads, constant gammas trail
        lead = [t for t in cnum if not t.startswith("Gamma(")]
        cgam = [t for t in cnum if t.startswith("Gamma(")]
        num = lead[:1] if lead and _is_int_text(lead[0]) else []
        rest = lead[len(num):]
        if value.kin.phase:
            num.append(f"phase({value.kin.phase:+d})")
        if not value.kin.has_unit_base:
            num.append(f"pow({_render_atom(value.kin.base)})")
        num += rest
        num += [g.render(value.var) for g in value.num]
        num += cgam
        den = [t for t in cden if not t.startswith("Gamma(")]
        den += [g.render(value.var) for g in value.den]
        den += [t for t in cden if t.startswith("Gamma(")]
        return f"MB[{value.var}; {_join(num, den)}]"
    if isinstance(value, ClosedForm):
        num, den = value.coef.factor_texts()
        num += [f"Gamma({g.render()})" for g in value.num]
        den += [f"Gamma({g.render()})" for g in value.den]
        return _join(num, den)
    if isinstance(value, LinExpr):
        return value.render()
    raise TypeError(f"cannot render {type(value).__name__}")


def _is_int_text(t: str) -> bool:
    return bool(re.fullmatch(r"-?\d+", t))


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

_NUM_RE = re.compile(r"\d+(?:\.\d+)?")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    # -- lexical helpers ------------------------------------------------
    def _ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self, s: str) -> bool:
        self._ws()
        return self.text.startswith(s, self.pos)

    def accept(self, s: str) -> bool:
        if self.peek(s):
            self.pos += len(s)
            return True
        return False

    def expect(self, s: str):
        if not self.accept(s):
            found = self.text[self.pos:self.pos + 10] or "end of input"
            raise ParseError(f"expected {s!r}, found {found!r}", self.pos)

    def at_end(self) -> bool:
        self._ws()
        return self.pos >= len(self.text)

    def ident(self) -> str:
        self._ws()
        m = re.compile(r"[A-Za-z][A-Za-z0-9_]*").match(self.text, self.pos)
        if not m:
            raise ParseError("expected identifier", self.pos)
        if m.group() in _RESERVED:
            raise ParseError(f"reserved word {m.group()!r} used as a symbol", self.pos)
        self.pos = m.end()
        return m.group()

    def number(self, allow_slash: bool) -> Fraction:
        self._ws()
        m = _NUM_RE.match(self.text, self.pos)
        if not m:
            raise ParseError("expected number", self.pos)
        self.pos = m.end()
        q = Fraction(m.group())
        if allow_slash and self.text.startswith("/", self.pos):
            start = self.pos
            self.pos += 1
            m2 = re.compile(r"\d+").match(self.text, self.pos)
            if not m2:
                raise ParseError("expected integer denominator", self.pos)
            self.pos = m2.end()
            if int(m2.group()) == 0:
                raise ParseError("zero denominator", start)
            q /= int(m2.group())
        return q

    def _digit_next(self) -> bool:
        self._ws()
        return self.pos < len(self.text) and self.text[self.pos].isdigit()

    # -- grammar --------------------------------------------------------
    def lin(self) -> LinExpr:
        terms, const = [], Fraction(0)
        sign = 1
        if self.accept("-"):
            sign = -1
        else:
            self.accept("+")
        while True:
            if self._digit_next():
                q = self.number(allow_slash=True)
                if self.accept("*"):
                    terms.append((self.ident(), sign * q))
                else:
                    const += sign * q
            else:
                terms.append((self.ident(), sign))
            if self.accept("+"):
                sign = 1
            elif self.accept("-"):
                sign = -1
            else:
                return LinExpr(terms, const)

    def atom(self):
        return self.number(allow_slash=True) if self._digit_next() else self.ident()

    def phase_arg(self) -> int:
        start = self.pos
        sign = 1
        if self.accept("-"):
            sign = -1
        else:
            self.accept("+")
        q = self.number(allow_slash=False)
        if q.denominator != 1 or abs(q) > 1:
            raise ParseError(f"phase exponent {sign * q} outside {{-1, 0, +1}}", start)
        return int(sign * q)

    def product(self, st: "_State", den: bool):
        self.factor(st, den)
        while self.accept("*"):
            self.factor(st, den)

    def factor(self, st: "_State", den: bool):
        self._ws()
        start = self.pos
        sgn = -1 if den else 1
        if self.accept("Gamma("):
            arg = self.lin()
            self.expect(")")
            (st.gden if den else st.gnum).append((arg, start))
        elif self.accept("phase("):
            if st.var is None:
                raise ParseError("phase(...) is only allowed inside MB[...]", start)
            st.phase += sgn * self.phase_arg()
            st.phase_pos = start
            self.expect(")")
        elif self.accept("exp("):
            self.expect("I")
            self.expect("*")
            self.expect("pi")
            self.expect("*")
            self.expect("(")
            e = self.lin()
            self.expect(")")
            self.expect(")")
            st.coef.append(CoefExpr(phase=e * sgn))
            st.check_free(e, start)
        elif self.accept("pow("):
            self.pow_factor(st, den, start)
        elif self.peek("-") or self._digit_next():
            neg = self.accept("-")
            q = self.number(allow_slash=False)
            if neg:
                q = -q
            if den:
                if q == 0:
                    raise ParseError("division by zero", start)
                q = 1 / q
            st.coef.append(CoefExpr(const=q))
        else:
            name = self.ident()
            if name == st.var:
                raise ParseError(f"integration variable {name!r} outside a Gamma argument", start)
            st.coef.append(CoefExpr(powers=((name, LinExpr(const=sgn)),)))

    def pow_factor(self, st: "_State", den: bool, start: int):
        if self._digit_next():
            first = self.number(allow_slash=True)
            if self.accept("+"):
                if first != 1:
                    raise ParseError("expected '1+' in pow(1+atom, ...)", start)
                base = self.atom()
                p = 0
                if self.accept("*"):
                    self.expect("phase(")
                    p = self.phase_arg()
                    self.expect(")")
                self.expect(",")
                e = self.lin()
                self.expect(")")
                st.check_free(e, start)
                if isinstance(base, str):
                    st.check_name(base, start)
                try:
                    atom = OnePlus(base, p)
                except ValueError as exc:
                    raise ParseError(str(exc), start) from None
                st.coef.append(CoefExpr(powers=((atom, e * (-1 if den else 1)),)))
                return
            base = first
        else:
            base = self.ident()
            st.check_name(base, start)
        if isinstance(base, Fraction) and base <= 0:
            raise ParseError("power base must be positive", start)
        if self.accept(","):
            e = self.lin()
            self.expect(")")
            st.check_free(e, start)
            st.coef.append(CoefExpr(powers=((base, e * (-1 if den else 1)),)))
            return
        self.expect(")")
        if st.var is None:
            raise ParseError("pow(atom) without exponent is only allowed inside MB[...]", start)
        if st.kin_base is not None:
            raise ParseError("more than one pow(atom) factor", start)
        if den:
            if isinstance(base, str):
                raise ParseError("symbolic pow(atom) in a denominator", start)
            base = 1 / base
        st.kin_base = base


class _State:
    def __init__(self, var):
        self.var = var
        self.gnum, self.gden = [], []
        self.coef: list[CoefExpr] = []
        self.phase = 0
        self.phase_pos = None
        self.kin_base = None

    def check_name(self, name, pos):
        if name == self.var:
            raise ParseError(f"integration variable {name!r} used as a power base", pos)

    def check_free(self, e: LinExpr, pos):
        if self.var is not None and self.var in e.symbols:
            raise ParseError(f"integration variable {self.var!r} in an exponent", pos)

    def coefficient(self) -> CoefExpr:
        c = ONE
        for x in self.coef:
            c = c * x
        return c


def parse(text: str):
    """Parse an ``MB[var; ...]`` integrand or a closed form."""
    p = _Parser(text)
    if p.accept("MB["):
        var = p.ident()
        p.expect(";")
        st = _State(var)
        p.product(st, den=False)
        if p.accept("/"):
            p.product(st, den=True)
        p.expect("]")
        if not p.at_end():
            raise ParseError("trailing input", p.pos)
        if st.phase not in (-1, 0, 1):
            raise ParseError(f"phase exponent {st.phase} outside {{-1, 0, +1}}", st.phase_pos)
        num, den, gnum, gden = [], [], [], []
        for args, zs, cs in ((st.gnum, num, gnum), (st.gden, den, gden)):
            for arg, pos in args:
                c = arg.coeff(var)
                if c == 0:
                    cs.append(arg)
                elif c in (1, -1):
                    zs.append(GammaFactor(int(c), arg.drop(var)))
                else:
                    raise ParseError(
                        f"integration variable {var!r} appears in an offset "
                        f"(coefficient {format_fraction(c)})", pos)
        coef = st.coefficient() * CoefExpr(gnum=tuple(gnum), gden=tuple(gden))
        kin = KinFactor(st.kin_base if st.kin_base is not None else Fraction(1), st.phase)
        return MBIntegrand(var, tuple(num), tuple(den), kin, coef)
    st = _State(None)
    p.product(st, den=False)
    if p.accept("/"):
        p.product(st, den=True)
    if not p.at_end():
        raise ParseError("trailing input", p.pos)
    return ClosedForm(tuple(a for a, _ in st.gnum), tuple(a for a, _ in st.gden),
                      st.coefficient())


def parse_lin(text: str) -> LinExpr:
    p = _Parser(text)
    out = p.lin()
    if not p.at_end():
        raise ParseError("trailing input", p.pos)
    return out
