"""Exact arithmetic over the ground field Q(v).

Every coefficient in the engine lives in the field of rational functions
in one variable v with rational coefficients.  The quantum parameter is
q = v**2, so half-integer powers of q (needed by the SL normalisation of
the R-matrix and by half-integer Ore indices) are still honest field
elements.  No floating point is used anywhere.

A Scalar is stored as a reduced fraction num/den of integer-coefficient
polynomials in v.  The canonical form is unique: gcd(num, den) = 1 over
Q[v], the integer contents are coprime, and the leading coefficient of
the denominator is positive.  Equality and hashing rely on it.
"""

from __future__ import annotations

from fractions import Fraction

__all__ = [
    "Scalar",
    "PoleError",
    "ParseError",
    "ZERO",
    "ONE",
    "V",
    "Q",
    "from_int",
    "from_fraction",
    "v_power",
    "q_power",
    "bracket",
    "specialize",
    "parse_scalar",
]


class PoleError(ArithmeticError):
    """Raised when a Scalar is specialised at a pole of its denominator."""


class ParseError(ValueError):
    """Raised on malformed scalar or polynomial source text."""


# ---------------------------------------------------------------------------
# integer-coefficient polynomials in v, represented as {exponent: coefficient}
# with exponents >= 0 and no zero coefficients
# ---------------------------------------------------------------------------


def _pnorm(p: dict) -> dict:
    return {e: c for e, c in p.items() if c}


def _padd(a: dict, b: dict) -> dict:
    out = dict(a)
    for e, c in b.items():
        s = out.get(e, 0) + c
        if s:
            out[e] = s
        else:
            out.pop(e, None)
    return out


def _pneg(a: dict) -> dict:
    return {e: -c for e, c in a.items()}


def _pmul(a: dict, b: dict) -> dict:
    if not a or not b:
        return {}
    if len(a) == 1:
        (ea, ca), = a.items()
        return {ea + e: ca * c for e, c in b.items()}
    if len(b) == 1:
        (eb, cb), = b.items()
        return {eb + e: cb * c for e, c in a.items()}
    out: dict = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = ea + eb
            s = out.get(e, 0) + ca * cb
            if s:
                out[e] = s
            else:
                out.pop(e, None)
    return out


def _pdeg(a: dict) -> int:
    return max(a) if a else -1


def _plc(a: dict) -> int:
    return a[max(a)] if a else 0


def _pcontent(a: dict) -> int:
    g = 0
    for c in a.values():
        g = _igcd(g, c)
        if g == 1:
            return 1
    return g or 1


def _igcd(a: int, b: int) -> int:
    a, b = abs(a), abs(b)
    while b:
        a, b = b, a % b
    return a


def _pdiv_exact(a: dict, g: dict) -> dict:
    """Exact division a / g in Z[v]; raises if not exact."""
    if not a:
        return {}
    r = dict(a)
    out: dict = {}
    dg = _pdeg(g)
    lg = _plc(g)
    while r:
        dr = _pdeg(r)
        if dr < dg:
            raise ArithmeticError("inexact polynomial division")
        lr = r[dr]
        if lr % lg:
            raise ArithmeticError("inexact polynomial division")
        c = lr // lg
        e = dr - dg
        out[e] = c
        for eg, cg in g.items():
            ee = eg + e
            s = r.get(ee, 0) - c * cg
            if s:
                r[ee] = s
            else:
                r.pop(ee, None)
    return out


def _pmod_frac(a: dict, b: dict) -> dict:
    """Remainder of a by b with Fraction coefficients (b nonzero)."""
    db = _pdeg(b)
    lb = b[db]
    r = dict(a)
    while r:
        dr = max(r)
        if dr < db:
            break
        c = r[dr] / lb
        for eb, cb in b.items():
            e = eb + dr - db
            s = r.get(e, 0) - c * cb
            if s:
                r[e] = s
            else:
                r.pop(e, None)
    return r


def _pprimitive(a: dict) -> dict:
    """Primitive integer part with positive leading coefficient."""
    if not a:
        return {}
    c = _pcontent(a)
    if _plc(a) < 0:
        c = -c
    return {e: v // c for e, v in a.items()}


def _pgcd(a: dict, b: dict) -> dict:
    """gcd over Q[v], returned as a primitive polynomial in Z[v]."""
    if not a:
        return _pprimitive(b)
    if not b:
        return _pprimitive(a)
    fa = {e: Fraction(c) for e, c in a.items()}
    fb = {e: Fraction(c) for e, c in b.items()}
    if _pdeg(fa) < _pdeg(fb):
        fa, fb = fb, fa
    while fb:
        fa, fb = fb, _pmod_frac(fa, fb)
    # clear denominators, make primitive
    den = 1
    for c in fa.values():
        den = den * c.denominator // _igcd(den, c.denominator)
    ints = {e: int(c * den) for e, c in fa.items()}
    return _pprimitive(ints)


_P_ZERO: dict = {}
_P_ONE: dict = {0: 1}


# ---------------------------------------------------------------------------
# Scalar
# ---------------------------------------------------------------------------


class Scalar:
    """An element of Q(v) in canonical reduced form.  Immutable."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num: dict, den: dict, _reduced: bool = False):
        if not _reduced:
            num, den = _reduce(num, den)
        self.num = num
        self.den = den
        self._hash = None

    # -- constructors -------------------------------------------------------

    @staticmethod
    def from_int(n: int) -> "Scalar":
        if n == 0:
            return ZERO
        if n == 1:
            return ONE
        return Scalar({0: n}, dict(_P_ONE), _reduced=True)

    @staticmethod
    def from_fraction(x) -> "Scalar":
        x = Fraction(x)
        if x.numerator == 0:
            return ZERO
        return Scalar({0: x.numerator}, {0: x.denominator}, _reduced=True)

    # -- predicates ----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.num

    def is_one(self) -> bool:
        return self.num == _P_ONE and self.den == _P_ONE

    def __bool__(self) -> bool:
        return bool(self.num)

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other: "Scalar") -> "Scalar":
        if not isinstance(other, Scalar):
            return NotImplemented
        if not self.num:
            return other
        if not other.num:
            return self
        if self.den == other.den:
            return Scalar(_padd(self.num, other.num), self.den)
        n = _padd(_pmul(self.num, other.den), _pmul(other.num, self.den))
        return Scalar(n, _pmul(self.den, other.den))

    def __sub__(self, other: "Scalar") -> "Scalar":
        if not isinstance(other, Scalar):
            return NotImplemented
        if not other.num:
            return self
        if not self.num:
            return -other
        if self.den == other.den:
            return Scalar(_padd(self.num, _pneg(other.num)), self.den)
        n = _padd(_pmul(self.num, other.den), _pneg(_pmul(other.num, self.den)))
        return Scalar(n, _pmul(self.den, other.den))

    def __neg__(self) -> "Scalar":
        if not self.num:
            return self
        return Scalar(_pneg(self.num), self.den, _reduced=True)

    def __mul__(self, other: "Scalar") -> "Scalar":
        if not isinstance(other, Scalar):
            return NotImplemented
        if not self.num or not other.num:
            return ZERO
        if self.is_one():
            return other
        if other.is_one():
            return self
        return Scalar(_pmul(self.num, other.num), _pmul(self.den, other.den))

    def __truediv__(self, other: "Scalar") -> "Scalar":
        if not isinstance(other, Scalar):
            return NotImplemented
        if not other.num:
            raise ZeroDivisionError("division by zero Scalar")
        if not self.num:
            return ZERO
        if other.is_one():
            return self
        return Scalar(_pmul(self.num, other.den), _pmul(self.den, other.num))

    def inverse(self) -> "Scalar":
        if not self.num:
            raise ZeroDivisionError("inverse of zero Scalar")
        return Scalar(dict(self.den), dict(self.num))

    def __pow__(self, k: int) -> "Scalar":
        if k == 0:
            return ONE
        base = self if k > 0 else self.inverse()
        out = base
        for _ in range(abs(k) - 1):
            out = out * base
        return out

    # -- comparison ----------------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, Scalar):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        h = self._hash
        if h is None:
            h = hash((tuple(sorted(self.num.items())), tuple(sorted(self.den.items()))))
            self._hash = h
        return h

    # -- output --------------------------------------------------------------

    def __repr__(self) -> str:
        return f"Scalar({self})"

    def __str__(self) -> str:
        if not self.num:
            return "0"
        ns = _pstr(self.num)
        if self.den == _P_ONE:
            return ns
        ds = _pstr(self.den)
        if len(self.num) > 1:
            ns = f"({ns})"
        if len(self.den) > 1:
            ds = f"({ds})"
        return f"{ns}/{ds}"


def _reduce(num: dict, den: dict):
    num = _pnorm(num)
    den = _pnorm(den)
    if not den:
        raise ZeroDivisionError("zero denominator")
    if not num:
        return {}, dict(_P_ONE)
    c = _igcd(_pcontent(num), _pcontent(den))
    if _plc(den) < 0:
        c = -c
    if c != 1:
        num = {e: v // c for e, v in num.items()}
        den = {e: v // c for e, v in den.items()}
    if den != _P_ONE:
        g = _pgcd(num, den)
        if _pdeg(g) >= 1:
            num = _pdiv_exact(num, g)
            den = _pdiv_exact(den, g)
            if _plc(den) < 0:
                num = _pneg(num)
                den = _pneg(den)
    return num, den


def _pstr(p: dict) -> str:
    parts = []
    for e in sorted(p, reverse=True):
        c = p[e]
        if e == 0:
            term = str(abs(c))
        else:
            vv = "v" if e == 1 else f"v^{e}"
            term = vv if abs(c) == 1 else f"{abs(c)}*{vv}"
        if not parts:
            parts.append(term if c > 0 else f"-{term}")
        else:
            parts.append(f" + {term}" if c > 0 else f" - {term}")
    return "".join(parts)


ZERO = Scalar({}, dict(_P_ONE), _reduced=True)
ONE = Scalar(dict(_P_ONE), dict(_P_ONE), _reduced=True)


def from_int(n: int) -> Scalar:
    return Scalar.from_int(n)


def from_fraction(x) -> Scalar:
    return Scalar.from_fraction(x)


def v_power(k: int) -> Scalar:
    """v**k as a Scalar, any integer k."""
    if k == 0:
        return ONE
    if k > 0:
        return Scalar({k: 1}, dict(_P_ONE), _reduced=True)
    return Scalar(dict(_P_ONE), {-k: 1}, _reduced=True)


def q_power(k) -> Scalar:
    """q**k where q = v**2; k may be an int or a half-integer Fraction."""
    k = Fraction(k)
    e = 2 * k
    if e.denominator != 1:
        raise ValueError(f"q_power needs an integer or half-integer, got {k}")
    return v_power(int(e))


V = v_power(1)
Q = q_power(1)


def bracket(n: int) -> Scalar:
    """The bracket <n>_q = q**n - 1 = v**(2n) - 1."""
    return q_power(n) - ONE


def specialize(s: Scalar, value) -> Fraction:
    """Evaluate s at v = value (a Fraction or int).  Exact.

    Raises PoleError when value is a root of the denominator; since the
    fraction is reduced, the numerator cannot vanish there too.
    """
    x = Fraction(value)
    den = sum(c * x**e for e, c in s.den.items())
    if den == 0:
        raise PoleError(f"pole at v = {x}")
    num = sum(c * x**e for e, c in s.num.items())
    return Fraction(num, den)


# ---------------------------------------------------------------------------
# parser:  integers, v, q, + - * / ^ and parentheses;  ** is a synonym of ^
# ---------------------------------------------------------------------------


def _tokenize(text: str):
    toks = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            toks.append(("int", text[i:j]))
            i = j
        elif ch in "vq":
            toks.append(("sym", ch))
            i += 1
        elif text.startswith("**", i):
            toks.append(("op", "^"))
            i += 2
        elif ch in "+-*/^()":
            toks.append(("op", ch))
            i += 1
        else:
            raise ParseError(f"unexpected character {ch!r} in scalar expression")
    return toks


class _ScalarParser:
    def __init__(self, toks):
        self.toks = toks
        self.pos = 0

    def peek(self):
        return self.toks[self.pos] if self.pos < len(self.toks) else (None, None)

    def take(self):
        t = self.peek()
        self.pos += 1
        return t

    def expr(self) -> Scalar:
        out = self.term()
        while self.peek() == ("op", "+") or self.peek() == ("op", "-"):
            _, op = self.take()
            rhs = self.term()
            out = out + rhs if op == "+" else out - rhs
        return out

    def term(self) -> Scalar:
        out = self.factor()
        while self.peek() == ("op", "*") or self.peek() == ("op", "/"):
            _, op = self.take()
            rhs = self.factor()
            out = out * rhs if op == "*" else out / rhs
        return out

    def factor(self) -> Scalar:
        kind, val = self.peek()
        if (kind, val) == ("op", "-"):
            self.take()
            return -self.factor()
        if (kind, val) == ("op", "+"):
            self.take()
            return self.factor()
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            return base ** self.exponent()
        return base

    def exponent(self) -> int:
        kind, val = self.take()
        sign = 1
        if (kind, val) == ("op", "-"):
            sign = -1
            kind, val = self.take()
        elif (kind, val) == ("op", "("):
            e = self.exponent()
            if self.take() != ("op", ")"):
                raise ParseError("expected ) after exponent")
            return e
        if kind != "int":
            raise ParseError("exponent must be an integer")
        return sign * int(val)

    def atom(self) -> Scalar:
        kind, val = self.take()
        if kind == "int":
            return from_int(int(val))
        if kind == "sym":
            return V if val == "v" else Q
        if (kind, val) == ("op", "("):
            out = self.expr()
            if self.take() != ("op", ")"):
                raise ParseError("expected )")
            return out
        raise ParseError(f"unexpected token {val!r}")


def parse_scalar(text: str) -> Scalar:
    """Parse an expression in v and q into a Scalar."""
    p = _ScalarParser(_tokenize(text))
    out = p.expr()
    if p.pos != len(p.toks):
        raise ParseError("trailing input in scalar expression")
    return out
