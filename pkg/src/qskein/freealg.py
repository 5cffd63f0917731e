"""Free associative algebras over Q(v) with ordered alphabets.

Words are tuples of letter indices into an Alphabet.  The monomial order
used everywhere is degree-lexicographic: first by length, then by the
tuple of letter indices, where a smaller index means an earlier (smaller)
generator.  Polynomials are sparse dicts from words to nonzero Scalars.
"""

from __future__ import annotations

from fractions import Fraction

from .scalar import ONE, ZERO, ParseError, Scalar, from_int, q_power, v_power

__all__ = [
    "Alphabet",
    "NcPoly",
    "Word",
    "word_key",
    "monomial",
    "one",
    "qcomm",
    "parse_poly",
]

Word = tuple  # tuple[int, ...]


def word_key(w: Word):
    """Sort key realizing the deglex order on words."""
    return (len(w), w)


class Alphabet:
    """An ordered tuple of generator display names.

    The position of a name is its letter index; deglex comparisons use
    these indices, so listing order fixes the monomial order.
    """

    __slots__ = ("names", "_index")

    def __init__(self, names):
        names = tuple(names)
        if len(set(names)) != len(names):
            raise ValueError("duplicate generator names")
        self.names = names
        self._index = {nm: i for i, nm in enumerate(names)}

    def __len__(self) -> int:
        return len(self.names)

    def __iter__(self):
        return iter(self.names)

    def __contains__(self, name) -> bool:
        return name in self._index

    def __eq__(self, other) -> bool:
        return isinstance(other, Alphabet) and self.names == other.names

    def __hash__(self) -> int:
        return hash(self.names)

    def __repr__(self) -> str:
        return f"Alphabet({', '.join(self.names)})"

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise ValueError(f"unknown generator {name!r}") from None

    def name(self, i: int) -> str:
        return self.names[i]

    def gen(self, key) -> "NcPoly":
        """The generator as a polynomial; key is an index or a name."""
        i = key if isinstance(key, int) else self.index(key)
        if not 0 <= i < len(self.names):
            raise IndexError(f"generator index {i} out of range")
        return NcPoly(self, {(i,): ONE})

    def gens(self):
        return tuple(self.gen(i) for i in range(len(self.names)))

    def word_str(self, w: Word) -> str:
        return "*".join(self.names[i] for i in w) if w else "1"


class NcPoly:
    """Noncommutative polynomial: sparse {word: Scalar} with no zeros."""

    __slots__ = ("alphabet", "terms")

    def __init__(self, alphabet: Alphabet, terms: dict | None = None):
        self.alphabet = alphabet
        self.terms = {w: c for w, c in (terms or {}).items() if c}

    # -- coercion ------------------------------------------------------------

    def _coerce(self, x):
        if isinstance(x, NcPoly):
            if x.alphabet != self.alphabet:
                raise ValueError("mixed alphabets")
            return x
        if isinstance(x, int):
            x = from_int(x)
        if isinstance(x, Scalar):
            return NcPoly(self.alphabet, {(): x} if x else {})
        return None

    # -- predicates / views ---------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def degree(self) -> int:
        """Max word length; -1 for the zero polynomial."""
        return max((len(w) for w in self.terms), default=-1)

    def leading_word(self) -> Word:
        if not self.terms:
            raise ValueError("zero polynomial has no leading word")
        return max(self.terms, key=word_key)

    def leading_coefficient(self) -> Scalar:
        return self.terms[self.leading_word()]

    def coefficient(self, w: Word) -> Scalar:
        return self.terms.get(tuple(w), ZERO)

    def constant_term(self) -> Scalar:
        return self.terms.get((), ZERO)

    def sorted_terms(self):
        """Terms in descending deglex order."""
        for w in sorted(self.terms, key=word_key, reverse=True):
            yield w, self.terms[w]

    def map_coefficients(self, f) -> "NcPoly":
        return NcPoly(self.alphabet, {w: f(c) for w, c in self.terms.items()})

    # -- arithmetic ------------------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out = dict(self.terms)
        for w, c in other.terms.items():
            s = out.get(w, ZERO) + c
            if s:
                out[w] = s
            else:
                out.pop(w, None)
        return NcPoly(self.alphabet, out)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __neg__(self):
        return NcPoly(self.alphabet, {w: -c for w, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Scalar)):
            c = from_int(other) if isinstance(other, int) else other
            if not c:
                return NcPoly(self.alphabet)
            return NcPoly(self.alphabet, {w: cc * c for w, cc in self.terms.items()})
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out: dict = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                w = w1 + w2
                s = out.get(w, ZERO) + c1 * c2
                if s:
                    out[w] = s
                else:
                    out.pop(w, None)
        return NcPoly(self.alphabet, out)

    def __rmul__(self, other):
        if isinstance(other, (int, Scalar)):
            return self.__mul__(other)
        return NotImplemented

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power of a noncommutative polynomial")
        out = one(self.alphabet)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self.terms == other.terms

    # -- output -----------------------------------------------------------------

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for w, c in self.sorted_terms():
            cs = _coeff_str(c)
            ws = self.alphabet.word_str(w)
            if not w:
                body = str(c) if _scalar_is_simple(c) else f"({c})"
            elif cs == "":
                body = ws
            elif cs == "-":
                body = f"-{ws}"
            else:
                body = f"{cs}*{ws}"
            if not parts:
                parts.append(body)
            elif body.startswith("-"):
                parts.append(f" - {body[1:]}")
            else:
                parts.append(f" + {body}")
        return "".join(parts)

    def __repr__(self) -> str:
        return f"NcPoly({self})"


def _scalar_is_simple(c: Scalar) -> bool:
    return len(c.num) == 1 and c.den == {0: 1}


def _coeff_str(c: Scalar) -> str:
    if c == ONE:
        return ""
    if c == -ONE:
        return "-"
    s = str(c)
    if _scalar_is_simple(c):
        return s
    return f"({s})"


def one(alphabet: Alphabet) -> NcPoly:
    return NcPoly(alphabet, {(): ONE})


def monomial(alphabet: Alphabet, word, coeff: Scalar = ONE) -> NcPoly:
    return NcPoly(alphabet, {tuple(word): coeff} if coeff else {})


def qcomm(x: NcPoly, y: NcPoly, e=0) -> NcPoly:
    """The q-commutator [x, y]_{q^e} = x y - q^e y x; e may be half-integer."""
    return x * y - q_power(Fraction(e)) * (y * x)


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _poly_tokens(text: str, names, aliases):
    """Longest-match generator names, then scalar tokens."""
    cands = sorted(
        [(nm, nm) for nm in names] + [(al, nm) for al, nm in aliases.items()],
        key=lambda p: -len(p[0]),
    )
    toks = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        hit = None
        for src, nm in cands:
            if text.startswith(src, i):
                hit = (src, nm)
                break
        if hit:
            toks.append(("gen", hit[1]))
            i += len(hit[0])
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
        elif ch in "+-*/^(),[]":
            toks.append(("op", ch))
            i += 1
        else:
            raise ParseError(f"unexpected character {ch!r} in polynomial")
    return toks


class _PolyParser:
    def __init__(self, toks, alphabet):
        self.toks = toks
        self.alphabet = alphabet
        self.pos = 0

    def peek(self):
        return self.toks[self.pos] if self.pos < len(self.toks) else (None, None)

    def take(self):
        t = self.peek()
        self.pos += 1
        return t

    def expr(self) -> NcPoly:
        out = self.term()
        while self.peek() in (("op", "+"), ("op", "-")):
            _, op = self.take()
            rhs = self.term()
            out = out + rhs if op == "+" else out - rhs
        return out

    def term(self) -> NcPoly:
        out = self.factor()
        while True:
            kind, val = self.peek()
            if (kind, val) == ("op", "*"):
                self.take()
                out = out * self.factor()
            elif (kind, val) == ("op", "/"):
                self.take()
                rhs = self.factor()
                if set(rhs.terms) - {()}:
                    raise ParseError("division by a non-scalar polynomial")
                out = out * rhs.constant_term().inverse()
            elif kind in ("gen", "sym", "int") or (kind, val) in (("op", "("), ("op", "[")):
                # implicit product (juxtaposition)
                out = out * self.factor()
            else:
                return out

    def factor(self) -> NcPoly:
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
            e = self.exponent()
            if e >= 0:
                return base**e
            if set(base.terms) - {()}:
                raise ParseError("negative power of a non-scalar polynomial")
            return NcPoly(base.alphabet, {(): base.constant_term() ** e})
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

    def atom(self) -> NcPoly:
        kind, val = self.take()
        if kind == "gen":
            return self.alphabet.gen(val)
        if kind == "int":
            return from_int(int(val)) * one(self.alphabet)
        if kind == "sym":
            c = v_power(1) if val == "v" else q_power(1)
            return c * one(self.alphabet)
        if (kind, val) == ("op", "("):
            out = self.expr()
            if self.take() != ("op", ")"):
                raise ParseError("expected )")
            return out
        if (kind, val) == ("op", "["):
            x = self.expr()
            if self.take() != ("op", ","):
                raise ParseError("expected , in commutator")
            y = self.expr()
            if self.take() != ("op", "]"):
                raise ParseError("expected ] in commutator")
            return x * y - y * x
        raise ParseError(f"unexpected token {val!r}")


def parse_poly(text: str, alphabet: Alphabet, aliases: dict | None = None) -> NcPoly:
    """Parse a polynomial in the given alphabet.

    Syntax: scalar expressions in v and q, generator names, + - * / ^,
    parentheses, and [x, y] for the plain commutator.  Juxtaposition of
    factors multiplies.  aliases maps alternative spellings of generator
    names (e.g. ASCII forms) onto canonical names.
    """
    p = _PolyParser(_poly_tokens(text, alphabet.names, aliases or {}), alphabet)
    out = p.expr()
    if p.pos != len(p.toks):
        raise ParseError("trailing input in polynomial")
    return out
