"""Presentations of the quantized algebras and their braided products.

Every algebra here is given by quadratic relations extracted from a
matrix equation over a fixed 4x4 R-matrix:

  * coordinate algebras of reflection-equation type, R21 L1 R L2 = L2 R21 L1 R
  * coordinate algebras of FRT type, R21 F1 F2 = F2 F1 R
  * operator algebras mixing the two, via the cross equations
    R21 D1 R A2 = A2 R21 D1 R21^-1  and  F2 A1 = R21 A1 R F2
  * braided tensor products, where generators of a later factor move
    past an earlier factor by Bt1 R B2 R^-1 = R B2 R^-1 Bt1 (coordinate
    blocks) or Ft1 B2 = R B2 R^-1 Ft1 (FRT blocks).

Relations are oriented into a rewrite system whose normal words give
the PBW basis; `check_matrix_relation` re-expands any of the defining
matrix equations and reduces it to certify the relation list.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .scalar import ONE, Scalar, ZERO, from_int, q_power, v_power
from .freealg import Alphabet, NcPoly, one, parse_poly
from .rewrite import RewriteSystem, orient

GL = "GL"
SL = "SL"


class PresentationError(Exception):
    pass


class UnknownEquation(PresentationError):
    pass


class BlockMismatch(PresentationError):
    pass


class InvalidPattern(PresentationError):
    pass


class NotLocalizable(PresentationError):
    pass


def _flavor(flavor: str) -> str:
    f = str(flavor).upper()
    if f not in (GL, SL):
        raise ValueError(f"flavor must be GL or SL, got {flavor!r}")
    return f


def epsilon_of(flavor: str) -> int:
    return 0 if _flavor(flavor) == GL else 1


# == R-matrix =================================================================
# Basis order of the tensor square: (11), (12), (21), (22).

def r_matrix(flavor: str = GL) -> list:
    """The 4x4 R-matrix; the SL variant is scaled by v^-1 (= q^-1/2)."""
    q = q_power(1)
    lam = q_power(1) - q_power(-1)
    Z = ZERO
    rows = [
        [q, Z, Z, Z],
        [Z, ONE, Z, Z],
        [Z, lam, ONE, Z],
        [Z, Z, Z, q],
    ]
    if _flavor(flavor) == SL:
        s = v_power(-1)
        rows = [[s * x for x in row] for row in rows]
    return rows


def r_matrix_inverse(flavor: str = GL) -> list:
    """Inverse of r_matrix; entries from q -> q^-1, rescaled for SL."""
    q = q_power(-1)
    lam = q_power(-1) - q_power(1)
    Z = ZERO
    rows = [
        [q, Z, Z, Z],
        [Z, ONE, Z, Z],
        [Z, lam, ONE, Z],
        [Z, Z, Z, q],
    ]
    if _flavor(flavor) == SL:
        s = v_power(1)
        rows = [[s * x for x in row] for row in rows]
    return rows


_PERM = (0, 2, 1, 3)  # the flip map on the (11),(12),(21),(22) basis


def swap_legs(m: list) -> list:
    """Conjugate a 4x4 matrix by the tensor-flip: M -> P M P."""
    return [[m[_PERM[i]][_PERM[j]] for j in range(4)] for i in range(4)]


def scalar_mat_mul(a: list, b: list) -> list:
    return [[sum((a[i][k] * b[k][j] for k in range(4)), ZERO) for j in range(4)]
            for i in range(4)]


def yang_baxter_residuals(flavor: str = GL) -> list:
    """Entries of R12 R13 R23 - R23 R13 R12 as an 8x8 scalar matrix."""
    R = r_matrix(flavor)

    def emb(m, legs):
        out = [[ZERO] * 8 for _ in range(8)]
        for i in range(8):
            for j in range(8):
                bi = ((i >> 2) & 1, (i >> 1) & 1, i & 1)
                bj = ((j >> 2) & 1, (j >> 1) & 1, j & 1)
                spect = [bi[k] == bj[k] for k in range(3)]
                if not all(spect[k] for k in range(3) if k not in legs):
                    continue
                r = 2 * bi[legs[0]] + bi[legs[1]]
                c = 2 * bj[legs[0]] + bj[legs[1]]
                out[i][j] = m[r][c]
        return out

    def mul8(a, b):
        return [[sum((a[i][k] * b[k][j] for k in range(8)), ZERO)
                 for j in range(8)] for i in range(8)]

    r12, r13, r23 = emb(R, (0, 1)), emb(R, (0, 2)), emb(R, (1, 2))
    lhs = mul8(mul8(r12, r13), r23)
    rhs = mul8(mul8(r23, r13), r12)
    return [lhs[i][j] - rhs[i][j] for i in range(8) for j in range(8)]


# == matrices of noncommutative polynomials ==================================

def _scalar_embed(m: list, ab: Alphabet) -> list:
    u = one(ab)
    return [[u * c for c in row] for row in m]


def _mat_mul(a: list, b: list) -> list:
    n = len(b[0])
    out = []
    for i in range(len(a)):
        row = []
        for j in range(n):
            acc = None
            for k in range(len(b)):
                t = a[i][k] * b[k][j]
                acc = t if acc is None else acc + t
            row.append(acc)
        out.append(row)
    return out


def _mat_sub(a: list, b: list) -> list:
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def _leg1(m2: list, ab: Alphabet) -> list:
    """2x2 polynomial matrix M -> M (x) I on the tensor-square basis."""
    u = one(ab)
    z = u - u
    out = [[z] * 4 for _ in range(4)]
    for i in range(2):
        for j in range(2):
            for k in range(2):
                out[2 * i + k][2 * j + k] = m2[i][j]
    return out


def _leg2(m2: list, ab: Alphabet) -> list:
    """2x2 polynomial matrix M -> I (x) M."""
    u = one(ab)
    z = u - u
    out = [[z] * 4 for _ in range(4)]
    for i in range(2):
        for j in range(2):
            for k in range(2):
                out[2 * k + i][2 * k + j] = m2[i][j]
    return out


def _nonzero_entries(m: list) -> list:
    return [p for row in m for p in row if not p.is_zero()]


# == blocks and factors =======================================================

_BLOCK_ORDER = ((2, 2), (1, 1), (1, 2), (2, 1))  # deglex order within a block


@dataclass(frozen=True)
class Block:
    """One 2x2 matrix of generators: a coordinate or operator block."""

    kind: str          # "re" or "frt"
    letter: str        # display letter including any ~k suffix
    role: str          # "coord" or "op"

    def name(self, i: int, j: int) -> str:
        return f"{self.letter}^{i}_{j}"

    def names_row_major(self) -> tuple:
        return tuple(self.name(i, j) for i in (1, 2) for j in (1, 2))

    def names_ordered(self) -> tuple:
        return tuple(self.name(i, j) for i, j in _BLOCK_ORDER)

    def matrix(self, ab: Alphabet) -> list:
        return [[ab.gen(self.name(i, j)) for j in (1, 2)] for i in (1, 2)]


@dataclass(frozen=True)
class Factor:
    """One tensor factor: an operator algebra with two generator blocks,
    or a single-block coordinate algebra."""

    kind: str              # "oq", "oq_frt", "dq", "dqp"
    blocks: tuple


@dataclass(frozen=True)
class GluingPattern:
    """Surface data: g handles (operator-algebra factors of difference
    type) and r boundary components (r - 1 FRT-paired factors)."""

    g: int
    r: int

    def __post_init__(self):
        if self.g < 0 or self.r < 1 or self.g + self.r < 2:
            raise InvalidPattern(f"need g >= 0, r >= 1, g + r >= 2; got ({self.g}, {self.r})")

    @property
    def factor_count(self) -> int:
        return self.g + self.r - 1


def _suffix(k: int) -> str:
    if k == 1:
        return ""
    return "~" if k == 2 else f"~{k}"


# == relation generation from matrix equations ================================
# Each builder returns the full 4x4 difference matrix of its equation;
# relation assembly keeps the nonzero entries.

def _re_equation(ab: Alphabet, block: Block, flavor: str) -> list:
    L = block.matrix(ab)
    R = _scalar_embed(r_matrix(flavor), ab)
    R21 = _scalar_embed(swap_legs(r_matrix(flavor)), ab)
    lhs = _mat_mul(_mat_mul(_mat_mul(R21, _leg1(L, ab)), R), _leg2(L, ab))
    rhs = _mat_mul(_mat_mul(_mat_mul(_leg2(L, ab), R21), _leg1(L, ab)), R)
    return _mat_sub(lhs, rhs)


def _frt_equation(ab: Alphabet, block: Block, flavor: str) -> list:
    F = block.matrix(ab)
    R = _scalar_embed(r_matrix(flavor), ab)
    R21 = _scalar_embed(swap_legs(r_matrix(flavor)), ab)
    lhs = _mat_mul(_mat_mul(R21, _leg1(F, ab)), _leg2(F, ab))
    rhs = _mat_mul(_mat_mul(_leg2(F, ab), _leg1(F, ab)), R)
    return _mat_sub(lhs, rhs)


def _dq_cross_equation(ab: Alphabet, coord: Block, op: Block, flavor: str) -> list:
    A = coord.matrix(ab)
    D = op.matrix(ab)
    R = _scalar_embed(r_matrix(flavor), ab)
    R21 = _scalar_embed(swap_legs(r_matrix(flavor)), ab)
    R21i = _scalar_embed(swap_legs(r_matrix_inverse(flavor)), ab)
    lhs = _mat_mul(_mat_mul(_mat_mul(R21, _leg1(D, ab)), R), _leg2(A, ab))
    rhs = _mat_mul(_mat_mul(_mat_mul(_leg2(A, ab), R21), _leg1(D, ab)), R21i)
    return _mat_sub(lhs, rhs)


def _dqp_cross_equation(ab: Alphabet, coord: Block, op: Block, flavor: str) -> list:
    A = coord.matrix(ab)
    F = op.matrix(ab)
    R = _scalar_embed(r_matrix(flavor), ab)
    R21 = _scalar_embed(swap_legs(r_matrix(flavor)), ab)
    lhs = _mat_mul(_leg2(F, ab), _leg1(A, ab))
    rhs = _mat_mul(_mat_mul(_mat_mul(R21, _leg1(A, ab)), R), _leg2(F, ab))
    return _mat_sub(lhs, rhs)


def _braided_coord_equation(ab: Alphabet, earlier: Block, later: Block, flavor: str) -> list:
    """Later coordinate-type block Bt crossing an earlier block B:
    Bt1 R B2 R^-1 = R B2 R^-1 Bt1."""
    B = earlier.matrix(ab)
    Bt = later.matrix(ab)
    R = _scalar_embed(r_matrix(flavor), ab)
    Ri = _scalar_embed(r_matrix_inverse(flavor), ab)
    mid = _mat_mul(_mat_mul(R, _leg2(B, ab)), Ri)
    lhs = _mat_mul(_leg1(Bt, ab), mid)
    rhs = _mat_mul(mid, _leg1(Bt, ab))
    return _mat_sub(lhs, rhs)


def _braided_frt_equation(ab: Alphabet, earlier: Block, later: Block, flavor: str) -> list:
    """Later FRT-type block Ft crossing an earlier block B:
    Ft1 B2 = R B2 R^-1 Ft1."""
    B = earlier.matrix(ab)
    Ft = later.matrix(ab)
    R = _scalar_embed(r_matrix(flavor), ab)
    Ri = _scalar_embed(r_matrix_inverse(flavor), ab)
    mid = _mat_mul(_mat_mul(R, _leg2(B, ab)), Ri)
    lhs = _mat_mul(_leg1(Ft, ab), _leg2(B, ab))
    rhs = _mat_mul(mid, _leg1(Ft, ab))
    return _mat_sub(lhs, rhs)


def detq(block: Block, ab: Alphabet) -> NcPoly:
    """The q-determinant of a block: e11 e22 - q^2 e12 e21 for coordinate
    (reflection-equation) blocks, e11 e22 - q e12 e21 for FRT blocks."""
    m = block.matrix(ab)
    c = q_power(2) if block.kind == "re" else q_power(1)
    return m[0][0] * m[1][1] - c * m[0][1] * m[1][0]


# == presentations ============================================================

class AlgebraPresentation:
    """A quadratic presentation together with its oriented rewrite system."""

    def __init__(self, name: str, flavor: str, factors: tuple,
                 extra_relations=(), aliases: dict | None = None):
        self.name = name
        self.flavor = _flavor(flavor)
        self.epsilon = epsilon_of(flavor)
        self.factors = tuple(factors)
        names = []
        for f in self.factors:
            for b in f.blocks:
                names.extend(b.names_ordered())
        self.alphabet = Alphabet(names)
        self.aliases = dict(aliases or {})
        self.relations = self._build_relations() + list(extra_relations)
        self.rewrite = orient(self.alphabet, self.relations, allow_dependent=True)

    # -- relation assembly ----------------------------------------------

    def _build_relations(self) -> list:
        ab = self.alphabet
        fl = self.flavor
        rels = []
        for f in self.factors:
            for b in f.blocks:
                eq = _re_equation if b.kind == "re" else _frt_equation
                rels += _nonzero_entries(eq(ab, b, fl))
            if f.kind == "dq":
                rels += _nonzero_entries(_dq_cross_equation(ab, f.blocks[0], f.blocks[1], fl))
            elif f.kind == "dqp":
                rels += _nonzero_entries(_dqp_cross_equation(ab, f.blocks[0], f.blocks[1], fl))
        for i, fe in enumerate(self.factors):
            for fl_ in self.factors[i + 1:]:
                for be in fe.blocks:
                    for bl in fl_.blocks:
                        eq = _braided_coord_equation if bl.kind == "re" else _braided_frt_equation
                        rels += _nonzero_entries(eq(ab, be, bl, fl))
        if self.flavor == SL:
            for f in self.factors:
                for b in f.blocks:
                    rels.append(detq(b, ab) - one(ab))
        return rels

    # -- accessors --------------------------------------------------------

    @property
    def generators(self) -> tuple:
        return self.alphabet.names

    def blocks(self) -> list:
        return [b for f in self.factors for b in f.blocks]

    def block(self, letter: str) -> Block:
        for b in self.blocks():
            if b.letter == letter:
                return b
        raise BlockMismatch(f"no generator block with letter {letter!r}")

    def gen(self, name: str) -> NcPoly:
        return self.alphabet.gen(self.aliases.get(name, name))

    def parse(self, text: str) -> NcPoly:
        return parse_poly(text, self.alphabet, self.aliases)

    def normal_form(self, p) -> NcPoly:
        if isinstance(p, str):
            p = self.parse(p)
        return self.rewrite.nf(p)

    def detq(self, letter: str) -> NcPoly:
        return detq(self.block(letter), self.alphabet)

    def __repr__(self) -> str:
        return (f"AlgebraPresentation({self.name}, {self.flavor}, "
                f"{len(self.alphabet)} generators, {len(self.rewrite.rules)} rules)")


def _alias_table(factors) -> dict:
    """ASCII and generic-letter aliases for generator names."""
    out = {}
    for k, f in enumerate(factors, start=1):
        sfx = _suffix(k)
        for b in f.blocks:
            for i in (1, 2):
                for j in (1, 2):
                    nm = b.name(i, j)
                    if b.role == "op" and b.kind == "re":
                        out[f"D{sfx}^{i}_{j}"] = nm
                    if b.role == "coord" and b.kind == "re":
                        alias = f"b{sfx}^{i}_{j}"
                        if alias != nm:
                            out[alias] = nm
    return out


def build_oq(flavor: str = GL) -> AlgebraPresentation:
    """Coordinate algebra of reflection-equation type on one block."""
    f = Factor("oq", (Block("re", "a", "coord"),))
    return AlgebraPresentation("oq", flavor, (f,), aliases=_alias_table((f,)))


def build_oq_frt(flavor: str = GL) -> AlgebraPresentation:
    """Coordinate algebra of FRT type on one block."""
    f = Factor("oq_frt", (Block("frt", "f", "coord"),))
    return AlgebraPresentation("oq_frt", flavor, (f,), aliases=_alias_table((f,)))


def build_dq(flavor: str = GL) -> AlgebraPresentation:
    """q-difference operators: coordinate block a, operator block ∂."""
    f = Factor("dq", (Block("re", "a", "coord"), Block("re", "∂", "op")))
    return AlgebraPresentation("dq", flavor, (f,), aliases=_alias_table((f,)))


def build_dq_prime(flavor: str = GL) -> AlgebraPresentation:
    """The FRT-paired operator algebra: coordinate block a, FRT block f."""
    f = Factor("dqp", (Block("re", "a", "coord"), Block("frt", "f", "op")))
    return AlgebraPresentation("dq_prime", flavor, (f,), aliases=_alias_table((f,)))


def build_Agr(pattern, r: int | None = None, flavor: str = GL) -> AlgebraPresentation:
    """Braided tensor product for a gluing pattern: g difference factors
    followed by r - 1 FRT-paired factors, 8(g + r - 1) generators."""
    if isinstance(pattern, GluingPattern):
        pat = pattern
    else:
        if r is None:
            raise InvalidPattern("build_Agr needs a GluingPattern or (g, r)")
        pat = GluingPattern(int(pattern), int(r))
    factors = []
    for k in range(1, pat.factor_count + 1):
        sfx = _suffix(k)
        if k <= pat.g:
            factors.append(Factor("dq", (Block("re", f"a{sfx}", "coord"),
                                         Block("re", f"∂{sfx}", "op"))))
        else:
            coord = f"a{sfx}" if k == 1 else f"b{sfx}"
            factors.append(Factor("dqp", (Block("re", coord, "coord"),
                                          Block("frt", f"f{sfx}", "op"))))
    name = f"Agr(g={pat.g}, r={pat.r})"
    return AlgebraPresentation(name, flavor, tuple(factors),
                               aliases=_alias_table(factors))


# == verification ==============================================================

_EQUATIONS = ("re", "frt", "dq-cross", "dqp-cross", "braided-bb", "braided-fa")


def check_matrix_relation(pres: AlgebraPresentation, equation: str,
                          blocks: tuple | None = None) -> list:
    """Expand one defining matrix equation and reduce it in the algebra.

    Returns a 4x4 matrix of normal-form residuals; all zero certifies
    that the oriented relation list agrees with the matrix form.  The
    `blocks` selector (a letter or pair of letters) picks the instance
    when several blocks qualify.
    """
    eq = equation.lower().replace("_", "-")
    if eq == "cross":
        kinds = sorted({f.kind for f in pres.factors if f.kind in ("dq", "dqp")})
        if len(kinds) != 1:
            raise BlockMismatch(f"'cross' is ambiguous here; use one of {kinds or _EQUATIONS}")
        eq = f"{kinds[0]}-cross"
    if eq not in _EQUATIONS:
        raise UnknownEquation(f"unknown matrix equation {equation!r}")
    ab, fl = pres.alphabet, pres.flavor

    if eq in ("re", "frt"):
        cands = [b for b in pres.blocks() if b.kind == eq]
        if blocks is not None:
            want = (blocks,) if isinstance(blocks, str) else tuple(blocks)
            cands = [b for b in cands if b.letter in want]
        if len(cands) != 1:
            raise BlockMismatch(f"{eq}: {len(cands)} candidate blocks; pass blocks=")
        builder = _re_equation if eq == "re" else _frt_equation
        return _reduce_matrix(pres, builder(ab, cands[0], fl))

    if eq in ("dq-cross", "dqp-cross"):
        kind = "dq" if eq == "dq-cross" else "dqp"
        facs = [f for f in pres.factors if f.kind == kind]
        if blocks is not None:
            facs = [f for f in facs if tuple(b.letter for b in f.blocks) == tuple(blocks)]
        if len(facs) != 1:
            raise BlockMismatch(f"{eq}: {len(facs)} candidate factors; pass blocks=")
        f = facs[0]
        builder = _dq_cross_equation if kind == "dq" else _dqp_cross_equation
        return _reduce_matrix(pres, builder(ab, f.blocks[0], f.blocks[1], fl))

    pairs = []
    for i, fe in enumerate(pres.factors):
        for flt in pres.factors[i + 1:]:
            for be in fe.blocks:
                for bl in flt.blocks:
                    if eq == "braided-bb" and bl.kind == "re":
                        pairs.append((be, bl))
                    if eq == "braided-fa" and bl.kind == "frt":
                        pairs.append((be, bl))
    if blocks is not None:
        pairs = [p for p in pairs if (p[0].letter, p[1].letter) == tuple(blocks)]
    if len(pairs) != 1:
        raise BlockMismatch(f"{eq}: {len(pairs)} candidate block pairs; pass blocks=")
    be, bl = pairs[0]
    builder = _braided_coord_equation if eq == "braided-bb" else _braided_frt_equation
    return _reduce_matrix(pres, builder(ab, be, bl, fl))


def _reduce_matrix(pres: AlgebraPresentation, diff: list) -> list:
    return [[pres.rewrite.nf(p) for p in row] for row in diff]


def matrix_relation_instances(pres: AlgebraPresentation) -> list:
    """All (equation, blocks) pairs applicable to this presentation."""
    out = []
    for b in pres.blocks():
        out.append(("re" if b.kind == "re" else "frt", (b.letter,)))
    for f in pres.factors:
        if f.kind in ("dq", "dqp"):
            out.append((f"{f.kind}-cross", tuple(b.letter for b in f.blocks)))
    for i, fe in enumerate(pres.factors):
        for flt in pres.factors[i + 1:]:
            for be in fe.blocks:
                for bl in flt.blocks:
                    eq = "braided-bb" if bl.kind == "re" else "braided-fa"
                    out.append((eq, (be.letter, bl.letter)))
    return out


# == localization fast path ====================================================

def commutation_scalar(pres: AlgebraPresentation, element: NcPoly,
                       gen_name: str) -> Scalar | None:
    """The scalar c with element * x = c * x * element in the algebra,
    or None when the pair is not scalar-proportional."""
    x = pres.gen(gen_name)
    u = pres.rewrite.nf(element * x)
    w = pres.rewrite.nf(x * element)
    if u.is_zero() and w.is_zero():
        return ONE
    if w.is_zero() or u.is_zero():
        return None
    if set(u.terms) != set(w.terms):
        return None
    ratio = None
    for word, c in u.terms.items():
        r = c / w.terms[word]
        if ratio is None:
            ratio = r
        elif ratio != r:
            return None
    return ratio


def adjoin_inverse(pres: AlgebraPresentation, element: NcPoly,
                   name: str = "s_inv") -> AlgebraPresentation:
    """Adjoin a two-sided inverse for an element that commutes with every
    generator up to a scalar (central elements included).

    The new generator is placed first in the alphabet, so normal words
    carry all inverse powers on the left.
    """
    scalars = {}
    for nm in pres.alphabet.names:
        c = commutation_scalar(pres, element, nm)
        if c is None:
            raise NotLocalizable(
                f"{name}: element does not q-commute with generator {nm}")
        scalars[nm] = c

    new_names = (name,) + pres.alphabet.names
    ab2 = Alphabet(new_names)

    def lift(p: NcPoly) -> NcPoly:
        out = {}
        for w, c in p.terms.items():
            out[tuple(i + 1 for i in w)] = c
        return NcPoly(ab2, out)

    s = lift(pres.rewrite.nf(element))
    sinv = ab2.gen(name)
    rels = [lift(r) for r in pres.relations]
    rels.append(s * sinv - one(ab2))
    rels.append(sinv * s - one(ab2))
    # x * s = c x * s  pattern gives  x * s^-1 = c * s^-1 * x
    for nm, c in scalars.items():
        x = ab2.gen(nm)
        rels.append(x * sinv - c * sinv * x)

    out = object.__new__(AlgebraPresentation)
    out.name = f"{pres.name}[{name}]"
    out.flavor = pres.flavor
    out.epsilon = pres.epsilon
    out.factors = pres.factors
    out.alphabet = ab2
    out.aliases = dict(pres.aliases)
    out.relations = rels
    out.rewrite = orient(ab2, rels, allow_dependent=True)
    return out
