"""Koszul complexes for the coordinate blocks and truncated inverse images.

The complex resolves the one-dimensional module at the identity point of a
coordinate block over the ambient algebra, with explicit differentials.
Right-module convention: free modules are direct sums of symbol * algebra,
differentials act by right multiplication, and a composite of differentials
multiplies entries left factor first.
"""

from dataclasses import dataclass, field

from .freealg import NcPoly, word_key
from .linalg import Echelon, kernel_basis
from .presentations import GL, SL, BlockMismatch
from .rewrite import graded_dimension_rewrite, check_confluence, orient
from .scalar import ONE, bracket, q_power


class TruncationTooSmall(ValueError):
    """Inverse images need degree bound at least 3 to say anything."""


def _mat(rows):
    return [list(r) for r in rows]


def _from_cols(cols):
    n = len(cols[0])
    return [[cols[j][i] for j in range(len(cols))] for i in range(n)]


@dataclass
class KoszulComplex:
    """Free right-module resolution data for one coordinate block.

    positions run from -len(ranks)+1 up to 0; differentials[i] maps
    position positions[i] to positions[i+1] and has shape
    ranks[i+1] x ranks[i] (target rows, source columns).
    """

    ambient: object
    factor: int
    flavor: str
    ranks: tuple
    differentials: list
    symbols: tuple
    dual_relations: list = field(default_factory=list)

    @property
    def positions(self):
        return list(range(-len(self.ranks) + 1, 1))

    @property
    def length(self):
        return len(self.ranks) - 1

    def block(self):
        return self.ambient.factors[self.factor].blocks[0]

    def basis_letters(self):
        """The block letters in the symbol order x_1 < x_2 < ..."""
        blk = self.block()
        names = list(blk.names_ordered())
        if self.flavor == SL:
            names.remove(blk.name(1, 1))
        return names


def _gl_differentials(pres, blk):
    one = pres.parse("1")
    a11 = pres.gen(blk.name(1, 1))
    a12 = pres.gen(blk.name(1, 2))
    a21 = pres.gen(blk.name(2, 1))
    a22 = pres.gen(blk.name(2, 2))
    z = pres.parse("0")
    q2, qm2 = q_power(2), q_power(-2)
    b2, bm2 = bracket(2), bracket(-2)
    d1 = _mat([[a22 - one, a11 - one, a12, a21]])
    # the a^2_2 coefficients below are forced: they are the unique values
    # making every consecutive composite reduce to zero
    d2 = _from_cols([
        [a11 - one, -(a22 - one), z, z],
        [a12, z, -(q2 * (a22 - qm2 * one)), z],
        [a21, z, z, -(qm2 * (a22 - q2 * one))],
        [z, a12, qm2 * b2 * a22 - (a11 - one), z],
        [z, a21, z, qm2 * bm2 * a22 - (a11 - one)],
        [bm2 * a22, -(bm2 * a22), a21, -a12],
    ])
    d3 = _from_cols([
        [a12, qm2 * b2 * a22 - (a11 - one), z, q2 * (a22 - qm2 * one), z, z],
        [a21, z, qm2 * bm2 * a22 - (a11 - one), z, qm2 * (a22 - q2 * one), z],
        [qm2 * b2 * a22, a21, -a12, z, z, a22 - one],
        [qm2 * b2 * a22, z, z, a21, -a12, a11 - one],
    ])
    d4 = _from_cols([[a21, -a12, a11 - one, -(a22 - one)]])
    return (1, 4, 6, 4, 1), [d4, d3, d2, d1]


def _sl_differentials(pres, blk):
    one = pres.parse("1")
    a12 = pres.gen(blk.name(1, 2))
    a21 = pres.gen(blk.name(2, 1))
    a22 = pres.gen(blk.name(2, 2))
    z = pres.parse("0")
    q2, qm2 = q_power(2), q_power(-2)
    bm2 = bracket(-2)
    d1 = _mat([[a22 - one, a12, a21]])
    d2 = _from_cols([
        [a12, -(q2 * (a22 - qm2 * one)), z],
        [a21, z, -(qm2 * (a22 - q2 * one))],
        [-(bm2 * (a22 + one)), -(q2 * a21), a12],
    ])
    d3 = _from_cols([[-(q2 * a21), a12, a22 - one]])
    return (1, 3, 3, 1), [d3, d2, d1]


# Quadratic dual of the GL block in generators y_1..y_4 dual to
# x_1 = a^2_2, x_2 = a^1_1, x_3 = a^1_2, x_4 = a^2_1.  Kept as a
# transcription check: confluent, with dimensions 1, 4, 6, 4, 1.
def koszul_dual_system():
    from .freealg import Alphabet, parse_poly

    ab = Alphabet(("y1", "y2", "y3", "y4"))
    b = bracket(-2)
    y = [ab.gen(i) for i in range(4)]
    rels = [
        y[0] * y[0],
        y[1] * y[1],
        y[2] * y[2],
        y[3] * y[3] + b * y[0] * y[1],
        y[1] * y[0] + y[0] * y[1],
        y[2] * y[0] + y[0] * y[2],
        y[3] * y[0] + q_power(2) * y[0] * y[3] + b * y[0] * y[2],
        y[2] * y[1] + y[1] * y[2],
        y[3] * y[1] + q_power(-2) * y[1] * y[3] - q_power(-2) * b * y[1] * y[2],
        y[3] * y[2] + y[2] * y[3] - b * y[0] * y[1],
    ]
    return orient(ab, rels, allow_dependent=True)


def build_koszul(ambient, factor=0, flavor=None):
    """Instantiate the explicit complex on the coordinate block of the
    given factor.  The flavor, when passed, must match the ambient."""
    if flavor is not None and flavor != ambient.flavor:
        raise BlockMismatch(
            f"ambient algebra has flavor {ambient.flavor}, not {flavor}")
    flavor = ambient.flavor
    if not 0 <= factor < len(ambient.factors):
        raise BlockMismatch(f"no factor {factor} in {ambient.name}")
    blk = ambient.factors[factor].blocks[0]
    if blk.kind != "re":
        raise BlockMismatch(
            "the complex needs a reflection-equation coordinate block; "
            f"factor {factor} starts with a {blk.kind!r} block")
    if flavor == SL:
        ranks, diffs = _sl_differentials(ambient, blk)
        symbols = (("k",), ("r1", "r2", "r3"), ("x1", "x2", "x3"), ("1",))
    else:
        ranks, diffs = _gl_differentials(ambient, blk)
        symbols = (("k",), ("c1", "c2", "c3", "c4"),
                   ("r1", "r2", "r3", "r4", "r5", "r6"),
                   ("x1", "x2", "x3", "x4"), ("1",))
    dual = koszul_dual_system() if flavor == GL else None
    kc = KoszulComplex(ambient, factor, flavor, ranks, diffs, symbols)
    if dual is not None:
        kc.dual_relations = dual.rules
    return kc


def check_d_squared(kc):
    """Expand every consecutive composite and reduce; returns the list of
    nonzero residual entries (expected empty)."""
    nf = kc.ambient.normal_form
    bad = []
    for step in range(len(kc.differentials) - 1):
        first = kc.differentials[step]        # position p -> p+1
        second = kc.differentials[step + 1]   # position p+1 -> p+2
        rows, mid, cols = len(second), len(first), len(first[0])
        for i in range(rows):
            for j in range(cols):
                acc = kc.ambient.parse("0")
                for h in range(mid):
                    acc = acc + second[i][h] * first[h][j]
                res = nf(acc)
                if not res.is_zero():
                    bad.append((kc.positions[step], i, j, res))
    return bad


# -- truncated derived inverse image ---------------------------------------


@dataclass
class InverseImageReport:
    positions: list
    per_degree: dict     # position -> homology dims per internal degree 0..N
    raw: dict            # position -> total dimension at truncation N
    N: int
    stable_limit: int    # internal degrees <= this are boundary-safe

    def stable(self, position):
        return self.per_degree[position][: self.stable_limit + 1]

    def as_dict(self):
        return {
            "positions": self.positions,
            "per_degree": {str(p): v for p, v in self.per_degree.items()},
            "raw": {str(p): v for p, v in self.raw.items()},
            "N": self.N,
            "stable_limit": self.stable_limit,
            "stable": {str(p): self.stable(p) for p in self.positions},
        }


def _image_echelon_key(col):
    comp, word = col
    return (word_key(word), comp)


def truncated_inverse_image(kc, M):
    """Homology of the complex of component spaces of M, degreewise.

    The space at position p collects module-valued functionals on the
    free term resolving at depth -p, so position -dim G carries the
    joint right-kernel of the block's counit generators and position 0
    carries the plain quotient by them.  The map out of position p is
    (m_h)_h |-> (sum_h m_h * d[h][j])_j for the matching differential;
    all products are computed exactly in a deepened truncation.

    Kernels are counted as echelon dependencies in degree order; image
    dimensions inside each degree window come from echelon pivots (the
    pivot of a reduced row is its deglex-largest word, so a pivot of
    degree <= n certifies the whole row lies in the window).  Internal
    degrees <= N - 2 are unaffected by the cut at N.
    """
    if M.pres is not kc.ambient:
        raise BlockMismatch("module is not over the complex's ambient algebra")
    N = M.N
    if N < 3:
        raise TruncationTooSmall(f"need truncation degree >= 3, got {N}")
    deep = M.extended(2)
    nfmods = {}

    def act(w, entry):
        key = (w, id(entry))
        if key not in nfmods:
            nfmods[key] = deep.act({w: ONE}, entry)
        return nfmods[key]

    words = M.basis
    positions = kc.positions
    ranks = {p: r for p, r in zip(positions, kc.ranks)}
    # position -dim G pairs against the start of the resolution
    mats = list(reversed(kc.differentials))
    diff_from = {positions[i]: mats[i] for i in range(len(mats))}

    def image_vector(h, w, mat):
        # distinct target components occupy disjoint column blocks
        return {
            (j, col): val
            for j in range(len(mat[h]))
            if not mat[h][j].is_zero()
            for col, val in act(w, mat[h][j]).items()
        }

    per_degree = {}
    raw = {}
    for p in positions:
        r = ranks[p]
        domain = sorted(
            ((len(w), h, w) for h in range(r) for w in words),
        )
        mat_out = diff_from.get(p)
        # kernel growth per degree from one echelon pass in degree order
        ker_cum = [0] * (N + 1)
        if mat_out is None:
            for deg, _, _ in domain:
                ker_cum[deg] += 1
        else:
            ech = Echelon()
            for deg, h, w in domain:
                piv, _ = ech.insert(image_vector(h, w, mat_out), tag={})
                if piv is None:
                    ker_cum[deg] += 1
        for n in range(1, N + 1):
            ker_cum[n] += ker_cum[n - 1]

        im_cum = [0] * (N + 1)
        prev = positions[positions.index(p) - 1] if p != positions[0] else None
        if prev is not None:
            mat_in = diff_from[prev]
            ech = Echelon(col_key=_image_echelon_key)
            for h in range(ranks[prev]):
                for w in words:
                    piv, _ = ech.insert(image_vector(h, w, mat_in), tag={})
                    if piv is not None and len(piv[1]) <= N:
                        im_cum[len(piv[1])] += 1
        for n in range(1, N + 1):
            im_cum[n] += im_cum[n - 1]

        cum = [k - i for k, i in zip(ker_cum, im_cum)]
        per_degree[p] = [cum[0]] + [cum[n] - cum[n - 1] for n in range(1, N + 1)]
        raw[p] = cum[N]
    return InverseImageReport(positions, per_degree, raw, N, N - 2)


# -- twisted left action ----------------------------------------------------


@dataclass
class TwistedLeftAction:
    """Tables of the braided left action on the free basis symbols.

    tables[y][k] is the rank_k x rank_k matrix T with y . e_j =
    sum_l e_l T[l][j], entries polynomials in the external generators;
    level k corresponds to homological position -k.
    """

    complex: KoszulComplex
    generators: tuple
    tables: dict

    def matrix(self, y, level):
        return self.tables[y][level]

    def act_word(self, word, level):
        """Matrix of the action of a product of external generators."""
        r = self.complex.ranks[::-1][level]
        pres = self.complex.ambient
        out = [[pres.parse("1") if i == j else pres.parse("0")
                for j in range(r)] for i in range(r)]
        for y in word:
            t = self.tables[y][level]
            out = [[sum((out[i][m] * t[m][j] for m in range(r)),
                        pres.parse("0"))
                    for j in range(r)] for i in range(r)]
        return [[pres.normal_form(e) for e in row] for row in out]


def _exchange_coefficients(pres, v_names, ext_names):
    """psi[(y, i)] = {(j, y2): coef} with y * x_i = sum coef * x_j * y2,
    solved from the rewrite system (works in both letter orders)."""
    nf = pres.normal_form
    ech = Echelon(col_key=word_key)
    index = []
    for j, xn in enumerate(v_names):
        for y2 in ext_names:
            ech.insert(dict(nf(pres.gen(xn) * pres.gen(y2)).terms),
                       tag={len(index): ONE})
            index.append((j, y2))
    psi = {}
    for y in ext_names:
        for i, xn in enumerate(v_names):
            target = dict(nf(pres.gen(y) * pres.gen(xn)).terms)
            sol = ech.solve(target)
            if sol is None:
                raise BlockMismatch(
                    f"braiding of {y} past {xn} leaves the letter-pair span")
            psi[(y, i)] = {index[k]: c for k, c in sol.items()}
    return psi


def _linear_part(entry, letter_to_leg, alphabet):
    out = {}
    for w, c in entry.terms.items():
        if len(w) == 0:
            continue
        if len(w) != 1:
            raise BlockMismatch("differential entry of degree > 1")
        name = alphabet.names[w[0]]
        if name not in letter_to_leg:
            raise BlockMismatch(f"differential entry uses {name} outside the block")
        out[letter_to_leg[name]] = c
    return out


def _push_tensor(tensor, y, psi, legs_count):
    """Braid y from the left through every leg of the tensor.
    tensor: {legs: Scalar}; returns {(legs, y_final): Scalar}."""
    state = {}
    for legs, c in tensor.items():
        frontier = {((), y): c}
        for leg in legs:
            nxt = {}
            for (done, ycur), cf in frontier.items():
                for (j, y2), ex in psi[(ycur, leg)].items():
                    k = (done + (j,), y2)
                    s = nxt.get(k)
                    s = cf * ex if s is None else s + cf * ex
                    if s:
                        nxt[k] = s
                    else:
                        nxt.pop(k, None)
            frontier = nxt
        for (done, yfin), cf in frontier.items():
            k = (done, yfin)
            s = state.get(k)
            s = cf if s is None else s + cf
            if s:
                state[k] = s
            else:
                state.pop(k, None)
    return state


def attach_twisted_action(kc, factors=None):
    """Generate the braided left-action tables of external generators on
    every free basis symbol, level by level.

    The level-k symbols embed into k-tensors of block letters via the
    linear parts of the differentials; the action braids the external
    generator through the legs and is re-expressed in the symbol basis.
    """
    pres = kc.ambient
    if len(pres.factors) < 2:
        raise BlockMismatch("twisted actions need at least two tensor factors")
    if factors is None:
        factors = [i for i in range(len(pres.factors)) if i != kc.factor]
    if kc.factor in factors:
        raise BlockMismatch("the resolved factor is not external to itself")
    blk = kc.block()
    v_names = list(blk.names_ordered())
    letter_to_leg = {nm: i for i, nm in enumerate(v_names)}
    ext_names = []
    for fi in factors:
        for b in pres.factors[fi].blocks:
            ext_names.extend(b.names_ordered())
    psi = _exchange_coefficients(pres, v_names, ext_names)

    # symbol embeddings: level k basis as tensors {legs: Scalar}
    ranks = list(kc.ranks[::-1])          # ranks[k] at position -k
    diffs = list(kc.differentials[::-1])  # diffs[k]: position -(k+1) -> -k
    taus = [[{(): ONE}]]
    for k in range(1, len(ranks)):
        mat = diffs[k - 1]
        prev = taus[k - 1]
        level = []
        for j in range(ranks[k]):
            t = {}
            for h in range(ranks[k - 1]):
                entry = mat[h][j]
                if entry.is_zero():
                    continue
                lin = _linear_part(entry, letter_to_leg, pres.alphabet)
                for legs, c in prev[h].items():
                    for leg, lc in lin.items():
                        key = legs + (leg,)
                        s = t.get(key)
                        s = c * lc if s is None else s + c * lc
                        if s:
                            t[key] = s
                        else:
                            t.pop(key, None)
            level.append(t)
        taus.append(level)

    tables = {}
    for y in ext_names:
        per_level = [[[pres.gen(y)]]]
        for k in range(1, len(ranks)):
            ech = Echelon()
            for t in taus[k]:
                ech.insert(dict(t))
            r = ranks[k]
            mat = [[pres.parse("0") for _ in range(r)] for _ in range(r)]
            for j in range(r):
                pushed = _push_tensor(taus[k][j], y, psi, k)
                by_y = {}
                for (legs, yfin), c in pushed.items():
                    by_y.setdefault(yfin, {})[legs] = c
                for yfin, vec in by_y.items():
                    sol = ech.solve(vec)
                    if sol is None:
                        raise BlockMismatch(
                            f"braided image of symbol {j} at level {k} "
                            "leaves the symbol span")
                    for l, c in sol.items():
                        mat[l][j] = mat[l][j] + c * pres.gen(yfin)
            per_level.append(mat)
        tables[y] = per_level
    return TwistedLeftAction(kc, tuple(ext_names), tables)


def check_equivariance(kc, tla):
    """delta(y . e) - y . delta(e) for every external generator, level,
    and component; returns nonzero residuals (expected empty)."""
    pres = kc.ambient
    nf = pres.normal_form
    ranks = list(kc.ranks[::-1])
    diffs = list(kc.differentials[::-1])
    bad = []
    for y in tla.generators:
        tabs = tla.tables[y]
        for k in range(1, len(ranks)):
            d = diffs[k - 1]          # level k -> level k-1
            t_hi = tabs[k]
            t_lo = tabs[k - 1]
            for g in range(ranks[k - 1]):
                for j in range(ranks[k]):
                    acc = pres.parse("0")
                    for h in range(ranks[k - 1]):
                        acc = acc + t_lo[g][h] * d[h][j]
                    for l in range(ranks[k]):
                        acc = acc - d[g][l] * t_hi[l][j]
                    res = nf(acc)
                    if not res.is_zero():
                        bad.append((y, k, g, j, res))
    return bad
