"""Rewriting noncommutative polynomials to normal form.

A RewriteSystem is a set of rules lhs -> rhs where lhs is a word, rhs a
polynomial strictly smaller in deglex.  Rewriting replaces the leftmost
occurrence of any lhs; since every replacement word is strictly smaller,
reduction terminates, and when the system is confluent (checked by
examining overlap ambiguities) the result is a normal form independent
of strategy.

orient() turns a list of relations into rules, interreducing so that no
lhs divides another lhs or appears in any rhs.  Two independent ways of
counting graded dimensions are provided: a transfer-matrix count of
words avoiding the leading-word set, and a rank computation over the
span of all shifts u*r*w of the defining relations.  Comparing them
cross-checks both confluence and the linear algebra.
"""

from __future__ import annotations

from .freealg import Alphabet, NcPoly, Word, word_key
from .linalg import Echelon
from .scalar import ONE, ZERO, Scalar

__all__ = [
    "RewriteRule",
    "RewriteSystem",
    "OrientationError",
    "orient",
    "check_confluence",
    "graded_dimension_rewrite",
    "graded_dimension_linear",
]


class OrientationError(ValueError):
    """A relation list cannot be oriented into a valid rule set."""


class RewriteRule:
    """One rule lhs -> rhs; rhs as {word: Scalar}, all words < lhs."""

    __slots__ = ("lhs", "rhs")

    def __init__(self, lhs: Word, rhs: dict):
        lk = word_key(lhs)
        for w in rhs:
            if word_key(w) >= lk:
                raise OrientationError(
                    f"rule rhs word {w} not smaller than lhs {lhs}")
        self.lhs = tuple(lhs)
        self.rhs = dict(rhs)

    def as_relation(self, alphabet: Alphabet) -> NcPoly:
        terms = {self.lhs: ONE}
        for w, c in self.rhs.items():
            terms[w] = terms.get(w, ZERO) - c
        return NcPoly(alphabet, terms)

    def __repr__(self):
        return f"RewriteRule({self.lhs} -> {self.rhs})"


class RewriteSystem:
    """Immutable rule set with memoized normal forms."""

    def __init__(self, alphabet: Alphabet, rules):
        self.alphabet = alphabet
        if isinstance(rules, dict):
            rules = [RewriteRule(l, r) for l, r in rules.items()]
        self.rules = {r.lhs: r.rhs for r in rules}
        self.rule_lengths = sorted({len(l) for l in self.rules})
        self._cache: dict = {}

    def __len__(self):
        return len(self.rules)

    # -- matching --------------------------------------------------------------

    def find_match(self, w: Word):
        """Leftmost, then shortest, occurrence of a lhs in w, or None."""
        rules = self.rules
        n = len(w)
        for i in range(n):
            for L in self.rule_lengths:
                if i + L > n:
                    break
                if w[i:i + L] in rules:
                    return i, w[i:i + L]
        return None

    def is_normal_word(self, w: Word) -> bool:
        return self.find_match(tuple(w)) is None

    # -- normal form -------------------------------------------------------------

    def nf_word(self, w: Word) -> dict:
        """Normal form of a single word as {word: Scalar}.

        Iterative DFS with a global cache; each rewrite produces strictly
        deglex-smaller words, so the dependency graph is acyclic.
        """
        cache = self._cache
        hit = cache.get(w)
        if hit is not None:
            return hit
        stack = [w]
        while stack:
            cur = stack[-1]
            if cur in cache:
                stack.pop()
                continue
            m = self.find_match(cur)
            if m is None:
                cache[cur] = {cur: ONE}
                stack.pop()
                continue
            i, lhs = m
            u, t = cur[:i], cur[i + len(lhs):]
            rhs = self.rules[lhs]
            children = [(u + wp + t, c) for wp, c in rhs.items()]
            missing = [ch for ch, _ in children if ch not in cache]
            if missing:
                stack.extend(missing)
                continue
            out: dict = {}
            for ch, c in children:
                for ww, cc in cache[ch].items():
                    s = out.get(ww, ZERO) + c * cc
                    if s:
                        out[ww] = s
                    else:
                        out.pop(ww, None)
            cache[cur] = out
            stack.pop()
        return cache[w]

    def nf_terms(self, terms: dict) -> dict:
        out: dict = {}
        for w, c in terms.items():
            for ww, cc in self.nf_word(w).items():
                s = out.get(ww, ZERO) + c * cc
                if s:
                    out[ww] = s
                else:
                    out.pop(ww, None)
        return out

    def nf(self, p: NcPoly) -> NcPoly:
        return NcPoly(self.alphabet, self.nf_terms(p.terms))

    def is_zero_mod(self, p: NcPoly) -> bool:
        return not self.nf_terms(p.terms)

    # -- normal word enumeration ---------------------------------------------------

    def iter_normal_words(self, maxdeg: int):
        """All normal words of degree <= maxdeg, in deglex order."""
        n_letters = len(self.alphabet)
        yield ()
        layer = [()]
        for _ in range(maxdeg):
            nxt = []
            for w in layer:
                for a in range(n_letters):
                    wa = w + (a,)
                    if self._tail_ok(wa):
                        nxt.append(wa)
            yield from nxt
            layer = nxt

    def _tail_ok(self, w: Word) -> bool:
        # w[:-1] is already normal: only windows touching the last letter matter
        n = len(w)
        for L in self.rule_lengths:
            if L <= n and w[n - L:] in self.rules:
                return False
        return True

    def rule_set_equal(self, other: "RewriteSystem") -> bool:
        return self.alphabet == other.alphabet and self.rules == other.rules


# ---------------------------------------------------------------------------
# orientation
# ---------------------------------------------------------------------------


def _plain_reduce(terms: dict, rules: dict, lengths) -> dict:
    """Full reduction without memoization (used while rules still change)."""
    terms = {w: c for w, c in terms.items() if c}
    while True:
        hit = None
        for w in sorted(terms, key=word_key, reverse=True):
            n = len(w)
            for i in range(n):
                for L in lengths:
                    if i + L > n:
                        break
                    if w[i:i + L] in rules:
                        hit = (w, i, w[i:i + L])
                        break
                if hit:
                    break
            if hit:
                break
        if hit is None:
            return terms
        w, i, lhs = hit
        c = terms.pop(w)
        u, t = w[:i], w[i + len(lhs):]
        for wp, cp in rules[lhs].items():
            ww = u + wp + t
            s = terms.get(ww, ZERO) + c * cp
            if s:
                terms[ww] = s
            else:
                terms.pop(ww, None)


def _contains(big: Word, small: Word) -> bool:
    ns, nb = len(small), len(big)
    return any(big[i:i + ns] == small for i in range(nb - ns + 1))


def orient(alphabet: Alphabet, relations, allow_dependent: bool = False) -> RewriteSystem:
    """Orient relations into an interreduced rewrite system.

    Each relation is rewritten modulo the rules found so far; its leading
    word becomes a new lhs.  If a new lhs divides an older one, the older
    rule is recycled through the queue.  Afterwards all rhs are reduced to
    a fixpoint, so no lhs occurs anywhere in the system except as its own
    head.  A relation that reduces to zero is an error unless
    allow_dependent is set (for hand-entered lists it signals a typo).
    """
    queue = [p.terms for p in relations]
    rules: dict = {}

    def lengths():
        return sorted({len(l) for l in rules})

    while queue:
        terms = queue.pop(0)
        terms = _plain_reduce(terms, rules, lengths())
        if not terms:
            if allow_dependent:
                continue
            raise OrientationError("relation reduced to zero during orientation")
        lead = max(terms, key=word_key)
        lc = terms[lead]
        rhs = {w: -(c / lc) for w, c in terms.items() if w != lead}
        # retire any older rule whose lhs is divisible by the new lead
        for old in [l for l in rules if _contains(l, lead) and l != lead]:
            old_rhs = rules.pop(old)
            old_terms = {old: ONE}
            for w, c in old_rhs.items():
                old_terms[w] = old_terms.get(w, ZERO) - c
            queue.append(old_terms)
        rules[lead] = rhs
    # reduce tails to a fixpoint
    ls = lengths()
    changed = True
    while changed:
        changed = False
        for lhs in list(rules):
            new = _plain_reduce(dict(rules[lhs]), rules, ls)
            if new != rules[lhs]:
                lk = word_key(lhs)
                if any(word_key(w) >= lk for w in new):
                    raise OrientationError(
                        f"tail reduction broke the order for lhs {lhs}")
                rules[lhs] = new
                changed = True
    return RewriteSystem(alphabet, rules)


# ---------------------------------------------------------------------------
# confluence
# ---------------------------------------------------------------------------


def check_confluence(system: RewriteSystem, degree_bound: int):
    """All unresolved critical pairs on words of length <= degree_bound.

    Examines every overlap ambiguity (suffix of one lhs = prefix of
    another) and every inclusion ambiguity (one lhs inside another).
    Returns a list of (critical_word, residue) with residue a nonzero
    NcPoly; empty list means confluent up to the bound.
    """
    bad = []
    rules = system.rules
    for l1 in rules:
        for l2 in rules:
            # overlap: proper suffix of l1 equals proper prefix of l2
            for k in range(1, min(len(l1), len(l2))):
                if l1[len(l1) - k:] != l2[:k]:
                    continue
                w = l1 + l2[k:]
                if len(w) > degree_bound:
                    continue
                left = _splice(system, (), rules[l1], l2[k:])
                right = _splice(system, l1[:len(l1) - k], rules[l2], ())
                res = _sub_terms(system.nf_terms(left), system.nf_terms(right))
                if res:
                    bad.append((w, NcPoly(system.alphabet, res)))
            # inclusion: l2 properly inside l1
            if len(l2) < len(l1):
                for i in range(len(l1) - len(l2) + 1):
                    if l1[i:i + len(l2)] != l2:
                        continue
                    if len(l1) > degree_bound:
                        continue
                    left = dict(rules[l1])
                    right = _splice(system, l1[:i], rules[l2], l1[i + len(l2):])
                    res = _sub_terms(system.nf_terms(left), system.nf_terms(right))
                    if res:
                        bad.append((l1, NcPoly(system.alphabet, res)))
    return bad


def _splice(system, prefix, rhs: dict, suffix) -> dict:
    prefix = tuple(prefix)
    suffix = tuple(suffix)
    return {prefix + w + suffix: c for w, c in rhs.items()}


def _sub_terms(a: dict, b: dict) -> dict:
    out = dict(a)
    for w, c in b.items():
        s = out.get(w, ZERO) - c
        if s:
            out[w] = s
        else:
            out.pop(w, None)
    return out


# ---------------------------------------------------------------------------
# graded dimensions, two independent ways
# ---------------------------------------------------------------------------


def graded_dimension_rewrite(system: RewriteSystem, n: int):
    """Number of normal words of each degree 0..n (transfer-matrix count)."""
    lengths = system.rule_lengths
    L = max(lengths) if lengths else 1
    # state: last min(len, L-1) letters
    counts = [1]
    states = {(): 1}
    nl = len(system.alphabet)
    for _ in range(n):
        nxt: dict = {}
        for s, m in states.items():
            for a in range(nl):
                sa = s + (a,)
                if not system._tail_ok(sa):
                    continue
                key = sa[max(0, len(sa) - (L - 1)):] if L > 1 else ()
                nxt[key] = nxt.get(key, 0) + m
        counts.append(sum(nxt.values()))
        states = nxt
    return counts


def graded_dimension_linear(alphabet: Alphabet, relations, n: int):
    """Filtered dimension increments via rank of all shifts u*r*w.

    Fully independent of the rewriting machinery: spans the relation
    shifts of filtration degree <= n inside the free algebra and counts
    dim(words of degree <= d) - rank for each d.  Matches the rewrite
    count exactly when the oriented system is confluent.
    """
    nl = len(alphabet)
    rels = [p.terms for p in relations if p.terms]
    degs = [max(len(w) for w in t) for t in rels]
    ech = Echelon(col_key=word_key)
    nwords = 1
    out = [1]  # degree 0: the empty word, no relation reaches it
    prev_total = 1
    for d in range(1, n + 1):
        nwords += nl**d
        for (terms, dr) in zip(rels, degs):
            rest = d - dr
            if rest < 0:
                continue
            for i in range(rest + 1):
                for u in _all_words(nl, i):
                    for w in _all_words(nl, rest - i):
                        row = {u + mid + w: c for mid, c in terms.items()}
                        ech.insert(row, tag={})
        total = nwords - ech.rank
        out.append(total - prev_total)
        prev_total = total
    return out


def _all_words(nl: int, length: int):
    if length == 0:
        yield ()
        return
    for w in _all_words(nl, length - 1):
        for a in range(nl):
            yield w + (a,)
