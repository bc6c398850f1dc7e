"""Linear differential operators on the Heisenberg group written in Darboux coordinates."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from gmpy2 import mpq

from .linalg import Matrix
from .polynomial import (
    Poly,
    apply_word,
    generator_index,
    generator_names,
    generator_weight,
    parse_poly,
    weighted_monomials,
)


@dataclass(frozen=True)
class Term:
    """One word of generators with a rank_F x rank_E matrix of polynomial coefficients."""

    word: tuple[int, ...]
    coeff: tuple[tuple[Poly, ...], ...]

    def weight(self, n: int) -> int:
        return sum(generator_weight(n, g) for g in self.word)

    def is_zero(self) -> bool:
        return all(p.is_zero() for row in self.coeff for p in row)


@dataclass(frozen=True)
class PolySection:
    """A section of the trivial bundle of the given rank with polynomial components."""

    components: tuple[Poly, ...]

    @property
    def rank(self) -> int:
        return len(self.components)

    @classmethod
    def of(cls, n: int, comps: Sequence) -> "PolySection":
        return cls(tuple(c if isinstance(c, Poly) else parse_poly(n, c) for c in comps))

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def __str__(self) -> str:
        return "(" + ", ".join(str(c) for c in self.components) + ")"


@dataclass(frozen=True)
class DarbouxOperator:
    n: int
    rank_E: int
    rank_F: int
    terms: tuple[Term, ...] = ()
    declared_order: int | None = None

    def __post_init__(self):
        for t in self.terms:
            if len(t.coeff) != self.rank_F or any(len(r) != self.rank_E for r in t.coeff):
                raise ValueError("coefficient shape does not match rank_F x rank_E")
            if any(g < 0 or g > 2 * self.n for g in t.word):
                raise ValueError(f"generator out of range in word {t.word}")
        if self.declared_order is not None and self.declared_order < self.weighted_order:
            raise ValueError(
                f"declared order {self.declared_order} is below the weighted order {self.weighted_order}"
            )

    @property
    def weighted_order(self) -> int:
        return max((t.weight(self.n) for t in self.terms if not t.is_zero()), default=0)

    @property
    def order(self) -> int:
        """Declared order when given, otherwise the weighted order."""
        return self.weighted_order if self.declared_order is None else self.declared_order

    @classmethod
    def from_terms(cls, n: int, rank_E: int, rank_F: int, terms, declared_order=None) -> "DarbouxOperator":
        """Build from ``[(word, coeff_rows), ...]`` with generator names and polynomial strings."""
        built = []
        for word, rows in terms:
            w = tuple(g if isinstance(g, int) else generator_index(n, g) for g in word)
            coeff = tuple(tuple(c if isinstance(c, Poly) else parse_poly(n, c) for c in r) for r in rows)
            built.append(Term(w, coeff))
        return cls(n, rank_E, rank_F, tuple(built), declared_order)

    def plus(self, other: "DarbouxOperator") -> "DarbouxOperator":
        if (self.n, self.rank_E, self.rank_F) != (other.n, other.rank_E, other.rank_F):
            raise ValueError("operators act between different bundles")
        order = None
        if self.declared_order is not None or other.declared_order is not None:
            order = max(self.order, other.order)
        return DarbouxOperator(self.n, self.rank_E, self.rank_F, self.terms + other.terms, order)

    def word_names(self, word) -> list[str]:
        names = generator_names(self.n)
        return [names[g] for g in word]

    def has_constant_top_coefficients(self) -> bool:
        k = self.order
        return all(p.is_constant() for t in self.terms if t.weight(self.n) == k for r in t.coeff for p in r)


def apply(op: DarbouxOperator, s: PolySection) -> PolySection:
    """Apply the operator to a polynomial section."""
    if s.rank != op.rank_E:
        raise ValueError(f"section has rank {s.rank}, operator expects {op.rank_E}")
    n = op.n
    out = [Poly.zero(n) for _ in range(op.rank_F)]
    for t in op.terms:
        derived = [apply_word(c, t.word) for c in s.components]
        for f, row in enumerate(t.coeff):
            for e, c in enumerate(row):
                if c.terms and derived[e].terms:
                    out[f] = out[f] + c * derived[e]
    return PolySection(tuple(out))


def _unit_section(n: int, rank: int, e: int, p: Poly) -> PolySection:
    comps = [Poly.zero(n)] * rank
    comps[e] = p
    return PolySection(tuple(comps))


def enhanced_symbol(op: DarbouxOperator, k: int | None = None) -> Matrix:
    """Top weighted part evaluated on monomials: rank_F x (#monomials of degree k * rank_E).

    Column ``m * rank_E + e`` is apply(op, m e) at the origin, for the m-th
    weighted monomial of degree k.
    """
    k = op.order if k is None else k
    n = op.n
    monos = weighted_monomials(n, k)
    r = op.rank_E
    entries = {}
    for i, m in enumerate(monos):
        p = m.poly()
        for e in range(r):
            img = apply(op, _unit_section(n, r, e, p))
            for f, c in enumerate(img.components):
                v = c.at_origin()
                if v:
                    entries[(f, i * r + e)] = v
    return Matrix(op.rank_F, len(monos) * r, entries)


def word_symbol(op: DarbouxOperator, k: int | None = None) -> Matrix:
    """Coefficients of words of contact directions in the top weighted part.

    Each Z is rewritten as (1/n) sum_i (X_i Y_i - Y_i X_i); coefficients are
    taken at the origin.  Columns are indexed by (word flattened, e) so the
    result pairs with the k-fold tensor power of covectors tensored with E.
    """
    k = op.order if k is None else k
    n = op.n
    d = 2 * n
    r = op.rank_E
    acc: dict = {}
    for t in op.terms:
        if t.weight(n) != k:
            continue
        for word, scale in _expand_transverse(n, t.word):
            col_base = 0
            for g in word:
                col_base = col_base * d + g
            for f, row in enumerate(t.coeff):
                for e, c in enumerate(row):
                    v = c.at_origin() * scale
                    if v:
                        key = (f, col_base * r + e)
                        acc[key] = acc.get(key, 0) + v
    return Matrix(op.rank_F, d ** k * r, acc)


def _expand_transverse(n: int, word):
    z = 2 * n
    words = [((), mpq(1))]
    for g in word:
        nxt = []
        for w, s in words:
            if g == z:
                for i in range(n):
                    nxt.append((w + (i, n + i), s / n))
                    nxt.append((w + (n + i, i), -s / n))
            else:
                nxt.append((w + (g,), s))
        words = nxt
    return words


def second_order_split(op: DarbouxOperator) -> tuple[Matrix, Matrix]:
    """For a weighted-order-2 operator return (symmetric part, transverse part).

    The symmetric part is rank_F x (d*d*rank_E) with entries
    (c_ab + c_ba)/2; the transverse part is the rank_F x rank_E coefficient
    of the Z-derivative once the word coefficients are symmetrised,
    (1/2) sum_i (c_{x_i y_i} - c_{y_i x_i}).
    """
    if op.order != 2:
        raise ValueError("second_order_split needs an operator of weighted order 2")
    n = op.n
    d = 2 * n
    r = op.rank_E
    ws = word_symbol(op, 2)
    sym = {}
    skew = {}
    for f in range(op.rank_F):
        for a in range(d):
            for b in range(d):
                for e in range(r):
                    v = (ws[f, (a * d + b) * r + e] + ws[f, (b * d + a) * r + e]) / 2
                    if v:
                        sym[(f, (a * d + b) * r + e)] = v
        for e in range(r):
            v = mpq(0)
            for i in range(n):
                v += (ws[f, (i * d + n + i) * r + e] - ws[f, ((n + i) * d + i) * r + e]) / 2
            if v:
                skew[(f, e)] = v
    return Matrix(op.rank_F, d * d * r, sym), Matrix(op.rank_F, r, skew)


def zeroth_order_matrix(op: DarbouxOperator) -> Matrix:
    """Constant parts of the coefficients of the empty word."""
    entries = {}
    for t in op.terms:
        if t.word:
            continue
        for f, row in enumerate(t.coeff):
            for e, c in enumerate(row):
                v = c.at_origin()
                if v:
                    entries[(f, e)] = entries.get((f, e), 0) + v
    return Matrix(op.rank_F, op.rank_E, entries)
