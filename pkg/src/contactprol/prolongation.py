"""Prolongation chains, finite-type verdicts and the flat prolonged connection.

Chain spaces are kept in nested coordinates: level j lives inside
covectors ⊗ (level j-1), recorded by an inclusion matrix.  Below the
symbol kernel the tower continues with the jet models of the contact
symbol spaces tensored with E, peeled one slot at a time by the
right-invariant fields.  Membership of a candidate in the next contact
symbol space only involves its first two or three slots, so every test
runs on small matrices no matter how long the chain gets.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations_with_replacement
from math import comb

from gmpy2 import mpq

from .linalg import (
    Matrix,
    Subspace,
    intersect,
    kernel,
    kron,
    splitting,
    tensor_subspace,
    vec_axpy,
    vstack,
)
from .operators import DarbouxOperator, Term, enhanced_symbol, zeroth_order_matrix
from .polynomial import Poly, weighted_monomials
from .symplectic import SymplecticSpace, build_sperp, jet_embed, peel_matrix, sperp_dim_formula

DEFAULT_LMAX = 8


class Verdict(str, Enum):
    FINITE_TYPE = "FiniteType"
    NOT_FINITE_WITHIN_CAP = "NotFiniteTypeWithinCap"
    DEGENERATE = "Degenerate"


class NotFiniteTypeWithinCap(RuntimeError):
    """The chain had not vanished when the level cap was reached."""


@dataclass(frozen=True)
class ProlongationChain:
    kind: str
    n: int
    order_k: int
    dim_E: int
    dim_F: int
    symbol_rank: int
    dim_KH: int
    levels: tuple[int, ...]
    verdict: Verdict
    rank_T: int | None
    lmax: int
    tower: "_Tower | None" = field(default=None, compare=False, repr=False)

    @property
    def finite_type(self) -> bool:
        return self.verdict is Verdict.FINITE_TYPE

    @property
    def graded_dims(self) -> list[int]:
        """Dimensions of the successive pieces whose sum is rank_T."""
        if self.tower is None:
            return []
        return list(self.tower.dims)


@dataclass
class _Tower:
    """Nested spaces T_0 = E, T_1, ... with inclusions T_j -> covectors ⊗ T_{j-1}."""

    d: int
    dims: list[int]
    incl: list[Matrix | None]
    jet_blocks: int  # number of leading T_j that are full jet models (j < k)

    def push(self, basis: Matrix) -> None:
        self.dims.append(basis.cols)
        self.incl.append(basis)


# ---------------------------------------------------------------- constraint matrices

def _first_pair_trace_constraint(space: SymplecticSpace, width: int) -> Matrix:
    """Skew part of slots (1,2) minus L times the Levi trace of slots (2,3) over 2n.

    Acts on covectors^{⊗3} ⊗ Q^width; rows are (a<b, slot-1 index, v).
    """
    d, n = space.dim, space.n
    pairs = [(a, b) for a in range(d) for b in range(a + 1, d)]
    row_of = {p: i for i, p in enumerate(pairs)}
    levi = space.levi_pairs()
    lower = [(a, b, v) for a, b, v in levi if a < b]
    inv_n = mpq(1, n)
    entries: dict = {}
    for a in range(d):
        for b in range(d):
            if a == b:
                continue
            sign = 1 if a < b else -1
            pr = row_of[(min(a, b), max(a, b))]
            for c in range(d):
                for v in range(width):
                    col = ((a * d + b) * d + c) * width + v
                    row = (pr * d + c) * width + v
                    entries[(row, col)] = entries.get((row, col), 0) + sign
    for r1 in range(d):
        for e1, e2, linv in levi:
            for p, q, lv in lower:
                pr = row_of[(p, q)]
                for v in range(width):
                    col = ((r1 * d + e1) * d + e2) * width + v
                    row = (pr * d + r1) * width + v
                    entries[(row, col)] = entries.get((row, col), 0) - inv_n * lv * linv
    return Matrix(len(pairs) * d * width, d ** 3 * width, entries)


def _first_pair_tracefree_constraint(space: SymplecticSpace, width: int) -> Matrix:
    """Trace-free skew part of slots (1,2) on covectors^{⊗2} ⊗ Q^width."""
    d, n = space.dim, space.n
    pairs = [(a, b) for a in range(d) for b in range(a + 1, d)]
    row_of = {p: i for i, p in enumerate(pairs)}
    levi = space.levi_pairs()
    lower = [(a, b, v) for a, b, v in levi if a < b]
    inv_n = mpq(1, n)
    entries: dict = {}
    for a in range(d):
        for b in range(d):
            if a == b:
                continue
            sign = 1 if a < b else -1
            pr = row_of[(min(a, b), max(a, b))]
            for v in range(width):
                key = (pr * width + v, (a * d + b) * width + v)
                entries[key] = entries.get(key, 0) + sign
    for e1, e2, linv in levi:
        for p, q, lv in lower:
            for v in range(width):
                key = (row_of[(p, q)] * width + v, (e1 * d + e2) * width + v)
                entries[key] = entries.get(key, 0) - inv_n * lv * linv
    return Matrix(len(pairs) * width, d * d * width, entries)


def _symmetric_pair_constraint(d: int, width: int) -> Matrix:
    pairs = [(a, b) for a in range(d) for b in range(a + 1, d)]
    entries = {}
    for i, (a, b) in enumerate(pairs):
        for v in range(width):
            entries[(i * width + v, (a * d + b) * width + v)] = 1
            entries[(i * width + v, (b * d + a) * width + v)] = -1
    return Matrix(len(pairs) * width, d * d * width, entries)


def projected_skew(space: SymplecticSpace, width: int) -> Matrix:
    """X_ab -> skew part minus its Levi-trace component, on covectors^{⊗2} ⊗ Q^width."""
    d, n = space.dim, space.n
    levi = space.levi_pairs()
    entries: dict = {}
    half = mpq(1, 2)
    for a in range(d):
        for b in range(d):
            if a == b:
                continue
            for v in range(width):
                row = (a * d + b) * width + v
                entries[(row, row)] = entries.get((row, row), 0) + half
                other = (b * d + a) * width + v
                entries[(row, other)] = entries.get((row, other), 0) - half
    for a, b, lv in levi:
        for p, q, linv in levi:
            for v in range(width):
                key = ((a * d + b) * width + v, (p * d + q) * width + v)
                entries[key] = entries.get(key, 0) - mpq(lv * linv, 2 * n)
    size = d * d * width
    return Matrix(size, size, entries)


# ---------------------------------------------------------------- helpers

def _basis_matrix(sub: Subspace) -> Matrix:
    return Matrix.from_columns(sub.vectors, sub.ambient_dim)


def _grow(tower: _Tower, constraint_for) -> Matrix:
    """Next level: vectors of covectors ⊗ T_top satisfying the first-pair condition."""
    d = tower.d
    top = len(tower.dims) - 1
    expand = kron(Matrix.identity(d), tower.incl[top])
    cons, slots = constraint_for(top + 1)
    if slots == 3:
        expand = kron(Matrix.identity(d * d), tower.incl[top - 1]) @ expand
    mat = cons @ expand
    return _basis_matrix(kernel(mat))


def _symbol_setup(symbol: Matrix, block: int) -> tuple[int, Subspace, int]:
    if block <= 0 or symbol.cols % block:
        raise ValueError(
            f"symbol has {symbol.cols} columns, not a multiple of the symbol-space dimension {block}"
        )
    rank_e = symbol.cols // block
    ker = kernel(symbol)
    return rank_e, ker, symbol.rank()


def _run_chain(tower: _Tower, kind, n, k, rank_e, symbol, ker, srank, lmax, constraint_for, jet_total):
    dim_kh = ker.dim
    if srank < symbol.rows:
        return ProlongationChain(
            kind, n, k, rank_e, symbol.rows, srank, dim_kh, (), Verdict.DEGENERATE, None, lmax, tower
        )
    levels: list[int] = []
    verdict = Verdict.NOT_FINITE_WITHIN_CAP
    for _ in range(lmax):
        if tower.dims[-1] == 0:
            levels.append(0)
        else:
            basis = _grow(tower, constraint_for)
            tower.push(basis)
            levels.append(basis.cols)
        if levels[-1] == 0:
            verdict = Verdict.FINITE_TYPE
            break
    # once a level vanishes every later level is contained in covectors ⊗ 0
    for i, v in enumerate(levels):
        if v == 0:
            assert all(w == 0 for w in levels[i:]), "chain failed to vanish after a zero level"
    rank_t = jet_total + dim_kh + sum(levels) if verdict is Verdict.FINITE_TYPE else None
    return ProlongationChain(
        kind, n, k, rank_e, symbol.rows, srank, dim_kh, tuple(levels), verdict, rank_t, lmax, tower
    )


# ---------------------------------------------------------------- contact chains

def _jet_tower(n: int, k: int, rank_e: int) -> _Tower:
    d = 2 * n
    tower = _Tower(d, [rank_e], [None], k)
    eye = Matrix.identity(rank_e)
    for j in range(1, k):
        tower.push(kron(peel_matrix(n, j), eye))
    return tower


def contact_chain(symbol: Matrix, n: int, k: int, lmax: int = DEFAULT_LMAX) -> ProlongationChain:
    """Contact prolongation chain of a symbol given on (degree-k monomials) x E.

    Column ``m * rank_E + e`` of the symbol is identified with the tensor
    (X_w m)(0) ⊗ e, i.e. the k-th contact derivatives of m at the origin.
    """
    if lmax < 1:
        raise ValueError("lmax must be at least 1")
    if k < 1:
        raise ValueError("order must be at least 1")
    space = SymplecticSpace(n)
    block = len(weighted_monomials(n, k))
    rank_e, ker, srank = _symbol_setup(symbol, block)
    tower = _jet_tower(n, k, rank_e)
    basis = _basis_matrix(ker)
    tower.push(kron(peel_matrix(n, k), Matrix.identity(rank_e)) @ basis)

    def constraint_for(j):
        width = tower.dims[j - 3] if j >= 3 else tower.dims[j - 2]
        if j >= 3:
            return _first_pair_trace_constraint(space, width), 3
        return _first_pair_tracefree_constraint(space, width), 2

    jet_total = rank_e * sum(sperp_dim_formula(n, j) for j in range(k))
    return _run_chain(tower, "contact", n, k, rank_e, symbol, ker, srank, lmax, constraint_for, jet_total)


def symbol_kernel_subspace(symbol: Matrix, n: int, k: int) -> Subspace:
    """Kernel of the symbol placed in the k-fold covector power ⊗ E (flat index t * rank_E + e)."""
    block = len(weighted_monomials(n, k))
    rank_e, ker, _ = _symbol_setup(symbol, block)
    jet_cols = jet_embed(n, k).columns()
    vecs = []
    for v in ker.vectors:
        out: dict = {}
        for idx, c in v.items():
            m, e = divmod(idx, rank_e)
            vec_axpy(out, c, {t * rank_e + e: x for t, x in jet_cols[m].items()})
        vecs.append(out)
    return Subspace((2 * n) ** k * rank_e, vecs)


def chain_level_direct(symbol: Matrix, n: int, k: int, ell: int) -> Subspace:
    """(S⊥^l ⊗ K_H) ∩ (S⊥^{k+l} ⊗ E) computed in the full ambient tensor power.

    Independent of the nested tower; only practical for small cases.
    """
    kh = symbol_kernel_subspace(symbol, n, k)
    rank_e = kh.ambient_dim // (2 * n) ** k
    left = tensor_subspace(build_sperp(n, ell), kh)
    right = tensor_subspace(build_sperp(n, k + ell), Subspace.full(rank_e))
    return intersect(left, right)


def chain_for_operator(op: DarbouxOperator, lmax: int = DEFAULT_LMAX) -> ProlongationChain:
    return contact_chain(enhanced_symbol(op), op.n, op.order, lmax)


# ---------------------------------------------------------------- classical chains

def sym_peel_matrix(d: int, j: int) -> Matrix:
    """Plain symmetric basis of degree j inside covectors ⊗ (symmetric basis of degree j-1)."""
    lower = {m: i for i, m in enumerate(combinations_with_replacement(range(d), j - 1))}
    cols = []
    for multiset in combinations_with_replacement(range(d), j):
        col = {}
        for a in sorted(set(multiset)):
            rest = list(multiset)
            rest.remove(a)
            col[a * len(lower) + lower[tuple(rest)]] = 1
        cols.append(col)
    return Matrix.from_columns(cols, d * len(lower))


def classical_chain(symbol: Matrix, dim_manifold: int, k: int, lmax: int = DEFAULT_LMAX) -> ProlongationChain:
    """Classical chain K^l = (⊙^l ⊗ K) ∩ (⊙^{k+l} ⊗ E).

    Symbol columns are indexed by (sorted multiset of k directions) x E, the
    multiset standing for the sum of its distinct orderings.
    """
    if lmax < 1:
        raise ValueError("lmax must be at least 1")
    d = dim_manifold
    block = comb(d + k - 1, k)
    rank_e, ker, srank = _symbol_setup(symbol, block)
    eye = Matrix.identity(rank_e)
    tower = _Tower(d, [rank_e], [None], k)
    for j in range(1, k):
        tower.push(kron(sym_peel_matrix(d, j), eye))
    tower.push(kron(sym_peel_matrix(d, k), eye) @ _basis_matrix(ker))

    def constraint_for(j):
        return _symmetric_pair_constraint(d, tower.dims[j - 2]), 2

    jet_total = rank_e * sum(comb(d + j - 1, j) for j in range(k))
    return _run_chain(tower, "classical", d, k, rank_e, symbol, ker, srank, lmax, constraint_for, jet_total)


# ---------------------------------------------------------------- flat connection

@dataclass(frozen=True)
class FlatConnection:
    """Constant coefficients A_a with parallel sections X_a Sigma = A_a Sigma.

    Sigma stacks (sigma, mu_0, mu_1, ...) with mu_0 in K_H and mu_l in the
    l-th prolongation space, each in the nested coordinates of the chain.
    """

    n: int
    total_rank: int
    block_dims: tuple[int, ...]
    coeff: tuple[Matrix, ...]
    projection: Matrix

    def block_offsets(self) -> list[int]:
        out, acc = [], 0
        for b in self.block_dims:
            out.append(acc)
            acc += b
        return out


def _slice_rows(m: Matrix, a: int, size: int) -> list[dict]:
    return [m.row(a * size + i) for i in range(size)]


def build_flat_connection(op: DarbouxOperator, chain: ProlongationChain | None = None) -> FlatConnection:
    """Prolonged connection for a first-order constant-coefficient operator with n >= 2."""
    n = op.n
    if n < 2:
        raise ValueError("the flat connection builder needs n >= 2")
    if op.order != 1:
        raise ValueError("the flat connection builder needs a first-order operator")
    for t in op.terms:
        if any(not p.is_constant() for row in t.coeff for p in row):
            raise ValueError("the flat connection builder needs constant coefficients")
    if chain is None:
        chain = chain_for_operator(op)
    if chain.verdict is not Verdict.FINITE_TYPE or chain.kind != "contact" or chain.order_k != 1:
        raise ValueError("the flat connection builder needs a finite-type first-order contact chain")

    space = SymplecticSpace(n)
    d = space.dim
    tower = chain.tower
    e = op.rank_E
    # blocks: sigma, then every nonzero tower level above E
    dims = [tower.dims[0]] + [x for x in tower.dims[1:] if x]
    incl = tower.incl[: len(dims)]
    offsets = []
    acc = 0
    for x in dims:
        offsets.append(acc)
        acc += x
    total = acc
    top = len(dims) - 1

    symbol = enhanced_symbol(op, 1)
    gamma = splitting(symbol) @ zeroth_order_matrix(op)  # covectors ⊗ E  x  E

    rows: list[list[dict]] = [[dict() for _ in range(total)] for _ in range(d)]

    def place(a: int, block: int, src_rows: list[dict], col_block: int | None) -> None:
        base_r = offsets[block]
        base_c = 0 if col_block is None else offsets[col_block]
        for i, r in enumerate(src_rows):
            target = rows[a][base_r + i]
            for j, v in r.items():
                target[base_c + j] = target.get(base_c + j, 0) + v
                if not target[base_c + j]:
                    del target[base_c + j]

    # sigma: X_a sigma = slice_a(mu_0) - slice_a(Gamma) sigma
    for a in range(d):
        if top >= 1:
            place(a, 0, _slice_rows(incl[1], a, e), 1)
        place(a, 0, [{j: -v for j, v in r.items()} for r in _slice_rows(gamma, a, e)], 0)

    def current(a: int) -> Matrix:
        return Matrix.from_rows(rows[a], total)

    for j in range(1, top + 1):
        vdim = dims[j - 1]
        tdim = dims[j]
        # lower part of the block j-1 rows: drop the block-j columns
        lo, hi = offsets[j], offsets[j] + tdim
        lower_parts = []
        for b in range(d):
            lp = []
            for i in range(vdim):
                r = rows[b][offsets[j - 1] + i]
                lp.append({c: v for c, v in r.items() if not lo <= c < hi})
            lower_parts.append(Matrix.from_rows(lp, total))
        amat = [current(a) for a in range(d)]
        w = vstack([lower_parts[b] @ amat[a] for a in range(d) for b in range(d)])
        pskew = projected_skew(space, vdim)
        rhs = (pskew @ w).scale(-1)
        partial = pskew @ kron(Matrix.identity(d), incl[j])
        expected = d * tdim - (dims[j + 1] if j < top else 0)
        if partial.rank() != expected:
            raise RuntimeError("prolongation level does not match the kernel of the first-pair map")
        sol = splitting(partial) @ rhs
        for a in range(d):
            place(a, j, _slice_rows(sol, a, tdim), None)
            if j < top:
                place(a, j, _slice_rows(incl[j + 1], a, tdim), j + 1)

    coeff = tuple(Matrix.from_rows(rows[a], total) for a in range(d))
    proj = Matrix(e, total, {(i, i): 1 for i in range(e)})
    return FlatConnection(n, total, tuple(dims), coeff, proj)


def parallel_operator(conn: FlatConnection) -> DarbouxOperator:
    """Sigma -> (X_a Sigma - A_a Sigma)_a as a Darboux operator."""
    n, r = conn.n, conn.total_rank
    d = 2 * n
    zero = Poly.zero(n)
    terms = []
    for a in range(d):
        coeff = []
        for b in range(d):
            for i in range(r):
                coeff.append(tuple(Poly.constant(n, 1) if (b == a and j == i) else zero for j in range(r)))
        terms.append(Term((a,), tuple(coeff)))
    const = []
    for a in range(d):
        for i in range(r):
            row = conn.coeff[a].row(i)
            const.append(tuple(Poly.constant(n, -row.get(j, 0)) for j in range(r)))
    terms.append(Term((), tuple(const)))
    return DarbouxOperator(n, r, d * r, tuple(terms))
