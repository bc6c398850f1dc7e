from collections import Counter
from itertools import combinations_with_replacement
from math import comb, factorial

import pytest
from hypothesis import event, given
from hypothesis import strategies as st

from contactprol.catalog import (
    square_derivatives,
    three_unknown_system,
    horizontal_differential,
    two_unknown_system,
    rumin_operator,
    symmetric_derivative,
    synthetic_n2,
    x_only,
)
from contactprol.linalg import Matrix, Q
from contactprol.operators import DarbouxOperator, PolySection, apply, enhanced_symbol
from contactprol.oracle import solution_basis, solution_dim, stabilized_dim
from contactprol.polynomial import Poly, weighted_monomials
from contactprol.prolongation import (
    Verdict,
    build_flat_connection,
    chain_for_operator,
    chain_level_direct,
    classical_chain,
    contact_chain,
    parallel_operator,
)
from contactprol.symplectic import jet_embed, sperp_dim_formula


def _rank_t_formula(chain):
    jets = chain.dim_E * sum(sperp_dim_formula(chain.n, j) for j in range(chain.order_k))
    return jets + chain.dim_KH + sum(chain.levels)


# ---------------------------------------------------------------- contact chains on named operators

def test_two_unknown_system():
    chain = chain_for_operator(two_unknown_system())
    assert (chain.dim_KH, chain.levels, chain.rank_T) == (1, (2, 0), 5)
    assert chain.verdict is Verdict.FINITE_TYPE
    assert chain.rank_T == _rank_t_formula(chain) == 2 + 1 + 2


def test_three_unknown_system():
    chain = chain_for_operator(three_unknown_system())
    assert chain.graded_dims[:5] == [3, 2, 4, 2, 3]
    assert chain.rank_T == 14 == _rank_t_formula(chain)


def test_horizontal_differential():
    for n in (1, 2, 3):
        chain = chain_for_operator(horizontal_differential(n))
        assert chain.dim_KH == 0 and chain.rank_T == 1


def test_second_order_pair():
    chain = chain_for_operator(square_derivatives())
    assert chain.rank_T == 8 == _rank_t_formula(chain)
    assert chain.levels == (2, 1, 0)


def test_degenerate_symbol_is_reported():
    op = DarbouxOperator.from_terms(1, 1, 2, [(["X"], [["1"], ["0"]])])
    chain = chain_for_operator(op)
    assert chain.verdict is Verdict.DEGENERATE and chain.rank_T is None


def test_unbounded_chain_is_inconclusive():
    chain = chain_for_operator(x_only(), lmax=5)
    assert chain.verdict is Verdict.NOT_FINITE_WITHIN_CAP
    assert chain.rank_T is None and len(chain.levels) == 5 and all(chain.levels)


def test_argument_checks():
    with pytest.raises(ValueError):
        contact_chain(enhanced_symbol(two_unknown_system()), 1, 1, lmax=0)
    with pytest.raises(ValueError):
        contact_chain(Matrix.identity(3), 1, 1)


@pytest.mark.parametrize(
    "op, upto",
    [(two_unknown_system(), 3), (three_unknown_system(), 5), (square_derivatives(), 3), (symmetric_derivative(1), 3)],
    ids=["two-unknown", "three-unknown", "second-order-pair", "symmetric-derivative"],
)
def test_nested_levels_match_ambient_intersection(op, upto):
    chain = chain_for_operator(op)
    sym = enhanced_symbol(op)
    padded = list(chain.levels) + [0] * upto
    for ell in range(1, upto + 1):
        assert chain_level_direct(sym, op.n, op.order, ell).dim == padded[ell - 1]


# ---------------------------------------------------------------- random symbols

@st.composite
def random_symbols(draw):
    """Small symbols with a kernel of dimension 1 or 2, biased towards surjective."""
    n, k = draw(st.sampled_from([(1, 1), (1, 2), (1, 2), (2, 1)]))
    re = draw(st.integers(1, 2))
    cols = len(weighted_monomials(n, k)) * re
    rf = cols - draw(st.integers(1, min(2, cols - 1)))
    entries = {}
    for i in range(rf):
        for j in range(cols):
            v = draw(st.sampled_from([0, 0, 1, -1, 2]))
            if v:
                entries[(i, j)] = v
    return n, k, Matrix(rf, cols, entries)


@given(random_symbols())
def test_chain_tail_vanishes(case):
    n, k, sym = case
    chain = contact_chain(sym, n, k, lmax=5)
    event(f"k={k} {chain.verdict.value}")
    if chain.verdict is Verdict.DEGENERATE:
        return
    levels = list(chain.levels)
    for i, v in enumerate(levels):
        if v == 0:
            assert not any(levels[i:])
    if chain.verdict is Verdict.FINITE_TYPE:
        stop = len(levels)
        assert levels[-1] == 0
        assert chain.rank_T == _rank_t_formula(chain)
        # independent route: the level after the first zero is zero in the full ambient space
        if (2 * n) ** (k + stop + 1) <= 256:
            assert chain_level_direct(sym, n, k, stop + 1).dim == 0
    for ell in range(1, min(len(levels), 3) + 1):
        if (2 * n) ** (k + ell) <= 256:
            assert chain_level_direct(sym, n, k, ell).dim == levels[ell - 1]


# ---------------------------------------------------------------- classical chains

def test_classical_full_gradient():
    chain = classical_chain(Matrix.identity(3), 3, 1)
    assert chain.dim_KH == 0 and chain.rank_T == 1


def test_classical_horizontal_differential_never_terminates():
    # columns dx, dy, dz; the horizontal part forgets dz
    sym = Matrix.from_dense([[1, 0, 0], [0, 1, 0]])
    chain = classical_chain(sym, 3, 1, lmax=6)
    assert chain.verdict is Verdict.NOT_FINITE_WITHIN_CAP
    assert chain.levels == (1,) * 6


def test_classical_killing_fields_in_the_plane():
    # sigma_b -> d_a sigma_b + d_b sigma_a, columns (direction a, component e)
    pairs = [(0, 0), (0, 1), (1, 1)]
    entries = {}
    for r, (a, b) in enumerate(pairs):
        for g, e in ((a, b), (b, a)):
            entries[(r, g * 2 + e)] = entries.get((r, g * 2 + e), 0) + 1
    chain = classical_chain(Matrix(3, 4, entries), 2, 1)
    assert chain.rank_T == 3


def _classical_to_contact(sym_cl: Matrix, n: int, k: int, re: int) -> Matrix:
    """Compose a symbol on symmetric k-tensors with symmetrisation of the jet model."""
    d = 2 * n
    multisets = list(combinations_with_replacement(range(d), k))
    jets = jet_embed(n, k).columns()
    cols = []
    for jet in jets:
        # coordinates of the symmetric part in the basis of summed orderings
        coords = {}
        for key, v in jet.items():
            idx = []
            kk = key
            for _ in range(k):
                kk, a = divmod(kk, d)
                idx.append(a)
            m = multisets.index(tuple(sorted(idx)))
            orderings = factorial(k)
            for c in Counter(idx).values():
                orderings //= factorial(c)
            coords[m] = coords.get(m, 0) + Q(v) / orderings
        for e in range(re):
            col = {}
            for m, c in coords.items():
                for f, val in sym_cl.column(m * re + e).items():
                    col[f] = col.get(f, 0) + c * val
            cols.append({f: v for f, v in col.items() if v})
    return Matrix.from_columns(cols, sym_cl.rows)


@st.composite
def classical_symbols(draw):
    n, k = 1, draw(st.integers(1, 2))
    re = draw(st.integers(1, 2))
    cols = comb(2 * n + k - 1, k) * re
    rf = draw(st.integers(1, cols))
    entries = {}
    for i in range(rf):
        for j in range(cols):
            v = draw(st.sampled_from([0, 0, 1, -1]))
            if v:
                entries[(i, j)] = v
    return n, k, re, Matrix(rf, cols, entries)


@given(classical_symbols())
def test_classical_levels_bounded_by_contact_levels(case):
    n, k, re, sym_cl = case
    classical = classical_chain(sym_cl, 2 * n, k, lmax=4)
    contact = contact_chain(_classical_to_contact(sym_cl, n, k, re), n, k, lmax=4)
    event(f"k={k} {classical.verdict.value}/{contact.verdict.value}")
    if Verdict.DEGENERATE in (classical.verdict, contact.verdict):
        return
    assert classical.dim_KH <= contact.dim_KH
    c_levels = list(classical.levels) + [0] * 4
    for i, v in enumerate(contact.levels):
        assert c_levels[i] <= v


# ---------------------------------------------------------------- oracle agreement

@pytest.mark.parametrize(
    "op, nmax",
    [(two_unknown_system(), 5), (three_unknown_system(), 6), (square_derivatives(), 6), (horizontal_differential(2), 3)],
    ids=["two-unknown", "three-unknown", "second-order-pair", "horizontal-n2"],
)
def test_polynomial_solutions_attain_rank(op, nmax):
    chain = chain_for_operator(op)
    profile = stabilized_dim(op, nmax)
    assert profile.stabilized_dim == chain.rank_T


def test_rumin_operator_chain_runs():
    chain = chain_for_operator(rumin_operator(), lmax=4)
    assert chain.dim_E == 2 and chain.order_k == 2


# ---------------------------------------------------------------- flat connection

def _project(conn, section: PolySection) -> PolySection:
    n = conn.n
    comps = []
    for i in range(conn.projection.rows):
        acc = Poly.zero(n)
        for j, v in conn.projection.row(i).items():
            acc = acc + section.components[j] * v
        comps.append(acc)
    return PolySection(tuple(comps))


def _section_rank(sections) -> int:
    keys: dict = {}
    rows = []
    for s in sections:
        row = {}
        for i, c in enumerate(s.components):
            for e, v in c.terms.items():
                row[keys.setdefault((i, e), len(keys))] = v
        rows.append(row)
    return Matrix.from_rows(rows, max(len(keys), 1)).rank()


@pytest.mark.parametrize(
    "op, degree",
    [
        (synthetic_n2(False), 3),
        (synthetic_n2(True), 3),
        (horizontal_differential(2), 2),
        (symmetric_derivative(2), 3),
    ],
    ids=["synthetic", "synthetic-lower-order", "horizontal", "symmetric-derivative"],
)
def test_parallel_sections_project_onto_solutions(op, degree):
    chain = chain_for_operator(op)
    conn = build_flat_connection(op, chain)
    assert conn.total_rank == chain.rank_T
    basis = solution_basis(parallel_operator(conn), degree)
    projected = [_project(conn, s) for s in basis]
    assert all(apply(op, s).is_zero() for s in projected)
    assert _section_rank(projected) == len(basis) == solution_dim(op, degree + 1)


def test_horizontal_differential_connection_is_zero():
    conn = build_flat_connection(horizontal_differential(2))
    assert conn.total_rank == 1
    assert all(a.nnz == 0 for a in conn.coeff)


def test_connection_without_kernel():
    # K_H = 0 with a zeroth-order term: the connection only encodes the operator itself
    op = DarbouxOperator.from_terms(
        2,
        1,
        4,
        [(["X1"], [["1"], ["0"], ["0"], ["0"]]), (["X2"], [["0"], ["1"], ["0"], ["0"]]),
         (["Y1"], [["0"], ["0"], ["1"], ["0"]]), (["Y2"], [["0"], ["0"], ["0"], ["1"]]),
         ([], [["0"], ["0"], ["1"], ["0"]])],
    )
    chain = chain_for_operator(op)
    conn = build_flat_connection(op, chain)
    assert conn.total_rank == 1 and chain.dim_KH == 0
    assert conn.coeff[2].to_dense() == [[-1]]
    assert solution_dim(parallel_operator(conn), 3) == solution_dim(op, 3) == 0


def test_synthetic_bound_and_solution_counts():
    chain = chain_for_operator(synthetic_n2())
    assert (chain.dim_KH, chain.levels, chain.rank_T) == (1, (0,), 3)
    assert stabilized_dim(synthetic_n2(False), 4).stabilized_dim == 3
    assert stabilized_dim(synthetic_n2(True), 4).stabilized_dim == 2


def test_connection_preconditions():
    with pytest.raises(ValueError):
        build_flat_connection(two_unknown_system())
    with pytest.raises(ValueError):
        build_flat_connection(DarbouxOperator.from_terms(2, 1, 1, [(["X1", "X1"], [["1"]])]))
    with pytest.raises(ValueError):
        build_flat_connection(DarbouxOperator.from_terms(2, 1, 4, [
            (["X1"], [["x1"], ["0"], ["0"], ["0"]]), (["X2"], [["0"], ["1"], ["0"], ["0"]]),
            (["Y1"], [["0"], ["0"], ["1"], ["0"]]), (["Y2"], [["0"], ["0"], ["0"], ["1"]])]))
    with pytest.raises(ValueError):
        build_flat_connection(DarbouxOperator.from_terms(2, 1, 1, [(["X1"], [["1"]])]))
