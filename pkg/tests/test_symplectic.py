import pytest

from contactprol.linalg import Matrix, Q, Subspace, intersect, kernel, kron, span_image, tensor_subspace
from contactprol.polynomial import weighted_monomials
from contactprol.symplectic import (
    SymplecticSpace,
    build_sperp,
    jet_embed,
    lambda_perp2,
    monomial_embed,
    peel_matrix,
    sigma_map,
    sperp_bruteforce,
    sperp_dim_formula,
    sym_subspace,
)

# rows of the n = 1 table: (index triple) -> (coefficient of dx, coefficient of dy)
# with dx = 0, dy = 1 and the transverse form trivialised
TABLE = {
    (0, 0, 0): (0, 0),
    (0, 0, 1): (1, 0),
    (0, 1, 0): (-2, 0),
    (0, 1, 1): (0, -1),
    (1, 0, 0): (1, 0),
    (1, 0, 1): (0, 2),
    (1, 1, 0): (0, -1),
    (1, 1, 1): (0, 0),
}


def test_levi_form_conventions():
    for n in (1, 2, 3):
        space = SymplecticSpace(n)
        levi, inv = space.levi, space.levi_inv
        assert levi.T == levi.scale(-1)
        assert levi.rank() == 2 * n
        # L^{ab} L_{ac} = delta^b_c
        assert inv.T @ levi == Matrix.identity(2 * n)


@pytest.mark.parametrize("n, m, dim", [(1, 2, 3), (2, 3, 20), (1, 0, 1)])
def test_symmetric_subspace(n, m, dim):
    s = sym_subspace(n, m)
    assert s.dim == dim
    d = 2 * n
    for v in s.vectors:
        for key in v:
            digits = [(key // d ** (m - 1 - i)) % d for i in range(m)]
            assert all(v.get(_flat(p, d), 0) == v[key] for p in _perms(digits))


def _flat(idx, d):
    out = 0
    for a in idx:
        out = out * d + a
    return out


def _perms(digits):
    from itertools import permutations

    return set(permutations(digits))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_sperp_dimensions_closed_form(n):
    assert [build_sperp(n, ell).dim for ell in range(7)] == [sperp_dim_formula(n, ell) for ell in range(7)]


def test_sperp_small_examples():
    assert [build_sperp(1, ell).dim for ell in range(7)] == [1, 2, 4, 6, 9, 12, 16]
    assert build_sperp(2, 3).dim == 24


@pytest.mark.parametrize("n, ell", [(n, ell) for n in (1, 2) for ell in range(6)])
def test_sperp_matches_defining_relations(n, ell):
    assert build_sperp(n, ell) == sperp_bruteforce(n, ell)


@pytest.mark.parametrize("n, ell", [(2, 3), (2, 4), (2, 5), (3, 3), (3, 4), (1, 4), (1, 5), (1, 6)])
def test_sperp_recursion_identity(n, ell):
    d = 2 * n
    prev = build_sperp(n, ell - 1)
    full = Subspace.full(d)
    assert build_sperp(n, ell) == intersect(tensor_subspace(full, prev), tensor_subspace(prev, full))


@pytest.mark.parametrize("n, ell", [(n, ell) for n in (1, 2, 3) for ell in range(6) if (n, ell) != (3, 5)])
def test_symmetric_tensors_lie_in_sperp(n, ell):
    s = build_sperp(n, ell)
    assert all(v in s for v in sym_subspace(n, ell).vectors)


def test_table_reproduced_entrywise():
    sig = sigma_map()
    for (p, q, r), (cx, cy) in TABLE.items():
        col = (p * 2 + q) * 2 + r
        assert sig[0, col] == cx and sig[1, col] == cy


def test_table_kernel_is_third_symbol_space():
    ker = kernel(sigma_map())
    assert ker.dim == 8 - 2
    assert ker == build_sperp(1, 3)
    # two explicit non-symmetric elements of the kernel
    assert {1: 1, 4: -1} in ker  # dx dx dy - dy dx dx
    assert {3: 1, 6: -1} in ker  # dx dy dy - dy dy dx


@pytest.mark.parametrize("n, dim", [(1, 0), (2, 5), (3, 14)])
def test_tracefree_skew_forms(n, dim):
    assert lambda_perp2(n).dim == dim


@pytest.mark.parametrize("embed", [monomial_embed, jet_embed])
@pytest.mark.parametrize("n, k", [(n, k) for n in (1, 2) for k in range(5)])
def test_monomial_models_are_bases_of_sperp(embed, n, k):
    m = embed(n, k)
    assert m.cols == len(weighted_monomials(n, k)) == sperp_dim_formula(n, k)
    assert m.rank() == m.cols
    assert span_image(m, Subspace.full(m.cols)) == build_sperp(n, k)


def test_monomial_embed_low_degree():
    # x -> dx ; z -> the Levi form inside the degree-two space
    m1 = monomial_embed(1, 1)
    x_col = weighted_monomials(1, 1).index(next(w for w in weighted_monomials(1, 1) if w.alpha == (1,)))
    assert m1.column(x_col) == {0: 1}
    m2 = monomial_embed(1, 2)
    z_col = next(i for i, w in enumerate(weighted_monomials(1, 2)) if w.gamma == 1)
    levi = SymplecticSpace(1).levi
    assert m2.column(z_col) == {a * 2 + b: v for (a, b), v in levi.entries()}
    assert len(weighted_monomials(1, 4)) == 9


@pytest.mark.parametrize("n, k", [(1, 1), (1, 2), (1, 3), (1, 4), (2, 2), (2, 3)])
def test_peeling_reconstructs_jets(n, k):
    d = 2 * n
    assert kron(Matrix.identity(d), jet_embed(n, k - 1)) @ peel_matrix(n, k) == jet_embed(n, k)


def test_jet_of_z_records_derivative_order():
    # (X Y z)(0) = 1 and (Y X z)(0) = 0 for n = 1
    col = jet_embed(1, 2).column(next(i for i, w in enumerate(weighted_monomials(1, 2)) if w.gamma == 1))
    assert col == {1: Q(1)}
