"""Named operators used by the scripts and the test-suite."""

from __future__ import annotations

from .operators import DarbouxOperator, Term
from .polynomial import Poly


def _unit_rows(rank_f: int, rank_e: int, pattern: dict) -> list[list[str]]:
    rows = [["0"] * rank_e for _ in range(rank_f)]
    for (f, e), v in pattern.items():
        rows[f][e] = str(v)
    return rows


def chain_system(rank: int) -> DarbouxOperator:
    """n = 1 system X f_1 = 0, X f_{i+1} + Y f_i = 0, Y f_rank = 0.

    rank 2 and rank 3 give the two-unknown and three-unknown systems whose
    solution spaces have dimensions 5 and 14.
    """
    if rank < 1:
        raise ValueError("rank must be positive")
    x = _unit_rows(rank + 1, rank, {(i, i): 1 for i in range(rank)})
    y = _unit_rows(rank + 1, rank, {(i + 1, i): 1 for i in range(rank)})
    return DarbouxOperator.from_terms(1, rank, rank + 1, [(["X"], x), (["Y"], y)])


def two_unknown_system() -> DarbouxOperator:
    return chain_system(2)


def three_unknown_system() -> DarbouxOperator:
    return chain_system(3)


def two_unknown_solution(p, q, r, s, t) -> tuple[str, str]:
    """Five-parameter family of solutions of ``two_unknown_system`` as polynomial strings."""
    f = f"2*({p})*z + ({q})*y^2 + ({r})*y + ({s})"
    g = f"2*({q})*(z - x*y) - ({p})*x^2 - ({r})*x + ({t})"
    return f, g


def square_derivatives() -> DarbouxOperator:
    """f -> (X^2 f, Y^2 f) on n = 1."""
    return DarbouxOperator.from_terms(1, 1, 2, [(["X", "X"], [["1"], ["0"]]), (["Y", "Y"], [["0"], ["1"]])])


def rumin_operator() -> DarbouxOperator:
    """(g, h) -> (X^2 h - XY g - Z g, YX h - Y^2 g - Z h) on n = 1."""
    return DarbouxOperator.from_terms(
        1,
        2,
        2,
        [
            (["X", "X"], [["0", "1"], ["0", "0"]]),
            (["X", "Y"], [["-1", "0"], ["0", "0"]]),
            (["Z"], [["-1", "0"], ["0", "-1"]]),
            (["Y", "X"], [["0", "0"], ["0", "1"]]),
            (["Y", "Y"], [["0", "0"], ["-1", "0"]]),
        ],
    )


def horizontal_differential(n: int) -> DarbouxOperator:
    """f -> (X_1 f, ..., X_n f, Y_1 f, ..., Y_n f)."""
    d = 2 * n
    one, zero = Poly.constant(n, 1), Poly.zero(n)
    terms = [Term((a,), tuple((one if f == a else zero,) for f in range(d))) for a in range(d)]
    return DarbouxOperator(n, 1, d, tuple(terms))


def x_only() -> DarbouxOperator:
    """X f = 0 on n = 1; solutions include every function of (y, z)."""
    return DarbouxOperator.from_terms(1, 1, 1, [(["X"], [["1"]])])


def synthetic_n2(lower_order: bool = False) -> DarbouxOperator:
    """(X2 f, Y1 f, Y2 f, X1 g, Y1 g, Y2 g, X1 f - X2 g [- g]) on n = 2.

    The symbol kernel is spanned by dx1 (x) e1 + dx2 (x) e2 and the first
    prolongation vanishes, so the bound is 3.  Polynomial solutions form a
    3-dimensional space without the zeroth-order term, 2-dimensional with it.
    """
    z = ["0", "0"]
    terms = [
        (["X1"], [z, z, z, ["0", "1"], z, z, ["1", "0"]]),
        (["X2"], [["1", "0"], z, z, z, z, z, ["0", "-1"]]),
        (["Y1"], [z, ["1", "0"], z, z, ["0", "1"], z, z]),
        (["Y2"], [z, z, ["1", "0"], z, z, ["0", "1"], z]),
    ]
    if lower_order:
        terms.append(([], [z, z, z, z, z, z, ["0", "-1"]]))
    return DarbouxOperator.from_terms(2, 2, 7, terms)


def symmetric_derivative(n: int) -> DarbouxOperator:
    """sigma_b -> X_a sigma_b + X_b sigma_a for a <= b, on E = horizontal covectors."""
    d = 2 * n
    pairs = [(a, b) for a in range(d) for b in range(a, d)]
    one, zero = Poly.constant(n, 1), Poly.zero(n)
    terms = []
    for g in range(d):
        rows = []
        for a, b in pairs:
            row = [zero] * d
            if g == a:
                row[b] = row[b] + one
            if g == b:
                row[a] = row[a] + one
            rows.append(tuple(row))
        terms.append(Term((g,), tuple(rows)))
    return DarbouxOperator(n, d, len(pairs), tuple(terms))
