"""Hypothesis strategies shared by the property suites."""

from fractions import Fraction

from hypothesis import strategies as st

from contactprol.linalg import Matrix, Subspace
from contactprol.polynomial import Poly, weighted_degree

small_rationals = st.fractions(min_value=-3, max_value=3, max_denominator=3)


@st.composite
def matrices(draw, max_rows=6, max_cols=6, density=0.5):
    rows = draw(st.integers(1, max_rows))
    cols = draw(st.integers(1, max_cols))
    entries = {}
    for i in range(rows):
        for j in range(cols):
            if draw(st.floats(0, 1)) < density:
                v = draw(small_rationals)
                if v:
                    entries[(i, j)] = v
    return Matrix(rows, cols, entries)


@st.composite
def subspaces(draw, ambient, max_vectors=None):
    count = draw(st.integers(0, max_vectors if max_vectors is not None else ambient))
    vecs = []
    for _ in range(count):
        vec = {}
        for i in range(ambient):
            if draw(st.booleans()):
                v = draw(st.integers(-2, 2))
                if v:
                    vec[i] = v
        vecs.append(vec)
    return Subspace(ambient, vecs)


@st.composite
def polynomials(draw, n, max_degree=4, max_terms=5):
    terms = {}
    for _ in range(draw(st.integers(0, max_terms))):
        exps = tuple(draw(st.integers(0, 2)) for _ in range(2 * n + 1))
        if weighted_degree(n, exps) > max_degree:
            continue
        c = draw(small_rationals)
        terms[exps] = terms.get(exps, Fraction(0)) + c
    return Poly(n, {e: c for e, c in terms.items() if c})
