"""Brute-force polynomial solution spaces on the Heisenberg group."""

from __future__ import annotations

from dataclasses import dataclass

from .linalg import Subspace, kernel_of_columns
from .operators import DarbouxOperator, PolySection, apply
from .polynomial import Poly, monomials_up_to


@dataclass(frozen=True)
class SolutionProfile:
    dims_by_degree: tuple[int, ...]
    stabilized_dim: int | None
    window: int


def _unknowns(op: DarbouxOperator, degree: int):
    monos = monomials_up_to(op.n, degree)
    return [(m, e) for m in monos for e in range(op.rank_E)]


def _image_columns(op: DarbouxOperator, unknowns) -> list[dict]:
    n = op.n
    keys: dict = {}
    cols = []
    zero = Poly.zero(n)
    for m, e in unknowns:
        comps = [zero] * op.rank_E
        comps[e] = m.poly()
        img = apply(op, PolySection(tuple(comps)))
        col = {}
        for f, p in enumerate(img.components):
            for exps, c in p.terms.items():
                key = keys.setdefault((f, exps), len(keys))
                col[key] = c
        cols.append(col)
    return cols


def solution_space(op: DarbouxOperator, degree: int) -> tuple[list, Subspace]:
    """Unknown labels and the kernel of coefficients -> coefficients of D sigma."""
    if degree < 0:
        raise ValueError("degree cap must be non-negative")
    unknowns = _unknowns(op, degree)
    rel = kernel_of_columns(_image_columns(op, unknowns), len(unknowns))
    return unknowns, Subspace(len(unknowns), rel)


def solution_dim(op: DarbouxOperator, degree: int) -> int:
    """dim of polynomial solutions of weighted degree at most ``degree``."""
    return solution_space(op, degree)[1].dim


def solution_basis(op: DarbouxOperator, degree: int) -> list[PolySection]:
    unknowns, sub = solution_space(op, degree)
    n = op.n
    out = []
    for vec in sub.vectors:
        comps = [Poly.zero(n) for _ in range(op.rank_E)]
        for idx, c in vec.items():
            m, e = unknowns[idx]
            comps[e] = comps[e] + m.poly() * c
        out.append(PolySection(tuple(comps)))
    return out


def stabilized_dim(op: DarbouxOperator, max_degree: int, window: int = 2) -> SolutionProfile:
    """Dimensions for every cap up to ``max_degree``; stabilised when the last window+1 agree.

    Agreement is a heuristic, not a proof that the space has saturated.
    """
    if max_degree < window:
        raise ValueError("max_degree must be at least the window")
    unknowns = _unknowns(op, max_degree)
    cols = _image_columns(op, unknowns)
    degs = [m.degree for m, _ in unknowns]
    dims = []
    for cap in range(max_degree + 1):
        count = sum(1 for x in degs if x <= cap)
        dims.append(len(kernel_of_columns(cols[:count], count)))
    tail = dims[-(window + 1):]
    stable = tail[0] if all(x == tail[0] for x in tail) else None
    return SolutionProfile(tuple(dims), stable, window)


def verify_solution(op: DarbouxOperator, s: PolySection) -> bool:
    return apply(op, s).is_zero()
