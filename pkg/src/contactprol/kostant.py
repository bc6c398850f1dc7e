"""Type C representation dimensions and the graded cross-check against contact chains."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement

from .linalg import Matrix, Subspace, kernel_of_columns, vec_combine
from .prolongation import NotFiniteTypeWithinCap, Verdict, contact_chain
from .symplectic import build_sperp, jet_embed, sperp_dim_formula, sym_dim, sym_subspace


@dataclass(frozen=True)
class HighestWeight:
    """Coefficients over the fundamental weights of C_r, Bourbaki numbering.

    The last node is the long simple root 2e_r.
    """

    labels: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(int(x) for x in self.labels))
        if not self.labels:
            raise ValueError("a highest weight needs at least one label")
        if any(x < 0 for x in self.labels):
            raise ValueError("highest weight labels must be non-negative")

    @property
    def rank(self) -> int:
        return len(self.labels)

    def __str__(self) -> str:
        return "(" + ",".join(str(x) for x in self.labels) + ")"


def _as_weight(w) -> HighestWeight:
    return w if isinstance(w, HighestWeight) else HighestWeight(tuple(w))


def weyl_dim(rank_r: int, w) -> int:
    """Weyl dimension formula for C_r.

    In the orthonormal basis the weight is lambda_j = sum_{i >= j} a_i,
    rho = (r, r-1, ..., 1) and the positive roots are e_i - e_j, e_i + e_j
    (i < j) and 2 e_i.
    """
    w = _as_weight(w)
    if w.rank != rank_r:
        raise ValueError(f"weight has {w.rank} labels, rank is {rank_r}")
    lam = [sum(w.labels[j:]) for j in range(rank_r)]
    rho = [rank_r - j for j in range(rank_r)]
    shifted = [a + b for a, b in zip(lam, rho)]
    num = Fraction(1)
    for i in range(rank_r):
        num *= Fraction(shifted[i], rho[i])
        for j in range(i + 1, rank_r):
            num *= Fraction(shifted[i] - shifted[j], rho[i] - rho[j])
            num *= Fraction(shifted[i] + shifted[j], rho[i] + rho[j])
    if num.denominator != 1:
        raise ArithmeticError("Weyl formula produced a non-integer")
    return int(num)


def bound_weight(e, k: int) -> HighestWeight:
    """Weight of C_{n+1} bounding solutions of an order-k operator on the bundle with weight e."""
    if k < 1:
        raise ValueError("order must be at least 1")
    return HighestWeight((k - 1,) + _as_weight(e).labels)


def cartan_product(w1, w2) -> HighestWeight:
    w1, w2 = _as_weight(w1), _as_weight(w2)
    if w1.rank != w2.rank:
        raise ValueError("Cartan product of weights of different rank")
    return HighestWeight(tuple(a + b for a, b in zip(w1.labels, w2.labels)))


def symmetric_weight(n: int, m: int) -> HighestWeight:
    """Weight of the m-th symmetric power of the defining representation of C_n."""
    return HighestWeight((m,) + (0,) * (n - 1))


# ---------------------------------------------------------------- symmetric coefficient bundles

def _multiset_rows(d: int, degree: int) -> dict:
    return {m: i for i, m in enumerate(combinations_with_replacement(range(d), degree))}


def _symmetrizer_image(vec: dict, d: int, total: int, rows: dict) -> dict:
    """Sum the entries of a flat tensor over each index multiset."""
    out: dict = {}
    for key, v in vec.items():
        idx = []
        k = key
        for _ in range(total):
            k, a = divmod(k, d)
            idx.append(a)
        r = rows[tuple(sorted(idx))]
        out[r] = out.get(r, 0) + v
    return {r: v for r, v in out.items() if v}


def cartan_symbol_kernel(n: int, k: int, m: int) -> Subspace:
    """Kernel of full symmetrisation on S⊥^k ⊗ ⊙^m, inside the (k+m)-fold tensor power.

    Symmetrisation already kills every Levi-trace term, so it is the
    projection onto the Cartan component ⊙^{k+m}.
    """
    if n < 1 or k < 1 or m < 0:
        raise ValueError("need n >= 1, k >= 1, m >= 0")
    d = 2 * n
    sperp = build_sperp(n, k)
    sym = sym_subspace(n, m)
    rows = _multiset_rows(d, k + m)
    width = d ** m
    cands = []
    for a in sperp.vectors:
        for b in sym.vectors:
            cands.append({i * width + j: x * y for i, x in a.items() for j, y in b.items()})
    images = [_symmetrizer_image(c, d, k + m, rows) for c in cands]
    rel = kernel_of_columns(images, len(cands))
    return Subspace(d ** (k + m), (vec_combine((c, cands[i]) for i, c in r.items()) for r in rel))


def cartan_symbol(n: int, k: int, m: int) -> Matrix:
    """The same projection written on (degree-k monomials) x (basis of ⊙^m).

    Columns follow the convention of ``contact_chain``: monomial m paired with
    its contact-derivative tensor, tensored with a symmetric basis vector.
    """
    d = 2 * n
    jets = jet_embed(n, k).columns()
    sym = sym_subspace(n, m).vectors
    rows = _multiset_rows(d, k + m)
    width = d ** m
    cols = []
    for jet in jets:
        for b in sym:
            t = {i * width + j: x * y for i, x in jet.items() for j, y in b.items()}
            cols.append(_symmetrizer_image(t, d, k + m, rows))
    return Matrix.from_columns(cols, len(rows))


@dataclass(frozen=True)
class GradedReport:
    n: int
    k: int
    m: int
    dims_Vj: tuple[int, ...]
    total: int
    weyl_total: int
    weight: HighestWeight

    @property
    def passed(self) -> bool:
        return self.total == self.weyl_total


def default_lmax(n: int, k: int, weight) -> int:
    return 2 * (k + max(_as_weight(weight).labels, default=0) + 2 * n)


def graded_check(n: int, k: int, m: int, lmax: int | None = None) -> GradedReport:
    """Sum of graded pieces for E = ⊙^m against the Weyl dimension of the bound weight."""
    e_weight = symmetric_weight(n, m)
    lmax = default_lmax(n, k, e_weight) if lmax is None else lmax
    chain = contact_chain(cartan_symbol(n, k, m), n, k, lmax)
    if chain.verdict is not Verdict.FINITE_TYPE:
        raise NotFiniteTypeWithinCap(f"chain for (n={n}, k={k}, m={m}) did not vanish within {lmax} levels")
    e_dim = sym_dim(2 * n, m)
    dims = [sperp_dim_formula(n, j) * e_dim for j in range(k)] + [chain.dim_KH] + list(chain.levels)
    while len(dims) > k + 1 and dims[-1] == 0:
        dims.pop()
    bw = bound_weight(e_weight, k)
    return GradedReport(n, k, m, tuple(dims), sum(dims), weyl_dim(n + 1, bw), bw)
