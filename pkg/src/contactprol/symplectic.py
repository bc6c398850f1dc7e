"""Contact symbol spaces inside tensor powers of the 2n-dimensional covector space.

Covector indices run over x_1..x_n (0..n-1) then y_1..y_n (n..2n-1).  A
tensor index (a_1, ..., a_l) is flattened lexicographically with a_1 most
significant, which matches the Kronecker convention of ``tensor_subspace``.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from functools import cached_property, lru_cache
from itertools import combinations, combinations_with_replacement, permutations, product
from math import comb

from gmpy2 import mpq

from .linalg import Matrix, Subspace, intersect, kernel, kernel_of_columns, vec_axpy, vec_combine
from .polynomial import (
    Poly,
    WeightedMonomial,
    apply_generator,
    apply_right_generator,
    homogeneous_coordinates,
    weighted_monomials,
)

_ONE = mpq(1)


@dataclass(frozen=True)
class SymplecticSpace:
    """Levi form on the contact distribution of the flat model.

    L_{x_i y_i} = -1 and L_{y_i x_i} = +1; the inverse L^{ab} has the same
    pattern and satisfies L^{ab} L_{ac} = delta^b_c.
    """

    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")

    @property
    def dim(self) -> int:
        return 2 * self.n

    def levi_entry(self, a: int, b: int) -> int:
        n = self.n
        if b == a + n and a < n:
            return -1
        if a == b + n and b < n:
            return 1
        return 0

    def levi_inv_entry(self, a: int, b: int) -> int:
        return self.levi_entry(a, b)

    def levi_pairs(self) -> list[tuple[int, int, int]]:
        """Non-zero entries (a, b, L_ab)."""
        n = self.n
        out = []
        for i in range(n):
            out.append((i, n + i, -1))
            out.append((n + i, i, 1))
        return out

    @cached_property
    def levi(self) -> Matrix:
        return Matrix(self.dim, self.dim, {(a, b): v for a, b, v in self.levi_pairs()})

    @cached_property
    def levi_inv(self) -> Matrix:
        return Matrix(self.dim, self.dim, {(a, b): v for a, b, v in self.levi_pairs()})

    def levi_vector(self) -> dict:
        """L_ab as a vector of the 2-fold tensor power."""
        d = self.dim
        return {a * d + b: mpq(v) for a, b, v in self.levi_pairs()}


# ---------------------------------------------------------------- index helpers

def flat_index(idx, d: int) -> int:
    k = 0
    for a in idx:
        k = k * d + a
    return k


def unflat_index(k: int, d: int, ell: int) -> tuple[int, ...]:
    out = [0] * ell
    for p in range(ell - 1, -1, -1):
        k, out[p] = divmod(k, d)
    return tuple(out)


def sperp_dim_formula(n: int, ell: int) -> int:
    """Closed form: dim of the l-th contact symbol space, sum over j of C(2n-1+l-2j, l-2j)."""
    return sum(comb(2 * n - 1 + ell - 2 * j, ell - 2 * j) for j in range(ell // 2 + 1))


def sym_dim(d: int, m: int) -> int:
    return comb(d + m - 1, m)


# ---------------------------------------------------------------- symmetric tensors

def _distinct_perms(letters) -> set:
    return set(permutations(letters))


@lru_cache(maxsize=None)
def sym_subspace(n: int, m: int) -> Subspace:
    """Totally symmetric tensors in the m-fold power, one basis vector per multiset."""
    d = 2 * n
    vecs = []
    for letters in combinations_with_replacement(range(d), m):
        vecs.append({flat_index(p, d): _ONE for p in _distinct_perms(letters)})
    # the sorted tuple is the smallest coordinate of each vector and no other
    # vector touches it, so this basis is already canonical
    return Subspace(d ** m, vecs, canonical=True)


# ---------------------------------------------------------------- contact symbol spaces

_cache_lock = threading.Lock()
_sperp_cache: dict[tuple[int, int], Subspace] = {}


def _pair_constraint_images(space: SymplecticSpace, vectors, ell: int, shared_trace: bool):
    """Images of ell-tensors under the first-pair condition.

    With ``shared_trace`` the condition is that the skew part in slots (1,2)
    equals L times the Levi trace over slots (2,3), divided by 2n; without it
    only the trace-free skew part in slots (1,2) must vanish.  Output
    coordinates are (a, b, rest) with a < b, flattened with the rest tensor.
    """
    d = space.dim
    n = space.n
    tail = d ** (ell - 2)
    tail3 = d ** (ell - 3) if ell >= 3 else 1
    pairs = space.levi_pairs()
    lower_pairs = [(a, b, v) for a, b, v in pairs if a < b]
    scale = mpq(1, n)
    images = []
    for vec in vectors:
        out: dict = {}
        for k, val in vec.items():
            head, rest = divmod(k, tail)
            a, b = divmod(head, d)
            if a < b:
                key = (a * d + b) * tail + rest
                out[key] = out.get(key, 0) + val
            elif a > b:
                key = (b * d + a) * tail + rest
                out[key] = out.get(key, 0) - val
            if shared_trace:
                # entry X_{r1 c e r'} feeds Y_{r1 r'} through L^{ce}
                r1 = a
                c = b
                e, rr = divmod(rest, tail3)
                linv = space.levi_inv_entry(c, e)
                if linv:
                    ytail = r1 * tail3 + rr
                    for p, q, lv in lower_pairs:
                        key = (p * d + q) * tail + ytail
                        out[key] = out.get(key, 0) - scale * lv * linv * val
            else:
                linv = space.levi_inv_entry(a, b)
                if linv:
                    for p, q, lv in lower_pairs:
                        key = (p * d + q) * tail + rest
                        out[key] = out.get(key, 0) - scale * lv * linv * val
        images.append({k: v for k, v in out.items() if v})
    return images


def _sperp_two(n: int) -> Subspace:
    space = SymplecticSpace(n)
    return Subspace(4 * n * n, list(sym_subspace(n, 2).vectors) + [space.levi_vector()])


def _sperp_three_low(n: int) -> Subspace:
    """n = 1 explicit form P_abc + Q_a L_bc + Q_b L_ac + Q_c L_ab."""
    space = SymplecticSpace(n)
    d = space.dim
    vecs = list(sym_subspace(n, 3).vectors)
    pairs = space.levi_pairs()
    for q in range(d):
        v: dict = {}
        for a, b, lv in pairs:
            for idx in ((q, a, b), (a, q, b), (a, b, q)):
                k = flat_index(idx, d)
                v[k] = v.get(k, 0) + lv
        vecs.append({k: x for k, x in v.items() if x})
    return Subspace(d ** 3, vecs)


def _sperp_recursive(n: int, ell: int) -> Subspace:
    """(covectors ⊗ previous) ∩ (previous ⊗ covectors), by first-pair constraints.

    A tensor already in (covectors ⊗ previous) lies in (previous ⊗ covectors)
    exactly when its first pair satisfies the condition the previous space
    imposes there; at l = 3 that is trace-free skew part zero, beyond that the
    trace must also agree with the one seen by the second pair.
    """
    space = SymplecticSpace(n)
    d = space.dim
    prev = build_sperp(n, ell - 1)
    block = d ** (ell - 1)
    cands = []
    for a in range(d):
        base = a * block
        for v in prev.vectors:
            cands.append({base + k: x for k, x in v.items()})
    images = _pair_constraint_images(space, cands, ell, shared_trace=ell >= 4)
    rel = kernel_of_columns(images, len(cands))
    return Subspace(d ** ell, (vec_combine((c, cands[i]) for i, c in r.items()) for r in rel))


def build_sperp(n: int, ell: int) -> Subspace:
    """The l-th contact symbol space as a subspace of the l-fold tensor power."""
    if n < 1 or ell < 0:
        raise ValueError("need n >= 1 and l >= 0")
    key = (n, ell)
    with _cache_lock:
        hit = _sperp_cache.get(key)
    if hit is not None:
        return hit
    d = 2 * n
    if ell <= 1:
        result = Subspace.full(d ** ell)
    elif ell == 2:
        result = _sperp_two(n)
    elif ell == 3 and n == 1:
        result = _sperp_three_low(n)
    else:
        result = _sperp_recursive(n, ell)
    with _cache_lock:
        _sperp_cache.setdefault(key, result)
    return result


def sperp_bruteforce(n: int, ell: int) -> Subspace:
    """Solve the defining relations directly.

    Unknowns are X in the l-fold power and one Y in the (l-2)-fold power;
    for every adjacent slot pair the skew part of X must equal L_ab Y with
    Y placed in the remaining slots.
    """
    space = SymplecticSpace(n)
    d = space.dim
    if ell < 2:
        return Subspace.full(d ** ell)
    nx = d ** ell
    rows = []
    for p in range(ell - 1):
        for idx in product(range(d), repeat=ell):
            a, b = idx[p], idx[p + 1]
            if a >= b:
                continue
            swapped = idx[:p] + (b, a) + idx[p + 2:]
            row = {flat_index(idx, d): _ONE, flat_index(swapped, d): -_ONE}
            lv = space.levi_entry(a, b)
            if lv:
                rest = idx[:p] + idx[p + 2:]
                row[nx + flat_index(rest, d)] = mpq(-2 * lv)
            rows.append(row)
    sol = kernel(Matrix.from_rows(rows, nx + d ** (ell - 2)))
    return Subspace(nx, ({k: v for k, v in vec.items() if k < nx} for vec in sol.vectors))


# ---------------------------------------------------------------- maps

def sigma_map() -> Matrix:
    """phi_abc -> L^{ab}(phi_abc - phi_cab) for n = 1, a 2 x 8 matrix.

    Output coordinate c stands for dx^c wedge the trivialised transverse form.
    """
    space = SymplecticSpace(1)
    entries: dict = {}
    for p, q, r in product(range(2), repeat=3):
        col = flat_index((p, q, r), 2)
        first = space.levi_inv_entry(p, q)
        if first:
            entries[(r, col)] = entries.get((r, col), 0) + first
        second = space.levi_inv_entry(q, r)
        if second:
            entries[(p, col)] = entries.get((p, col), 0) - second
    return Matrix(2, 8, entries)


def skew_subspace(n: int) -> Subspace:
    d = 2 * n
    return Subspace(d * d, ({a * d + b: _ONE, b * d + a: -_ONE} for a, b in combinations(range(d), 2)), canonical=False)


def lambda_perp2(n: int) -> Subspace:
    """Skew 2-tensors with vanishing Levi trace L^{ab} w_ab."""
    space = SymplecticSpace(n)
    d = space.dim
    trace = Matrix(1, d * d, {(0, a * d + b): v for a, b, v in space.levi_pairs()})
    return intersect(skew_subspace(n), kernel(trace))


# ---------------------------------------------------------------- monomial models

def _placements(k: int, letters: tuple, gamma: int):
    """Yield tensors (index tuple -> coefficient) for one symmetrised monomial."""
    slots = range(k)
    for lslots in combinations(slots, 2 * gamma):
        free = [s for s in slots if s not in lslots]
        for matching in _matchings(list(lslots)):
            for arrangement in _distinct_perms(letters):
                yield matching, free, arrangement


def _matchings(items: list):
    if not items:
        yield []
        return
    first = items[0]
    for j in range(1, len(items)):
        rest = items[1:j] + items[j + 1:]
        for m in _matchings(rest):
            yield [(first, items[j])] + m


@lru_cache(maxsize=None)
def monomial_embed(n: int, k: int) -> Matrix:
    """Plain symmetrisation model: z becomes a copy of L_ab.

    Column j is the sum over all placements of gamma copies of L among k
    slots, with the x, y letters arranged in the remaining slots.
    """
    space = SymplecticSpace(n)
    d = space.dim
    pairs = space.levi_pairs()
    cols = []
    for mono in weighted_monomials(n, k):
        vec: dict = {}
        for matching, free, arrangement in _placements(k, mono.letters(), mono.gamma):
            base = [0] * k
            for s, a in zip(free, arrangement):
                base[s] = a
            for choice in product(pairs, repeat=len(matching)):
                idx = list(base)
                coef = 1
                for (s, t), (a, b, lv) in zip(matching, choice):
                    idx[s], idx[t] = a, b
                    coef *= lv
                key = flat_index(idx, d)
                vec[key] = vec.get(key, 0) + coef
        cols.append({key: mpq(v) for key, v in vec.items() if v})
    return Matrix.from_columns(cols, d ** k)


@lru_cache(maxsize=None)
def _jet_tensor(n: int, exps: tuple) -> dict:
    """(w m)(0) for every word w of contact directions, as a flat tensor."""
    k = sum(exps[: 2 * n]) + 2 * exps[2 * n]
    if k == 0:
        return {0: _ONE}
    d = 2 * n
    p = Poly.monomial(n, exps)
    out: dict = {}
    # peel the innermost derivative, which is the last slot
    for a in range(d):
        q = apply_generator(p, a)
        for e, c in q.terms.items():
            sub = _jet_tensor(n, e)
            for key, v in sub.items():
                kk = key * d + a
                out[kk] = out.get(kk, 0) + c * v
    return {key: v for key, v in out.items() if v}


def jet_tensor(p: Poly, k: int) -> dict:
    """Flat tensor of all k-fold contact derivatives of p at the origin."""
    out: dict = {}
    for e, c in p.homogeneous_part(k).terms.items():
        vec_axpy(out, c, _jet_tensor(p.n, e))
    return out


@lru_cache(maxsize=None)
def jet_embed(n: int, k: int) -> Matrix:
    """Columns (X_{a_1} ... X_{a_k} m)(0) for each weighted monomial m of degree k.

    These are the tensors paired with the symbol by evaluation at the
    origin, so they are the embedding used by the prolongation engine.
    """
    d = 2 * n
    return Matrix.from_columns([_jet_tensor(n, m.exponents) for m in weighted_monomials(n, k)], d ** k)


@lru_cache(maxsize=None)
def peel_matrix(n: int, k: int) -> Matrix:
    """Split off the first slot of the degree-k jet model.

    Column m holds sum_a e_a ⊗ coords(R_a m), where R_a are the
    right-invariant fields; rows index (a, monomial of degree k-1).
    """
    d = 2 * n
    lower = len(weighted_monomials(n, k - 1))
    cols = []
    for m in weighted_monomials(n, k):
        p = m.poly()
        col = {}
        for a in range(d):
            for j, c in homogeneous_coordinates(apply_right_generator(p, a), k - 1).items():
                col[a * lower + j] = c
        cols.append(col)
    return Matrix.from_columns(cols, d * lower)


def monomial_index(n: int, k: int, mono: WeightedMonomial) -> int:
    return weighted_monomials(n, k).index(mono)
