"""Exact rational sparse linear algebra.

Vectors are plain dicts ``{coordinate: mpq}`` with no stored zeros.  A
``Subspace`` keeps its basis in reduced echelon form (one vector per pivot,
pivot entry 1, every other basis vector zero at that pivot, sorted by
pivot), so two subspaces are equal exactly when their stored bases are.
"""

from __future__ import annotations

import heapq
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

from gmpy2 import mpq

Rational = type(mpq())
Vector = dict

_ZERO = mpq(0)
_ONE = mpq(1)


def Q(value) -> Rational:
    """Coerce ints, strings like ``"3/2"``, Fractions and mpq to an exact rational."""
    if isinstance(value, Rational):
        return value
    if isinstance(value, Fraction):
        return mpq(value.numerator, value.denominator)
    if isinstance(value, float):
        raise TypeError("floating point values are not accepted")
    return mpq(value)


# ---------------------------------------------------------------- vectors

def vec_axpy(target: dict, scale, source: Mapping) -> None:
    """target += scale * source, in place, dropping zeros."""
    for key, val in source.items():
        new = target.get(key, _ZERO) + scale * val
        if new:
            target[key] = new
        else:
            target.pop(key, None)


def vec_scale(vec: Mapping, scale) -> dict:
    if not scale:
        return {}
    return {k: v * scale for k, v in vec.items()}


def vec_combine(pairs: Iterable[tuple]) -> dict:
    """Sum of ``coeff * vector`` over (coeff, vector) pairs."""
    out: dict = {}
    for coeff, vec in pairs:
        if coeff:
            vec_axpy(out, coeff, vec)
    return out


# ---------------------------------------------------------------- matrix

class Matrix:
    """Sparse rational matrix stored row by row."""

    __slots__ = ("rows", "cols", "_data")

    def __init__(self, rows: int, cols: int, entries: Mapping | Iterable = ()):
        self.rows = rows
        self.cols = cols
        data: list[dict] = [dict() for _ in range(rows)]
        items = entries.items() if isinstance(entries, Mapping) else entries
        for (i, j), val in items:
            if not (0 <= i < rows and 0 <= j < cols):
                raise IndexError(f"entry ({i}, {j}) outside {rows}x{cols}")
            val = Q(val)
            if val:
                data[i][j] = data[i].get(j, _ZERO) + val
                if not data[i][j]:
                    del data[i][j]
        self._data = data

    # construction helpers
    @classmethod
    def _wrap(cls, rows: int, cols: int, data: list[dict]) -> "Matrix":
        m = cls.__new__(cls)
        m.rows, m.cols, m._data = rows, cols, data
        return m

    @classmethod
    def from_rows(cls, rows: Sequence[Mapping], cols: int) -> "Matrix":
        data = [{j: Q(v) for j, v in r.items() if v} for r in rows]
        for r in data:
            for j in r:
                if not 0 <= j < cols:
                    raise IndexError(f"column {j} outside width {cols}")
        return cls._wrap(len(data), cols, data)

    @classmethod
    def from_columns(cls, columns: Sequence[Mapping], rows: int) -> "Matrix":
        data: list[dict] = [dict() for _ in range(rows)]
        for j, col in enumerate(columns):
            for i, v in col.items():
                if v:
                    data[i][j] = Q(v)
        return cls._wrap(rows, len(columns), data)

    @classmethod
    def from_dense(cls, dense: Sequence[Sequence]) -> "Matrix":
        rows = len(dense)
        cols = len(dense[0]) if rows else 0
        data = []
        for r in dense:
            if len(r) != cols:
                raise ValueError("ragged dense matrix")
            data.append({j: Q(v) for j, v in enumerate(r) if v})
        return cls._wrap(rows, cols, data)

    @classmethod
    def identity(cls, size: int) -> "Matrix":
        return cls._wrap(size, size, [{i: _ONE} for i in range(size)])

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "Matrix":
        return cls._wrap(rows, cols, [dict() for _ in range(rows)])

    # access
    def row(self, i: int) -> dict:
        return dict(self._data[i])

    def iter_rows(self) -> Iterator[dict]:
        return iter(self._data)

    def columns(self) -> list[dict]:
        cols: list[dict] = [dict() for _ in range(self.cols)]
        for i, r in enumerate(self._data):
            for j, v in r.items():
                cols[j][i] = v
        return cols

    def column(self, j: int) -> dict:
        return {i: r[j] for i, r in enumerate(self._data) if j in r}

    def __getitem__(self, ij) -> Rational:
        i, j = ij
        return self._data[i].get(j, _ZERO)

    def entries(self) -> Iterator[tuple[tuple[int, int], Rational]]:
        for i, r in enumerate(self._data):
            for j in sorted(r):
                yield (i, j), r[j]

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def nnz(self) -> int:
        return sum(len(r) for r in self._data)

    def to_dense(self) -> list[list[Rational]]:
        out = [[_ZERO] * self.cols for _ in range(self.rows)]
        for i, r in enumerate(self._data):
            for j, v in r.items():
                out[i][j] = v
        return out

    # algebra
    def transpose(self) -> "Matrix":
        return Matrix._wrap(self.cols, self.rows, self.columns())

    @property
    def T(self) -> "Matrix":
        return self.transpose()

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        rhs = other._data
        data = []
        for r in self._data:
            acc: dict = {}
            for k, v in r.items():
                if rhs[k]:
                    vec_axpy(acc, v, rhs[k])
            data.append(acc)
        return Matrix._wrap(self.rows, other.cols, data)

    def apply(self, vec: Mapping) -> dict:
        """Matrix times a sparse column vector."""
        out = {}
        for i, r in enumerate(self._data):
            s = _ZERO
            if len(r) < len(vec):
                for j, v in r.items():
                    w = vec.get(j)
                    if w is not None:
                        s += v * w
            else:
                for j, w in vec.items():
                    v = r.get(j)
                    if v is not None:
                        s += v * w
            if s:
                out[i] = s
        return out

    def __add__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch in addition")
        data = [dict(r) for r in self._data]
        for r, o in zip(data, other._data):
            vec_axpy(r, _ONE, o)
        return Matrix._wrap(self.rows, self.cols, data)

    def __neg__(self) -> "Matrix":
        return self.scale(-1)

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self + (-other)

    def scale(self, c) -> "Matrix":
        c = Q(c)
        return Matrix._wrap(self.rows, self.cols, [vec_scale(r, c) for r in self._data])

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Matrix)
            and self.shape == other.shape
            and self._data == other._data
        )

    def __hash__(self):
        return hash((self.rows, self.cols, tuple(tuple(sorted(r.items())) for r in self._data)))

    def __repr__(self) -> str:
        return f"Matrix({self.rows}x{self.cols}, nnz={self.nnz})"

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "Matrix":
        pos = {c: k for k, c in enumerate(cols)}
        data = []
        for i in rows:
            data.append({pos[j]: v for j, v in self._data[i].items() if j in pos})
        return Matrix._wrap(len(rows), len(cols), data)

    def rank(self) -> int:
        return len(_echelon(self._data, reduce=False))


def kron(a: Matrix, b: Matrix) -> Matrix:
    """Kronecker product, first factor most significant."""
    data = []
    for ra in a._data:
        for rb in b._data:
            row = {}
            for j, v in ra.items():
                base = j * b.cols
                for jj, w in rb.items():
                    row[base + jj] = v * w
            data.append(row)
    return Matrix._wrap(a.rows * b.rows, a.cols * b.cols, data)


def hstack(blocks: Sequence[Matrix]) -> Matrix:
    rows = blocks[0].rows
    data: list[dict] = [dict() for _ in range(rows)]
    offset = 0
    for blk in blocks:
        if blk.rows != rows:
            raise ValueError("row mismatch in hstack")
        for r, src in zip(data, blk._data):
            for j, v in src.items():
                r[offset + j] = v
        offset += blk.cols
    return Matrix._wrap(rows, offset, data)


def vstack(blocks: Sequence[Matrix]) -> Matrix:
    cols = blocks[0].cols
    data = []
    for blk in blocks:
        if blk.cols != cols:
            raise ValueError("column mismatch in vstack")
        data.extend(dict(r) for r in blk._data)
    return Matrix._wrap(len(data), cols, data)


# ---------------------------------------------------------------- echelon core

def _echelon(rows: Iterable[Mapping], reduce: bool = True) -> dict[int, dict]:
    """Row-reduce a stream of sparse rows.

    Returns ``{pivot: row}`` with every row normalised to 1 at its pivot,
    which is also its smallest column.  With ``reduce`` the rows are fully
    reduced (zero in every other pivot column).
    """
    piv: dict[int, dict] = {}
    for src in rows:
        if not src:
            continue
        r = dict(src)
        heap = list(r)
        heapq.heapify(heap)
        lead = None
        while heap:
            c = heapq.heappop(heap)
            v = r.get(c)
            if v is None:
                continue
            p = piv.get(c)
            if p is None:
                lead = c
                break
            for key, val in p.items():
                old = r.get(key)
                if old is None:
                    r[key] = -v * val
                    heapq.heappush(heap, key)
                else:
                    new = old - v * val
                    if new:
                        r[key] = new
                    else:
                        del r[key]
        if lead is None:
            continue
        inv = 1 / r[lead]
        if inv != 1:
            r = {k: val * inv for k, val in r.items()}
        piv[lead] = r
    if reduce:
        for p in sorted(piv, reverse=True):
            row = piv[p]
            hits = [c for c in row if c != p and c in piv]
            for c in hits:
                coef = row.get(c)
                if coef:
                    vec_axpy(row, -coef, piv[c])
    return piv


def rref(m: Matrix) -> Matrix:
    """Unique reduced row echelon form, zero rows appended at the bottom."""
    piv = _echelon(m._data, reduce=True)
    data = [piv[p] for p in sorted(piv)]
    data.extend(dict() for _ in range(m.rows - len(data)))
    return Matrix._wrap(m.rows, m.cols, data)


def rank(m: Matrix) -> int:
    return m.rank()


def _kernel_vectors(rows: Iterable[Mapping], ncols: int) -> list[dict]:
    piv = _echelon(rows, reduce=True)
    free = [c for c in range(ncols) if c not in piv]
    if not free:
        return []
    free_set = set(free)
    # column view of the pivot rows restricted to free columns
    by_free: dict[int, list] = {f: [] for f in free}
    for p, row in piv.items():
        for c, v in row.items():
            if c in free_set:
                by_free[c].append((p, v))
    out = []
    for f in free:
        vec = {f: _ONE}
        for p, v in by_free[f]:
            vec[p] = -v
        out.append(vec)
    return out


def kernel(m: Matrix) -> "Subspace":
    """Null space of ``m`` as a subspace of the domain."""
    return Subspace(m.cols, _kernel_vectors(m._data, m.cols))


def kernel_of_columns(columns: Sequence[Mapping], ncols: int | None = None) -> list[dict]:
    """Relations among sparse column vectors: all c with sum c_j col_j = 0.

    Built for tall matrices with few columns; the returned vectors are keyed
    by column position.
    """
    ncols = len(columns) if ncols is None else ncols
    rows: dict = {}
    for j, col in enumerate(columns):
        for i, v in col.items():
            if v:
                rows.setdefault(i, {})[j] = v
    return _kernel_vectors(rows.values(), ncols)


# ---------------------------------------------------------------- subspaces

class Subspace:
    """A subspace of Q^ambient_dim held in canonical reduced echelon form."""

    __slots__ = ("ambient_dim", "_vectors", "_pivots", "_lookup")

    def __init__(self, ambient_dim: int, vectors: Iterable[Mapping] = (), canonical: bool = False):
        self.ambient_dim = ambient_dim
        if canonical:
            vecs = [dict(v) for v in vectors]
            self._pivots = tuple(min(v) for v in vecs)
        else:
            vecs = []
            for v in vectors:
                clean = {k: Q(x) for k, x in v.items() if x}
                for k in clean:
                    if not 0 <= k < ambient_dim:
                        raise IndexError(f"coordinate {k} outside ambient {ambient_dim}")
                vecs.append(clean)
            piv = _echelon(vecs, reduce=True)
            self._pivots = tuple(sorted(piv))
            vecs = [piv[p] for p in self._pivots]
        self._vectors = tuple(vecs)
        self._lookup = None

    @classmethod
    def full(cls, dim: int) -> "Subspace":
        return cls(dim, ({i: _ONE} for i in range(dim)), canonical=True)

    @classmethod
    def zero(cls, dim: int) -> "Subspace":
        return cls(dim, (), canonical=True)

    @property
    def dim(self) -> int:
        return len(self._vectors)

    @property
    def vectors(self) -> tuple[dict, ...]:
        return self._vectors

    @property
    def pivots(self) -> tuple[int, ...]:
        return self._pivots

    @property
    def basis(self) -> Matrix:
        """Basis as the columns of an ambient_dim x dim matrix (reduced column echelon)."""
        return Matrix.from_columns(self._vectors, self.ambient_dim)

    def reduce(self, vec: Mapping) -> dict:
        """Remainder of ``vec`` after removing its component along the pivots."""
        r = dict(vec)
        lookup = self._lookup
        if lookup is None:
            lookup = self._lookup = dict(zip(self._pivots, self._vectors))
        hits = [c for c in r if c in lookup]
        for c in hits:
            coef = r.get(c)
            if coef:
                vec_axpy(r, -coef, lookup[c])
        return r

    def coordinates(self, vec: Mapping) -> list[Rational]:
        """Coefficients of ``vec`` in the canonical basis; raises if not contained."""
        if self.reduce(vec):
            raise ValueError("vector not in subspace")
        return [Q(vec.get(p, 0)) for p in self._pivots]

    def __contains__(self, vec: Mapping) -> bool:
        return not self.reduce(vec)

    def contains(self, other: "Subspace") -> bool:
        return all(v in self for v in other.vectors)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Subspace)
            and self.ambient_dim == other.ambient_dim
            and self._vectors == other._vectors
        )

    def __hash__(self):
        return hash((self.ambient_dim, self._pivots))

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim}, ambient={self.ambient_dim})"


def _check_ambient(a: Subspace, b: Subspace) -> None:
    if a.ambient_dim != b.ambient_dim:
        raise ValueError(f"ambient dimension mismatch: {a.ambient_dim} vs {b.ambient_dim}")


def intersect(a: Subspace, b: Subspace) -> Subspace:
    """a ∩ b: combinations of a's basis whose remainder modulo b vanishes."""
    _check_ambient(a, b)
    if a.dim > b.dim:
        a, b = b, a
    if a.dim == 0:
        return Subspace.zero(a.ambient_dim)
    residues = [b.reduce(v) for v in a.vectors]
    rel = kernel_of_columns(residues, a.dim)
    vecs = a.vectors
    return Subspace(a.ambient_dim, (vec_combine((c, vecs[i]) for i, c in r.items()) for r in rel))


def subspace_sum(a: Subspace, b: Subspace) -> Subspace:
    _check_ambient(a, b)
    return Subspace(a.ambient_dim, list(a.vectors) + list(b.vectors))


def tensor_subspace(a: Subspace, b: Subspace) -> Subspace:
    """a ⊗ b inside V ⊗ W with index (i, j) -> i * dim W + j.

    Kronecker products of two reduced echelon bases, taken in pivot order,
    are again in reduced echelon form, so no further reduction is needed.
    """
    wdim = b.ambient_dim
    vecs = []
    for va in a.vectors:
        for vb in b.vectors:
            out = {}
            for i, x in va.items():
                base = i * wdim
                for j, y in vb.items():
                    out[base + j] = x * y
            vecs.append(out)
    return Subspace(a.ambient_dim * wdim, vecs, canonical=True)


def span_image(m: Matrix, sub: Subspace) -> Subspace:
    """Image of a subspace under a linear map."""
    if m.cols != sub.ambient_dim:
        raise ValueError("shape mismatch")
    cols = m.columns()
    return Subspace(m.rows, (vec_combine((v, cols[j]) for j, v in vec.items()) for vec in sub.vectors))


# ---------------------------------------------------------------- splitting

def _dense_inverse(a: list[list[Rational]]) -> list[list[Rational]]:
    size = len(a)
    aug = [list(row) + [_ONE if i == j else _ZERO for j in range(size)] for i, row in enumerate(a)]
    for col in range(size):
        pivot = next((r for r in range(col, size) if aug[r][col]), None)
        if pivot is None:
            raise ZeroDivisionError("singular matrix")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [x * inv for x in aug[col]]
        for r in range(size):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [row[size:] for row in aug]


def splitting(m: Matrix) -> Matrix:
    """Exact Moore-Penrose pseudo-inverse.

    Uses the full-rank factorisation m = C R, where R holds the non-zero
    rows of rref(m) and C the pivot columns of m; then
    m^+ = R^T (R R^T)^{-1} (C^T C)^{-1} C^T.
    """
    piv = _echelon(m.iter_rows(), reduce=True)
    pivots = sorted(piv)
    r = len(pivots)
    if r == 0:
        return Matrix.zeros(m.cols, m.rows)
    R = Matrix.from_rows([piv[p] for p in pivots], m.cols)
    C = m.submatrix(range(m.rows), pivots)
    rrt = (R @ R.T).to_dense()
    ctc = (C.T @ C).to_dense()
    mid = Matrix.from_dense(_dense_inverse(rrt)) @ Matrix.from_dense(_dense_inverse(ctc))
    return R.T @ mid @ C.T
