"""Polynomials on the Heisenberg group and the invariant vector fields acting on them.

Variables are ordered x1..xn, y1..yn, z, so an exponent is a tuple of
length 2n+1.  Weighted degree counts z twice.

Generators are integers: ``i`` is X_{i+1}, ``n+i`` is Y_{i+1} and ``2n`` is Z,
with X_i = d/dx_i, Y_i = d/dy_i + x_i d/dz, Z = d/dz.  The right-invariant
fields R_{x_i} = d/dx_i + y_i d/dz and R_{y_i} = d/dy_i commute with all of
them; they drive the slot-peeling maps used by the prolongation engine.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations_with_replacement
from typing import Iterable, Iterator, Mapping

from gmpy2 import mpq

from .linalg import Q, Rational

Exponent = tuple


class Poly:
    """Sparse polynomial in x1..xn, y1..yn, z with rational coefficients."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Mapping | None = None):
        self.n = n
        clean = {}
        if terms:
            width = 2 * n + 1
            for e, c in terms.items():
                if len(e) != width:
                    raise ValueError(f"exponent {e} has wrong length for n={n}")
                c = Q(c)
                if c:
                    clean[tuple(e)] = c
        self.terms = clean

    @classmethod
    def _raw(cls, n: int, terms: dict) -> "Poly":
        p = cls.__new__(cls)
        p.n, p.terms = n, terms
        return p

    @classmethod
    def zero(cls, n: int) -> "Poly":
        return cls._raw(n, {})

    @classmethod
    def constant(cls, n: int, c) -> "Poly":
        c = Q(c)
        return cls._raw(n, {(0,) * (2 * n + 1): c} if c else {})

    @classmethod
    def monomial(cls, n: int, exps: Exponent, c=1) -> "Poly":
        return cls(n, {tuple(exps): c})

    @classmethod
    def variable(cls, n: int, name: str) -> "Poly":
        e = [0] * (2 * n + 1)
        e[variable_index(n, name)] = 1
        return cls._raw(n, {tuple(e): mpq(1)})

    # ---- arithmetic
    def _check(self, other: "Poly") -> None:
        if self.n != other.n:
            raise ValueError("polynomials over different n")

    def __add__(self, other):
        if not isinstance(other, Poly):
            other = Poly.constant(self.n, other)
        self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return Poly._raw(self.n, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw(self.n, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, Poly):
            other = Poly.constant(self.n, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Poly):
            c = Q(other)
            if not c:
                return Poly.zero(self.n)
            return Poly._raw(self.n, {e: v * c for e, v in self.terms.items()})
        self._check(other)
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = out.get(e, 0) + c1 * c2
                if v:
                    out[e] = v
                else:
                    out.pop(e, None)
        return Poly._raw(self.n, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        out = Poly.constant(self.n, 1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, Poly):
            try:
                other = Poly.constant(self.n, other)
            except (TypeError, ValueError):
                return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __hash__(self):
        return hash((self.n, frozenset(self.terms.items())))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    # ---- calculus
    def derivative(self, var: int) -> "Poly":
        out: dict = {}
        for e, c in self.terms.items():
            k = e[var]
            if k:
                f = list(e)
                f[var] = k - 1
                f = tuple(f)
                out[f] = out.get(f, 0) + c * k
        return Poly._raw(self.n, {e: c for e, c in out.items() if c})

    def times_variable(self, var: int) -> "Poly":
        out = {}
        for e, c in self.terms.items():
            f = list(e)
            f[var] += 1
            out[tuple(f)] = c
        return Poly._raw(self.n, out)

    def at_origin(self) -> Rational:
        return self.terms.get((0,) * (2 * self.n + 1), mpq(0))

    def weighted_degree(self) -> int:
        """Largest weighted degree of a term; -1 for the zero polynomial."""
        return max((weighted_degree(self.n, e) for e in self.terms), default=-1)

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def homogeneous_part(self, degree: int) -> "Poly":
        return Poly._raw(self.n, {e: c for e, c in self.terms.items() if weighted_degree(self.n, e) == degree})

    def __repr__(self) -> str:
        return f"Poly({format_poly(self)!r})"

    def __str__(self) -> str:
        return format_poly(self)


def weighted_degree(n: int, exps: Exponent) -> int:
    return sum(exps[: 2 * n]) + 2 * exps[2 * n]


# ---------------------------------------------------------------- names

def variable_names(n: int) -> list[str]:
    return [f"x{i + 1}" for i in range(n)] + [f"y{i + 1}" for i in range(n)] + ["z"]


def variable_index(n: int, name: str) -> int:
    if name == "z":
        return 2 * n
    if n == 1 and name in ("x", "y"):
        return 0 if name == "x" else 1
    m = re.fullmatch(r"([xy])([1-9][0-9]*)", name)
    if not m or int(m.group(2)) > n:
        raise ValueError(f"unknown variable {name!r} for n={n}")
    i = int(m.group(2)) - 1
    return i if m.group(1) == "x" else n + i


def generator_names(n: int) -> list[str]:
    return [f"X{i + 1}" for i in range(n)] + [f"Y{i + 1}" for i in range(n)] + ["Z"]


def generator_index(n: int, name: str) -> int:
    if name == "Z":
        return 2 * n
    if n == 1 and name in ("X", "Y"):
        return 0 if name == "X" else 1
    m = re.fullmatch(r"([XY])([1-9][0-9]*)", name)
    if not m or int(m.group(2)) > n:
        raise ValueError(f"unknown generator {name!r} for n={n}")
    i = int(m.group(2)) - 1
    return i if m.group(1) == "X" else n + i


def generator_weight(n: int, g: int) -> int:
    return 2 if g == 2 * n else 1


# ---------------------------------------------------------------- vector fields

def apply_generator(p: Poly, g: int) -> Poly:
    """Left-invariant field g applied to p."""
    n = p.n
    if g == 2 * n:
        return p.derivative(2 * n)
    if g < n:
        return p.derivative(g)
    i = g - n
    return p.derivative(g) + p.derivative(2 * n).times_variable(i)


def apply_right_generator(p: Poly, a: int) -> Poly:
    """Right-invariant field for contact direction a applied to p."""
    n = p.n
    if a < n:
        return p.derivative(a) + p.derivative(2 * n).times_variable(n + a)
    if a < 2 * n:
        return p.derivative(a)
    return p.derivative(2 * n)


def apply_word(p: Poly, word: Iterable[int]) -> Poly:
    """Apply g_1 g_2 ... g_r to p, innermost (last letter) first."""
    for g in reversed(tuple(word)):
        p = apply_generator(p, g)
        if not p.terms:
            break
    return p


# ---------------------------------------------------------------- monomials

@dataclass(frozen=True, order=True)
class WeightedMonomial:
    """x^alpha y^beta z^gamma with weighted degree |alpha|+|beta|+2 gamma."""

    alpha: tuple
    beta: tuple
    gamma: int

    @property
    def n(self) -> int:
        return len(self.alpha)

    @property
    def degree(self) -> int:
        return sum(self.alpha) + sum(self.beta) + 2 * self.gamma

    @property
    def exponents(self) -> Exponent:
        return tuple(self.alpha) + tuple(self.beta) + (self.gamma,)

    @classmethod
    def from_exponents(cls, n: int, exps: Exponent) -> "WeightedMonomial":
        return cls(tuple(exps[:n]), tuple(exps[n: 2 * n]), exps[2 * n])

    def letters(self) -> tuple[int, ...]:
        """Sorted multiset of contact-direction indices carried by x and y."""
        out = []
        for a, k in enumerate(self.alpha + self.beta):
            out.extend([a] * k)
        return tuple(out)

    def poly(self) -> Poly:
        return Poly.monomial(self.n, self.exponents)

    def __str__(self) -> str:
        return format_poly(self.poly())


@lru_cache(maxsize=None)
def weighted_monomials(n: int, k: int) -> tuple[WeightedMonomial, ...]:
    """All monomials of weighted degree exactly k, in a fixed order.

    Order: by power of z, then by the sorted letter tuple over x1..xn, y1..yn.
    """
    out = []
    d = 2 * n
    for gamma in range(k // 2 + 1):
        for letters in combinations_with_replacement(range(d), k - 2 * gamma):
            exps = [0] * (d + 1)
            for a in letters:
                exps[a] += 1
            exps[d] = gamma
            out.append(WeightedMonomial.from_exponents(n, tuple(exps)))
    return tuple(out)


@lru_cache(maxsize=None)
def monomial_positions(n: int, k: int) -> dict:
    return {m.exponents: i for i, m in enumerate(weighted_monomials(n, k))}


def monomials_up_to(n: int, degree: int) -> list[WeightedMonomial]:
    out = []
    for k in range(degree + 1):
        out.extend(weighted_monomials(n, k))
    return out


def homogeneous_coordinates(p: Poly, k: int) -> dict:
    """Coordinates of a weighted-homogeneous polynomial in the degree-k monomial basis."""
    pos = monomial_positions(p.n, k)
    out = {}
    for e, c in p.terms.items():
        if e not in pos:
            raise ValueError(f"term {e} is not of weighted degree {k}")
        out[pos[e]] = c
    return out


# ---------------------------------------------------------------- text form

def _format_coeff(c: Rational) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def format_poly(p: Poly) -> str:
    """Readable form that ``parse_poly`` reads back exactly."""
    if not p.terms:
        return "0"
    names = variable_names(p.n)

    def key(e):
        return (-weighted_degree(p.n, e), tuple(-x for x in e))

    parts = []
    for e in sorted(p.terms, key=key):
        c = p.terms[e]
        factors = []
        for name, k in zip(names, e):
            if k == 1:
                factors.append(name)
            elif k > 1:
                factors.append(f"{name}^{k}")
        mono = "*".join(factors)
        sign = "-" if c < 0 else "+"
        mag = -c if c < 0 else c
        if not mono:
            body = _format_coeff(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{_format_coeff(mag)}*{mono}"
        parts.append((sign, body))
    first_sign, first = parts[0]
    text = ("-" if first_sign == "-" else "") + first
    for sign, body in parts[1:]:
        text += f" {sign} {body}"
    return text


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z][A-Za-z0-9]*)|(.))")


def _tokenize(text: str) -> list[tuple[str, str]]:
    text = text.replace("−", "-")
    toks = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        pos = m.end()
        if m.group(1) is not None:
            toks.append(("num", m.group(1)))
        elif m.group(2) is not None:
            toks.append(("name", m.group(2)))
        elif m.group(3).strip():
            ch = m.group(3)
            if ch not in "+-*/^()":
                raise ValueError(f"unexpected character {ch!r}")
            toks.append(("op", ch))
    return toks


class _Parser:
    def __init__(self, n: int, text: str):
        self.n = n
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expect(self, value):
        kind, val = self.take()
        if val != value:
            raise ValueError(f"expected {value!r}, found {val!r}")

    def parse(self) -> Poly:
        if not self.toks:
            raise ValueError("empty polynomial")
        p = self.expr()
        if self.i != len(self.toks):
            raise ValueError(f"trailing input at token {self.peek()[1]!r}")
        return p

    def expr(self) -> Poly:
        p = self.term()
        while self.peek() in (("op", "+"), ("op", "-")):
            _, op = self.take()
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self) -> Poly:
        p = self.unary()
        while self.peek() in (("op", "*"), ("op", "/")):
            _, op = self.take()
            q = self.unary()
            if op == "*":
                p = p * q
            else:
                if not q.is_constant() or not q.terms:
                    raise ValueError("division only by a non-zero rational constant")
                p = p * (1 / q.at_origin())
        return p

    def unary(self) -> Poly:
        if self.peek() == ("op", "-"):
            self.take()
            return -self.unary()
        if self.peek() == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> Poly:
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            kind, val = self.take()
            if kind != "num":
                raise ValueError("exponent must be a non-negative integer")
            base = base ** int(val)
        return base

    def atom(self) -> Poly:
        kind, val = self.take()
        if kind == "num":
            return Poly.constant(self.n, int(val))
        if kind == "name":
            return Poly.variable(self.n, val)
        if val == "(":
            p = self.expr()
            self.expect(")")
            return p
        raise ValueError(f"unexpected token {val!r}")


def parse_poly(n: int, text) -> Poly:
    """Parse rationals, variables x1.., y1.., z with + - * / ^ and parentheses."""
    if isinstance(text, int):
        return Poly.constant(n, text)
    return _Parser(n, str(text)).parse()


def iter_terms(p: Poly) -> Iterator[tuple[Exponent, Rational]]:
    return iter(sorted(p.terms.items()))
