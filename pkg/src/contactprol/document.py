"""Problem documents: YAML files describing one operator plus run options.

Example::

    format_version: 1
    n: 1
    order: 1
    rank_E: 2
    rank_F: 3
    terms:
      - word: [X]
        coeff: [[1, 0], [0, 1], [0, 0]]
      - word: [Y]
        coeff: [[0, 0], [1, 0], [0, 1]]
    kostant: {weight: [1], m: 1}
    options: {lmax: 8, nmax: 6}

Coefficients are polynomial strings (or plain numbers) in x1.., y1.., z.
They are canonicalised on load, so serialising and reloading is exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import yaml

from .operators import DarbouxOperator
from .polynomial import format_poly, generator_index, parse_poly

FORMAT_VERSION = 1


class DocumentError(ValueError):
    """Malformed or inconsistent problem document."""


@dataclass(frozen=True)
class KostantBlock:
    weight: tuple[int, ...] | None = None
    m: int | None = None


@dataclass(frozen=True)
class RunOptions:
    lmax: int | None = None
    nmax: int | None = None


@dataclass(frozen=True)
class ProblemDocument:
    n: int
    order: int
    rank_E: int
    rank_F: int
    terms: tuple[tuple[tuple[str, ...], tuple[tuple[str, ...], ...]], ...] = ()
    kostant: KostantBlock | None = None
    options: RunOptions = field(default_factory=RunOptions)
    name: str | None = None

    def operator(self) -> DarbouxOperator:
        return DarbouxOperator.from_terms(self.n, self.rank_E, self.rank_F, self.terms, self.order)


def _int(value, what: str, minimum: int = 0) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise DocumentError(f"{what} must be an integer, got {value!r}")
    if value < minimum:
        raise DocumentError(f"{what} must be at least {minimum}, got {value}")
    return value


def _coeff_text(n: int, value, where: str) -> str:
    if isinstance(value, bool) or not isinstance(value, (int, float, str)):
        raise DocumentError(f"{where}: coefficient must be a number or polynomial string, got {value!r}")
    if isinstance(value, float):
        raise DocumentError(f"{where}: write non-integer coefficients as fractions, e.g. '1/2'")
    try:
        return format_poly(parse_poly(n, str(value)))
    except ValueError as exc:
        raise DocumentError(f"{where}: {exc}") from None


def _parse_terms(raw, n: int, rank_e: int, rank_f: int):
    if raw is None:
        return ()
    if not isinstance(raw, list):
        raise DocumentError("terms must be a list")
    out = []
    for i, item in enumerate(raw):
        if not isinstance(item, dict) or set(item) - {"word", "coeff"} or "coeff" not in item:
            raise DocumentError(f"term {i}: expected keys 'word' and 'coeff'")
        word = item.get("word") or []
        if isinstance(word, str):
            word = word.split()
        if not isinstance(word, list):
            raise DocumentError(f"term {i}: word must be a list of generator names")
        names = []
        for g in word:
            try:
                generator_index(n, str(g))
            except ValueError as exc:
                raise DocumentError(f"term {i}: {exc}") from None
            names.append(str(g))
        rows = item["coeff"]
        if not isinstance(rows, list) or len(rows) != rank_f:
            raise DocumentError(f"term {i}: coeff must have rank_F = {rank_f} rows")
        coeff = []
        for r, row in enumerate(rows):
            if not isinstance(row, list) or len(row) != rank_e:
                raise DocumentError(f"term {i}, row {r}: expected rank_E = {rank_e} entries")
            coeff.append(tuple(_coeff_text(n, c, f"term {i}, entry ({r},{c_i})") for c_i, c in enumerate(row)))
        out.append((tuple(names), tuple(coeff)))
    return tuple(out)


def document_from_dict(data) -> ProblemDocument:
    if not isinstance(data, dict):
        raise DocumentError("document must be a mapping")
    allowed = {"format_version", "name", "n", "order", "rank_E", "rank_F", "terms", "kostant", "options"}
    unknown = set(data) - allowed
    if unknown:
        raise DocumentError(f"unknown keys: {sorted(unknown)}")
    version = data.get("format_version", FORMAT_VERSION)
    if version != FORMAT_VERSION:
        raise DocumentError(f"unsupported format_version {version!r}")
    for key in ("n", "order", "rank_E", "rank_F"):
        if key not in data:
            raise DocumentError(f"missing required key {key!r}")
    n = _int(data["n"], "n", 1)
    order = _int(data["order"], "order", 0)
    rank_e = _int(data["rank_E"], "rank_E", 1)
    rank_f = _int(data["rank_F"], "rank_F", 1)
    terms = _parse_terms(data.get("terms"), n, rank_e, rank_f)

    kostant = None
    if data.get("kostant") is not None:
        kb = data["kostant"]
        if not isinstance(kb, dict) or set(kb) - {"weight", "m"}:
            raise DocumentError("kostant block accepts only 'weight' and 'm'")
        weight = kb.get("weight")
        if weight is not None:
            if not isinstance(weight, list) or len(weight) != n:
                raise DocumentError(f"kostant weight must list {n} labels")
            weight = tuple(_int(w, "weight label") for w in weight)
        m = kb.get("m")
        if m is not None:
            m = _int(m, "kostant m")
        kostant = KostantBlock(weight, m)

    opts = data.get("options") or {}
    if not isinstance(opts, dict) or set(opts) - {"lmax", "nmax"}:
        raise DocumentError("options accepts only 'lmax' and 'nmax'")
    options = RunOptions(
        _int(opts["lmax"], "lmax", 1) if opts.get("lmax") is not None else None,
        _int(opts["nmax"], "nmax", 0) if opts.get("nmax") is not None else None,
    )
    name = data.get("name")
    if name is not None and not isinstance(name, str):
        raise DocumentError("name must be a string")

    doc = ProblemDocument(n, order, rank_e, rank_f, terms, kostant, options, name)
    try:
        doc.operator()
    except ValueError as exc:
        raise DocumentError(str(exc)) from None
    return doc


def parse_document(text: str) -> ProblemDocument:
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise DocumentError(f"not valid YAML: {exc}") from None
    return document_from_dict(data)


def load_document(path) -> ProblemDocument:
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_document(fh.read())
    except OSError as exc:
        raise DocumentError(f"cannot read {path}: {exc.strerror}") from None


def document_to_dict(doc: ProblemDocument) -> dict:
    out: dict = {"format_version": FORMAT_VERSION}
    if doc.name is not None:
        out["name"] = doc.name
    out.update(n=doc.n, order=doc.order, rank_E=doc.rank_E, rank_F=doc.rank_F)
    out["terms"] = [{"word": list(w), "coeff": [list(r) for r in c]} for w, c in doc.terms]
    if doc.kostant is not None:
        kb = {}
        if doc.kostant.weight is not None:
            kb["weight"] = list(doc.kostant.weight)
        if doc.kostant.m is not None:
            kb["m"] = doc.kostant.m
        out["kostant"] = kb
    opts = {k: v for k, v in (("lmax", doc.options.lmax), ("nmax", doc.options.nmax)) if v is not None}
    if opts:
        out["options"] = opts
    return out


def serialize_document(doc: ProblemDocument) -> str:
    return yaml.safe_dump(document_to_dict(doc), sort_keys=False, default_flow_style=None, allow_unicode=True)
