"""Command-line front end: ``contactprol <subcommand> ...``.

Reports go to stdout as YAML (or JSON with ``--json``).  Exit status is 0 on
success, 1 for unreadable or invalid input, 2 when ``--require-finite-type``
is set and a chain did not vanish within its cap.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from contextlib import contextmanager

import yaml

from . import kostant
from .document import FORMAT_VERSION, DocumentError, ProblemDocument, document_to_dict, load_document
from .linalg import Matrix
from .operators import PolySection, enhanced_symbol
from .oracle import stabilized_dim, verify_solution
from .polynomial import format_poly, parse_poly, weighted_monomials
from .prolongation import (
    DEFAULT_LMAX,
    NotFiniteTypeWithinCap,
    ProlongationChain,
    Verdict,
    build_flat_connection,
    contact_chain,
    parallel_operator,
)
from .symplectic import build_sperp, sperp_dim_formula

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NOT_FINITE = 2
DEFAULT_NMAX = 6
ORACLE_WINDOW = 2


class _Timer:
    def __init__(self, enabled: bool):
        self.enabled = enabled
        self.seconds: dict[str, float] = {}

    @contextmanager
    def __call__(self, label: str):
        start = time.perf_counter()
        try:
            yield
        finally:
            self.seconds[label] = round(time.perf_counter() - start, 4)

    def attach(self, report: dict) -> dict:
        if self.enabled:
            report["timings_seconds"] = dict(self.seconds)
        return report


def _matrix_rows(m: Matrix) -> list[list[str]]:
    return [[str(x) for x in row] for row in m.to_dense()]


def _header(command: str) -> dict:
    return {"format_version": FORMAT_VERSION, "command": command}


def _chain_report(chain: ProlongationChain) -> dict:
    return {
        "kind": chain.kind,
        "order_k": chain.order_k,
        "dim_E": chain.dim_E,
        "dim_F": chain.dim_F,
        "symbol_rank": chain.symbol_rank,
        "dim_KH": chain.dim_KH,
        "levels": list(chain.levels),
        "verdict": chain.verdict.value,
        "rank_T": chain.rank_T,
        "lmax": chain.lmax,
    }


def _profile_report(profile, rank_t) -> dict:
    out = {
        "nmax": len(profile.dims_by_degree) - 1,
        "window": profile.window,
        "dims_by_degree": list(profile.dims_by_degree),
        "stabilized_dim": profile.stabilized_dim,
    }
    if rank_t is not None and profile.stabilized_dim is not None:
        out["within_bound"] = profile.stabilized_dim <= rank_t
        out["bound_attained"] = profile.stabilized_dim == rank_t
    return out


def _require_constant_symbol(doc: ProblemDocument):
    op = doc.operator()
    if not op.has_constant_top_coefficients():
        raise DocumentError("symbol analysis needs constant coefficients on the top-weight terms")
    return op


def _resolve_lmax(args, doc: ProblemDocument | None = None, n=None, k=None, weight=None) -> int:
    if args.lmax is not None:
        return args.lmax
    if doc is not None and doc.options.lmax is not None:
        return doc.options.lmax
    if weight is not None:
        return kostant.default_lmax(n, k, weight)
    return DEFAULT_LMAX


def _resolve_nmax(args, doc: ProblemDocument, chain: ProlongationChain | None) -> int:
    if args.nmax is not None:
        return args.nmax
    if doc.options.nmax is not None:
        return doc.options.nmax
    if chain is not None and chain.finite_type:
        # top graded piece sits in weighted degree k + (#nonzero levels); add the window
        return max(chain.order_k + len(chain.levels) - 1 + ORACLE_WINDOW, ORACLE_WINDOW)
    return DEFAULT_NMAX


# ---------------------------------------------------------------- subcommands

def cmd_sperp(args, timer) -> tuple[dict, int]:
    if args.n < 1 or args.ell < 0:
        raise DocumentError("need n >= 1 and ell >= 0")
    with timer("build"):
        sub = build_sperp(args.n, args.ell)
    report = _header("sperp")
    report.update(
        n=args.n,
        ell=args.ell,
        ambient_dim=sub.ambient_dim,
        dim=sub.dim,
        dim_formula=sperp_dim_formula(args.n, args.ell),
        pivots=list(sub.pivots),
    )
    if args.basis:
        report["basis"] = [{str(i): str(v) for i, v in sorted(vec.items())} for vec in sub.vectors]
    return report, EXIT_OK


def cmd_symbol(args, timer) -> tuple[dict, int]:
    doc = load_document(args.document)
    op = _require_constant_symbol(doc)
    with timer("symbol"):
        sym = enhanced_symbol(op)
    report = _header("symbol")
    report["input"] = document_to_dict(doc)
    report["symbol"] = {
        "rows": sym.rows,
        "cols": sym.cols,
        "column_labels": [
            f"{m}*e{e + 1}" for m in weighted_monomials(op.n, op.order) for e in range(op.rank_E)
        ],
        "matrix": _matrix_rows(sym),
        "rank": sym.rank(),
        "surjective": sym.rank() == sym.rows,
    }
    return timer.attach(report), EXIT_OK


def _kostant_section(doc: ProblemDocument, chain: ProlongationChain, lmax: int) -> dict:
    out: dict = {}
    kb = doc.kostant
    if kb.weight is not None and doc.order >= 1:
        bw = kostant.bound_weight(kb.weight, doc.order)
        wd = kostant.weyl_dim(doc.n + 1, bw)
        out["bound_weight"] = list(bw.labels)
        out["weyl_dim"] = wd
        if chain.rank_T is not None:
            out["rank_T_equals_weyl_dim"] = chain.rank_T == wd
    if kb.m is not None and doc.order >= 1:
        try:
            rep = kostant.graded_check(doc.n, doc.order, kb.m, lmax)
            out["graded_check"] = _graded_report(rep)
        except NotFiniteTypeWithinCap:
            out["graded_check"] = {"verdict": Verdict.NOT_FINITE_WITHIN_CAP.value}
    return out


def cmd_prolong(args, timer) -> tuple[dict, int]:
    doc = load_document(args.document)
    op = _require_constant_symbol(doc)
    if op.order < 1:
        raise DocumentError("prolongation needs an operator of order at least 1")
    weight = doc.kostant.weight if doc.kostant else None
    lmax = _resolve_lmax(args, doc, doc.n, doc.order, weight)
    report = _header("prolong")
    report["input"] = document_to_dict(doc)
    with timer("symbol"):
        sym = enhanced_symbol(op)
    with timer("chain"):
        chain = contact_chain(sym, op.n, op.order, lmax)
    report["chain"] = _chain_report(chain)

    if chain.finite_type and op.order == 1 and op.n >= 2 and all(
        p.is_constant() for t in op.terms for r in t.coeff for p in r
    ):
        with timer("connection"):
            conn = build_flat_connection(op, chain)
        section = {"total_rank": conn.total_rank, "block_dims": list(conn.block_dims)}
        if args.show_connection:
            section["coeff"] = {
                name: _matrix_rows(a) for name, a in zip(op.word_names(range(2 * op.n)), conn.coeff)
            }
        report["connection"] = section

    nmax = _resolve_nmax(args, doc, chain)
    with timer("oracle"):
        profile = stabilized_dim(op, nmax, ORACLE_WINDOW)
    report["oracle"] = _profile_report(profile, chain.rank_T)

    if doc.kostant is not None:
        with timer("kostant"):
            report["kostant"] = _kostant_section(doc, chain, lmax)

    code = EXIT_OK
    if args.require_finite_type and chain.verdict is Verdict.NOT_FINITE_WITHIN_CAP:
        code = EXIT_NOT_FINITE
    return timer.attach(report), code


def cmd_bound(args, timer) -> tuple[dict, int]:
    if len(args.weight) != args.n:
        raise DocumentError(f"weight must have {args.n} labels")
    try:
        bw = kostant.bound_weight(args.weight, args.k)
    except ValueError as exc:
        raise DocumentError(str(exc)) from None
    report = _header("bound")
    report.update(
        n=args.n,
        k=args.k,
        weight=list(args.weight),
        bound_weight=list(bw.labels),
        weyl_dim=kostant.weyl_dim(args.n + 1, bw),
    )
    return report, EXIT_OK


def _graded_report(rep: kostant.GradedReport) -> dict:
    return {
        "n": rep.n,
        "k": rep.k,
        "m": rep.m,
        "dims_Vj": list(rep.dims_Vj),
        "total": rep.total,
        "bound_weight": list(rep.weight.labels),
        "weyl_total": rep.weyl_total,
        "passed": rep.passed,
    }


def cmd_check(args, timer) -> tuple[dict, int]:
    if args.n < 1 or args.k < 1 or args.m < 0:
        raise DocumentError("need n >= 1, k >= 1, m >= 0")
    lmax = _resolve_lmax(args, None, args.n, args.k, kostant.symmetric_weight(args.n, args.m))
    report = _header("check")
    code = EXIT_OK
    try:
        with timer("graded_check"):
            rep = kostant.graded_check(args.n, args.k, args.m, lmax)
        report.update(_graded_report(rep))
    except NotFiniteTypeWithinCap:
        report.update(n=args.n, k=args.k, m=args.m, lmax=lmax, verdict=Verdict.NOT_FINITE_WITHIN_CAP.value)
        if args.require_finite_type:
            code = EXIT_NOT_FINITE
    return timer.attach(report), code


def cmd_oracle(args, timer) -> tuple[dict, int]:
    doc = load_document(args.document)
    op = doc.operator()
    nmax = _resolve_nmax(args, doc, None)
    if nmax < ORACLE_WINDOW:
        raise DocumentError(f"nmax must be at least {ORACLE_WINDOW}")
    with timer("oracle"):
        profile = stabilized_dim(op, nmax, ORACLE_WINDOW)
    report = _header("oracle")
    report["input"] = document_to_dict(doc)
    report["oracle"] = _profile_report(profile, None)
    return timer.attach(report), EXIT_OK


def cmd_verify(args, timer) -> tuple[dict, int]:
    doc = load_document(args.document)
    op = doc.operator()
    if len(args.components) != op.rank_E:
        raise DocumentError(f"expected {op.rank_E} section components, got {len(args.components)}")
    try:
        comps = tuple(parse_poly(op.n, c) for c in args.components)
    except ValueError as exc:
        raise DocumentError(str(exc)) from None
    section = PolySection(comps)
    report = _header("verify")
    report["input"] = document_to_dict(doc)
    report["section"] = [format_poly(c) for c in comps]
    report["is_solution"] = verify_solution(op, section)
    return report, EXIT_OK


# ---------------------------------------------------------------- parser

def _common_flags(suppress: bool) -> argparse.ArgumentParser:
    default = argparse.SUPPRESS if suppress else None
    flag_default = argparse.SUPPRESS if suppress else False
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--lmax", type=int, default=default, help="cap on prolongation levels")
    p.add_argument("--nmax", type=int, default=default, help="weighted degree cap for the polynomial oracle")
    p.add_argument("--json", action="store_true", default=flag_default, help="emit JSON instead of YAML")
    p.add_argument(
        "--require-finite-type",
        action="store_true",
        default=flag_default,
        help="exit with status 2 if a chain does not vanish within the cap",
    )
    p.add_argument("--timings", action="store_true", default=flag_default, help="include wall-clock timings")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="contactprol",
        description="Finite-type analysis of linear operators on the Heisenberg group.",
        parents=[_common_flags(False)],
    )
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common_flags(True)

    p = sub.add_parser("sperp", parents=[common], help="dimension and basis of a contact symbol space")
    p.add_argument("n", type=int)
    p.add_argument("ell", type=int)
    p.add_argument("--basis", action="store_true", help="list basis vectors as sparse index maps")
    p.set_defaults(func=cmd_sperp)

    p = sub.add_parser("symbol", parents=[common], help="enhanced symbol of an operator")
    p.add_argument("document")
    p.set_defaults(func=cmd_symbol)

    p = sub.add_parser("prolong", parents=[common], help="chain, verdict, connection and oracle")
    p.add_argument("document")
    p.add_argument("--show-connection", action="store_true", help="include connection coefficient matrices")
    p.set_defaults(func=cmd_prolong)

    p = sub.add_parser("bound", parents=[common], help="bound weight and its Weyl dimension")
    p.add_argument("n", type=int)
    p.add_argument("k", type=int)
    p.add_argument("weight", type=int, nargs="+")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("check", parents=[common], help="graded dimension check for E = Sym^m")
    p.add_argument("n", type=int)
    p.add_argument("k", type=int)
    p.add_argument("m", type=int)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("oracle", parents=[common], help="polynomial solution dimensions")
    p.add_argument("document")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("verify", parents=[common], help="check that a polynomial section solves the operator")
    p.add_argument("document")
    p.add_argument("components", nargs="+", help="one polynomial per component of E")
    p.set_defaults(func=cmd_verify)
    return parser


def render(report: dict, as_json: bool) -> str:
    if as_json:
        return json.dumps(report, indent=2, ensure_ascii=False) + "\n"
    return yaml.safe_dump(report, sort_keys=False, allow_unicode=True, default_flow_style=None)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not hasattr(args, "show_connection"):
        args.show_connection = False
    if not hasattr(args, "basis"):
        args.basis = False
    timer = _Timer(args.timings)
    try:
        report, code = args.func(args, timer)
    except DocumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    sys.stdout.write(render(report, args.json))
    return code


if __name__ == "__main__":
    sys.exit(main())
