import json
from pathlib import Path

import pytest
import yaml
from hypothesis import given
from hypothesis import strategies as st

from contactprol import catalog
from contactprol.cli import main
from contactprol.document import (
    DocumentError,
    KostantBlock,
    ProblemDocument,
    RunOptions,
    load_document,
    parse_document,
    serialize_document,
)
from contactprol.operators import enhanced_symbol
from contactprol.polynomial import format_poly, generator_names

from strategies import polynomials

PROBLEMS = Path(__file__).resolve().parent.parent / "problems"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


# ---------------------------------------------------------------- documents

@st.composite
def documents(draw):
    n = draw(st.integers(1, 2))
    re, rf = draw(st.integers(1, 2)), draw(st.integers(1, 3))
    names = generator_names(n)
    terms = []
    for _ in range(draw(st.integers(0, 3))):
        word = tuple(draw(st.lists(st.sampled_from(names[:-1]), min_size=0, max_size=2)))
        coeff = tuple(
            tuple(format_poly(draw(polynomials(n, max_degree=2, max_terms=2))) for _ in range(re)) for _ in range(rf)
        )
        terms.append((word, coeff))
    order = max((len(w) for w, _ in terms), default=0) + draw(st.integers(0, 1))
    kostant = draw(st.one_of(st.none(), st.builds(
        KostantBlock, st.one_of(st.none(), st.lists(st.integers(0, 3), min_size=n, max_size=n).map(tuple)),
        st.one_of(st.none(), st.integers(0, 3)))))
    options = RunOptions(draw(st.one_of(st.none(), st.integers(1, 9))), draw(st.one_of(st.none(), st.integers(0, 9))))
    name = draw(st.one_of(st.none(), st.text(max_size=12)))
    return ProblemDocument(n, order, re, rf, tuple(terms), kostant, options, name)


@given(documents())
def test_document_round_trip(doc):
    again = parse_document(serialize_document(doc))
    assert again == doc
    assert serialize_document(again) == serialize_document(doc)


def test_problem_files_match_catalog():
    pairs = {
        "two_unknown": catalog.two_unknown_system(),
        "three_unknown": catalog.three_unknown_system(),
        "square_derivatives": catalog.square_derivatives(),
        "x_only": catalog.x_only(),
        "dh_n2": catalog.horizontal_differential(2),
        "synthetic_n2": catalog.synthetic_n2(True),
    }
    for stem, op in pairs.items():
        doc_op = load_document(PROBLEMS / f"{stem}.yaml").operator()
        assert enhanced_symbol(doc_op) == enhanced_symbol(op), stem


@pytest.mark.parametrize(
    "text, message",
    [
        ("n: 1\n", "missing required key"),
        ("[1, 2]", "mapping"),
        ("n: 1\norder: 1\nrank_E: 1\nrank_F: 1\nterms: [{word: [Q], coeff: [[1]]}]\n", "unknown generator"),
        ("n: 1\norder: 1\nrank_E: 1\nrank_F: 1\nterms: [{word: [X], coeff: [[1, 2]]}]\n", "rank_E"),
        ("n: 1\norder: 1\nrank_E: 1\nrank_F: 1\nterms: [{word: [Z], coeff: [[1]]}]\n", "declared order"),
        ("n: 1\norder: 1\nrank_E: 1\nrank_F: 1\nterms: [{word: [X], coeff: [[0.5]]}]\n", "fractions"),
        ("n: 1\norder: 1\nrank_E: 1\nrank_F: 1\nformat_version: 7\n", "format_version"),
        ("n: 1\norder: 1\nrank_E: 1\nrank_F: 1\nterms: [{word: [X], coeff: [['x +']]}]\n", "term 0"),
        ("n: [\n", "YAML"),
    ],
)
def test_document_errors(text, message):
    with pytest.raises(DocumentError, match=message):
        parse_document(text)


# ---------------------------------------------------------------- commands

@pytest.mark.parametrize("n, ell, dim", [(1, 4, 9), (1, 0, 1), (2, 3, 24)])
def test_sperp_command(capsys, n, ell, dim):
    code, out, _ = run(capsys, "sperp", n, ell)
    report = yaml.safe_load(out)
    assert code == 0 and report["dim"] == dim == report["dim_formula"]


def test_sperp_basis_listing(capsys):
    _, out, _ = run(capsys, "sperp", 1, 2, "--basis", "--json")
    assert len(json.loads(out)["basis"]) == 4


@pytest.mark.parametrize(
    "args, weight, dim",
    [((1, 1, 1), [0, 1], 5), ((2, 2, 3, 0), [1, 3, 0], 1344), ((3, 1, 0, 0, 0), [0, 0, 0, 0], 1)],
)
def test_bound_command(capsys, args, weight, dim):
    code, out, _ = run(capsys, "bound", *args)
    report = yaml.safe_load(out)
    assert code == 0 and report["bound_weight"] == weight and report["weyl_dim"] == dim


def test_bound_command_rejects_wrong_length(capsys):
    code, _, err = run(capsys, "bound", 2, 1, 1)
    assert code == 1 and "labels" in err


@pytest.mark.parametrize("m, dims", [(1, [2, 1, 2]), (2, [3, 2, 4, 2, 3]), (0, [1, 0])])
def test_check_command(capsys, m, dims):
    code, out, _ = run(capsys, "check", 1, 1, m)
    report = yaml.safe_load(out)
    assert code == 0 and report["dims_Vj"] == dims and report["passed"]


def test_check_command_inconclusive(capsys):
    code, out, _ = run(capsys, "check", 1, 1, 2, "--lmax", 2, "--require-finite-type")
    assert code == 2 and yaml.safe_load(out)["verdict"] == "NotFiniteTypeWithinCap"


def test_prolong_two_unknown(capsys):
    code, out, _ = run(capsys, "prolong", PROBLEMS / "two_unknown.yaml")
    report = yaml.safe_load(out)
    assert code == 0
    assert report["chain"]["verdict"] == "FiniteType"
    assert report["chain"]["rank_T"] == 5 == report["oracle"]["stabilized_dim"]
    assert report["kostant"]["weyl_dim"] == 5 and report["kostant"]["graded_check"]["passed"]
    assert "timings_seconds" not in report


def test_prolong_three_unknown(capsys):
    _, out, _ = run(capsys, "prolong", PROBLEMS / "three_unknown.yaml", "--json")
    report = json.loads(out)
    assert report["chain"]["rank_T"] == 14 == report["oracle"]["stabilized_dim"]


def test_prolong_unbounded(capsys):
    code, out, _ = run(capsys, "prolong", PROBLEMS / "x_only.yaml")
    report = yaml.safe_load(out)
    assert code == 0
    assert report["chain"]["verdict"] == "NotFiniteTypeWithinCap"
    assert report["oracle"]["stabilized_dim"] is None
    assert run(capsys, "prolong", PROBLEMS / "x_only.yaml", "--require-finite-type")[0] == 2
    assert run(capsys, "--require-finite-type", "prolong", PROBLEMS / "x_only.yaml")[0] == 2


def test_prolong_builds_connection(capsys):
    _, out, _ = run(capsys, "prolong", PROBLEMS / "synthetic_n2.yaml", "--show-connection")
    report = yaml.safe_load(out)
    assert report["connection"]["total_rank"] == 3
    assert set(report["connection"]["coeff"]) == {"X1", "X2", "Y1", "Y2"}
    assert report["oracle"]["stabilized_dim"] == 2 and report["oracle"]["within_bound"]


def test_degenerate_symbol_not_fatal(capsys, tmp_path):
    doc = tmp_path / "degenerate.yaml"
    doc.write_text("n: 1\norder: 1\nrank_E: 1\nrank_F: 2\nterms: [{word: [X], coeff: [[1], [0]]}]\n")
    code, out, _ = run(capsys, "prolong", doc)
    assert code == 0 and yaml.safe_load(out)["chain"]["verdict"] == "Degenerate"


def test_symbol_command(capsys):
    _, out, _ = run(capsys, "symbol", PROBLEMS / "square_derivatives.yaml")
    report = yaml.safe_load(out)
    assert report["symbol"]["rank"] == 2 and report["symbol"]["cols"] == 4


def test_oracle_and_verify_commands(capsys):
    _, out, _ = run(capsys, "oracle", PROBLEMS / "square_derivatives.yaml", "--nmax", 6)
    assert yaml.safe_load(out)["oracle"]["stabilized_dim"] == 8
    f, g = catalog.two_unknown_solution(1, 1, 1, 1, 1)
    _, out, _ = run(capsys, "verify", PROBLEMS / "two_unknown.yaml", f, g)
    assert yaml.safe_load(out)["is_solution"] is True
    _, out, _ = run(capsys, "verify", PROBLEMS / "x_only.yaml", "x")
    assert yaml.safe_load(out)["is_solution"] is False


def test_input_errors_exit_one(capsys, tmp_path):
    assert run(capsys, "prolong", tmp_path / "missing.yaml")[0] == 1
    bad = tmp_path / "bad.yaml"
    bad.write_text("n: 1\norder: 2\nrank_E: 1\nrank_F: 1\nterms: [{word: [X, X], coeff: [[x]]}]\n")
    code, _, err = run(capsys, "prolong", bad)
    assert code == 1 and "constant coefficients" in err
    assert run(capsys, "verify", PROBLEMS / "two_unknown.yaml", "x")[0] == 1


@pytest.mark.parametrize("fmt", [[], ["--json"]])
def test_reports_are_deterministic(capsys, fmt):
    first = run(capsys, "prolong", PROBLEMS / "three_unknown.yaml", *fmt)[1]
    second = run(capsys, "prolong", PROBLEMS / "three_unknown.yaml", *fmt)[1]
    assert first == second


def test_timings_are_opt_in(capsys):
    _, out, _ = run(capsys, "prolong", PROBLEMS / "two_unknown.yaml", "--timings")
    assert set(yaml.safe_load(out)["timings_seconds"]) >= {"symbol", "chain", "oracle"}


def test_json_and_yaml_carry_the_same_fields(capsys):
    a = yaml.safe_load(run(capsys, "prolong", PROBLEMS / "square_derivatives.yaml")[1])
    b = json.loads(run(capsys, "prolong", PROBLEMS / "square_derivatives.yaml", "--json")[1])
    assert a == b
