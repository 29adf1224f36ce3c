import json
import re
from pathlib import Path

import jsonschema
import pytest
from hypothesis import given, strategies as st

from adams_calc import k_calculus as kc
from adams_calc.cli import main as cli_main
from adams_calc.cli.config import ConfigError, default_config, load_config
from adams_calc.cli.evaluate import EvalError, render
from adams_calc.cli.parser import (
    BinOp,
    Call,
    Neg,
    Num,
    ParseError,
    Pow,
    Sym,
    parse_expr,
    to_source,
)
from adams_calc.cli.tasks import (
    REPORT_KEYS,
    Operations,
    Report,
    report_from_json,
    run_all,
    run_task,
    serialize_report,
)
from adams_calc.exact_arith import format_rational
from adams_calc.pushforward import EPSILON

SCHEMA = json.loads((Path(__file__).parents[1] / "docs" / "config-schema.json").read_text())


@pytest.fixture(scope="module")
def cfg():
    return default_config()


# -- parser -------------------------------------------------------------------

def test_parse_examples():
    assert parse_expr("psi(2, L(h)) - 1") == BinOp(
        "-", Call("psi", (Num(2), Call("L", (Sym("h"),)))), Num(1))
    assert parse_expr("rho(2, V) * td(V)") == BinOp(
        "*", Call("rho", (Num(2), Sym("V"))), Call("td", (Sym("V"),)))
    assert parse_expr("1/0") == Num(1, 0)


def test_parse_precedence_and_associativity():
    assert parse_expr("a - b - c") == BinOp("-", BinOp("-", Sym("a"), Sym("b")), Sym("c"))
    assert parse_expr("2*h^2") == BinOp("*", Num(2), Pow(Sym("h"), 2))
    assert parse_expr("-h + 1") == BinOp("+", Neg(Sym("h")), Num(1))
    assert parse_expr("psi(-1, x)").args[0] == Neg(Num(1))


@pytest.mark.parametrize("text, offset, expected", [
    ("1 + * 2", 4, {"int", "ident", "("}),
    ("(h + 1", 6, {")"}),
    ("h^x", 2, {"int"}),
    ("h h", 2, {"+", "-", "*", "^", "eof"}),
    ("", 0, {"int", "ident", "("}),
])
def test_parse_errors(text, offset, expected):
    with pytest.raises(ParseError) as info:
        parse_expr(text)
    assert info.value.offset == offset
    assert info.value.expected == frozenset(expected)


@pytest.mark.parametrize("text", ["foo(1)", "psi(h, 1)", "ch(1, 2)", "L()"])
def test_parse_call_errors(text):
    with pytest.raises(ParseError):
        parse_expr(text)


names = st.sampled_from(["h", "y", "V", "x1"])
leaves = st.one_of(
    st.builds(Num, st.integers(0, 20), st.integers(1, 6)),
    st.builds(Sym, names),
)


def _trees(children):
    return st.one_of(
        st.builds(BinOp, st.sampled_from("+-*"), children, children),
        st.builds(Pow, children, st.integers(0, 4)),
        st.builds(Neg, children),
        st.builds(lambda a: Call("ch", (a,)), children),
        st.builds(lambda k, a: Call("psi", (Num(k), a)), st.integers(1, 5), children),
        st.builds(lambda a, b: Call("push", (a, b)), children, children),
    )


@given(st.recursive(leaves, _trees, max_leaves=12))
def test_to_source_round_trip(tree):
    text = to_source(tree)
    reparsed = parse_expr(text)
    assert to_source(reparsed) == text
    # trees built by the parser are fixed points
    assert parse_expr(to_source(reparsed)) == reparsed


# -- evaluation ---------------------------------------------------------------

def test_division_by_zero_is_an_evaluation_error(cfg):
    with pytest.raises(EvalError, match="division"):
        cfg.evaluator("cp2")("1/0")


@pytest.mark.parametrize("space, expr, expected", [
    ("cp2", "ch(L(h))", "HP^0: 1 + h + 1/2*h^2"),
    ("cp2", "psi(2, L(h)) - 1", "K^0: 2*u_h + u_h^2"),
    ("cp2", "rho(2, V) * td(V)", "HP^0: 1 + 2*h + 5/3*h^2"),
    ("cp2", "psiH(2, td(V))", "HP^0: 1 + 2*h + 5/3*h^2"),
    ("cp1", "td(L(h))", "HP^0: 1 + 1/2*h"),
    ("cp1", "rho(2, L(h))", "K^0: 1 + 1/2*u_h"),
    ("cp2", "inv(1 + h)", "1 - h + h^2"),
    ("cp2", "exp(h)", "1 + h + 1/2*h^2"),
    ("cp2", "log(1 + h)", "h - 1/2*h^2"),
    ("cp1xcp1", "ch(L(a + b))", "HP^0: 1 + a + b + a*b"),
    ("P1", "push(P1, L(h))", "HP^-2: 2"),
    ("P1", "push(P1, 1)", "HP^-2: 1"),
    ("P1", "push(P1, h)", "HP^-2: 1"),
    ("cp2", "2/4 + 1", "3/2"),
])
def test_eval_examples(cfg, space, expr, expected):
    assert render(cfg.evaluator(space)(expr)) == expected


@pytest.mark.parametrize("expr", ["inv(h)", "psi(0, L(h))", "ch(h)", "V + 1", "zz", "L(1/2*h)"])
def test_eval_errors(cfg, expr):
    with pytest.raises(EvalError):
        cfg.evaluator("cp2")(expr)


# -- configuration ------------------------------------------------------------

def test_default_config_matches_schema():
    raw = json.loads(Path(kc.__file__).parent.joinpath("cli/data/default.json").read_text())
    jsonschema.validate(raw, SCHEMA)


def test_custom_space_agrees_with_builtin(cfg):
    custom, builtin = cfg.space("cp2_custom"), cfg.space("cp2")
    assert custom.ring.truncation == builtin.ring.truncation
    x = cfg.evaluator("cp2_custom")("ch(psi(3, L(h)))")
    y = cfg.evaluator("cp2")("ch(psi(3, L(h)))")
    assert str(x) == str(y)


@pytest.mark.parametrize("raw, match", [
    ({"spaces": {"a": {"model": "product", "factors": ["b"]},
                 "b": {"model": "product", "factors": ["a"]}}}, "cyclic"),
    ({"spaces": {"a": {"model": "product", "factors": ["nowhere"]}}}, "unknown space"),
    ({"fibrations": {"f": {"base": "missing", "twists": ["0"]}}}, "unknown space"),
    ({"tasks": [{"id": "t", "kind": "e-bound", "m": 1}, {"id": "t", "kind": "e-bound", "m": 2}]},
     "duplicate"),
    ({"extra": {}}, "top-level"),
    ({"spaces": {"a": {"model": "projective"}}}, "missing"),
    ({"spaces": {"a": {"generators": [["h", 3]], "truncation": 6}}}, "degree"),
])
def test_config_errors(raw, match):
    with pytest.raises(ConfigError, match=match):
        load_config(raw)


# -- tasks and reports --------------------------------------------------------

def test_adams_rr_cp1_task(cfg):
    r = run_task(cfg, {"id": "adams-rr:cp1:k2", "kind": "adams-rr", "fibration": "P1",
                       "k": 2, "x": "1"})
    assert (r.status, r.lhs, r.rhs, r.epsilon) == ("verified", "2", "2", EPSILON)


def test_adams_rr_wrong_epsilon_is_counterexample(cfg):
    r = run_task(cfg, {"kind": "adams-rr", "fibration": "P1", "k": 2, "x": "1",
                       "epsilon": -1})
    assert (r.status, r.lhs, r.rhs, r.epsilon) == ("counterexample", "2", "0", -1)


def test_e_bound_task(cfg):
    r = run_task(cfg, {"kind": "e-bound", "m": 2})
    assert (r.status, r.lhs, r.rhs) == ("verified", "24", "24")


def _corrupted_adams(k, x):
    # doubles the linear u-coefficients: wrong on every non-trivial line class
    y = kc.adams(k, x)
    bad = y.upoly.map_terms(lambda e, c: 2 * c if sum(e) == 1 else c)
    return kc.KClass(y.space, bad, y.degree)


def test_corrupted_adams_gives_counterexample(cfg):
    task = {"kind": "adams-ch", "space": "cp2", "k": [2], "x": ["L(h)"]}
    good = run_task(cfg, task)
    assert good.status == "verified"
    r = run_task(cfg, task, Operations(adams=_corrupted_adams))
    assert r.status == "counterexample"
    assert r.lhs and r.rhs and r.lhs != r.rhs
    assert r.lhs == "1 + 4*h + 3*h^2" and r.rhs == "1 + 2*h + 2*h^2"


def test_error_reports(cfg):
    r = run_task(cfg, {"kind": "adams-ch", "space": "nowhere", "k": 2})
    assert r.status == "error" and "nowhere" in r.message
    r = run_task(cfg, {"kind": "adams-ch", "space": "cp2", "k": 2, "x": "1/0"})
    assert r.status == "error" and "division" in r.message
    r = run_task(cfg, {"kind": "no-such-kind"})
    assert r.status == "error"
    data = json.loads(serialize_report(r))
    assert data["message"]


def test_serialize_report_format():
    r = Report("adams-rr:cp1:k2", "verified", "2", "2", 1, 12.5)
    data = json.loads(serialize_report(r))
    assert tuple(data)[: len(REPORT_KEYS)] == REPORT_KEYS
    assert data == {"task": "adams-rr:cp1:k2", "status": "verified", "epsilon": 1,
                    "lhs": "2", "rhs": "2", "elapsed_ms": 12.5}
    assert report_from_json(serialize_report(r)) == r
    assert format_rational(__import__("fractions").Fraction(-691, 2730)) == "-691/2730"


def test_rationals_serialize_as_strings(cfg):
    r = run_task(cfg, {"kind": "adams-ch", "space": "cp2", "k": [3], "x": ["1/3*L(h)"]})
    data = json.loads(serialize_report(r))
    assert isinstance(data["lhs"], str) and "/" in data["lhs"]


def _strip_elapsed(line):
    return re.sub(r'"elapsed_ms": [0-9.e+-]+', '"elapsed_ms": 0', line)


def test_reports_are_deterministic(cfg):
    sel = "lens-rho"
    first = [_strip_elapsed(serialize_report(r)) for r in run_all(cfg, sel)]
    second = [_strip_elapsed(serialize_report(r)) for r in run_all(default_config(), sel)]
    assert first == second
    assert [json.loads(x)["task"] for x in first] == sorted(json.loads(x)["task"] for x in first)


def test_run_all_unknown_selection(cfg):
    [r] = run_all(cfg, "nothing-like-this")
    assert r.status == "error"


# -- command line -------------------------------------------------------------

def test_cli_eval(capsys):
    assert cli_main.main(["eval", "ch(L(h))", "--space", "cp2"]) == 0
    assert capsys.readouterr().out.strip() == "HP^0: 1 + h + 1/2*h^2"
    assert cli_main.main(["eval", "psi(2, L(h))", "--space", "cp2", "--json"]) == 0
    assert json.loads(capsys.readouterr().out) == {"kind": "K", "degree": 0,
                                                     "upoly": "1 + 2*u_h + u_h^2"}
    assert cli_main.main(["eval", "1 +", "--space", "cp2"]) == 2
    assert "offset 3" in capsys.readouterr().err


def test_cli_verify_exit_codes(tmp_path, capsys):
    assert cli_main.main(["verify", "e-bound:m02"]) == 0
    line = capsys.readouterr().out.strip()
    assert json.loads(line)["lhs"] == "24"
    bad = {"fibrations": {"P1": {"base": "pt", "twists": ["0", "0"]}},
           "spaces": {"pt": {"model": "point"}},
           "tasks": [{"id": "rr", "kind": "adams-rr", "fibration": "P1", "k": 2,
                      "epsilon": -1}]}
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(bad))
    out = tmp_path / "out.jsonl"
    assert cli_main.main(["verify", "all", "--config", str(path), "--output", str(out)]) == 1
    capsys.readouterr()
    assert json.loads(out.read_text())["status"] == "counterexample"
    assert cli_main.main(["report", str(out), "--format", "text"]) == 1
    assert capsys.readouterr().out.startswith("[counterexample] rr")
    assert cli_main.main(["verify", "all", "--config", str(tmp_path / "missing.json")]) == 2


def test_cli_verify_all_alias(tmp_path, capsys):
    good = {"tasks": [{"id": "e", "kind": "e-bound", "m": 4}]}
    path = tmp_path / "good.json"
    path.write_text(json.dumps(good))
    assert cli_main.main(["verify-all", "--config", str(path), "--format", "text"]) == 0
    assert capsys.readouterr().out.startswith("[verified] e")


def test_scan_ceiling_env_reaches_reports(cfg, monkeypatch):
    monkeypatch.setenv("ADAMS_CALC_SCAN_CEILING", "60")
    r = run_task(cfg, {"kind": "e-bound", "m": 5})
    assert (r.status, r.lhs) == ("verified", "2")
