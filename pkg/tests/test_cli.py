import json
import subprocess
import sys

import jsonschema
import pydot
import pytest

from polymoment import permutations as perms
from polymoment.cli import main, parse_endpoint
from polymoment.errors import ParseError

T6_ARGS = ["-p", "chebyshev:6", "-a=-sqrt(3)/2", "-b", "sqrt(3)/2"]
T6_Q = ["-q=-3,4,12"]  # T2' + T3'

COMPLEX = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}
MONODROMY_SCHEMA = {
    "type": "object",
    "required": ["command", "monodromy", "infinity"],
    "properties": {
        "monodromy": {
            "type": "object",
            "required": ["base", "crit_values", "generators", "fiber"],
            "properties": {"base": COMPLEX, "crit_values": {"type": "array", "items": COMPLEX},
                           "generators": {"type": "array", "items": {"type": "string"}}},
        },
        "infinity": {"type": "string"},
    },
}
CHECK_SCHEMA = {
    "type": "object",
    "required": ["verdict", "moments", "criterion", "necessary", "condition_2", "condition_3", "classification"],
    "properties": {
        "verdict": {"enum": ["ORTHOGONAL", "NOT_ORTHOGONAL"]},
        "q_is_zero": {"type": "boolean"},
        "moments": {"type": "object", "required": ["M", "values", "verdict", "max_abs"]},
        "criterion": {"type": "object", "required": ["residuals", "verdict"],
                      "properties": {"verdict": {"enum": ["PASS", "FAIL"]}}},
        "condition_2": {"type": "object", "properties": {"kind": {"enum": ["CONDITION_2", "NONE"]}}},
        "condition_3": {"type": "object", "properties": {"kind": {"enum": ["CONDITION_3", "NONE"]}}},
        "classification": {"type": "object", "properties": {
            "verdict": {"enum": ["DEFINITE", "EXCEPTIONAL_T6", "UNKNOWN"]}}},
    },
}


def run(capsys, *args):
    code = main(list(args))
    out, err = capsys.readouterr()
    return code, out, err


def test_parse_endpoint():
    assert parse_endpoint("-sqrt(3)/2") == pytest.approx(-(3 ** 0.5) / 2)
    assert parse_endpoint("1/2+2i") == complex(0.5, 2)
    assert parse_endpoint("1.5-2i") == complex(1.5, -2)
    for bad in ("__import__('os')", "sqrt(-1)", "1/0", "x"):
        with pytest.raises(ParseError):
            parse_endpoint(bad)


def test_monodromy_t6(capsys):
    code, out, _ = run(capsys, "monodromy", "-p", "chebyshev:6")
    assert code == 0
    rep = json.loads(out)
    jsonschema.validate(rep, MONODROMY_SCHEMA)
    gens = [perms.parse_cycles(g, 6) for g in rep["monodromy"]["generators"]]
    assert len(gens) == 2 and perms.is_full_cycle(perms.product(*gens))


def test_monodromy_square(capsys):
    code, out, _ = run(capsys, "monodromy", "-p", "0,0,1")
    assert code == 0 and json.loads(out)["monodromy"]["generators"] == ["(12)"]


def test_constant_rejected(capsys):
    code, _, err = run(capsys, "monodromy", "-p", "1")
    assert code == 2 and "degree" in err


def test_cactus_t6(capsys):
    code, out, _ = run(capsys, "cactus", *T6_ARGS)
    rep = json.loads(out)
    assert code == 0 and rep["path"]["length"] == 4 and rep["path"]["weights"] == {"1": "2", "2": "2"}


def test_cactus_square_and_dot(capsys):
    code, out, _ = run(capsys, "cactus", "-p", "0,0,1", "-a", "1", "-b=-1")
    rep = json.loads(out)
    assert code == 0 and rep["cactus"]["n"] == 2 and rep["path"]["weights"]["1"] == "1"
    code, out, _ = run(capsys, "cactus", "-p", "0,0,1", "-a", "1", "-b=-1", "--format", "dot")
    (graph,) = pydot.graph_from_dot_data(out)
    assert code == 0 and len(graph.get_edges()) == 4


def test_equal_endpoints_rejected(capsys):
    code, _, _ = run(capsys, "cactus", "-p", "0,0,1", "-a", "1", "-b", "1")
    assert code == 2


def test_check_t6(capsys, tmp_path):
    out_file = tmp_path / "check.json"
    code, _, _ = run(capsys, "check", *T6_ARGS, *T6_Q, "--moments", "40", "--out", str(out_file))
    rep = json.loads(out_file.read_text())
    jsonschema.validate(rep, CHECK_SCHEMA)
    assert code == 0 and rep["verdict"] == "ORTHOGONAL"
    assert rep["condition_2"]["kind"] == "NONE" and rep["condition_3"]["kind"] == "CONDITION_3"
    assert rep["classification"]["verdict"] == "EXCEPTIONAL_T6"


def test_check_linear(capsys):
    code, out, _ = run(capsys, "moments", "-p", "0,1", "-q", "1", "-a", "0", "-b", "1")
    rep = json.loads(out)["report"]
    assert code == 0 and rep["verdict"] == "NONZERO" and rep["first_nonzero"] == 0


def test_check_zero_q(capsys):
    code, out, _ = run(capsys, "check", "-p", "0,0,0,1", "-q", "0", "-a", "0", "-b", "1")
    rep = json.loads(out)
    jsonschema.validate(rep, CHECK_SCHEMA)
    assert code == 0 and rep["verdict"] == "ORTHOGONAL" and rep["q_is_zero"]


def test_puiseux_and_decompose(capsys):
    code, out, _ = run(capsys, "puiseux", "-p", "chebyshev:6", *T6_Q, "-a=-sqrt(3)/2", "--trunc", "40")
    rep = json.loads(out)
    assert code == 0 and rep["gcd_report"]["passed"] and rep["truncation_bound"] == "1"
    code, out, _ = run(capsys, "decompose", "-p", "chebyshev:6")
    assert code == 0 and [d["degree"] for d in json.loads(out)["divisors"]] == [2, 3, 6]


def test_classify_cli(capsys):
    code, out, _ = run(capsys, "classify", *T6_ARGS)
    assert code == 0 and json.loads(out)["verdict"]["verdict"] == "EXCEPTIONAL_T6"
    code, out, _ = run(capsys, "classify", "-p", "chebyshev:9", "-a", "0.5", "-b=-0.5", "--format", "text")
    assert code == 0 and out.startswith("DEFINITE")


def test_criterion_text(capsys):
    code, out, _ = run(capsys, "criterion", *T6_ARGS, *T6_Q, "--format", "text", "--samples", "4")
    assert code == 0 and out.strip().endswith("PASS")


@pytest.mark.parametrize("argv", [
    ["monodromy", "-p", "1,,2"],
    ["moments", "-p", "0,1", "-q", "1", "-a", "0"],
    ["monodromy", "-p", "0,0,1", "--format", "dot"],
    ["monodromy", "-p", "0,0,1", "--tol", "-1"],
    ["nosuch"],
])
def test_bad_input_exit_2(capsys, argv):
    assert main(argv) == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "polymoment", "monodromy", "-p", "0,-3,0,1", "--format", "text"],
                          capture_output=True, text=True, timeout=60)
    assert proc.returncode == 0 and "product" in proc.stdout


def test_numeric_failure_exit_3(capsys, monkeypatch):
    from polymoment import continuation
    from polymoment.errors import ConvergenceError

    def broken(*args, **kwargs):
        raise ConvergenceError("tracker stalled")

    monkeypatch.setattr(continuation, "monodromy", broken)
    code, _, err = run(capsys, "monodromy", "-p", "chebyshev:4")
    assert code == 3 and "tracker stalled" in err
