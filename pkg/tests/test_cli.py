"""CLI verbs: JSON contracts, exit codes, determinism."""

import json
import subprocess
import sys

import pytest

CMD = [sys.executable, "-m", "negcurve.cli"]


def run_cli(args, payload=None):
    proc = subprocess.run(CMD + args, input=payload, capture_output=True, text=True)
    return proc


def run_json(args, payload_obj=None):
    payload = None if payload_obj is None else json.dumps(payload_obj)
    proc = run_cli(args, payload)
    assert proc.returncode == 0, proc.stderr
    return json.loads(proc.stdout)


def test_basis_verb_golden():
    proc = run_cli(["basis", "--k", "1", "--j", "2", "--m", "3"])
    assert proc.returncode == 0
    assert proc.stdout == '{"dim":3,"indices":[[1,0],[1,1],[2,1]]}\n'


def test_level_flag_maps_to_modulus():
    a = run_cli(["basis", "--k", "1", "--j", "2", "--level", "2"])
    b = run_cli(["basis", "--k", "1", "--j", "2", "--m", "3"])
    assert a.stdout == b.stdout
    both = run_cli(["basis", "--k", "1", "--j", "2", "--m", "3", "--level", "2"])
    assert both.returncode == 1


def test_act_identity_echoes_class():
    identity = {
        "a": {"k": 1, "m": 3, "s": 0, "terms": [{"l": 0, "i": 0, "num": 1, "den": 1}]},
        "b": {"k": 1, "m": 3, "s": -4, "terms": []},
        "c": {"k": 1, "m": 3, "s": 4, "terms": []},
        "d": {"k": 1, "m": 3, "s": 0, "terms": [{"l": 0, "i": 0, "num": 1, "den": 1}]},
    }
    out = run_json(["act", "--k", "1", "--j", "2", "--m", "3"],
                   {"g": identity, "p": [1, 2, 5]})
    assert out == {"k": 1, "m": 3, "j": 2, "terms": [
        {"i": 1, "l": 0, "num": 1, "den": 1},
        {"i": 1, "l": 1, "num": 2, "den": 1},
        {"i": 2, "l": 1, "num": 5, "den": 1},
    ]}


def test_isom_verb_with_witness():
    out = run_json(["isom", "--k", "1", "--j", "2", "--m", "3"],
                   {"p": [1, 2, 5], "p_prime": [3, 6, 0]})
    assert out["isomorphic"] is True
    assert out["witness"] is not None
    out2 = run_json(["isom", "--k", "1", "--j", "2", "--m", "3"],
                    {"p": [0, 0, 1], "p_prime": [1, 0, 0]})
    assert out2 == {"isomorphic": False, "witness": None}


def test_shorthand_accepts_rational_strings():
    out = run_json(["isom", "--k", "1", "--j", "2", "--m", "2"],
                   {"p": [1, 2], "p_prime": ["1/2", 1]})
    assert out["isomorphic"] is True


def test_dims_verb():
    out = run_json(["dims", "--k", "1", "--j", "2", "--m", "3"],
                   {"p": [0, 0, 0], "p_prime": [0, 0, 0]})
    assert out["dim_hom"] == 30 and out["dim_ext1"] == 6


def test_bruteforce_verb():
    out = run_json(["bruteforce", "--k", "1", "--j", "2", "--m", "3"],
                   {"p": [0, 0, 0], "p_prime": [0, 0, 0]})
    assert out == {"degree": 7, "dim": 30, "stabilized": True}


def test_reduce_verb():
    y = {"k": 1, "m": 3, "terms": [
        {"l": 5, "i": 1, "num": 1, "den": 1},
        {"l": 1, "i": 1, "num": 1, "den": 1},
        {"l": -3, "i": 1, "num": 1, "den": 1},
    ]}
    out = run_json(["reduce", "--k", "1", "--j", "2", "--m", "3"], {"y": y})
    assert out["p"]["terms"] == [{"i": 1, "l": 1, "num": 1, "den": 1}]
    assert out["f_U"]["terms"] == [{"i": 1, "l": 3, "num": 1, "den": 1}]
    assert out["f_V"]["terms"] == [{"i": 1, "l": -1, "num": 1, "den": 1}]


def test_compose_and_invert_verbs():
    diag = lambda num: {
        "a": {"k": 1, "m": 3, "s": 0, "terms": [{"l": 0, "i": 0, "num": num, "den": 1}]},
        "b": {"k": 1, "m": 3, "s": -4, "terms": []},
        "c": {"k": 1, "m": 3, "s": 4, "terms": []},
        "d": {"k": 1, "m": 3, "s": 0, "terms": [{"l": 0, "i": 0, "num": 1, "den": 1}]},
    }
    out = run_json(["compose", "--k", "1", "--j", "2", "--m", "3"],
                   {"g1": diag(2), "g2": diag(3), "p": [1, 2, 5]})
    assert out["a"]["terms"] == [{"i": 0, "l": 0, "num": 6, "den": 1}]
    inv = run_json(["invert-g", "--k", "1", "--j", "2", "--m", "3"],
                   {"g": diag(2), "p": [1, 2, 5]})
    assert inv["a"]["terms"] == [{"i": 0, "l": 0, "num": 1, "den": 2}]


def test_restrict_verb():
    out = run_json(["restrict", "--k", "1", "--j", "2", "--m", "3", "--to", "2"],
                   {"p": [1, 2, 5]})
    assert out == {"k": 1, "m": 2, "j": 2, "terms": [
        {"i": 1, "l": 0, "num": 1, "den": 1},
        {"i": 1, "l": 1, "num": 2, "den": 1},
    ]}


def test_cohomology_and_cone_verbs():
    out = run_json(["cohomology", "--k", "1", "--m", "3", "--s", "-4"])
    assert out["h1_dim"] == 6 and out["h0_dim"] == 0
    cone = run_json(["cone-check", "--k", "2", "--m", "3"])
    assert cone["all_hold"] is True


def test_output_flag_writes_file(tmp_path):
    target = tmp_path / "basis.json"
    proc = run_cli(["basis", "--k", "1", "--j", "2", "--m", "3",
                    "--output", str(target)])
    assert proc.returncode == 0 and proc.stdout == ""
    assert target.read_text() == '{"dim":3,"indices":[[1,0],[1,1],[2,1]]}\n'


def test_check_axioms_verb():
    out = run_json(["check-axioms", "--k", "1", "--j", "2", "--m", "3",
                    "--samples", "15", "--seed", "3"])
    assert out["all_passed"] is True
    assert out["seed"] == 3 and out["samples"] == 15
    assert out["families"]["associativity"]["checked"] == 15


def test_exit_code_on_malformed_payload():
    proc = run_cli(["isom", "--k", "1", "--j", "2", "--m", "3"], "not json")
    assert proc.returncode == 1
    proc = run_cli(["isom", "--k", "1", "--j", "2", "--m", "3"],
                   json.dumps({"p": [1, 2, 5], "p_prime": [3, 6, 0], "junk": 1}))
    assert proc.returncode == 1
    assert "unknown fields" in proc.stderr


def test_exit_code_on_bad_flags():
    proc = run_cli(["isom", "--k", "0", "--j", "2", "--m", "3"],
                   json.dumps({"p": [], "p_prime": []}))
    assert proc.returncode == 1
    proc = run_cli(["nonsense"])
    assert proc.returncode == 1


def test_payload_params_must_match_flags():
    payload = {"p": {"k": 1, "m": 2, "j": 2, "terms": []},
               "p_prime": [0, 0, 0]}
    proc = run_cli(["isom", "--k", "1", "--j", "2", "--m", "3"], json.dumps(payload))
    assert proc.returncode == 1
    assert "disagree" in proc.stderr


def test_round_trip_of_emitted_values():
    out = run_json(["isom", "--k", "1", "--j", "2", "--m", "3"],
                   {"p": [1, 2, 5], "p_prime": [3, 6, 13]})
    witness = out["witness"]
    echo = run_json(["act", "--k", "1", "--j", "2", "--m", "3"],
                    {"g": witness, "p": [1, 2, 5]})
    assert echo["terms"] == [
        {"i": 1, "l": 0, "num": 3, "den": 1},
        {"i": 1, "l": 1, "num": 6, "den": 1},
        {"i": 2, "l": 1, "num": 13, "den": 1},
    ]


@pytest.mark.parametrize("args,payload", [
    (["basis", "--k", "2", "--j", "3", "--m", "4"], None),
    (["cohomology", "--k", "2", "--m", "4", "--s", "-6"], None),
    (["cone-check", "--k", "5", "--m", "2"], None),
    (["isom", "--k", "1", "--j", "2", "--m", "3"],
     {"p": [1, 2, 5], "p_prime": [3, 6, -7]}),
    (["dims", "--k", "1", "--j", "2", "--m", "3"],
     {"p": [1, 0, 0], "p_prime": [1, 0, 0]}),
    (["check-axioms", "--k", "2", "--j", "2", "--m", "3",
      "--samples", "10", "--seed", "11"], None),
])
def test_byte_identical_reruns(args, payload):
    text = None if payload is None else json.dumps(payload)
    first = run_cli(args, text)
    second = run_cli(args, text)
    assert first.returncode == 0
    assert first.stdout == second.stdout
    json.loads(first.stdout)
