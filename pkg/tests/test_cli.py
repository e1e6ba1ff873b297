"""End-to-end tests of the command line driver via run(argv)."""

import json
from fractions import Fraction

import pytest

from mobiusphase.cli import RunConfig, run

XY_Q = '{"p":3,"n":4,"terms":[[1,1,0,0,1]]}'
XY_FORM = '{"p":3,"dims":[1,1],"entries":[[0,0,1]]}'


def invoke(capsys, *argv):
    code = run(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ------------------------------------------------------------ happy paths

def test_mobius_sum_monic_example(capsys):
    code, out, err = invoke(capsys, "mobius-sum", "--p", "2", "--n", "2", "--monic")
    assert (code, out, err) == (0, "0\n", "")


def test_mobius_sum_monic_degree_one(capsys):
    code, out, _ = invoke(capsys, "mobius-sum", "--p", "3", "--n", "1", "--monic")
    assert (code, out) == (0, "-3\n")


def test_correlation_artifact_fields(capsys):
    code, out, _ = invoke(capsys, "correlation", "--q", XY_Q)
    assert code == 0
    doc = json.loads(out)
    assert doc["p"] == 3 and doc["n"] == 4 and doc["k"] == 2
    assert doc["magnitude"] == pytest.approx(14 / 81, abs=1e-12)
    assert doc["value"]["re"] == pytest.approx(14 / 81, abs=1e-12)
    assert doc["permuted_delta"] < 1e-12
    # wall-clock time would break run-to-run byte identity
    assert "seconds" not in doc


def test_correlation_sampled_polynomial_is_deterministic(capsys):
    args = ("correlation", "--p", "3", "--n", "3", "--k", "2", "--seed", "11")
    code1, out1, _ = invoke(capsys, *args)
    code2, out2, _ = invoke(capsys, *args)
    assert code1 == code2 == 0
    assert out1 == out2
    assert json.loads(out1)["q"]["p"] == 3


def test_bias_exact_fraction(capsys):
    code, out, _ = invoke(capsys, "bias", "--form", XY_FORM)
    assert code == 0
    doc = json.loads(out)
    assert doc == {"p": 3, "dims": [1, 1], "bias": "1/3",
                   "bias_float": pytest.approx(1 / 3)}


def test_approx_ml_combination(capsys):
    form = '{"p":2,"dims":[1,1],"entries":[[0,0,1]]}'
    code, out, _ = invoke(capsys, "approx-ml", "--form", form,
                          "--eps", "0.5", "--seed", "1")
    assert code == 0
    doc = json.loads(out)
    assert doc["m"] == len(doc["terms"])
    assert doc["l2_error"] <= 0.5
    assert doc["l1"] == pytest.approx(float(Fraction(doc["l1_exact"])))


def test_approx_poly_deterministic(capsys):
    args = ("approx-poly", "--p", "3", "--n", "2", "--k", "2",
            "--eps", "0.5", "--seed", "2")
    code1, out1, _ = invoke(capsys, *args)
    code2, out2, _ = invoke(capsys, *args)
    assert code1 == code2 == 0
    assert out1 == out2
    doc = json.loads(out1)
    assert doc["m"] == len(doc["terms"]) and doc["l2_error"] <= 0.5


def test_gowers_inverse_witness(capsys):
    code, out, _ = invoke(capsys, "gowers-inverse", "--p", "3", "--n", "2",
                          "--k", "2", "--seed", "5", "--eps", "0.5")
    assert code == 0
    doc = json.loads(out)
    assert doc["witness_degree"] <= 1
    assert doc["magnitude"] == pytest.approx(
        (doc["correlation"]["re"] ** 2 + doc["correlation"]["im"] ** 2) ** 0.5)
    assert doc["magnitude"] > 0


def test_variety_certification(capsys):
    form = '{"p":2,"dims":[2,2],"entries":[[0,0,1],[1,1,1]]}'
    code, out, _ = invoke(capsys, "variety", "--form", form, "--k", "1",
                          "--c", "1/8", "--seed", "3", "--draws", "16")
    assert code == 0
    doc = json.loads(out)
    assert doc["status"] == "certified"
    for key in ("variety", "c_input", "c_tilde_measured", "chain_bound",
                "target_floor", "convolution", "verification"):
        assert key in doc


def test_cascade_report(capsys):
    code, out, _ = invoke(capsys, "cascade", "--q", XY_Q, "--w", "1",
                          "--d", "1", "--m", "1")
    assert code == 0
    doc = json.loads(out)
    assert doc["c"] == "1/9" and doc["identities_checked"] == 18
    assert doc["s"] == 3 and len(doc["rows"]) == 9
    assert doc["main_bias"] == "1/9" and doc["final_bias"] == "1/9"
    # regime flags are reported, not enforced: this instance is too small
    # for the d <= n/(18(k+2)) clause and must say so honestly
    flags = {check["name"]: check["holds"] for check in doc["preconditions"]}
    assert flags["m <= 17n/18"] is True
    assert flags["d <= n/(18(k+2))"] is False


def test_cascade_w_as_json(capsys):
    w_doc = '{"p":3,"coeffs":[1]}'
    code, out, _ = invoke(capsys, "cascade", "--q", XY_Q, "--w", w_doc,
                          "--d", "1", "--m", "1")
    assert code == 0
    assert json.loads(out)["w"] == {"p": 3, "coeffs": [1]}


def test_decay_runs_are_byte_identical(capsys):
    args = ("decay", "--p", "3", "--k", "2", "--n", "2..4",
            "--samples", "5", "--seed", "7")
    code1, out1, _ = invoke(capsys, *args)
    code2, out2, _ = invoke(capsys, *args)
    assert code1 == code2 == 0
    assert out1 == out2
    header = out1.splitlines()[0]
    assert header == "n,max_abs_S,mean_abs_S,slope"


def test_decay_json_format(capsys):
    code, out, _ = invoke(capsys, "decay", "--p", "3", "--k", "2", "--n", "2..3",
                          "--samples", "3", "--seed", "1", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert [row["n"] for row in doc["rows"]] == [2, 3]
    assert doc["samples"] == 3


def test_verify_single_criterion(capsys):
    code, out, _ = invoke(capsys, "verify", "--only", "1")
    assert code == 0
    assert "criterion  1" in out and "PASS" in out
    assert out.endswith("1/1 criteria passed\n")


# --------------------------------------------------------------- inputs

def test_inline_json_and_file_path_agree(tmp_path, capsys):
    path = tmp_path / "q.json"
    path.write_text(XY_Q, encoding="utf-8")
    _, inline_out, _ = invoke(capsys, "correlation", "--q", XY_Q)
    _, file_out, _ = invoke(capsys, "correlation", "--q", str(path))
    assert inline_out == file_out


def test_missing_input_file(capsys):
    code, _, err = invoke(capsys, "correlation", "--q", "no_such_file.json")
    assert code == 2
    assert "no such file" in err


def test_out_writes_identical_lf_bytes(tmp_path, capsys):
    target = tmp_path / "artifact.json"
    code, out, _ = invoke(capsys, "correlation", "--q", XY_Q,
                          "--out", str(target))
    assert code == 0
    blob = target.read_bytes()
    assert blob == out.encode("utf-8")
    assert b"\r" not in blob


# --------------------------------------------------- config and exit codes

def test_correlation_rejects_p_below_k(capsys):
    code, _, err = invoke(capsys, "correlation", "--p", "5", "--k", "7",
                          "--n", "3")
    assert code == 2
    assert "p > k" in err and "p = 5" in err and "k = 7" in err


def test_composite_modulus_rejected(capsys):
    code, _, err = invoke(capsys, "mobius-sum", "--p", "4", "--n", "2")
    assert code == 2
    assert "prime" in err


def test_nonpositive_budget_rejected(capsys):
    code, _, err = invoke(capsys, "mobius-sum", "--p", "2", "--n", "2",
                          "--budget", "0")
    assert code == 2
    assert "positive" in err


def test_budget_refusal_is_exit_3(capsys):
    code, _, err = invoke(capsys, "correlation", "--q", XY_Q, "--budget", "10")
    assert code == 3
    assert "budget" in err


def test_env_budget_refusal(monkeypatch, capsys):
    monkeypatch.setenv("HOFF_BUDGET", "10")
    code, _, _ = invoke(capsys, "correlation", "--q", XY_Q)
    assert code == 3


def test_explicit_budget_beats_env(monkeypatch, capsys):
    monkeypatch.setenv("HOFF_BUDGET", "10")
    code, out, _ = invoke(capsys, "correlation", "--q", XY_Q,
                          "--budget", "1000000")
    assert code == 0
    assert json.loads(out)["magnitude"] == pytest.approx(14 / 81, abs=1e-12)


def test_invalid_env_budget(monkeypatch, capsys):
    monkeypatch.setenv("HOFF_BUDGET", "-4")
    code, _, err = invoke(capsys, "correlation", "--q", XY_Q)
    assert code == 2
    assert "HOFF_BUDGET" in err


def test_unknown_subcommand(capsys):
    assert invoke(capsys, "frobnicate")[0] == 2


def test_unknown_flag(capsys):
    assert invoke(capsys, "mobius-sum", "--p", "2", "--n", "2", "--frob")[0] == 2


def test_missing_required_flag(capsys):
    assert invoke(capsys, "bias")[0] == 2


def test_format_not_available(capsys):
    code, _, err = invoke(capsys, "bias", "--form", XY_FORM, "--format", "csv")
    assert code == 2
    assert "--format csv" in err


def test_malformed_inline_json(capsys):
    code, _, err = invoke(capsys, "bias", "--form", "{bad json")
    assert code == 2
    assert "line 1" in err


def test_q_modulus_must_match_p_flag(capsys):
    code, _, err = invoke(capsys, "correlation", "--q", XY_Q, "--p", "2")
    assert code == 2
    assert "disagrees" in err


def test_bad_degree_range(capsys):
    code, _, err = invoke(capsys, "decay", "--p", "3", "--k", "2", "--n", "4..2",
                          "--samples", "2")
    assert code == 2
    assert "range" in err


def test_bad_fraction_threshold(capsys):
    form = '{"p":2,"dims":[2,2],"entries":[[0,0,1]]}'
    code, _, err = invoke(capsys, "variety", "--form", form, "--k", "1",
                          "--c", "0.5x")
    assert code == 2
    assert "exact fraction" in err


def test_run_config_validation():
    with pytest.raises(ValueError):
        RunConfig(command="bias", p=6)
    with pytest.raises(ValueError):
        RunConfig(command="bias", budget=-1)
    cfg = RunConfig(command="decay", n="2..4")
    assert list(cfg.n_range()) == [2, 3, 4]
    assert RunConfig(command="decay", n="3").n_range() == range(3, 4)
