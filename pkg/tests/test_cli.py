"""The command line surface, driven through main() with real files."""

import json
import sys
from fractions import Fraction

import pytest

from fmdp.cli import main
from fmdp.errors import LpInternalError
from fmdp.factored import PartialState
from fmdp.model import load_mdp, make_ring, save_mdp
from fmdp.policy import decision_list_from_text, select_action


def _ring_file(tmp_path, n=2):
    path = tmp_path / f"ring{n}.json"
    save_mdp(make_ring(n), str(path))
    return str(path)


def test_solve_reports_convergence(tmp_path, capsys):
    model = _ring_file(tmp_path)
    report = tmp_path / "run.txt"
    code = main(["solve", "--model", model, "--t-max", "30", "--report", str(report)])
    out = capsys.readouterr().out
    assert code == 0
    assert "stop: t=2 w_eq=yes" in out
    assert "bound:" in out and "holds=yes" in out
    assert report.read_text(encoding="utf-8") == out


def test_solve_timeout_is_normal_termination(tmp_path, capsys):
    model = _ring_file(tmp_path)
    code = main(["solve", "--model", model, "--t-max", "1"])
    out = capsys.readouterr().out
    assert code == 0
    assert "timeout=yes" in out
    assert "bound: skipped (weights did not converge)" in out


def test_no_timing_reports_are_byte_identical(tmp_path):
    model = _ring_file(tmp_path)
    paths = [tmp_path / "a.txt", tmp_path / "b.txt"]
    for p in paths:
        assert (
            main(["solve", "--model", model, "--no-timing", "--report", str(p)]) == 0
        )
    assert paths[0].read_bytes() == paths[1].read_bytes()
    assert b"seconds=-" in paths[0].read_bytes()


def test_solve_dumps_feed_certify(tmp_path, capsys):
    model = _ring_file(tmp_path)
    lp = tmp_path / "final.lp"
    cert = tmp_path / "final.cert"
    assert (
        main(
            [
                "solve",
                "--model",
                model,
                "--dump-lp",
                str(lp),
                "--dump-cert",
                str(cert),
            ]
        )
        == 0
    )
    code = main(["certify", str(lp), str(cert)])
    out = capsys.readouterr().out
    assert code == 0
    assert "kind=optimal" in out and out.rstrip().endswith("valid")


def test_certify_rejects_a_tampered_certificate(tmp_path, capsys):
    model = _ring_file(tmp_path)
    lp = tmp_path / "final.lp"
    cert = tmp_path / "final.cert"
    main(["solve", "--model", model, "--dump-lp", str(lp), "--dump-cert", str(cert)])
    lines = cert.read_text(encoding="utf-8").rstrip("\n").split("\n")
    key, value = lines[-1].rsplit(" ", 1)
    lines[-1] = f"{key} {Fraction(value) + 1}"
    cert.write_text("\n".join(lines) + "\n", encoding="utf-8")
    code = main(["certify", str(lp), str(cert)])
    assert code == 4
    assert "INVALID" in capsys.readouterr().out


def test_certify_bad_files_are_input_errors(tmp_path, capsys):
    missing = tmp_path / "nope.lp"
    assert main(["certify", str(missing), str(missing)]) == 1
    bad = tmp_path / "bad.lp"
    bad.write_text("not an lp\n", encoding="utf-8")
    assert main(["certify", str(bad), str(bad)]) == 1
    capsys.readouterr()


def test_policy_round_trips_through_file(tmp_path):
    model = _ring_file(tmp_path)
    out = tmp_path / "pol.txt"
    assert main(["solve", "--model", model, "--policy-out", str(out)]) == 0
    mdp = load_mdp(model)
    pol = decision_list_from_text(mdp, out.read_text(encoding="utf-8"))
    assert select_action(pol, PartialState.of({0: 1, 1: 1})) in (1, 2)
    assert select_action(pol, PartialState.of({0: 0, 1: 0})) in (1, 2)


def test_oracle_check_passes_on_ring(tmp_path, capsys):
    model = _ring_file(tmp_path)
    code = main(["oracle-check", "--model", model])
    out = capsys.readouterr().out
    assert code == 0
    assert "4 of 4 checks passed" in out
    assert out.count("ok  ") == 4


def test_oracle_check_respects_state_limit(tmp_path, capsys):
    model = _ring_file(tmp_path)
    code = main(["oracle-check", "--model", model, "--oracle-limit", "3"])
    assert code == 1
    assert "limit" in capsys.readouterr().err


def test_oracle_check_failure_names_the_check(tmp_path, capsys, monkeypatch):
    model = _ring_file(tmp_path)
    monkeypatch.setattr(
        "fmdp.cli.explicit_q", lambda *args, **kwargs: Fraction(999)
    )
    code = main(["oracle-check", "--model", model])
    captured = capsys.readouterr()
    assert code == 3
    assert "FAIL q-values" in captured.out
    assert "q-values" in captured.err


def test_internal_lp_failure_exits_two(tmp_path, capsys, monkeypatch):
    model = _ring_file(tmp_path)

    def boom(*args, **kwargs):
        raise LpInternalError("forced for the test")

    # The package re-exports the api() function under the submodule's name,
    # so patch through the module object rather than the dotted string.
    monkeypatch.setattr(sys.modules["fmdp.api"], "update_weights", boom)
    assert main(["solve", "--model", model]) == 2
    assert "internal error" in capsys.readouterr().err


def test_corrupt_model_exits_one(tmp_path, capsys):
    model = _ring_file(tmp_path)
    data = json.loads(open(model, encoding="utf-8").read())
    data["discount"] = "3/2"
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(data), encoding="utf-8")
    assert main(["solve", "--model", str(bad)]) == 1
    capsys.readouterr()


def test_discount_override(tmp_path, capsys):
    model = _ring_file(tmp_path)
    assert main(["solve", "--model", model, "--discount", "0"]) == 0
    assert "discount=0" in capsys.readouterr().out
    assert main(["solve", "--model", model, "--discount", "3/2"]) == 1
    capsys.readouterr()


def test_bad_epsilon_is_an_input_error(tmp_path, capsys):
    model = _ring_file(tmp_path)
    assert main(["solve", "--model", model, "--epsilon", "fast"]) == 1
    assert "not a rational" in capsys.readouterr().err


def test_usage_errors_exit_one(capsys):
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code == 1
    with pytest.raises(SystemExit) as info:
        main(["solve"])
    assert info.value.code == 1
    capsys.readouterr()


def test_bench_rows_and_bad_size(tmp_path, capsys):
    report = tmp_path / "bench.txt"
    code = main(["bench", "--sizes", "1", "2", "--no-timing", "--report", str(report)])
    out = capsys.readouterr().out
    assert code == 0
    assert "n=1 " in out and "n=2 " in out
    assert "constraints=" in out and "variables=" in out
    assert report.read_text(encoding="utf-8") == out
    assert main(["bench", "--sizes", "0"]) == 1
    capsys.readouterr()


def test_min_degree_order_accepted(tmp_path, capsys):
    model = _ring_file(tmp_path)
    code = main(["solve", "--model", model, "--order", "min-degree"])
    assert code == 0
    assert "w_eq=yes" in capsys.readouterr().out
