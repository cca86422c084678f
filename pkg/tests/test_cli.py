import json

import pytest

from boo.cli import build_parser, main


def test_list_functions(capsys):
    assert main(["list-functions"]) == 0
    out = capsys.readouterr().out
    assert "hartmann3" in out and "D=3" in out


def test_run_writes_traces_and_aggregate(tmp_path, capsys):
    rc = main(["run", "--func", "quadratic2d", "--algo", "boo,soo", "--budget", "12", "--repeats", "2",
               "--out", str(tmp_path)])
    assert rc == 0
    assert len(list(tmp_path.glob("quadratic2d_*_seed*.csv"))) == 4
    payload = json.loads((tmp_path / "quadratic2d_aggregate.json").read_text())
    assert set(payload["algorithms"]) == {"boo", "soo"}
    assert "final log10 simple regret" in capsys.readouterr().out


def test_flags_override_config_file(tmp_path):
    conf = tmp_path / "c.json"
    conf.write_text(json.dumps({"func": "quadratic1d", "budget": 9, "repeats": 3, "seed": 5}))
    assert main(["run", "--config", str(conf), "--repeats", "1", "--out", str(tmp_path)]) == 0
    payload = json.loads((tmp_path / "quadratic1d_aggregate.json").read_text())
    assert payload["config"]["budget"] == 9
    assert payload["config"]["repeats"] == 1
    assert payload["algorithms"]["boo"]["seeds"] == [5]


def test_explicit_scheme(tmp_path):
    assert main(["run", "--func", "quadratic2d", "--m", "4", "--b", "2", "--budget", "5", "--repeats", "1",
                 "--out", str(tmp_path)]) == 0
    payload = json.loads((tmp_path / "quadratic2d_aggregate.json").read_text())
    assert payload["config"]["scheme"] == [2, 2]


@pytest.mark.parametrize("argv", [
    ["run", "--func", "nope"],
    ["run", "--a", "2", "--m", "4"],
    ["run", "--b", "2"],
    ["run", "--func", "quadratic2d", "--a", "2", "--b", "3"],
    ["run", "--m", "10", "--b", "2"],
    ["run", "--repeats", "0"],
    ["ablate", "--func", "hartmann3", "--m", "10"],
    ["ablate", "--func", "hartmann3"],
])
def test_usage_errors_exit_2(argv, capsys):
    assert main(argv) == 2
    assert "boo: error:" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [["run", "--bogus"], ["frobnicate"], ["run", "--algo", "direct"]])
def test_parser_errors_exit_2(argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2


def test_ablate_writes_three_aggregates(tmp_path):
    rc = main(["ablate", "--func", "quadratic2d", "--m", "4", "--budget", "10", "--repeats", "1",
               "--out", str(tmp_path)])
    assert rc == 0
    names = sorted(p.name for p in tmp_path.glob("*_aggregate.json"))
    assert names == ["quadratic2d_ablate_bamsoo_b1_aggregate.json", "quadratic2d_ablate_boo_b1_aggregate.json",
                     "quadratic2d_ablate_boo_bD_aggregate.json"]
    schemes = {n: json.loads((tmp_path / n).read_text())["config"]["scheme"] for n in names}
    assert schemes["quadratic2d_ablate_boo_bD_aggregate.json"] == [2, 2]
    assert schemes["quadratic2d_ablate_boo_b1_aggregate.json"] == [4, 1]


def test_help_documents_beta_and_auto_rule():
    text = build_parser().format_help()
    assert "beta_p = 2 log(pi^2 p^3 / (3 eta))" in text
    assert "a = max(2, floor((sqrt(N)/2)^(1/D)))" in text


def test_validate_passes_and_fault_is_caught(capsys):
    assert main(["validate"]) == 0
    assert "9/9 checks passed" in capsys.readouterr().out
    assert main(["validate", "--inject-fault", "flip_ucb"]) == 1
    out = capsys.readouterr().out
    assert "FAIL  depth cap and expansion legality" in out


def test_module_entry_point():
    import subprocess
    import sys

    res = subprocess.run([sys.executable, "-m", "boo", "list-functions"], capture_output=True, text=True)
    assert res.returncode == 0 and "quadratic2d" in res.stdout
