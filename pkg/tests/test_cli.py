import subprocess
import sys

import pytest

from paging_regret.cli import main


def run(args, capsys):
    code = main([str(a) for a in args])
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def files(tmp_path, capsys):
    tr = tmp_path / "trace.csv"
    bundle = tmp_path / "bundle"
    assert run(["gen-trace", "--kind", "zipf", "--n", 12, "--T", 600, "--seed", 1, "--out", tr],
               capsys)[0] == 0
    assert run(["gen-predictors", "--trace", tr, "--M", 3, "--out", bundle, "--seed", 1],
               capsys)[0] == 0
    return tr, bundle


def test_gen_trace_stdout(capsys):
    code, out, _ = run(["gen-trace", "--kind", "cyclic", "--cycle", 4, "--n", 5, "--T", 6], capsys)
    assert code == 0
    assert out.splitlines() == ["# n=5", "t,page", "1,1", "2,2", "3,3", "4,4", "5,1", "6,2"]


def test_metrics(files, capsys):
    tr, bundle = files
    code, out, _ = run(["metrics", "--trace", tr, "--bundle", bundle], capsys)
    lines = out.splitlines()
    assert code == 0
    assert lines[0] == "predictor,error_rounds,inverted_pairs,inverted_rounds,eta_refined,l1"
    assert lines[1] == "1,0,0,0,0,0" and len(lines) == 4


@pytest.mark.parametrize("algo", ["fitf", "lru", "sim", "scs", "multiplexer"])
def test_run_algorithms(files, capsys, algo):
    tr, bundle = files
    code, out, _ = run(["run", "--trace", tr, "--bundle", bundle, "--algo", algo, "--k", 4], capsys)
    assert code == 0
    header, row = out.splitlines()
    cells = dict(zip(header.split(","), row.split(",")))
    assert cells["algorithm"] == algo
    assert int(cells["regret"]) == int(cells["cost"]) - int(cells["opt"]) >= 0


def test_global_flags_before_command(files, capsys, tmp_path):
    tr, bundle = files
    dump = tmp_path / "rounds.csv"
    code, _, _ = run(["--k", 4, "--dump-rounds", dump, "run", "--trace", tr, "--bundle", bundle,
                      "--algo", "sim"], capsys)
    assert code == 0
    assert dump.read_text().splitlines()[0] == "t,request,miss,evicted,argmax_remedy"


def test_scs_epoch_dump_and_tau(files, capsys, tmp_path):
    tr, bundle = files
    ep = tmp_path / "ep.csv"
    code, _, _ = run(["run", "--trace", tr, "--bundle", bundle, "--algo", "scs", "--k", 4,
                      "--tau", 10, "--seed", 3, "--dump-epochs", ep], capsys)
    assert code == 0
    assert len(ep.read_text().splitlines()) == 1 + 60


def test_multiplexer_epsilon(files, capsys):
    tr, bundle = files
    code, out, _ = run(["run", "--trace", tr, "--bundle", bundle, "--algo", "multiplexer",
                        "--k", 4, "--epsilon", 0.1], capsys)
    assert code == 0 and out.splitlines()[1].endswith(",0.1")
    code, _, err = run(["run", "--trace", tr, "--bundle", bundle, "--algo", "multiplexer",
                        "--k", 4, "--epsilon", 0.3], capsys)
    assert code == 2 and "epsilon" in err


@pytest.mark.parametrize("args", [
    ["run", "--trace", "missing.csv", "--algo", "fitf", "--k", 2],
    ["gen-trace", "--T", 5],
    ["gen-trace", "--n", 5, "--T", 5, "--kind", "cyclic", "--cycle", 9],
])
def test_validation_errors_exit_2(args, capsys):
    code, _, err = run(args, capsys)
    assert code == 2 and err.startswith("error:")


def test_dump_flag_misuse(files, capsys, tmp_path):
    tr, bundle = files
    code, _, _ = run(["run", "--trace", tr, "--algo", "lru", "--k", 3, "--dump-rounds",
                      tmp_path / "x.csv"], capsys)
    assert code == 2


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as e:
        main(["run", "--algo", "belady"])
    assert e.value.code == 2


def test_dp_opt_guard_is_a_validation_error(tmp_path, capsys):
    tr = tmp_path / "big.csv"
    run(["gen-trace", "--n", 30, "--T", 2000, "--out", tr], capsys)
    code, _, err = run(["run", "--trace", tr, "--algo", "dp-opt", "--k", 10], capsys)
    assert code == 2 and "exceeds" in err


def test_lower_bound(capsys):
    code, out, _ = run(["lower-bound", "--k", 4, "--T", 5000, "--seeds", "0-1"], capsys)
    lines = out.splitlines()
    assert code == 0 and lines[2].startswith("seed,phases") and len(lines) == 5


def test_experiment_reproducible(tmp_path, capsys):
    conf = tmp_path / "c.cfg"
    conf.write_text("trace = uniform\nn = 10\nT = 500\nk = 3\nM = 2\nalgorithm = scs\nseeds = 0-2\n")
    outs = []
    for name in ("a.csv", "b.csv"):
        assert run(["experiment", "--config", conf, "--out", tmp_path / name], capsys)[0] == 0
        outs.append((tmp_path / name).read_bytes())
    assert outs[0] == outs[1]
    code, out, _ = run(["experiment", "--config", conf], capsys)
    assert out.encode() == outs[0]


def test_internal_errors_exit_1(monkeypatch, capsys):
    import paging_regret.cli as cli

    def boom(args):
        raise RuntimeError("kaput")

    monkeypatch.setitem(cli.COMMANDS, "lower-bound", boom)
    code, _, err = run(["lower-bound", "--k", 2, "--T", 10], capsys)
    assert code == 1 and "kaput" in err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "paging_regret.cli", "gen-trace", "--n", "3",
                           "--T", "2"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("# n=3\nt,page\n")
