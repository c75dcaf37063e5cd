import pytest

from maxdeg import __version__
from maxdeg.cli import main
from maxdeg.graph import complete_graph, cycle_graph, empty_graph, iter_graphs, path_graph, write_graph


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_count(capsys):
    assert run(capsys, "count", "--matchings", "8")[:2] == (0, "105\n")
    assert run(capsys, "count", "--lambda", "--R", "3", "--p", "3")[1] == "4/3\n"
    assert run(capsys, "count", "--class", "0,2,1", "--R", "2")[1] == "9/2\n"
    assert run(capsys, "count", "--mu", "--R", "3", "--p", "1")[1] == "2\n"
    code, out, _ = run(capsys, "count", "--pk", "2", "2", "--mean", "1")
    assert code == 0 and float(out) == pytest.approx(1 - 2 * 2.718281828459045**-1)
    assert float(run(capsys, "count", "--simplicity", "--R", "3")[1]) == pytest.approx(0.1353352832366127)


@pytest.mark.parametrize(
    "argv",
    [
        ["count"],
        ["count", "--lambda", "--R", "3"],
        ["count", "--class", "0,2,1", "--R", "3"],
        ["count", "--matchings", "7"],
        ["count", "--pk", "2", "1"],
    ],
)
def test_count_usage_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and err.startswith("error:")


def test_argparse_usage_exit(capsys):
    with pytest.raises(SystemExit) as info:
        main(["sample", "--n", "5"])
    assert info.value.code == 2


def test_sample_and_trace(capsys, tmp_path):
    out = tmp_path / "g.txt"
    trace = tmp_path / "t.csv"
    code, _, _ = run(capsys, "sample", "--n", "12", "--R", "3", "--count", "5", "--seed", "9", "--out", str(out), "--trace", str(trace))
    assert code == 0
    graphs = list(iter_graphs(out.read_text()))
    assert len(graphs) == 5 and all(G.n == 12 and G.R == 3 for G in graphs)
    lines = trace.read_text().splitlines()
    assert lines[0] == "class,restarts,accepted"
    assert lines[-1] == f"# seed=9 version={__version__}"
    assert sum(line.endswith(",1") for line in lines[1:-1]) == 5


def test_sample_is_worker_independent(capsys):
    one = run(capsys, "sample", "--n", "20", "--R", "3", "--count", "6", "--seed", "4")[1]
    two = run(capsys, "sample", "--n", "20", "--R", "3", "--count", "6", "--seed", "4", "--workers", "2")[1]
    assert one == two


def test_sample_errors(capsys):
    assert run(capsys, "sample", "--n", "5000", "--R", "3", "--seed", "1", "--mode", "exact")[0] == 2
    code, _, err = run(capsys, "sample", "--n", "3000", "--R", "3", "--seed", "2", "--count", "40", "--max-restarts", "1")
    assert code == 3 and "sampler error" in err


def test_census(capsys, tmp_path):
    path = tmp_path / "c.txt"
    write_graph(cycle_graph(8), path)
    code, out, _ = run(capsys, "census", "--graph", str(path), "--k", "1", "--connectivity")
    assert code == 0
    rows = dict(line.split(",", 1) for line in out.splitlines()[1:-1])
    assert rows["cycles_8"] == "1" and rows["connectivity"] == "2"
    assert out.splitlines()[-1] == f"# seed=none version={__version__}"
    assert run(capsys, "census", "--graph", str(tmp_path / "missing.txt"))[0] == 2


def test_fo_commands(capsys, tmp_path):
    g, h = tmp_path / "g.txt", tmp_path / "h.txt"
    write_graph(complete_graph(2), g)
    write_graph(empty_graph(2), h)
    assert run(capsys, "fo", "ef", "--g", str(g), "--h", str(h), "--k", "2")[1] == "Spoiler\n"
    assert run(capsys, "fo", "ef", "--g", str(g), "--h", str(h), "--k", "1")[1] == "Duplicator\n"
    assert run(capsys, "fo", "rank", "--sentence", "exists x. deg(x) = 1")[1] == "3\n"
    assert run(capsys, "fo", "eval", "--graph", str(g), "--sentence", "exists x. exists y. E(x, y)")[1] == "true\n"
    code, _, err = run(capsys, "fo", "rank", "--sentence", "exists x E(x, x)")
    assert code == 5 and "position 9" in err


def test_fo_limit(capsys):
    code, out, err = run(capsys, "fo", "limit", "--sentence", "exists x. deg(x) = 1", "--R", "3", "--n", "60,80", "--samples", "50", "--seed", "3")
    assert code == 0 and out.startswith("n,samples,successes,frequency,ci_low,ci_high\n")
    assert len(out.splitlines()) == 4 and "estimate" in err


def test_oracle_commands(capsys, tmp_path):
    code, out, _ = run(capsys, "oracle", "counts", "--n", "4", "--R", "2", "--dump", str(tmp_path / "all.txt"))
    assert code == 0 and out.splitlines()[1] == "4,2,41,7"
    assert len(list(iter_graphs((tmp_path / "all.txt").read_text()))) == 41
    code, out, _ = run(capsys, "oracle", "configs", "--cells", "2,2,2")
    assert code == 0 and out.splitlines()[1] == "15,8,5,1"
    code, out, _ = run(capsys, "oracle", "pmf", "--n", "3", "--R", "2", "--statistic", "degree=0")
    assert out.splitlines()[:4] == ["value,probability_num,probability_den", "0,1,2", "1,3,8", "3,1,8"]
    assert run(capsys, "oracle", "pmf", "--n", "3", "--R", "2", "--statistic", "girth")[0] == 2
    assert run(capsys, "oracle", "counts", "--n", "9", "--R", "2")[0] == 2
    code, out, _ = run(capsys, "oracle", "compare-sampler", "--n", "3", "--R", "2", "--samples", "4000", "--seed", "1", "--max-tv", "0.05")
    assert code == 0 and "pass,1" in out
    code, out, _ = run(capsys, "oracle", "compare-sampler", "--n", "3", "--R", "2", "--samples", "50", "--seed", "1")
    assert code == 6 and "pass,0" in out


def test_experiment_schedule_error(capsys):
    code, _, err = run(capsys, "experiment", "degree-dist", "--R", "3", "--n", "5000", "--samples", "5", "--seed", "1", "--mode", "exact")
    assert code == 4 and "infeasible" in err


def test_experiment_runs(capsys):
    code, out, _ = run(capsys, "experiment", "simplicity", "--R", "3", "--n", "200", "--samples", "200", "--seed", "1")
    assert code == 0
    assert out.splitlines()[0] == "n,stat,predicted,observed,detail"
