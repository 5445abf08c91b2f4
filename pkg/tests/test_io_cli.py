import csv
import json
from pathlib import Path

import numpy as np
import pytest

from synthgraph import cli, io
from synthgraph.errors import DatasetFormatError
from synthgraph.taskgen import GenConfig, default_config, generate_task, make_splits

TASKS = ["N1", "N2", "N3", "S1", "S2", "S3"]


def tree_bytes(root: Path) -> dict:
    return {str(p.relative_to(root)): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


@pytest.mark.parametrize("task", TASKS)
def test_roundtrip(tmp_path, dataset, task):
    d = dataset(task)
    s = make_splits(d, 3, 1)
    io.write_dataset(d, tmp_path, s)
    again = io.read_dataset(tmp_path)
    assert again == d
    assert np.array_equal(again.nodes.features, d.nodes.features)
    assert io.read_splits(tmp_path, d.num_nodes) == s


def test_edges_sorted_u_lt_v(tmp_path, dataset):
    io.write_dataset(dataset("S2"), tmp_path)
    rows = list(csv.reader(open(tmp_path / "edges.csv")))
    assert rows[0] == ["u", "v"]
    pairs = [(int(u), int(v)) for u, v in rows[1:]]
    assert all(u < v for u, v in pairs)
    assert pairs == sorted(pairs)


def test_unknown_format_version(tmp_path, dataset):
    io.write_dataset(dataset("S1"), tmp_path)
    meta = json.loads((tmp_path / "meta.json").read_text())
    meta["format_version"] = 99
    (tmp_path / "meta.json").write_text(json.dumps(meta))
    with pytest.raises(DatasetFormatError, match="format_version"):
        io.read_dataset(tmp_path)


def test_config_file_roundtrip(tmp_path):
    cfg = default_config("N1", num_nodes=321, seed=4)
    (tmp_path / "cfg.json").write_text(json.dumps(cfg.to_dict()))
    assert io.load_config(tmp_path / "cfg.json") == cfg


# -- CLI -------------------------------------------------------------------

def run(*argv):
    return cli.main([str(a) for a in argv])


def test_generate_records_inputs(tmp_path):
    out = tmp_path / "d"
    assert run("generate", "--task", "S1", "--seed", 7, "--out", out) == 0
    meta = json.loads((out / "meta.json").read_text())
    assert meta["task_id"] == "S1" and meta["seed"] == 7
    assert len(list((out / "splits").glob("rep_*.json"))) == 10


def test_generate_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert run("generate", "--task", "S3", "--seed", 3, "--out", out) == 0
        assert run("stats", out) == 0
        assert run("baseline", out, "--model", "bayes") == 0
    assert tree_bytes(a) == tree_bytes(b)


def test_generate_small_n2(tmp_path):
    out = tmp_path / "n2"
    assert run("generate", "--task", "N2", "--nodes", 200, "--avg-degree", 12, "--out", out) == 0
    rows = list(csv.reader(open(out / "nodes.csv")))
    assert rows[0] == ["id", "feature", "label", "hidden_state"]
    assert len(rows) == 201


def test_generate_from_config_file(tmp_path):
    cfg = GenConfig(num_nodes=150, target_avg_degree=10, num_states=2, seed=2)
    (tmp_path / "c.json").write_text(json.dumps(cfg.to_dict()))
    out = tmp_path / "n3"
    assert run("generate", "--task", "N3", "--config", tmp_path / "c.json", "--out", out) == 0
    assert io.read_dataset(out).config == cfg


def test_seed_env_fallback(tmp_path, monkeypatch):
    monkeypatch.setenv("SYNTHGRAPH_SEED", "41")
    assert run("generate", "--task", "S2", "--nodes", 100, "--out", tmp_path / "e") == 0
    assert json.loads((tmp_path / "e" / "meta.json").read_text())["seed"] == 41


def test_usage_errors(tmp_path, capsys):
    assert run("generate", "--task", "X1", "--out", tmp_path) == 2
    assert run("frobnicate") == 2
    assert run("generate", "--task", "S1", "--states", 3, "--out", tmp_path / "s") == 2


@pytest.fixture(scope="module")
def s1_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("s1")
    assert cli.main(["generate", "--task", "S1", "--seed", "0", "--out", str(out)]) == 0
    return out


def test_stats_s1(s1_dir):
    assert run("stats", s1_dir) == 0
    rep = s1_dir / "reports"
    stats = json.loads((rep / "stats.json").read_text())
    assert stats["table_1"]["h_e"] == 0.0
    assert stats["table_1"]["LI"] == 1.0
    assert stats["table_1"]["h_adj"] == -0.3333
    ccns = np.loadtxt(rep / "ccns.csv", delimiter=",", skiprows=1)[:, 1:]
    assert np.array_equal(ccns, ccns.T)
    hist = np.loadtxt(rep / "feature_hist.csv", delimiter=",", skiprows=1, dtype=int)
    labels = io.read_dataset(s1_dir).nodes.labels
    assert hist[:, 1:].sum(axis=0).tolist() == np.bincount(labels)[1:].tolist()


def test_stats_n1_ccns_near_uniform(tmp_path):
    out = tmp_path / "n1"
    assert run("generate", "--task", "N1", "--out", out) == 0
    assert run("stats", out) == 0
    m = np.loadtxt(out / "reports" / "ccns.csv", delimiter=",", skiprows=1)[:, 1:]
    assert np.all(np.abs(m - m.mean()) < 0.1)
    hist = np.loadtxt(out / "reports" / "feature_hist.csv", delimiter=",", skiprows=1, dtype=int)
    d = io.read_dataset(out)
    bins = np.floor(d.nodes.features).astype(int)

    def max_tv(labels):
        shares = np.stack([np.bincount(bins[labels == c] - bins.min(), minlength=np.ptp(bins) + 1)
                           for c in range(1, 5)], axis=1).astype(float)
        shares /= shares.sum(axis=0)
        return max(0.5 * np.abs(shares[:, a] - shares[:, b]).sum()
                   for a in range(4) for b in range(a + 1, 4))

    assert hist[:, 1:].sum() == d.num_nodes
    occupied = hist[hist[:, 1:].sum(axis=1) > 0, 0]
    assert (np.diff(occupied) > 1).sum() == 3  # four separated modes
    # per-class shapes differ no more than under randomly shuffled labels
    rng = np.random.default_rng(0)
    null = [max_tv(rng.permutation(d.nodes.labels)) for _ in range(200)]
    assert max_tv(d.nodes.labels) <= np.quantile(null, 0.99)


def test_stats_writes_null_for_undefined(tmp_path):
    from synthgraph.graph import Dataset, Graph, NodeTable
    d = Dataset(Graph(10), NodeTable(np.ones(10), [1, 2] * 5, 2), "custom")
    io.write_dataset(d, tmp_path)
    assert run("stats", tmp_path) == 1
    stats = json.loads((tmp_path / "reports" / "stats.json").read_text())
    assert stats["table_1"]["h_e"] is None
    assert "UndefinedMetricError" in stats["undefined"]["h_e"]


def test_baseline_mode_s1(s1_dir):
    assert run("baseline", s1_dir, "--model", "mode") == 0
    res = json.loads((s1_dir / "reports" / "baselines.json").read_text())["mode"]
    assert abs(res["mean"] - 0.25) <= 0.03
    assert len(res["per_split_accuracy"]) == 10


def test_baseline_oracle_n1(tmp_path):
    out = tmp_path / "n1"
    assert run("generate", "--task", "N1", "--out", out) == 0
    assert run("baseline", out, "--model", "oracle") == 0
    res = json.loads((out / "reports" / "baselines.json").read_text())
    assert res["oracle"]["mean"] >= 0.99


def test_baseline_bayes_s2(tmp_path):
    out = tmp_path / "s2"
    assert run("generate", "--task", "S2", "--out", out) == 0
    assert run("baseline", out, "--model", "bayes") == 0
    res = json.loads((out / "reports" / "baselines.json").read_text())
    assert abs(res["bayes"]["mean"] - 0.25) <= 0.04


def test_baseline_oracle_custom_unsupported(tmp_path):
    from synthgraph.graph import Dataset, Graph, NodeTable
    d = Dataset(Graph(10, [(0, 1)]), NodeTable(np.arange(10.0), [1, 2] * 5, 2), "custom")
    io.write_dataset(d, tmp_path, make_splits(10, 2, 0))
    assert run("baseline", tmp_path, "--model", "oracle") == 2


def test_verify_fresh_s3(tmp_path):
    out = tmp_path / "s3"
    assert run("generate", "--task", "S3", "--out", out) == 0
    assert run("verify", out) == 0


def test_verify_edited_label(tmp_path, capsys):
    out = tmp_path / "s1"
    assert run("generate", "--task", "S1", "--nodes", 200, "--out", out) == 0
    lines = (out / "nodes.csv").read_text().splitlines()
    node, feat, label = lines[6].split(",")
    lines[6] = ",".join([node, feat, "1" if label != "1" else "2"])
    (out / "nodes.csv").write_text("\n".join(lines) + "\n")
    capsys.readouterr()
    assert run("verify", out) == 1
    assert f"node {node}:" in capsys.readouterr().out


def test_verify_truncated_edges(tmp_path, capsys):
    out = tmp_path / "s2"
    assert run("generate", "--task", "S2", "--nodes", 100, "--out", out) == 0
    text = (out / "edges.csv").read_text()
    (out / "edges.csv").write_text(text[: len(text) // 2].rsplit(",", 1)[0])
    nlines = text[: len(text) // 2].rsplit(",", 1)[0].count("\n") + 1
    capsys.readouterr()
    assert run("verify", out) == 3
    assert f"edges.csv:{nlines}" in capsys.readouterr().err


def test_verify_missing_directory(tmp_path):
    assert run("verify", tmp_path / "nope") == 3


def test_reproduce_command(tmp_path):
    out = tmp_path / "repro"
    assert run("reproduce-paper", "--out", out) == 0
    rows = {r["task"]: r for r in csv.DictReader(open(out / "table_1.csv"))}
    assert (rows["S1"]["h_e"], rows["S1"]["h_adj"], rows["S1"]["LI"]) == ("0.0000", "-0.3333", "1.0000")
    assert rows["N3"]["K"] == "2" and abs(float(rows["N3"]["h_e"]) - 0.50) <= 0.03
    table2 = {r["model"]: r for r in csv.DictReader(open(out / "table_2_baselines.csv"))}
    mode = {t: float(table2["mode"][t].split(" ± ")[0]) for t in TASKS}
    # Mode targets per task except N1, where the acceptance target 1/K replaces 0.33
    for task, want in zip(TASKS, (0.25, 0.26, 0.51, 0.25, 0.25, 0.26)):
        assert abs(mode[task] - want) <= 0.04, task
    for task in TASKS:
        assert (out / task / "reports" / "ccns.csv").exists()


@pytest.mark.xfail(strict=True, reason=(
    "balanced hidden states leave N1 labels near-uniform, so Mode sits at 1/K = 0.25; "
    "the acceptance target 1/K takes precedence over the 0.33 target"))
def test_reproduce_n1_mode_near_target(tmp_path):
    out = tmp_path / "repro"
    assert run("reproduce-paper", "--out", out) == 0
    table2 = {r["model"]: r for r in csv.DictReader(open(out / "table_2_baselines.csv"))}
    assert abs(float(table2["mode"]["N1"].split(" ± ")[0]) - 0.33) <= 0.04
