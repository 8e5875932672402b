"""End-to-end CLI tests: train/score/eval/bench/info round trips, exit
codes, determinism, and cross-checks against in-process oracles."""
import json

import numpy as np
import pytest

from streambank import (
    CoresetConfig,
    CostQuery,
    greedy_sample,
    load,
    predict_incremental_sum,
    truncated_svd,
)
from streambank.cli import main
from streambank.npyio import write_matrix


def rank_r_vectors(m, n, r, seed):
    rng = np.random.default_rng(seed)
    left = np.linalg.qr(rng.standard_normal((m, r)))[0]
    return left @ rng.standard_normal((r, n))


@pytest.fixture
def train_file(tmp_path):
    x = rank_r_vectors(8, 64, 4, seed=200)
    path = tmp_path / "train.npy"
    write_matrix(path, x)
    return path, x


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr().out
    return code, out


class TestTrain:
    def test_summary_counters_match_cost_model(self, tmp_path, train_file, capsys):
        path, x = train_file
        bankdir = tmp_path / "bank"
        code, out = run(
            capsys,
            "train", "--input", path, "--output", bankdir,
            "--k", 4, "--batch-size", 16, "--sample-rate", "0.25",
            "--incremental-sampling", "--buffer", "no",
        )
        assert code == 0
        summary = json.loads(out)
        assert summary["vectors_seen"] == 64
        assert summary["bank_size"] == 16
        assert summary["k_effective"] == 4
        expected = predict_incremental_sum(CostQuery(64, 16, "0.25"))
        assert summary["greedy_comparisons"] == expected
        bank = load(bankdir)
        assert bank.size == 16
        assert bank.meta["buffer_policy"] == "no"

    def test_zero_target_rejected_before_processing(self, tmp_path, train_file, capsys):
        path, _ = train_file
        code, _ = run(
            capsys,
            "train", "--input", path, "--output", tmp_path / "bank",
            "--k", 4, "--batch-size", 16, "--sample-rate", "0.001",
        )
        assert code == 2
        assert not (tmp_path / "bank").exists()

    def test_single_batch_matches_one_shot_reference(self, tmp_path, train_file, capsys):
        path, x = train_file
        bankdir = tmp_path / "bank"
        code, _ = run(
            capsys,
            "train", "--input", path, "--output", bankdir,
            "--k", 4, "--batch-size", 64, "--sample-rate", "0.25",
        )
        assert code == 0
        bank = load(bankdir)
        # one-shot oracle pipeline, run in-process
        direct = truncated_svd(x, 4)
        reference = direct.u.T @ x
        picked = greedy_sample(reference, CoresetConfig(rate="0.25"))
        np.testing.assert_allclose(
            bank.coords, reference[:, picked.indices], rtol=1e-9, atol=1e-9
        )

    def test_aggregated_config_errors(self, tmp_path, train_file, capsys):
        path, _ = train_file
        code = main(
            [
                "train", "--input", str(path), "--output", str(tmp_path / "b"),
                "--k", "0", "--batch-size", "0", "--sample-rate", "7",
            ]
        )
        assert code == 2

    def test_determinism_byte_identical(self, tmp_path, train_file, capsys):
        path, _ = train_file
        args = [
            "train", "--input", path, "--output", None,
            "--k", 4, "--batch-size", 8, "--sample-rate", "0.25",
            "--incremental-sampling", "--buffer", "3",
        ]
        outs = []
        for name in ("bank_a", "bank_b"):
            args[4] = tmp_path / name
            code, _ = run(capsys, *args)
            assert code == 0
            outs.append(
                b"".join(
                    (tmp_path / name / f).read_bytes()
                    for f in ("basis.npy", "svals.npy", "bank.npy", "meta.json")
                )
            )
        assert outs[0] == outs[1]


class TestScoreAndEval:
    @pytest.fixture
    def trained(self, tmp_path, train_file, capsys):
        path, x = train_file
        bankdir = tmp_path / "bank"
        code, _ = run(
            capsys,
            "train", "--input", path, "--output", bankdir,
            "--k", 4, "--batch-size", 64, "--sample-rate", "1.0",
        )
        assert code == 0
        return path, x, bankdir

    def test_training_vectors_score_zero_at_full_rate(self, tmp_path, trained, capsys):
        path, x, bankdir = trained
        out_tsv = tmp_path / "scores.tsv"
        code, _ = run(
            capsys, "score", "--input", path, "--bank", bankdir, "--output", out_tsv
        )
        assert code == 0
        rows = out_tsv.read_text().strip().splitlines()
        assert rows[0] == "vector_index\tscore\tnearest_index"
        scores = [float(r.split("\t")[1]) for r in rows[1:]]
        assert len(scores) == 64
        assert max(scores) <= 1e-8

    def test_empty_query_file(self, tmp_path, trained, capsys):
        _, _, bankdir = trained
        empty = tmp_path / "empty.npy"
        write_matrix(empty, np.empty((8, 0)))
        out_tsv = tmp_path / "empty.tsv"
        code, _ = run(
            capsys, "score", "--input", empty, "--bank", bankdir, "--output", out_tsv
        )
        assert code == 0
        assert out_tsv.read_text() == "vector_index\tscore\tnearest_index\n"

    def test_grouped_scoring(self, tmp_path, trained, capsys):
        path, x, bankdir = trained
        groups = tmp_path / "groups.json"
        groups.write_text(
            json.dumps(
                {"images": [
                    {"id": "img0", "start": 0, "count": 32},
                    {"id": "img1", "start": 32, "count": 32},
                ]}
            )
        )
        out_tsv = tmp_path / "scores.tsv"
        code, _ = run(
            capsys, "score", "--input", path, "--bank", bankdir,
            "--output", out_tsv, "--groups", groups,
        )
        assert code == 0
        text = out_tsv.read_text()
        assert "image_id\timage_score" in text
        image_rows = text.split("image_id\timage_score\n", 1)[1].strip().splitlines()
        assert [r.split("\t")[0] for r in image_rows] == ["img0", "img1"]
        per_vector = [float(r.split("\t")[1]) for r in text.splitlines()[1:65]]
        assert float(image_rows[0].split("\t")[1]) == max(per_vector[:32])

    def test_m_mismatch_is_data_error(self, tmp_path, trained, capsys):
        _, _, bankdir = trained
        wrong = tmp_path / "wrong.npy"
        write_matrix(wrong, np.ones((5, 3)))
        code, _ = run(capsys, "score", "--input", wrong, "--bank", bankdir)
        assert code == 3

    def test_eval_round_trip(self, tmp_path, trained, capsys):
        path, x, bankdir = trained
        rng = np.random.default_rng(201)
        anomalies = rng.standard_normal((8, 16)) * 5.0
        queries = np.concatenate([x[:, :16], anomalies], axis=1)
        qfile = tmp_path / "queries.npy"
        write_matrix(qfile, queries)
        out_tsv = tmp_path / "scores.tsv"
        code, _ = run(
            capsys, "score", "--input", qfile, "--bank", bankdir, "--output", out_tsv
        )
        assert code == 0
        labels = tmp_path / "labels.tsv"
        labels.write_text(
            "id\tlabel\n"
            + "\n".join(f"{i}\t{0 if i < 16 else 1}" for i in range(32))
            + "\n"
        )
        code, out = run(capsys, "eval", "--input", out_tsv, "--labels", labels)
        assert code == 0
        result = json.loads(out)
        assert result["n_pos"] == 16 and result["n_neg"] == 16
        assert result["auroc"] == 1.0

    def test_eval_order_invariance(self, tmp_path, trained, capsys):
        path, _, bankdir = trained
        out_tsv = tmp_path / "scores.tsv"
        run(capsys, "score", "--input", path, "--bank", bankdir, "--output", out_tsv)
        ids = list(range(64))
        rows = [f"{i}\t{1 if i % 3 == 0 else 0}" for i in ids]
        a, b = tmp_path / "a.tsv", tmp_path / "b.tsv"
        a.write_text("\n".join(rows) + "\n")
        rng = np.random.default_rng(202)
        shuffled = rows[:]
        rng.shuffle(shuffled)
        b.write_text("\n".join(shuffled) + "\n")
        _, out_a = run(capsys, "eval", "--input", out_tsv, "--labels", a)
        _, out_b = run(capsys, "eval", "--input", out_tsv, "--labels", b)
        assert json.loads(out_a) == json.loads(out_b)

    def test_eval_single_class_fails(self, tmp_path, trained, capsys):
        path, _, bankdir = trained
        out_tsv = tmp_path / "scores.tsv"
        run(capsys, "score", "--input", path, "--bank", bankdir, "--output", out_tsv)
        labels = tmp_path / "labels.tsv"
        labels.write_text("\n".join(f"{i}\t1" for i in range(64)) + "\n")
        code, _ = run(capsys, "eval", "--input", out_tsv, "--labels", labels)
        assert code == 3

    def test_eval_misalignment(self, tmp_path, trained, capsys):
        path, _, bankdir = trained
        out_tsv = tmp_path / "scores.tsv"
        run(capsys, "score", "--input", path, "--bank", bankdir, "--output", out_tsv)
        labels = tmp_path / "labels.tsv"
        labels.write_text("999\t1\n0\t0\n")
        code, _ = run(capsys, "eval", "--input", out_tsv, "--labels", labels)
        assert code == 3


class TestBench:
    def test_worked_row(self, tmp_path, capsys):
        code, out = run(
            capsys,
            "bench-sampling", "--n", 16, "--dims", 4,
            "--sample-rate", "0.25", "--sample-batch", "4", "--buffer", "no",
        )
        assert code == 0
        header, row = out.strip().splitlines()
        cells = dict(zip(header.split("\t"), row.split("\t")))
        assert cells["measured_comparisons"] == "60"
        assert cells["predicted_comparisons"] == "60"
        assert cells["ratio_vs_batchless"] == "0.9375"

    def test_large_row_hits_ratio(self, capsys):
        code, out = run(
            capsys,
            "bench-sampling", "--n", 10000, "--dims", 4,
            "--sample-rate", "0.01", "--sample-batch", "100", "--buffer", "no",
        )
        assert code == 0
        row = out.strip().splitlines()[1].split("\t")
        assert row[4] == row[5] == "838300"
        assert float(row[6]) == 0.8383

    def test_all_policy_equals_batchless(self, capsys):
        code, out = run(
            capsys,
            "bench-sampling", "--n", 32, "--dims", 3,
            "--sample-rate", "0.25", "--sample-batch", "8", "--buffer", "all",
        )
        assert code == 0
        row = out.strip().splitlines()[1].split("\t")
        assert row[4] == row[5] == str(32 * 8)

    def test_policy_sweep_rows(self, capsys):
        code, out = run(
            capsys,
            "bench-sampling", "--n", 32, "--dims", 3,
            "--sample-rate", "0.25", "--sample-batch", "8,16", "--buffer", "no,all,2",
        )
        assert code == 0
        lines = out.strip().splitlines()
        assert len(lines) == 1 + 2 * 3
        for line in lines[1:]:
            cells = line.split("\t")
            assert cells[4] == cells[5]  # measured always equals simulated


class TestInfoAndReduce:
    def test_info(self, tmp_path, train_file, capsys):
        path, _ = train_file
        bankdir = tmp_path / "bank"
        run(
            capsys,
            "train", "--input", path, "--output", bankdir,
            "--k", 4, "--batch-size", 16, "--sample-rate", "0.5",
        )
        code, out = run(capsys, "info", "--bank", bankdir)
        assert code == 0
        info = json.loads(out)
        assert info["meta"]["vectors_seen"] == 64
        assert info["kernel_backend"] in ("native", "python")

    def test_reduce_outputs(self, tmp_path, train_file, capsys):
        path, x = train_file
        outdir = tmp_path / "red"
        code, out = run(
            capsys, "reduce", "--input", path, "--output", outdir,
            "--k", 4, "--batch-size", 16,
        )
        assert code == 0
        assert json.loads(out)["k_effective"] == 4
        from streambank.npyio import load_array

        reduced = load_array(outdir / "reduced.npy")
        assert reduced.shape == (64, 4)
        basis = load_array(outdir / "basis.npy")
        np.testing.assert_allclose(reduced.T, basis.T @ x, rtol=1e-9, atol=1e-9)

    def test_missing_bank_is_data_error(self, tmp_path, capsys):
        code, _ = run(capsys, "info", "--bank", tmp_path / "nope")
        assert code == 3
