import json

import pytest

from char2c.cli import main
from char2c.corpus import load_corpus, load_tests, save_corpus


@pytest.fixture(scope="module")
def corpus_files(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    corpus = root / "corpus.jsonl"
    tests = root / "tests.jsonl"
    code = main(["gen-corpus", "--out", str(corpus), "--per-problem", "4",
                 "--seed", "3", "--tests-out", str(tests)])
    assert code == 0
    return corpus, tests


@pytest.fixture(scope="module")
def trained(tmp_path_factory, corpus_files):
    corpus, _ = corpus_files
    out_dir = tmp_path_factory.mktemp("run")
    code = main(["train", "--corpus", str(corpus), "--out-dir", str(out_dir),
                 "--hidden", "12", "--embed", "8", "--epochs", "2", "--seed", "4"])
    assert code == 0
    return out_dir / "checkpoint.json"


def test_gen_corpus_writes_both_files(corpus_files):
    corpus, tests = corpus_files
    samples = load_corpus(str(corpus))
    assert len(samples) == 16
    assert len(corpus.read_text().splitlines()) == 16
    assert {t.problem_id for t in load_tests(str(tests))} == {"max2", "sum", "min", "reverse"}


def test_gen_corpus_prints_header(capsys, tmp_path):
    out = tmp_path / "c.jsonl"
    assert main(["gen-corpus", "--out", str(out), "--per-problem", "1", "--seed", "1"]) == 0
    err = capsys.readouterr().err
    assert "gen-corpus" in err and "seed=1" in err and "corpus_sha256=" in err


def test_check_valid_program(capsys, tmp_path, corpus_files):
    corpus, _ = corpus_files
    sample = load_corpus(str(corpus))[0]
    f = tmp_path / "good.c"
    f.write_text(sample.code)
    assert main(["check", "--file", str(f)]) == 0
    assert capsys.readouterr().out.strip() == "valid"


def test_check_invalid_program(capsys, tmp_path):
    f = tmp_path / "bad.c"
    f.write_text("int main(){return 0}")
    assert main(["check", "--file", str(f)]) == 1
    out = capsys.readouterr().out
    assert "invalid" in out and "byte offset" in out


def test_check_missing_file_exit_1(capsys):
    assert main(["check", "--file", "/nonexistent/x.c"]) == 1
    assert "/nonexistent/x.c" in capsys.readouterr().err


def test_usage_errors_exit_2(capsys, tmp_path):
    assert main(["gen-corpus", "--out", str(tmp_path / "c"), "--bogus-flag"]) == 2
    assert main(["gen-corpus", "--out", str(tmp_path / "c"), "--per-problem", "lots"]) == 2
    assert main(["nn", "--query", "q", "--corpus", "c", "--metric", "vibes"]) == 2


def test_run_program(capsys, tmp_path, corpus_files):
    corpus, _ = corpus_files
    sample = next(s for s in load_corpus(str(corpus)) if s.problem_id == "max2")
    prog = tmp_path / "p.c"
    prog.write_text(sample.code)
    stdin = tmp_path / "in.txt"
    stdin.write_text("5\n3 1 4 1 5\n")
    assert main(["run", "--file", str(prog), "--stdin", str(stdin)]) == 0
    captured = capsys.readouterr()
    assert captured.out == "5 4\n"
    assert "status=ok" in captured.err


def test_run_step_limit_exit_1(capsys, tmp_path):
    prog = tmp_path / "loop.c"
    prog.write_text("int main(){while(1){}}")
    stdin = tmp_path / "empty.txt"
    stdin.write_text("")
    assert main(["run", "--file", str(prog), "--stdin", str(stdin),
                 "--step-limit", "50"]) == 1
    assert "step-limit" in capsys.readouterr().err


def test_train_writes_artifacts(trained):
    out_dir = trained.parent
    assert trained.exists()
    assert (out_dir / "loss_log.csv").exists()


def test_generate_greedy_is_reproducible(capsys, trained):
    args = ["generate", "--checkpoint", str(trained),
            "--prompt", "find the maximum and second maximum numbers",
            "--mode", "greedy", "--max-len", "40"]
    assert main(args) == 0
    first = capsys.readouterr().out
    assert main(args) == 0
    second = capsys.readouterr().out
    assert first == second


def test_generate_unknown_prompt_chars_exit_1(capsys, trained):
    assert main(["generate", "--checkpoint", str(trained), "--prompt", "ZZZ@@@",
                 "--max-len", "10"]) == 1
    assert "error" in capsys.readouterr().err


def test_generate_multiple_samples_jsonl(capsys, trained):
    assert main(["generate", "--checkpoint", str(trained), "--prompt",
                 "compute the sum of the numbers", "--mode", "sample",
                 "--temperature", "1.0", "--n", "3", "--max-len", "25",
                 "--seed", "8"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 3
    for line in lines:
        obj = json.loads(line)
        assert set(obj) == {"terminated", "text"}


def test_nn_finds_exact_match(capsys, tmp_path, corpus_files):
    corpus, _ = corpus_files
    samples = load_corpus(str(corpus))
    query = tmp_path / "query.c"
    query.write_text(samples[7].code)
    assert main(["nn", "--query", str(query), "--corpus", str(corpus),
                 "--metric", "chars"]) == 0
    result = json.loads(capsys.readouterr().out)
    assert result["index"] == 7 and result["score"] == 0.0
    for metric in ("structure", "identifiers"):
        assert main(["nn", "--query", str(query), "--corpus", str(corpus),
                     "--metric", metric]) == 0
        result = json.loads(capsys.readouterr().out)
        assert result["score"] == 1.0


def test_eval_end_to_end(capsys, tmp_path, corpus_files, trained):
    corpus, tests = corpus_files
    report_path = tmp_path / "report.json"
    assert main(["eval", "--checkpoint", str(trained), "--corpus", str(corpus),
                 "--tests", str(tests), "--out", str(report_path),
                 "--samples", "2", "--temperature", "0.8", "--seed", "6",
                 "--max-len", "30"]) == 0
    report = json.loads(report_path.read_text())
    assert set(report) == {"global", "prompts"}
    assert report["global"]["samples"] == 2 * 4
    assert len(report["prompts"]) == 4
    for prompt in report["prompts"]:
        assert 0.0 <= prompt["parse_rate"] <= 1.0
        assert prompt["samples_drawn"] == 2


def test_gradcheck_passes(capsys):
    assert main(["gradcheck", "--seed", "7", "--runs", "1"]) == 0
    out = capsys.readouterr().out
    assert "max relative error" in out and "model" in out


def test_missing_corpus_exit_1(capsys, tmp_path):
    assert main(["train", "--corpus", str(tmp_path / "none.jsonl"),
                 "--out-dir", str(tmp_path / "o")]) == 1


def test_gen_corpus_byte_identical_across_runs(tmp_path):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    assert main(["gen-corpus", "--out", str(a), "--per-problem", "3", "--seed", "9"]) == 0
    assert main(["gen-corpus", "--out", str(b), "--per-problem", "3", "--seed", "9"]) == 0
    assert a.read_bytes() == b.read_bytes()
