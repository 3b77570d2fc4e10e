"""Command-line entry point: make data, train, generate, check, run, analyze.

Exit codes: 0 success, 1 operational failure (missing file, invalid program,
failed threshold), 2 usage error. Every run prints a reproducibility header
(seed, key config, input file hashes) to stderr; primary output goes to
stdout or to the paths given on the command line.
"""

import argparse
import json
import logging
import os
import sys

from . import corpusforge, evalkit, fdcheck, minic
from .corpus import file_sha256, load_corpus, load_tests, save_corpus, save_tests
from .prng import SplitMix64
from .seq2seq import encode_comment, generate
from .textcodec import UnknownCharacterError, encode_text
from .trainer import CheckpointError, TrainConfig, load_checkpoint, train


def _header(cmd: str, **fields) -> None:
    parts = [f"char2c {cmd}"]
    for key, value in fields.items():
        parts.append(f"{key}={value}")
    print("# " + " ".join(parts), file=sys.stderr)


def _hash_or_die(path: str) -> str:
    if not os.path.exists(path):
        raise FileNotFoundError(path)
    return file_sha256(path)[:12]


def _read_file(path: str) -> str:
    if not os.path.exists(path):
        raise FileNotFoundError(path)
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def cmd_gen_corpus(args) -> int:
    specs = corpusforge.default_problem_specs()
    samples = corpusforge.generate_corpus(specs, args.per_problem, args.seed)
    save_corpus(samples, args.out)
    if args.tests_out:
        save_tests([t for spec in specs for t in spec.tests], args.tests_out)
    _header("gen-corpus", seed=args.seed, per_problem=args.per_problem,
            samples=len(samples), corpus_sha256=file_sha256(args.out)[:12])
    return 0


def cmd_train(args) -> int:
    cfg = TrainConfig(
        hidden=args.hidden, embed=args.embed, lr=args.lr, clip_norm=args.clip,
        epochs=args.epochs, seed=args.seed, batch_accumulation=args.batch_accum,
        max_train_len=args.max_train_len, checkpoint_every=args.checkpoint_every,
        input_reversal=args.reverse_input)
    corpus_hash = _hash_or_die(args.corpus)
    _header("train", seed=args.seed, corpus_sha256=corpus_hash,
            config={k: v for k, v in sorted(vars(cfg).items())})
    corpus = load_corpus(args.corpus)
    ckpt, log_rows = train(corpus, cfg, args.out_dir)
    final = log_rows[-1][2] if log_rows else float("nan")
    print(f"trained {cfg.epochs} epochs; final mean per-char loss {final:.6f}; "
          f"checkpoint in {args.out_dir}", file=sys.stderr)
    return 0


def _load_params(path: str):
    if not os.path.exists(path):
        raise FileNotFoundError(path)
    return load_checkpoint(path)


def cmd_generate(args) -> int:
    ckpt = _load_params(args.checkpoint)
    _header("generate", seed=args.seed, mode=args.mode, temperature=args.temperature,
            checkpoint_sha256=file_sha256(args.checkpoint)[:12])
    params = ckpt.params
    max_len = args.max_len if args.max_len else max(2 * ckpt.max_code_len, 16)
    state = encode_comment(params, encode_text(params.vocab, args.prompt))
    rng = SplitMix64(args.seed)
    results = []
    for _ in range(args.n):
        if args.mode == "greedy":
            results.append(generate(params, state, "greedy", max_len=max_len))
        else:
            results.append(generate(params, state, "sample", temperature=args.temperature,
                                    max_len=max_len, rng=rng))
    if args.n == 1:
        print(results[0].text)
    else:
        for r in results:
            print(json.dumps({"text": r.text, "terminated": r.terminated}, sort_keys=True))
    return 0


def cmd_check(args) -> int:
    text = _read_file(args.file)
    _header("check", file_sha256=file_sha256(args.file)[:12])
    report = minic.check_syntax(text)
    if report.valid:
        print("valid")
        return 0
    print(f"invalid: {report.message} (byte offset {report.error_offset})")
    return 1


def cmd_run(args) -> int:
    text = _read_file(args.file)
    stdin_text = _read_file(args.stdin)
    _header("run", file_sha256=file_sha256(args.file)[:12], step_limit=args.step_limit)
    try:
        outcome = minic.run_source(text, stdin_text, args.step_limit)
    except minic.MiniCError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    sys.stdout.write(outcome.stdout)
    print(f"status={outcome.status} steps={outcome.steps}"
          + (f" error={outcome.error!r}" if outcome.error else ""), file=sys.stderr)
    return 0 if outcome.status == "ok" else 1


def cmd_nn(args) -> int:
    query = _read_file(args.query)
    corpus_hash = _hash_or_die(args.corpus)
    _header("nn", metric=args.metric, corpus_sha256=corpus_hash)
    corpus = load_corpus(args.corpus)
    try:
        index, score = evalkit.nearest_neighbor(query, corpus, args.metric)
    except minic.MiniCError as e:
        print(f"error: query does not lex: {e}", file=sys.stderr)
        return 1
    print(json.dumps({"index": index, "score": score,
                      "problem_id": corpus[index].problem_id,
                      "code": corpus[index].code}, sort_keys=True))
    return 0


def cmd_eval(args) -> int:
    ckpt = _load_params(args.checkpoint)
    corpus_hash = _hash_or_die(args.corpus)
    tests_hash = _hash_or_die(args.tests)
    _header("eval", seed=args.seed, samples=args.samples, temperature=args.temperature,
            corpus_sha256=corpus_hash, tests_sha256=tests_hash,
            checkpoint_sha256=file_sha256(args.checkpoint)[:12])
    corpus = load_corpus(args.corpus)
    tests = load_tests(args.tests)
    prompts = list(dict.fromkeys((s.problem_id, s.comment) for s in corpus))
    max_len = args.max_len if args.max_len else max(2 * ckpt.max_code_len, 16)
    report = evalkit.evaluate_model(
        ckpt.params, corpus, tests, prompts, n_samples=args.samples,
        temperature=args.temperature, max_len=max_len, seed=args.seed)
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(report.to_dict(), fh, sort_keys=True, indent=2)
        fh.write("\n")
    print(json.dumps(report.global_stats, sort_keys=True), file=sys.stderr)
    return 0


def cmd_gradcheck(args) -> int:
    seeds = list(range(args.seed, args.seed + args.runs))
    _header("gradcheck", seed=args.seed, runs=args.runs)
    results = fdcheck.run_suites(seeds)
    ok = True
    thresholds = {"cross_entropy": fdcheck.CE_THRESHOLD,
                  "lstm_sequence": fdcheck.MODEL_THRESHOLD,
                  "model": fdcheck.MODEL_THRESHOLD}
    for name, err in results.items():
        passed = err < thresholds[name]
        ok = ok and passed
        print(f"{name}: max relative error {err:.3e} "
              f"({'ok' if passed else 'FAIL'}, threshold {thresholds[name]:.0e})")
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="char2c",
        description="Character-level comment-to-C generation: corpus, training, evaluation.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-corpus", help="generate the synthetic training corpus")
    p.add_argument("--out", required=True, help="corpus JSONL output path")
    p.add_argument("--per-problem", type=int, default=500)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--tests-out", help="also write the functional tests JSONL here")
    p.set_defaults(func=cmd_gen_corpus)

    p = sub.add_parser("train", help="train a model on a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--hidden", type=int, default=128)
    p.add_argument("--embed", type=int, default=32)
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--clip", type=float, default=5.0)
    p.add_argument("--epochs", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--reverse-input", action="store_true")
    p.add_argument("--batch-accum", type=int, default=1)
    p.add_argument("--max-train-len", type=int, default=700)
    p.add_argument("--checkpoint-every", type=int, default=0)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("generate", help="generate code from a natural-language prompt")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--prompt", required=True)
    p.add_argument("--mode", choices=["greedy", "sample"], default="greedy")
    p.add_argument("--temperature", type=float, default=1.0)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--max-len", type=int, default=0, help="0 = 2x the longest training program")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("check", help="syntax-check a mini-C file")
    p.add_argument("--file", required=True)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("run", help="run a mini-C file under the interpreter")
    p.add_argument("--file", required=True)
    p.add_argument("--stdin", required=True, help="file providing the program's stdin")
    p.add_argument("--step-limit", type=int, default=1_000_000)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("nn", help="nearest training program under a similarity metric")
    p.add_argument("--query", required=True, help="file holding the query program")
    p.add_argument("--corpus", required=True)
    p.add_argument("--metric", choices=["chars", "structure", "identifiers"], required=True)
    p.set_defaults(func=cmd_nn)

    p = sub.add_parser("eval", help="full generation analysis against corpus and tests")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--tests", required=True)
    p.add_argument("--out", required=True, help="report JSON output path")
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--temperature", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-len", type=int, default=0)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("gradcheck", help="finite-difference check of all gradient paths")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--runs", type=int, default=3, help="seeds per suite")
    p.set_defaults(func=cmd_gradcheck)

    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2
    try:
        return args.func(args)
    except FileNotFoundError as e:
        print(f"error: file not found: {e.args[0] if e.args else e}", file=sys.stderr)
        return 1
    except (ValueError, UnknownCharacterError, CheckpointError,
            corpusforge.ForgeError, minic.MiniCError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
