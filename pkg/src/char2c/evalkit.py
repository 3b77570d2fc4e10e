"""Post-hoc analysis of generated code: character-fix distance, memorization
detection, and nearest-neighbor search by raw characters, by token structure,
and by identifier names.

The structure metric compares 4-gram multisets of token kinds (identifiers
and literals abstracted away), so renaming every variable leaves it fixed;
the identifier metric compares the multisets of variable names themselves.
"""

import statistics
from collections import Counter
from dataclasses import dataclass

import numpy as np

from . import minic
from .corpus import SeqSample, TestCase, tests_by_problem
from .prng import SplitMix64
from .seq2seq import ModelParams, encode_comment, generate
from .textcodec import encode_text

NGRAM = 4
_ABSTRACT_KINDS = {"id": "ID", "int": "INT", "str": "STR"}


def edit_distance(a: str, b: str) -> int:
    """Levenshtein distance with unit costs."""
    if a == b:
        return 0
    la, lb = len(a), len(b)
    if la == 0:
        return lb
    if lb == 0:
        return la
    if la < lb:  # iterate over the longer string, vectorize over the shorter
        a, b = b, a
        la, lb = lb, la
    bcodes = np.frombuffer(b.encode("utf-32-le"), dtype=np.uint32)
    offsets = np.arange(lb + 1, dtype=np.int64)
    prev = offsets.copy()
    cand = np.empty(lb + 1, dtype=np.int64)
    for i, ca in enumerate(a, start=1):
        cost = (bcodes != ord(ca)).astype(np.int64)
        cand[0] = i
        np.minimum(prev[1:] + 1, prev[:-1] + cost, out=cand[1:])
        # resolve the left-to-right chain d[j] = min(cand[j], d[j-1] + 1)
        # via a prefix min of cand[j] - j
        cand -= offsets
        np.minimum.accumulate(cand, out=cand)
        cand += offsets
        prev, cand = cand, prev
    return int(prev[-1])


def _token_kinds(code: str) -> list[str]:
    """Token-kind sequence with identifiers/literals abstracted to their kinds."""
    toks = minic.lex(code)
    return [_ABSTRACT_KINDS.get(t.kind, t.lexeme) for t in toks if t.kind != "eof"]


def structure_ngrams(code: str) -> Counter:
    kinds = _token_kinds(code)
    return Counter(tuple(kinds[i:i + NGRAM]) for i in range(len(kinds) - NGRAM + 1))


def identifier_multiset(code: str) -> Counter:
    """Multiset of identifier names; main/scanf/printf carry no signal and are dropped."""
    skip = {"main"} | minic.BUILTINS
    toks = minic.lex(code)
    return Counter(t.lexeme for t in toks if t.kind == "id" and t.lexeme not in skip)


def multiset_jaccard(a: Counter, b: Counter) -> float:
    if not a and not b:
        return 1.0
    inter = sum((a & b).values())
    union = sum((a | b).values())
    return inter / union if union else 0.0


def nearest_neighbor(query: str, corpus: list[SeqSample], metric: str) -> tuple[int, float]:
    """Exhaustive scan for the most similar training program.

    chars: minimal edit distance (score = distance, lower is better).
    structure / identifiers: maximal multiset Jaccard (score = similarity).
    Ties go to the lowest corpus index.
    """
    if not corpus:
        raise ValueError("nearest_neighbor needs a non-empty corpus")
    if metric == "chars":
        best_k, best = 0, edit_distance(query, corpus[0].code)
        for k in range(1, len(corpus)):
            d = edit_distance(query, corpus[k].code)
            if d < best:
                best_k, best = k, d
        return best_k, float(best)
    if metric == "structure":
        fingerprint = structure_ngrams(query)  # raises MiniCError on unlexable input
        scores = (multiset_jaccard(fingerprint, structure_ngrams(s.code)) for s in corpus)
    elif metric == "identifiers":
        fingerprint = identifier_multiset(query)
        scores = (multiset_jaccard(fingerprint, identifier_multiset(s.code)) for s in corpus)
    else:
        raise ValueError(f"unknown metric {metric!r}")
    best_k, best = 0, -1.0
    for k, sim in enumerate(scores):
        if sim > best:
            best_k, best = k, sim
    return best_k, best


# ---------------------------------------------------------------------------
# Generation analysis and the evaluation report
# ---------------------------------------------------------------------------

@dataclass
class GenerationRecord:
    text: str
    terminated: bool
    parses: bool
    functional: bool
    memorized: bool            # byte-equal to some training sample's code
    nearest_index: int
    charfix: int               # edit distance to the nearest training program
    norm_charfix: float        # charfix / max(len(text), 1)


@dataclass
class PromptReport:
    problem_id: str
    comment: str
    samples_drawn: int
    parse_rate: float
    functional_pass_rate: float
    exact_memorization_rate: float
    median_norm_charfix: float
    nearest: dict               # metric -> {"index": int, "score": float} or None
    generations: list           # first few generation texts


@dataclass
class EvalReport:
    prompts: list[PromptReport]
    global_stats: dict

    def to_dict(self) -> dict:
        return {
            "global": self.global_stats,
            "prompts": [{
                "problem_id": p.problem_id,
                "comment": p.comment,
                "samples_drawn": p.samples_drawn,
                "parse_rate": p.parse_rate,
                "functional_pass_rate": p.functional_pass_rate,
                "exact_memorization_rate": p.exact_memorization_rate,
                "median_norm_charfix": p.median_norm_charfix,
                "nearest": p.nearest,
                "generations": p.generations,
            } for p in self.prompts],
        }


def analyze_generation(text: str, problem_id: str, corpus: list[SeqSample],
                       tests: list[TestCase], terminated: bool = True,
                       step_limit: int = 200_000) -> GenerationRecord:
    """Score one generated program against the corpus and the problem's tests."""
    report = minic.check_syntax(text)
    functional = False
    if report.valid and tests:
        try:
            ast = minic.parse_text(text)
            functional = all(
                (out := minic.run_program(ast, t.stdin, step_limit)).status == "ok"
                and out.stdout == t.stdout
                for t in tests)
        except minic.MiniCError:
            functional = False
    memorized = any(text == s.code for s in corpus)
    nearest_index, charfix = nearest_neighbor(text, corpus, "chars")
    return GenerationRecord(
        text=text,
        terminated=terminated,
        parses=report.valid,
        functional=functional,
        memorized=memorized,
        nearest_index=nearest_index,
        charfix=int(charfix),
        norm_charfix=charfix / max(len(text), 1),
    )


def summarize_records(records: list[GenerationRecord]) -> dict:
    n = len(records)
    return {
        "samples": n,
        "parse_rate": sum(r.parses for r in records) / n,
        "functional_pass_rate": sum(r.functional for r in records) / n,
        "exact_memorization_rate": sum(r.memorized for r in records) / n,
        "median_norm_charfix": float(statistics.median(r.norm_charfix for r in records)),
    }


def _nearest_exhibits(query: str, corpus: list[SeqSample]) -> dict:
    exhibits = {}
    k, d = nearest_neighbor(query, corpus, "chars")
    exhibits["chars"] = {"index": k, "score": float(d)}
    for metric in ("structure", "identifiers"):
        try:
            k, sim = nearest_neighbor(query, corpus, metric)
            exhibits[metric] = {"index": k, "score": sim}
        except minic.MiniCError:
            exhibits[metric] = None  # query does not lex
    return exhibits


def evaluate_model(params: ModelParams, corpus: list[SeqSample], tests: list[TestCase],
                   prompts: list[tuple[str, str]], n_samples: int = 20,
                   temperature: float = 0.5, max_len: int = 1000,
                   seed: int = 0, keep_examples: int = 3) -> EvalReport:
    """Per prompt: one greedy plus (n_samples - 1) sampled generations, each
    syntax-checked, judged on the problem's tests, and measured against the
    training set. Deterministic given the seed: prompt k samples from
    splitmix64(seed XOR k)."""
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    by_problem = tests_by_problem(tests)
    prompt_reports = []
    all_records = []
    for k, (problem_id, comment) in enumerate(prompts):
        comment_ids = encode_text(params.vocab, comment)
        state = encode_comment(params, comment_ids)
        rng = SplitMix64(seed ^ k)
        gens = [generate(params, state, "greedy", max_len=max_len)]
        for _ in range(n_samples - 1):
            gens.append(generate(params, state, "sample", temperature=temperature,
                                 max_len=max_len, rng=rng))
        records = [analyze_generation(g.text, problem_id, corpus,
                                      by_problem.get(problem_id, []), g.terminated)
                   for g in gens]
        all_records.extend(records)
        stats = summarize_records(records)
        prompt_reports.append(PromptReport(
            problem_id=problem_id,
            comment=comment,
            samples_drawn=stats["samples"],
            parse_rate=stats["parse_rate"],
            functional_pass_rate=stats["functional_pass_rate"],
            exact_memorization_rate=stats["exact_memorization_rate"],
            median_norm_charfix=stats["median_norm_charfix"],
            nearest=_nearest_exhibits(gens[0].text, corpus),
            generations=[g.text for g in gens[:keep_examples]],
        ))
    return EvalReport(prompt_reports, summarize_records(all_records))
