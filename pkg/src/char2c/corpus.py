"""Corpus data model and JSON Lines serialization.

A corpus is a flat list of (problem_id, comment, code) samples; functional
test cases live in a separate JSONL file keyed by problem_id.
"""

import hashlib
import json
from dataclasses import dataclass


@dataclass(frozen=True)
class SeqSample:
    problem_id: str
    comment: str
    code: str


@dataclass(frozen=True)
class TestCase:
    problem_id: str
    stdin: str
    stdout: str


def save_corpus(samples: list[SeqSample], path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for s in samples:
            fh.write(json.dumps(
                {"problem_id": s.problem_id, "comment": s.comment, "code": s.code},
                sort_keys=True) + "\n")


def load_corpus(path: str) -> list[SeqSample]:
    samples = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                samples.append(SeqSample(obj["problem_id"], obj["comment"], obj["code"]))
            except (json.JSONDecodeError, KeyError, TypeError) as e:
                raise ValueError(f"{path}:{lineno}: bad corpus record: {e}") from e
    return samples


def save_tests(tests: list[TestCase], path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for t in tests:
            fh.write(json.dumps(
                {"problem_id": t.problem_id, "stdin": t.stdin, "stdout": t.stdout},
                sort_keys=True) + "\n")


def load_tests(path: str) -> list[TestCase]:
    tests = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                tests.append(TestCase(obj["problem_id"], obj["stdin"], obj["stdout"]))
            except (json.JSONDecodeError, KeyError, TypeError) as e:
                raise ValueError(f"{path}:{lineno}: bad test record: {e}") from e
    return tests


def tests_by_problem(tests: list[TestCase]) -> dict[str, list[TestCase]]:
    out: dict[str, list[TestCase]] = {}
    for t in tests:
        out.setdefault(t.problem_id, []).append(t)
    return out


def file_sha256(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()
