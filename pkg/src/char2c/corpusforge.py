"""Synthetic corpus generator: many textually distinct, functionally identical
mini-C programs per problem, each paired with a short natural-language comment.

Variation is the product of independent axes: algorithm structure, identifier
names, loop-bound phrasing (i < n vs i <= n - 1), declaration placement,
return-type/return-statement shape, an optional #include line, and surface
style (indent width, brace placement). Every emitted sample is verified
against the problem's functional tests through the mini-C interpreter before
it leaves this module.
"""

import itertools
from dataclasses import dataclass, field, replace

from . import minic
from .corpus import SeqSample, TestCase
from .prng import SplitMix64, mix64

VERIFY_STEP_LIMIT = 200_000


class ForgeError(Exception):
    pass


# ---------------------------------------------------------------------------
# Code templates and rendering
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Style:
    indent: str
    brace_next: bool
    oneline: bool = False

BLOCK_STYLES = [Style(ind, bn) for ind in ("    ", "  ", "\t") for bn in (False, True)]
ONELINE_STYLE = Style("", False, oneline=True)


@dataclass
class Loop:
    header: str
    body: list


@dataclass
class IfChain:
    branches: list  # (condition, body) pairs; first is "if", the rest "else if"
    else_body: list | None = None


def _bound(bound: str, var: str, limit: str) -> str:
    """Ascending loop condition: i < n style or i <= n - 1 style."""
    if bound == "lt":
        return f"{var} < {limit}"
    return f"{var} <= {limit} - 1"


def _down_bound(bound: str, var: str) -> str:
    """Descending-to-zero loop condition."""
    if bound == "lt":
        return f"{var} >= 0"
    return f"{var} > -1"


def _for(decl: str, var: str, start: str, cond: str, step: str | None = None) -> str:
    head = f"int {var}" if decl == "forinit" else var
    step_txt = step if step is not None else f"{var}++"
    return f"for ({head} = {start}; {cond}; {step_txt})"


def _decl_lines(decl: str, entries: list[str]) -> list[str]:
    if decl == "split":
        return [f"int {e};" for e in entries]
    return ["int " + ", ".join(entries) + ";"] if entries else []


def _word_char(c: str) -> bool:
    return c.isalnum() or c == "_"


def _squeeze(text: str) -> str:
    """Drop whitespace except where two word characters would fuse; strings kept."""
    out: list[str] = []
    in_str = False
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if in_str:
            out.append(c)
            if c == "\\" and i + 1 < n:
                out.append(text[i + 1])
                i += 2
                continue
            if c == '"':
                in_str = False
            i += 1
            continue
        if c == '"':
            in_str = True
            out.append(c)
            i += 1
            continue
        if c in " \t\n":
            j = i
            while j < n and text[j] in " \t\n":
                j += 1
            if out and j < n and _word_char(out[-1]) and _word_char(text[j]):
                out.append(" ")
            i = j
            continue
        out.append(c)
        i += 1
    return "".join(out)


def _emit_items(items: list, lines: list[str], depth: int, style: Style) -> None:
    ind = style.indent * depth

    def open_block(header: str):
        if style.brace_next:
            lines.append(ind + header)
            lines.append(ind + "{")
        else:
            lines.append(ind + header + " {")

    def chain_block(header: str):
        if style.brace_next:
            lines.append(ind + "}")
            lines.append(ind + header)
            lines.append(ind + "{")
        else:
            lines.append(ind + "} " + header + " {")

    for item in items:
        if isinstance(item, str):
            lines.append(ind + item)
        elif isinstance(item, Loop):
            open_block(item.header)
            _emit_items(item.body, lines, depth + 1, style)
            lines.append(ind + "}")
        elif isinstance(item, IfChain):
            for bi, (cond, body) in enumerate(item.branches):
                header = f"if ({cond})" if bi == 0 else f"else if ({cond})"
                (open_block if bi == 0 else chain_block)(header)
                _emit_items(body, lines, depth + 1, style)
            if item.else_body is not None:
                chain_block("else")
                _emit_items(item.else_body, lines, depth + 1, style)
            lines.append(ind + "}")
        else:
            raise AssertionError(f"unknown template item {item!r}")


def _flatten_items(items: list) -> str:
    parts: list[str] = []
    for item in items:
        if isinstance(item, str):
            parts.append(item)
        elif isinstance(item, Loop):
            parts.append(item.header + "{" + _flatten_items(item.body) + "}")
        elif isinstance(item, IfChain):
            for bi, (cond, body) in enumerate(item.branches):
                kw = "if" if bi == 0 else "else if"
                parts.append(f"{kw} ({cond})" + "{" + _flatten_items(body) + "}")
            if item.else_body is not None:
                parts.append("else {" + _flatten_items(item.else_body) + "}")
        else:
            raise AssertionError(f"unknown template item {item!r}")
    return "".join(parts)


def render(items: list, style: Style, main_type: str, include: bool) -> str:
    """Wrap template items in main() and lay them out per style; no trailing newline."""
    prefix = "#include <stdio.h>\n" if include else ""
    if style.oneline:
        return prefix + _squeeze(f"{main_type} main()" + "{" + _flatten_items(items) + "}")
    lines: list[str] = []
    header = f"{main_type} main()"
    if style.brace_next:
        lines.append(header)
        lines.append("{")
    else:
        lines.append(header + " {")
    _emit_items(items, lines, 1, style)
    lines.append("}")
    return prefix + "\n".join(lines)


# ---------------------------------------------------------------------------
# Problem structures
# ---------------------------------------------------------------------------
# Each builder takes the chosen identifier map, the loop-bound style and the
# declaration placement, and returns template items for the body of main.
# Name slots: A array, I loop var, X read temp, P max-position, S sum,
# M min, T swap temp, M1/M2 the two maxima (one paired slot "MM").

def _read_array(ids, bound, decl) -> list[str]:
    a, i, n = ids["A"], ids["I"], ids["N"]
    return [f'scanf("%d", &{n});',
            _for(decl, i, "0", _bound(bound, i, n)) + f' scanf("%d", &{a}[{i}]);']


def _build_max2_two_pass(ids, bound, decl):
    a, i, n, p = ids["A"], ids["I"], ids["N"], ids["P"]
    m1, m2 = ids["M1"], ids["M2"]
    entries = [f"{a}[100]", n, m1, m2, p] + ([] if decl == "forinit" else [i])
    return _decl_lines(decl, entries) + _read_array(ids, bound, decl) + [
        f"{m1} = {a}[0];",
        f"{p} = 0;",
        Loop(_for(decl, i, "1", _bound(bound, i, n)), [
            IfChain([(f"{a}[{i}] > {m1}", [f"{m1} = {a}[{i}];", f"{p} = {i};"])]),
        ]),
        IfChain([(f"{p} == 0", [f"{m2} = {a}[1];"])], [f"{m2} = {a}[0];"]),
        Loop(_for(decl, i, "0", _bound(bound, i, n)), [
            f"if ({i} != {p} && {a}[{i}] > {m2}) {m2} = {a}[{i}];",
        ]),
        f'printf("%d %d\\n", {m1}, {m2});',
    ]


def _build_max2_one_pass(ids, bound, decl):
    a, i, n = ids["A"], ids["I"], ids["N"]
    m1, m2 = ids["M1"], ids["M2"]
    entries = [f"{a}[100]", n, m1, m2] + ([] if decl == "forinit" else [i])
    return _decl_lines(decl, entries) + _read_array(ids, bound, decl) + [
        IfChain([(f"{a}[1] > {a}[0]", [f"{m1} = {a}[1];", f"{m2} = {a}[0];"])],
                [f"{m1} = {a}[0];", f"{m2} = {a}[1];"]),
        Loop(_for(decl, i, "2", _bound(bound, i, n)), [
            IfChain([(f"{a}[{i}] > {m1}", [f"{m2} = {m1};", f"{m1} = {a}[{i}];"]),
                     (f"{a}[{i}] > {m2}", [f"{m2} = {a}[{i}];"])]),
        ]),
        f'printf("%d %d\\n", {m1}, {m2});',
    ]


def _build_max2_stream(ids, bound, decl):
    i, n, x = ids["I"], ids["N"], ids["X"]
    m1, m2 = ids["M1"], ids["M2"]
    entries = [n, m1, m2, x] + ([] if decl == "forinit" else [i])
    return _decl_lines(decl, entries) + [
        f'scanf("%d", &{n});',
        f'scanf("%d", &{m1});',
        f'scanf("%d", &{m2});',
        IfChain([(f"{m2} > {m1}", [f"{x} = {m1};", f"{m1} = {m2};", f"{m2} = {x};"])]),
        Loop(_for(decl, i, "2", _bound(bound, i, n)), [
            f'scanf("%d", &{x});',
            IfChain([(f"{x} > {m1}", [f"{m2} = {m1};", f"{m1} = {x};"]),
                     (f"{x} > {m2}", [f"{m2} = {x};"])]),
        ]),
        f'printf("%d %d\\n", {m1}, {m2});',
    ]


def _build_sum_stream(ids, bound, decl):
    i, n, x, s = ids["I"], ids["N"], ids["X"], ids["S"]
    entries = [n, f"{s} = 0", x] + ([] if decl == "forinit" else [i])
    return _decl_lines(decl, entries) + [
        f'scanf("%d", &{n});',
        Loop(_for(decl, i, "0", _bound(bound, i, n)), [
            f'scanf("%d", &{x});',
            f"{s} += {x};",
        ]),
        f'printf("%d\\n", {s});',
    ]


def _build_sum_array(ids, bound, decl):
    a, i, n, s = ids["A"], ids["I"], ids["N"], ids["S"]
    entries = [f"{a}[100]", n, f"{s} = 0"] + ([] if decl == "forinit" else [i])
    return _decl_lines(decl, entries) + _read_array(ids, bound, decl) + [
        Loop(_for(decl, i, "0", _bound(bound, i, n)), [
            f"{s} = {s} + {a}[{i}];",
        ]),
        f'printf("%d\\n", {s});',
    ]


def _build_min_stream(ids, bound, decl):
    i, n, x, m = ids["I"], ids["N"], ids["X"], ids["M"]
    entries = [n, m, x] + ([] if decl == "forinit" else [i])
    return _decl_lines(decl, entries) + [
        f'scanf("%d", &{n});',
        f'scanf("%d", &{m});',
        Loop(_for(decl, i, "1", _bound(bound, i, n)), [
            f'scanf("%d", &{x});',
            f"if ({x} < {m}) {m} = {x};",
        ]),
        f'printf("%d\\n", {m});',
    ]


def _build_min_array(ids, bound, decl):
    a, i, n, m = ids["A"], ids["I"], ids["N"], ids["M"]
    entries = [f"{a}[100]", n, m] + ([] if decl == "forinit" else [i])
    return _decl_lines(decl, entries) + _read_array(ids, bound, decl) + [
        f"{m} = {a}[0];",
        Loop(_for(decl, i, "1", _bound(bound, i, n)), [
            f"if ({a}[{i}] < {m}) {m} = {a}[{i}];",
        ]),
        f'printf("%d\\n", {m});',
    ]


def _build_rev_backward(ids, bound, decl):
    a, i, n = ids["A"], ids["I"], ids["N"]
    entries = [f"{a}[100]", n] + ([] if decl == "forinit" else [i])
    return _decl_lines(decl, entries) + _read_array(ids, bound, decl) + [
        Loop(_for(decl, i, f"{n} - 1", _down_bound(bound, i), f"{i}--"), [
            f'printf("%d\\n", {a}[{i}]);',
        ]),
    ]


def _build_rev_swap(ids, bound, decl):
    a, i, n, t = ids["A"], ids["I"], ids["N"], ids["T"]
    entries = [f"{a}[100]", n, t] + ([] if decl == "forinit" else [i])
    return _decl_lines(decl, entries) + _read_array(ids, bound, decl) + [
        Loop(_for(decl, i, "0", _bound(bound, i, f"{n} / 2")), [
            f"{t} = {a}[{i}];",
            f"{a}[{i}] = {a}[{n} - 1 - {i}];",
            f"{a}[{n} - 1 - {i}] = {t};",
        ]),
        Loop(_for(decl, i, "0", _bound(bound, i, n)), [
            f'printf("%d\\n", {a}[{i}]);',
        ]),
    ]


@dataclass(frozen=True)
class Structure:
    name: str
    build: callable
    slots: tuple[str, ...]  # name slots the template draws, besides N


STRUCTURES = {
    "max2": [
        Structure("two-pass", _build_max2_two_pass, ("A", "I", "MM", "P")),
        Structure("one-pass", _build_max2_one_pass, ("A", "I", "MM")),
        Structure("stream", _build_max2_stream, ("I", "X", "MM")),
    ],
    "sum": [
        Structure("stream", _build_sum_stream, ("I", "X", "S")),
        Structure("array", _build_sum_array, ("A", "I", "S")),
    ],
    "min": [
        Structure("stream", _build_min_stream, ("I", "X", "M")),
        Structure("array", _build_min_array, ("A", "I", "M")),
    ],
    "reverse": [
        Structure("backward", _build_rev_backward, ("A", "I")),
        Structure("swap", _build_rev_swap, ("A", "I", "T")),
    ],
}

DEFAULT_NAME_OPTIONS = {
    "A": ["a", "arr", "x"],
    "I": ["i", "j"],
    "X": ["x", "t"],
    "P": ["p"],
    "MM": [("max1", "max2"), ("max", "max2")],
    "S": ["s", "sum"],
    "M": ["min", "mn"],
    "T": ["t", "tmp"],
}


@dataclass(frozen=True)
class VariationAxes:
    structures: tuple[str, ...]
    bounds: tuple[str, ...] = ("lt", "le")
    decls: tuple[str, ...] = ("top", "split")
    mains: tuple[str, ...] = ("int", "void")
    includes: tuple[bool, ...] = (True, False)
    styles: tuple[Style, ...] = tuple(BLOCK_STYLES)
    names: dict = field(default_factory=lambda: dict(DEFAULT_NAME_OPTIONS))


@dataclass(frozen=True)
class ProblemSpec:
    problem_id: str
    comments: tuple[str, ...]
    tests: tuple[TestCase, ...]
    axes: VariationAxes


def default_problem_specs() -> list[ProblemSpec]:
    """The four problems of the training regime, full variation axes."""
    def case(pid, stdin, stdout):
        return TestCase(pid, stdin, stdout)

    return [
        ProblemSpec(
            "max2",
            ("find the maximum and second maximum numbers",),
            (case("max2", "5\n3 1 4 1 5\n", "5 4\n"),
             case("max2", "2\n7 7\n", "7 7\n"),
             case("max2", "6\n-3 -1 -7 -1 -9 -2\n", "-1 -1\n"),
             case("max2", "4\n10 9 10 2\n", "10 10\n")),
            VariationAxes(structures=("two-pass", "one-pass", "stream")),
        ),
        ProblemSpec(
            "sum",
            ("compute the sum of the numbers",),
            (case("sum", "4\n1 2 3 4\n", "10\n"),
             case("sum", "2\n-5 3\n", "-2\n"),
             case("sum", "3\n1000000 2000000 3000000\n", "6000000\n")),
            VariationAxes(structures=("stream", "array")),
        ),
        ProblemSpec(
            "min",
            ("find the minimum number",),
            (case("min", "5\n3 1 4 1 5\n", "1\n"),
             case("min", "2\n-2 -8\n", "-8\n"),
             case("min", "4\n9 9 9 9\n", "9\n")),
            VariationAxes(structures=("stream", "array")),
        ),
        ProblemSpec(
            "reverse",
            ("reverse and print the numbers",),
            (case("reverse", "3\n1 2 3\n", "3\n2\n1\n"),
             case("reverse", "2\n-1 5\n", "5\n-1\n"),
             case("reverse", "5\n4 8 15 16 23\n", "23\n16\n15\n8\n4\n")),
            VariationAxes(structures=("backward", "swap")),
        ),
    ]


def tiny_problem_specs() -> list[ProblemSpec]:
    """Two stream-only problems rendered one-line, for quick overfitting runs."""
    tight = {
        "I": ["i", "j", "k"],
        "X": ["x", "t"],
        "S": ["s", "r", "d"],
        "M": ["m", "w", "v"],
    }
    specs = [s for s in default_problem_specs() if s.problem_id in ("sum", "min")]
    return [
        replace(s, axes=VariationAxes(
            structures=("stream",),
            bounds=("lt", "le"),
            decls=("top",),
            mains=("void",),
            includes=(False,),
            styles=(ONELINE_STYLE,),
            names=tight,
        ))
        for s in specs
    ]


# ---------------------------------------------------------------------------
# Generation
# ---------------------------------------------------------------------------

def _structures_for(spec: ProblemSpec) -> list[Structure]:
    table = {s.name: s for s in STRUCTURES[spec.problem_id]}
    try:
        return [table[name] for name in spec.axes.structures]
    except KeyError as e:
        raise ForgeError(f"problem {spec.problem_id!r} has no structure {e.args[0]!r}") from None


def _ids_from_combo(structure: Structure, combo: tuple) -> dict | None:
    """Expand a name-option combo into the id map; None when names collide."""
    ids = {"N": "n"}
    for slot, choice in zip(structure.slots, combo):
        if slot == "MM":
            ids["M1"], ids["M2"] = choice
        else:
            ids[slot] = choice
    names = list(ids.values())
    if len(set(names)) != len(names):
        return None
    return ids


def _enumerate_variants(spec: ProblemSpec):
    """All (code, structure_name) pairs in a fixed deterministic order."""
    axes = spec.axes
    for structure in _structures_for(spec):
        name_options = [axes.names[slot] for slot in structure.slots]
        for combo in itertools.product(*name_options):
            ids = _ids_from_combo(structure, combo)
            if ids is None:
                continue
            for bound in axes.bounds:
                for decl in axes.decls:
                    items = structure.build(ids, bound, decl)
                    for main_type in axes.mains:
                        body = items + (["return 0;"] if main_type == "int" else [])
                        for include in axes.includes:
                            for style in axes.styles:
                                yield render(body, style, main_type, include), structure.name


def verify_sample(code: str, tests, step_limit: int = VERIFY_STEP_LIMIT) -> tuple[bool, str]:
    """Parse and run the code against every test; (ok, reason-when-not)."""
    try:
        ast = minic.parse_text(code)
    except minic.MiniCError as e:
        return False, f"parse: {e.message} at byte {e.offset}"
    for t in tests:
        outcome = minic.run_program(ast, t.stdin, step_limit)
        if outcome.status != "ok":
            return False, f"run ({t.stdin!r}): {outcome.status}: {outcome.error}"
        if outcome.stdout != t.stdout:
            return False, f"wrong output for {t.stdin!r}: got {outcome.stdout!r}, want {t.stdout!r}"
    return True, ""


def _first_valid_ids(structure: Structure, names: dict, loop_var_index: int = 0) -> dict | None:
    options = []
    for slot in structure.slots:
        choices = names[slot]
        options.append([choices[min(loop_var_index, len(choices) - 1)]] if slot == "I"
                       else choices)
    for combo in itertools.product(*options):
        ids = _ids_from_combo(structure, combo)
        if ids is not None:
            return ids
    return None


def _designated_heads(spec: ProblemSpec) -> list[str]:
    """Variants guaranteed into the corpus: a base, a twin differing only in
    one identifier, the i<n / i<=n-1 twin of the base, and a second structure."""
    axes = spec.axes
    structures = _structures_for(spec)
    first = (axes.bounds[0], axes.decls[0], axes.mains[0], axes.includes[0], axes.styles[0])

    def emit(structure, ids, bound, decl, main_type, include, style):
        items = structure.build(ids, bound, decl)
        body = items + (["return 0;"] if main_type == "int" else [])
        return render(body, style, main_type, include)

    heads = []
    base_ids = _first_valid_ids(structures[0], axes.names)
    if base_ids is not None:
        heads.append(emit(structures[0], base_ids, *first))
        twin_ids = _first_valid_ids(structures[0], axes.names, loop_var_index=1)
        if twin_ids is not None and twin_ids != base_ids:
            heads.append(emit(structures[0], twin_ids, *first))
        if len(axes.bounds) > 1:
            heads.append(emit(structures[0], base_ids, axes.bounds[1], *first[1:]))
    if len(structures) > 1:
        ids2 = _first_valid_ids(structures[1], axes.names)
        if ids2 is not None:
            heads.append(emit(structures[1], ids2, *first))
    return heads


def generate_corpus(specs: list[ProblemSpec], per_problem: int, seed: int) -> list[SeqSample]:
    """Exactly per_problem distinct verified samples per problem, deterministically."""
    if per_problem < 1:
        raise ValueError("per_problem must be >= 1")
    samples: list[SeqSample] = []
    for pi, spec in enumerate(specs):
        seen: set[str] = set()
        variants: list[tuple[str, str]] = []
        for code, struct_name in _enumerate_variants(spec):
            if code not in seen:
                seen.add(code)
                variants.append((code, struct_name))
        if len(variants) < per_problem:
            raise ForgeError(
                f"problem {spec.problem_id!r} can produce at most {len(variants)} distinct "
                f"samples, {per_problem} requested")
        index_of = {code: k for k, (code, _) in enumerate(variants)}
        head = list(dict.fromkeys(index_of[code] for code in _designated_heads(spec)))
        head_set = set(head)
        rest = [k for k in range(len(variants)) if k not in head_set]
        SplitMix64(seed ^ mix64(pi + 1)).shuffle(rest)
        chosen = (head + rest)[:per_problem]
        for vi, k in enumerate(chosen):
            code, _ = variants[k]
            ok, reason = verify_sample(code, spec.tests)
            if not ok:
                raise ForgeError(f"{spec.problem_id} variant failed verification ({reason}):\n{code}")
            comment = spec.comments[vi % len(spec.comments)]
            samples.append(SeqSample(spec.problem_id, comment, code))
    return samples


# ---------------------------------------------------------------------------
# Self check
# ---------------------------------------------------------------------------

@dataclass
class ProblemCheck:
    total: int = 0
    parse_ok: int = 0
    functional_ok: int = 0
    duplicates: int = 0
    failures: list = field(default_factory=list)  # (corpus index, reason)


@dataclass
class SelfCheckReport:
    per_problem: dict
    passed: bool


def corpus_self_check(corpus: list[SeqSample], specs: list[ProblemSpec]) -> SelfCheckReport:
    """Re-validate every sample: parse, pass all tests, and be distinct per problem."""
    tests_by_id = {s.problem_id: s.tests for s in specs}
    checks: dict[str, ProblemCheck] = {}
    seen_codes: dict[str, set] = {}
    for k, sample in enumerate(corpus):
        check = checks.setdefault(sample.problem_id, ProblemCheck())
        check.total += 1
        if sample.problem_id not in tests_by_id:
            check.failures.append((k, f"unknown problem_id {sample.problem_id!r}"))
            continue
        codes = seen_codes.setdefault(sample.problem_id, set())
        if sample.code in codes:
            check.duplicates += 1
            check.failures.append((k, "duplicate code within problem"))
        codes.add(sample.code)
        report = minic.check_syntax(sample.code)
        if not report.valid:
            check.failures.append((k, f"parse: {report.message} at byte {report.error_offset}"))
            continue
        check.parse_ok += 1
        ok, reason = verify_sample(sample.code, tests_by_id[sample.problem_id])
        if ok:
            check.functional_ok += 1
        else:
            check.failures.append((k, reason))
    passed = all(not c.failures for c in checks.values())
    return SelfCheckReport(checks, passed)
