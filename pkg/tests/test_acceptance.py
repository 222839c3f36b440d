"""Release gate: nine end-to-end checks, one per shipped guarantee.

Each test prints a single PASS/FAIL line (visible with ``pytest -s``)
before asserting, so a full run reads as a checklist:

  C1  canonical serialization of the reference example, byte-exact
  C2  serialize/parse round-trip and idempotence on 1,000 random graphs
  C3  Smatch self-score 1.0 and renaming invariance on 200 graphs
  C4  hill-climbing vs exhaustive optimum on 200 small pairs
  C5  derived precision/recall/F1 on a one-edge-deleted pair
  C6  and-arity flags exactly the planted violators; frame-arg checks
  C7  50,000-entry filter-and-split pipeline with exact counts
  C8  top-node frequency table reproduces planted counts
  C9  bit-identical CLI reports with 1 and 8 worker processes
"""

from __future__ import annotations

import random
import time

from amrkit import (
    AmrGraph,
    MatchConfig,
    Rule,
    Variable,
    canonicalize,
    check_and_operands,
    check_frame_args,
    default_frame_lexicon,
    entries_from_text,
    filter_corpus,
    match_exact,
    match_hillclimb,
    parse,
    score_pair,
    serialize_canonical,
    split_corpus,
    strip_wiki,
    top_node_stats,
    validate,
)
from amrkit.cli import main as cli_main
from genutil import (
    AND_ARITY_BAD,
    ILLEGAL_ARG_BAD,
    STRUCTURAL_BAD,
    WANT_GO_PRETTY,
    corpus_text,
    planted_corpus,
    random_graph,
    rename_variables,
    top_label_corpus,
)

EXPECTED_CANONICAL = (
    '( w / want-01 :ARG0 ( b / boy :mod ( c / country :name '
    '( n / name :op1 "Hungary" ) ) ) :ARG1 ( g / go-01 :ARG0 b ) )'
)


def report(criterion: int, ok: bool, detail: str) -> None:
    status = "PASS" if ok else "FAIL"
    print(f"[acceptance] C{criterion}: {status} ({detail})")


def graphs_equivalent(a: AmrGraph, b: AmrGraph) -> bool:
    if a.root != b.root or dict(a.instances) != dict(b.instances):
        return False
    for var in a.instances:
        ours = [(e.role, e.target) for e in a.outgoing(var)]
        theirs = [(e.role, e.target) for e in b.outgoing(var)]
        if ours != theirs:
            return False
    return True


def figure_graph() -> AmrGraph:
    return strip_wiki(parse(WANT_GO_PRETTY))


def figure_minus_arg1() -> AmrGraph:
    graph = figure_graph()
    kept = [
        (e.source, e.role, e.target)
        for e in graph.edges
        if not (e.source == Variable("w") and e.role == ":ARG1")
    ]
    return AmrGraph.build(graph.root, dict(graph.instances), kept)


def test_c1_reference_canonicalization():
    produced = canonicalize(WANT_GO_PRETTY)
    ok = produced == EXPECTED_CANONICAL
    report(1, ok, "pretty-printed input canonicalizes byte-exactly")
    assert produced == EXPECTED_CANONICAL


def test_c2_round_trip_and_idempotence():
    rng = random.Random(20260823)
    failures = 0
    for _ in range(1000):
        graph = random_graph(rng, max_vars=15)
        text = serialize_canonical(graph)
        back = parse(text)
        if not graphs_equivalent(graph, back) or canonicalize(text) != text:
            failures += 1
    ok = failures == 0
    report(2, ok, f"{1000 - failures}/1000 graphs round-trip, idempotent")
    assert failures == 0


def test_c3_self_score_and_renaming():
    rng = random.Random(77)
    failures = 0
    for _ in range(200):
        graph = random_graph(rng, max_vars=15)
        if score_pair(graph, graph).f1 != 1.0:
            failures += 1
            continue
        renamed = rename_variables(graph, rng)
        if score_pair(renamed, graph).f1 != 1.0:
            failures += 1
    ok = failures == 0
    report(3, ok, f"{200 - failures}/200 graphs: self F1 = 1.0, rename-invariant")
    assert failures == 0


def test_c4_hillclimb_vs_exact():
    rng = random.Random(4242)
    pairs = [(random_graph(rng, 6), random_graph(rng, 6)) for _ in range(200)]
    start = time.perf_counter()
    exceeded = 0
    attained = 0
    for index, (pred, gold) in enumerate(pairs):
        config = MatchConfig(restarts=4, seed=index)
        _, exact_count = match_exact(pred, gold, config)
        _, climb_count = match_hillclimb(pred, gold, config)
        if climb_count > exact_count:
            exceeded += 1
        if climb_count == exact_count:
            attained += 1
    elapsed = time.perf_counter() - start
    ok = exceeded == 0 and attained >= 190 and elapsed < 60.0
    report(
        4,
        ok,
        f"never above optimum: {exceeded == 0}; attained {attained}/200 "
        f"(need 190); {elapsed:.2f}s",
    )
    assert exceeded == 0
    assert attained >= 190
    assert elapsed < 60.0


def test_c5_derived_score_values():
    score = score_pair(figure_minus_arg1(), figure_graph())
    ok = (
        abs(score.precision - 1.0) <= 1e-9
        and abs(score.recall - 11 / 12) <= 1e-9
        and abs(score.f1 - 22 / 23) <= 1e-9
    )
    report(
        5,
        ok,
        f"P={score.precision:.10f} R={score.recall:.10f} F1={score.f1:.10f} "
        "vs 1, 11/12, 22/23 at 1e-9",
    )
    assert abs(score.precision - 1.0) <= 1e-9
    assert abs(score.recall - 11 / 12) <= 1e-9
    assert abs(score.f1 - 22 / 23) <= 1e-9


def test_c6_validator_rules():
    document, planted = planted_corpus(123, 1000, [(AND_ARITY_BAD, 37)])
    entries = entries_from_text(document)
    flagged = {
        entry.id
        for entry in entries
        if entry.graph is not None and check_and_operands(entry.graph)
    }
    exact_flags = flagged == planted[AND_ARITY_BAD]

    lexicon = default_frame_lexicon()
    figure_ok = validate(figure_graph(), lexicon).passed
    arg5_violations = check_frame_args(parse(ILLEGAL_ARG_BAD), lexicon)
    arg5_rejected = [v.rule for v in arg5_violations] == [Rule.ILLEGAL_ARG]

    ok = exact_flags and figure_ok and arg5_rejected
    report(
        6,
        ok,
        f"and-arity flags {len(flagged)}/{len(planted[AND_ARITY_BAD])} planted "
        f"violators exactly: {exact_flags}; reference graph accepted: {figure_ok}; "
        f":ARG5 misuse rejected: {arg5_rejected}",
    )
    assert exact_flags
    assert figure_ok
    assert arg5_rejected


def test_c7_pipeline_counts():
    document, planted = planted_corpus(
        99,
        50000,
        [(AND_ARITY_BAD, 2063), (ILLEGAL_ARG_BAD, 2063), (STRUCTURAL_BAD, 2063)],
    )
    entries = entries_from_text(document)
    assert len(entries) == 50000
    start = time.perf_counter()
    outcome = filter_corpus(entries, default_frame_lexicon(), jobs=8)
    train, test = split_corpus(outcome.kept, 3811, seed=13)
    elapsed = time.perf_counter() - start
    discarded_ids = {entry.id for entry, _ in outcome.discarded}
    planted_all = set().union(*planted.values())
    ok = (
        outcome.kept_n == 43811
        and outcome.discarded_n == 6189
        and discarded_ids == planted_all
        and len(train) == 40000
        and len(test) == 3811
        and elapsed < 60.0
    )
    report(
        7,
        ok,
        f"kept {outcome.kept_n} (want 43811), discarded {outcome.discarded_n} "
        f"(want 6189, exact set: {discarded_ids == planted_all}), "
        f"train {len(train)}/test {len(test)}, {elapsed:.2f}s",
    )
    assert outcome.kept_n == 43811
    assert outcome.discarded_n == 6189
    assert discarded_ids == planted_all
    assert (len(train), len(test)) == (40000, 3811)
    assert elapsed < 60.0


PLANTED_TOP_COUNTS = [
    ("and", 700),
    ("say-01", 300),
    ("contrast-01", 300),
    ("multi-sentence", 170),
    ("possible-01", 170),
    ("cause-01", 160),
    ("state-01", 150),
    ("have-concession", 90),
    ("think-01", 90),
    ("person", 70),
    ("have-03", 60),
    ("have-condition", 60),
    ("date-entity", 50),
    ("know-01", 50),
    ("have-degree", 40),
    ("thing", 10),  # 16th label proves the table truncates at 15
]

EXPECTED_TOP_15 = (
    ("and", 700),
    ("contrast-01", 300),
    ("say-01", 300),
    ("multi-sentence", 170),
    ("possible-01", 170),
    ("cause-01", 160),
    ("state-01", 150),
    ("have-concession", 90),
    ("think-01", 90),
    ("person", 70),
    ("have-03", 60),
    ("have-condition", 60),
    ("date-entity", 50),
    ("know-01", 50),
    ("have-degree", 40),
)


def test_c8_top_node_table():
    document = top_label_corpus(8, PLANTED_TOP_COUNTS)
    entries = entries_from_text(document)
    table = top_node_stats(entries, k=15)
    total = sum(count for _, count in PLANTED_TOP_COUNTS)
    ok = (
        table.rows == EXPECTED_TOP_15
        and len(table.rows) == 15
        and table.counted == total
        and table.skipped == 0
    )
    report(
        8,
        ok,
        f"15-row table matches planted counts exactly over {table.counted} "
        f"entries: {table.rows == EXPECTED_TOP_15}",
    )
    assert table.rows == EXPECTED_TOP_15
    assert table.counted == total
    assert table.skipped == 0


def test_c9_parallel_reports_bit_identical(tmp_path):
    rng = random.Random(2026)
    gold_records = []
    pred_records = []
    for index in range(60):
        gold = random_graph(rng, max_vars=12)
        if index % 2 == 0:
            pred = rename_variables(gold, rng)
        else:
            pred = random_graph(rng, max_vars=12)
        rid = f"p{index:02d}"
        gold_records.append((rid, serialize_canonical(gold)))
        pred_records.append((rid, serialize_canonical(pred)))
    gold_path = tmp_path / "gold.amr"
    pred_path = tmp_path / "pred.amr"
    gold_path.write_text(corpus_text(gold_records), encoding="utf-8")
    pred_path.write_text(corpus_text(pred_records), encoding="utf-8")

    score_reports = {}
    for jobs in (1, 8):
        out = tmp_path / f"score-{jobs}.tsv"
        code = cli_main(
            ["score", str(pred_path), str(gold_path), "--jobs", str(jobs), "-o", str(out)]
        )
        assert code == 0
        score_reports[jobs] = out.read_bytes()
    score_identical = score_reports[1] == score_reports[8]

    document, _ = planted_corpus(7, 300, [(AND_ARITY_BAD, 11), (STRUCTURAL_BAD, 9)])
    corpus_path = tmp_path / "mixed.amr"
    corpus_path.write_text(document, encoding="utf-8")
    validate_reports = {}
    validate_codes = set()
    for jobs in (1, 8):
        out = tmp_path / f"validate-{jobs}.tsv"
        code = cli_main(
            ["validate", str(corpus_path), "--jobs", str(jobs), "--report", str(out)]
        )
        validate_codes.add(code)
        validate_reports[jobs] = out.read_bytes()
    validate_identical = validate_reports[1] == validate_reports[8]

    ok = score_identical and validate_identical and validate_codes == {1}
    report(
        9,
        ok,
        f"score report identical across jobs: {score_identical}; "
        f"validate report identical: {validate_identical}",
    )
    assert score_identical
    assert validate_identical
    assert validate_codes == {1}
