import csv
import io
import json
import math
import threading
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from anytime_cdg.constraints import (
    HEURISTIC,
    PREFERENCE,
    ConstraintDef,
    normalize,
    parse_grammar,
    serialize_grammar,
)
from anytime_cdg.errors import NoAmbiguousNode, NoApplicableConstraint, QualityDomainError
from anytime_cdg.model import (
    AMBIGUOUS,
    INCONSISTENT,
    UNIQUE,
    ConstraintNetwork,
    DeletionRecord,
    ModificationValue as MV,
    TimeInterval,
    WordNode,
    extract_solution,
    nodes_from_tokens,
)
from anytime_cdg.propagation import license_domains, oracle_enumerate
from anytime_cdg.scheduler import (
    Budget,
    QualitySample,
    QualityTrace,
    ScoreModels,
    ambiguity_measure,
    apply_preference,
    continue_run,
    mean_reliability,
    prune_low_scores,
    quality,
    run_contract,
    run_interruptible,
    score_value,
    select_constraint,
    select_node,
)
from oracles import a_direct, q_direct
from randgen import random_grammar, random_sentence, rng_for

Q_HARD_FIXPOINT = 0.23023721635  # q(a=2/3, r=1)
Q_FORCED = 0.94813663460         # q(a=0, r=29/30)


def rec(rel, step=1):
    return DeletionRecord(step, "1", MV("2", "X"), "c", rel)


# ---- measures ---------------------------------------------------------------------

def test_frozen_values_match_direct_formula():
    assert q_direct(math.log(4) / math.log(8), 1.0) == pytest.approx(Q_HARD_FIXPOINT, abs=1e-10)
    assert q_direct(0.0, 29 / 30) == pytest.approx(Q_FORCED, abs=1e-10)


def test_ambiguity_measure(demo, demo_nodes):
    net = license_domains(demo, demo_nodes)
    assert ambiguity_measure(net) == 1.0
    net.delete("3", MV("1", "DET"), "det-precedes", 1.0)
    assert ambiguity_measure(net) == pytest.approx(2 / 3, abs=1e-12)
    assert ambiguity_measure(net) == pytest.approx(a_direct([2, 1, 1, 2], [2, 1, 2, 2]), abs=1e-12)
    net.delete("4", MV("2", "SUBJ"), "x", 1.0)
    net.delete("1", MV("2", "OBJ"), "x", 1.0)
    assert ambiguity_measure(net) == 0.0


def test_ambiguity_without_initial_ambiguity(demo):
    net = license_domains(demo, nodes_from_tokens(demo, ["reads"]))
    assert ambiguity_measure(net) == 0.0


def test_mean_reliability():
    assert mean_reliability([]) == 1.0
    assert mean_reliability([rec(1.0), rec(0.9), rec(1.0)]) == pytest.approx(0.96667, abs=1e-5)
    assert mean_reliability([rec(0.5)]) == 0.5


def test_quality_values():
    assert quality(1.0, 1.0) == 0.0
    assert quality(0.0, 1.0) == 1.0
    assert quality(0.5, 0.5) == pytest.approx((math.exp(0.25) - 1) / (math.e - 1), abs=1e-12)
    assert quality(0.5, 0.5) == pytest.approx(0.16529618, abs=1e-8)


@pytest.mark.parametrize("a, r", [(-0.1, 0.5), (1.1, 0.5), (0.5, 0.0), (0.5, 1.2), (0.5, float("nan"))])
def test_quality_domain(a, r):
    with pytest.raises(QualityDomainError) as err:
        quality(a, r)
    assert err.value.code == "DOMAIN_ERROR"


@given(st.floats(0, 1), st.floats(1e-9, 1))
def test_quality_bounds(a, r):
    q = quality(a, r)
    assert 0.0 <= q <= 1.0
    assert q == pytest.approx(q_direct(a, r), abs=1e-12)
    assert quality(1.0, r) == 0.0


@pytest.mark.parametrize("a", [i / 10 for i in range(10)])
@pytest.mark.parametrize("r", [i / 10 for i in range(1, 10)])
def test_quality_partial_derivatives(a, r):
    h = 1e-6
    dr = (quality(a, r + h) - quality(a, r - h)) / (2 * h)
    da = (quality(a + h, r) - quality(a - h, r)) / (2 * h) if a > 0 else (quality(a + h, r) - quality(a, r)) / h
    e = math.exp(r * (1 - a)) / (math.e - 1)
    assert dr > 0 and da < 0
    assert dr == pytest.approx((1 - a) * e, rel=1e-4)
    assert da == pytest.approx(-r * e, rel=1e-4)


# ---- selection ----------------------------------------------------------------------

def test_select_node_on_initial_network(demo, demo_nodes):
    assert select_node(license_domains(demo, demo_nodes)) == "1"


def _sized_network(sizes):
    nodes = [WordNode(str(i), f"w{i}", "n", position=i) for i in range(1, len(sizes) + 1)]
    net = ConstraintNetwork(nodes)
    for i, k in enumerate(sizes, start=1):
        heads = [str(j) for j in range(1, len(sizes) + 1) if j != i][:k - 1]
        net.add_values(str(i), [MV(None, "ROOT")] + [MV(h, "L") for h in heads])
    return net


def test_select_node_unique_max():
    assert select_node(_sized_network([3, 2, 1])) == "1"
    assert select_node(_sized_network([1, 2, 3])) == "3"


def test_select_node_singletons():
    with pytest.raises(NoAmbiguousNode):
        select_node(_sized_network([1, 1, 1]))


def test_select_constraint_low_pressure(demo, demo_nodes):
    net = license_domains(demo, demo_nodes)
    c = select_constraint(demo, net, 0.1)
    assert c.id == "det-precedes" and c.kind == "HARD"


def test_select_constraint_high_pressure_prefers_reliable_heuristic(demo, demo_nodes):
    g = parse_grammar(serialize_grammar(demo))
    weak = ConstraintDef("weak", 1, HEURISTIC, g.constraint("subject-first").formula, 0.7, 2)
    g.constraints = g.constraints + (weak,)
    net = license_domains(g, demo_nodes)
    c = select_constraint(g, net, 0.9, hard_fixpoint=True)
    assert c.id == "subject-first" and c.reliability == 0.9


def test_select_constraint_nothing_left(demo, demo_nodes):
    net = license_domains(demo, demo_nodes)
    with pytest.raises(NoApplicableConstraint):
        select_constraint(demo, net, 0.1, hard_fixpoint=True)
    with pytest.raises(NoApplicableConstraint):
        select_constraint(demo, net, 0.9, hard_fixpoint=True, exclude={"subject-first"})


def test_select_constraint_preferences_need_higher_pressure(demo, demo_nodes):
    g = parse_grammar(serialize_grammar(demo))
    g.constraints = tuple(c for c in g.constraints if c.kind != HEURISTIC) + (_minimal_attachment(),)
    net = license_domains(g, demo_nodes)
    with pytest.raises(NoApplicableConstraint):
        select_constraint(g, net, 0.6, hard_fixpoint=True)
    assert select_constraint(g, net, 0.85, hard_fixpoint=True).kind == PREFERENCE


# ---- preferences and scores ---------------------------------------------------------

def _minimal_attachment():
    f = ["=>", ["and", ["<", ["pos", "y"], ["pos", "z"]], ["<", ["pos", "z"], ["pos", "x"]]], ["delete", "y"]]
    return ConstraintDef("minimal-attachment", 1, PREFERENCE, normalize(f), 0.7, 3)


def _line(n, domain_of):
    nodes = [WordNode(str(i), f"w{i}", "n", position=i) for i in range(1, n + 1)]
    net = ConstraintNetwork(nodes)
    for nid, heads in domain_of.items():
        net.add_values(nid, [MV(h, "L") for h in heads])
    return net


def test_minimal_attachment_drops_distant_head():
    net = _line(4, {"4": ["1", "3"]})
    recs = apply_preference(net, _minimal_attachment())
    assert [(r.node, r.value, r.reliability) for r in recs] == [("4", MV("1", "L"), 0.7)]
    assert net.domain("4") == (MV("3", "L"),)


def test_preference_needs_two_heads():
    net = _line(4, {"4": ["3"]})
    assert apply_preference(net, _minimal_attachment()) == []


def test_preference_needs_heads_on_the_left():
    net = _line(4, {"1": ["2", "4"]})
    assert apply_preference(net, _minimal_attachment()) == []


def test_score_value():
    node = WordNode("1", "dog", "n", position=1)
    assert score_value(MV(None, "ROOT"), node) == 1.0
    lat = WordNode("a", "dog", "n", interval=TimeInterval(0, 10), confidence=0.8)
    head = WordNode("b", "runs", "v", interval=TimeInterval(10, 20))
    net = ConstraintNetwork([lat, head])
    models = ScoreModels(dominance={("v", "SUBJ", "n"): 0.5})
    assert score_value(MV("b", "SUBJ"), lat, models, net) == pytest.approx(0.4 ** (1 / 3), abs=1e-12)
    assert score_value(MV("b", "SUBJ"), lat, models, net) == pytest.approx(0.7368, abs=1e-4)
    zero = WordNode("z", "dog", "n", position=1, confidence=0.0)
    assert score_value(MV(None, "ROOT"), zero) == 0.0


def _scored_line():
    net = _line(3, {"1": ["2", "3"]})
    models = ScoreModels(bigram={("w2", "w1"): 0.9 ** 3, ("w3", "w1"): 0.1 ** 3})
    return net, models


def test_prune_zero_pressure():
    net, models = _scored_line()
    assert prune_low_scores(net, 0.0, models, 0.5) == []


def test_prune_drops_low_score():
    net, models = _scored_line()
    recs = prune_low_scores(net, 0.5, models, 0.5)
    assert [(r.node, r.value) for r in recs] == [("1", MV("3", "L"))]
    assert recs[0].reliability == pytest.approx(0.1)


def test_prune_keeps_top_value():
    net = _line(2, {"1": ["2"]})
    models = ScoreModels(bigram={("w2", "w1"): 0.01 ** 3})
    assert prune_low_scores(net, 1.0, models, 0.5) == []
    assert net.size("1") == 1


# ---- runs ----------------------------------------------------------------------------

def test_interrupt_before_first_step(demo, demo_nodes):
    flag = threading.Event()
    flag.set()
    res = run_interruptible(demo, demo_nodes, flag)
    assert res.stop_reason == "interrupt"
    assert res.network.step_counter == 0
    assert res.analysis.resolved == {"2": MV(None, "ROOT")}
    assert len(res.analysis.unresolved) == 3
    assert res.q == 0.0 and res.a == 1.0


def test_interrupt_after_hard_fixpoint(demo, demo_nodes):
    res = run_interruptible(demo, demo_nodes, stop_at_step=1, clock="steps")
    assert res.status == AMBIGUOUS
    assert len(oracle_enumerate(demo, demo_nodes)) == 2
    assert math.prod(len(d) for d in res.analysis.unresolved.values()) == 4
    assert res.q == pytest.approx(Q_HARD_FIXPOINT, abs=1e-9)


def test_uninterrupted_run_reaches_fixpoint(demo, demo_nodes):
    res = run_interruptible(demo, demo_nodes)
    assert res.stop_reason == "fixpoint"
    assert res.status == AMBIGUOUS
    assert res.r == 1.0


def test_contract_generous_budget(demo, demo_nodes):
    hard_only = run_contract(demo, demo_nodes, Budget(max_steps=1000), heuristics=False, clock="steps")
    assert hard_only.status == AMBIGUOUS and hard_only.r == 1.0
    res = run_contract(demo, demo_nodes, Budget(max_steps=1000), clock="steps")
    assert res.status == UNIQUE
    assert res.analysis.resolved == oracle_enumerate(demo, demo_nodes, include_heuristics=True)[0]
    assert res.escalations == [(1, "heuristic")]


def test_contract_forced_escalation(demo, demo_nodes):
    res = run_contract(demo, demo_nodes, Budget(max_steps=1000), force_escalation=True, clock="steps")
    assert res.status == UNIQUE
    assert sorted(res.reliabilities) == [0.9, 1.0, 1.0]
    assert res.r == pytest.approx(0.96667, abs=1e-5)
    assert res.q == pytest.approx(Q_FORCED, abs=1e-9)


def test_contract_single_step(demo, demo_nodes):
    res = run_contract(demo, demo_nodes, Budget(max_steps=1))
    assert res.network.step_counter == 1
    assert res.status == AMBIGUOUS and res.stop_reason == "steps"


def test_contract_needs_budget(demo, demo_nodes):
    with pytest.raises(ValueError):
        run_contract(demo, demo_nodes, Budget())
    with pytest.raises(ValueError):
        Budget(max_steps=0)
    with pytest.raises(ValueError):
        Budget(wall_clock=-1)


def test_continue_unique_is_unchanged(demo, demo_nodes):
    res = run_contract(demo, demo_nodes, Budget(max_steps=1000), force_escalation=True, clock="steps")
    before = (res.network.domains, len(res.trace))
    again = continue_run(res, Budget(max_steps=10))
    assert again.status == UNIQUE
    assert (again.network.domains, len(again.trace)) == before


def _delta(trace, lo, hi):
    by_step = {s.step: Fraction(s.q) for s in trace.samples}
    return by_step[hi] - by_step[lo]


@pytest.mark.parametrize("t1", [0, 1])
def test_split_run_additivity(demo, demo_nodes, t1):
    whole = run_interruptible(demo, demo_nodes, clock="steps")
    first = run_interruptible(demo, demo_nodes, stop_at_step=t1, clock="steps")
    split = continue_run(first, extra=Budget())
    assert split.network.domains == whole.network.domains
    assert split.network.deletion_log == whole.network.deletion_log
    t2 = whole.network.step_counter
    assert _delta(split.trace, 0, t1) + _delta(split.trace, t1, t2) == _delta(whole.trace, 0, t2)


def crafted_grammar(demo):
    """Demo grammar plus a hard subject-before-verb rule and a wrong heuristic."""
    g = parse_grammar(serialize_grammar(demo))
    svo = ConstraintDef("subject-before-verb", 1, "HARD", g.constraint("subject-first").formula, 1.0, 2)
    wrong = normalize(["->", ["and", ["=", ["lab", "x"], "SUBJ"], ["=", ["cat", ["mod", "x"]], "v"]],
                       [">", ["pos", "x"], ["pos", ["mod", "x"]]]])
    subject_last = ConstraintDef("subject-last", 1, HEURISTIC, wrong, 0.8, 2)
    g.constraints = g.constraints + (svo, subject_last)
    return g


def test_escalation_before_split_loses_quality(demo, demo_nodes):
    g = crafted_grammar(demo)
    unsplit = run_contract(g, demo_nodes, Budget(max_steps=1000), heuristics=False, clock="steps")
    assert unsplit.status == UNIQUE and unsplit.q == 1.0
    truth = oracle_enumerate(g, demo_nodes)
    assert len(truth) == 1
    first = run_contract(g, demo_nodes, Budget(max_steps=2), clock="steps")
    assert first.escalations == [] and first.network.step_counter == 2
    wrong = [d for d in first.network.deletion_log if d.constraint_id == "subject-last"]
    assert wrong and truth[0][wrong[0].node] == wrong[0].value
    split = continue_run(first, Budget(max_steps=1000))
    assert split.q < unsplit.q


def test_inconsistency_stops_and_reports(demo, demo_nodes):
    g = crafted_grammar(demo)
    first = run_contract(g, demo_nodes, Budget(max_steps=2), clock="steps")
    res = continue_run(first, Budget(max_steps=1000))
    assert res.status == INCONSISTENT and res.stop_reason == "inconsistent"
    assert res.analysis is None
    assert [(d.node, d.value) for d in res.offending] == [("4", MV("2", "OBJ")), ("4", MV("2", "SUBJ"))]
    assert res.network.size("4") == 0
    assert res.r == pytest.approx(0.95, abs=1e-12)
    assert res.q == pytest.approx(q_direct(0.0, 0.95), abs=1e-12)


def test_dynamic_bound_follows_pressure():
    text = json.dumps({
        "categories": ["n"], "labels": ["L", "ROOT"],
        "lexicon": {"w": ["n"]}, "params": {"distance_scale": 4},
        "constraints": [
            {"id": "one-root", "arity": 2, "kind": "HARD", "phase": 1,
             "formula": ["not", ["and", ["=", ["lab", "x"], "ROOT"], ["=", ["lab", "y"], "ROOT"]]]},
            {"id": "near", "arity": 1, "kind": "DYNAMIC", "reliability": 0.6, "phase": 2,
             "formula": ["->", ["!=", ["lab", "x"], "ROOT"],
                         ["<=", ["-", ["pos", ["mod", "x"]], ["pos", "x"]], "$n"]]},
        ],
    })
    g = parse_grammar(text)
    nodes = nodes_from_tokens(g, ["w"] * 6)
    res = run_contract(g, nodes, Budget(max_steps=1000), force_escalation=True, clock="steps")
    near = [d for d in res.network.deletion_log if d.constraint_id == "near"]
    assert near and all(d.reliability == 0.6 for d in near)
    for d in near:
        assert int(d.value.head) - int(d.node) > 1


def test_score_pruning_in_contract_runs(demo, demo_nodes):
    models = ScoreModels(dominance={("v", "SUBJ", "n"): 0.001})
    res = run_contract(demo, demo_nodes, Budget(max_steps=4), force_escalation=True,
                       scores=models, clock="steps")
    assert res.network.step_counter <= 4
    assert all(0 < d.reliability <= 1 for d in res.network.deletion_log)


# ---- traces --------------------------------------------------------------------------

def test_trace_csv_format(demo, demo_nodes):
    res = run_contract(demo, demo_nodes, Budget(max_steps=100), force_escalation=True, clock="steps")
    rows = list(csv.reader(io.StringIO(res.trace.to_csv())))
    assert rows[0] == ["step", "elapsed_ms", "a", "r", "q"]
    assert rows[1] == ["0", "0.000000", "1.000000", "1.000000", "0.000000"]
    assert rows[-1][-1] == f"{Q_FORCED:.6f}"
    assert all(len(r[4].split(".")[1]) == 6 for r in rows[1:])


def test_trace_rejects_non_increasing_steps():
    t = QualityTrace("CONTRACT")
    t.append(QualitySample(0, 0.0, 1.0, 1.0, 0.0))
    with pytest.raises(ValueError):
        t.append(QualitySample(0, 1.0, 1.0, 1.0, 0.0))


def test_samples_obey_formula(demo, demo_nodes):
    res = run_contract(demo, demo_nodes, Budget(max_steps=100), force_escalation=True)
    for s in res.trace.samples:
        assert abs(s.q - q_direct(s.a, s.r)) <= 1e-12
    elapsed = [s.elapsed for s in res.trace.samples]
    assert elapsed == sorted(elapsed)


def test_interrupt_safety_on_demo(demo, demo_nodes):
    full = run_contract(demo, demo_nodes, Budget(max_steps=100), force_escalation=True, clock="steps")
    stopped = threading.Event()
    stopped.set()
    for s in range(full.network.step_counter + 1):
        if s == 0:
            part = run_contract(demo, demo_nodes, Budget(max_steps=1), force_escalation=True,
                                clock="steps", interrupt=stopped)
        else:
            part = run_contract(demo, demo_nodes, Budget(max_steps=s), force_escalation=True, clock="steps")
        assert part.trace.samples == full.trace.samples[:s + 1]
        sol = extract_solution(part.network)
        for nid, v in sol.resolved.items():
            assert part.network.has(nid, v)


def test_contract_runs_are_reproducible(demo, demo_nodes):
    a = run_contract(demo, demo_nodes, Budget(max_steps=50), clock="steps")
    b = run_contract(demo, demo_nodes, Budget(max_steps=50), clock="steps")
    assert a.trace.samples == b.trace.samples
    assert a.network.deletion_log == b.network.deletion_log


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_hard_only_quality_never_drops(seed):
    rng = rng_for(seed)
    g = random_grammar(rng)
    nodes = nodes_from_tokens(g, random_sentence(rng, g))
    res = run_interruptible(g, nodes, clock="steps")
    qs = [s.q for s in res.trace.samples]
    assert all(s.r == 1.0 for s in res.trace.samples)
    assert qs == sorted(qs)
