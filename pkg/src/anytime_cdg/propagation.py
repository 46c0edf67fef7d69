"""Licensing, unary filtering, arc-consistency revision and the test oracle.

Deletions go through a :class:`StepBudget` when one is given: one step is one
logged deletion, and the budget is consulted before every deletion, so a run
stops exactly at its step limit.

Nodes that may be left out of the analysis (a lexical reading or lattice
hypothesis with a living competitor) give support to every partner value,
since the partner could simply be absent. Empty nodes are treated as absent.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass, field

from .constraints import HARD, HEURISTIC, LICENSE, eval_binary, eval_unary
from .errors import EmptyDomain, TooLarge
from .model import (
    AMBIGUOUS,
    INCONSISTENT,
    UNIQUE,
    ConstraintNetwork,
    candidate_values,
    empty_required_nodes,
    is_tree,
    network_status,
)

HEAD_PRESENCE = "head-presence"


def wall_ms():
    return time.perf_counter() * 1000.0


class StepBudget:
    """Limits on one propagation call.

    ``max_steps`` caps deletions, ``deadline`` is an absolute time on
    ``clock`` (milliseconds), ``interrupt`` is anything with ``is_set()``.
    """

    def __init__(self, max_steps=None, deadline=None, clock=wall_ms, interrupt=None):
        self.max_steps = max_steps
        self.deadline = deadline
        self.clock = clock
        self.interrupt = interrupt
        self.used = 0
        self.stop_reason = None

    def out_of_time(self):
        if self.interrupt is not None and self.interrupt.is_set():
            self.stop_reason = "interrupt"
            return True
        if self.deadline is not None and self.clock() >= self.deadline:
            self.stop_reason = "deadline"
            return True
        return False

    def allow(self):
        if self.out_of_time():
            return False
        if self.max_steps is not None and self.used >= self.max_steps:
            self.stop_reason = "steps"
            return False
        return True

    def charge(self):
        self.used += 1


def delete_value(network, node_id, value, constraint_id, reliability, budget=None):
    """Remove one value if the budget allows; returns the record or None."""
    if budget is not None:
        if not budget.allow():
            return None
        budget.charge()
    return network.delete(node_id, value, constraint_id, reliability)


# ---- licensing -------------------------------------------------------------------

def licensed_values(grammar, network, node_id, heads=None):
    """Values of ``node_id`` admitted by every phase-0 LICENSE constraint."""
    node = network.node(node_id)
    rivals = set(network.competitors(node_id))
    if heads is None:
        heads = [n.id for n in network.nodes]
    heads = [h for h in heads if h not in rivals]
    lic = [c for c in grammar.constraints if c.kind == LICENSE and c.phase == 0]
    return [
        v for v in candidate_values(network, node_id, grammar.labels, heads)
        if all(eval_unary(c, node, v, network) for c in lic)
    ]


def license_domains(grammar, nodes, strict=True):
    """Build a network whose domains hold every licensed value.

    With ``strict`` an EMPTY_DOMAIN error is raised when a node that cannot be
    left out gets no value; the error carries the network.
    """
    network = ConstraintNetwork(nodes)
    values = {n.id: licensed_values(grammar, network, n.id) for n in network.nodes}
    for nid, vals in values.items():
        network.add_values(nid, vals)
    if strict:
        empty = empty_required_nodes(network)
        if empty:
            raise EmptyDomain(f"no licensed value for {', '.join(empty)}", network=network, nodes=empty)
    return network


# ---- filtering -------------------------------------------------------------------

def apply_unary(network, c, budget=None, nodes=None):
    """Delete every value failing unary constraint ``c``; returns the records."""
    records = []
    for node in (nodes if nodes is not None else network.nodes):
        if network.is_emitted(node.id):
            continue
        for v in network.domain(node.id):
            if not eval_unary(c, node, v, network):
                rec = delete_value(network, node.id, v, c.id, c.reliability, budget)
                if rec is None:
                    return records
                records.append(rec)
    return records


def supported(network, c, x, vx, y):
    """Is there a value of ``y`` compatible with ``mod(x) = vx`` in both orientations?"""
    xn, yn = network.node(x), network.node(y)
    for vy in network.domain(y):
        if eval_binary(c, xn, vx, yn, vy, network) and eval_binary(c, yn, vy, xn, vx, network):
            return True
    return False


def partner_absent(network, y):
    return network.size(y) == 0 or network.is_optional(y)


def revise(network, x, c, y, budget=None):
    """Remove values of ``x`` without support in ``y`` under binary ``c``."""
    if x == y or network.is_emitted(x) or partner_absent(network, y):
        return []
    doomed = []
    for vx in network.domain(x):
        # one support scan per value bounds how late a deadline is noticed
        if budget is not None and budget.out_of_time():
            break
        if not supported(network, c, x, vx, y):
            doomed.append(vx)
    records = []
    for vx in doomed:
        rec = delete_value(network, x, vx, c.id, c.reliability, budget)
        if rec is None:
            break
        records.append(rec)
    return records


def head_presence(network, gone, budget=None):
    """Drop values whose head ``gone`` has left the analysis."""
    if network.size(gone) or not _absent_allowed(network, gone):
        return []
    records = []
    for node in network.nodes:
        if node.id == gone or network.is_emitted(node.id):
            continue
        for v in network.domain(node.id):
            if v.head == gone:
                rec = delete_value(network, node.id, v, HEAD_PRESENCE, 1.0, budget)
                if rec is None:
                    return records
                records.append(rec)
    return records


def _absent_allowed(network, node_id):
    return network.mode == "lattice" or network.is_optional(node_id)


def check_status(network):
    return network_status(network)


# ---- agenda propagation ----------------------------------------------------------

@dataclass
class PropagationOutcome:
    fixpoint: bool
    deletions: list = field(default_factory=list)
    reason: str = "fixpoint"


def propagate(network, constraints, budget=None, rng=None):
    """Run unary filters and binary revisions to a fixpoint (or until the budget ends).

    The agenda is FIFO over ``(constraint, node[, partner])`` tasks; a node
    losing a value re-enqueues every arc that looks at it. ``rng`` picks
    tasks at random instead, which is how order independence is tested.
    """
    ids = [n.id for n in network.nodes if not network.is_emitted(n.id)]
    binary = [c for c in constraints if c.arity == 2]
    agenda = deque()
    queued = set()

    def push(task):
        if task not in queued:
            queued.add(task)
            agenda.append(task)

    for c in constraints:
        if c.arity == 1:
            for x in ids:
                push((c, x, None))
        else:
            for x in ids:
                for y in network.nodes:
                    if y.id != x:
                        push((c, x, y.id))
    for n in network.nodes:
        if not network.size(n.id):
            push((None, n.id, None))

    deletions = []
    while agenda:
        if budget is not None and budget.out_of_time():
            return PropagationOutcome(False, deletions, budget.stop_reason)
        if rng is not None:
            i = rng.randrange(len(agenda))
            agenda.rotate(-i)
            task = agenda.popleft()
            agenda.rotate(i)
        else:
            task = agenda.popleft()
        queued.discard(task)
        c, x, y = task
        if c is None:
            recs = head_presence(network, x, budget)
        elif c.arity == 1:
            recs = apply_unary(network, c, budget, [network.node(x)])
        else:
            recs = revise(network, x, c, y, budget)
        deletions.extend(recs)
        for node_id in {r.node for r in recs}:
            _requeue(network, node_id, binary, ids, push)
        if budget is not None and budget.stop_reason is not None:
            # cut short inside the task: it still has work to do
            push(task)
            return PropagationOutcome(False, deletions, budget.stop_reason)
    return PropagationOutcome(True, deletions)


def _requeue(network, changed, binary, ids, push):
    for c in binary:
        for w in ids:
            if w != changed:
                push((c, w, changed))
    if not network.size(changed):
        push((None, changed, None))
        # rivals of an emptied node can no longer be left out
        for rival in network.competitors(changed):
            for c in binary:
                for w in ids:
                    if w != rival:
                        push((c, w, rival))


# ---- oracle ----------------------------------------------------------------------

def oracle_enumerate(grammar, nodes, include_heuristics=False, limit=10**6):
    """Every complete analysis consistent with the HARD (optionally also
    HEURISTIC) constraints, by exhaustive search over the licensed domains.

    Shares only licensing and single-constraint evaluation with the
    propagation code. Nodes with competitors may be absent, but the present
    nodes must be pairwise non-competing and no absent node may be addable.
    Returns a list of ``{node_id: value}`` dicts.
    """
    network = license_domains(grammar, nodes, strict=False)
    kinds = (HARD, HEURISTIC) if include_heuristics else (HARD,)
    unary = [c for c in grammar.constraints if c.kind in kinds and c.arity == 1]
    binary = [c for c in grammar.constraints if c.kind in kinds and c.arity == 2]
    order = [n.id for n in network.nodes]
    rivals = {nid: set(network.competitors(nid)) for nid in order}

    choices = {}
    for nid in order:
        node = network.node(nid)
        vals = [v for v in network.domain(nid) if all(eval_unary(c, node, v, network) for c in unary)]
        if rivals[nid]:
            vals.append(None)
        choices[nid] = vals

    raw = 1
    for nid in order:
        raw *= max(1, network.size(nid) + (1 if rivals[nid] else 0))
    if raw > limit:
        raise TooLarge(f"{raw} candidate assignments exceed the limit of {limit}")

    def compatible(a, va, b, vb):
        an, bn = network.node(a), network.node(b)
        return all(
            eval_binary(c, an, va, bn, vb, network) and eval_binary(c, bn, vb, an, va, network)
            for c in binary
        )

    results = []
    current = {}

    def extend(i):
        if i == len(order):
            present = {k: v for k, v in current.items() if v is not None}
            for k, v in current.items():
                if v is None and not (rivals[k] & present.keys()):
                    return
            if is_tree(present):
                results.append(dict(present))
            return
        nid = order[i]
        for v in choices[nid]:
            if v is not None:
                if any(current.get(r) is not None for r in rivals[nid] if r in current):
                    continue
                if v.head is None and any(w is not None and w.head is None for w in current.values()):
                    continue
                if _closes_cycle(current, nid, v):
                    continue
                if not all(compatible(nid, v, k, w) for k, w in current.items() if w is not None):
                    continue
            current[nid] = v
            extend(i + 1)
            del current[nid]

    extend(0)
    return results


def _closes_cycle(current, nid, value):
    seen = {nid}
    head = value.head
    while head is not None and current.get(head) is not None:
        if head in seen:
            return True
        seen.add(head)
        head = current[head].head
    return head == nid


__all__ = [
    "StepBudget", "PropagationOutcome", "license_domains", "licensed_values",
    "apply_unary", "revise", "head_presence", "propagate", "check_status",
    "oracle_enumerate", "UNIQUE", "AMBIGUOUS", "INCONSISTENT", "HEAD_PRESENCE",
]
