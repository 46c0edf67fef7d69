"""Word lattices: time-stamped hypotheses parsed as they arrive.

Hypotheses join the network one by one. Each new node gets its licensed
values, and existing nodes gain values that take it as head. Arc-consistency
deletions made on the smaller network may no longer hold, so they are put
back and re-checked. Nodes whose interval falls behind the time horizon are
emitted: competing hypotheses are settled by score, an ambiguous node keeps
its best-scored value, and the result is frozen.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .constraints import HARD
from .errors import CDGError, UnsortedEvents
from .intervals import overlap, precedes
from .model import (
    LATTICE,
    ConstraintNetwork,
    ModificationValue,
    TimeInterval,
    WordNode,
)
from .propagation import HEAD_PRESENCE, licensed_values
from .scheduler import (
    CONTRACT,
    MIN_SCORE_RELIABILITY,
    Scheduler,
    best_value,
    resolve_competition,
    score_value,
)

EMISSION = "emission"


@dataclass(frozen=True)
class StreamEvent:
    arrival: float
    hypothesis: WordNode

    def __post_init__(self):
        if self.hypothesis.interval is None:
            raise ValueError(f"hypothesis {self.hypothesis.id!r} has no time interval")
        if self.arrival < self.hypothesis.end:
            raise ValueError(f"hypothesis {self.hypothesis.id!r} arrives before it ends")


@dataclass(frozen=True)
class Horizon:
    window: float

    def __post_init__(self):
        if not self.window > 0:
            raise ValueError("horizon window must be positive")


@dataclass(frozen=True)
class Emission:
    node: str
    value: ModificationValue
    score: float
    time: float


def overlap_constraint(x, vx, y, vy, network):
    """False iff any two of ``x``, ``head(vx)``, ``y``, ``head(vy)`` overlap.

    Root values contribute no head. A node paired with itself never overlaps,
    which covers shared heads and ``y`` being the head of ``x``.
    """
    involved = [x, y]
    for v in (vx, vy):
        if v is not None and v.head is not None:
            involved.append(network.node(v.head))
    for i, a in enumerate(involved):
        for b in involved[i + 1:]:
            if overlap(a, b):
                return False
    return True


def emitted_frontier(network):
    ends = [network.node(nid).end for nid in network.emitted]
    return max(ends) if ends else None


# ---- extension ------------------------------------------------------------------------

def extend_network(network, hypothesis, grammar):
    """Add one hypothesis; returns the added ``(node_id, value)`` pairs.

    Late hypotheses (ending at or before the emitted frontier) are flagged
    and neither link to nor receive links from emitted nodes.
    """
    if network.mode not in (None, LATTICE) or hypothesis.interval is None:
        raise CDGError("incremental extension needs lattice-mode nodes")
    frontier = emitted_frontier(network)
    late = frontier is not None and hypothesis.end <= frontier
    network.add_node(hypothesis)
    nid = hypothesis.id
    if late:
        network.late.add(nid)
    heads = [
        n.id for n in network.nodes
        if n.id != nid and not (late and network.is_emitted(n.id))
    ]
    added = [(nid, v) for v in network.add_values(nid, licensed_values(grammar, network, nid, heads))]
    for other in network.nodes:
        if other.id == nid or network.is_emitted(other.id):
            continue
        vals = licensed_values(grammar, network, other.id, [nid])
        added.extend((other.id, v) for v in network.add_values(other.id, vals))
    _restore_arc_deletions(network, grammar)
    return added


def _restore_arc_deletions(network, grammar):
    """Undo binary HARD and head-presence deletions on unemitted nodes."""
    binary_hard = {c.id for c in grammar.constraints if c.kind == HARD and c.arity == 2}
    last = {}
    for d in network.deletion_log:
        last[(d.node, d.value)] = d
    for (nid, value), d in last.items():
        if network.is_emitted(nid) or network.has(nid, value):
            continue
        if d.constraint_id in binary_hard or d.constraint_id == HEAD_PRESENCE:
            network.restore(nid, value)


# ---- emission -------------------------------------------------------------------------

def emit_expired(network, now, horizon, models=None):
    """Finalize every unemitted node ending at or before ``now - window``."""
    limit = now - horizon.window
    due = sorted(
        (n for n in network.nodes if not network.is_emitted(n.id) and n.end <= limit),
        key=WordNode.sort_key,
    )
    emissions = []
    for node in due:
        nid = node.id
        if any(network.emitted.get(r) is not None for r in network.competitors(nid)):
            _drop(network, nid, models)
        elif network.size(nid):
            resolve_competition(network, nid, models)
        if not network.size(nid):
            network.emitted[nid] = None
            continue
        best, score = best_value(network, nid, models)
        for v in network.domain(nid):
            if v != best:
                s = score_value(v, node, models, network)
                network.delete(nid, v, EMISSION, max(s, MIN_SCORE_RELIABILITY))
        network.emitted[nid] = best
        emissions.append(Emission(nid, best, score, now))
    return emissions


def _drop(network, nid, models):
    node = network.node(nid)
    for v in network.domain(nid):
        s = score_value(v, node, models, network)
        network.delete(nid, v, EMISSION, max(s, MIN_SCORE_RELIABILITY))


# ---- streaming ------------------------------------------------------------------------

def simulate_stream(events, grammar, horizon, budget_per_tick, *, scores=None, heuristics=True,
                    flush=True, clock="steps"):
    """Replay ``events`` tick by tick against a virtual clock.

    At each distinct arrival time the new hypotheses are added, the scheduler
    runs in contract mode with ``budget_per_tick`` and expired nodes are
    emitted. Stall escalation is kept for the final tick, when the input is
    complete. With ``flush`` everything left is emitted at the end.
    """
    events = list(events)
    for prev, cur in zip(events, events[1:]):
        if cur.arrival < prev.arrival:
            raise UnsortedEvents(f"event {cur.hypothesis.id!r} arrives before {prev.hypothesis.id!r}")
    network = ConstraintNetwork(mode=LATTICE)
    sched = Scheduler(grammar, network, mode=CONTRACT, heuristics=heuristics, scores=scores, clock=clock)
    emissions = []
    reason = "fixpoint"
    ticks = []
    for ev in events:
        if ticks and ticks[-1][0] == ev.arrival:
            ticks[-1][1].append(ev.hypothesis)
        else:
            ticks.append((ev.arrival, [ev.hypothesis]))
    for i, (now, hyps) in enumerate(ticks):
        for h in hyps:
            extend_network(network, h, grammar)
        sched.notify_extension()
        final = flush and i == len(ticks) - 1
        reason = sched.run(budget_per_tick, escalate_on_stall=final)
        emissions.extend(_emit(sched, network, now, horizon, scores))
    if flush and ticks:
        now = max(n.end for n in network.nodes) + horizon.window
        emissions.extend(_emit(sched, network, now, horizon, scores))
    return sched.result(reason, emissions)


def _emit(sched, network, now, horizon, scores):
    before = network.step_counter
    out = emit_expired(network, now, horizon, scores)
    sched.notice(network.deletion_log[before:])
    return out


# ---- files ----------------------------------------------------------------------------

_KEYS = ("id", "form", "cat", "start_ms", "end_ms", "conf", "arrival_ms")


def parse_lattice(text):
    """Stream events from JSON lines (one hypothesis per line)."""
    events = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CDGError(f"line {lineno}: {exc.msg}") from None
        missing = [k for k in _KEYS if k not in obj]
        if missing:
            raise CDGError(f"line {lineno}: missing {', '.join(missing)}")
        node = WordNode(
            str(obj["id"]), obj["form"], obj["cat"],
            interval=TimeInterval(float(obj["start_ms"]), float(obj["end_ms"])),
            confidence=float(obj["conf"]),
        )
        events.append(StreamEvent(float(obj["arrival_ms"]), node))
    return events


def read_lattice(path):
    with open(path, encoding="utf-8") as fh:
        return parse_lattice(fh.read())


def lattice_to_jsonl(events):
    lines = []
    for ev in events:
        h = ev.hypothesis
        lines.append(json.dumps({
            "id": h.id, "form": h.form, "cat": h.category, "start_ms": _num(h.start),
            "end_ms": _num(h.end), "conf": h.confidence, "arrival_ms": _num(ev.arrival),
        }))
    return "\n".join(lines) + ("\n" if lines else "")


def _num(x):
    return int(x) if float(x).is_integer() else x


def events_from_nodes(nodes, delay=0.0):
    """Events arriving ``delay`` ms after each hypothesis ends, in arrival order."""
    evs = [StreamEvent(n.end + delay, n) for n in nodes]
    return sorted(evs, key=lambda e: (e.arrival, e.hypothesis.start, e.hypothesis.id))


__all__ = [
    "TimeInterval", "StreamEvent", "Horizon", "Emission", "EMISSION",
    "precedes", "overlap", "overlap_constraint", "emitted_frontier",
    "extend_network", "emit_expired", "simulate_stream",
    "parse_lattice", "read_lattice", "lattice_to_jsonl", "events_from_nodes",
]
