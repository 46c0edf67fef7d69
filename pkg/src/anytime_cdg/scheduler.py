"""Anytime control: quality measures, node/constraint selection and the run loop.

The scheduler works on ``(constraint, node)`` tasks. A task is pending until
it has been applied to its node; a deletion at some node makes every binary
task at the other nodes pending again. Each iteration picks the most
ambiguous node that still has an eligible pending task and applies the best
ranked constraint there.

Eligibility comes in tiers. HARD constraints are always eligible. HEURISTIC
and DYNAMIC constraints join once time pressure reaches ``theta_h``,
PREFERENCE rules (plus resolution of competing hypotheses) at ``theta_p``.
When heuristics are enabled and the network is still ambiguous with nothing
left to do, the next tier is unlocked regardless of pressure.

Every deletion appends one :class:`QualitySample` to the trace.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

from .constraints import (
    DYNAMIC,
    ESCALATE_HEURISTICS,
    ESCALATE_PREFERENCES,
    HARD,
    HEURISTIC,
    PREFERENCE,
    PRUNE_MAX,
    eval_preference,
    instantiate_dynamic,
)
from .errors import (
    MalformedTree,
    NoAmbiguousNode,
    NoApplicableConstraint,
    QualityDomainError,
)
from .model import (
    AMBIGUOUS,
    INCONSISTENT,
    UNIQUE,
    empty_required_nodes,
    extract_solution,
    network_status,
)
from .propagation import (
    StepBudget,
    apply_unary,
    delete_value,
    head_presence,
    license_domains,
    revise,
    wall_ms,
)

INTERRUPTIBLE = "INTERRUPTIBLE"
CONTRACT = "CONTRACT"

COMPETITION = "competition"
SCORE_PRUNE = "score-prune"

DEFAULT_THETA_H = 0.5
DEFAULT_THETA_P = 0.8
MIN_SCORE_RELIABILITY = 1e-6

HEURISTIC_TIER = "heuristic"
PREFERENCE_TIER = "preference"


# ---- quality -----------------------------------------------------------------------

@dataclass(frozen=True)
class QualitySample:
    step: int
    elapsed: float
    a: float
    r: float
    q: float


@dataclass
class QualityTrace:
    mode: str
    samples: list = field(default_factory=list)

    def append(self, sample):
        if self.samples:
            last = self.samples[-1]
            if sample.step <= last.step:
                raise ValueError(f"trace steps must increase ({last.step} -> {sample.step})")
            if sample.elapsed < last.elapsed:
                sample = QualitySample(sample.step, last.elapsed, sample.a, sample.r, sample.q)
        self.samples.append(sample)

    @property
    def last(self):
        return self.samples[-1] if self.samples else None

    def __len__(self):
        return len(self.samples)

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["step", "elapsed_ms", "a", "r", "q"])
        for s in self.samples:
            w.writerow([s.step, f"{s.elapsed:.6f}", f"{s.a:.6f}", f"{s.r:.6f}", f"{s.q:.6f}"])
        return buf.getvalue()

    def write_csv(self, path):
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(self.to_csv())


@dataclass(frozen=True)
class Budget:
    """Contract limits: ``wall_clock`` in milliseconds and/or ``max_steps`` deletions."""

    wall_clock: Optional[float] = None
    max_steps: Optional[int] = None

    def __post_init__(self):
        if self.wall_clock is not None and not self.wall_clock > 0:
            raise ValueError("wall_clock must be positive")
        if self.max_steps is not None and not self.max_steps > 0:
            raise ValueError("max_steps must be positive")

    @property
    def empty(self):
        return self.wall_clock is None and self.max_steps is None


def ambiguity_measure(network):
    """Log of the domain-size product, normalized by its initial value.

    Empty domains count as size 1. Returns 0 when the initial product is 1.
    """
    den = math.fsum(math.log(s) for s in network.initial_domain_sizes.values() if s > 1)
    if den == 0:
        return 0.0
    num = math.fsum(math.log(network.size(n.id)) for n in network.nodes if network.size(n.id) > 1)
    return min(1.0, max(0.0, num / den))


def mean_reliability(deletion_log):
    if not deletion_log:
        return 1.0
    return math.fsum(d.reliability for d in deletion_log) / len(deletion_log)


def quality(a, r):
    """``(exp(r * (1 - a)) - 1) / (e - 1)``."""
    if not (0.0 <= a <= 1.0) or not (0.0 < r <= 1.0):
        raise QualityDomainError(f"quality needs a in [0,1] and r in (0,1], got a={a}, r={r}")
    return min(1.0, math.expm1(r * (1.0 - a)) / (math.e - 1.0))


# ---- scoring -------------------------------------------------------------------------

@dataclass
class ScoreModels:
    """Fuzzy link valuation inputs.

    ``bigram`` maps ``(head_form, form)`` and ``dominance`` maps
    ``(head_cat, label, cat)`` to weights in [0,1]; root links use ``None``
    for the head side. Missing entries count as 1.
    """

    bigram: dict = field(default_factory=dict)
    dominance: dict = field(default_factory=dict)
    use_confidence: bool = True


def score_value(value, node, models=None, network=None):
    """Geometric mean of node confidence, bigram weight and dominance prior."""
    models = models or ScoreModels()
    head = network.node(value.head) if value.head is not None and network is not None else None
    conf = node.confidence if models.use_confidence else 1.0
    bigram = models.bigram.get((head.form if head else None, node.form), 1.0)
    dom = models.dominance.get((head.category if head else None, value.label, node.category), 1.0)
    prod = conf * bigram * dom
    return prod ** (1.0 / 3.0) if prod > 0 else 0.0


def best_value(network, node_id, models=None):
    """Highest-scored value of a node (first in domain order on ties) and its score."""
    node = network.node(node_id)
    best, best_score = None, -1.0
    for v in network.domain(node_id):
        s = score_value(v, node, models, network)
        if s > best_score:
            best, best_score = v, s
    return best, best_score


def prune_low_scores(network, time_pressure, models=None, theta_max=0.5, budget=None, nodes=None):
    """Delete values scoring below ``theta_max * time_pressure``.

    The top-scored value of each node is kept, so no domain is emptied.
    Records carry the deleted value's score as reliability.
    """
    theta = theta_max * time_pressure
    records = []
    if theta <= 0:
        return records
    for node in (nodes if nodes is not None else network.nodes):
        if network.is_emitted(node.id) or network.size(node.id) < 2:
            continue
        top, _ = best_value(network, node.id, models)
        for v in network.domain(node.id):
            if v == top:
                continue
            s = score_value(v, node, models, network)
            if s < theta:
                rec = delete_value(network, node.id, v, SCORE_PRUNE, max(s, MIN_SCORE_RELIABILITY), budget)
                if rec is None:
                    return records
                records.append(rec)
    return records


def resolve_competition(network, node_id, models=None, budget=None):
    """Drop ``node_id`` or its living competitors, whichever scores lower.

    Each side is judged by its best value; ties keep the earlier node. The
    loser's values are deleted with their scores as reliabilities.
    """
    if not network.size(node_id):
        return []
    _, mine = best_value(network, node_id, models)
    me = network.node(node_id)
    records = []
    for rival in network.competitors(node_id):
        if not network.size(rival) or network.is_emitted(rival):
            continue
        _, theirs = best_value(network, rival, models)
        other = network.node(rival)
        if (theirs, _earlier(other, me)) > (mine, _earlier(me, other)):
            loser = node_id
        else:
            loser = rival
        node = network.node(loser)
        for v in network.domain(loser):
            s = score_value(v, node, models, network)
            rec = delete_value(network, loser, v, COMPETITION, max(s, MIN_SCORE_RELIABILITY), budget)
            if rec is None:
                return records
            records.append(rec)
        if loser == node_id:
            break
    return records


def _earlier(a, b):
    return a.sort_key() < b.sort_key()


# ---- preferences ---------------------------------------------------------------------

def apply_preference(network, rule, budget=None, nodes=None):
    """Delete the less preferred heads of each node under a PREFERENCE rule.

    Every ordered pair of distinct candidate heads ``(y, z)`` is tested on the
    domain as it stands before any deletion; the rule's target head loses all
    its values.
    """
    if rule.kind != PREFERENCE:
        raise ValueError(f"{rule.id} is not a PREFERENCE rule")
    records = []
    for node in (nodes if nodes is not None else network.nodes):
        if network.is_emitted(node.id):
            continue
        heads = list(dict.fromkeys(v.head for v in network.domain(node.id) if v.head is not None))
        doomed = set()
        for y in heads:
            for z in heads:
                if y == z:
                    continue
                yn, zn = network.node(y), network.node(z)
                if eval_preference(rule, node, yn, zn):
                    doomed.add(y if rule.target == "y" else z)
        for v in network.domain(node.id):
            if v.head in doomed:
                rec = delete_value(network, node.id, v, rule.id, rule.reliability, budget)
                if rec is None:
                    return records
                records.append(rec)
    return records


# ---- selection -----------------------------------------------------------------------

def _node_key(network, node_id):
    return (-network.size(node_id), network.node(node_id).sort_key())


def select_node(network, candidates=None):
    """Most ambiguous node: largest domain, then earliest position or start, then id."""
    if candidates is None:
        if network_status(network) != AMBIGUOUS:
            raise NoAmbiguousNode("network is not ambiguous")
        candidates = [
            n.id for n in network.nodes
            if not network.is_emitted(n.id)
            and (network.size(n.id) > 1 or (network.size(n.id) == 1 and network.is_optional(n.id)))
        ]
    candidates = list(candidates)
    if not candidates:
        raise NoAmbiguousNode("no ambiguous node")
    return min(candidates, key=lambda nid: _node_key(network, nid))


def thresholds_for(grammar, force=False):
    if force:
        return 0.0, 0.0
    params = grammar.heuristic_params
    return (
        float(params.get(ESCALATE_HEURISTICS, DEFAULT_THETA_H)),
        float(params.get(ESCALATE_PREFERENCES, DEFAULT_THETA_P)),
    )


def _rank_key(c, index, power, relaxed):
    p = power.get(c.id, 1.0)
    if relaxed:
        return (-(c.reliability * p), -c.reliability, c.phase, index)
    return (c.phase, -p, index)


def select_constraint(grammar, network, pressure=0.0, *, thresholds=None, hard_fixpoint=False,
                      power=None, exclude=()):
    """Best eligible constraint at time pressure ``pressure`` (0..1).

    Below ``theta_h`` only HARD constraints qualify, ordered by phase,
    restrictive power, then file order. From ``theta_h`` on HEURISTIC and
    DYNAMIC constraints join and the order becomes reliability times power;
    PREFERENCE rules join at ``theta_p``. DYNAMIC constraints are returned
    instantiated for the remaining time ``1 - pressure``.
    """
    theta_h, theta_p = thresholds if thresholds is not None else thresholds_for(grammar)
    power = power or {}
    relaxed = pressure >= theta_h
    kinds = set() if hard_fixpoint else {HARD}
    if relaxed:
        kinds |= {HEURISTIC, DYNAMIC}
    if pressure >= theta_p:
        kinds.add(PREFERENCE)
    eligible = [
        (c, i) for i, c in enumerate(grammar.constraints)
        if c.kind in kinds and c.id not in exclude
    ]
    if not eligible:
        raise NoApplicableConstraint(f"no constraint applicable at pressure {pressure:.3f}")
    c, _ = min(eligible, key=lambda ci: _rank_key(ci[0], ci[1], power, relaxed))
    if c.kind == DYNAMIC:
        c = instantiate_dynamic(c, 1.0 - pressure, grammar)
    return c


# ---- run loop -----------------------------------------------------------------------

@dataclass
class AnytimeResult:
    """Final network, its status and analysis, and the quality trace.

    ``stop_reason`` is one of ``"fixpoint"`` (nothing left to apply),
    ``"steps"``, ``"deadline"``, ``"interrupt"`` or ``"inconsistent"``.
    ``offending`` lists the deletions that emptied required nodes.
    """

    network: object
    trace: QualityTrace
    status: str
    analysis: object
    stop_reason: str
    escalations: list = field(default_factory=list)
    offending: list = field(default_factory=list)
    emissions: list = field(default_factory=list)
    error: Optional[str] = None
    scheduler: object = field(default=None, repr=False, compare=False)

    @property
    def a(self):
        return self.trace.last.a

    @property
    def r(self):
        return self.trace.last.r

    @property
    def q(self):
        return self.trace.last.q

    @property
    def reliabilities(self):
        return [d.reliability for d in self.network.deletion_log]


Clock = Union[str, Callable[[], float]]


class Scheduler:
    """Stateful driver around one network; survives across run segments.

    ``heuristics`` allows the HEURISTIC/DYNAMIC/PREFERENCE tiers at all;
    ``thresholds`` are the pressure levels at which they open. ``scores``
    enables score pruning under pressure and ranks competing hypotheses.
    ``clock`` is ``"wall"`` (milliseconds), ``"steps"`` (one unit per
    deletion, fully reproducible) or a callable returning milliseconds.
    """

    def __init__(self, grammar, network, *, mode=CONTRACT, heuristics=True, thresholds=None,
                 scores=None, clock: Clock = "wall"):
        self.grammar = grammar
        self.network = network
        self.mode = mode
        self.heuristics = heuristics
        self.theta_h, self.theta_p = thresholds if thresholds is not None else thresholds_for(grammar)
        self.scores = scores
        self.theta_max = float(grammar.heuristic_params.get(PRUNE_MAX, 0.5))
        if clock == "wall":
            self._clock = wall_ms
        elif clock == "steps":
            self._clock = lambda: float(self.network.step_counter)
        else:
            self._clock = clock
        self._index = {c.id: i for i, c in enumerate(grammar.constraints)}
        self._tasks = [c for c in grammar.constraints if c.kind in (HARD, HEURISTIC, DYNAMIC, PREFERENCE)]
        self._binary = [c for c in self._tasks if c.arity == 2]
        self.pending = set()
        self.power = {}
        self._stats = {}
        self._dyn_bound = {}
        self._inflight = None
        self._inflight_dels = 0
        self._gone = []
        self.escalated = set()
        self.escalations = []
        self._prune_theta = 0.0
        self._offset = 0.0
        self._seg_start = None
        self._budget = None
        self._limits = Budget()
        self._steps_at_start = 0
        self.trace = QualityTrace(mode)
        network.listeners.append(self._on_delete)
        self.seed_all()
        self.sample()

    # ---- bookkeeping ---------------------------------------------------------
    def seed_all(self, nodes=None):
        """Mark every task at ``nodes`` (default: all unemitted nodes) pending."""
        for n in (nodes if nodes is not None else self.network.nodes):
            if self.network.is_emitted(n.id):
                continue
            for c in self._tasks:
                self.pending.add((c.id, n.id))
            if self.network.competitors(n.id):
                self.pending.add((COMPETITION, n.id))

    def notify_extension(self):
        """Re-seed after nodes or values were added to the network."""
        self.seed_all()
        net = self.network
        self._gone = [n.id for n in net.nodes if not net.size(n.id)]

    def notice(self, records):
        """Account for deletions made outside the scheduler."""
        self._after(records)

    def elapsed(self):
        if self._seg_start is None:
            return self._offset
        return self._offset + (self._clock() - self._seg_start)

    def sample(self):
        net = self.network
        a = ambiguity_measure(net)
        r = mean_reliability(net.deletion_log)
        s = QualitySample(net.step_counter, self.elapsed(), a, r, quality(a, r))
        if self.trace.samples and s.step == self.trace.last.step:
            return
        self.trace.append(s)

    def _on_delete(self, record):
        self.sample()

    def pressure(self):
        lim = self._limits
        parts = [0.0]
        if lim.max_steps:
            parts.append((self.network.step_counter - self._steps_at_start) / lim.max_steps)
        if lim.wall_clock:
            parts.append((self._clock() - self._seg_start) / lim.wall_clock)
        return min(1.0, max(parts))

    def tiers(self, pressure):
        if not self.heuristics:
            return False, False
        heur = pressure >= self.theta_h or HEURISTIC_TIER in self.escalated
        pref = pressure >= self.theta_p or PREFERENCE_TIER in self.escalated
        return heur, pref

    def _eligible(self, key, heur, pref, pressure):
        cid, nid = key
        net = self.network
        if net.is_emitted(nid) or nid not in net:
            return False
        size = net.size(nid)
        if cid == COMPETITION:
            return pref and size >= 1 and net.is_optional(nid)
        c = self.grammar.constraints[self._index[cid]]
        if c.kind == HARD:
            return size >= 1
        if size < 2:
            return False
        if c.kind in (HEURISTIC, DYNAMIC):
            return heur
        return pref

    def _candidates(self, heur, pref, pressure):
        by_node = {}
        if heur:
            # a tighter dynamic bound makes an already applied task worth repeating
            for c in self._tasks:
                if c.kind == DYNAMIC:
                    n = instantiate_dynamic(c, 1.0 - pressure, self.grammar).bound
                    for node in self.network.nodes:
                        done = self._dyn_bound.get((c.id, node.id))
                        if done is not None and n < done:
                            self.pending.add((c.id, node.id))
        for key in self.pending:
            if self._eligible(key, heur, pref, pressure):
                by_node.setdefault(key[1], []).append(key[0])
        return by_node

    def _rank(self, cid, relaxed):
        if cid == COMPETITION:
            return (1, 0.0, 0.0, 0, len(self._index))
        c = self.grammar.constraints[self._index[cid]]
        return (0,) + _rank_key(c, self._index[cid], self.power, relaxed)

    # ---- application ---------------------------------------------------------
    def _apply(self, cid, nid, pressure, budget):
        net = self.network
        node = net.node(nid)
        if cid == COMPETITION:
            return resolve_competition(net, nid, self.scores, budget)
        c = self.grammar.constraints[self._index[cid]]
        if c.kind == PREFERENCE:
            return apply_preference(net, c, budget, [node])
        if c.kind == DYNAMIC:
            c = instantiate_dynamic(c, 1.0 - pressure, self.grammar)
            self._dyn_bound[(cid, nid)] = c.bound
        if c.arity == 1:
            return apply_unary(net, c, budget, [node])
        recs = []
        for other in net.nodes:
            if other.id == nid:
                continue
            recs.extend(revise(net, nid, c, other.id, budget))
            if budget.stop_reason is not None:
                break
        return recs

    def _after(self, records):
        net = self.network
        for changed in dict.fromkeys(r.node for r in records):
            touched = [changed]
            if not net.size(changed):
                if changed not in self._gone:
                    self._gone.append(changed)
                touched.extend(net.competitors(changed))
            for u in touched:
                for c in self._binary:
                    for w in net.nodes:
                        if w.id != u and not net.is_emitted(w.id):
                            self.pending.add((c.id, w.id))
                if net.competitors(u):
                    self.pending.add((COMPETITION, u))

    def _record_power(self, cid, deletions):
        dels, apps = self._stats.get(cid, (0, 0))
        dels, apps = dels + deletions, apps + 1
        self._stats[cid] = (dels, apps)
        # the initial estimate of 1 counts as one prior application
        self.power[cid] = (1 + dels) / (1 + apps)

    # ---- main loop -----------------------------------------------------------
    def run(self, budget=None, interrupt=None, stop_at_step=None, escalate_on_stall=True, started=None):
        """Run one segment; returns the stop reason.

        ``started`` backdates the segment start on the scheduler clock, so time
        spent before the call (licensing) counts against the budget.
        """
        budget = budget or Budget()
        net = self.network
        self._limits = budget
        self._steps_at_start = net.step_counter
        self._seg_start = self._clock() if started is None else started
        max_steps = budget.max_steps
        if stop_at_step is not None:
            room = max(0, stop_at_step - net.step_counter)
            max_steps = room if max_steps is None else min(max_steps, room)
        deadline = self._seg_start + budget.wall_clock if budget.wall_clock else None
        sb = StepBudget(max_steps, deadline, self._clock, interrupt)
        try:
            return self._loop(sb, escalate_on_stall)
        finally:
            self._offset = self.elapsed()
            self._seg_start = None

    def _loop(self, sb, escalate_on_stall):
        net = self.network
        while True:
            if network_status(net) == INCONSISTENT:
                return "inconsistent"
            if sb.out_of_time():
                return sb.stop_reason
            while self._gone:
                recs = head_presence(net, self._gone[0], sb)
                self._after(recs)
                if sb.stop_reason is not None:
                    return sb.stop_reason
                self._gone.pop(0)
            if network_status(net) == INCONSISTENT:
                return "inconsistent"
            pressure = self.pressure()
            heur, pref = self.tiers(pressure)
            if heur and self.scores is not None:
                theta = self.theta_max * pressure
                if theta > self._prune_theta:
                    recs = prune_low_scores(net, pressure, self.scores, self.theta_max, sb)
                    self._after(recs)
                    if sb.stop_reason is not None:
                        return sb.stop_reason
                    self._prune_theta = theta
            task = self._next_task(heur, pref, pressure)
            if task is None:
                if escalate_on_stall and network_status(net) == AMBIGUOUS and self._escalate():
                    continue
                return "fixpoint"
            cid, nid = task
            recs = self._apply(cid, nid, pressure, sb)
            self._after(recs)
            if sb.stop_reason is not None:
                self._inflight = task
                self._inflight_dels += len(recs)
                return sb.stop_reason
            self.pending.discard(task)
            self._record_power(cid, self._inflight_dels + len(recs))
            self._inflight = None
            self._inflight_dels = 0

    def _next_task(self, heur, pref, pressure):
        by_node = self._candidates(heur, pref, pressure)
        if self._inflight is not None:
            cid, nid = self._inflight
            if cid in by_node.get(nid, ()):
                return self._inflight
            self._inflight = None
            self._inflight_dels = 0
        if not by_node:
            return None
        nid = select_node(self.network, by_node)
        cid = min(by_node[nid], key=lambda k: self._rank(k, heur))
        return cid, nid

    def _escalate(self):
        if not self.heuristics:
            return False
        for tier in (HEURISTIC_TIER, PREFERENCE_TIER):
            if tier not in self.escalated:
                self.escalated.add(tier)
                self.escalations.append((self.network.step_counter, tier))
                return True
        return False

    # ---- results -------------------------------------------------------------
    def result(self, stop_reason, emissions=()):
        net = self.network
        status = network_status(net)
        analysis, error, offending = None, None, []
        if status == INCONSISTENT:
            empty = set(empty_required_nodes(net))
            offending = [d for d in net.deletion_log if d.node in empty]
            error = f"INCONSISTENT: empty domain at {', '.join(sorted(empty))}"
            if stop_reason == "fixpoint":
                stop_reason = "inconsistent"
        else:
            try:
                analysis = extract_solution(net)
            except MalformedTree as exc:
                error = str(exc)
        return AnytimeResult(
            network=net, trace=self.trace, status=status, analysis=analysis,
            stop_reason=stop_reason, escalations=list(self.escalations), offending=offending,
            emissions=list(emissions), error=error, scheduler=self,
        )


def _start(grammar, nodes, **kw):
    network = license_domains(grammar, nodes, strict=False)
    return Scheduler(grammar, network, **kw)


def run_interruptible(grammar, nodes, interrupt=None, *, stop_at_step=None, heuristics=False,
                      thresholds=None, scores=None, clock: Clock = "wall"):
    """License and propagate until nothing is left or ``interrupt.is_set()``.

    Only HARD constraints are used unless ``heuristics`` is set. Always returns
    a result; ``stop_at_step`` stops once that many deletions are logged.
    """
    sched = _start(grammar, nodes, mode=INTERRUPTIBLE, heuristics=heuristics,
                   thresholds=thresholds, scores=scores, clock=clock)
    reason = sched.run(Budget(), interrupt=interrupt, stop_at_step=stop_at_step)
    return sched.result(reason)


def run_contract(grammar, nodes, budget, *, heuristics=True, force_escalation=False,
                 thresholds=None, scores=None, clock: Clock = "wall", interrupt=None):
    """Run within ``budget``; heuristic tiers open as the budget is used up."""
    if budget is None or budget.empty:
        raise ValueError("contract mode needs a wall-clock or step budget")
    if force_escalation:
        thresholds = (0.0, 0.0)
    started = wall_ms() if clock == "wall" else None
    sched = _start(grammar, nodes, mode=CONTRACT, heuristics=heuristics,
                   thresholds=thresholds, scores=scores, clock=clock)
    reason = sched.run(budget, interrupt=interrupt, started=started)
    return sched.result(reason)


def continue_run(previous, extra, interrupt=None):
    """Resume ``previous`` with a fresh budget; network and trace carry on in place."""
    sched = previous.scheduler
    reason = sched.run(extra, interrupt=interrupt)
    return sched.result(reason, previous.emissions)


__all__ = [
    "QualitySample", "QualityTrace", "Budget", "AnytimeResult", "Scheduler", "ScoreModels",
    "INTERRUPTIBLE", "CONTRACT", "COMPETITION", "SCORE_PRUNE",
    "ambiguity_measure", "mean_reliability", "quality", "score_value", "best_value",
    "prune_low_scores", "resolve_competition", "apply_preference", "select_node",
    "select_constraint", "thresholds_for", "run_interruptible", "run_contract", "continue_run",
    "UNIQUE", "AMBIGUOUS", "INCONSISTENT",
]
