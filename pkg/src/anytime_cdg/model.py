"""Core domain types: word nodes, modification values and the constraint network.

A node's domain holds the modification values still possible for it, a value
being a ``(head, label)`` pair. ``head is None`` stands for the top of the tree
and always goes together with the ``ROOT`` label.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Optional

from .errors import (
    CDGError,
    InconsistentNetwork,
    MalformedTree,
    UnknownForm,
)

ROOT = "ROOT"
STRING = "string"
LATTICE = "lattice"


@dataclass(frozen=True)
class TimeInterval:
    start: float
    end: float

    def __post_init__(self):
        if self.start < 0:
            raise ValueError(f"interval start must be >= 0, got {self.start}")
        if not self.start < self.end:
            raise ValueError(f"empty interval [{self.start}, {self.end}]")


@dataclass(frozen=True)
class WordNode:
    """One word form (string mode) or one word hypothesis (lattice mode)."""

    id: str
    form: str
    category: str
    position: Optional[int] = None
    interval: Optional[TimeInterval] = None
    confidence: float = 1.0

    def __post_init__(self):
        if (self.position is None) == (self.interval is None):
            raise ValueError(f"node {self.id!r}: exactly one of position/interval must be set")
        if self.position is not None and self.position < 1:
            raise ValueError(f"node {self.id!r}: positions start at 1")
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"node {self.id!r}: confidence outside [0,1]")

    @property
    def mode(self):
        return STRING if self.position is not None else LATTICE

    @property
    def start(self):
        return self.interval.start if self.interval is not None else None

    @property
    def end(self):
        return self.interval.end if self.interval is not None else None

    def sort_key(self):
        where = self.position if self.position is not None else self.interval.start
        return (where, self.id)


class ModificationValue(NamedTuple):
    head: Optional[str]
    label: str

    def __repr__(self):
        return f"({self.head if self.head is not None else 'NIL'},{self.label})"


def root_value():
    return ModificationValue(None, ROOT)


def value_key(v):
    return (v.head is not None, v.head or "", v.label)


@dataclass(frozen=True)
class DeletionRecord:
    step: int
    node: str
    value: ModificationValue
    constraint_id: str
    reliability: float


@dataclass
class Grammar:
    """Categories, labels, lexicon, constraints and named numeric parameters.

    Built by :func:`anytime_cdg.constraints.parse_grammar`; the constraint
    list keeps file order.
    """

    categories: tuple
    labels: tuple
    lexicon: dict
    constraints: tuple
    heuristic_params: dict = field(default_factory=dict)

    def constraint(self, cid):
        for c in self.constraints:
            if c.id == cid:
                return c
        raise KeyError(cid)

    def of_kind(self, *kinds):
        return [c for c in self.constraints if c.kind in kinds]


def lexicon_lookup(grammar, form):
    """Categories of ``form`` in declaration order; raises UNKNOWN_FORM."""
    try:
        return grammar.lexicon[form]
    except KeyError:
        raise UnknownForm(f"no lexicon entry for {form!r}", form=form) from None


def nodes_from_tokens(grammar, tokens):
    """String-mode nodes for a token sequence.

    A category-ambiguous form gives one node per category at the same position;
    those nodes get ids ``"<pos>:<cat>"``, unambiguous ones just ``"<pos>"``.
    """
    nodes = []
    for pos, form in enumerate(tokens, start=1):
        cats = lexicon_lookup(grammar, form)
        for cat in cats:
            nid = str(pos) if len(cats) == 1 else f"{pos}:{cat}"
            nodes.append(WordNode(nid, form, cat, position=pos))
    return nodes


class ConstraintNetwork:
    """Nodes, their current domains and the log of every deletion.

    Domains are insertion-ordered so iteration (and hence every run) is
    reproducible regardless of hash seeds.
    """

    def __init__(self, nodes=(), mode=None):
        self.mode = mode
        self.nodes = []
        self._index = {}
        self._domains = {}
        self.initial_domain_sizes = {}
        self.deletion_log = []
        self.emitted = {}
        self.late = set()
        self.listeners = []
        self._competitors = {}
        for n in nodes:
            self._add(n)
        self.validate()

    # ---- structure -------------------------------------------------------
    def _add(self, node):
        if self.mode is None:
            self.mode = node.mode
        elif node.mode != self.mode:
            raise CDGError(f"node {node.id!r} is in {node.mode} mode, network in {self.mode} mode")
        self.nodes.append(node)
        self._index[node.id] = node
        self._domains[node.id] = {}
        self.initial_domain_sizes[node.id] = 0
        comps = []
        for other in self.nodes[:-1]:
            if _compete(node, other):
                comps.append(other.id)
                self._competitors[other.id].append(node.id)
        self._competitors[node.id] = comps

    def add_node(self, node, values=()):
        from .errors import DuplicateId

        if node.id in self._index:
            raise DuplicateId(f"node id {node.id!r} already in network")
        self._add(node)
        added = self.add_values(node.id, values)
        return added

    def add_values(self, node_id, values):
        dom = self._domains[node_id]
        added = []
        for v in values:
            if v not in dom:
                self._check_value(node_id, v)
                dom[v] = None
                added.append(v)
        self.initial_domain_sizes[node_id] += len(added)
        return added

    def restore(self, node_id, value):
        """Put back a previously deleted value (lattice extension only)."""
        self._domains[node_id][value] = None

    def _check_value(self, node_id, v):
        if v.head == node_id:
            raise ValueError(f"node {node_id!r} cannot modify itself")
        if (v.head is None) != (v.label == ROOT):
            raise ValueError(f"value {v!r}: NIL head iff ROOT label")
        if v.head is not None and v.head not in self._index:
            raise ValueError(f"value {v!r} of {node_id!r} names an unknown head")

    def validate(self):
        if self.mode == STRING and self.nodes:
            positions = sorted({n.position for n in self.nodes})
            if positions != list(range(1, len(positions) + 1)):
                raise CDGError("string-mode positions must form a contiguous 1..N sequence")

    # ---- access ----------------------------------------------------------
    def __contains__(self, node_id):
        return node_id in self._index

    def __len__(self):
        return len(self.nodes)

    def node(self, node_id):
        return self._index[node_id]

    def domain(self, node_id):
        return tuple(self._domains[node_id])

    def size(self, node_id):
        return len(self._domains[node_id])

    def has(self, node_id, value):
        return value in self._domains[node_id]

    @property
    def domains(self):
        return {nid: frozenset(d) for nid, d in self._domains.items()}

    @property
    def step_counter(self):
        return len(self.deletion_log)

    def competitors(self, node_id):
        """Nodes that exclude ``node_id`` from the same analysis.

        Same position in string mode (lexical ambiguity), overlapping interval
        in lattice mode.
        """
        return self._competitors[node_id]

    def is_optional(self, node_id):
        """True while some competitor of the node is still alive."""
        return any(self._domains[c] for c in self._competitors[node_id])

    def is_emitted(self, node_id):
        return node_id in self.emitted

    # ---- mutation --------------------------------------------------------
    def delete(self, node_id, value, constraint_id, reliability):
        del self._domains[node_id][value]
        rec = DeletionRecord(self.step_counter + 1, node_id, value, constraint_id, reliability)
        self.deletion_log.append(rec)
        for fn in self.listeners:
            fn(rec)
        return rec

    def copy(self):
        other = ConstraintNetwork.__new__(ConstraintNetwork)
        other.mode = self.mode
        other.nodes = list(self.nodes)
        other._index = dict(self._index)
        other._domains = {k: dict(v) for k, v in self._domains.items()}
        other.initial_domain_sizes = dict(self.initial_domain_sizes)
        other.deletion_log = list(self.deletion_log)
        other.emitted = dict(self.emitted)
        other.late = set(self.late)
        other.listeners = []
        other._competitors = {k: list(v) for k, v in self._competitors.items()}
        return other

    def __repr__(self):
        inner = ", ".join(f"{nid}:{sorted(d, key=value_key)}" for nid, d in self._domains.items())
        return f"ConstraintNetwork({self.mode}, {inner})"


def _compete(a, b):
    if a.position is not None:
        return a.position == b.position
    return max(a.start, b.start) < min(a.end, b.end)


# ---- status and extraction ---------------------------------------------------

UNIQUE = "UNIQUE"
AMBIGUOUS = "AMBIGUOUS"
INCONSISTENT = "INCONSISTENT"


def network_status(network):
    if empty_required_nodes(network):
        return INCONSISTENT
    for node in network.nodes:
        size = network.size(node.id)
        if size > 1:
            return AMBIGUOUS
        if size == 1 and network.is_optional(node.id):
            return AMBIGUOUS
    return UNIQUE


def empty_required_nodes(network):
    """Empty nodes without a living competitor to stand in for them."""
    return [
        n.id for n in network.nodes
        if not network.size(n.id) and not network.is_optional(n.id)
    ]


@dataclass
class DependencyAnalysis:
    """What the network says right now.

    ``resolved`` maps node ids to their single remaining value; ``unresolved``
    maps the still-ambiguous ones to their domains. ``dropped`` lists nodes
    that lost every value while a competitor survives (unused lexical readings
    or lattice hypotheses).
    """

    resolved: dict
    unresolved: dict
    dropped: list
    complete: bool

    def heads(self):
        return {nid: v.head for nid, v in self.resolved.items()}


def extract_solution(network):
    empty = empty_required_nodes(network)
    if empty:
        raise InconsistentNetwork(f"empty domain at {', '.join(empty)}", nodes=empty)
    resolved, unresolved, dropped = {}, {}, []
    for node in sorted(network.nodes, key=WordNode.sort_key):
        dom = network.domain(node.id)
        if not dom:
            dropped.append(node.id)
        elif len(dom) == 1:
            resolved[node.id] = dom[0]
        else:
            unresolved[node.id] = frozenset(dom)
    complete = not unresolved and not any(
        network.is_optional(nid) for nid in resolved
    )
    if complete:
        check_tree(resolved)
    return DependencyAnalysis(resolved, unresolved, dropped, complete)


def check_tree(assignment):
    """Raise MALFORMED_TREE unless ``assignment`` is a single-rooted tree."""
    if not assignment:
        return
    roots = [nid for nid, v in assignment.items() if v.head is None]
    if len(roots) != 1:
        raise MalformedTree(f"expected exactly one root, found {len(roots)}", roots=roots)
    for nid, v in assignment.items():
        if v.head is not None and v.head not in assignment:
            raise MalformedTree(f"{nid} depends on {v.head}, which is not part of the analysis")
    for start in assignment:
        seen = set()
        cur = start
        while cur is not None:
            if cur in seen:
                raise MalformedTree(f"cycle through {cur}")
            seen.add(cur)
            cur = assignment[cur].head


def is_tree(assignment):
    try:
        check_tree(assignment)
    except MalformedTree:
        return False
    return True


def candidate_values(network, node_id, labels, heads: Iterable[str] = None):
    """Every syntactically possible value of ``node_id``: each other node as head
    with each non-ROOT label, plus ``(NIL, ROOT)`` when ROOT is declared."""
    out = []
    if ROOT in labels:
        out.append(root_value())
    for h in (heads if heads is not None else [n.id for n in network.nodes]):
        if h == node_id:
            continue
        for lab in labels:
            if lab != ROOT:
                out.append(ModificationValue(h, lab))
    return out
