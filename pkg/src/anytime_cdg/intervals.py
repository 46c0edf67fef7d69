"""Interval predicates on lattice nodes.

Touching intervals (``end(a) == start(b)``) precede each other and do not
overlap.
"""

from .errors import ModeMismatch


def _interval(node):
    if node.interval is None:
        raise ModeMismatch(f"node {node.id!r} carries a position, not a time interval")
    return node.interval


def precedes(a, b):
    return _interval(a).end <= _interval(b).start


def overlap(a, b):
    ia, ib = _interval(a), _interval(b)
    if a.id == b.id:
        return False
    return max(ia.start, ib.start) < min(ia.end, ib.end)
