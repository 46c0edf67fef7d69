"""Feed a small word lattice through the incremental parser.

Two determiner hypotheses compete for the same stretch of audio; the
overlap constraint keeps at most one of them in the emitted analysis.
"""

from anytime_cdg import Budget, Horizon, TimeInterval, WordNode, bundled_grammar, simulate_stream
from anytime_cdg.lattice import events_from_nodes


def hyp(nid, form, cat, start, end, conf):
    return WordNode(nid, form, cat, interval=TimeInterval(start, end), confidence=conf)


grammar = bundled_grammar("demo_lattice")
lattice = [
    hyp("h1", "Tom", "n", 0, 300, 0.95),
    hyp("h2", "reads", "v", 300, 600, 0.9),
    hyp("h3", "the", "det", 600, 750, 0.8),
    hyp("h4", "a", "det", 610, 740, 0.4),
    hyp("h5", "letter", "n", 750, 1100, 0.9),
]

for window in (300, 2000):
    res = simulate_stream(events_from_nodes(lattice, delay=40), grammar, Horizon(window), Budget(max_steps=50))
    print(f"horizon {window} ms -> {res.status}, r = {res.r:.3f}")
    for e in res.emissions:
        print(f"  t={e.time:>6.0f}  {e.node} ({res.network.node(e.node).form}) -> {e.value}  score {e.score:.3f}")
