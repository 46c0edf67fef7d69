"""Watch parse quality grow while a contract run narrows the demo sentence."""

from anytime_cdg import Budget, bundled_grammar, nodes_from_tokens, run_contract, run_interruptible
from anytime_cdg.cli import format_output

grammar = bundled_grammar("demo")
nodes = nodes_from_tokens(grammar, "Tom reads the letter".split())

hard_only = run_interruptible(grammar, nodes, clock="steps")
print(f"hard constraints alone: {hard_only.status}, q = {hard_only.q:.5f}")
print(format_output(hard_only))

res = run_contract(grammar, nodes, Budget(max_steps=20), force_escalation=True, clock="steps")
print("step  a        r        q")
for s in res.trace.samples:
    print(f"{s.step:>4}  {s.a:.5f}  {s.r:.5f}  {s.q:.5f}")
for d in res.network.deletion_log:
    print(f"  step {d.step}: node {d.node} loses {d.value} via {d.constraint_id} ({d.reliability})")
print()
print(format_output(res))
