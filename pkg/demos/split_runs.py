"""Splitting a run in two: exact for hard constraints, lossy once a heuristic misfires."""

from anytime_cdg import Budget, ConstraintDef, bundled_grammar, continue_run, nodes_from_tokens, run_contract
from anytime_cdg.constraints import normalize, parse_grammar, serialize_grammar

demo = bundled_grammar("demo")
nodes = nodes_from_tokens(demo, "Tom reads the letter".split())

whole = run_contract(demo, nodes, Budget(max_steps=100), heuristics=False, clock="steps")
first = run_contract(demo, nodes, Budget(max_steps=1), heuristics=False, clock="steps")
rest = continue_run(first, Budget(max_steps=100))
print(f"hard only, one go: q = {whole.q:.6f}; split after one step: q = {rest.q:.6f}")

# subject before verb as a hard rule, plus a heuristic that claims the opposite
grammar = parse_grammar(serialize_grammar(demo))
subject_first = grammar.constraint("subject-first").formula
subject_last = normalize(["->", ["and", ["=", ["lab", "x"], "SUBJ"], ["=", ["cat", ["mod", "x"]], "v"]],
                          [">", ["pos", "x"], ["pos", ["mod", "x"]]]])
grammar.constraints += (
    ConstraintDef("subject-before-verb", 1, "HARD", subject_first, 1.0, 2),
    ConstraintDef("subject-last", 1, "HEURISTIC", subject_last, 0.8, 2),
)

careful = run_contract(grammar, nodes, Budget(max_steps=100), heuristics=False, clock="steps")
hurried = run_contract(grammar, nodes, Budget(max_steps=2), clock="steps")
print("short first segment deleted:", [(d.node, d.value, d.constraint_id) for d in hurried.network.deletion_log])
resumed = continue_run(hurried, Budget(max_steps=100))
print(f"unsplit hard-only: {careful.status} q = {careful.q:.6f}")
print(f"split with early escalation: {resumed.status} q = {resumed.q:.6f}")
