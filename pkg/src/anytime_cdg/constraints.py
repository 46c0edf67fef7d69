"""Declarative local constraints and the grammar file format.

Formulas are prefix-notation arrays, e.g.::

    ["->", ["=", ["cat", "x"], "det"],
           ["<", ["pos", "x"], ["pos", ["mod", "x"]]]]

Node terms are the variables ``x`` (and ``y`` for binary constraints) and
``["mod", v]``, the head a variable's candidate value points to. Only one
level of ``mod`` is allowed. Accessors: ``cat lab pos start end conf form``.
Predicates: ``= != < <= > >= in overlap precedes``; connectives:
``and or not ->``; arithmetic ``+ -``; ``"$n"`` is the bound of a DYNAMIC
constraint.

Preference rules use ``["=>", condition, ["delete", "y"]]`` where ``y`` and
``z`` are two different heads found in the domain of node ``x``.

Any accessor reaching through a NIL head (the root value) makes the
innermost atomic predicate false.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, replace
from typing import Any, Optional

from .errors import GrammarError, MissingParam, ModeMismatch
from .intervals import overlap as _overlap, precedes as _precedes
from .model import ROOT, Grammar

LICENSE = "LICENSE"
HARD = "HARD"
HEURISTIC = "HEURISTIC"
PREFERENCE = "PREFERENCE"
DYNAMIC = "DYNAMIC"
KINDS = (LICENSE, HARD, HEURISTIC, PREFERENCE, DYNAMIC)

PARAM = "$n"

# grammar parameter names
DISTANCE_SCALE = "distance_scale"
PRUNE_MAX = "prune_threshold_max"
ESCALATE_HEURISTICS = "escalate_heuristics"
ESCALATE_PREFERENCES = "escalate_preferences"

_ALIASES = {
    "head": "mod",
    "≠": "!=", "/=": "!=", "≤": "<=", "≥": ">=",
    "&": "and", "∧": "and", "|": "or", "∨": "or", "!": "not", "¬": "not",
    "→": "->", "⇒": "=>",
}
_ACCESSORS = {"cat", "lab", "pos", "start", "end", "conf", "form"}
_NUMERIC_ACCESSORS = {"pos", "start", "end", "conf"}
_ORDER = {"<", "<=", ">", ">="}


class _Nil:
    __slots__ = ()

    def __repr__(self):
        return "NIL"


NIL = _Nil()


@dataclass(frozen=True)
class ConstraintDef:
    id: str
    arity: int
    kind: str
    formula: Any
    reliability: float = 1.0
    phase: int = 0
    bound: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "_fn", _compile(self.formula))

    @property
    def target(self):
        """Deletion target of a PREFERENCE rule ('y' or 'z')."""
        return self.formula[2][1] if self.kind == PREFERENCE else None



# ---- normalisation and validation ---------------------------------------------

def normalize(expr):
    """JSON arrays to tuples, operator aliases resolved."""
    if isinstance(expr, list):
        if not expr:
            raise ValueError("empty expression")
        head = expr[0]
        if isinstance(head, str):
            head = _ALIASES.get(head, head)
        if head == "in" and len(expr) == 3 and isinstance(expr[2], list):
            return ("in", normalize(expr[1]), tuple(expr[2]))
        return (head,) + tuple(normalize(e) for e in expr[1:])
    return expr


def denormalize(expr):
    if isinstance(expr, tuple):
        if expr and expr[0] == "in":
            return ["in", denormalize(expr[1]), list(expr[2])]
        return [denormalize(e) for e in expr]
    return expr


class _Checker:
    """Walks a formula and reports the first problem as a GrammarError."""

    def __init__(self, cid, arity, kind, categories, labels):
        self.cid = cid
        self.kind = kind
        self.cats = set(categories)
        self.labels = set(labels)
        if kind == PREFERENCE:
            self.vars = {"x", "y", "z"}
        else:
            self.vars = {"x"} if arity == 1 else {"x", "y"}
        self.has_param = False

    def fail(self, code, msg):
        raise GrammarError(code, f"constraint {self.cid!r}: {msg}")

    def is_node(self, t):
        if isinstance(t, str):
            return t in {"x", "y", "z"} or (len(t) == 1 and t.islower() and t not in self.cats)
        return isinstance(t, tuple) and t and t[0] == "mod"

    def node(self, t):
        if isinstance(t, str):
            if t not in self.vars:
                self.fail("NONLOCAL_FORMULA", f"variable {t!r} is not local to a {len(self.vars) == 1 and 'unary' or 'binary'} constraint")
            return
        if isinstance(t, tuple) and t and t[0] == "mod":
            if len(t) != 2:
                self.fail("SYNTAX_ERROR", "mod takes one argument")
            inner = t[1]
            if not isinstance(inner, str):
                self.fail("NONLOCAL_FORMULA", "mod chains deeper than one level are not local")
            if self.kind == PREFERENCE:
                self.fail("NONLOCAL_FORMULA", "preference rules cannot refer to mod()")
            self.node(inner)
            return
        self.fail("SYNTAX_ERROR", f"expected a node term, got {denormalize(t)!r}")

    def term(self, t):
        """Returns the term's type: num, cat, lab, form, sym, bool."""
        if isinstance(t, bool):
            return "bool"
        if isinstance(t, (int, float)):
            return "num"
        if t == PARAM:
            if self.kind != DYNAMIC:
                self.fail("SYNTAX_ERROR", "only DYNAMIC constraints may use the bound $n")
            self.has_param = True
            return "num"
        if isinstance(t, str):
            if self.is_node(t):
                self.node(t)
                return "node"
            return "sym"
        if not isinstance(t, tuple) or not t or not isinstance(t[0], str):
            self.fail("SYNTAX_ERROR", f"malformed term {t!r}")
        op = t[0]
        if op in _ACCESSORS:
            if len(t) != 2:
                self.fail("SYNTAX_ERROR", f"{op} takes one argument")
            self.node(t[1])
            if op == "lab" and self.kind == PREFERENCE:
                self.fail("NONLOCAL_FORMULA", "preference rules cannot refer to labels")
            if op in _NUMERIC_ACCESSORS:
                return "num"
            return op
        if op == "mod":
            self.node(t)
            return "node"
        if op in ("+", "-"):
            if len(t) != 3:
                self.fail("SYNTAX_ERROR", f"{op} takes two arguments")
            for a in t[1:]:
                if self.term(a) != "num":
                    self.fail("SYNTAX_ERROR", f"{op} needs numeric operands")
            return "num"
        return self.formula(t)

    def symbol(self, typ, s):
        if typ == "cat" and s not in self.cats:
            self.fail("UNDECLARED_SYMBOL", f"category {s!r} is not declared")
        if typ == "lab" and s not in self.labels:
            self.fail("UNDECLARED_SYMBOL", f"label {s!r} is not declared")

    def formula(self, f):
        if isinstance(f, bool):
            return "bool"
        if not isinstance(f, tuple) or not f or not isinstance(f[0], str):
            self.fail("SYNTAX_ERROR", f"malformed formula {f!r}")
        op, args = f[0], f[1:]
        if op in ("and", "or"):
            if not args:
                self.fail("SYNTAX_ERROR", f"{op} needs arguments")
            for a in args:
                self.boolean(a)
        elif op == "not":
            if len(args) != 1:
                self.fail("SYNTAX_ERROR", "not takes one argument")
            self.boolean(args[0])
        elif op == "->":
            if len(args) != 2:
                self.fail("SYNTAX_ERROR", "-> takes two arguments")
            self.boolean(args[0])
            self.boolean(args[1])
        elif op in ("=", "!="):
            if len(args) != 2:
                self.fail("SYNTAX_ERROR", f"{op} takes two arguments")
            a, b = args
            if self.is_node(a) or self.is_node(b):
                self.node(a)
                self.node(b)
            else:
                ta, tb = self.term(a), self.term(b)
                if ta == "sym":
                    self.symbol(tb, a)
                if tb == "sym":
                    self.symbol(ta, b)
                if ta == "sym" and tb == "sym":
                    self.fail("SYNTAX_ERROR", "comparison of two constants")
        elif op in _ORDER:
            if len(args) != 2:
                self.fail("SYNTAX_ERROR", f"{op} takes two arguments")
            for a in args:
                if self.term(a) != "num":
                    self.fail("SYNTAX_ERROR", f"{op} needs numeric operands")
        elif op == "in":
            if len(args) != 2 or not isinstance(args[1], tuple):
                self.fail("SYNTAX_ERROR", "in takes a term and a list of symbols")
            typ = self.term(args[0])
            for s in args[1]:
                self.symbol(typ, s)
        elif op in ("overlap", "precedes"):
            if len(args) != 2:
                self.fail("SYNTAX_ERROR", f"{op} takes two node terms")
            self.node(args[0])
            self.node(args[1])
        else:
            self.fail("SYNTAX_ERROR", f"unknown operator {op!r}")
        return "bool"

    def boolean(self, f):
        if self.term(f) != "bool":
            self.fail("SYNTAX_ERROR", f"expected a condition, got {denormalize(f)!r}")

    def top(self, formula):
        if self.kind == PREFERENCE:
            if not (isinstance(formula, tuple) and len(formula) == 3 and formula[0] == "=>"):
                self.fail("SYNTAX_ERROR", 'preference rules have the form ["=>", condition, ["delete", target]]')
            self.boolean(formula[1])
            action = formula[2]
            if not (isinstance(action, tuple) and len(action) == 2 and action[0] == "delete" and action[1] in ("y", "z")):
                self.fail("SYNTAX_ERROR", 'preference target must be ["delete", "y"] or ["delete", "z"]')
        else:
            self.boolean(formula)
        if self.kind == DYNAMIC and not self.has_param:
            self.fail("SYNTAX_ERROR", "DYNAMIC constraints must use the bound $n")


def check_formula(cid, arity, kind, formula, categories, labels):
    _Checker(cid, arity, kind, categories, labels).top(formula)


# ---- compilation ---------------------------------------------------------------

class Env:
    """Variable bindings for one evaluation: name -> (node, value or None)."""

    __slots__ = ("binds", "net")

    def __init__(self, binds, net):
        self.binds = binds
        self.net = net


def _compile(f):
    if isinstance(f, bool):
        return lambda env: f
    if isinstance(f, (int, float)):
        return lambda env: f
    if isinstance(f, str):
        if f in ("x", "y", "z"):
            return lambda env: env.binds[f]
        return lambda env: f
    op, args = f[0], f[1:]
    if op == "mod":
        var = args[0]

        def mod(env):
            node, value = env.binds[var]
            if value is None or value.head is None:
                return NIL
            for bnode, bval in env.binds.values():
                if bnode.id == value.head:
                    return (bnode, bval)
            return (env.net.node(value.head), None)
        return mod
    if op in _ACCESSORS:
        sub = _compile(args[0])
        get = _ACCESS[op]

        def access(env):
            ref = sub(env)
            if ref is NIL:
                return NIL
            return get(ref)
        return access
    if op in ("+", "-"):
        a, b = _compile(args[0]), _compile(args[1])
        sign = 1 if op == "+" else -1

        def arith(env):
            va, vb = a(env), b(env)
            if va is NIL or vb is NIL:
                return NIL
            return va + sign * vb
        return arith
    if op == "and":
        parts = [_compile(a) for a in args]
        return lambda env: all(p(env) for p in parts)
    if op == "or":
        parts = [_compile(a) for a in args]
        return lambda env: any(p(env) for p in parts)
    if op == "not":
        p = _compile(args[0])
        return lambda env: not p(env)
    if op == "->":
        p, q = _compile(args[0]), _compile(args[1])
        return lambda env: (not p(env)) or q(env)
    if op == "=>":
        return _compile(args[0])
    if op in ("=", "!="):
        a, b = _compile(args[0]), _compile(args[1])
        want = op == "="

        def eq(env):
            va, vb = a(env), b(env)
            if va is NIL or vb is NIL:
                return False
            if isinstance(va, tuple):
                va = va[0].id
            if isinstance(vb, tuple):
                vb = vb[0].id
            return (va == vb) == want
        return eq
    if op in _ORDER:
        a, b = _compile(args[0]), _compile(args[1])
        cmp = _CMP[op]

        def order(env):
            va, vb = a(env), b(env)
            if va is NIL or vb is NIL:
                return False
            return cmp(va, vb)
        return order
    if op == "in":
        a = _compile(args[0])
        members = frozenset(args[1])

        def member(env):
            va = a(env)
            return va is not NIL and va in members
        return member
    if op in ("overlap", "precedes"):
        a, b = _compile(args[0]), _compile(args[1])
        pred = _overlap if op == "overlap" else _precedes

        def interval(env):
            ra, rb = a(env), b(env)
            if ra is NIL or rb is NIL:
                return False
            return pred(ra[0], rb[0])
        return interval
    raise ValueError(f"unknown operator {op!r}")


def _pos(ref):
    node = ref[0]
    if node.position is None:
        raise ModeMismatch(f"pos() of lattice node {node.id!r}")
    return node.position


def _start(ref):
    node = ref[0]
    if node.interval is None:
        raise ModeMismatch(f"start() of string node {node.id!r}")
    return node.interval.start


def _end(ref):
    node = ref[0]
    if node.interval is None:
        raise ModeMismatch(f"end() of string node {node.id!r}")
    return node.interval.end


_ACCESS = {
    "cat": lambda ref: ref[0].category,
    "lab": lambda ref: ref[1].label if ref[1] is not None else NIL,
    "pos": _pos,
    "start": _start,
    "end": _end,
    "conf": lambda ref: ref[0].confidence,
    "form": lambda ref: ref[0].form,
}
_CMP = {
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
}


# ---- evaluation ----------------------------------------------------------------

def eval_unary(c, node, value, ctx):
    """Does ``mod(node) = value`` satisfy the unary constraint ``c``?"""
    return bool(c._fn(Env({"x": (node, value)}, ctx)))


def eval_binary(c, x, vx, y, vy, ctx):
    """Do the two assignments jointly satisfy the binary constraint ``c``?

    Only the orientation given is tested; callers check ``(y, x)`` as well.
    """
    return bool(c._fn(Env({"x": (x, vx), "y": (y, vy)}, ctx)))


def eval_preference(rule, x, y_head, z_head):
    """Condition of a preference rule for node ``x`` and two candidate heads."""
    return bool(rule._fn(Env({"x": (x, None), "y": (y_head, None), "z": (z_head, None)}, None)))


def dynamic_bound(time_fraction_remaining, grammar):
    try:
        beta = grammar.heuristic_params[DISTANCE_SCALE]
    except KeyError:
        raise MissingParam(f"grammar parameter {DISTANCE_SCALE!r} is required for DYNAMIC constraints") from None
    frac = min(1.0, max(0.0, time_fraction_remaining))
    return max(1, int(math.floor(beta * frac + 0.5)))


def instantiate_dynamic(c, time_fraction_remaining, grammar):
    """Bind ``$n`` to ``max(1, round(beta * remaining))``."""
    if c.kind != DYNAMIC:
        raise ValueError(f"{c.id} is not a DYNAMIC constraint")
    n = dynamic_bound(time_fraction_remaining, grammar)
    return replace(c, formula=_substitute(c.formula, n), bound=n)


def _substitute(f, n):
    if f == PARAM:
        return n
    if isinstance(f, tuple):
        if f and f[0] == "in":
            return f
        return tuple(_substitute(e, n) for e in f)
    return f


# ---- grammar files --------------------------------------------------------------

_TOP_KEYS = {"categories", "labels", "lexicon", "params", "constraints"}


def _locate(text, needle):
    """1-based (line, column) of the first occurrence of ``needle`` in ``text``."""
    idx = text.find(needle)
    if idx < 0:
        return None, None
    line = text.count("\n", 0, idx) + 1
    col = idx - (text.rfind("\n", 0, idx) + 1) + 1
    return line, col


def parse_grammar(text):
    """Load and validate a JSON grammar file."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise GrammarError("SYNTAX_ERROR", e.msg, e.lineno, e.colno) from None
    if not isinstance(data, dict):
        raise GrammarError("SYNTAX_ERROR", "grammar must be a JSON object", 1, 1)
    unknown = set(data) - _TOP_KEYS
    if unknown:
        line, col = _locate(text, f'"{sorted(unknown)[0]}"')
        raise GrammarError("SYNTAX_ERROR", f"unknown top-level key(s) {sorted(unknown)}", line, col)

    categories = tuple(data.get("categories", ()))
    labels = tuple(data.get("labels", ()))
    for kind, names in (("category", categories), ("label", labels)):
        if any(not isinstance(s, str) or not s for s in names):
            raise GrammarError("SYNTAX_ERROR", f"every {kind} must be a non-empty string")
        if len(set(names)) != len(names):
            raise GrammarError("SYNTAX_ERROR", f"duplicate {kind} declaration")

    lexicon = {}
    for form, cats in data.get("lexicon", {}).items():
        cats = (cats,) if isinstance(cats, str) else tuple(cats)
        for cat in cats:
            if cat not in categories:
                line, col = _locate(text, f'"{form}"')
                raise GrammarError("UNDECLARED_SYMBOL", f"lexicon entry {form!r} uses undeclared category {cat!r}", line, col)
        lexicon[form] = cats

    params = {}
    for k, v in data.get("params", {}).items():
        if not isinstance(v, (int, float)) or isinstance(v, bool):
            raise GrammarError("SYNTAX_ERROR", f"parameter {k!r} must be numeric")
        params[k] = float(v)

    constraints = []
    seen = set()
    for raw in data.get("constraints", ()):
        cid = raw.get("id") if isinstance(raw, dict) else None
        line, col = _locate(text, f'"{cid}"') if cid else (None, None)
        try:
            c = _load_constraint(raw, categories, labels)
        except GrammarError as e:
            raise e.at(line, col) from None
        if c.id in seen:
            raise GrammarError("SYNTAX_ERROR", f"duplicate constraint id {c.id!r}", line, col)
        seen.add(c.id)
        constraints.append(c)
    return Grammar(categories, labels, lexicon, tuple(constraints), params)


def _load_constraint(raw, categories, labels):
    if not isinstance(raw, dict):
        raise GrammarError("SYNTAX_ERROR", "constraint entries must be objects")
    missing = {"id", "arity", "kind", "formula"} - set(raw)
    if missing:
        raise GrammarError("SYNTAX_ERROR", f"constraint lacks {sorted(missing)}")
    cid, arity, kind = raw["id"], raw["arity"], raw["kind"]
    if not isinstance(cid, str) or not re.fullmatch(r"[\w.\-]+", cid):
        raise GrammarError("SYNTAX_ERROR", f"bad constraint id {cid!r}")
    if kind not in KINDS:
        raise GrammarError("SYNTAX_ERROR", f"{cid}: unknown kind {kind!r}")
    if arity not in (1, 2):
        raise GrammarError("SYNTAX_ERROR", f"{cid}: arity must be 1 or 2")
    if kind in (LICENSE, PREFERENCE) and arity != 1:
        raise GrammarError("SYNTAX_ERROR", f"{cid}: {kind} constraints are unary")
    rel = raw.get("reliability", 1.0)
    if isinstance(rel, bool) or not isinstance(rel, (int, float)) or not 0.0 < rel <= 1.0:
        raise GrammarError("BAD_RELIABILITY", f"{cid}: reliability {rel!r} outside (0, 1]")
    if kind in (LICENSE, HARD) and rel != 1.0:
        raise GrammarError("BAD_RELIABILITY", f"{cid}: {kind} constraints must have reliability 1.0")
    phase = raw.get("phase", 0)
    if isinstance(phase, bool) or not isinstance(phase, int) or phase < 0:
        raise GrammarError("SYNTAX_ERROR", f"{cid}: phase must be a nonnegative integer")
    if kind == LICENSE and phase != 0:
        raise GrammarError("SYNTAX_ERROR", f"{cid}: LICENSE constraints belong to phase 0")
    try:
        formula = normalize(raw["formula"])
    except (ValueError, TypeError) as e:
        raise GrammarError("SYNTAX_ERROR", f"{cid}: {e}") from None
    check_formula(cid, arity, kind, formula, categories, labels)
    return ConstraintDef(cid, arity, kind, formula, float(rel), phase)


def serialize_grammar(grammar):
    data = {
        "categories": list(grammar.categories),
        "labels": list(grammar.labels),
        "lexicon": {f: list(c) for f, c in grammar.lexicon.items()},
        "params": dict(grammar.heuristic_params),
        "constraints": [
            {
                "id": c.id,
                "arity": c.arity,
                "kind": c.kind,
                "reliability": c.reliability,
                "phase": c.phase,
                "formula": denormalize(c.formula),
            }
            for c in grammar.constraints
        ],
    }
    return json.dumps(data, indent=2, ensure_ascii=False)


def load_grammar(path):
    with open(path, encoding="utf-8") as fh:
        return parse_grammar(fh.read())


def bundled_grammar(name="demo"):
    """One of the grammars shipped with the package: ``demo`` or ``demo_lattice``."""
    from importlib import resources

    text = resources.files("anytime_cdg").joinpath("grammars").joinpath(f"{name}.json").read_text(encoding="utf-8")
    return parse_grammar(text)


__all__ = [
    "ConstraintDef", "KINDS", "LICENSE", "HARD", "HEURISTIC", "PREFERENCE", "DYNAMIC",
    "parse_grammar", "serialize_grammar", "load_grammar", "bundled_grammar",
    "eval_unary", "eval_binary", "eval_preference", "instantiate_dynamic",
    "dynamic_bound", "ROOT", "NIL",
]
