"""One-sided sequent calculus for arithmetic without induction.

Sequents are finite multisets of formulas read disjunctively; rendering is
canonically sorted so equality and hashing are order-independent.  Each rule
application carries exactly the arguments needed to recompute its premises,
so checking is deterministic: premises_of either returns the unique premise
list or raises ArgMismatch.

Proof trees are rule-labeled nodes with opaque string ids.  Leaves are
axioms, assumptions, open stubs, or back-references; the two latter kinds
are rejected by check_tree and handled by the transform/checker layers.

File format:
    (node :id L <sequent> <rule> <child>*)
    <sequent>  ::=  (seq f ...)  |  (aseq (seq f ...) (vars x ...))
    <rule>     ::=  (rule <name> <args...>)
                 |  (axiom) | (assume f) | (open) | (back L)
Rule argument syntax:
    (rule and f)            principal conjunction
    (rule or f)             principal disjunction
    (rule all f z)          principal universal, eigenvariable z
    (rule ex f t)           principal existential, witness term t
    (rule ref t)            premise adds t != t
    (rule rep u0 u1 y t0 t1)  pattern u0 != u1 with hole y; needs t0 != t1
                              and the t0-instance; premise adds the
                              t1-instance
    (rule add0 t)           premise adds t+0 != t
    (rule adds t u)         premise adds t+s(u) != s(t+u)
    (rule mult0 t)          premise adds t*0 != 0
    (rule mults t u)        premise adds t*s(u) != t*u+t
    (rule pred t0 t1)       needs s(t0) != s(t1); premise adds t0 != t1
    (rule case y)           premises substitute y := 0 and y := s(y)
    (rule weak (seq f ...)) premise is the conclusion minus the multiset
    (rule cut f)            premises add f and its negation
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, List, Optional, Tuple

from . import sexpr
from .syntax import (ZERO, Add, All, And, CaptureError, Eq, Ex, Formula, Mul,
                     Neq, Or, ParseError, Succ, Term, V, Var, Zero,
                     formula_from_sexpr, ident_var, negate, subst_term,
                     substitute, term_from_sexpr)


class ArgMismatch(Exception):
    """Rule arguments do not fit the conclusion sequent."""


class Sequent:
    """Finite multiset of formulas; stored sorted by rendering."""

    __slots__ = ("formulas", "sx", "fv")

    def __init__(self, formulas: Iterable[Formula] = ()):
        fs = tuple(sorted(formulas, key=lambda f: f.sx))
        object.__setattr__(self, "formulas", fs)
        object.__setattr__(self, "sx", "(seq" + "".join(" " + f.sx for f in fs) + ")")
        fv = frozenset()
        for f in fs:
            fv |= f.fv
        object.__setattr__(self, "fv", fv)

    def __setattr__(self, name, value):
        raise AttributeError("Sequent is immutable")

    def __iter__(self) -> Iterator[Formula]:
        return iter(self.formulas)

    def __len__(self):
        return len(self.formulas)

    def __contains__(self, f: Formula):
        return any(g == f for g in self.formulas)

    def __eq__(self, other):
        return isinstance(other, Sequent) and other.sx == self.sx

    def __hash__(self):
        return hash(self.sx)

    def __repr__(self):
        return self.sx

    def count(self, f: Formula) -> int:
        return sum(1 for g in self.formulas if g == f)

    def add(self, *fs: Formula) -> "Sequent":
        return Sequent(self.formulas + fs)

    def remove_one(self, f: Formula) -> "Sequent":
        out = list(self.formulas)
        try:
            out.remove(f)
        except ValueError:
            raise ArgMismatch(f"{f.sx} does not occur in {self.sx}") from None
        return Sequent(out)

    def minus(self, fs: Iterable[Formula]) -> "Sequent":
        """Multiset difference; every copy in fs must be present."""
        need = Counter(f.sx for f in fs)
        out = []
        for g in self.formulas:
            if need.get(g.sx, 0) > 0:
                need[g.sx] -= 1
            else:
                out.append(g)
        missing = [s for s, k in need.items() if k > 0]
        if missing:
            raise ArgMismatch(f"{missing[0]} is not in {self.sx} often enough")
        return Sequent(out)

    def map(self, fn) -> "Sequent":
        return Sequent(fn(f) for f in self.formulas)


def parse_sequent(text: str) -> Sequent:
    return sequent_from_sexpr(sexpr.parse(text))


def sequent_from_sexpr(value) -> Sequent:
    if not isinstance(value, list) or not value or value[0] != "seq":
        raise ParseError(f"bad sequent {sexpr.render(value)}")
    return Sequent(formula_from_sexpr(v) for v in value[1:])


# --- rules and leaves ---------------------------------------------------------

@dataclass(frozen=True)
class Rule:
    name = "?"

    def args_sexpr(self) -> list:
        return []


@dataclass(frozen=True)
class AndRule(Rule):
    principal: Formula
    name = "and"

    def args_sexpr(self):
        return [self.principal.sx]


@dataclass(frozen=True)
class OrRule(Rule):
    principal: Formula
    name = "or"

    def args_sexpr(self):
        return [self.principal.sx]


@dataclass(frozen=True)
class AllRule(Rule):
    principal: Formula
    var: Var  # eigenvariable
    name = "all"

    def args_sexpr(self):
        return [self.principal.sx, self.var.name]


@dataclass(frozen=True)
class ExRule(Rule):
    principal: Formula
    witness: Term
    name = "ex"

    def args_sexpr(self):
        return [self.principal.sx, self.witness.sx]


@dataclass(frozen=True)
class RefRule(Rule):
    term: Term
    name = "ref"

    def args_sexpr(self):
        return [self.term.sx]


@dataclass(frozen=True)
class RepRule(Rule):
    u0: Term
    u1: Term
    var: Var  # hole of the pattern u0 != u1
    t0: Term
    t1: Term
    name = "rep"

    def args_sexpr(self):
        return [self.u0.sx, self.u1.sx, self.var.name, self.t0.sx, self.t1.sx]

    def instance(self, t: Term) -> Formula:
        return Neq(subst_term(self.u0, self.var, t),
                   subst_term(self.u1, self.var, t))


@dataclass(frozen=True)
class Add0Rule(Rule):
    term: Term
    name = "add0"

    def args_sexpr(self):
        return [self.term.sx]


@dataclass(frozen=True)
class AddSRule(Rule):
    term: Term
    arg: Term
    name = "adds"

    def args_sexpr(self):
        return [self.term.sx, self.arg.sx]


@dataclass(frozen=True)
class Mult0Rule(Rule):
    term: Term
    name = "mult0"

    def args_sexpr(self):
        return [self.term.sx]


@dataclass(frozen=True)
class MultSRule(Rule):
    term: Term
    arg: Term
    name = "mults"

    def args_sexpr(self):
        return [self.term.sx, self.arg.sx]


@dataclass(frozen=True)
class PredRule(Rule):
    t0: Term
    t1: Term
    name = "pred"

    def args_sexpr(self):
        return [self.t0.sx, self.t1.sx]


@dataclass(frozen=True)
class CaseRule(Rule):
    var: Var
    name = "case"

    def args_sexpr(self):
        return [self.var.name]


@dataclass(frozen=True)
class WeakRule(Rule):
    delta: Sequent
    name = "weak"

    def args_sexpr(self):
        return [self.delta.sx]


@dataclass(frozen=True)
class CutRule(Rule):
    formula: Formula
    name = "cut"

    def args_sexpr(self):
        return [self.formula.sx]


@dataclass(frozen=True)
class AxiomLeaf(Rule):
    name = "axiom"


@dataclass(frozen=True)
class AssumeLeaf(Rule):
    formula: Formula
    name = "assume"


@dataclass(frozen=True)
class OpenLeaf(Rule):
    name = "open"


@dataclass(frozen=True)
class BackLeaf(Rule):
    target: str
    name = "back"


LEAF_KINDS = (AxiomLeaf, AssumeLeaf, OpenLeaf, BackLeaf)

RULE_ARITY = {
    "and": 2, "case": 2, "cut": 2,
    "or": 1, "all": 1, "ex": 1, "ref": 1, "rep": 1, "add0": 1, "adds": 1,
    "mult0": 1, "mults": 1, "pred": 1, "weak": 1,
    "axiom": 0, "assume": 0, "open": 0, "back": 0,
}


def is_axiom(seq: Sequent) -> Optional[str]:
    """ax_a for a matching t0=t1 / t0!=t1 pair, ax_s for s(t)!=0, else None."""
    eqs = set()
    for f in seq:
        if isinstance(f, Eq):
            eqs.add((f.left.sx, f.right.sx))
    for f in seq:
        if isinstance(f, Neq) and (f.left.sx, f.right.sx) in eqs:
            return "ax_a"
    for f in seq:
        if isinstance(f, Neq) and isinstance(f.left, Succ) \
                and isinstance(f.right, Zero):
            return "ax_s"
    return None


def premises_of(conclusion: Sequent, r: Rule) -> List[Sequent]:
    """The unique premise list determined by the rule schema."""
    if isinstance(r, AndRule):
        if not isinstance(r.principal, And):
            raise ArgMismatch(f"(and) principal is not a conjunction: {r.principal.sx}")
        base = conclusion.remove_one(r.principal)
        return [base.add(r.principal.left), base.add(r.principal.right)]
    if isinstance(r, OrRule):
        if not isinstance(r.principal, Or):
            raise ArgMismatch(f"(or) principal is not a disjunction: {r.principal.sx}")
        base = conclusion.remove_one(r.principal)
        return [base.add(r.principal.left, r.principal.right)]
    if isinstance(r, AllRule):
        if not isinstance(r.principal, All):
            raise ArgMismatch(f"(all) principal is not universal: {r.principal.sx}")
        base = conclusion.remove_one(r.principal)
        if r.var in conclusion.fv:
            raise ArgMismatch(f"eigenvariable {r.var.name} occurs free in the conclusion")
        try:
            inst = substitute(r.principal.body, r.principal.var, V(r.var))
        except CaptureError as exc:
            raise ArgMismatch(str(exc)) from None
        return [base.add(inst)]
    if isinstance(r, ExRule):
        if not isinstance(r.principal, Ex):
            raise ArgMismatch(f"(ex) principal is not existential: {r.principal.sx}")
        if r.principal not in conclusion:
            raise ArgMismatch(f"{r.principal.sx} does not occur in {conclusion.sx}")
        try:
            inst = substitute(r.principal.body, r.principal.var, r.witness)
        except CaptureError as exc:
            raise ArgMismatch(str(exc)) from None
        return [conclusion.add(inst)]
    if isinstance(r, RefRule):
        return [conclusion.add(Neq(r.term, r.term))]
    if isinstance(r, RepRule):
        neq = Neq(r.t0, r.t1)
        if neq not in conclusion:
            raise ArgMismatch(f"(rep) needs {neq.sx} in the conclusion")
        if r.instance(r.t0) not in conclusion:
            raise ArgMismatch(f"(rep) needs the instance {r.instance(r.t0).sx}")
        return [conclusion.add(r.instance(r.t1))]
    if isinstance(r, Add0Rule):
        t = r.term
        return [conclusion.add(Neq(Add(t, ZERO), t))]
    if isinstance(r, AddSRule):
        t, u = r.term, r.arg
        return [conclusion.add(Neq(Add(t, Succ(u)), Succ(Add(t, u))))]
    if isinstance(r, Mult0Rule):
        t = r.term
        return [conclusion.add(Neq(Mul(t, ZERO), ZERO))]
    if isinstance(r, MultSRule):
        t, u = r.term, r.arg
        return [conclusion.add(Neq(Mul(t, Succ(u)), Add(Mul(t, u), t)))]
    if isinstance(r, PredRule):
        if Neq(Succ(r.t0), Succ(r.t1)) not in conclusion:
            raise ArgMismatch(f"(pred) needs {Neq(Succ(r.t0), Succ(r.t1)).sx}")
        return [conclusion.add(Neq(r.t0, r.t1))]
    if isinstance(r, CaseRule):
        if r.var not in conclusion.fv:
            raise ArgMismatch(f"case variable {r.var.name} is not free in {conclusion.sx}")
        zero = conclusion.map(lambda f: substitute(f, r.var, ZERO))
        succ = conclusion.map(lambda f: substitute(f, r.var, Succ(V(r.var))))
        return [zero, succ]
    if isinstance(r, WeakRule):
        return [conclusion.minus(r.delta)]
    if isinstance(r, CutRule):
        return [conclusion.add(r.formula), conclusion.add(negate(r.formula))]
    raise ArgMismatch(f"{r.name} has no premises")


@dataclass(frozen=True)
class StepError:
    rule: str
    message: str
    expected: Optional[Tuple[Sequent, ...]] = None


def check_step(conclusion: Sequent, r: Rule,
               children: List[Sequent]) -> Optional[StepError]:
    """None when the children are exactly the schema's premises, in order."""
    try:
        expected = premises_of(conclusion, r)
    except ArgMismatch as exc:
        return StepError(r.name, str(exc))
    if len(expected) != len(children):
        return StepError(r.name, f"expected {len(expected)} premises, got {len(children)}",
                         tuple(expected))
    for i, (want, got) in enumerate(zip(expected, children)):
        if want != got:
            return StepError(r.name, f"premise {i}: expected {want.sx}, got {got.sx}",
                             tuple(expected))
    return None


# --- proof trees ---------------------------------------------------------------

@dataclass(frozen=True)
class ProofNode:
    id: str
    sequent: Sequent
    rule: Rule
    children: Tuple["ProofNode", ...] = ()
    vars: Optional[frozenset] = None  # annotation; None when plain

    def with_vars(self, vs: Optional[frozenset]) -> "ProofNode":
        return ProofNode(self.id, self.sequent, self.rule, self.children, vs)


def walk(root: ProofNode) -> Iterator[ProofNode]:
    """Preorder, iterative (ground proofs can be long chains)."""
    stack = [root]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(node.children))


def node_map(root: ProofNode) -> Dict[str, ProofNode]:
    out = {}
    for node in walk(root):
        if node.id in out:
            raise ParseError(f"duplicate node id {node.id!r}")
        out[node.id] = node
    return out


def parent_map(root: ProofNode) -> Dict[str, Optional[str]]:
    out: Dict[str, Optional[str]] = {root.id: None}
    for node in walk(root):
        for child in node.children:
            out[child.id] = node.id
    return out


@dataclass(frozen=True)
class TreeIssue:
    node_id: str
    message: str


def check_tree(root: ProofNode, assumptions: Iterable[Formula] = ()) -> List[TreeIssue]:
    """Empty list when every step checks and every leaf is closed."""
    allowed = {f.sx for f in assumptions}
    issues = []
    for node in walk(root):
        r = node.rule
        if isinstance(r, AxiomLeaf):
            if node.children:
                issues.append(TreeIssue(node.id, "axiom leaf has children"))
            if is_axiom(node.sequent) is None:
                issues.append(TreeIssue(node.id, f"not an axiom: {node.sequent.sx}"))
        elif isinstance(r, AssumeLeaf):
            if node.children:
                issues.append(TreeIssue(node.id, "assumption leaf has children"))
            if len(node.sequent) != 1 or r.formula not in node.sequent:
                issues.append(TreeIssue(
                    node.id, f"assumption leaf must be exactly {{{r.formula.sx}}}"))
            elif r.formula.fv:
                issues.append(TreeIssue(node.id, "assumption must be a sentence"))
            elif r.formula.sx not in allowed:
                issues.append(TreeIssue(node.id, f"{r.formula.sx} is not an assumption"))
        elif isinstance(r, (OpenLeaf, BackLeaf)):
            issues.append(TreeIssue(node.id, f"({r.name}) leaf is not allowed in a closed tree"))
        else:
            err = check_step(node.sequent, r, [c.sequent for c in node.children])
            if err is not None:
                issues.append(TreeIssue(node.id, f"({err.rule}) {err.message}"))
    return issues


# --- parsing and rendering -----------------------------------------------------

def rule_from_sexpr(value) -> Rule:
    if not isinstance(value, list) or not value:
        raise ParseError(f"bad rule {sexpr.render(value)}")
    head = value[0]
    rest = value[1:]
    if head == "axiom" and not rest:
        return AxiomLeaf()
    if head == "assume" and len(rest) == 1:
        return AssumeLeaf(formula_from_sexpr(rest[0]))
    if head == "open" and not rest:
        return OpenLeaf()
    if head == "back" and len(rest) == 1 and isinstance(rest[0], str):
        return BackLeaf(rest[0])
    if head != "rule" or not rest:
        raise ParseError(f"bad rule {sexpr.render(value)}")
    name, args = rest[0], rest[1:]
    try:
        if name == "and" and len(args) == 1:
            return AndRule(formula_from_sexpr(args[0]))
        if name == "or" and len(args) == 1:
            return OrRule(formula_from_sexpr(args[0]))
        if name == "all" and len(args) == 2:
            return AllRule(formula_from_sexpr(args[0]), _var(args[1]))
        if name == "ex" and len(args) == 2:
            return ExRule(formula_from_sexpr(args[0]), term_from_sexpr(args[1]))
        if name == "ref" and len(args) == 1:
            return RefRule(term_from_sexpr(args[0]))
        if name == "rep" and len(args) == 5:
            return RepRule(term_from_sexpr(args[0]), term_from_sexpr(args[1]),
                           _var(args[2]), term_from_sexpr(args[3]),
                           term_from_sexpr(args[4]))
        if name == "add0" and len(args) == 1:
            return Add0Rule(term_from_sexpr(args[0]))
        if name == "adds" and len(args) == 2:
            return AddSRule(term_from_sexpr(args[0]), term_from_sexpr(args[1]))
        if name == "mult0" and len(args) == 1:
            return Mult0Rule(term_from_sexpr(args[0]))
        if name == "mults" and len(args) == 2:
            return MultSRule(term_from_sexpr(args[0]), term_from_sexpr(args[1]))
        if name == "pred" and len(args) == 2:
            return PredRule(term_from_sexpr(args[0]), term_from_sexpr(args[1]))
        if name == "case" and len(args) == 1:
            return CaseRule(_var(args[0]))
        if name == "weak" and len(args) == 1:
            return WeakRule(sequent_from_sexpr(args[0]))
        if name == "cut" and len(args) == 1:
            return CutRule(formula_from_sexpr(args[0]))
    except ParseError:
        raise
    except ValueError as exc:
        raise ParseError(str(exc)) from exc
    raise ParseError(f"bad rule {sexpr.render(value)}")


def _var(atom) -> Var:
    if not isinstance(atom, str) or isinstance(atom, list):
        raise ParseError(f"expected a variable, got {sexpr.render(atom)}")
    return ident_var(atom)


def rule_to_sexpr_str(r: Rule) -> str:
    if isinstance(r, AxiomLeaf):
        return "(axiom)"
    if isinstance(r, AssumeLeaf):
        return f"(assume {r.formula.sx})"
    if isinstance(r, OpenLeaf):
        return "(open)"
    if isinstance(r, BackLeaf):
        return f"(back {r.target})"
    args = r.args_sexpr()
    return "(rule " + r.name + "".join(" " + a for a in args) + ")"


def vars_to_sexpr_str(vs: frozenset) -> str:
    return "(vars" + "".join(" " + v.name for v in sorted(vs)) + ")"


def proof_from_sexpr(value) -> ProofNode:
    root = _node_from_sexpr(value)
    node_map(root)  # raises on duplicate ids
    return root


def _node_from_sexpr(value) -> ProofNode:
    if not isinstance(value, list) or len(value) < 4 or value[0] != "node" \
            or value[1] != ":id":
        raise ParseError(f"bad proof node {sexpr.render(value)[:80]}")
    label = value[2]
    if not isinstance(label, str) or isinstance(label, list) or not label:
        raise ParseError("node id must be an atom")
    seq_form = value[3]
    vs: Optional[frozenset] = None
    if isinstance(seq_form, list) and seq_form and seq_form[0] == "aseq":
        if len(seq_form) != 3 or not isinstance(seq_form[2], list) \
                or not seq_form[2] or seq_form[2][0] != "vars":
            raise ParseError(f"bad annotated sequent {sexpr.render(seq_form)}")
        seq = sequent_from_sexpr(seq_form[1])
        vs = frozenset(_var(a) for a in seq_form[2][1:])
    else:
        seq = sequent_from_sexpr(seq_form)
    if len(value) < 5:
        raise ParseError(f"node {label} is missing its rule")
    rule = rule_from_sexpr(value[4])
    children = tuple(_node_from_sexpr(v) for v in value[5:])
    if len(children) != RULE_ARITY[rule.name]:
        raise ParseError(f"node {label}: ({rule.name}) takes "
                         f"{RULE_ARITY[rule.name]} premises, got {len(children)}")
    return ProofNode(label, seq, rule, children, vs)


def parse_proof(text: str) -> ProofNode:
    try:
        return proof_from_sexpr(sexpr.parse(text))
    except sexpr.SexprError as exc:
        raise ParseError(str(exc)) from exc


def render_proof(root: ProofNode) -> str:
    """Deterministic indented rendering; parse_proof inverts it."""
    out: List[str] = []
    # (node, depth, True) opens a node; (None, depth, False) closes one
    stack: List[Tuple[Optional[ProofNode], int, bool]] = [(root, 0, True)]
    while stack:
        node, depth, opening = stack.pop()
        if not opening:
            out[-1] += ")"
            continue
        pad = "  " * depth
        head = f"{pad}(node :id {node.id}"
        if node.vars is None:
            head += f" {node.sequent.sx}"
        else:
            head += f" (aseq {node.sequent.sx} {vars_to_sexpr_str(node.vars)})"
        head += f" {rule_to_sexpr_str(node.rule)}"
        out.append(head)
        stack.append((None, depth, False))
        for child in reversed(node.children):
            stack.append((child, depth + 1, True))
    return "\n".join(out) + "\n"
