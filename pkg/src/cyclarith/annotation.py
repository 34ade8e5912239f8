"""Annotated sequents and deterministic annotation propagation.

An annotation is the set of case variables a branch is still protecting.
Propagation through a rule is a function of the conclusion's annotation, the
rule arguments, and the checking mode; the only rule that ever enlarges an
annotation is (case) on its right premise, and several rules reset it to the
empty set when their principal formula falls outside the mode's restriction
class.

Modes: `sn` and `spi` restrict against Pi_{n+1}; `ssigma` against Sigma_n.
They differ in the (case) right-premise test -- `sn` asks that the case
variable occur freely only in restriction-class formulas, `spi`/`ssigma`
ask that the whole conclusion lie in the class -- and `ssigma` additionally
resets annotations across every (all) inference.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import List

from . import sexpr
from .calculus import (AllRule, AndRule, ArgMismatch, CaseRule, CutRule,
                       ProofNode, Rule, RULE_ARITY, sequent_from_sexpr,
                       vars_to_sexpr_str)
from .syntax import (CaptureError, Formula, PI, ParseError, SIGMA, V,
                     ident_var, is_in, negate, substitute)


class System(enum.Enum):
    SN = "sn"
    SPI = "spi"
    SSIGMA = "ssigma"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class Mode:
    system: System
    level: int
    assumptions: frozenset = frozenset()

    def __post_init__(self):
        if self.level < 0:
            raise ValueError("level must be >= 0")

    def in_restriction(self, phi: Formula) -> bool:
        """Membership in the mode's restriction class."""
        if self.system is System.SSIGMA:
            return is_in(phi, SIGMA, self.level)
        return is_in(phi, PI, self.level + 1)


EMPTY: frozenset = frozenset()


@dataclass(frozen=True)
class AnnotatedSequent:
    sequent: Sequent
    vars: frozenset

    @property
    def sx(self) -> str:
        return f"(aseq {self.sequent.sx} {vars_to_sexpr_str(self.vars)})"

    def __repr__(self):
        return self.sx


def aseq_from_sexpr(value) -> AnnotatedSequent:
    if not isinstance(value, list) or len(value) != 3 or value[0] != "aseq" \
            or not isinstance(value[2], list) or not value[2] \
            or value[2][0] != "vars":
        raise ParseError(f"bad annotated sequent {sexpr.render(value)}")
    seq = sequent_from_sexpr(value[1])
    names = value[2][1:]
    for a in names:
        if not isinstance(a, str):
            raise ParseError(f"bad variable {sexpr.render(a)}")
    return AnnotatedSequent(seq, frozenset(ident_var(a) for a in names))


def parse_aseq(text: str) -> AnnotatedSequent:
    return aseq_from_sexpr(sexpr.parse(text))


def propagate(conclusion: AnnotatedSequent, r: Rule, mode: Mode) -> List[frozenset]:
    """One annotation per premise of r, uniquely determined."""
    seq = conclusion.sequent
    vs = conclusion.vars
    if isinstance(r, AndRule):
        return [vs if mode.in_restriction(r.principal.left) else EMPTY,
                vs if mode.in_restriction(r.principal.right) else EMPTY]
    if isinstance(r, CutRule):
        return [vs if mode.in_restriction(r.formula) else EMPTY,
                vs if mode.in_restriction(negate(r.formula)) else EMPTY]
    if isinstance(r, AllRule):
        if mode.system is System.SSIGMA:
            return [EMPTY]
        try:
            inst = substitute(r.principal.body, r.principal.var, V(r.var))
        except (CaptureError, AttributeError) as exc:
            raise ArgMismatch(str(exc)) from None
        keep = r.var not in vs and mode.in_restriction(inst)
        return [vs if keep else EMPTY]
    if isinstance(r, CaseRule):
        if mode.system is System.SN:
            ok = all(mode.in_restriction(f) for f in seq if r.var in f.fv)
        else:
            ok = all(mode.in_restriction(f) for f in seq)
        return [EMPTY, vs | {r.var} if ok else EMPTY]
    return [vs] * RULE_ARITY[r.name]


def annotate_tree(root: ProofNode, root_vars, mode: Mode) -> ProofNode:
    """Annotated copy: root carries root_vars, the rest by propagation.

    Works on cyclic trees too; back-reference leaves are annotated by their
    tree position (whether that matches their target is the checker's job).
    """
    def go(node: ProofNode, vs: frozenset) -> ProofNode:
        anns = propagate(AnnotatedSequent(node.sequent, vs), node.rule, mode)
        kids = tuple(go(c, a) for c, a in zip(node.children, anns))
        return ProofNode(node.id, node.sequent, node.rule, kids, vs)

    return go(root, frozenset(root_vars))


def erase(root: ProofNode) -> ProofNode:
    """Annotation-free copy; ids, sequents, and rules unchanged."""
    def go(node: ProofNode) -> ProofNode:
        return ProofNode(node.id, node.sequent, node.rule,
                         tuple(go(c) for c in node.children), None)

    return go(root)


def is_annotated(root: ProofNode) -> bool:
    return all(n.vars is not None for n in _walk(root))


def _walk(root):
    stack = [root]
    while stack:
        n = stack.pop()
        yield n
        stack.extend(n.children)
