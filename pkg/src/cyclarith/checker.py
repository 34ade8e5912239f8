"""Validation of cyclic annotated proofs.

A cyclic proof is a finite annotated tree whose back-reference leaves point
at proper ancestors. Validity is entirely local plus one path condition per
back-link: the target must carry the same sequent and the same annotation as
the leaf, the annotation must stay constant and non-empty all the way down
from target to leaf, and the path must cross the right premise of a (case)
inference at least once. Reports carry one tagged violation per defect, so
an invalid proof lists everything wrong with it, not just the first problem.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Tuple, Union

from . import sexpr
from .annotation import AnnotatedSequent, Mode, propagate
from .calculus import (ArgMismatch, AssumeLeaf, AxiomLeaf, BackLeaf, CaseRule,
                       LEAF_KINDS, OpenLeaf, ProofNode, check_step, is_axiom,
                       node_map, parent_map, walk)
from .semantics import (DEFAULT_CUTOFF, DEFAULT_VALUE_BOUND, TV,
                        all_assignments, sequent_truth)
from .syntax import ParseError


class CyclicProof:
    """A proof tree bundled with its id and parent maps.

    backlinks maps each back-reference leaf id to its target id; the target
    is not checked here beyond id existence, validate() owns the rest.
    """

    __slots__ = ("root", "nodes", "parents", "backlinks")

    def __init__(self, root: ProofNode):
        self.root = root
        self.nodes = node_map(root)
        self.parents = parent_map(root)
        self.backlinks = {n.id: n.rule.target for n in self.nodes.values()
                          if isinstance(n.rule, BackLeaf)}

    def ancestors(self, node_id: str) -> List[str]:
        """Ids on the path from node_id up to the root, excluding node_id."""
        out = []
        cur = self.parents.get(node_id)
        while cur is not None:
            out.append(cur)
            cur = self.parents.get(cur)
        return out

    def path_down(self, top_id: str, bottom_id: str) -> Optional[List[str]]:
        """Ids from top_id down to bottom_id inclusive, or None."""
        chain = [bottom_id]
        cur = bottom_id
        while cur != top_id:
            cur = self.parents.get(cur)
            if cur is None:
                return None
            chain.append(cur)
        chain.reverse()
        return chain


@dataclass(frozen=True)
class Violation:
    node_id: str
    tag: str
    message: str


@dataclass(frozen=True)
class ProofStats:
    nodes: int
    backlinks: int
    cycle_lengths: Tuple[int, ...]


@dataclass(frozen=True)
class ValidationReport:
    verdict: str  # "valid" | "invalid"
    violations: Tuple[Violation, ...]
    stats: ProofStats

    @property
    def valid(self) -> bool:
        return self.verdict == "valid"


def validate(proof: Union[CyclicProof, ProofNode], mode: Mode) -> ValidationReport:
    if isinstance(proof, ProofNode):
        proof = CyclicProof(proof)
    violations: List[Violation] = []
    bad = violations.append
    nodes = proof.nodes

    for node in walk(proof.root):
        if node.vars is None:
            bad(Violation(node.id, "Unannotated", "node carries no annotation"))

    # local steps and annotation propagation
    for node in walk(proof.root):
        if node.vars is None:
            continue
        r = node.rule
        if isinstance(r, LEAF_KINDS):
            _check_leaf(proof, node, mode, bad)
            continue
        err = check_step(node.sequent, r, [c.sequent for c in node.children])
        if err is not None:
            bad(Violation(node.id, "Step", err.message))
            continue
        try:
            anns = propagate(AnnotatedSequent(node.sequent, node.vars), r, mode)
        except ArgMismatch as exc:
            bad(Violation(node.id, "Step", str(exc)))
            continue
        for child, want in zip(node.children, anns):
            if isinstance(child.rule, AssumeLeaf):
                continue  # assumption leaves may carry anything
            if child.vars is not None and child.vars != want:
                bad(Violation(child.id, "Annotation",
                              f"expected {_vset(want)}, found {_vset(child.vars)}"))

    cycle_lengths = []
    for leaf_id, target_id in sorted(proof.backlinks.items()):
        leaf = nodes[leaf_id]
        if target_id not in nodes:
            bad(Violation(leaf_id, "DanglingTarget",
                          f"no node with id {target_id}"))
            continue
        if target_id not in proof.ancestors(leaf_id):
            bad(Violation(leaf_id, "NotAncestor",
                          f"{target_id} is not a proper ancestor"))
            continue
        target = nodes[target_id]
        pth = proof.path_down(target_id, leaf_id)
        cycle_lengths.append(len(pth) - 1)
        if leaf.sequent != target.sequent:
            bad(Violation(leaf_id, "SequentMismatch",
                          f"leaf {leaf.sequent.sx} vs target {target.sequent.sx}"))
        if leaf.vars is None or target.vars is None:
            continue  # already reported as Unannotated
        if leaf.vars != target.vars:
            bad(Violation(leaf_id, "AnnotationMismatch",
                          f"leaf {_vset(leaf.vars)} vs target {_vset(target.vars)}"))
            continue
        wanted = target.vars
        if not wanted:
            bad(Violation(leaf_id, "EmptyAnnotation",
                          "annotation on the cycle is empty"))
        else:
            for nid in pth:
                nvars = nodes[nid].vars
                if nvars is not None and nvars != wanted:
                    bad(Violation(leaf_id, "AnnotationMismatch",
                                  f"annotation changes at {nid}"))
                    break
        if not _crosses_case_right(nodes, pth):
            bad(Violation(leaf_id, "NoProgress",
                          "no (case) right premise on the cycle"))

    stats = ProofStats(len(nodes), len(proof.backlinks), tuple(cycle_lengths))
    verdict = "valid" if not violations else "invalid"
    return ValidationReport(verdict, tuple(violations), stats)


def _check_leaf(proof: CyclicProof, node: ProofNode, mode: Mode, bad) -> None:
    r = node.rule
    if node.children:
        bad(Violation(node.id, "Step", "leaf with children"))
    if isinstance(r, AxiomLeaf):
        if is_axiom(node.sequent) is None:
            bad(Violation(node.id, "AxiomLeaf",
                          f"not an axiom: {node.sequent.sx}"))
    elif isinstance(r, AssumeLeaf):
        if len(node.sequent) != 1 or node.sequent.count(r.formula) != 1:
            bad(Violation(node.id, "AssumeLeaf",
                          "assumption leaf sequent must be the assumed formula alone"))
        elif r.formula.fv:
            bad(Violation(node.id, "AssumeLeaf",
                          "assumed formula must be a sentence"))
        elif not any(r.formula == f for f in mode.assumptions):
            bad(Violation(node.id, "AssumeLeaf",
                          f"not among the declared assumptions: {r.formula.sx}"))
    elif isinstance(r, OpenLeaf):
        bad(Violation(node.id, "OpenLeaf", "open leaves are not allowed"))
    # BackLeaf handled by the cycle pass


def _crosses_case_right(nodes, pth: List[str]) -> bool:
    for up, down in zip(pth, pth[1:]):
        n = nodes[up]
        if isinstance(n.rule, CaseRule) and len(n.children) == 2 \
                and n.children[1].id == down:
            return True
    return False


def _vset(vs) -> str:
    return "{" + " ".join(sorted(v.name for v in vs)) + "}"


# --- progress on finite unfoldings ----------------------------------------------

@dataclass(frozen=True)
class ProgressReport:
    ok: bool
    segments: int
    issues: Tuple[str, ...]


def check_progress_on_unfolding(proof: Union[CyclicProof, ProofNode],
                                depth: int) -> ProgressReport:
    """Unfold back-links up to a depth bound and check segment discipline.

    On each root-to-frontier path, the stretches between consecutive
    back-link jumps must contain at least one (case) right edge and no
    (case) left edge. The stretch before the first jump is exempt, as is
    any unfinished stretch cut off by the depth bound.
    """
    if isinstance(proof, ProofNode):
        proof = CyclicProof(proof)
    nodes = proof.nodes
    issues: List[str] = []
    segments = 0

    # state: (node, depth, in_segment, rights, lefts)
    stack = [(proof.root, 0, False, 0, 0)]
    while stack:
        node, d, tracking, rights, lefts = stack.pop()
        if isinstance(node.rule, BackLeaf):
            target = nodes.get(node.rule.target)
            if target is None:
                issues.append(f"{node.id}: dangling back-reference")
                continue
            if tracking:
                segments += 1
                if lefts:
                    issues.append(
                        f"{node.id}: cycle segment crosses a (case) left premise")
                if not rights:
                    issues.append(
                        f"{node.id}: cycle segment crosses no (case) right premise")
            if d < depth:
                stack.append((target, d, True, 0, 0))
            continue
        if d >= depth or not node.children:
            continue
        is_case = isinstance(node.rule, CaseRule)
        for i, child in enumerate(node.children):
            r2 = rights + (1 if is_case and i == 1 else 0)
            l2 = lefts + (1 if is_case and i == 0 else 0)
            stack.append((child, d + 1, tracking, r2, l2))

    return ProgressReport(not issues, segments, tuple(issues))


# --- sampled soundness -----------------------------------------------------------

@dataclass(frozen=True)
class SoundnessReport:
    ok: bool
    checked: int
    hits: Tuple[Tuple[str, str, str], ...]  # (node id, assignment, note)


def soundness_sample(proof: Union[CyclicProof, ProofNode],
                     value_bound: int = DEFAULT_VALUE_BOUND,
                     cutoff: int = DEFAULT_CUTOFF) -> SoundnessReport:
    """Grid check: no node's sequent evaluates to false outright.

    A false sequent under some assignment of the grid means the proof
    claims something refutable, which a sound derivation never does when
    its assumptions hold.
    """
    root = proof.root if isinstance(proof, CyclicProof) else proof
    hits: List[Tuple[str, str, str]] = []
    checked = 0
    for node in walk(root):
        fvs = sorted(node.sequent.fv)
        for env in all_assignments(fvs, value_bound):
            checked += 1
            if sequent_truth(node.sequent, env, cutoff) is TV.FALSE:
                shown = ",".join(f"{v.name}={env[v]}" for v in fvs)
                hits.append((node.id, shown, node.sequent.sx))
    return SoundnessReport(not hits, checked, tuple(hits))


# --- report rendering ------------------------------------------------------------

def render_report(report: ValidationReport, fmt: str = "text") -> str:
    if fmt == "sexpr":
        parts = [f"(verdict {report.verdict})"]
        for v in report.violations:
            parts.append(f"(violation (node {v.node_id}) (tag {v.tag}) "
                         f"(message {sexpr.render(sexpr.QuotedString(v.message))}))")
        cyc = "".join(f" {k}" for k in report.stats.cycle_lengths)
        parts.append(f"(stats (nodes {report.stats.nodes}) "
                     f"(backlinks {report.stats.backlinks}) (cycles{cyc}))")
        return "(report\n  " + "\n  ".join(parts) + ")"
    lines = [f"verdict: {report.verdict}"]
    for v in report.violations:
        lines.append(f"  {v.tag} at {v.node_id}: {v.message}")
    s = report.stats
    cyc = ", ".join(str(k) for k in s.cycle_lengths) or "-"
    lines.append(f"nodes: {s.nodes}  backlinks: {s.backlinks}  cycle lengths: {cyc}")
    return "\n".join(lines)


def report_from_sexpr(value) -> ValidationReport:
    if not isinstance(value, list) or not value or value[0] != "report":
        raise ParseError("expected (report ...)")
    verdict = None
    violations = []
    stats = ProofStats(0, 0, ())
    for item in value[1:]:
        if not isinstance(item, list) or not item:
            raise ParseError(f"bad report entry {sexpr.render(item)}")
        if item[0] == "verdict":
            verdict = item[1]
        elif item[0] == "violation":
            fields = {e[0]: e[1] for e in item[1:]}
            violations.append(Violation(fields["node"], fields["tag"],
                                        str(fields.get("message", ""))))
        elif item[0] == "stats":
            fields = {e[0]: e[1:] for e in item[1:]}
            stats = ProofStats(int(fields["nodes"][0]),
                               int(fields["backlinks"][0]),
                               tuple(int(k) for k in fields.get("cycles", ())))
    if verdict not in ("valid", "invalid"):
        raise ParseError("report lacks a verdict")
    return ValidationReport(verdict, tuple(violations), stats)


def parse_report(text: str) -> ValidationReport:
    return report_from_sexpr(sexpr.parse(text))
