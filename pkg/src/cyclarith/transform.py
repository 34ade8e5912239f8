"""Regular proof graphs, unravelling, and ravelling.

A regular proof graph is the rolled-up presentation of a proof tree with
finitely many distinct subtrees: nodes carry annotated sequents and rules,
children are id references, and cycles are ordinary child edges. Ravelling
unrolls such a graph depth-first into a cyclic proof, installing a
back-reference the first time the current path revisits a graph node;
unravelling goes the other way, following back-references as jumps and
cutting the tree off with Open leaves at a depth bound.

Two distinct graph nodes with structurally identical unfoldings are never
merged; repeats are detected by node id, not by comparing unfoldings.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple, Union

from . import sexpr
from .annotation import AnnotatedSequent, Mode, aseq_from_sexpr, propagate
from .calculus import (ArgMismatch, AssumeLeaf, BackLeaf, CaseRule,
                       LEAF_KINDS, OpenLeaf, ProofNode, RULE_ARITY, Rule,
                       Sequent, check_step, rule_from_sexpr, rule_to_sexpr_str,
                       sequent_from_sexpr, walk)
from .checker import CyclicProof
from .syntax import ParseError


@dataclass(frozen=True)
class GNode:
    id: str
    sequent: Sequent
    vars: Optional[frozenset]
    rule: Rule
    children: Tuple[str, ...]


class RegularProofGraph:
    __slots__ = ("root", "nodes")

    def __init__(self, root: str, nodes: Dict[str, GNode]):
        if root not in nodes:
            raise ValueError(f"root {root} is not a node")
        for n in nodes.values():
            if isinstance(n.rule, (OpenLeaf, BackLeaf)):
                raise ValueError(f"{n.id}: open/back leaves have no place in a graph")
            want = RULE_ARITY[n.rule.name]
            if len(n.children) != want:
                raise ValueError(f"{n.id}: rule {n.rule.name} needs "
                                 f"{want} children, has {len(n.children)}")
            for c in n.children:
                if c not in nodes:
                    raise ValueError(f"{n.id}: unknown child {c}")
        seen = set()
        stack = [root]
        while stack:
            nid = stack.pop()
            if nid in seen:
                continue
            seen.add(nid)
            stack.extend(nodes[nid].children)
        stray = sorted(set(nodes) - seen)
        if stray:
            raise ValueError(f"unreachable nodes: {', '.join(stray)}")
        self.root = root
        self.nodes = dict(nodes)

    def __eq__(self, other):
        return isinstance(other, RegularProofGraph) and \
            self.root == other.root and self.nodes == other.nodes

    def __repr__(self):
        return f"RegularProofGraph(root={self.root!r}, {len(self.nodes)} nodes)"


def graph_of(proof: Union[CyclicProof, ProofNode]) -> RegularProofGraph:
    """Collapse each back-reference into a child edge to its target."""
    if isinstance(proof, ProofNode):
        proof = CyclicProof(proof)
    nodes: Dict[str, GNode] = {}
    for n in walk(proof.root):
        if isinstance(n.rule, BackLeaf):
            continue
        kids = []
        for c in n.children:
            if isinstance(c.rule, BackLeaf):
                target = c.rule.target
                if target not in proof.nodes:
                    raise ValueError(f"{c.id}: dangling back-reference {target}")
                kids.append(target)
            else:
                kids.append(c.id)
        nodes[n.id] = GNode(n.id, n.sequent, n.vars, n.rule, tuple(kids))
    return RegularProofGraph(proof.root.id, nodes)


class RavelError(Exception):
    def __init__(self, path: Tuple[str, ...], condition: str):
        self.path = tuple(path)
        self.condition = condition
        super().__init__(f"{condition} (path {' -> '.join(self.path)})")


def ravel(g: RegularProofGraph, mode: Mode) -> CyclicProof:
    """Unroll g into a cyclic proof, back-linking at the first on-path repeat.

    The graph must be locally rule-correct and annotation-consistent under
    mode; that and the back-link side conditions at each cut point are
    checked during the walk, and RavelError pinpoints the first failure.
    """
    _check_graph_local(g, mode)
    emitted = set()
    counters: Dict[str, int] = {}

    def fresh_id(gid: str) -> str:
        # first visit keeps the graph id; later visits append ~k, skipping
        # anything that would collide with another graph id
        k = counters.get(gid, 0)
        while True:
            cand = gid if k == 0 else f"{gid}~{k}"
            k += 1
            if cand not in emitted and (cand == gid or cand not in g.nodes):
                break
        counters[gid] = k
        emitted.add(cand)
        return cand

    # path entries: (graph id, tree id, edge to the next path element is a
    # case-right edge)
    def expand(gid: str, path: List[Tuple[str, str, bool]]) -> ProofNode:
        gn = g.nodes[gid]
        hit = next((i for i, (pg, _, _) in enumerate(path) if pg == gid), None)
        if hit is not None:
            gids = [p[0] for p in path[hit:]] + [gid]
            if gn.vars is None:
                raise RavelError(gids, "Unannotated")
            if not gn.vars:
                raise RavelError(gids, "EmptyAnnotation")
            for pg, _, _ in path[hit:]:
                if g.nodes[pg].vars != gn.vars:
                    raise RavelError(gids, "AnnotationMismatch")
            if not any(cr for _, _, cr in path[hit:]):
                raise RavelError(gids, "NoProgress")
            return ProofNode(fresh_id(gid), gn.sequent,
                             BackLeaf(path[hit][1]), (), gn.vars)
        tid = fresh_id(gid)
        kids = []
        for i, cgid in enumerate(gn.children):
            cross = isinstance(gn.rule, CaseRule) and i == 1
            path.append((gid, tid, cross))
            kids.append(expand(cgid, path))
            path.pop()
        return ProofNode(tid, gn.sequent, gn.rule, tuple(kids), gn.vars)

    return CyclicProof(expand(g.root, []))


def _check_graph_local(g: RegularProofGraph, mode: Mode) -> None:
    for gn in g.nodes.values():
        if isinstance(gn.rule, LEAF_KINDS):
            continue
        premises = [g.nodes[c].sequent for c in gn.children]
        err = check_step(gn.sequent, gn.rule, premises)
        if err is not None:
            raise RavelError((gn.id,), f"Step: {err.message}")
        if gn.vars is None:
            continue
        try:
            anns = propagate(AnnotatedSequent(gn.sequent, gn.vars),
                             gn.rule, mode)
        except ArgMismatch as exc:
            raise RavelError((gn.id,), f"Step: {exc}") from None
        for cgid, want in zip(gn.children, anns):
            child = g.nodes[cgid]
            if isinstance(child.rule, AssumeLeaf):
                continue
            if child.vars is not None and child.vars != want:
                raise RavelError((gn.id, cgid), "AnnotationMismatch")


def unravel(proof: Union[CyclicProof, ProofNode], depth: int) -> ProofNode:
    """Depth-bounded unfolding; ids record the path from the root.

    Back-references are followed in place (a jump costs no depth). A node
    sitting at the bound keeps its place if it is a closing leaf and becomes
    an Open leaf otherwise.
    """
    if isinstance(proof, ProofNode):
        proof = CyclicProof(proof)
    nodes = proof.nodes

    def go(node: ProofNode, d: int, pid: str) -> ProofNode:
        if isinstance(node.rule, BackLeaf):
            node = nodes[node.rule.target]
        if isinstance(node.rule, LEAF_KINDS):
            return ProofNode(pid, node.sequent, node.rule, (), node.vars)
        if d >= depth:
            return ProofNode(pid, node.sequent, OpenLeaf(), (), node.vars)
        kids = tuple(go(c, d + 1, pid + str(i))
                     for i, c in enumerate(node.children))
        return ProofNode(pid, node.sequent, node.rule, kids, node.vars)

    return go(proof.root, 0, "n")


def expand_graph(g: RegularProofGraph, depth: int) -> ProofNode:
    """Depth-bounded expansion of a graph, same id scheme as unravel."""
    def go(gid: str, d: int, pid: str) -> ProofNode:
        gn = g.nodes[gid]
        if isinstance(gn.rule, LEAF_KINDS):
            return ProofNode(pid, gn.sequent, gn.rule, (), gn.vars)
        if d >= depth:
            return ProofNode(pid, gn.sequent, OpenLeaf(), (), gn.vars)
        kids = tuple(go(c, d + 1, pid + str(i))
                     for i, c in enumerate(gn.children))
        return ProofNode(pid, gn.sequent, gn.rule, kids, gn.vars)

    return go(g.root, 0, "n")


def prefix_equal(a: ProofNode, b: ProofNode) -> bool:
    """Tree equality up to Open leaves, which cut the comparison short."""
    if isinstance(a.rule, OpenLeaf) or isinstance(b.rule, OpenLeaf):
        return a.id == b.id and a.sequent == b.sequent and a.vars == b.vars
    if (a.id, a.sequent, a.rule, a.vars) != (b.id, b.sequent, b.rule, b.vars):
        return False
    if len(a.children) != len(b.children):
        return False
    return all(prefix_equal(x, y) for x, y in zip(a.children, b.children))


# --- graph file format -----------------------------------------------------------

def render_graph(g: RegularProofGraph) -> str:
    lines = ["(graph", f"  (root {g.root})"]
    for gn in g.nodes.values():
        if gn.vars is None:
            seq = gn.sequent.sx
        else:
            seq = AnnotatedSequent(gn.sequent, gn.vars).sx
        kids = "".join(f" {c}" for c in gn.children)
        lines.append(f"  (gnode :id {gn.id} {seq} {rule_to_sexpr_str(gn.rule)}"
                     f" (children{kids}))")
    return "\n".join(lines) + ")"


def graph_from_sexpr(value) -> RegularProofGraph:
    if not isinstance(value, list) or not value or value[0] != "graph":
        raise ParseError("expected (graph ...)")
    root = None
    nodes: Dict[str, GNode] = {}
    for item in value[1:]:
        if not isinstance(item, list) or not item:
            raise ParseError(f"bad graph entry {sexpr.render(item)}")
        if item[0] == "root" and len(item) == 2 and isinstance(item[1], str):
            root = item[1]
        elif item[0] == "gnode":
            if len(item) != 6 or item[1] != ":id" or not isinstance(item[2], str):
                raise ParseError(f"bad gnode {sexpr.render(item)}")
            nid = item[2]
            if nid in nodes:
                raise ParseError(f"duplicate node id {nid}")
            seqform = item[3]
            if isinstance(seqform, list) and seqform and seqform[0] == "aseq":
                aseq = aseq_from_sexpr(seqform)
                seq, vs = aseq.sequent, aseq.vars
            else:
                seq, vs = sequent_from_sexpr(seqform), None
            rule = rule_from_sexpr(item[4])
            kidsform = item[5]
            if not isinstance(kidsform, list) or not kidsform \
                    or kidsform[0] != "children" \
                    or not all(isinstance(c, str) for c in kidsform[1:]):
                raise ParseError(f"bad children list {sexpr.render(item)}")
            nodes[nid] = GNode(nid, seq, vs, rule, tuple(kidsform[1:]))
        else:
            raise ParseError(f"bad graph entry {sexpr.render(item)}")
    if root is None:
        raise ParseError("graph lacks a root")
    try:
        return RegularProofGraph(root, nodes)
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def parse_graph(text: str) -> RegularProofGraph:
    return graph_from_sexpr(sexpr.parse(text))
