"""Extraction of explicit induction certificates from cyclic proofs.

Given a valid cyclic proof whose root sits on a cycle, the extractor
computes the set M of nodes with a directed path back to the root (tree
edges plus back-references), splits every M-sequent into its restriction
class part Psi and remainder Phi, and assembles

    theta = forall B . /\\_{c in C} \\/ Psi_c
    zeta(z) = forall y1<=z ... forall ym<=z (y1+...+ym = z -> theta)

where C collects the (case) conclusions in M, y1..ym their case variables,
and B the eigenvariables of (forall) inferences in M. The certificate
carries theta, zeta, and the proof obligations that reduce the cyclic
argument to ordinary induction on z: a base and step for zeta, one
equivalence of Phi-parts per edge inside M, one theta-to-sequent
obligation per M-node, and a discharge obligation at the root.

Proofs whose root lies on no cycle yield the NoRootCycle marker instead;
extract_all recurses below such roots and emits one certificate per
maximal root-cycle component, outermost first.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Dict, Iterable, List, Mapping, Tuple, Union

from . import sexpr
from .annotation import Mode, System
from .calculus import (AllRule, AndRule, BackLeaf, CaseRule, CutRule,
                       ProofNode, Sequent, walk)
from .checker import CyclicProof
from .semantics import (DEFAULT_CUTOFF, DEFAULT_VALUE_BOUND, TV,
                        all_assignments, eval_formula)
from .syntax import (And, All, AllLe, Add, BOT, Eq, Formula, Neq, Or, PI,
                     ParseError, SIGMA, Succ, TOP, V, Var, ZERO, desugar,
                     formula_from_sexpr, iff, impl, is_in, negate, substitute)


class NoRootCycle:
    """Marker: the proof's root lies on no directed cycle."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "NoRootCycle"


NO_ROOT_CYCLE = NoRootCycle()


class ExtractionError(Exception):
    pass


STATUS_UNCHECKED = "unchecked"
STATUS_TRUE = "bounded-true"
STATUS_UNKNOWN = "bounded-unknown"
STATUS_FALSE = "false"  # diagnostic only: flags an extractor bug

KINDS = ("base", "step", "side-equiv", "theta-gamma", "root-discharge")

# one-letter case tags keyed by the rule of the edge's source node;
# back-reference edges are tagged "link" since they apply no rule
EDGE_TAGS = {
    "ref": "A", "rep": "A", "add0": "A", "adds": "A", "mult0": "A",
    "mults": "A", "pred": "A",
    "weak": "B", "or": "C", "ex": "D", "all": "E", "and": "F", "cut": "G",
    "case": "H", "back": "link",
}


@dataclass(frozen=True)
class Obligation:
    kind: str
    formula: Formula
    desugared: Formula
    status: str = STATUS_UNCHECKED
    about: Tuple[str, ...] = ()


@dataclass(frozen=True)
class InductionCertificate:
    level: int
    system: System
    root: str
    m_nodes: Tuple[str, ...]          # preorder
    c_nodes: Tuple[str, ...]          # preorder
    b_vars: Tuple[Var, ...]           # name-sorted
    case_vars: Tuple[Var, ...]        # first-occurrence order
    fresh_z: Var
    theta: Formula
    zeta: Formula                     # has fresh_z free
    phi_root: Formula
    phi_root_trivial: bool
    ranks: Mapping[str, int]
    obligations: Tuple[Obligation, ...]
    edge_tags: Tuple[Tuple[str, str, str], ...]
    notes: Tuple[str, ...] = ()

    def zeta_at(self, t) -> Formula:
        return substitute(self.zeta, self.fresh_z, t)


# --- the directed graph over the proof tree --------------------------------------

def directed_successors(proof: CyclicProof) -> Dict[str, List[str]]:
    """Tree edges parent -> child, plus back-reference jumps."""
    succ: Dict[str, List[str]] = {}
    for n in walk(proof.root):
        if isinstance(n.rule, BackLeaf):
            succ[n.id] = [n.rule.target]
        else:
            succ[n.id] = [c.id for c in n.children]
    return succ


def compute_M(proof: Union[CyclicProof, ProofNode]):
    """Node ids with a directed path to the root, or NoRootCycle."""
    if isinstance(proof, ProofNode):
        proof = CyclicProof(proof)
    root_id = proof.root.id
    if root_id not in proof.backlinks.values():
        return NO_ROOT_CYCLE
    pred: Dict[str, List[str]] = {nid: [] for nid in proof.nodes}
    for u, vs in directed_successors(proof).items():
        for v in vs:
            pred[v].append(u)
    seen = {root_id}
    queue = [root_id]
    while queue:
        nid = queue.pop()
        for p in pred[nid]:
            if p not in seen:
                seen.add(p)
                queue.append(p)
    return frozenset(seen)


def split_sequent(seq: Sequent, mode: Mode) -> Tuple[Tuple[Formula, ...],
                                                     Tuple[Formula, ...]]:
    """(Phi, Psi): the restriction-class members land in Psi, rest in Phi."""
    phi, psi = [], []
    for f in seq:
        (psi if mode.in_restriction(f) else phi).append(f)
    return tuple(phi), tuple(psi)


def _disj(formulas) -> Formula:
    out = None
    for f in formulas:
        out = f if out is None else Or(out, f)
    return BOT if out is None else out


def _conj(formulas) -> Formula:
    out = None
    for f in formulas:
        out = f if out is None else And(out, f)
    if out is None:
        raise ExtractionError("empty conjunction")
    return out


def _fresh_named(avoid) -> Var:
    names = {v.name for v in avoid}
    k = 0
    cand = "z"
    while cand in names:
        cand = f"z{k}"
        k += 1
    return Var(cand)


# --- ranks ------------------------------------------------------------------------

def compute_ranks(proof: CyclicProof, m_nodes, c_nodes) -> Dict[str, int]:
    """Longest directed path to the first (case) conclusion, in edges."""
    m = set(m_nodes)
    c = set(c_nodes)
    succ = {u: [v for v in vs if v in m]
            for u, vs in directed_successors(proof).items() if u in m}
    memo: Dict[str, int] = {u: 0 for u in c}
    state: Dict[str, int] = {}

    def rk(u: str) -> int:
        if u in memo:
            return memo[u]
        if state.get(u) == 1:
            raise ExtractionError(f"directed cycle through {u} avoids every "
                                  "(case) conclusion")
        state[u] = 1
        best = 0
        for v in succ[u]:
            best = max(best, 1 + (0 if v in c else rk(v)))
        state[u] = 2
        memo[u] = best
        return best

    for u in m:
        rk(u)
    return {u: memo[u] for u in m}


def rank(proof: CyclicProof, m_nodes, c_nodes, node_id: str) -> int:
    if node_id not in set(m_nodes):
        raise ValueError(f"{node_id} is not in M")
    return compute_ranks(proof, m_nodes, c_nodes)[node_id]


# --- extraction -------------------------------------------------------------------

def extract_certificate(proof: Union[CyclicProof, ProofNode], mode: Mode):
    """Certificate for the root cycle, or NoRootCycle. Input must be valid."""
    if isinstance(proof, ProofNode):
        proof = CyclicProof(proof)
    m_set = compute_M(proof)
    if isinstance(m_set, NoRootCycle):
        return m_set
    nodes = proof.nodes
    root = proof.root
    n = mode.level
    if root.vars is None:
        raise ExtractionError("proof is not annotated")
    root_vars = root.vars

    preorder_m = [nd.id for nd in walk(root) if nd.id in m_set]
    for nid in preorder_m:
        if nodes[nid].vars != root_vars:
            raise ExtractionError(
                f"{nid}: annotation differs from the root's")

    phis: Dict[str, Formula] = {}
    psis: Dict[str, Formula] = {}
    for nid in preorder_m:
        phi_part, psi_part = split_sequent(nodes[nid].sequent, mode)
        if mode.system in (System.SPI, System.SSIGMA) and phi_part:
            raise ExtractionError(
                f"{nid}: sequent leaves the restriction class in mode "
                f"{mode.system}")
        phis[nid] = negate(_disj(phi_part))
        psis[nid] = _disj(psi_part)

    b_set = set()
    c_ids: List[str] = []
    case_vars: List[Var] = []
    for nid in preorder_m:
        r = nodes[nid].rule
        if isinstance(r, AllRule):
            b_set.add(r.var)
        elif isinstance(r, CaseRule):
            c_ids.append(nid)
            if r.var not in case_vars:
                case_vars.append(r.var)
    if mode.system is System.SSIGMA and b_set:
        raise ExtractionError("eigenvariables on a cycle in a "
                              "sigma-restricted proof")
    if not c_ids:
        raise ExtractionError("root cycle without a (case) conclusion")

    theta = _conj([psis[c] for c in c_ids])
    for b in sorted(b_set, reverse=True):
        theta = All(b, theta)

    if mode.system is System.SSIGMA:
        if not is_in(theta, SIGMA, n):
            raise ExtractionError(f"theta falls outside level-{n} "
                                  f"existential class: {theta.sx}")
    elif not is_in(theta, PI, n + 1):
        raise ExtractionError(f"theta falls outside level-{n + 1} "
                              f"universal class: {theta.sx}")

    avoid = set(b_set) | set(case_vars) | set(theta.av)
    for nd in walk(root):
        for f in nd.sequent:
            avoid |= f.av
    z = _fresh_named(avoid)

    total = None
    for y in case_vars:
        total = V(y) if total is None else Add(total, V(y))
    zeta = impl(Eq(total, V(z)), theta)
    for y in reversed(case_vars):
        zeta = AllLe(y, V(z), zeta)

    if mode.system is not System.SSIGMA and not is_in(zeta, PI, n + 1):
        raise ExtractionError("zeta falls outside the universal class")
    if mode.system is System.SSIGMA:
        _check_zeta_shape(zeta, case_vars, z, theta)

    ranks = compute_ranks(proof, m_set, c_ids)
    size = len(m_set)
    for nid, k in ranks.items():
        if not 0 <= k < size:
            raise ExtractionError(f"rank {k} at {nid} out of range")
    succ = directed_successors(proof)
    c_set = set(c_ids)
    edges: List[Tuple[str, str, str]] = []
    for u in preorder_m:
        for v in succ[u]:
            if v in m_set:
                tag = EDGE_TAGS[nodes[u].rule.name]
                _check_edge(nodes, u, v, tag, mode)
                if u not in c_set and ranks[u] <= (0 if v in c_set else ranks[v]):
                    raise ExtractionError(
                        f"rank fails to decrease on {u} -> {v}")
                edges.append((u, v, tag))

    phi_root = phis[root.id]
    trivial = phi_root == TOP
    oblig: List[Obligation] = []

    def add(kind, f, about):
        oblig.append(Obligation(kind, f, desugar(f), STATUS_UNCHECKED, about))

    zeta0 = substitute(zeta, z, ZERO)
    zetasz = substitute(zeta, z, Succ(V(z)))
    add("base", impl(phi_root, zeta0), (root.id,))
    add("step", impl(phi_root, All(z, impl(zeta, zetasz))), (root.id,))
    for u, v, _tag in edges:
        add("side-equiv", iff(phis[u], phis[v]), (u, v))
    for nid in preorder_m:
        add("theta-gamma", impl(theta, impl(phis[nid], psis[nid])), (nid,))
    add("root-discharge", impl(phi_root, psis[root.id]), (root.id,))

    notes = ["obligation variables are read universally (closure over case "
             "variables and eigenvariables)"]
    if mode.system is System.SSIGMA and n > 0:
        notes.append("bounded-quantifier normalization via the collection "
                     "schema is not applied")

    return InductionCertificate(
        level=n, system=mode.system, root=root.id,
        m_nodes=tuple(preorder_m), c_nodes=tuple(c_ids),
        b_vars=tuple(sorted(b_set)), case_vars=tuple(case_vars),
        fresh_z=z, theta=theta, zeta=zeta,
        phi_root=phi_root, phi_root_trivial=trivial,
        ranks=ranks, obligations=tuple(oblig), edge_tags=tuple(edges),
        notes=tuple(notes))


def _check_zeta_shape(zeta: Formula, case_vars, z: Var, theta: Formula) -> None:
    """zeta must be theta under bounded universal guards, nothing more."""
    f = zeta
    for y in case_vars:
        if not isinstance(f, AllLe) or f.var != y or f.bound != V(z):
            raise ExtractionError("zeta guard shape broken")
        f = f.body
    if not (isinstance(f, Or) and isinstance(f.left, Neq) and f.right == theta):
        raise ExtractionError("zeta core shape broken")


def _check_edge(nodes, u: str, v: str, tag: str, mode: Mode) -> None:
    un = nodes[u]
    r = un.rule
    if tag == "link":
        if un.sequent != nodes[v].sequent:
            raise ExtractionError(f"{u}: back-reference sequent mismatch")
        return
    child_index = next(i for i, c in enumerate(un.children) if c.id == v)
    if tag == "E":
        inst = substitute(r.principal.body, r.principal.var, V(r.var))
        if not mode.in_restriction(inst):
            raise ExtractionError(f"{u}: quantifier instance outside the "
                                  "restriction class on a cycle")
    elif tag == "F":
        side = r.principal.left if child_index == 0 else r.principal.right
        if not mode.in_restriction(side):
            raise ExtractionError(f"{u}: conjunct outside the restriction "
                                  "class on a cycle")
    elif tag == "G":
        side = r.formula if child_index == 0 else negate(r.formula)
        if not mode.in_restriction(side):
            raise ExtractionError(f"{u}: cut formula outside the restriction "
                                  "class on a cycle")
    elif tag == "H":
        if child_index != 1:
            raise ExtractionError(f"{u}: cycle through a (case) left premise")
        if mode.system is System.SN:
            bad = [f for f in un.sequent
                   if r.var in f.fv and not mode.in_restriction(f)]
        else:
            bad = [f for f in un.sequent if not mode.in_restriction(f)]
        if bad:
            raise ExtractionError(f"{u}: case variable loose outside the "
                                  "restriction class")


def extract_all(proof: Union[CyclicProof, ProofNode],
                mode: Mode) -> List[Tuple[str, InductionCertificate]]:
    """One certificate per maximal root-cycle component, outermost first."""
    if isinstance(proof, ProofNode):
        proof = CyclicProof(proof)
    out: List[Tuple[str, InductionCertificate]] = []

    def go(node: ProofNode) -> None:
        if isinstance(node.rule, BackLeaf):
            return
        sub = CyclicProof(node)
        m_set = compute_M(sub)
        if isinstance(m_set, NoRootCycle):
            for c in node.children:
                go(c)
            return
        out.append((node.id, extract_certificate(sub, mode)))
        for nid in [nd.id for nd in walk(node) if nd.id in m_set]:
            for c in sub.nodes[nid].children:
                if c.id not in m_set:
                    go(c)

    go(proof.root)
    return out


# --- bounded obligation checking --------------------------------------------------

@dataclass(frozen=True)
class CertificateCheck:
    ok: bool
    certificate: InductionCertificate
    counterexamples: Tuple[Tuple[str, str, str], ...]  # (kind, about, env)


def check_certificate_bounded(cert: InductionCertificate,
                              value_bound: int = DEFAULT_VALUE_BOUND,
                              cutoff: int = DEFAULT_CUTOFF) -> CertificateCheck:
    """Grid-evaluate every obligation; False anywhere flags an extractor bug."""
    checked: List[Obligation] = []
    hits: List[Tuple[str, str, str]] = []
    for ob in cert.obligations:
        fvs = sorted(ob.formula.fv)
        verdicts = set()
        for env in all_assignments(fvs, value_bound):
            tv = eval_formula(ob.formula, env, cutoff)
            verdicts.add(tv)
            if tv is TV.FALSE:
                shown = ",".join(f"{v.name}={env[v]}" for v in fvs)
                hits.append((ob.kind, " ".join(ob.about), shown))
        if TV.FALSE in verdicts:
            status = STATUS_FALSE
        elif verdicts <= {TV.TRUE}:
            status = STATUS_TRUE
        else:
            status = STATUS_UNKNOWN
        checked.append(replace(ob, status=status))
    return CertificateCheck(not hits, replace(cert, obligations=tuple(checked)),
                            tuple(hits))


def certificate_with_theta(cert: InductionCertificate,
                           theta: Formula) -> InductionCertificate:
    """Same skeleton, new invariant formula; obligations rebuilt unchecked."""
    z = cert.fresh_z
    if z in theta.fv:
        raise ValueError("replacement invariant captures the fresh variable")
    total = None
    for y in cert.case_vars:
        total = V(y) if total is None else Add(total, V(y))
    zeta = impl(Eq(total, V(z)), theta)
    for y in reversed(cert.case_vars):
        zeta = AllLe(y, V(z), zeta)
    zeta0 = substitute(zeta, z, ZERO)
    zetasz = substitute(zeta, z, Succ(V(z)))
    out = []
    for ob in cert.obligations:
        if ob.kind == "base":
            f = Or(ob.formula.left, zeta0)
        elif ob.kind == "step":
            f = Or(ob.formula.left, All(z, impl(zeta, zetasz)))
        elif ob.kind == "theta-gamma":
            f = Or(negate(theta), ob.formula.right)
        else:
            out.append(replace(ob, status=STATUS_UNCHECKED))
            continue
        out.append(Obligation(ob.kind, f, desugar(f), STATUS_UNCHECKED,
                              ob.about))
    return replace(cert, theta=theta, zeta=zeta, obligations=tuple(out))


# --- certificate file format ------------------------------------------------------

def render_certificate(cert: InductionCertificate) -> str:
    lines = ["(certificate",
             f"  (level {cert.level})",
             f"  (mode {cert.system})",
             f"  (root {cert.root})",
             f"  (m{_ids(cert.m_nodes)})",
             f"  (phi-root {cert.phi_root.sx}"
             + (" trivial)" if cert.phi_root_trivial else ")"),
             f"  (theta {cert.theta.sx})",
             f"  (zeta {cert.zeta.sx})",
             f"  (fresh {cert.fresh_z.name})",
             f"  (case-vars{_names(cert.case_vars)})",
             f"  (B{_names(cert.b_vars)})",
             f"  (C{_ids(cert.c_nodes)})",
             "  (ranks" + "".join(f" ({nid} {cert.ranks[nid]})"
                                  for nid in sorted(cert.ranks)) + ")"]
    for ob in cert.obligations:
        about = _ids(ob.about)
        lines.append(f"  (obligation (kind {ob.kind}) (formula {ob.formula.sx})"
                     f" (desugared {ob.desugared.sx}) (status {ob.status})"
                     f" (about{about}))")
    for u, v, tag in cert.edge_tags:
        lines.append(f"  (edge-just ({u} {v} {tag}))")
    for note in cert.notes:
        lines.append(f"  (note {sexpr.render(sexpr.QuotedString(note))})")
    return "\n".join(lines) + ")"


def _ids(ids) -> str:
    return "".join(f" {i}" for i in ids)


def _names(vs) -> str:
    return "".join(f" {v.name}" for v in vs)


def certificate_from_sexpr(value) -> InductionCertificate:
    if not isinstance(value, list) or not value or value[0] != "certificate":
        raise ParseError("expected (certificate ...)")
    fields: Dict[str, object] = {"obligations": [], "edges": [], "notes": []}
    for item in value[1:]:
        if not isinstance(item, list) or not item:
            raise ParseError(f"bad certificate entry {sexpr.render(item)}")
        head = item[0]
        if head == "obligation":
            sub = {e[0]: e[1:] for e in item[1:]}
            fields["obligations"].append(Obligation(
                kind=sub["kind"][0],
                formula=formula_from_sexpr(sub["formula"][0]),
                desugared=formula_from_sexpr(sub["desugared"][0]),
                status=sub.get("status", [STATUS_UNCHECKED])[0],
                about=tuple(sub.get("about", []))))
        elif head == "edge-just":
            u, v, tag = item[1]
            fields["edges"].append((u, v, tag))
        elif head == "note":
            fields["notes"].append(str(item[1]))
        else:
            fields[head] = item[1:]
    try:
        theta = formula_from_sexpr(fields["theta"][0])
        zeta = formula_from_sexpr(fields["zeta"][0])
        phi_entry = fields["phi-root"]
        ranks = {pair[0]: int(pair[1]) for pair in fields["ranks"]}
        return InductionCertificate(
            level=int(fields["level"][0]),
            system=System(fields["mode"][0]),
            root=fields["root"][0],
            m_nodes=tuple(fields["m"]),
            c_nodes=tuple(fields["C"]),
            b_vars=tuple(Var(nm) for nm in fields["B"]),
            case_vars=tuple(Var(nm) for nm in fields["case-vars"]),
            fresh_z=Var(fields["fresh"][0]),
            theta=theta, zeta=zeta,
            phi_root=formula_from_sexpr(phi_entry[0]),
            phi_root_trivial=len(phi_entry) > 1 and phi_entry[1] == "trivial",
            ranks=ranks,
            obligations=tuple(fields["obligations"]),
            edge_tags=tuple(fields["edges"]),
            notes=tuple(fields["notes"]))
    except (KeyError, IndexError, ValueError) as exc:
        raise ParseError(f"incomplete certificate: {exc}") from exc


def parse_certificate(text: str) -> InductionCertificate:
    return certificate_from_sexpr(sexpr.parse(text))


def render_certificates(certs: Iterable[InductionCertificate]) -> str:
    return "\n\n".join(render_certificate(c) for c in certs)
