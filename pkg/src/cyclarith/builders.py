"""Programmatic proof constructors.

Closed tautologies, ground arithmetic facts, the two canonical cyclic
shapes (induction packaged as a schema instance and induction packaged as
a rule application), a couple of ready-made corpus proofs, and finite
truncations of an infinite case cascade. Every constructor re-derives its
sequents through premises_of, so a successful return is correct by
construction; the cyclic builders additionally annotate and validate
before returning.
"""

from __future__ import annotations

import itertools
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .annotation import Mode, System, annotate_tree, erase, is_annotated
from .calculus import (Add0Rule, AddSRule, AllRule, AndRule, AssumeLeaf,
                       AxiomLeaf, BackLeaf, CaseRule, CutRule, ExRule,
                       Mult0Rule, MultSRule, OpenLeaf, OrRule, PredRule,
                       ProofNode, RefRule, RepRule, Rule, Sequent, WeakRule,
                       is_axiom, premises_of, walk)
from .checker import CyclicProof, validate
from .semantics import eval_term
from .syntax import (Add, All, AllLe, And, Eq, Ex, ExLe, Formula, Le, Mul,
                     NLe, Neq, Or, PI, Succ, Term, V, Var, ZERO, Zero,
                     fresh_for, impl, is_in, negate, numeral, substitute)


class PreError(Exception):
    """A constructor precondition failed."""


def _plain(proof: Union[ProofNode, CyclicProof]) -> ProofNode:
    return proof.root if isinstance(proof, CyclicProof) else proof


def relabel_proof(root: ProofNode, prefix: str) -> ProofNode:
    """Copy with every node id (and back-reference target) prefixed."""
    done: Dict[str, ProofNode] = {}
    for node in reversed(list(walk(root))):  # children before parents
        rule = node.rule
        if isinstance(rule, BackLeaf):
            rule = BackLeaf(prefix + rule.target)
        done[node.id] = ProofNode(prefix + node.id, node.sequent, rule,
                                  tuple(done[c.id] for c in node.children),
                                  node.vars)
    return done[root.id]


def _chain(goal: Sequent, rules: Sequence[Rule], prefix: str) -> ProofNode:
    """A single-branch proof: apply the rules top-down, close with an axiom."""
    seqs = [goal]
    for r in rules:
        [nxt] = premises_of(seqs[-1], r)
        seqs.append(nxt)
    if is_axiom(seqs[-1]) is None:
        raise PreError(f"chain does not end in an axiom: {seqs[-1].sx}")
    node = ProofNode(f"{prefix}{len(rules)}", seqs[-1], AxiomLeaf(), ())
    for i in range(len(rules) - 1, -1, -1):
        node = ProofNode(f"{prefix}{i}", seqs[i], rules[i], (node,))
    return node


# --- closed tautologies ----------------------------------------------------------

def tautology(gamma: Sequent, phi: Formula) -> ProofNode:
    """A finite proof of gamma, phi, negate(phi) by recursion on phi."""
    counter = itertools.count()
    fresh = fresh_for(phi, *gamma)

    def node(seq: Sequent, rule: Rule, *children: ProofNode) -> ProofNode:
        return ProofNode(f"t{next(counter)}", seq, rule, children)

    def go(gamma: Sequent, phi: Formula) -> ProofNode:
        bar = negate(phi)
        goal = gamma.add(phi, bar)
        if isinstance(phi, (Le, NLe, AllLe, ExLe)):
            raise PreError(f"no closing rule for {phi.sx}, desugar first")
        if isinstance(phi, (Eq, Neq)):
            return node(goal, AxiomLeaf())
        if isinstance(phi, (And, Or)):
            # split the disjunction, then the conjunction, then weaken the
            # stray literal so each branch is again a pure tautology goal
            conj, disj = (phi, bar) if isinstance(phi, And) else (bar, phi)
            [mid] = premises_of(goal, OrRule(disj))
            left, right = premises_of(mid, AndRule(conj))
            wl = WeakRule(Sequent([negate(conj.right)]))
            wr = WeakRule(Sequent([negate(conj.left)]))
            [lgoal] = premises_of(left, wl)
            [rgoal] = premises_of(right, wr)
            lsub = go(gamma, conj.left)
            rsub = go(gamma, conj.right)
            assert lsub.sequent == lgoal and rsub.sequent == rgoal
            return node(goal, OrRule(disj),
                        node(mid, AndRule(conj),
                             node(left, wl, lsub),
                             node(right, wr, rsub)))
        # quantifiers: eliminate the universal with a fresh eigenvariable,
        # feed the same variable back as the existential witness
        univ, ext = (phi, bar) if isinstance(phi, All) else (bar, phi)
        z = fresh.take()
        allr = AllRule(univ, z)
        [mid] = premises_of(goal, allr)
        exr = ExRule(ext, V(z))
        [full] = premises_of(mid, exr)
        wk = WeakRule(Sequent([ext]))
        [subgoal] = premises_of(full, wk)
        sub = go(gamma, substitute(univ.body, univ.var, V(z)))
        assert sub.sequent == subgoal
        return node(goal, allr, node(mid, exr, node(full, wk, sub)))

    return go(gamma, phi)


# --- ground arithmetic facts -----------------------------------------------------

_HOLE = Var("$0")


def _redex(term: Term) -> Optional[Tuple[Tuple[int, ...], Term, Rule]]:
    """Innermost-leftmost arithmetic redex: (path, contractum, rule)."""
    if isinstance(term, Succ):
        hit = _redex(term.arg)
        if hit:
            path, dst, r = hit
            return (0,) + path, dst, r
        return None
    if isinstance(term, (Add, Mul)):
        for i, sub in ((0, term.left), (1, term.right)):
            hit = _redex(sub)
            if hit:
                path, dst, r = hit
                return (i,) + path, dst, r
        l, r = term.left, term.right
        if isinstance(term, Add):
            if isinstance(r, Zero):
                return (), l, Add0Rule(l)
            if isinstance(r, Succ):
                return (), Succ(Add(l, r.arg)), AddSRule(l, r.arg)
        else:
            if isinstance(r, Zero):
                return (), ZERO, Mult0Rule(l)
            if isinstance(r, Succ):
                return (), Add(Mul(l, r.arg), l), MultSRule(l, r.arg)
    return None


def _at(term: Term, path: Tuple[int, ...]) -> Term:
    for i in path:
        if isinstance(term, Succ):
            term = term.arg
        else:
            term = term.left if i == 0 else term.right
    return term


def _plug(term: Term, path: Tuple[int, ...], repl: Term) -> Term:
    if not path:
        return repl
    i, rest = path[0], path[1:]
    if isinstance(term, Succ):
        return Succ(_plug(term.arg, rest, repl))
    kind = Add if isinstance(term, Add) else Mul
    if i == 0:
        return kind(_plug(term.left, rest, repl), term.right)
    return kind(term.left, _plug(term.right, rest, repl))


def prove_ground_atom(t: Term, u: Term) -> ProofNode:
    """Prove {t=u} or {t!=u} for closed t, u, whichever is true.

    Both sides are rewritten to numerals one redex at a time: the matching
    arithmetic rule contributes the equation, (rep) applies it at the redex
    position. Equalities then close through (ref) and two transfers,
    disequalities descend with (pred) to an ax_s leaf.
    """
    if t.fv or u.fv:
        raise PreError(f"ground atom needs closed terms: {t.sx} / {u.sx}")
    a, b = eval_term(t, {}), eval_term(u, {})
    rules: List[Rule] = []

    def contract(f: Neq, side: int) -> Neq:
        while True:
            inner = f.left if side == 0 else f.right
            hit = _redex(inner)
            if hit is None:
                return f
            path, dst, arith = hit
            src = _at(inner, path)
            rules.append(arith)  # puts src != dst into the sequent
            pat = _plug(inner, path, V(_HOLE))
            done = _plug(inner, path, dst)
            if side == 0:
                rules.append(RepRule(pat, f.right, _HOLE, src, dst))
                f = Neq(done, f.right)
            else:
                rules.append(RepRule(f.left, pat, _HOLE, src, dst))
                f = Neq(f.left, done)

    if a == b:
        goal: Formula = Eq(t, u)
        if t == u:
            rules.append(RefRule(t))
        else:
            n = numeral(a)
            rules.append(RefRule(t))
            contract(Neq(t, t), 1)  # t != n
            if u != n:
                rules.append(RefRule(u))
                contract(Neq(u, u), 1)  # u != n
                rules.append(RepRule(V(_HOLE), u, _HOLE, u, n))  # n != u
                if t != n:
                    rules.append(RepRule(t, V(_HOLE), _HOLE, n, u))  # t != u
    else:
        goal = Neq(t, u)
        f = contract(Neq(t, u), 0)
        f = contract(f, 1)  # now numeral(a) != numeral(b)
        for i in range(1, min(a, b) + 1):
            rules.append(PredRule(numeral(a - i), numeral(b - i)))
        if a < b:
            # flip 0 != numeral(b-a) around so ax_s applies
            rules.append(RefRule(ZERO))
            rules.append(RepRule(V(_HOLE), ZERO, _HOLE, ZERO, numeral(b - a)))
    return _chain(Sequent([goal]), rules, "g")


# --- induction as a cyclic schema ------------------------------------------------

def induction_schema_proof(phi: Formula, x: Var, n: int) -> CyclicProof:
    """The cyclic proof of {negate(phi(0)), negate(step), phi(x)}.

    The second member is Ex x (phi and negate(phi(s x))), i.e. the negated
    induction step. Case split on x at the root; the zero branch is a
    tautology, the successor branch instantiates the negated step at x,
    splits the conjunction, and weakens back to the root sequent.
    """
    if not is_in(phi, PI, n + 1):
        raise PreError(f"not in the level-{n + 1} universal class: {phi.sx}")
    if x not in phi.fv:
        raise PreError(f"{x.name} is not free in {phi.sx}")
    phi0 = substitute(phi, x, ZERO)
    phisx = substitute(phi, x, Succ(V(x)))
    psi = Ex(x, And(phi, negate(phisx)))
    root = Sequent([negate(phi0), psi, phi])

    case = CaseRule(x)
    left, right = premises_of(root, case)
    sigma0 = relabel_proof(tautology(Sequent([psi]), phi0), "a.")
    assert sigma0.sequent == left
    exr = ExRule(psi, V(x))
    [s2] = premises_of(right, exr)
    andr = AndRule(And(phi, negate(phisx)))
    s3, s5 = premises_of(s2, andr)
    weak = WeakRule(Sequent([phisx]))
    [s4] = premises_of(s3, weak)
    assert s4 == root
    sigma1 = relabel_proof(tautology(Sequent([negate(phi0), psi]), phisx), "b.")
    assert sigma1.sequent == s5

    tree = ProofNode("n0", root, case, (
        sigma0,
        ProofNode("n1", right, exr, (
            ProofNode("n2", s2, andr, (
                ProofNode("n3", s3, weak, (
                    ProofNode("n4", s4, BackLeaf("n0"), ()),)),
                sigma1,)),)),))
    mode = Mode(System.SN, n)
    out = CyclicProof(annotate_tree(tree, frozenset({x}), mode))
    report = validate(out, mode)
    if not report.valid:
        raise PreError("schema proof failed validation: "
                       + "; ".join(v.tag for v in report.violations))
    return out


# --- induction as a rule ---------------------------------------------------------

def induction_rule_proof(base: Union[ProofNode, CyclicProof],
                         step: Union[ProofNode, CyclicProof],
                         phi: Formula, x: Var, n: int,
                         assumptions: Iterable[Formula] = ()) -> CyclicProof:
    """Close {phi} from proofs of {phi(0)} and {negate(phi), phi(s x)}.

    Case split on x, cut phi on the successor branch, weaken the kept side
    back to {phi} and tie it to the root. The sub-proofs are validated on
    their own first, then the assembly is annotated from {x} and validated
    as a whole.
    """
    assumptions = frozenset(assumptions)
    if not is_in(phi, PI, n + 1):
        raise PreError(f"not in the level-{n + 1} universal class: {phi.sx}")
    if x not in phi.fv:
        raise PreError(f"{x.name} is not free in {phi.sx}")
    mode = Mode(System.SPI, n, assumptions)
    b_root, s_root = _plain(base), _plain(step)
    phi0 = substitute(phi, x, ZERO)
    phisx = substitute(phi, x, Succ(V(x)))
    if b_root.sequent != Sequent([phi0]):
        raise PreError(f"base proof concludes {b_root.sequent.sx}, "
                       f"wanted {Sequent([phi0]).sx}")
    want = Sequent([negate(phi), phisx])
    if s_root.sequent != want:
        raise PreError(f"step proof concludes {s_root.sequent.sx}, "
                       f"wanted {want.sx}")
    for label, sub in (("base", b_root), ("step", s_root)):
        checked = sub if is_annotated(sub) else annotate_tree(sub, frozenset(), mode)
        report = validate(checked, mode)
        if not report.valid:
            raise PreError(f"{label} proof invalid: "
                           + "; ".join(v.tag for v in report.violations))

    root = Sequent([phi])
    case = CaseRule(x)
    left, right = premises_of(root, case)
    assert left == b_root.sequent
    cut = CutRule(phi)
    keep, refute = premises_of(right, cut)
    assert refute == s_root.sequent
    weak = WeakRule(Sequent([phisx]))
    [back_seq] = premises_of(keep, weak)
    assert back_seq == root

    tree = ProofNode("r0", root, case, (
        relabel_proof(erase(b_root), "b."),
        ProofNode("r1", right, cut, (
            ProofNode("r2", keep, weak, (
                ProofNode("r3", back_seq, BackLeaf("r0"), ()),)),
            relabel_proof(erase(s_root), "s."),)),))
    out = CyclicProof(annotate_tree(tree, frozenset({x}), mode))
    report = validate(out, mode)
    if not report.valid:
        raise PreError("assembled proof failed validation: "
                       + "; ".join(f"{v.node_id}:{v.tag}" for v in report.violations))
    return out


def step_from_assumption(phi: Formula, x: Var,
                         extra: Iterable[Formula] = ()) -> Tuple[ProofNode, Formula]:
    """Prove {negate(phi), phi(s x)} (plus extras) from the step sentence.

    The sentence is All x (phi -> phi(s x)). Cutting it in, one side weakens
    to an assumption leaf, the other instantiates its negation at x and
    splits into two tautologies. Returns (proof, sentence).
    """
    if phi.fv != frozenset({x}):
        raise PreError(f"step target must close over {x.name} alone: {phi.sx}")
    phisx = substitute(phi, x, Succ(V(x)))
    hyp = All(x, impl(phi, phisx))
    extra = tuple(extra)
    target = Sequent([negate(phi), phisx]).add(*extra)

    cut = CutRule(hyp)
    with_hyp, against = premises_of(target, cut)
    weak = WeakRule(target)
    [only_hyp] = premises_of(with_hyp, weak)
    nhyp = negate(hyp)
    exr = ExRule(nhyp, V(x))
    [inst] = premises_of(against, exr)
    andr = AndRule(nhyp.body)
    a_l, a_r = premises_of(inst, andr)
    sub_l = relabel_proof(tautology(Sequent([phisx, nhyp, *extra]), phi), "p.")
    assert sub_l.sequent == a_l
    sub_r = relabel_proof(tautology(Sequent([negate(phi), nhyp, *extra]), phisx), "q.")
    assert sub_r.sequent == a_r

    tree = ProofNode("h0", target, cut, (
        ProofNode("h1", with_hyp, weak, (
            ProofNode("h2", only_hyp, AssumeLeaf(hyp), ()),)),
        ProofNode("h3", against, exr, (
            ProofNode("h4", inst, andr, (sub_l, sub_r)),)),))
    return tree, hyp


def induction_rule_via_assumptions(phi: Formula, x: Var,
                                   n: int) -> Tuple[CyclicProof, Mode]:
    """Induction rule instance whose sub-proofs lean on two assumed sentences."""
    if phi.fv != frozenset({x}):
        raise PreError(f"target must close over {x.name} alone: {phi.sx}")
    phi0 = substitute(phi, x, ZERO)
    base = ProofNode("z0", Sequent([phi0]), AssumeLeaf(phi0), ())
    step, hyp = step_from_assumption(phi, x)
    assumptions = frozenset({phi0, hyp})
    proof = induction_rule_proof(base, step, phi, x, n, assumptions)
    return proof, Mode(System.SPI, n, assumptions)


# --- ready-made corpus proofs ----------------------------------------------------

def two_loops_proof() -> Tuple[CyclicProof, Mode]:
    """A conjunction of two independently cycling induction instances.

    Left loop proves 0+x = x, right loop proves x+0 = x; each closes its own
    back-link below a shared root conjunction.
    """
    x = Var("x")
    phi1 = Eq(Add(ZERO, V(x)), V(x))
    phi2 = Eq(Add(V(x), ZERO), V(x))
    base = prove_ground_atom(Add(ZERO, ZERO), ZERO)

    # 0+s(x) = s(0+x) lets (rep) trade the goal for the hypothesis
    phi1sx = substitute(phi1, x, Succ(V(x)))
    step1 = _chain(Sequent([negate(phi1), phi1sx]), [
        AddSRule(ZERO, V(x)),
        RepRule(Add(ZERO, Succ(V(x))), Succ(V(_HOLE)), _HOLE,
                Add(ZERO, V(x)), V(x)),
    ], "c")
    phi2sx = substitute(phi2, x, Succ(V(x)))
    step2 = _chain(Sequent([negate(phi2), phi2sx]), [
        Add0Rule(Succ(V(x))),
    ], "c")

    loop1 = induction_rule_proof(base, step1, phi1, x, 0)
    loop2 = induction_rule_proof(base, step2, phi2, x, 0)
    conj = And(phi1, phi2)
    root = Sequent([conj])
    andr = AndRule(conj)
    premises_of(root, andr)  # sanity: {phi1}, {phi2}
    tree = ProofNode("w0", root, andr, (
        relabel_proof(erase(loop1.root), "p."),
        relabel_proof(erase(loop2.root), "q."),))
    mode = Mode(System.SN, 0)
    out = CyclicProof(annotate_tree(tree, frozenset({x}), mode))
    report = validate(out, mode)
    if not report.valid:
        raise PreError("two-loop proof failed validation: "
                       + "; ".join(v.tag for v in report.violations))
    return out, mode


def forall_cycle_proof() -> Tuple[CyclicProof, Mode]:
    """A cycle that passes through a universal quantifier inference.

    Proves {all y (x+y = y+x)} from assumed base and step sentences; the
    cycle instantiates the universal with a fresh eigenvariable, so the
    extracted invariant closes over that variable.
    """
    x, y = Var("x"), Var("y")
    body = Eq(Add(V(x), V(y)), Add(V(y), V(x)))
    a = All(y, body)
    a0 = substitute(a, x, ZERO)

    root = Sequent([a])
    case = CaseRule(x)
    left, right = premises_of(root, case)
    base = ProofNode("a0", left, AssumeLeaf(a0), ())
    cut = CutRule(a)
    keep, refute = premises_of(right, cut)
    step1, hyp = step_from_assumption(a, x)
    step1 = relabel_proof(step1, "s.")
    assert step1.sequent == refute

    z = fresh_for(a, *right).take()
    allr = AllRule(a, z)
    [opened] = premises_of(keep, allr)
    inst = substitute(body, y, V(z))
    cut2 = CutRule(a)
    keep2, refute2 = premises_of(opened, cut2)
    step2, _ = step_from_assumption(a, x, extra=[inst])
    step2 = relabel_proof(step2, "t.")
    assert step2.sequent == refute2
    weak = WeakRule(opened)
    [back_seq] = premises_of(keep2, weak)
    assert back_seq == root

    tree = ProofNode("f0", root, case, (
        base,
        ProofNode("f1", right, cut, (
            ProofNode("f2", keep, allr, (
                ProofNode("f3", opened, cut2, (
                    ProofNode("f4", keep2, weak, (
                        ProofNode("f5", back_seq, BackLeaf("f0"), ()),)),
                    step2,)),)),
            step1,)),))
    mode = Mode(System.SN, 0, frozenset({a0, hyp}))
    out = CyclicProof(annotate_tree(tree, frozenset({x}), mode))
    report = validate(out, mode)
    if not report.valid:
        raise PreError("eigenvariable loop failed validation: "
                       + "; ".join(v.tag for v in report.violations))
    return out, mode


# --- finite truncations of the case cascade --------------------------------------

def omega_truncation(proofs: Sequence[Union[ProofNode, CyclicProof]],
                     gamma: Sequent, phi: Formula, x: Var) -> ProofNode:
    """Stack len(proofs) case splits on x over gamma, phi.

    Stage k's zero branch is proofs[k] (which must conclude gamma, phi(k));
    the successor branch continues with phi shifted one s deeper. The last
    successor branch stays an open leaf.
    """
    if x in gamma.fv:
        raise PreError(f"{x.name} occurs free in the side sequent {gamma.sx}")
    roots = [_plain(p) for p in proofs]
    if roots and x not in phi.fv:
        raise PreError(f"{x.name} is not free in {phi.sx}")
    for k, r in enumerate(roots):
        want = gamma.add(substitute(phi, x, numeral(k)))
        if r.sequent != want:
            raise PreError(f"stage {k} concludes {r.sequent.sx}, wanted {want.sx}")

    def shifted(k: int) -> Term:
        t: Term = V(x)
        for _ in range(k):
            t = Succ(t)
        return t

    def build(k: int) -> ProofNode:
        cur = gamma.add(substitute(phi, x, shifted(k)))
        if k == len(roots):
            return ProofNode(f"o{k}", cur, OpenLeaf(), ())
        case = CaseRule(x)
        zero, _succ = premises_of(cur, case)
        left = relabel_proof(erase(roots[k]), f"k{k}.")
        assert left.sequent == zero
        return ProofNode(f"o{k}", cur, case, (left, build(k + 1)))

    return build(0)
