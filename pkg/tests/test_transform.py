import dataclasses

import pytest

from cyclarith import (
    Add,
    All,
    Eq,
    Mode,
    OpenLeaf,
    RavelError,
    RegularProofGraph,
    System,
    V,
    Var,
    Zero,
    expand_graph,
    graph_of,
    induction_schema_proof,
    parse_graph,
    prefix_equal,
    ravel,
    render_graph,
    unravel,
    validate,
    walk,
)

x, y = Var("x"), Var("y")
SN0 = Mode(System.SN, 0)


def _schema():
    phi = All(y, Eq(Add(V(x), V(y)), Add(V(y), V(x))))
    return induction_schema_proof(phi, x, 0)


def test_graph_of_folds_back_links():
    p = _schema()
    g = graph_of(p)
    assert g.root == "n0"
    # the back leaf becomes an edge, not a node
    assert "n4" not in g.nodes
    assert len(g.nodes) == len(p.nodes) - 1
    assert "n0" in g.nodes["n3"].children


def test_graph_render_parse_round_trip(cyclic_corpus):
    for name, proof, _mode in cyclic_corpus[:12]:
        g = graph_of(proof)
        txt = render_graph(g)
        g2 = parse_graph(txt)
        assert render_graph(g2) == txt, name


def test_graph_constructor_checks_children():
    p = _schema()
    g = graph_of(p)
    n0 = g.nodes["n0"]
    bad = dict(g.nodes)
    bad["n0"] = dataclasses.replace(n0, children=("zzz",) + n0.children[1:])
    with pytest.raises(ValueError):
        RegularProofGraph("n0", bad)


def test_unravel_depths():
    p = _schema()
    t0 = unravel(p, 0)
    assert isinstance(t0.rule, OpenLeaf)
    assert len(list(walk(t0))) == 1
    t5 = unravel(p, 5)
    t10 = unravel(p, 10)
    assert len(list(walk(t5))) < len(list(walk(t10)))
    # deeper unravelings extend shallower ones
    assert prefix_equal(t0, t5)
    assert prefix_equal(t5, t10)
    assert prefix_equal(t10, t5)


def test_unravel_frontier_is_open():
    p = _schema()
    t = unravel(p, 4)
    kinds = {type(n.rule).__name__ for n in walk(t)}
    assert "OpenLeaf" in kinds
    assert "BackLeaf" not in kinds


def test_prefix_equal_distinguishes():
    p = _schema()
    q = induction_schema_proof(Eq(Add(V(x), Zero()), V(x)), x, 0)
    assert not prefix_equal(unravel(p, 6), unravel(q, 6))


def test_expand_graph_matches_unravel():
    p = _schema()
    g = graph_of(p)
    from cyclarith import render_proof

    for d in [1, 5, 9]:
        assert render_proof(expand_graph(g, d)) == render_proof(unravel(p, d))


def test_ravel_round_trip(cyclic_corpus):
    for name, proof, mode in cyclic_corpus[:20]:
        g = graph_of(proof)
        back = ravel(g, mode)
        rep = validate(back, mode)
        assert rep.valid, (name, rep.violations[:2])
        # same shape up to back-leaf naming: ravel rebuilds those leaves
        orig_inner = set(proof.nodes) - set(proof.backlinks)
        back_inner = set(back.nodes) - set(back.backlinks)
        assert back_inner == orig_inner, name
        assert sorted(back.backlinks.values()) == sorted(proof.backlinks.values()), name


def test_ravel_rejects_bad_step():
    p = _schema()
    g = graph_of(p)
    n3 = g.nodes["n3"]
    bad = dict(g.nodes)
    bad["n3"] = dataclasses.replace(n3, sequent=n3.sequent.add(Eq(Zero(), Zero())))
    with pytest.raises(RavelError):
        ravel(RegularProofGraph("n0", bad), SN0)


def test_unravel_prefixes_across_depths(cyclic_corpus):
    for name, proof, _mode in cyclic_corpus[:8]:
        ts = [unravel(proof, d) for d in (3, 7, 12)]
        assert prefix_equal(ts[0], ts[1]), name
        assert prefix_equal(ts[1], ts[2]), name
