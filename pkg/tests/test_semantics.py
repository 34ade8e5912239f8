import random

from cyclarith import (
    Add,
    All,
    AllLe,
    And,
    Eq,
    Ex,
    ExLe,
    Le,
    Mul,
    NLe,
    Neq,
    Or,
    Succ,
    TV,
    V,
    Var,
    Zero,
    all_assignments,
    eval_formula,
    eval_term,
    numeral,
    sequent_truth,
)

from conftest import random_quantifier_free, random_term

x, y, z = Var("x"), Var("y"), Var("z")


def test_eval_term_fixed():
    env = {x: 3, y: 4}
    assert eval_term(Zero(), env) == 0
    assert eval_term(numeral(7), env) == 7
    assert eval_term(Succ(V(x)), env) == 4
    assert eval_term(Add(V(x), V(y)), env) == 7
    assert eval_term(Mul(Add(V(x), numeral(2)), V(y)), env) == 20
    # unassigned variables default to zero
    assert eval_term(V(z), env) == 0


def _py_term(t, env):
    k = t.sx
    if isinstance(t, Zero):
        return 0
    if isinstance(t, V):
        return env.get(t.var, 0)
    if isinstance(t, Succ):
        return _py_term(t.arg, env) + 1
    if isinstance(t, Add):
        return _py_term(t.left, env) + _py_term(t.right, env)
    if isinstance(t, Mul):
        return _py_term(t.left, env) * _py_term(t.right, env)
    raise AssertionError(k)


def _py_qf(phi, env):
    if isinstance(phi, Eq):
        return _py_term(phi.left, env) == _py_term(phi.right, env)
    if isinstance(phi, Neq):
        return _py_term(phi.left, env) != _py_term(phi.right, env)
    if isinstance(phi, Le):
        return _py_term(phi.left, env) <= _py_term(phi.right, env)
    if isinstance(phi, NLe):
        return _py_term(phi.left, env) > _py_term(phi.right, env)
    if isinstance(phi, And):
        return _py_qf(phi.left, env) and _py_qf(phi.right, env)
    if isinstance(phi, Or):
        return _py_qf(phi.left, env) or _py_qf(phi.right, env)
    raise AssertionError(phi.sx)


def test_eval_term_random_against_python():
    rng = random.Random(31)
    for _ in range(300):
        t = random_term(rng, 3)
        env = {v: rng.randrange(5) for v in t.fv}
        assert eval_term(t, env) == _py_term(t, env)


def test_eval_quantifier_free_random():
    # on quantifier-free formulas the three-valued semantics is classical
    rng = random.Random(32)
    for _ in range(300):
        phi = random_quantifier_free(rng, 3, [x, y, z], core=False)
        env = {v: rng.randrange(4) for v in phi.fv}
        want = TV.TRUE if _py_qf(phi, env) else TV.FALSE
        assert eval_formula(phi, env, 8) == want


def test_atoms():
    assert eval_formula(Eq(Zero(), Zero()), {}, 8) is TV.TRUE
    assert eval_formula(Neq(Succ(Zero()), Zero()), {}, 8) is TV.TRUE
    assert eval_formula(Le(V(x), numeral(3)), {x: 2}, 8) is TV.TRUE
    assert eval_formula(Le(V(x), numeral(3)), {x: 4}, 8) is TV.FALSE
    assert eval_formula(NLe(V(x), numeral(3)), {x: 4}, 8) is TV.TRUE


def test_unbounded_quantifiers_cutoff():
    # a counterexample within the cutoff decides the universal
    assert eval_formula(All(x, Eq(V(x), Zero())), {}, 8) is TV.FALSE
    # a witness within the cutoff decides the existential
    assert eval_formula(Ex(x, Eq(V(x), numeral(5))), {}, 8) is TV.TRUE
    # truth beyond the cutoff is not claimed
    assert eval_formula(All(x, Neq(Succ(V(x)), Zero())), {}, 8) is TV.UNKNOWN
    assert eval_formula(Ex(x, Eq(V(x), numeral(12))), {}, 8) is TV.UNKNOWN
    # raising the cutoff finds the witness
    assert eval_formula(Ex(x, Eq(V(x), numeral(12))), {}, 13) is TV.TRUE


def test_bounded_quantifiers_are_exact():
    # bounded quantifiers range over the evaluated bound, not the cutoff
    phi = AllLe(x, numeral(20), Le(V(x), numeral(20)))
    assert eval_formula(phi, {}, 8) is TV.TRUE
    psi = ExLe(x, numeral(20), Eq(V(x), numeral(17)))
    assert eval_formula(psi, {}, 8) is TV.TRUE
    assert eval_formula(ExLe(x, numeral(20), Eq(V(x), numeral(21))), {}, 8) is TV.FALSE


def test_kleene_connectives():
    unk = All(x, Neq(Succ(V(x)), Zero()))  # UNKNOWN at cutoff 8
    tru = Eq(Zero(), Zero())
    fls = Neq(Zero(), Zero())
    assert eval_formula(And(fls, unk), {}, 8) is TV.FALSE
    assert eval_formula(And(unk, fls), {}, 8) is TV.FALSE
    assert eval_formula(And(tru, unk), {}, 8) is TV.UNKNOWN
    assert eval_formula(Or(tru, unk), {}, 8) is TV.TRUE
    assert eval_formula(Or(unk, tru), {}, 8) is TV.TRUE
    assert eval_formula(Or(fls, unk), {}, 8) is TV.UNKNOWN


def test_nested_quantifiers():
    # for every x <= cutoff there is y = x with x = y
    phi = All(x, Ex(y, Eq(V(x), V(y))))
    assert eval_formula(phi, {}, 8) is not TV.FALSE
    # negation flips truth on decided formulas
    assert eval_formula(Ex(x, All(y, Le(V(y), V(x)))), {}, 4) is TV.UNKNOWN


def test_sequent_truth():
    assert sequent_truth([], {}, 8) is TV.FALSE
    assert sequent_truth([Eq(Zero(), numeral(1)), Neq(Zero(), numeral(1))], {}, 8) is TV.TRUE
    assert sequent_truth([Eq(Zero(), numeral(1))], {}, 8) is TV.FALSE
    unk = All(x, Neq(Succ(V(x)), Zero()))
    assert sequent_truth([Eq(Zero(), numeral(1)), unk], {}, 8) is TV.UNKNOWN


def test_all_assignments():
    rows = list(all_assignments([x, y], 2))
    assert len(rows) == 9
    assert {(r[x], r[y]) for r in rows} == {(a, b) for a in range(3) for b in range(3)}
    assert list(all_assignments([], 4)) == [{}]
