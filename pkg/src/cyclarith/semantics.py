"""Bounded evaluation over the standard model, three-valued.

Assignments are total: unmapped variables read as 0.  Unbounded quantifiers
are only scanned up to a cutoff, so their value may be UNKNOWN: an
existential is TRUE once a witness at or below the cutoff shows up and never
FALSE; a universal is FALSE once a counterexample shows up and never TRUE.
Bounded quantifiers and atoms are exact, so anything classified Delta0 gets
a decisive answer.  Connectives follow strong Kleene tables.
"""

from __future__ import annotations

import enum
import itertools
from typing import Dict, Iterable, Iterator, Sequence

from .syntax import (Add, All, AllLe, And, Eq, Ex, ExLe, Formula, Le, Mul,
                     Neq, NLe, Or, Succ, Term, V, Var, Zero)

DEFAULT_CUTOFF = 8
DEFAULT_VALUE_BOUND = 3


class TV(enum.Enum):
    TRUE = "true"
    FALSE = "false"
    UNKNOWN = "unknown"

    def __str__(self):
        return self.value


def t_not(a: TV) -> TV:
    if a is TV.TRUE:
        return TV.FALSE
    if a is TV.FALSE:
        return TV.TRUE
    return TV.UNKNOWN


def t_and(a: TV, b: TV) -> TV:
    if a is TV.FALSE or b is TV.FALSE:
        return TV.FALSE
    if a is TV.TRUE and b is TV.TRUE:
        return TV.TRUE
    return TV.UNKNOWN


def t_or(a: TV, b: TV) -> TV:
    if a is TV.TRUE or b is TV.TRUE:
        return TV.TRUE
    if a is TV.FALSE and b is TV.FALSE:
        return TV.FALSE
    return TV.UNKNOWN


def eval_term(t: Term, env: Dict[Var, int]) -> int:
    match t:
        case Zero():
            return 0
        case V(v):
            return env.get(v, 0)
        case Succ(a):
            return eval_term(a, env) + 1
        case Add(a, b):
            return eval_term(a, env) + eval_term(b, env)
        case Mul(a, b):
            return eval_term(a, env) * eval_term(b, env)
    raise TypeError(f"not a term: {t!r}")


def eval_formula(phi: Formula, env: Dict[Var, int], cutoff: int) -> TV:
    match phi:
        case Eq(l, r):
            return TV.TRUE if eval_term(l, env) == eval_term(r, env) else TV.FALSE
        case Neq(l, r):
            return TV.TRUE if eval_term(l, env) != eval_term(r, env) else TV.FALSE
        case Le(l, r):
            return TV.TRUE if eval_term(l, env) <= eval_term(r, env) else TV.FALSE
        case NLe(l, r):
            return TV.TRUE if eval_term(l, env) > eval_term(r, env) else TV.FALSE
        case And(l, r):
            a = eval_formula(l, env, cutoff)
            if a is TV.FALSE:
                return TV.FALSE
            return t_and(a, eval_formula(r, env, cutoff))
        case Or(l, r):
            a = eval_formula(l, env, cutoff)
            if a is TV.TRUE:
                return TV.TRUE
            return t_or(a, eval_formula(r, env, cutoff))
        case AllLe(x, t, b):
            out = TV.TRUE
            saved = env.get(x)
            for w in range(eval_term(t, env) + 1):
                env[x] = w
                out = t_and(out, eval_formula(b, env, cutoff))
                if out is TV.FALSE:
                    break
            _restore(env, x, saved)
            return out
        case ExLe(x, t, b):
            out = TV.FALSE
            saved = env.get(x)
            for w in range(eval_term(t, env) + 1):
                env[x] = w
                out = t_or(out, eval_formula(b, env, cutoff))
                if out is TV.TRUE:
                    break
            _restore(env, x, saved)
            return out
        case All(x, b):
            saved = env.get(x)
            out = TV.UNKNOWN
            for w in range(cutoff + 1):
                env[x] = w
                if eval_formula(b, env, cutoff) is TV.FALSE:
                    out = TV.FALSE
                    break
            _restore(env, x, saved)
            return out
        case Ex(x, b):
            saved = env.get(x)
            out = TV.UNKNOWN
            for w in range(cutoff + 1):
                env[x] = w
                if eval_formula(b, env, cutoff) is TV.TRUE:
                    out = TV.TRUE
                    break
            _restore(env, x, saved)
            return out
    raise TypeError(f"not a formula: {phi!r}")


def _restore(env, x, saved):
    if saved is None:
        env.pop(x, None)
    else:
        env[x] = saved


def sequent_truth(formulas: Iterable[Formula], env: Dict[Var, int],
                  cutoff: int) -> TV:
    """Disjunctive reading; the empty sequent is FALSE."""
    out = TV.FALSE
    for phi in formulas:
        out = t_or(out, eval_formula(phi, env, cutoff))
        if out is TV.TRUE:
            return out
    return out


def all_assignments(variables: Sequence[Var],
                    bound: int) -> Iterator[Dict[Var, int]]:
    """Every assignment of the given variables into {0..bound}."""
    variables = list(variables)
    for values in itertools.product(range(bound + 1), repeat=len(variables)):
        yield dict(zip(variables, values))
