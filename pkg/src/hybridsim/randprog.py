"""Random hybrid programs for differential testing of the two semantics.

Programs come out in core (desugared) form and right-nested, with counted
while loops (at most 8 unfoldings each) and strictly positive literal
durations inside loop bodies, so every generated program terminates.  Time
instants are drawn from the dyadic grid k/1024, which keeps the residual
arithmetic of the machine exact and lets shift properties be checked
bitwise.  A small fraction of programs exercises the failure rules through
divisions, square roots of negatives, reads of unset variables, and
non-linear right-hand sides.
"""
from __future__ import annotations

import random

from .syntax import (And, Apply, Assign, Atom, BFalse, BTrue, Const, Diff,
                     If, Leq, Not, Or, Program, Seq, Var, While)

VARS = ("x", "y", "z", "w")

_DYADIC = (0.125, 0.25, 0.375, 0.5, 0.75, 1.0, 1.5, 2.0)


def gen_env(rng: random.Random, names=VARS) -> dict:
    env = {}
    for name in names:
        if rng.random() < 0.9:
            env[name] = rng.randrange(-8, 9) / 4.0
    return env


def gen_time(rng: random.Random, lo: float = 0.0, hi: float = 4.0) -> float:
    return rng.randrange(int(lo * 1024), int(hi * 1024) + 1) / 1024.0


def _const(rng) -> Const:
    return Const(rng.choice(_DYADIC) * rng.choice((-1.0, 1.0)))


def _expr(rng, known, depth: int):
    r = rng.random()
    if depth <= 0 or r < 0.3:
        if known and rng.random() < 0.6:
            return Var(rng.choice(sorted(known)))
        if rng.random() < 0.03:
            return Var(rng.choice(VARS) + "q")  # probably unset
        return _const(rng)
    if r < 0.55:
        return Apply("+", (_expr(rng, known, depth - 1), _expr(rng, known, depth - 1)))
    if r < 0.7:
        return Apply("-", (_expr(rng, known, depth - 1), _expr(rng, known, depth - 1)))
    if r < 0.85:
        return Apply("*", (Const(float(rng.randrange(-3, 4))), _expr(rng, known, depth - 1)))
    if r < 0.93:
        return Apply("/", (_expr(rng, known, depth - 1),
                           _expr(rng, known, 0) if rng.random() < 0.4
                           else Const(float(rng.choice((2, 4, -2))))))
    if r < 0.97:
        return Apply("sqrt", (_expr(rng, known, depth - 1),))
    fn = rng.choice(("sin", "cos", "min"))
    if fn == "min":
        return Apply(fn, (_expr(rng, known, depth - 1), _expr(rng, known, depth - 1)))
    return Apply(fn, (_expr(rng, known, depth - 1),))


def _linear_rhs(rng, bound, known):
    """Mostly-affine right-hand side over the bound variables; occasionally
    deliberately non-linear."""
    if rng.random() < 0.05:
        x = Var(rng.choice(bound))
        return Apply("*", (x, x))
    terms = [_const(rng)]
    for name in bound:
        if rng.random() < 0.6:
            terms.append(Apply("*", (Const(float(rng.randrange(-2, 3))), Var(name))))
    frozen = [v for v in sorted(known) if v not in bound]
    if frozen and rng.random() < 0.4:
        terms.append(Var(rng.choice(frozen)))
    e = terms[0]
    for term in terms[1:]:
        e = Apply("+", (e, term))
    return e


def _bool(rng, known, depth: int):
    r = rng.random()
    if depth <= 0 or r < 0.5:
        if r < 0.05:
            return rng.choice((BTrue(), BFalse()))
        return Leq(_expr(rng, known, 1), _expr(rng, known, 1))
    if r < 0.7:
        return And(_bool(rng, known, depth - 1), _bool(rng, known, depth - 1))
    if r < 0.9:
        return Or(_bool(rng, known, depth - 1), _bool(rng, known, depth - 1))
    return Not(_bool(rng, known, depth - 1))


def _atomic(rng, known, in_loop: bool):
    if rng.random() < 0.45:
        name = rng.choice(VARS)
        stmt = Atom(Assign(name, _expr(rng, known, 2)))
        known.add(name)
        return stmt
    k = rng.choice((1, 1, 2))
    bound = rng.sample(VARS, k)
    pairs = tuple((name, _linear_rhs(rng, bound, known)) for name in bound)
    for name in bound:
        known.add(name)  # solved values land in the environment
    if in_loop or rng.random() < 0.8:
        duration = Const(rng.choice(_DYADIC))
    else:
        duration = _expr(rng, known, 1)
    return Atom(Diff(pairs, duration))


def _seq2(a: Program, b: Program) -> Program:
    """Sequence two programs, keeping the tree right-nested (the canonical
    shape the parser produces)."""
    if isinstance(a, Seq):
        return Seq(a.first, _seq2(a.rest, b))
    return Seq(a, b)


def _stmt(rng, known, depth: int, in_loop: bool):
    r = rng.random()
    if depth <= 0 or r < 0.45:
        return _atomic(rng, known, in_loop)
    if r < 0.65:
        stmts = [_stmt(rng, known, depth - 1, in_loop)
                 for _ in range(rng.randrange(2, 4))]
        p = stmts[-1]
        for s in reversed(stmts[:-1]):
            p = _seq2(s, p)
        return p
    if r < 0.85:
        then_known, else_known = set(known), set(known)
        p = If(_bool(rng, known, 1),
               _stmt(rng, then_known, depth - 1, in_loop),
               _stmt(rng, else_known, depth - 1, in_loop))
        known &= then_known & else_known
        return p
    # counted loop: c := 0 ; while c <= k do { body ; c := c + 1 }
    counter = rng.choice(VARS) + "c"
    bound = float(rng.randrange(0, 8))
    body_known = set(known) | {counter}
    inner = _stmt(rng, body_known, depth - 1, True)
    body = _seq2(inner, Atom(Assign(counter, Apply("+", (Var(counter), Const(1.0))))))
    loop = While(Leq(Var(counter), Const(bound)), body)
    known.add(counter)
    return Seq(Atom(Assign(counter, Const(0.0))), loop)


def gen_program(seed: int, depth: int = 5) -> tuple:
    """Returns (program, env) for the given seed."""
    rng = random.Random(seed)
    env = gen_env(rng)
    known = set(env)
    return _stmt(rng, known, depth, False), env


def gen_times(seed: int, count: int) -> list:
    rng = random.Random(seed ^ 0x5EED)
    return [gen_time(rng) for _ in range(count)]
