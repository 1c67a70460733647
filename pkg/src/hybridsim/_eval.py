"""Strict partial evaluation of expressions and conditions over an environment.

An environment is a plain dict mapping variable names to finite floats.
Failures (division by zero, domain errors, missing variables, non-finite
results) raise `HybridError`; callers fold that into outcome values.
Conjunction and disjunction do NOT short-circuit: both operands are always
evaluated so that an undefined operand is never masked.
"""
from __future__ import annotations

import math

from .errors import (arity_error, division_by_zero, domain_error,
                     uninitialized)
from .syntax import (And, Apply, BFalse, BTrue, BoolExpr, Cmp, Const, Expr,
                     Leq, Loc, Or, Var, pretty_bool, pretty_expr)

Env = dict

_NOWHERE = Loc(0, 0, 0, 0)


def _where(node) -> tuple:
    loc = node.loc or _NOWHERE
    return loc.line, loc.col


def _src(node) -> str:
    if node.src is not None:
        return node.src
    if isinstance(node, (Var, Const, Apply)):
        return pretty_expr(node)
    return pretty_bool(node)


def eval_expr(env: Env, e: Expr) -> float:
    """Bottom-up strict evaluation; raises HybridError when undefined."""
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Var):
        try:
            return env[e.name]
        except KeyError:
            line, col = _where(e)
            raise uninitialized(e.name, _src(e), line, col, env) from None
    args = [eval_expr(env, a) for a in e.args]
    line, col = _where(e)
    fn = e.fn
    try:
        if fn == "+":
            _want(e, 2, args)
            v = args[0] + args[1]
        elif fn == "-":
            if len(args) == 1:
                v = -args[0]
            else:
                _want(e, 2, args)
                v = args[0] - args[1]
        elif fn == "*":
            _want(e, 2, args)
            v = args[0] * args[1]
        elif fn == "/":
            _want(e, 2, args)
            if args[1] == 0.0:
                raise division_by_zero(_src(e), line, col, env)
            v = args[0] / args[1]
        elif fn == "sqrt":
            _want(e, 1, args)
            if args[0] < 0.0:
                raise domain_error(_src(e), line, col, env)
            v = math.sqrt(args[0])
        elif fn == "exp":
            _want(e, 1, args)
            v = math.exp(args[0])
        elif fn == "ln":
            _want(e, 1, args)
            if args[0] <= 0.0:
                raise domain_error(_src(e), line, col, env)
            v = math.log(args[0])
        elif fn == "sin":
            _want(e, 1, args)
            v = math.sin(args[0])
        elif fn == "cos":
            _want(e, 1, args)
            v = math.cos(args[0])
        elif fn == "tan":
            _want(e, 1, args)
            v = math.tan(args[0])
        elif fn == "min":
            _want(e, 2, args)
            v = min(args)
        elif fn == "max":
            _want(e, 2, args)
            v = max(args)
        elif fn == "pow":
            _want(e, 2, args)
            v = math.pow(args[0], args[1])
        else:
            raise arity_error(fn, "?", len(args), _src(e), line, col)
    except (ValueError, OverflowError):
        raise domain_error(_src(e), line, col, env) from None
    if not math.isfinite(v):
        raise domain_error(_src(e), line, col, env)
    return v


def _want(e: Apply, n: int, args: list):
    if len(args) != n:
        line, col = _where(e)
        raise arity_error(e.fn, str(n), len(args), _src(e), line, col)


_CMP = {
    "<": lambda a, b: a < b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
    "==": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
}


def eval_bool(env: Env, b: BoolExpr) -> bool:
    """Evaluate a condition; both operands of &&/|| are always evaluated."""
    if isinstance(b, BTrue):
        return True
    if isinstance(b, BFalse):
        return False
    if isinstance(b, Leq):
        return eval_expr(env, b.lhs) <= eval_expr(env, b.rhs)
    if isinstance(b, Cmp):
        return _CMP[b.op](eval_expr(env, b.lhs), eval_expr(env, b.rhs))
    if isinstance(b, And):
        lhs = eval_bool(env, b.lhs)
        rhs = eval_bool(env, b.rhs)
        return lhs and rhs
    if isinstance(b, Or):
        lhs = eval_bool(env, b.lhs)
        rhs = eval_bool(env, b.rhs)
        return lhs or rhs
    return not eval_bool(env, b.arg)
