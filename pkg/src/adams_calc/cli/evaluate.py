"""Evaluation of parsed expressions on a model space."""

from __future__ import annotations

from fractions import Fraction
from typing import Any, Mapping

from ..exact_arith import format_rational
from ..graded_ring import GradedElement, RingError, exp_nilpotent, invert_unit, log_unit
from ..k_calculus import (
    Bundle,
    HPClass,
    KClass,
    KTheoryError,
    Space,
    acgenus,
    adams,
    adams_H,
    rho,
    todd_factor,
)
from ..pushforward import Fibration, FibrationError, push_H, push_K
from .parser import BinOp, Call, Expr, Neg, Num, Pow, Sym, integer_value, parse_expr


class EvalError(ValueError):
    pass


def _as_hp(x):
    if isinstance(x, KClass):
        return x.ch
    if isinstance(x, GradedElement):
        return HPClass(x.ring, 0, x)
    return x


class Evaluator:
    def __init__(self, space: Space, names: Mapping[str, Any] | None = None):
        self.space = space
        self.names = dict(names or {})

    def __call__(self, expr: Expr | str):
        if isinstance(expr, str):
            expr = parse_expr(expr)
        try:
            return self.eval(expr)
        except (RingError, KTheoryError, FibrationError, ZeroDivisionError, TypeError) as exc:
            raise EvalError(str(exc)) from exc

    def eval(self, node: Expr):
        if isinstance(node, Num):
            if node.den == 0:
                raise EvalError(f"division by zero in literal {node.num}/0")
            return Fraction(node.num, node.den)
        if isinstance(node, Sym):
            if node.name in self.space.ring.names:
                return self.space.gen(node.name)
            if node.name in self.names:
                return self.names[node.name]
            raise EvalError(f"unknown symbol {node.name!r}")
        if isinstance(node, Neg):
            return -self._arith(self.eval(node.operand))
        if isinstance(node, Pow):
            return self._arith(self.eval(node.base)) ** node.exp
        if isinstance(node, BinOp):
            return self._binary(node.op, self.eval(node.left), self.eval(node.right))
        if isinstance(node, Call):
            return getattr(self, f"_fn_{node.name}")(node.args)
        raise EvalError(f"cannot evaluate {node!r}")

    @staticmethod
    def _arith(x):
        if isinstance(x, (Bundle, Fibration)):
            raise EvalError(f"{type(x).__name__} does not support arithmetic")
        return x

    def _binary(self, op: str, a, b):
        a, b = self._arith(a), self._arith(b)
        kinds = {type(a), type(b)}
        if KClass in kinds and (HPClass in kinds or GradedElement in kinds):
            a, b = _as_hp(a), _as_hp(b)
        elif HPClass in kinds and GradedElement in kinds:
            a, b = _as_hp(a), _as_hp(b)
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        return a * b

    # -- functions -------------------------------------------------------------
    def _kclass(self, x) -> KClass:
        if isinstance(x, Fraction):
            return self.space.kclass(x)
        if not isinstance(x, KClass):
            raise EvalError(f"expected a K-class, got {type(x).__name__}")
        return x

    def _hp(self, x) -> HPClass:
        if isinstance(x, Fraction):
            return HPClass(self.space.ring, 0, self.space.ring.const(x))
        x = _as_hp(x) if isinstance(x, GradedElement) else x
        if not isinstance(x, HPClass):
            raise EvalError(f"expected a cohomology class, got {type(x).__name__}")
        return x

    def _bundle(self, x) -> Bundle:
        if isinstance(x, GradedElement):
            return Bundle.of(self.space, [x])
        if not isinstance(x, Bundle):
            raise EvalError(f"expected a bundle, got {type(x).__name__}")
        return x

    def _line_roots(self, node: Expr) -> list[GradedElement] | None:
        """Roots of ``L(x) + L(y) + ...`` read syntactically, else None."""
        if isinstance(node, Call) and node.name == "L":
            root = self.eval(node.args[0])
            if isinstance(root, Fraction) and root == 0:
                root = self.space.ring.zero
            return [root] if isinstance(root, GradedElement) else None
        if isinstance(node, BinOp) and node.op == "+":
            left, right = self._line_roots(node.left), self._line_roots(node.right)
            if left is not None and right is not None:
                return left + right
        return None

    def _bundle_arg(self, node: Expr):
        roots = self._line_roots(node)
        if roots is not None:
            return Bundle.of(self.space, roots)
        return self.eval(node)

    def _fn_L(self, args):
        root = self.eval(args[0])
        if isinstance(root, Fraction) and root == 0:
            root = self.space.ring.zero
        if not isinstance(root, GradedElement):
            raise EvalError("L expects a degree-2 cohomology class")
        return self.space.line(root)

    def _fn_ch(self, args):
        return self._kclass(self.eval(args[0])).ch

    def _fn_psi(self, args):
        return adams(integer_value(args[0]), self._kclass(self.eval(args[1])))

    def _fn_psiH(self, args):
        return adams_H(integer_value(args[0]), self._hp(self.eval(args[1])))

    def _fn_td(self, args):
        x = self._bundle_arg(args[0])
        if isinstance(x, GradedElement):
            return HPClass(x.ring, 0, todd_factor(x))
        return acgenus(self._bundle(x))

    def _fn_rho(self, args):
        return rho(integer_value(args[0]), self._bundle(self._bundle_arg(args[1])))

    def _fn_push(self, args):
        f = self.eval(args[0])
        if not isinstance(f, Fibration):
            raise EvalError("first argument of push must be a fibration")
        x = self.eval(args[1])
        if isinstance(x, Fraction):
            x = f.total.kclass(x)
        if isinstance(x, KClass):
            return push_K(f, x)
        return push_H(f, self._hp(x))

    def _fn_exp(self, args):
        x = self.eval(args[0])
        if isinstance(x, HPClass) and x.degree == 0:
            return HPClass(x.ring, 0, exp_nilpotent(x.element))
        if isinstance(x, GradedElement):
            return exp_nilpotent(x)
        raise EvalError("exp expects a cohomology class of degree 0")

    def _fn_log(self, args):
        x = self.eval(args[0])
        if isinstance(x, HPClass) and x.degree == 0:
            return HPClass(x.ring, 0, log_unit(x.element))
        if isinstance(x, GradedElement):
            return log_unit(x)
        raise EvalError("log expects a cohomology class of degree 0")

    def _fn_inv(self, args):
        x = self.eval(args[0])
        if isinstance(x, Fraction):
            if x == 0:
                raise EvalError("non-unit: 0")
            return 1 / x
        if isinstance(x, GradedElement):
            return invert_unit(x)
        if isinstance(x, (HPClass, KClass)):
            return x.inverse()
        raise EvalError(f"cannot invert {type(x).__name__}")


def render(value) -> str:
    if isinstance(value, KClass):
        return f"K^{value.degree}: {value.upoly}"
    if isinstance(value, HPClass):
        return f"HP^{value.degree}: {value.element}"
    if isinstance(value, Fraction):
        return format_rational(value)
    return str(value)
