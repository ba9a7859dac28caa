"""Coefficient fields with Adams operations.

Two interchangeable backends are provided:

* :class:`SymbolicField` -- the field ``Q(v, a_1, ..., a_g)`` where ``v``
  stands for ``q**(1/2)`` and ``a_i`` for the Weil numbers of the curve.
  Conjugate Weil numbers are written as ``v**2 / a_i``.  The Adams map
  ``psi_k`` raises every variable to its ``k``-th power.
* :class:`NumericField` -- the concrete field ``Q(sqrt(q))`` for a fixed
  prime power ``q``; ``v`` is the square root and satisfies ``v**2 = q``.
  Adams maps are realised by :class:`Tower`, which keeps the value of a
  quantity over every extension ``F_{q^k}`` up to a fixed depth.

Elements of either field are :class:`higgsdt.ratfun.RatFun` instances over a
ring without series variables.
"""
from __future__ import annotations

from fractions import Fraction
from math import isqrt
from typing import Callable, Sequence

Rat = Fraction


class ScalarError(ArithmeticError):
    """Raised on backend mismatch or exhausted Adams depth."""


class SymbolicField:
    """``Q(v, a_1, ..., a_g)``; ``q`` is represented by ``v**2``."""

    symbolic = True

    def __init__(self, genus: int):
        if genus < 0:
            raise ValueError("genus must be nonnegative")
        self.genus = genus
        self.names = ("v",) + tuple(f"a{i}" for i in range(1, genus + 1))

    def __eq__(self, other):
        return isinstance(other, SymbolicField) and other.genus == self.genus

    def __hash__(self):
        return hash(("symbolic", self.genus))

    def __repr__(self):
        return f"SymbolicField(genus={self.genus})"

    def key(self) -> str:
        return f"symbolic-g{self.genus}"


def is_prime_power(n: int) -> bool:
    if n < 2:
        return False
    p = next(d for d in range(2, n + 1) if n % d == 0)
    while n % p == 0:
        n //= p
    return n == 1


class NumericField:
    """``Q(sqrt(q))`` for a prime power ``q``; ``v`` denotes ``sqrt(q)``.

    When ``q`` is a perfect square the field degenerates to ``Q`` and ``v``
    is replaced by the integer root on normalisation.
    """

    symbolic = False

    def __init__(self, q: int):
        if not is_prime_power(q):
            raise ValueError(f"q must be a prime power, got {q}")
        self.q = q
        self.names = ("v",)
        root = isqrt(q)
        self.root = root if root * root == q else None

    def __eq__(self, other):
        return isinstance(other, NumericField) and other.q == self.q

    def __hash__(self):
        return hash(("numeric", self.q))

    def __repr__(self):
        return f"NumericField(q={self.q})"

    def key(self) -> str:
        return f"numeric-q{self.q}"


class Tower:
    """Values of one quantity over ``F_q, F_{q^2}, ..., F_{q^K}``.

    ``levels[k - 1]`` is the value for the base change to ``F_{q^k}``.  Ring
    operations act levelwise.  Combining towers of different depth keeps the
    common prefix: a product of two coefficients never needs more levels than
    the shallower factor provides.  ``adams(k)`` re-indexes: level ``j`` of
    the result is level ``k*j`` of the input.
    """

    __slots__ = ("levels",)

    def __init__(self, levels: Sequence):
        if not levels:
            raise ScalarError("a tower needs at least one level")
        self.levels = tuple(levels)

    @property
    def depth(self) -> int:
        return len(self.levels)

    def _zip(self, other, op):
        if isinstance(other, Tower):
            n = min(self.depth, other.depth)
            return Tower([op(a, b) for a, b in zip(self.levels[:n], other.levels[:n])])
        return Tower([op(a, other) for a in self.levels])

    def __add__(self, other):
        return self._zip(other, lambda a, b: a + b)

    def __radd__(self, other):
        return Tower([other + a for a in self.levels])

    def __sub__(self, other):
        return self._zip(other, lambda a, b: a - b)

    def __rsub__(self, other):
        return Tower([other - a for a in self.levels])

    def __mul__(self, other):
        return self._zip(other, lambda a, b: a * b)

    def __rmul__(self, other):
        return Tower([other * a for a in self.levels])

    def __truediv__(self, other):
        return self._zip(other, lambda a, b: a / b)

    def __rtruediv__(self, other):
        return Tower([other / a for a in self.levels])

    def __neg__(self):
        return Tower([-a for a in self.levels])

    def __pow__(self, n: int):
        return Tower([a ** n for a in self.levels])

    def __eq__(self, other):
        if isinstance(other, Tower):
            n = min(self.depth, other.depth)
            return self.levels[:n] == other.levels[:n]
        return all(a == other for a in self.levels)

    def __hash__(self):
        return hash(self.levels)

    def __repr__(self):
        return f"Tower({list(self.levels)!r})"

    def is_zero(self) -> bool:
        return all(a.is_zero() for a in self.levels)

    def map(self, fn: Callable) -> "Tower":
        return Tower([fn(a) for a in self.levels])

    def truncate(self, depth: int) -> "Tower":
        if depth > self.depth:
            raise ScalarError(f"tower depth {self.depth} < requested {depth}")
        return Tower(self.levels[:depth])

    def adams(self, k: int) -> "Tower":
        if k < 1:
            raise ValueError("Adams index must be positive")
        if k > self.depth:
            raise ScalarError(
                f"Adams psi_{k} needs level {k} but tower depth is {self.depth}; "
                "raise the truncation depth")
        out = self.levels[k - 1::k]
        if hasattr(out[0], "adams_series"):
            out = [a.adams_series(k) for a in out]
        return Tower(out)

    def level(self, k: int = 1):
        return self.levels[k - 1]

    def pairs(self) -> list[tuple[Rat, Rat]]:
        """Levelwise ``(a, b)`` with value ``a + b*sqrt(q)`` (constants only)."""
        return [a.sqrt_pair() for a in self.levels]


def adams(x, k: int):
    """``psi_k`` on any coefficient: RatFun (symbolic), Tower, or a rational."""
    if isinstance(x, (int, Fraction)):
        return x
    return x.adams(k)
