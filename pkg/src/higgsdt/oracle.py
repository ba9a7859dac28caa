"""Brute-force count of nilpotent twisted Higgs fields on split bundles over P^1.

A split bundle ``E = O(n_1) + ... + O(n_r)`` with ``n_1 >= ... >= n_r >= 0``
has ``Hom(O(n_j), O(n_i + l))`` equal to binary forms of degree
``n_i + l - n_j``; after dehomogenising, an entry is a polynomial in ``t`` of
degree ``< hom_dim``.  A field ``theta`` is nilpotent exactly when every
non-leading coefficient of its characteristic polynomial vanishes.

Only prime ``q`` is supported: entries live in ``F_p[t]``.
"""
from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence


DEFAULT_BUDGET = 2 ** 24


class BudgetExceeded(RuntimeError):
    pass


def _is_prime(n: int) -> bool:
    return n >= 2 and all(n % p for p in range(2, int(n ** 0.5) + 1))


@dataclass(frozen=True)
class SplitBundle:
    exponents: tuple[int, ...]

    def __post_init__(self):
        e = tuple(self.exponents)
        if any(x < 0 for x in e) or list(e) != sorted(e, reverse=True):
            raise ValueError("split bundle exponents must be weakly decreasing and >= 0")
        object.__setattr__(self, "exponents", e)

    @property
    def rank(self) -> int:
        return len(self.exponents)

    @property
    def degree(self) -> int:
        return sum(self.exponents)


def _bundle(E) -> SplitBundle:
    return E if isinstance(E, SplitBundle) else SplitBundle(tuple(E))


def hom_dim(E, l: int) -> list[list[int]]:
    """Entry ``(i, j)`` is ``dim Hom(O(n_i), O(n_j + l)) = max(0, n_j - n_i + l + 1)``."""
    n = _bundle(E).exponents
    return [[max(0, nj - ni + l + 1) for nj in n] for ni in n]


def gl_order(m: int, q: int) -> int:
    out = 1
    for i in range(m):
        out *= q ** m - q ** i
    return out


def aut_count(E, q: int) -> int:
    n = _bundle(E).exponents
    dim_end = sum(sum(row) for row in hom_dim(n, 0))
    mult = Counter(n).values()
    out = q ** (dim_end - sum(m * m for m in mult))
    for m in mult:
        out *= gl_order(m, q)
    return out


# -- polynomials over F_p as coefficient tuples -------------------------

def _padd(a, b, p):
    n = max(len(a), len(b))
    return tuple(((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)) % p for i in range(n))


def _psub(a, b, p):
    return _padd(a, tuple(-x for x in b), p)


def _pmul(a, b, p):
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return tuple(out)


def _pzero(a) -> bool:
    return not any(a)


def _det(m, p):
    r = len(m)
    if r == 1:
        return m[0][0]
    if r == 2:
        return _psub(_pmul(m[0][0], m[1][1], p), _pmul(m[0][1], m[1][0], p), p)
    acc = ()
    for j in range(r):
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        term = _pmul(m[0][j], _det(minor, p), p)
        acc = _padd(acc, term, p) if j % 2 == 0 else _psub(acc, term, p)
    return acc


def is_nilpotent(theta, p: int) -> bool:
    """All elementary symmetric functions of the eigenvalues vanish (r <= 3)."""
    r = len(theta)
    tr = ()
    for i in range(r):
        tr = _padd(tr, theta[i][i], p)
    if not _pzero(tr):
        return False
    if r >= 3:
        e2 = ()
        for i, j in itertools.combinations(range(r), 2):
            e2 = _padd(e2, _det([[theta[i][i], theta[i][j]], [theta[j][i], theta[j][j]]], p), p)
        if not _pzero(e2):
            return False
    return r == 1 or _pzero(_det(theta, p))


def count_nilpotent(E, l: int, q: int, budget: int = DEFAULT_BUDGET) -> int:
    if l > 0:
        raise ValueError("the oracle counts nilpotent fields for l <= 0 only")
    if not _is_prime(q):
        raise ValueError("the brute-force oracle supports prime q only")
    n = _bundle(E).exponents
    r = len(n)
    if r > 3:
        raise ValueError("the oracle handles rank <= 3")
    dims = hom_dim(n, l)
    total = sum(sum(row) for row in dims)
    if q ** total > budget:
        raise BudgetExceeded(f"{q}^{total} Higgs fields exceed the budget {budget}")
    # theta[j][i] is the map O(n_i) -> O(n_j + l); its degree bound is dims[i][j]
    slots = [(j, i) for i in range(r) for j in range(r)]
    spaces = [list(itertools.product(range(q), repeat=dims[i][j])) for (j, i) in slots]
    count = 0
    for choice in itertools.product(*spaces):
        theta = [[()] * r for _ in range(r)]
        for (j, i), poly in zip(slots, choice):
            theta[j][i] = poly
        if is_nilpotent(theta, q):
            count += 1
    return count


def split_bundles(r: int, d: int):
    """Exponent tuples ``n_1 >= ... >= n_r >= 0`` summing to ``d``."""
    def rec(k, rem, cap):
        if k == 0:
            if rem == 0:
                yield ()
            return
        for first in range(min(rem, cap), -1, -1):
            for rest in rec(k - 1, rem - first, first):
                yield (first,) + rest
    return [SplitBundle(e) for e in rec(r, d, d)]


def oracle_vol(q: int, l: int, r: int, d: int, budget: int = DEFAULT_BUDGET) -> Fraction:
    """``sum_E #nilpotent(E) / |Aut E|`` over split bundles of rank r, degree d."""
    return sum((Fraction(count_nilpotent(E, l, q, budget), aut_count(E, q))
                for E in split_bundles(r, d)), Fraction(0))


@dataclass(frozen=True)
class OracleRow:
    q: int
    l: int
    r: int
    d: int
    volume: Fraction
    formula: object

    @property
    def match(self) -> bool:
        return self.formula == self.volume


def formula_side(q: int, l: int, R: int, dmax: int) -> dict:
    """``(-sqrt q)**(l r**2)`` times the nilpotent vector series coefficients (genus 0)."""
    from higgsdt.curve import CurveData
    from higgsdt.dt import level1, nil_vec_series
    from higgsdt.series import rf_to_series

    c = CurveData.numeric(q, [])
    cl = c.at(1)
    ser = rf_to_series(nil_vec_series(c, l, R), dmax)
    out = {}
    for r in range(1, R + 1):
        factor = (-cl.sqrt_q()) ** (l * r * r)
        for d in range(dmax + 1):
            x = factor * cl.scalars(level1(ser[(r, d)]))
            a, b = x.sqrt_pair()
            out[(r, d)] = a if b == 0 else x
    return out


def compare(qs: Sequence[int], ls: Sequence[int], rs: Sequence[int], dmax: int,
            budget: int = DEFAULT_BUDGET) -> list[OracleRow]:
    rows = []
    for q in qs:
        for l in ls:
            formula = formula_side(q, l, max(rs), dmax)
            for r in rs:
                for d in range(dmax + 1):
                    rows.append(OracleRow(q, l, r, d, oracle_vol(q, l, r, d, budget), formula[(r, d)]))
    return rows
