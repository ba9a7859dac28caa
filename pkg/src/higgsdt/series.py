"""Truncated multigraded power series and plethystic Exp / Log.

A :class:`Series` maps exponent tuples in a box ``0 <= alpha <= bounds`` to
coefficients.  Coefficients may be ints, Fractions, :class:`RatFun` values or
:class:`Tower` values; the only requirements are ring arithmetic and an
``adams(k)`` method.  ``psi_k`` multiplies every exponent by ``k`` and acts
on coefficients by the coefficient Adams map.

Two shapes are used throughout:

* :class:`GradedSeries` -- keys ``(r, d)`` for ``w**r z**d``, scalar coefficients.
* :class:`RankSeries` -- keys ``(r,)`` for ``w**r``, coefficients exact
  rational functions of ``z`` (``psi_k`` then also sends ``z`` to ``z**k``).
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable

from higgsdt.scalar import adams as scalar_adams


def is_zero(x) -> bool:
    if isinstance(x, (int, Fraction)):
        return x == 0
    return x.is_zero()


@lru_cache(maxsize=None)
def mobius(n: int) -> int:
    if n < 1:
        raise ValueError("mobius needs a positive integer")
    result, m, p = 1, n, 2
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            result = -result
        p += 1
    return -result if m > 1 else result


class SeriesError(ValueError):
    pass


def _div(x, n: int):
    """Exact division of a coefficient by a positive integer."""
    return Fraction(x, n) if isinstance(x, int) else x / n


class Series:
    """Truncated series on the box ``prod [0, bounds_i]``."""

    __slots__ = ("coeffs", "bounds")

    def __init__(self, coeffs: dict | None = None, bounds: tuple[int, ...] = ()):
        self.bounds = tuple(bounds)
        clean = {}
        for k, c in (coeffs or {}).items():
            k = tuple(k)
            if len(k) != len(self.bounds):
                raise SeriesError(f"key {k} does not match bounds {self.bounds}")
            if self._fits(k) and not is_zero(c):
                clean[k] = c
        self.coeffs = clean

    # -- construction helpers ------------------------------------------

    def _new(self, coeffs, bounds=None):
        return type(self)(coeffs, self.bounds if bounds is None else bounds)

    @classmethod
    def one(cls, bounds):
        return cls({(0,) * len(bounds): 1}, bounds)

    def _fits(self, k) -> bool:
        return all(0 <= a <= b for a, b in zip(k, self.bounds))

    def __getitem__(self, key):
        return self.coeffs.get(tuple(key), 0)

    def keys(self):
        return sorted(self.coeffs)

    def items(self):
        return [(k, self.coeffs[k]) for k in self.keys()]

    @property
    def zero_key(self):
        return (0,) * len(self.bounds)

    def constant(self):
        return self[self.zero_key]

    def _check(self, other):
        if not isinstance(other, Series) or other.bounds != self.bounds:
            raise SeriesError("series bounds differ")

    # -- ring operations -----------------------------------------------

    def __add__(self, other):
        self._check(other)
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out[k] + c if k in out else c
        return self._new(out)

    def __neg__(self):
        return self._new({k: -c for k, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return self._new({k: c * v for k, v in self.coeffs.items()})

    def __mul__(self, other):
        if not isinstance(other, Series):
            return self.scale(other)
        self._check(other)
        out: dict = {}
        for ka, ca in self.coeffs.items():
            for kb, cb in other.coeffs.items():
                k = tuple(a + b for a, b in zip(ka, kb))
                if not self._fits(k):
                    continue
                t = ca * cb
                out[k] = out[k] + t if k in out else t
        return self._new(out)

    __rmul__ = scale

    def __eq__(self, other):
        return isinstance(other, Series) and self.first_difference(other) is None

    __hash__ = None

    def first_difference(self, other):
        """Smallest key where the two series differ, or ``None``."""
        self._check(other)
        for k in sorted(set(self.coeffs) | set(other.coeffs)):
            if not is_zero(self[k] - other[k]):
                return k
        return None

    def truncate(self, bounds):
        return type(self)(self.coeffs, bounds)

    def restrict(self, pred: Callable[[tuple], bool]):
        return self._new({k: c for k, c in self.coeffs.items() if k == self.zero_key or pred(k)})

    def map(self, fn):
        return self._new({k: fn(c) for k, c in self.coeffs.items()})

    def weight(self, k) -> int:
        return sum(k)

    def max_weight(self) -> int:
        return sum(self.bounds)

    # -- exp / log -----------------------------------------------------

    def _sorted_box(self):
        import itertools
        keys = itertools.product(*(range(b + 1) for b in self.bounds))
        return sorted(keys, key=lambda k: (self.weight(k), k))

    def exp(self):
        """``exp(f)`` for ``f`` without constant term (Euler-operator recursion)."""
        if not is_zero(self.constant()):
            raise SeriesError("exp needs a series without constant term")
        g = self.coeffs
        out = {self.zero_key: 1}
        for a in self._sorted_box():
            if a == self.zero_key:
                continue
            acc = 0
            for b, gb in g.items():
                rest = tuple(x - y for x, y in zip(a, b))
                if min(rest) < 0 or rest not in out:
                    continue
                acc = acc + self.weight(b) * gb * out[rest]
            if not is_zero(acc):
                out[a] = _div(acc, self.weight(a))
        return self._new(out)

    def log(self):
        """``log(F)`` for ``F`` with constant term 1."""
        c0 = self.constant()
        if not (isinstance(c0, (int, Fraction)) and c0 == 1) and not (
                hasattr(c0, "is_one") and c0.is_one()):
            if not (hasattr(c0, "levels") and all(x == 1 for x in c0.levels)):
                raise SeriesError("log needs constant term 1")
        F = self.coeffs
        out: dict = {}
        for a in self._sorted_box():
            if a == self.zero_key:
                continue
            wa = self.weight(a)
            acc = wa * F[a] if a in F else 0
            for b, gb in out.items():
                rest = tuple(x - y for x, y in zip(a, b))
                if min(rest) < 0 or rest not in F or rest == self.zero_key:
                    continue
                acc = acc - self.weight(b) * gb * F[rest]
            if not is_zero(acc):
                out[a] = _div(acc, wa)
        return self._new(out)

    def inv(self):
        c0 = self.constant()
        if is_zero(c0):
            raise SeriesError("inverse needs a unit constant term")
        inv0 = 1 / c0 if not isinstance(c0, int) else Fraction(1, c0)
        F = self.coeffs
        out = {self.zero_key: inv0}
        for a in self._sorted_box():
            if a == self.zero_key:
                continue
            acc = 0
            for b, fb in F.items():
                if b == self.zero_key:
                    continue
                rest = tuple(x - y for x, y in zip(a, b))
                if min(rest) < 0 or rest not in out:
                    continue
                acc = acc + fb * out[rest]
            if not is_zero(acc):
                out[a] = -acc * inv0
        return self._new(out)

    # -- plethystic calculus -------------------------------------------

    def adams(self, k: int):
        """``psi_k``; coefficients whose image leaves the box are never touched."""
        out = {}
        for key, c in self.coeffs.items():
            nk = tuple(k * a for a in key)
            if self._fits(nk):
                out[nk] = scalar_adams(c, k)
        return self._new(out)

    def _adams_range(self):
        """Largest ``k`` for which ``psi_k`` of a nonzero key can fit."""
        return max(self.bounds) if self.bounds else 0

    def pleth_exp(self):
        if not is_zero(self.constant()):
            raise SeriesError("Exp needs a series without constant term")
        acc = self._new({})
        for k in range(1, self._adams_range() + 1):
            acc = acc + self.adams(k).scale(Fraction(1, k))
        return acc.exp()

    def pleth_log(self):
        lg = self.log()
        acc = self._new({})
        for k in range(1, self._adams_range() + 1):
            mu = mobius(k)
            if mu:
                acc = acc + lg.adams(k).scale(Fraction(mu, k))
        return acc

    def __repr__(self):
        body = ", ".join(f"{k}: {c}" for k, c in self.items())
        return f"{type(self).__name__}({{{body}}}, bounds={self.bounds})"


class GradedSeries(Series):
    """Keys ``(r, d)``: coefficient of ``w**r z**d``."""

    __slots__ = ()

    @property
    def R(self):
        return self.bounds[0]

    @property
    def Dmax(self):
        return self.bounds[1]

    def to_json(self, encode=str) -> dict:
        return {"truncation": {"R": self.R, "Dmax": self.Dmax},
                "coefficients": [{"r": r, "d": d, "value": encode(c)}
                                 for (r, d), c in self.items()]}


class RankSeries(Series):
    """Keys ``(r,)``: coefficient of ``w**r`` as an exact function of ``z``."""

    __slots__ = ()

    @property
    def R(self):
        return self.bounds[0]

    def rank(self, r: int):
        return self[(r,)]


def slope_of(key) -> Fraction | None:
    r, d = key
    return None if r == 0 else Fraction(d, r)


def rays(f: GradedSeries) -> dict:
    """Group nonzero keys by slope ``d/r`` (``None`` stands for infinity)."""
    out: dict = {}
    for k in f.coeffs:
        if k != f.zero_key:
            out.setdefault(slope_of(k), []).append(k)
    return out


def slope_log(f: GradedSeries, tau="all") -> GradedSeries:
    """Plethystic Log taken ray by ray (the restriction of ``f`` to each ray).

    ``tau`` selects a single slope (a Fraction, or ``None`` for infinity);
    the default sums the Logs of all rays.
    """
    acc = f._new({})
    groups = rays(f)
    wanted = groups if tau == "all" else {tau: groups.get(tau, [])}
    for s in wanted:
        ray = f.restrict(lambda k, s=s: slope_of(k) == s)
        acc = acc + ray.pleth_log()
    return acc


def rf_to_series(f: RankSeries, Dmax: int, var: str = "z") -> GradedSeries:
    """Expand each rank coefficient in ``var`` up to degree ``Dmax``."""
    out = {}
    for (r,), c in f.items():
        out.update(((r, d), x) for d, x in enumerate(expand_coefficient(c, var, Dmax)))
    return GradedSeries(out, (f.R, Dmax))


def expand_coefficient(c, var: str, order: int) -> list:
    if isinstance(c, (int, Fraction)):
        return [c] + [0] * order
    if hasattr(c, "levels"):
        from higgsdt.scalar import Tower
        cols = [expand_coefficient(x, var, order) for x in c.levels]
        return [Tower([col[d].ring.drop(col[d], col[d].ring.scalar_ring())
                       if hasattr(col[d], "ring") else col[d] for col in cols])
                for d in range(order + 1)]
    vals = c.series_expand(var, order)
    scal = c.ring.scalar_ring()
    return [c.ring.drop(x, scal) for x in vals]


def from_terms(terms: Iterable[tuple[tuple, object]], bounds, cls=GradedSeries):
    out: dict = {}
    for k, c in terms:
        k = tuple(k)
        out[k] = out[k] + c if k in out else c
    return cls(out, bounds)
