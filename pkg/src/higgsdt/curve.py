"""A smooth projective curve over F_q, seen through its zeta function.

The curve is given either by its genus alone (symbolic backend: Weil numbers
``a_i`` and ``v**2/a_i`` are formal) or by ``q`` and the point counts
``N_1..N_g`` (numeric backend).  In the numeric case the zeta numerator of
every base change ``X x F_{q^k}`` is derived from the point counts with
Newton's identities and the functional equation.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from higgsdt.ratfun import PoleError, RatFun, RFRing
from higgsdt.scalar import NumericField, SymbolicField


class CurveError(ValueError):
    pass


class SpecialPointError(ArithmeticError):
    """``Z*`` requested at the point where no value is defined (``z = q``)."""


@dataclass(frozen=True)
class Monomial:
    """``sign * v**v_exp * prod var**exp`` with integer (possibly negative) exponents."""

    sign: int = 1
    v_exp: int = 0
    exps: tuple[tuple[str, int], ...] = ()

    def to_ratfun(self, ring: RFRing) -> RatFun:
        exps = dict(self.exps)
        if self.v_exp:
            exps["v"] = exps.get("v", 0) + self.v_exp
        return ring.monomial(self.sign, exps)


@dataclass(frozen=True)
class CurveData:
    genus: int
    backend: str = "symbolic"
    q: int | None = None
    point_counts: tuple[int, ...] | None = None
    _cache: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    def __post_init__(self):
        if self.genus < 0:
            raise CurveError("genus must be nonnegative")
        if self.backend == "symbolic":
            if self.q is not None or self.point_counts:
                raise CurveError("symbolic curves take no q or point counts")
            return
        if self.backend != "numeric":
            raise CurveError(f"unknown backend {self.backend!r}")
        if self.q is None or self.q < 2:
            raise CurveError("numeric curves need q >= 2")
        counts = tuple(self.point_counts or ())
        if len(counts) != self.genus:
            raise CurveError(f"need {self.genus} point counts, got {len(counts)}")
        object.__setattr__(self, "point_counts", counts)
        q = self.q
        for j, n in enumerate(counts, start=1):
            dev = n - (q ** j + 1)
            if dev * dev > 4 * self.genus ** 2 * q ** j:
                raise CurveError(f"N_{j} = {n} violates the Weil bound")
        for k in range(1, 4):
            if self.numerator_coefficients(k) and sum(
                    Fraction(c) for c in self.numerator_coefficients(k)) <= 0:
                raise CurveError(f"|Pic^0(X_{k})| = P_{k}(1) must be positive")

    # -- constructors --------------------------------------------------

    @classmethod
    def symbolic(cls, genus: int) -> "CurveData":
        return cls(genus)

    @classmethod
    def numeric(cls, q: int, point_counts: Sequence[int] = ()) -> "CurveData":
        counts = tuple(point_counts)
        return cls(len(counts), "numeric", q, counts)

    @classmethod
    def from_config(cls, spec: dict) -> "CurveData":
        g = int(spec["genus"])
        if spec.get("backend", "numeric" if "q" in spec else "symbolic") == "symbolic":
            return cls.symbolic(g)
        counts = spec.get("point_counts", spec.get("points", []))
        c = cls.numeric(int(spec["q"]), counts)
        if c.genus != g:
            raise CurveError(f"genus {g} needs {g} point counts")
        return c

    # -- basic data ----------------------------------------------------

    @property
    def is_symbolic(self) -> bool:
        return self.backend == "symbolic"

    @cached_property
    def field(self):
        return SymbolicField(self.genus) if self.is_symbolic else NumericField(self.q)

    def key(self) -> str:
        if self.is_symbolic:
            return f"g{self.genus}"
        return f"g{self.genus}-q{self.q}-N{','.join(map(str, self.point_counts))}"

    def to_config(self) -> dict:
        if self.is_symbolic:
            return {"genus": self.genus, "backend": "symbolic"}
        return {"genus": self.genus, "q": self.q, "point_counts": list(self.point_counts)}

    def power_sums(self, upto: int) -> list[int]:
        """``s_m = sum_i omega_i**m`` for m = 1..upto (numeric backend)."""
        if self.is_symbolic:
            raise CurveError("power sums need the numeric backend")
        g, q = self.genus, self.q
        s = [q ** j + 1 - n for j, n in enumerate(self.point_counts, start=1)]
        e = self._elementary()
        while len(s) < upto:
            m = len(s) + 1
            # Newton: s_m = sum_{i=1}^{2g} (-1)^{i-1} e_i s_{m-i}  (+ (-1)^{m-1} m e_m)
            acc = (-1) ** (m - 1) * m * e[m] if m <= 2 * g else 0
            for i in range(1, min(m - 1, 2 * g) + 1):
                acc += (-1) ** (i - 1) * e[i] * s[m - i - 1]
            s.append(acc)
        return s[:upto]

    def _elementary(self) -> list[int]:
        """Elementary symmetric functions e_0..e_{2g} of the Weil numbers."""
        g, q = self.genus, self.q
        s = [q ** j + 1 - n for j, n in enumerate(self.point_counts, start=1)]
        e = [Fraction(1)]
        for k in range(1, g + 1):
            acc = sum((-1) ** (i - 1) * e[k - i] * s[i - 1] for i in range(1, k + 1))
            e.append(acc / k)
        for k in range(g + 1, 2 * g + 1):
            e.append(q ** (k - g) * e[2 * g - k])
        if any(x.denominator != 1 for x in e):
            raise CurveError("point counts do not come from an integral zeta numerator")
        return [int(x) for x in e]

    def numerator_coefficients(self, level: int = 1) -> list[int]:
        """Integer coefficients of ``P_level(T)`` (numeric backend)."""
        key = ("P", level)
        if key not in self._cache:
            g = self.genus
            s = self.power_sums(2 * g * level)
            sk = [s[level * j - 1] for j in range(1, 2 * g + 1)]
            e = [Fraction(1)]
            for k in range(1, 2 * g + 1):
                acc = sum((-1) ** (i - 1) * e[k - i] * sk[i - 1] for i in range(1, k + 1))
                e.append(acc / k)
            self._cache[key] = [int((-1) ** j * x) for j, x in enumerate(e)]
        return self._cache[key]

    def points(self, level: int = 1) -> int:
        """``|X(F_{q^level})|``."""
        if self.is_symbolic:
            raise CurveError("point counts need the numeric backend")
        if self.genus == 0:
            return self.q ** level + 1
        return self.q ** level + 1 - self.power_sums(level)[level - 1]

    def at(self, level: int = 1) -> "CurveLevel":
        if self.is_symbolic and level != 1:
            raise CurveError("symbolic curves are base-changed by Adams maps, not levels")
        key = ("level", level)
        if key not in self._cache:
            self._cache[key] = CurveLevel(self, level)
        return self._cache[key]


class CurveLevel:
    """The base change ``X x F_{q^level}`` with its zeta evaluators."""

    def __init__(self, curve: CurveData, level: int):
        self.curve = curve
        self.level = level
        self.genus = curve.genus
        self.field = curve.field
        self.scalars = RFRing(self.field, ())

    def key(self) -> str:
        return f"{self.curve.key()}@{self.level}"

    def q(self, ring: RFRing | None = None) -> RatFun:
        ring = ring or self.scalars
        if self.curve.is_symbolic:
            return ring.q()
        return ring(self.curve.q ** self.level)

    def sqrt_q(self, ring: RFRing | None = None) -> RatFun:
        ring = ring or self.scalars
        return ring.v() ** self.level

    def numerator(self, ring: RFRing) -> list[RatFun]:
        """Coefficients of ``P(T)`` in ``ring``."""
        if self.curve.is_symbolic:
            key = ("Psym", ring)
            cache = self.curve._cache
            if key not in cache:
                v2 = ring.q()
                poly = [ring.one]
                for i in range(1, self.genus + 1):
                    a = ring.gen(f"a{i}")
                    for root in (a, v2 / a):
                        nxt = [ring.zero] * (len(poly) + 1)
                        for k, c in enumerate(poly):
                            nxt[k] = nxt[k] + c
                            nxt[k + 1] = nxt[k + 1] - c * root
                        poly = nxt
                cache[key] = poly
            return cache[key]
        return [ring(c) for c in self.curve.numerator_coefficients(self.level)]

    def numerator_at(self, m: RatFun) -> RatFun:
        coeffs = self.numerator(m.ring)
        acc = m.ring.zero
        for c in reversed(coeffs):
            acc = acc * m + c
        return acc

    def pic0(self, ring: RFRing | None = None) -> RatFun:
        """``|Pic^0| = P(1)``."""
        ring = ring or self.scalars
        return self.numerator_at(ring.one)

    def points(self, ring: RFRing | None = None) -> RatFun:
        """``|X(F_q)| = q + 1 - sum omega_i`` (symbolically ``q + 1 + P'(0)``)."""
        ring = ring or self.scalars
        if self.curve.is_symbolic:
            coeffs = self.numerator(ring)
            return self.q(ring) + 1 + (coeffs[1] if len(coeffs) > 1 else 0)
        return ring(self.curve.points(self.level))

    # -- zeta evaluators -----------------------------------------------

    def _arg(self, m, ring):
        if isinstance(m, Monomial):
            return m.to_ratfun(ring)
        return m

    def zeta_at(self, m, ring: RFRing | None = None) -> RatFun:
        """``Z_X(m) = P(m) / ((1 - m)(1 - q m))``."""
        m = self._arg(m, ring or self.scalars)
        q = self.q(m.ring)
        if m == 1 or m * q == 1:
            raise PoleError(f"Z_X has a pole at the constant argument {m}; use zstar_at")
        return self.numerator_at(m) / ((1 - m) * (1 - q * m))

    def zeta_tilde_at(self, m, ring: RFRing | None = None) -> RatFun:
        """``Z~_X(m) = m**(1-g) Z_X(m)``."""
        m = self._arg(m, ring or self.scalars)
        return m ** (1 - self.genus) * self.zeta_at(m)

    def residue_value(self, ring: RFRing | None = None) -> RatFun:
        """``Res_{z=1} Z_X(z/q) = q**(1-g) |Pic^0| / (q - 1)``."""
        ring = ring or self.scalars
        q = self.q(ring)
        return q ** (1 - self.genus) * self.pic0(ring) / (q - 1)

    def zstar_at(self, m, ring: RFRing | None = None) -> RatFun:
        """``Z*_X(m/q)``: the residue value at ``m = 1``, else ``Z_X(m/q)``."""
        m = self._arg(m, ring or self.scalars)
        q = self.q(m.ring)
        if m == 1:
            return self.residue_value(m.ring)
        if m == q:
            raise SpecialPointError("Z*_X(q^-1 z) is undefined at z = q")
        return self.zeta_at(m / q)
