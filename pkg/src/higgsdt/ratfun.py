"""Exact multivariate rational functions over a coefficient field.

A :class:`RatFun` is a pair of polynomials (numerator, denominator) in the
variables of an :class:`RFRing`: the scalar variables of the field
(``v`` and, symbolically, ``a_1..a_g``) followed by the series/residue
variables declared for the computation (``z``, ``z1``, ...).  Polynomial
arithmetic and multivariate GCD are delegated to FLINT through
``python-flint``; this module owns normalisation, substitution, residues and
Taylor expansion.

Canonical form: ``gcd(num, den) = 1`` and the leading coefficient of ``den``
(degree-lexicographic order) is 1.  Over ``Q(sqrt q)`` the denominator is
additionally rationalised so that it is free of ``v``.
"""
from __future__ import annotations

import ast
import operator
from fractions import Fraction
from math import factorial
from typing import Iterable, Mapping

import flint

from higgsdt.scalar import NumericField, ScalarError, SymbolicField


class PoleError(ZeroDivisionError):
    """A denominator vanishes identically (e.g. after substitution)."""


class UniverseError(TypeError):
    """Operands live in incompatible variable universes."""


def _fmpq(x) -> flint.fmpq:
    if isinstance(x, flint.fmpq):
        return x
    if isinstance(x, Fraction):
        return flint.fmpq(x.numerator, x.denominator)
    return flint.fmpq(int(x))


def _to_fraction(c) -> Fraction:
    c = flint.fmpq(c)
    return Fraction(int(c.p), int(c.q))


class RFRing:
    """Variable universe: field scalars plus declared series variables."""

    _cache: dict = {}

    def __new__(cls, field, series: Iterable[str] = ()):
        series = tuple(series)
        key = (field, series)
        ring = cls._cache.get(key)
        if ring is None:
            ring = super().__new__(cls)
            ring._setup(field, series)
            cls._cache[key] = ring
        return ring

    def _setup(self, field, series):
        clash = set(series) & set(field.names)
        if clash or len(set(series)) != len(series):
            raise ValueError(f"bad series variables {series}")
        self.field = field
        self.series = series
        self.names = field.names + series
        self.nscalar = len(field.names)
        self.ctx = flint.fmpq_mpoly_ctx.get(self.names, "deglex")
        self._index = {n: i for i, n in enumerate(self.names)}
        self._pzero = self.ctx.from_dict({})
        self._pone = self.ctx.constant(1)
        self.zero = RatFun(self, self._pzero, self._pone)
        self.one = RatFun(self, self._pone, self._pone)

    def __repr__(self):
        return f"RFRing({self.field!r}, {self.series!r})"

    def __reduce__(self):
        return (RFRing, (self.field, self.series))

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UniverseError(f"variable {name!r} not in {self.names}") from None

    def scalar_ring(self) -> "RFRing":
        return RFRing(self.field, ())

    def with_series(self, series: Iterable[str]) -> "RFRing":
        return RFRing(self.field, tuple(series))

    def poly_gen(self, name: str):
        return self.ctx.gens()[self.index(name)]

    def gen(self, name: str) -> "RatFun":
        return RatFun(self, self.poly_gen(name), self._pone)

    def v(self) -> "RatFun":
        return self.normalize(self.poly_gen("v"), self._pone)

    def q(self) -> "RatFun":
        if self.field.symbolic:
            return self.gen("v") ** 2
        return self(self.field.q)

    def __call__(self, x) -> "RatFun":
        if isinstance(x, RatFun):
            if x.ring is self:
                return x
            return self.embed(x)
        if isinstance(x, (int, Fraction, flint.fmpq)):
            c = _fmpq(x)
            return RatFun(self, self.ctx.constant(c), self._pone)
        raise TypeError(f"cannot coerce {type(x).__name__} into {self!r}")

    def monomial(self, coeff=1, exps: Mapping[str, int] | None = None) -> "RatFun":
        """``coeff * prod name**e``; negative exponents allowed."""
        npos = [0] * len(self.names)
        nneg = [0] * len(self.names)
        for name, e in (exps or {}).items():
            i = self.index(name)
            if e >= 0:
                npos[i] += e
            else:
                nneg[i] -= e
        num = self.ctx.from_dict({tuple(npos): _fmpq(coeff)}) if coeff else self._pzero
        den = self.ctx.from_dict({tuple(nneg): 1})
        return self.normalize(num, den)

    # -- normalisation -------------------------------------------------

    def _reduce_sqrt(self, p):
        q = self.field.q
        out: dict = {}
        for e, c in p.to_dict().items():
            k = e[0]
            ne = (k % 2,) + e[1:]
            out[ne] = out.get(ne, 0) + c * q ** (k // 2)
        return self.ctx.from_dict({e: c for e, c in out.items() if c != 0})

    def _split_v(self, p):
        even, odd = {}, {}
        for e, c in p.to_dict().items():
            (odd if e[0] else even)[(0,) + e[1:]] = c
        return self.ctx.from_dict(even), self.ctx.from_dict(odd)

    def normalize(self, num, den) -> "RatFun":
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            return self.zero
        field = self.field
        if isinstance(field, NumericField):
            if field.root is not None:
                num = num.subs({"v": field.root})
                den = den.subs({"v": field.root})
            else:
                num = self._reduce_sqrt(num)
                den = self._reduce_sqrt(den)
                d0, d1 = self._split_v(den)
                if not d1.is_zero():
                    conj = d0 - self.poly_gen("v") * d1
                    num = self._reduce_sqrt(num * conj)
                    den = self._reduce_sqrt(den * conj)
            if den.is_zero():
                raise ZeroDivisionError("denominator vanishes at v = sqrt(q)")
            if num.is_zero():
                return self.zero
        g = num.gcd(den)
        if not g.is_one():
            num = num / g
            den = den / g
        lc = den.leading_coefficient()
        if lc != 1:
            num = num / lc
            den = den / lc
        return RatFun(self, num, den)

    def embed(self, f: "RatFun") -> "RatFun":
        """Map ``f`` from a ring whose variables are a subset of ours."""
        src = f.ring
        if src.field != self.field:
            raise UniverseError(f"field mismatch: {src.field!r} vs {self.field!r}")
        missing = [n for n in src.names if n not in self._index]
        if missing:
            raise UniverseError(f"variables {missing} not in {self.names}")
        num, den = self._remap(f.num, src), self._remap(f.den, src)
        lc = den.leading_coefficient()
        if lc != 1:
            num, den = num / lc, den / lc
        return RatFun(self, num, den)

    def _remap(self, p, src: "RFRing"):
        pos = [self._index[n] for n in src.names]
        width = len(self.names)
        out = {}
        for e, c in p.to_dict().items():
            ne = [0] * width
            for i, k in zip(pos, e):
                ne[i] = k
            out[tuple(ne)] = c
        return self.ctx.from_dict(out)

    def drop(self, f: "RatFun", target: "RFRing") -> "RatFun":
        """Move ``f`` into ``target``; variables absent there must not occur."""
        keep = [self.index(n) for n in target.names]
        unused = set(range(len(self.names))) - set(keep)

        def move(p):
            out = {}
            for e, c in p.to_dict().items():
                if any(e[i] for i in unused):
                    raise UniverseError(f"{f} involves variables outside {target.names}")
                out[tuple(e[i] for i in keep)] = c
            return target.ctx.from_dict(out)

        if target.field != self.field:
            raise UniverseError("field mismatch")
        num, den = move(f.num), move(f.den)
        lc = den.leading_coefficient()
        if lc != 1:
            num, den = num / lc, den / lc
        return RatFun(target, num, den)

    def parse(self, text: str) -> "RatFun":
        """Parse an arithmetic expression in the ring's variable names."""
        tree = ast.parse(text.replace("^", "**"), mode="eval")
        ops = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
               ast.Div: operator.truediv, ast.Pow: operator.pow}

        def ev(node):
            if isinstance(node, ast.Expression):
                return ev(node.body)
            if isinstance(node, ast.BinOp) and type(node.op) in ops:
                left, right = ev(node.left), ev(node.right)
                if isinstance(node.op, ast.Pow):
                    if not isinstance(right, int):
                        raise ValueError("exponents must be integer literals")
                    return left ** right
                if isinstance(node.op, ast.Div) and isinstance(left, int) and isinstance(right, int):
                    return Fraction(left, right)
                return ops[type(node.op)](left, right)
            if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
                x = ev(node.operand)
                return -x if isinstance(node.op, ast.USub) else x
            if isinstance(node, ast.Constant) and isinstance(node.value, int):
                return node.value
            if isinstance(node, ast.Name):
                return self.gen(node.id)
            raise ValueError(f"unsupported syntax in {text!r}")

        return self(ev(tree))


class RatFun:
    """Immutable normalised rational function in an :class:`RFRing`."""

    __slots__ = ("ring", "num", "den")

    def __init__(self, ring: RFRing, num, den):
        self.ring = ring
        self.num = num
        self.den = den

    # -- coercion ------------------------------------------------------

    def _pair(self, other):
        if isinstance(other, RatFun):
            if other.ring is self.ring:
                return self, other
            a, b = self.ring, other.ring
            if a.field == b.field:
                if set(b.names) <= set(a.names):
                    return self, a.embed(other)
                if set(a.names) <= set(b.names):
                    return b.embed(self), other
            raise UniverseError(f"cannot combine {a!r} and {b!r}")
        if isinstance(other, (int, Fraction, flint.fmpq)):
            return self, self.ring(other)
        return NotImplemented, NotImplemented

    # -- arithmetic ----------------------------------------------------

    def __add__(self, other):
        a, b = self._pair(other)
        if a is NotImplemented:
            return NotImplemented
        ring = a.ring
        if b.num.is_zero():
            return a
        if a.num.is_zero():
            return b
        if a.den == b.den:
            return ring.normalize(a.num + b.num, a.den)
        g = a.den.gcd(b.den)
        if g.is_one():
            return ring.normalize(a.num * b.den + b.num * a.den, a.den * b.den)
        bd, ad = b.den / g, a.den / g
        return ring.normalize(a.num * bd + b.num * ad, a.den * bd)

    __radd__ = __add__

    def __neg__(self):
        return RatFun(self.ring, -self.num, self.den)

    def __sub__(self, other):
        a, b = self._pair(other)
        if a is NotImplemented:
            return NotImplemented
        return a + (-b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        a, b = self._pair(other)
        if a is NotImplemented:
            return NotImplemented
        ring = a.ring
        if a.num.is_zero() or b.num.is_zero():
            return ring.zero
        if not ring.field.symbolic:
            return ring.normalize(a.num * b.num, a.den * b.den)
        n1, d1, n2, d2 = a.num, a.den, b.num, b.den
        g = n1.gcd(d2)
        if not g.is_one():
            n1, d2 = n1 / g, d2 / g
        g = n2.gcd(d1)
        if not g.is_one():
            n2, d1 = n2 / g, d1 / g
        num, den = n1 * n2, d1 * d2
        lc = den.leading_coefficient()
        if lc != 1:
            num, den = num / lc, den / lc
        return RatFun(ring, num, den)

    __rmul__ = __mul__

    def inverse(self) -> "RatFun":
        if self.num.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return self.ring.normalize(self.den, self.num)

    def __truediv__(self, other):
        a, b = self._pair(other)
        if a is NotImplemented:
            return NotImplemented
        return a * b.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        if n == 0:
            return self.ring.one
        if self.ring.field.symbolic:
            return RatFun(self.ring, self.num ** n, self.den ** n)
        return self.ring.normalize(self.num ** n, self.den ** n)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, flint.fmpq)):
            other = self.ring(other)
        if not isinstance(other, RatFun):
            return NotImplemented
        if other.ring is not self.ring:
            try:
                a, b = self._pair(other)
            except UniverseError:
                return False
            return a.num == b.num and a.den == b.den
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.ring.names, str(self.num), str(self.den)))

    def __repr__(self):
        return f"RatFun({self})"

    def __str__(self):
        if self.den.is_one():
            return str(self.num)
        return f"({self.num})/({self.den})"

    def __reduce__(self):
        return (_unpickle, (self.ring, self.num.to_dict(), self.den.to_dict()))

    # -- predicates & accessors ----------------------------------------

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_one(self) -> bool:
        return self.num.is_one() and self.den.is_one()

    def variables(self) -> set[str]:
        used = set()
        for p in (self.num, self.den):
            for i, d in enumerate(p.degrees()):
                if d:
                    used.add(self.ring.names[i])
        return used

    def is_scalar(self) -> bool:
        return not (self.variables() & set(self.ring.series))

    def is_polynomial(self) -> bool:
        return self.den.is_one()

    def is_laurent_unit_den(self) -> bool:
        """True when the denominator is a monomial (Laurent polynomial)."""
        return len(self.den.to_dict()) == 1

    def degree(self, var: str) -> tuple[int, int]:
        i = self.ring.index(var)
        return self.num.degrees()[i], self.den.degrees()[i]

    def to_fraction(self) -> Fraction:
        if self.variables():
            raise ValueError(f"{self} is not a rational constant")
        num = self.num.to_dict().get((0,) * len(self.ring.names), 0)
        den = self.den.to_dict()[(0,) * len(self.ring.names)]
        return _to_fraction(num) / _to_fraction(den)

    def sqrt_pair(self) -> tuple[Fraction, Fraction]:
        """``(a, b)`` with ``self = a + b*sqrt(q)`` for a numeric constant."""
        field = self.ring.field
        if not isinstance(field, NumericField):
            raise ScalarError("sqrt_pair needs the numeric backend")
        if self.variables() - {"v"}:
            raise ValueError(f"{self} is not constant")
        zero = (0,) * len(self.ring.names)
        vexp = (1,) + zero[1:]
        den = _to_fraction(self.den.to_dict()[zero])
        d = self.num.to_dict()
        return _to_fraction(d.get(zero, 0)) / den, _to_fraction(d.get(vexp, 0)) / den

    # -- Adams ---------------------------------------------------------

    def adams(self, k: int) -> "RatFun":
        """``psi_k``: every variable raised to its ``k``-th power (symbolic)."""
        if k == 1:
            return self
        if not self.ring.field.symbolic:
            raise ScalarError("numeric Adams maps need a Tower of levels")
        return self._power_substitute(k, self.ring.names)

    def adams_series(self, k: int) -> "RatFun":
        """Raise only the series variables to the ``k``-th power."""
        if k == 1 or not (self.variables() & set(self.ring.series)):
            return self
        return self._power_substitute(k, self.ring.series)

    def _power_substitute(self, k, names):
        ring = self.ring
        gens = list(ring.ctx.gens())
        for n in names:
            i = ring.index(n)
            gens[i] = gens[i] ** k
        num = self.num.compose(*gens, ctx=ring.ctx)
        den = self.den.compose(*gens, ctx=ring.ctx)
        return ring.normalize(num, den)

    # -- substitution --------------------------------------------------

    def substitute(self, bindings: Mapping[str, object], target: RFRing | None = None) -> "RatFun":
        """Compose: replace variables by rational functions of ``target``.

        Unbound variables map to the same-named generator of ``target``.
        Raises :class:`PoleError` if the denominator becomes identically 0.
        """
        target = target or self.ring
        images = []
        for name in self.ring.names:
            if name in bindings:
                img = bindings[name]
                img = target(img) if not isinstance(img, RatFun) else img
                if img.ring is not target:
                    img = target.embed(img)
                images.append(img)
            elif name in target._index:
                images.append(None)
            else:
                images.append(False)
        num, nden = _compose(self.num, self.ring, target, images)
        den, dden = _compose(self.den, self.ring, target, images)
        if den.is_zero():
            raise PoleError(f"denominator of {self} vanishes under substitution")
        try:
            return target.normalize(num * dden, den * nden)
        except ZeroDivisionError as exc:
            raise PoleError(str(exc)) from None

    def evaluate(self, var: str, point: "RatFun") -> "RatFun":
        return self.substitute({var: point})

    # -- univariate views ----------------------------------------------

    def poly_coefficients(self, var: str, which: str = "num") -> list["RatFun"]:
        """Coefficients of num (or den) as a polynomial in ``var``."""
        ring = self.ring
        i = ring.index(var)
        p = self.num if which == "num" else self.den
        groups: dict[int, dict] = {}
        for e, c in p.to_dict().items():
            k = e[i]
            ne = e[:i] + (0,) + e[i + 1:]
            groups.setdefault(k, {})[ne] = c
        if not groups:
            return [ring.zero]
        top = max(groups)
        return [RatFun(ring, ring.ctx.from_dict(groups[k]), ring._pone) if k in groups
                else ring.zero for k in range(top + 1)]

    def series_expand(self, var: str, order: int) -> list["RatFun"]:
        """Taylor coefficients of ``self`` in ``var`` at 0, degrees 0..order."""
        num = self.poly_coefficients(var, "num")
        den = self.poly_coefficients(var, "den")
        d0 = den[0]
        if d0.is_zero():
            raise PoleError(f"{self} is not regular at {var} = 0")
        inv0 = d0.inverse()
        out = []
        for k in range(order + 1):
            acc = num[k] if k < len(num) else self.ring.zero
            for j in range(1, min(k, len(den) - 1) + 1):
                if not den[j].is_zero():
                    acc = acc - den[j] * out[k - j]
            out.append(acc * inv0)
        return out

    # -- residues ------------------------------------------------------

    def pole_order(self, var: str, point: "RatFun") -> int:
        return self._split_pole(var, point)[0]

    def _split_pole(self, var, point):
        ring = self.ring
        if var in point.variables():
            raise ValueError("residue point must not involve the residue variable")
        lin = point.den * ring.poly_gen(var) - point.num
        den, m = self.den, 0
        while True:
            try:
                den2 = den / lin
            except Exception:
                break
            den, m = den2, m + 1
        return m, den

    def residue_at(self, var: str, point: "RatFun", orders: list | None = None) -> "RatFun":
        """``Res_{var = point} self d(var)``.

        The pole order ``m`` is found by exact division of the denominator by
        the linear form ``den(point)*var - num(point)``; the residue is the
        ``eps**(m-1)`` Taylor coefficient of ``num/rest`` at ``var = point +
        eps``.  ``orders``, when given, receives ``m``.
        """
        ring = self.ring
        if point.ring is not ring:
            point = ring(point)
        m, rest = self._split_pole(var, point)
        if orders is not None:
            orders.append(m)
        if m == 0:
            return ring.zero
        num_t = _taylor_at(self.num, ring, var, point, m - 1)
        den_t = _taylor_at(rest, ring, var, point, m - 1)
        inv0 = den_t[0].inverse()
        coeffs = []
        for k in range(m):
            acc = num_t[k]
            for j in range(1, k + 1):
                acc = acc - den_t[j] * coeffs[k - j]
            coeffs.append(acc * inv0)
        return coeffs[m - 1] / RatFun(ring, point.den, ring._pone) ** m

    # -- serialisation -------------------------------------------------

    def to_json(self) -> dict:
        names = self.ring.names

        def terms(p):
            out = []
            for e, c in sorted(p.to_dict().items(), reverse=True):
                mono = {names[i]: k for i, k in enumerate(e) if k}
                out.append([mono, str(c)])
            return out

        return {"num": terms(self.num), "den": terms(self.den)}


def _unpickle(ring, num, den):
    return RatFun(ring, ring.ctx.from_dict(num), ring.ctx.from_dict(den))


def _taylor_at(p, ring, var, point, order):
    """Taylor coefficients of polynomial ``p`` in ``var`` around ``point``."""
    out = []
    cur = p
    for k in range(order + 1):
        val = RatFun(ring, cur, ring._pone).substitute({var: point})
        out.append(val / factorial(k) if k > 1 else val)
        cur = cur.derivative(var)
    return out


def _compose(p, src: RFRing, target: RFRing, images):
    """Substitute rational images into polynomial ``p``.

    Returns ``(P, C)`` with ``p(images) = P / C``, both polynomials of
    ``target``.  ``None`` images keep the same-named target generator;
    ``False`` marks variables absent from ``target`` (must not occur).
    """
    degs = p.degrees()
    tgens = target.ctx.gens()
    homog = []      # indices with a non-trivial denominator
    args = []
    common = target._pone
    for i, img in enumerate(images):
        if img is None:
            args.append(tgens[target.index(src.names[i])])
        elif img is False:
            if degs[i]:
                raise UniverseError(f"variable {src.names[i]} has no image in {target.names}")
            args.append(target._pone)
        else:
            args.append(img.num)
            if not img.den.is_one() and degs[i]:
                homog.append(i)
                common = common * img.den ** degs[i]
    if not homog:
        return p.compose(*args, ctx=target.ctx), common
    names = src.names + tuple(f"_h{i}" for i in homog)
    hctx = flint.fmpq_mpoly_ctx.get(names, "deglex")
    out = {}
    for e, c in p.to_dict().items():
        out[e + tuple(degs[i] - e[i] for i in homog)] = c
    hp = hctx.from_dict(out)
    hargs = args + [images[i].den for i in homog]
    return hp.compose(*hargs, ctx=target.ctx), common
