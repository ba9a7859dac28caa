"""Generating series of twisted Higgs bundles and extraction of DT invariants.

The central object is the rank series

    sum_lam (-v)**(e * <lam, lam>) * J_lam(z) * H_lam(z) * w**|lam|

with ``e = l`` for positive counts (``l >= 2g - 2``) and ``e = 2g - 2 - l``
for nilpotent counts (``l <= 0``).  ``X_r`` is the rank-``r`` part of
``(q - 1) * Log`` of the positive series, and ``Omega_D(r, d)`` is the
stable value of its ``z**d`` coefficients (times ``q`` when ``D = K``).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

import flint

from higgsdt.curve import CurveData
from higgsdt.kernel import DEFAULT_CACHE, KernelCache
from higgsdt.partition import enumerate_partitions, pairing
from higgsdt.ratfun import RatFun, RFRing
from higgsdt.scalar import Tower
from higgsdt.series import GradedSeries, RankSeries, is_zero, mobius, rf_to_series


class TwistError(ValueError):
    """The twist degree is outside the range a computation supports."""


class StabilizationError(ArithmeticError):
    pass


class PoleAnomaly(ArithmeticError):
    """``X_r`` has a pole of order >= 2, or a pole outside the r-th roots of unity."""


# -- twist bookkeeping -------------------------------------------------

@dataclass(frozen=True)
class TwistSpec:
    l: int
    flavor: str

    @classmethod
    def positive(cls, genus: int, l: int) -> "TwistSpec":
        if l < 2 * genus - 2:
            raise TwistError(f"positive counts need deg D >= 2g-2 = {2 * genus - 2}, got {l}")
        return cls(l, "canonical" if l == 2 * genus - 2 else "generic")

    @classmethod
    def nilpotent(cls, l: int) -> "TwistSpec":
        if l > 0:
            raise TwistError(f"nilpotent counts need deg D <= 0, got {l}")
        return cls(l, "negative")


# -- coefficient plumbing ------------------------------------------------

def level1(x):
    return x.level(1) if isinstance(x, Tower) else x


def scalar(curve: CurveData, fn, depth: int = 1):
    """A coefficient-field element from ``fn(curve_level, ring)``.

    Symbolic curves give one rational function (base change is an Adams map);
    numeric curves give a :class:`Tower` with ``depth`` levels.
    """
    if curve.is_symbolic:
        cl = curve.at(1)
        return fn(cl, cl.scalars)
    return Tower([fn(curve.at(k), curve.at(k).scalars) for k in range(1, max(depth, 1) + 1)])


def q_scalar(curve, depth=1):
    return scalar(curve, lambda cl, ring: cl.q(ring), depth)


def _sign_power(cl, ring, m: int) -> RatFun:
    """``(-q**(1/2))**m`` over the base change ``cl``."""
    return (-1) ** (m % 2) * cl.sqrt_q(ring) ** m


def arm_total(lam) -> int:
    """``sum_{s in lam} a(s) = sum_i binom(lam_i, 2)``."""
    return sum(p * (p - 1) // 2 for p in lam)


def kernel_series(curve: CurveData, exponent: int, R: int,
                  cache: KernelCache | None = None, shift: int = 0) -> RankSeries:
    """``sum_lam (-v)**(exponent*<lam,lam>) z**(shift*a(lam)) J_lam H_lam w**|lam|``.

    ``a(lam)`` is the total arm length.  The z-power records the degree that
    the twisted graded pieces of a nilpotent filtration add to the bundle:
    a Jordan block of size ``i`` contributes pieces twisted by ``D**-k`` for
    ``k < i``.  It is invisible when ``deg D = 2g - 2`` for the positive
    series (equivalently ``deg D = 0`` for the nilpotent one).
    """
    cache = cache or DEFAULT_CACHE

    def rank_coeff(cl, r):
        ring = RFRing(cl.field, ("z",))
        z = ring.gen("z")
        acc = ring.zero
        for lam in enumerate_partitions(r):
            h, j = cache.get(lam, cl)
            term = _sign_power(cl, ring, exponent * pairing(lam)) * j * h
            acc = acc + term * z ** (shift * arm_total(lam))
        return acc

    coeffs = {(0,): 1}
    for r in range(1, R + 1):
        if curve.is_symbolic:
            coeffs[(r,)] = rank_coeff(curve.at(1), r)
        else:
            coeffs[(r,)] = Tower([rank_coeff(curve.at(k), r) for k in range(1, R // r + 1)])
    return RankSeries(coeffs, (R,))


def nil_vec_series(curve: CurveData, l: int, R: int, cache=None) -> RankSeries:
    TwistSpec.nilpotent(l)
    return kernel_series(curve, 2 * curve.genus - 2 - l, R, cache, shift=-l)


def positive_vec_series(curve: CurveData, l: int, R: int, cache=None) -> RankSeries:
    """Serre dual of :func:`nil_vec_series` at twist ``2g - 2 - l``."""
    TwistSpec.positive(curve.genus, l)
    return kernel_series(curve, l, R, cache, shift=l - (2 * curve.genus - 2))


def torsion_series(curve: CurveData, Dmax: int, R: int = 0, nilpotent: bool = True) -> GradedSeries:
    """``Exp(c |X| / (q - 1) * z / (1 - z))`` on the rank-0 line.

    ``c = 1`` counts nilpotent torsion Higgs sheaves; ``c = q`` counts all of
    them (zero-dimensional sheaves on the total space of the twisting line
    bundle).
    """
    depth = max(Dmax, 1)

    def gen(cl, ring):
        q = cl.q(ring)
        val = cl.points(ring) / (q - 1)
        return val if nilpotent else q * val

    c = scalar(curve, gen, depth)
    f = GradedSeries({(0, d): c for d in range(1, Dmax + 1)}, (R, Dmax))
    return f.pleth_exp()


def _graded(rs: RankSeries, Dmax: int) -> GradedSeries:
    return rf_to_series(rs, Dmax)


def nil_full_series(curve, l, R, Dmax, cache=None) -> GradedSeries:
    """Nilpotent positive series including torsion, truncated to ``(R, Dmax)``."""
    return _graded(nil_vec_series(curve, l, R, cache), Dmax) * torsion_series(curve, Dmax, R)


# -- X_r and Omega -----------------------------------------------------

def x_r(curve: CurveData, l: int, R: int, cache=None) -> list:
    """``[X_1, ..., X_R]``: rank parts of ``(q - 1) Log`` of the positive series."""
    lg = positive_vec_series(curve, l, R, cache).pleth_log()
    qm1 = q_scalar(curve, R) - 1
    return [qm1 * lg.rank(r) if not is_zero(lg.rank(r)) else 0 for r in range(1, R + 1)]


def stabilization_threshold(l: int, r: int) -> int:
    return max(0, l * r * (r - 1) // 2)


@dataclass
class Stabilized:
    value: object
    threshold: int
    checked_upto: int
    coefficients: list


def stabilize(X, r: int, l: int, d: int, margin: int = 0) -> Stabilized:
    """Stable ``z**d`` coefficient of ``X`` along ``d mod r``.

    Past the threshold the coefficients must repeat with period ``r`` over two
    full windows; a single matching window is not accepted.
    """
    X = level1(X)
    t = stabilization_threshold(l, r)
    top = t + 3 * r - 1 + margin
    if isinstance(X, int):
        coeffs = [X] * (top + 1)
    else:
        coeffs = X.series_expand("z", top)
    for i in range(t, top + 1 - r):
        if not is_zero(coeffs[i] - coeffs[i + r]):
            raise StabilizationError(
                f"rank {r}: coefficients of z^{i} and z^{i + r} differ past the threshold {t}")
    n = t + ((d - t) % r)
    val = coeffs[n]
    if hasattr(val, "ring"):
        val = val.ring.drop(val, val.ring.scalar_ring())
    return Stabilized(val, t, top, coeffs)


def omega_stabilized(curve: CurveData, l: int, r: int, d: int, X=None, cache=None):
    spec = TwistSpec.positive(curve.genus, l)
    if X is None:
        X = x_r(curve, l, r, cache)[r - 1]
    val = stabilize(X, r, l, d).value
    if spec.flavor == "canonical":
        val = curve.at(1).q() * val
    return curve.at(1).scalars(val)


# -- residue extraction ------------------------------------------------

def _ramanujan(m: int, j: int) -> int:
    """``sum over primitive m-th roots xi of xi**j``."""
    g = gcd(j, m)
    return sum(mobius(m // e) * e for e in range(1, g + 1) if g % e == 0)


def _trim(p):
    while p and is_zero(p[-1]):
        p.pop()
    return p


def _pmod(a, b):
    a = list(a)
    lead_inv = 1 / b[-1]
    while len(_trim(a)) >= len(b):
        c = a[-1] * lead_inv
        s = len(a) - len(b)
        for i, bc in enumerate(b):
            a[s + i] = a[s + i] - c * bc
        a.pop()
    return a


def _pmul(a, b):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return _trim(out)


def _pdivmod(a, b):
    a = list(a)
    quo = [0] * max(len(a) - len(b) + 1, 0)
    lead_inv = 1 / b[-1]
    while len(_trim(a)) >= len(b):
        c = a[-1] * lead_inv
        s = len(a) - len(b)
        quo[s] = c
        for i, bc in enumerate(b):
            a[s + i] = a[s + i] - c * bc
        a.pop()
    return _trim(quo), a


def _pinv_mod(a, m):
    """Inverse of ``a`` modulo ``m`` over the coefficient field (extended Euclid)."""
    r0, r1 = list(m), _trim(_pmod(a, m))
    s0, s1 = [], [1]
    while r1:
        quo, rem = _pdivmod(r0, r1)
        r0, r1 = r1, rem
        prod = _pmul(quo, s1)
        n = max(len(s0), len(prod))
        s0, s1 = s1, _trim([(s0[i] if i < len(s0) else 0) - (prod[i] if i < len(prod) else 0)
                            for i in range(n)])
    if len(r0) != 1:
        raise PoleAnomaly("denominator cofactor shares a root with the cyclotomic factor")
    inv = 1 / r0[0]
    return [c * inv for c in s0]


def _zpoly(ring, poly):
    """Coefficients in ``z`` (as scalar-ring RatFuns) of an mpoly of ``ring``."""
    f = RatFun(ring, poly, ring._pone)
    scal = ring.scalar_ring()
    return [ring.drop(c, scal) for c in f.poly_coefficients("z")]


def omega_residue(curve: CurveData, l: int, r: int, d: int, X=None, cache=None):
    """``-sum_{xi in mu_r} xi**(-d) Res_{z=xi} X_r dz/z`` (times ``-q`` style factor for ``D = K``)."""
    spec = TwistSpec.positive(curve.genus, l)
    if X is None:
        X = x_r(curve, l, r, cache)[r - 1]
    X = level1(X)
    scal = RFRing(curve.field, ())
    if isinstance(X, int):
        return scal.zero
    ring = X.ring
    zi = ring.index("z")
    total = scal.zero
    den = X.den
    for m in range(1, r + 1):
        if r % m:
            continue
        cyc = flint.fmpz_poly.cyclotomic(m)
        exps = [0] * len(ring.names)
        phi_terms = {}
        for k, c in enumerate(cyc.coeffs()):
            if c:
                e = list(exps)
                e[zi] = k
                phi_terms[tuple(e)] = c
        phi = ring.ctx.from_dict(phi_terms)
        mult, rest = 0, den
        while True:
            quo, rem = divmod(rest, phi)
            if not rem.is_zero():
                break
            rest, mult = quo, mult + 1
        if mult == 0:
            continue
        if mult > 1:
            raise PoleAnomaly(f"X_{r} has a pole of order {mult} along Phi_{m}")
        phi_u = [scal(int(c)) for c in cyc.coeffs()]
        dphi = [phi_u[k] * k for k in range(1, len(phi_u))]
        num_u = _pmod(_zpoly(ring, X.num), phi_u)
        cof = _pmod(_pmul(dphi, _zpoly(ring, rest)), phi_u)
        h = _pmul(num_u, _pinv_mod(cof, phi_u))
        shift = [0] * ((-d - 1) % m) + [scal.one]
        h = _trim(_pmod(_pmul(h, shift), phi_u))
        for j, hj in enumerate(h):
            c = _ramanujan(m, j)
            if c:
                total = total + c * hj
    val = -total
    if spec.flavor == "canonical":
        val = curve.at(1).q(scal) * val
    return val


# -- pole audit --------------------------------------------------------

@dataclass
class PoleAudit:
    r: int
    ok: bool
    detail: str = ""
    only_mu_r: bool = True


def _z_free_den(f: RatFun) -> bool:
    return "z" not in RatFun(f.ring, f.den, f.ring._pone).variables()


def pole_audit(X, r: int) -> PoleAudit:
    """Check that ``X_r`` has at most simple poles at roots of unity of order ``<= r``.

    The denominator, with powers of ``z`` up to ``z**(r(r+1)/2)`` stripped, must
    divide ``lcm(z - 1, ..., z**r - 1) = prod_{m <= r} Phi_m(z)``.  The stronger
    property that every pole lies in ``mu_r`` is reported as ``only_mu_r``.
    """
    X = level1(X)
    if isinstance(X, int):
        return PoleAudit(r, True, "zero")
    ring = X.ring
    z = ring.gen("z")
    lcm = ring.one
    for m in range(1, r + 1):
        cyc = flint.fmpz_poly.cyclotomic(m)
        lcm = lcm * sum((int(c) * z ** i for i, c in enumerate(cyc.coeffs())), ring.zero)
    strip = z ** (r * (r + 1) // 2)
    ok = _z_free_den(lcm * strip * X)
    only = _z_free_den((z ** r - 1) * strip * X)
    detail = "" if ok else f"denominator {X.den} is not a squarefree divisor of prod (z^m - 1), m <= {r}"
    return PoleAudit(r, ok, detail, only)


# -- Kac polynomials ---------------------------------------------------

def kac_positive(curve: CurveData, R: int, Dmax: int, cache=None) -> GradedSeries:
    """``A^{>=0}_{r,d} = (q - 1) Log(nilpotent D = 0 series with torsion)``."""
    full = nil_full_series(curve, 0, R, Dmax, cache)
    return full.pleth_log().scale(q_scalar(curve, R + Dmax) - 1)


def kac_stable(curve: CurveData, r: int, d: int, cache=None):
    """``A_{r,d}`` from the stable range ``d >= (2g-2) r(r-1)/2``."""
    t = max(0, (2 * curve.genus - 2) * r * (r - 1) // 2)
    n = t + ((d - t) % r) if r else max(d, 1)
    A = kac_positive(curve, r, n, cache)
    return level1(A[(r, n)])


# -- tables ------------------------------------------------------------

@dataclass
class DTTable:
    curve: CurveData
    twist: TwistSpec
    R: int
    method: str
    entries: dict = field(default_factory=dict)          # (r, d mod r) -> value
    residue: dict = field(default_factory=dict)
    audits: list = field(default_factory=list)
    margins: dict = field(default_factory=dict)

    def agree(self) -> bool:
        return all(self.residue.get(k) is None or (self.residue[k] - v).is_zero()
                   for k, v in self.entries.items())


def omega_table(curve: CurveData, l: int, R: int, method: str = "stabilized",
                cache=None) -> DTTable:
    spec = TwistSpec.positive(curve.genus, l)
    Xs = x_r(curve, l, R, cache)
    table = DTTable(curve, spec, R, method)
    for r in range(1, R + 1):
        X = Xs[r - 1]
        audit = pole_audit(X, r)
        table.audits.append(audit)
        for d in range(r):
            if method in ("stabilized", "both"):
                st = stabilize(X, r, l, d)
                val = curve.at(1).scalars(st.value)
                if spec.flavor == "canonical":
                    val = curve.at(1).q() * val
                table.entries[(r, d)] = val
                table.margins[(r, d)] = (st.threshold, st.checked_upto)
            if method in ("residue", "both"):
                val = omega_residue(curve, l, r, d, X)
                table.residue[(r, d)] = val
                if method == "residue":
                    table.entries[(r, d)] = val
    return table


def is_denominator_free(x, curve: CurveData) -> bool:
    """Normalised denominator is a monomial (a power of ``q`` in the numeric case)."""
    if isinstance(x, (int, Fraction)):
        return Fraction(x).denominator == 1
    if not x.is_laurent_unit_den():
        return False
    if curve.is_symbolic:
        return len(x.den.to_dict()) == 1
    den = int(list(x.den.to_dict().values())[0])
    return curve.q ** 64 % den == 0


# -- identities --------------------------------------------------------

@dataclass
class IdentityResult:
    name: str
    ok: bool
    detail: str = ""


def _compare(name, a: GradedSeries, b: GradedSeries) -> IdentityResult:
    k = a.first_difference(b)
    return IdentityResult(name, k is None, "" if k is None else f"first difference at {k}")


def identity_suite(curve: CurveData, R: int, Dmax: int, cache=None, seed: int = 0) -> list:
    from higgsdt.hall import QuiverLattice, a_d, check_a_d_closed_form, n1_form_checks

    out = []
    A = kac_positive(curve, R, Dmax, cache)
    q = q_scalar(curve, R + Dmax)
    exp_qA = A.scale(q / (q - 1)).pleth_exp()
    if curve.genus == 0:
        # deg K < 0 forces nilpotency on vector bundles only; a torsion sheaf
        # T has T(K) = T, so its Higgs fields are arbitrary endomorphisms.
        all_k = _graded(nil_vec_series(curve, -2, R, cache), Dmax) * torsion_series(
            curve, Dmax, R, nilpotent=False)
        out.append(_compare("canonical-chain", all_k, exp_qA))
    else:
        pos = _graded(positive_vec_series(curve, 2 * curve.genus - 2, R, cache), Dmax)
        nil = _graded(nil_vec_series(curve, 0, R, cache), Dmax)
        out.append(_compare("serre-duality-vec", pos, nil))
    rhs = A.scale(1 / (q - 1)).pleth_exp() * A.pleth_exp()
    out.append(_compare("nil-factorization", exp_qA, rhs))
    bad = check_a_d_closed_form(curve.genus, rmax=3, dmax=4, ls=(0, -1, -2))
    out.append(IdentityResult("a_D-closed-form", not bad, "" if not bad else f"{bad[0]}"))
    bad = n1_form_checks(curve.genus, pairs=100, seed=seed)
    out.append(IdentityResult("n1-euler-forms", not bad, "" if not bad else f"{bad[0]}"))
    return out
