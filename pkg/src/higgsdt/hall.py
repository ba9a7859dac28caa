"""Euler forms for the cyclic quiver, the quantum torus and HN factorisation.

A lattice point of ``Gamma = (Z^2)^I`` with ``I = Z/n`` is a tuple of ``n``
pairs ``(r_i, d_i)``.  For ``n = 1`` a bare pair ``(r, d)`` is accepted
everywhere and normalised to ``((r, d),)``.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from higgsdt.partition import enumerate_jordan, jordan_shape, pairing
from higgsdt.ratfun import RatFun, RFRing
from higgsdt.scalar import SymbolicField
from higgsdt.series import GradedSeries, is_zero

Point = tuple[tuple[int, int], ...]


class HNError(ValueError):
    pass


def as_point(x, n: int | None = None) -> Point:
    if len(x) == 2 and all(isinstance(c, int) for c in x):
        pt = ((int(x[0]), int(x[1])),)
    else:
        pt = tuple((int(a), int(b)) for a, b in x)
    if n is not None and len(pt) != n:
        raise ValueError(f"expected {n} vertices, got {len(pt)}")
    return pt


def add(a: Point, b: Point) -> Point:
    return tuple((x[0] + y[0], x[1] + y[1]) for x, y in zip(a, b))


def sub(a: Point, b: Point) -> Point:
    return tuple((x[0] - y[0], x[1] - y[1]) for x, y in zip(a, b))


def zero(n: int) -> Point:
    return ((0, 0),) * n


def rank(a: Point) -> int:
    return sum(r for r, _ in a)


def degree(a: Point) -> int:
    return sum(d for _, d in a)


def slope(a: Point) -> Fraction | None:
    """``deg / rk``; ``None`` encodes slope infinity (torsion classes)."""
    r = rank(a)
    return None if r == 0 else Fraction(degree(a), r)


def slope_key(s) -> tuple:
    """Sort key placing infinity above every finite slope."""
    return (1, 0) if s is None else (0, s)


@dataclass(frozen=True)
class QuiverLattice:
    n: int = 1
    genus: int = 0
    l: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")

    def point(self, x) -> Point:
        return as_point(x, self.n)

    def shift(self, a, times: int = 1) -> Point:
        """``a[times]`` with ``a[1]_i = (r_{i+1}, d_{i+1} + l r_{i+1})``."""
        a = self.point(a)
        n = self.n
        return tuple((a[(i + times) % n][0], a[(i + times) % n][1] + times * self.l * a[(i + times) % n][0])
                     for i in range(n))

    def chi(self, a, b) -> int:
        return euler_chi(self.genus, self.point(a), self.point(b))

    def chi_d(self, a, b) -> int:
        """``chi_D(a, b) = chi(a, b) - chi(a, b[1])``."""
        return self.chi(a, b) - self.chi(a, self.shift(b))

    def skew(self, a, b) -> int:
        return self.chi_d(a, b) - self.chi_d(b, a)

    def chi_shift(self, a) -> int:
        """``chi(a, a[1])`` by the closed formula."""
        a = self.point(a)
        n, g, l = self.n, self.genus, self.l
        tot = 0
        for i in range(n):
            (ri, di), (rj, dj) = a[i], a[(i + 1) % n]
            tot += (1 - g + l) * ri * rj + (ri * dj - rj * di)
        return tot


def euler_chi(g: int, a, b) -> int:
    """Riemann-Roch ``sum_i (1-g) r_i r'_i + (r_i d'_i - r'_i d_i)``."""
    a, b = as_point(a), as_point(b)
    return sum((1 - g) * r * s + (r * e - s * d) for (r, d), (s, e) in zip(a, b))


def euler_chi_d(L: QuiverLattice, a, b) -> int:
    return L.chi_d(a, b)


def skew(L: QuiverLattice, a, b) -> int:
    return L.skew(a, b)


def chi_shift(L: QuiverLattice, a) -> int:
    return L.chi_shift(a)


# -- Jordan strata -----------------------------------------------------

def jordan_filtrations(L: QuiverLattice, alphas: Sequence) -> tuple[list, list]:
    """``f''_k = sum_{j>=k} alpha_j[-k]`` and ``f'_k = sum_{j>=k} alpha_j[-j]``."""
    alphas = [L.point(a) for a in alphas]
    s = len(alphas)
    f2, f1 = [], []
    for k in range(s + 1):
        acc2 = acc1 = zero(L.n)
        for j in range(k, s):
            acc2 = add(acc2, L.shift(alphas[j], -k))
            acc1 = add(acc1, L.shift(alphas[j], -j))
        f2.append(acc2)
        f1.append(acc1)
    return f2, f1


def a_d(L: QuiverLattice, alphas: Sequence) -> int:
    """``a_D(alpha) = -sum_k chi(f''_k, f'_{k+1})``."""
    f2, f1 = jordan_filtrations(L, alphas)
    return -sum(L.chi(f2[k], f1[k + 1]) for k in range(len(alphas)))


def check_a_d_closed_form(genus: int, rmax: int = 3, dmax: int = 4, ls=(0, -1, -2)) -> list:
    """Exhaustive check of ``a_D = a_0 + (l/2) r**2 - (l/2) <lam, lam>`` for n = 1.

    Returns the list of failures ``(l, alphas, lhs, rhs)``.
    """
    bad = []
    L0 = QuiverLattice(1, genus, 0)
    for l in ls:
        L = QuiverLattice(1, genus, l)
        for r in range(1, rmax + 1):
            for alphas in enumerate_jordan(r, -dmax, dmax):
                _, _, lam = jordan_shape(alphas, l)
                lhs = 2 * a_d(L, alphas)
                rhs = 2 * a_d(L0, alphas) + l * r * r - l * pairing(lam)
                if lhs != rhs:
                    bad.append((l, alphas, Fraction(lhs, 2), Fraction(rhs, 2)))
    return bad


def n1_form_checks(genus: int, pairs: int = 100, seed: int = 0, bound: int = 6) -> list:
    """Random checks that ``skew = 0`` and ``chi_D = -l r r'`` when ``n = 1``."""
    rng = random.Random(seed)
    bad = []
    for _ in range(pairs):
        l = rng.randint(-4, 4)
        L = QuiverLattice(1, genus, l)
        a = (rng.randint(0, bound), rng.randint(-bound, bound))
        b = (rng.randint(0, bound), rng.randint(-bound, bound))
        if L.skew(a, b) != 0 or L.chi_d(a, b) != -l * a[0] * b[0]:
            bad.append((l, a, b, L.skew(a, b), L.chi_d(a, b)))
    return bad


def vol_chain(L: QuiverLattice, alphas: Sequence, vols: Mapping | Callable, q) -> object:
    """``q**(-sum_{j>k} chi(alpha_j, alpha_k)) * prod vol(alpha_k)``."""
    alphas = [L.point(a) for a in alphas]
    get = vols if callable(vols) else (lambda a: vols[a])
    e = -sum(L.chi(alphas[j], alphas[k]) for j in range(len(alphas)) for k in range(j))
    out = q ** e
    for a in alphas:
        out = out * get(a)
    return out


# -- quantum torus -----------------------------------------------------

def default_unit():
    """``-q**(1/2)`` in the symbolic field of genus 0."""
    return -RFRing(SymbolicField(0)).v()


class QTSeries:
    """Cone-truncated series ``sum_alpha c_alpha e**alpha`` in the quantum torus.

    ``e**a * e**b = u**<a, b> e**(a + b)`` with ``u = -q**(1/2)``.  ``bounds``
    caps every vertex: ``0 <= r_i <= bounds[0]`` and ``0 <= d_i <= bounds[1]``.
    """

    def __init__(self, L: QuiverLattice, coeffs: Mapping, bounds: tuple[int, int], unit=None):
        self.L = L
        self.bounds = tuple(bounds)
        self.unit = unit if unit is not None else default_unit()
        clean = {}
        for k, c in coeffs.items():
            k = L.point(k)
            if not self.in_cone(k):
                raise HNError(f"{k} lies outside the truncation cone")
            if not is_zero(c):
                clean[k] = c
        self.coeffs = clean

    def in_cone(self, k: Point) -> bool:
        R, D = self.bounds
        return all(0 <= r <= R and 0 <= d <= D for r, d in k)

    def __getitem__(self, k):
        return self.coeffs.get(self.L.point(k), 0)

    def keys(self):
        return sorted(self.coeffs)

    def _twist(self, m: int):
        return self.unit ** m if m else 1

    def __mul__(self, other: "QTSeries") -> "QTSeries":
        out: dict = {}
        for a, ca in self.coeffs.items():
            for b, cb in other.coeffs.items():
                k = add(a, b)
                if not self.in_cone(k):
                    continue
                t = ca * cb * self._twist(self.L.skew(a, b))
                out[k] = out[k] + t if k in out else t
        return QTSeries(self.L, out, self.bounds, self.unit)

    def first_difference(self, other: "QTSeries"):
        for k in sorted(set(self.coeffs) | set(other.coeffs)):
            if not is_zero(self[k] - other[k]):
                return k
        return None

    def __eq__(self, other):
        return isinstance(other, QTSeries) and self.first_difference(other) is None

    __hash__ = None

    def to_json(self, encode=str, **extra) -> dict:
        doc = {"n": self.L.n, "skew": "builtin-quiver"}
        doc.update(extra)
        doc["entries"] = [{"gamma": [list(p) for p in k], "value": encode(self.coeffs[k])}
                          for k in self.keys()]
        return doc

    def to_document(self) -> dict:
        """Self-describing JSON form readable by :meth:`from_json`."""
        return self.to_json(genus=self.L.genus, l=self.L.l, bounds=list(self.bounds))

    @classmethod
    def from_json(cls, doc: Mapping) -> "QTSeries":
        """Inverse of :meth:`to_document`; values are parsed over the symbolic field."""
        genus = int(doc.get("genus", 0))
        L = QuiverLattice(int(doc["n"]), genus, int(doc.get("l", 0)))
        ring = RFRing(SymbolicField(genus))
        coeffs = {tuple(tuple(p) for p in e["gamma"]): ring.parse(str(e["value"]))
                  for e in doc["entries"]}
        if "bounds" in doc:
            bounds = tuple(doc["bounds"])
        else:
            bounds = (max((r for k in coeffs for r, _ in k), default=0),
                      max((d for k in coeffs for _, d in k), default=0))
        return cls(L, coeffs, bounds, -ring.v())

    @classmethod
    def from_graded(cls, L: QuiverLattice, f: GradedSeries, unit=None) -> "QTSeries":
        return cls(L, {((r, d),): c for (r, d), c in f.coeffs.items()}, f.bounds, unit)

    def to_graded(self) -> GradedSeries:
        if self.L.n != 1:
            raise HNError("only n = 1 series convert to (r, d) series")
        return GradedSeries({k[0]: c for k, c in self.coeffs.items()}, self.bounds)


def _cone_points(L: QuiverLattice, bounds) -> list[Point]:
    import itertools
    R, D = bounds
    pairs = [(r, d) for r in range(R + 1) for d in range(D + 1)]
    pts = [tuple(p) for p in itertools.product(pairs, repeat=L.n)]
    return sorted(pts, key=lambda p: (rank(p) + degree(p), p))


def _below(b: Point, a: Point) -> bool:
    return all(x[0] <= y[0] and x[1] <= y[1] for x, y in zip(b, a))


def hn_factorize(A: QTSeries) -> dict:
    """Slope factors ``b_alpha`` with ``A = prod_{tau decreasing} (1 + sum_{mu=tau} b e**alpha)``."""
    L = A.L
    z = zero(L.n)
    c0 = A[z]
    if not (c0 == 1 or (hasattr(c0, "is_one") and c0.is_one())):
        raise HNError("HN factorisation needs constant term 1")
    pts = [p for p in _cone_points(L, A.bounds) if p != z]
    b: dict = {}
    memo: dict = {}

    def S(rem: Point, bound):
        """Sum over decompositions of ``rem`` with slopes strictly below ``bound``."""
        key = (rem, bound)
        if key in memo:
            return memo[key]
        acc = 0
        for beta in pts:
            if beta not in b or not _below(beta, rem):
                continue
            s = slope(beta)
            if bound is not ... and slope_key(s) >= slope_key(bound):
                continue
            if beta == rem:
                acc = acc + b[beta]
                continue
            tail = S(sub(rem, beta), s)
            if is_zero(tail):
                continue
            acc = acc + b[beta] * tail * A._twist(L.skew(beta, sub(rem, beta)))
        memo[key] = acc
        return acc

    for a in pts:
        # all decompositions into >= 2 parts: first part beta != a
        acc = 0
        for beta in pts:
            if beta == a or beta not in b or not _below(beta, a):
                continue
            tail = S(sub(a, beta), slope(beta))
            if is_zero(tail):
                continue
            acc = acc + b[beta] * tail * A._twist(L.skew(beta, sub(a, beta)))
        val = A[a] - acc
        if not is_zero(val):
            b[a] = val
    return b


def hn_expand(b: Mapping, L: QuiverLattice, bounds, unit=None) -> QTSeries:
    """Ordered product of slope factors, largest slope (infinity) first."""
    z = zero(L.n)
    groups: dict = {}
    for a, c in b.items():
        groups.setdefault(slope(L.point(a)), {})[L.point(a)] = c
    out = QTSeries(L, {z: 1}, bounds, unit)
    for s in sorted(groups, key=slope_key, reverse=True):
        factor = QTSeries(L, {z: 1, **groups[s]}, bounds, unit)
        out = out * factor
    return out


def random_qtseries(L: QuiverLattice, bounds, rng: random.Random, density: float = 0.5,
                    unit=None) -> QTSeries:
    ring = RFRing(SymbolicField(0))
    v = ring.v()
    coeffs = {zero(L.n): 1}
    for p in _cone_points(L, bounds):
        if p != zero(L.n) and rng.random() < density:
            coeffs[p] = rng.randint(-3, 3) + rng.randint(-2, 2) * v ** rng.randint(-2, 2)
    return QTSeries(L, coeffs, bounds, unit)


# -- semistable volumes ------------------------------------------------

@dataclass
class SemistableReport:
    factors: dict              # (r, d) -> b_(r,d) = H^{>=0}_D(r, d)
    volumes: dict              # (r, d mod r) -> stabilised vol(QS^ss)
    full: GradedSeries


def positive_full_series(curve, l: int, R: int, Dmax: int, cache=None) -> GradedSeries:
    """``I^{>=0}_D`` with torsion: vector part times torsion for ``l > 2g-2``,
    ``I^{nil}_0 * Exp(A)`` for ``D = K``."""
    from higgsdt import dt

    spec = dt.TwistSpec.positive(curve.genus, l)
    if spec.flavor == "canonical":
        A = dt.kac_positive(curve, R, Dmax, cache)
        return dt.nil_full_series(curve, 0, R, Dmax, cache) * A.pleth_exp()
    vec = dt.rf_to_series(dt.positive_vec_series(curve, l, R, cache), Dmax)
    return vec * dt.torsion_series(curve, Dmax, R, nilpotent=False)


def semistable_volumes(curve, l: int, R: int, Dmax: int, cache=None) -> SemistableReport:
    from higgsdt import dt

    full = positive_full_series(curve, l, R, Dmax, cache)
    L = QuiverLattice(1, curve.genus, l)
    unit = dt.scalar(curve, lambda cl, ring: -cl.sqrt_q(ring), R + Dmax)
    b = hn_factorize(QTSeries.from_graded(L, full, unit))
    factors = {k[0]: c for k, c in b.items()}
    volumes = {}
    for r in range(1, R + 1):
        t = dt.stabilization_threshold(l, r)
        for res in range(r):
            col = [factors.get((r, d), 0) for d in range(Dmax + 1) if d % r == res and d >= t]
            if len(col) >= 3 and all(is_zero(col[i] - col[i + 1]) for i in range(len(col) - 1)):
                chi = L.chi_d((r, 0), (r, 0))
                volumes[(r, res)] = unit ** (-chi) * col[0]
    return SemistableReport(factors, volumes, full)


def ray_consistency(report: SemistableReport) -> list:
    """For each ray of positive rank, ``Log`` of the HN factor equals the ray
    restriction of ``Log`` of the full series.  Returns mismatching rays."""
    from higgsdt.series import slope_log, slope_of

    full = report.full
    direct = full.pleth_log()
    factors = GradedSeries({(0, 0): 1, **report.factors}, full.bounds)
    bad = []
    slopes = {slope_of(k) for k in factors.coeffs if k[0] > 0}
    for s in sorted(slopes):
        lhs = slope_log(factors, s)
        rhs = direct.restrict(lambda k: slope_of(k) == s and k != (0, 0))
        k = lhs.first_difference(rhs)
        if k is not None:
            bad.append((s, k))
    return bad
