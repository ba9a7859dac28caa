"""The analytic kernels ``L``, ``Res_lam``, ``H~_lam``, ``H_lam`` and ``J_lam``.

Convention for the iterated residue
-----------------------------------
Block ``i`` of ``lam`` (the parts equal to ``i``) owns the variables
``z_a .. z_b`` with ``a = r_{<i} + 1`` and ``b = r_{<=i}``.  The chain
``z_{j+1} = z_j / q`` is consumed by residues in the *lower* variable:
``Res_{z_j = q z_{j+1}} (.) dz_j / z_j`` for ``j = a .. b-1``.  The survivor
is the block end ``z_b``; the block leader equals ``z_b * q**(r_i - 1)``.

The alternative reading (residues in the upper variable, survivor the
leader) is kept as ``convention="leader"`` for diagnostics only; it does not
reproduce the genus-0 Kac polynomials.
"""
from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass, field

from higgsdt.curve import CurveData, CurveLevel
from higgsdt.partition import Partition, cells, multiplicities, normalize
from higgsdt.ratfun import RatFun, RFRing

CONVENTIONS = ("end", "leader")


def zvars(n: int) -> tuple[str, ...]:
    return tuple(f"z{i}" for i in range(1, n + 1))


def _level(c) -> CurveLevel:
    return c if isinstance(c, CurveLevel) else c.at(1)


def build_L(n: int, c: CurveData | CurveLevel) -> RatFun:
    """``L(z_n, ..., z_1)`` as a rational function of ``z_1 .. z_n``."""
    if n < 1:
        raise ValueError("n must be positive")
    cl = _level(c)
    ring = RFRing(cl.field, zvars(n))
    z = [ring.gen(name) for name in zvars(n)]
    q = cl.q(ring)
    # sigma(prod_{i<j} Z~(z_i/z_j)) / prod_{i<j} Z~(z_i/z_j) is the product of
    # Z~(z_b/z_a) / Z~(z_a/z_b) over the pairs a < b that sigma inverts.
    swap = {}
    for a in range(n):
        for b in range(a + 1, n):
            swap[a, b] = cl.zeta_tilde_at(z[b] / z[a]) / cl.zeta_tilde_at(z[a] / z[b])
    total = ring.zero
    for perm in itertools.permutations(range(n)):
        w = [z[p] for p in perm]
        term = 1 / (1 - w[0])
        for i in range(n - 1):
            term = term / (1 - q * w[i + 1] / w[i])
        for i in range(n):
            for j in range(i + 1, n):
                a, b = perm[i], perm[j]
                if a > b:
                    term = term * swap[b, a]
        total = total + term
    return total


@dataclass
class ResidueReport:
    orders: list = field(default_factory=list)

    @property
    def anomalous(self) -> bool:
        return any(m >= 2 for m in self.orders)


def blocks(lam: Partition) -> list[tuple[int, int, int]]:
    """``(i, a, b)`` for each nonempty block, 1-based variable indices."""
    out, start = [], 0
    for i, r in enumerate(multiplicities(lam), start=1):
        if r:
            out.append((i, start + 1, start + r))
        start += r
    return out


def res_lambda(lam, L: RatFun, c, convention: str = "end",
               report: ResidueReport | None = None) -> RatFun:
    """``H~_lam`` as a function of one surviving variable per nonempty block.

    With ``convention="end"`` the survivors are the block ends ``z_b``.
    """
    if convention not in CONVENTIONS:
        raise ValueError(f"convention must be one of {CONVENTIONS}")
    lam = normalize(lam)
    cl = _level(c)
    ring = L.ring
    q = cl.q(ring)
    orders = report.orders if report is not None else None
    f = L
    for _, a, b in blocks(lam):
        if convention == "end":
            for j in range(a, b):
                zj = ring.gen(f"z{j}")
                f = (f / zj).residue_at(f"z{j}", q * ring.gen(f"z{j + 1}"), orders)
        else:
            for j in range(b - 1, a - 1, -1):
                zk = ring.gen(f"z{j + 1}")
                f = (f / zk).residue_at(f"z{j + 1}", ring.gen(f"z{j}") / q, orders)
    return f


def h_lambda(lam, c, convention: str = "end", report: ResidueReport | None = None) -> RatFun:
    """``H_lam(z)``: block-``i`` leader replaced by ``z**i * q**(-r_{<i})``."""
    lam = normalize(lam)
    cl = _level(c)
    n = len(lam)
    out_ring = RFRing(cl.field, ("z",))
    if n == 0:
        return out_ring.one
    f = res_lambda(lam, build_L(n, cl), cl, convention, report)
    zr = out_ring.gen("z")
    q = cl.q(out_ring)
    bindings = {}
    for i, a, b in blocks(lam):
        r_lt = a - 1
        leader = zr ** i * q ** (-r_lt)
        if convention == "end":
            bindings[f"z{b}"] = leader * q ** (1 - (b - a + 1))
        else:
            bindings[f"z{a}"] = leader
    return f.substitute(bindings, out_ring)


def j_lambda(lam, c) -> RatFun:
    """``J_lam(z) = prod_{s in lam} Z*(q**(-1-leg) z**arm)``."""
    cl = _level(c)
    ring = RFRing(cl.field, ("z",))
    z = ring.gen("z")
    q = cl.q(ring)
    out = ring.one
    for s in cells(lam):
        out = out * cl.zstar_at(q ** (-s.leg) * z ** s.arm)
    return out


class KernelCache:
    """Memo of ``(curve level, lam) -> (H_lam, J_lam)``; safe for threads."""

    def __init__(self, convention: str = "end"):
        self.convention = convention
        self._data: dict = {}
        self._lock = threading.Lock()
        self.reports: dict = {}

    def get(self, lam, c) -> tuple[RatFun, RatFun]:
        cl = _level(c)
        lam = normalize(lam)
        key = (cl.key(), lam)
        hit = self._data.get(key)
        if hit is not None:
            return hit
        report = ResidueReport()
        value = (h_lambda(lam, cl, self.convention, report), j_lambda(lam, cl))
        with self._lock:
            self._data[key] = value
            self.reports[key] = report
        return value

    def anomalies(self) -> list:
        return [k for k, rep in self.reports.items() if rep.anomalous]


DEFAULT_CACHE = KernelCache()
