"""Self-check suites shared by the command line and the test-suite."""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from higgsdt.curve import CurveData
from higgsdt.ratfun import RFRing
from higgsdt.scalar import NumericField, SymbolicField, Tower
from higgsdt.series import GradedSeries

SUITES = ("exp-log", "identities", "hn", "oracle", "kac", "dt")


@dataclass
class CheckResult:
    suite: str
    name: str
    ok: bool
    detail: str = ""


def random_coefficient(backend: str, rng: random.Random, depth: int = 1):
    if backend == "rational":
        return Fraction(rng.randint(-5, 5), rng.randint(1, 4))
    if backend == "symbolic":
        v = RFRing(SymbolicField(0)).v()
        return rng.randint(-3, 3) + rng.randint(-2, 2) * v ** rng.randint(-2, 3)
    if backend == "numeric":
        # every level lives in Q(sqrt 2); level k stores sqrt(2**k) as v**k
        v = RFRing(NumericField(2)).v()
        return Tower([Fraction(rng.randint(-3, 3), rng.randint(1, 3)) + rng.randint(-2, 2) * v ** k
                      for k in range(1, depth + 1)])
    raise ValueError(f"unknown backend {backend!r}")


def natural_depth(key, bounds) -> int:
    """Largest ``k`` with ``k * key`` inside the box: the levels ``psi_k`` can see."""
    return min(b // a for a, b in zip(key, bounds) if a)


def random_series(backend: str, rng: random.Random, bounds=(2, 3), density=0.6) -> GradedSeries:
    coeffs = {}
    for r in range(bounds[0] + 1):
        for d in range(bounds[1] + 1):
            if (r, d) != (0, 0) and rng.random() < density:
                coeffs[(r, d)] = random_coefficient(backend, rng, natural_depth((r, d), bounds))
    return GradedSeries(coeffs, bounds)


def exp_log_laws(f: GradedSeries, g: GradedSeries) -> list[tuple[str, bool]]:
    F, G = f.pleth_exp(), g.pleth_exp()
    return [
        ("Log(Exp f) = f", F.pleth_log() == f),
        ("Exp(f + g) = Exp f Exp g", (f + g).pleth_exp() == F * G),
        ("Log(F G) = Log F + Log G", (F * G).pleth_log() == f + g),
        ("psi_2(f g) = psi_2 f psi_2 g", (f * g).adams(2) == f.adams(2) * g.adams(2)),
        ("log(exp f) = f", f.exp().log() == f),
    ]


def suite_exp_log(samples: int = 50, seed: int = 0) -> list[CheckResult]:
    out = []
    rng = random.Random(seed)
    for backend in ("rational", "symbolic", "numeric"):
        fails = []
        for i in range(samples):
            f, g = random_series(backend, rng), random_series(backend, rng)
            fails += [(i, name) for name, ok in exp_log_laws(f, g) if not ok]
        out.append(CheckResult("exp-log", backend, not fails, str(fails[:3]) if fails else ""))
    return out


def suite_identities(genera=(0, 1), R: int = 3, Dmax: int = 8) -> list[CheckResult]:
    from higgsdt.dt import identity_suite

    return [CheckResult("identities", f"g{g}:{r.name}", r.ok, r.detail)
            for g in genera for r in identity_suite(CurveData.symbolic(g), R, Dmax)]


def suite_hn(samples: int = 25, seed: int = 0) -> list[CheckResult]:
    from higgsdt.hall import QuiverLattice, hn_expand, hn_factorize, random_qtseries

    rng = random.Random(seed)
    out = []
    for n, bounds in ((1, (2, 3)), (2, (1, 2)), (3, (1, 1))):
        L = QuiverLattice(n, 0, 1)
        bad = []
        for i in range(samples):
            A = random_qtseries(L, bounds, rng)
            if hn_expand(hn_factorize(A), L, bounds, A.unit) != A:
                bad.append(i)
        out.append(CheckResult("hn", f"round-trip n={n}", not bad, str(bad)))
    return out


def suite_oracle(qs=(2, 3), ls=(0, -1, -2), rs=(1, 2), dmax: int = 3) -> list[CheckResult]:
    from higgsdt.oracle import compare

    return [CheckResult("oracle", f"q={row.q} l={row.l} r={row.r} d={row.d}", row.match,
                        f"{row.volume} vs {row.formula}")
            for row in compare(qs, ls, rs, dmax)]


def suite_kac(R: int = 3, Dmax: int = 6) -> list[CheckResult]:
    from higgsdt.dt import kac_positive

    c = CurveData.symbolic(0)
    A = kac_positive(c, R, Dmax)
    q = c.at(1).q()
    out = []
    for r in range(R + 1):
        for d in range(Dmax + 1):
            if (r, d) == (0, 0):
                continue
            want = (q + 1) if r == 0 else (1 if r == 1 else 0)
            got = A[(r, d)]
            out.append(CheckResult("kac", f"A({r},{d})", (got - want) == 0 if not isinstance(got, int)
                                   else got == want, str(got)))
    return out


def suite_dt(genera=(0, 1), R: int = 3) -> list[CheckResult]:
    from higgsdt.dt import is_denominator_free, omega_table

    out = []
    for g in genera:
        c = CurveData.symbolic(g)
        for l in (2 * g - 2, 2 * g - 1, 2 * g):
            tab = omega_table(c, l, R, "both")
            out.append(CheckResult("dt", f"g{g} l={l} methods agree", tab.agree()))
            out.append(CheckResult("dt", f"g{g} l={l} pole audit", all(a.ok for a in tab.audits),
                                   "; ".join(a.detail for a in tab.audits if not a.ok)))
            out.append(CheckResult("dt", f"g{g} l={l} denominator free",
                                   all(is_denominator_free(v, c) for v in tab.entries.values())))
            out.append(CheckResult("dt", f"g{g} l={l} independent of d", *d_independence(tab)))
    return out


def d_independence(table) -> tuple[bool, str]:
    for r in range(1, table.R + 1):
        base = table.entries[(r, 0)]
        for d in range(1, r):
            if not (table.entries[(r, d)] - base).is_zero():
                return False, f"Omega({r},0) != Omega({r},{d})"
    return True, ""


def run(suite: str) -> list[CheckResult]:
    fns = {"exp-log": suite_exp_log, "identities": suite_identities, "hn": suite_hn,
           "oracle": suite_oracle, "kac": suite_kac, "dt": suite_dt}
    if suite == "all":
        return [r for name in SUITES for r in fns[name]()]
    if suite not in fns:
        raise ValueError(f"unknown suite {suite!r}; choose from {SUITES + ('all',)}")
    return fns[suite]()
