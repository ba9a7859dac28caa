"""Partitions, Young-diagram cells and Jordan types."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator, Sequence

Partition = tuple[int, ...]
Lattice = tuple[int, int]


@dataclass(frozen=True)
class Cell:
    row: int
    col: int
    arm: int
    leg: int


def normalize(parts: Sequence[int]) -> Partition:
    out = tuple(sorted((int(p) for p in parts if p), reverse=True))
    if any(p < 0 for p in out):
        raise ValueError("partition parts must be positive")
    return out


def conjugate(lam: Sequence[int]) -> Partition:
    lam = normalize(lam)
    if not lam:
        return ()
    return tuple(sum(1 for p in lam if p > j) for j in range(lam[0]))


def pairing(lam: Sequence[int]) -> int:
    """``<lam, lam> = sum of squared parts of the conjugate``."""
    return sum(c * c for c in conjugate(lam))


def cells(lam: Sequence[int]) -> list[Cell]:
    lam = normalize(lam)
    conj = conjugate(lam)
    return [Cell(i, j, lam[i - 1] - j, conj[j - 1] - i)
            for i in range(1, len(lam) + 1) for j in range(1, lam[i - 1] + 1)]


def multiplicities(lam: Sequence[int]) -> tuple[int, ...]:
    """Block sizes ``(r_1, ..., r_t)`` with ``r_i = #{parts equal to i}``."""
    lam = normalize(lam)
    if not lam:
        return ()
    return tuple(lam.count(i) for i in range(1, lam[0] + 1))


def from_multiplicities(rs: Sequence[int]) -> Partition:
    return normalize([i for i, r in enumerate(rs, start=1) for _ in range(r)])


def enumerate_partitions(r: int) -> list[Partition]:
    """All partitions of ``r`` in reverse lexicographic order."""
    if r < 0:
        raise ValueError("weight must be nonnegative")

    def rec(n, cap) -> Iterator[Partition]:
        if n == 0:
            yield ()
            return
        for first in range(min(n, cap), 0, -1):
            for rest in rec(n - first, first):
                yield (first,) + rest

    return list(rec(r, r))


def enumerate_jgen(r: int) -> list[tuple[int, ...]]:
    """Sequences ``(r_1, ..., r_t)`` with ``sum i*r_i = r`` and ``r_t >= 1``."""
    return [multiplicities(lam) for lam in enumerate_partitions(r)]


# -- Jordan types ------------------------------------------------------

def shift(alpha: Lattice, l: int, times: int = 1) -> Lattice:
    """``(r, d)[times]`` where ``(r, d)[1] = (r, d + l*r)``."""
    r, d = alpha
    return (r, d + times * l * r)


def _add(a: Lattice, b: Lattice) -> Lattice:
    return (a[0] + b[0], a[1] + b[1])


def jordan_shape(alphas: Sequence[Lattice], l: int,
                 shift_fn: Callable[[Lattice, int], Lattice] | None = None):
    """``(f'', f', lam)`` for a Jordan type ``alphas = (alpha_0, ..., alpha_{s-1})``.

    ``f''_k = sum_{j>=k} alpha_j[-k]`` and ``f'_k = sum_{j>=k} alpha_j[-j]``
    for ``k = 0..s`` (the entry at ``k = s`` is zero).  Entry ``alpha_k``
    contributes ``rk alpha_k`` parts of size ``k + 1`` to ``lam``.
    """
    sh = shift_fn or (lambda a, t: shift(a, l, t))
    alphas = [tuple(a) for a in alphas]
    s = len(alphas)
    zero = (0, 0)
    f2, f1 = [], []
    for k in range(s + 1):
        acc2, acc1 = zero, zero
        for j in range(k, s):
            acc2 = _add(acc2, sh(alphas[j], -k))
            acc1 = _add(acc1, sh(alphas[j], -j))
        f2.append(acc2)
        f1.append(acc1)
    lam = from_multiplicities([a[0] for a in alphas])
    return f2, f1, lam


def jordan_rank(alphas: Sequence[Lattice]) -> int:
    return sum((k + 1) * a[0] for k, a in enumerate(alphas))


def jordan_degree(alphas: Sequence[Lattice]) -> int:
    return sum((k + 1) * a[1] for k, a in enumerate(alphas))


def enumerate_jordan(r: int, dmin: int, dmax: int) -> Iterator[tuple[Lattice, ...]]:
    """Tuples ``(alpha_0..alpha_{s-1})`` with ``sum (k+1) rk alpha_k = r``,
    last entry of positive rank, and each degree in ``[dmin, dmax]``.

    Entries of rank 0 carry degree 0 (torsion-free strata only).
    """
    for lam in enumerate_partitions(r):
        ranks = multiplicities(lam)

        def rec(k) -> Iterator[tuple[Lattice, ...]]:
            if k == len(ranks):
                yield ()
                return
            degs = range(dmin, dmax + 1) if ranks[k] else (0,)
            for d in degs:
                for rest in rec(k + 1):
                    yield ((ranks[k], d),) + rest

        yield from rec(0)
