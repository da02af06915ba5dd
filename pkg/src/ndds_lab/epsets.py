"""Exact algebra of eventually periodic subsets of {1,2,3,...}.

An EPSet stores a finite transient (explicit membership bits for
1..preperiod) plus a residue set modulo a period that governs every
larger index.  Hitting-time sets of the finitely presented systems in
this package are always of this shape, which is what makes every decider
downstream exact.

Membership indices start at 1; witnesses m in the residue-family test
are natural numbers >= 1 while offsets range over all of Z+ including 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import gcd, lcm
import re

from .verdict import Verdict, refuted, unknown


@dataclass(frozen=True)
class EPSet:
    preperiod: int
    period: int
    transient: frozenset[int]
    residues: frozenset[int]

    def __post_init__(self):
        if self.preperiod < 0 or self.period < 1:
            raise ValueError("need preperiod >= 0 and period >= 1")
        if any(not (1 <= n <= self.preperiod) for n in self.transient):
            raise ValueError("transient bits must lie in 1..preperiod")
        if any(not (0 <= r < self.period) for r in self.residues):
            raise ValueError("residues must lie in 0..period-1")

    # -- membership ---------------------------------------------------------

    def contains(self, n: int) -> bool:
        if n < 1:
            return False
        if n <= self.preperiod:
            return n in self.transient
        return n % self.period in self.residues

    __contains__ = contains

    @property
    def is_empty(self) -> bool:
        return not self.transient and not self.residues

    def is_cofinite(self) -> bool:
        return len(self.residues) == self.period

    def elements_upto(self, horizon: int) -> list[int]:
        return [n for n in range(1, horizon + 1) if self.contains(n)]

    def to_bitmask(self, horizon: int) -> int:
        mask = 0
        for n in range(1, horizon + 1):
            if self.contains(n):
                mask |= 1 << n
        return mask

    # -- algebra ------------------------------------------------------------

    def union(self, other: EPSet) -> EPSet:
        return self._combine(other, lambda x, y: x or y)

    def intersect(self, other: EPSet) -> EPSet:
        return self._combine(other, lambda x, y: x and y)

    def complement(self) -> EPSet:
        return ep_set(
            self.preperiod,
            self.period,
            set(range(1, self.preperiod + 1)) - self.transient,
            set(range(self.period)) - self.residues,
        )

    def _combine(self, other: EPSet, op) -> EPSet:
        t = max(self.preperiod, other.preperiod)
        q = lcm(self.period, other.period)
        return from_predicate(lambda n: op(self.contains(n), other.contains(n)), t, q)

    def dilate_preimage(self, factor: int) -> EPSet:
        """{m >= 1 : factor*m in self}."""
        if factor < 1:
            raise ValueError("dilation factor must be >= 1")
        q = self.period // gcd(factor, self.period)
        t = -(-self.preperiod // factor)  # ceil
        residues = {r for r in range(q) if (factor * r) % self.period in self.residues}
        transient = {m for m in range(1, t + 1) if self.contains(factor * m)}
        return ep_set(t, q, transient, residues)

    def affine_image(self, scale: int, offset: int) -> EPSet:
        """{scale*s + offset : s in self} clipped to indices >= 1."""
        if scale < 1:
            raise ValueError("scale must be >= 1")

        def pred(n):
            if (n - offset) % scale:
                return False
            s = (n - offset) // scale
            return s >= 1 and self.contains(s)

        t = scale * (self.preperiod + 1) + abs(offset) + scale
        return from_predicate(pred, t, scale * self.period)

    def is_subset_of(self, other: EPSet) -> bool:
        t = max(self.preperiod, other.preperiod)
        q = lcm(self.period, other.period)
        return all(
            other.contains(n) for n in range(1, t + q + 1) if self.contains(n)
        )

    # -- rendering ----------------------------------------------------------

    def __str__(self):
        trans = ",".join(str(n) for n in sorted(self.transient))
        res = ",".join(str(r) for r in sorted(self.residues))
        return f"ep{{t={self.preperiod}; trans={trans}; q={self.period}; R={{{res}}}}}"


# ---------------------------------------------------------------------------
# constructors


def ep_set(preperiod, period, transient, residues) -> EPSet:
    """Canonical constructor: minimal period first, then minimal preperiod."""
    transient = set(transient)
    residues = set(residues)
    for d in _divisors(period):
        folded = {r % d for r in residues}
        if all((r in residues) == (r % d in folded) for r in range(period)):
            period, residues = d, folded
            break
    while preperiod > 0:
        periodic = preperiod % period in residues
        actual = preperiod in transient
        if periodic != actual:
            break
        transient.discard(preperiod)
        preperiod -= 1
    return EPSet(preperiod, period, frozenset(transient), frozenset(residues))


def _divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def from_predicate(pred, preperiod_bound: int, period_bound: int) -> EPSet:
    """Build an EPSet from a membership predicate known to be periodic with
    period `period_bound` beyond `preperiod_bound`; the result is canonical."""
    transient = {n for n in range(1, preperiod_bound + 1) if pred(n)}
    residues = set()
    for i in range(1, period_bound + 1):
        n = preperiod_bound + i
        if pred(n):
            residues.add(n % period_bound)
    return ep_set(preperiod_bound, period_bound, transient, residues)


def empty_set() -> EPSet:
    return EPSet(0, 1, frozenset(), frozenset())


def all_naturals() -> EPSet:
    return EPSet(0, 1, frozenset(), frozenset({0}))


def from_residues(period: int, residues) -> EPSet:
    return ep_set(0, period, (), residues)


def singleton(n: int) -> EPSet:
    return ep_set(n, 1, {n}, ())


_EP_RE = re.compile(
    r"ep\{t=(\d+); trans=([\d,]*); q=(\d+); R=\{([\d,]*)\}\}"
)


def parse_ep(text: str) -> EPSet:
    m = _EP_RE.fullmatch(text.strip())
    if not m:
        raise ValueError(f"bad EPSet literal: {text!r}")
    t, trans, q, res = m.groups()
    transient = {int(x) for x in trans.split(",") if x}
    residues = {int(x) for x in res.split(",") if x}
    return ep_set(int(t), int(q), transient, residues)


# ---------------------------------------------------------------------------
# residue-family membership


@lru_cache(maxsize=None)
def in_family(f: EPSet, vector: tuple[int, ...]) -> bool:
    """Is f in the family generated by `vector`?

    The defining condition asks, for every offset vector n over Z+, for a
    witness m >= 1 with m*vector[j] + n[j] in f for all j.  Both sides
    reduce to residues modulo f's period:

    * a residue witness lifts to arbitrarily large m, in particular past
      the transient, where membership is the periodic condition;
    * a failing offset residue lifts to an offset with every coordinate
      beyond the transient, where no m of any size can work.

    So the decision is exact, not a bounded search.
    """
    if not vector or any(a < 1 for a in vector):
        raise ValueError("vector components must be positive integers")
    q = f.period
    res = f.residues
    if not res:
        return False
    if len(res) == q:
        return True
    # witnesses[j][n_r] = bitmask of witness residues m with (m*a_j + n_r) % q in res
    witnesses = []
    for a in vector:
        col = []
        for n_r in range(q):
            mask = 0
            for m in range(q):
                if (m * a + n_r) % q in res:
                    mask |= 1 << m
            col.append(mask)
        witnesses.append(col)
    full = (1 << q) - 1
    memo: dict[tuple[int, int], bool] = {}

    def every_offset_has_witness(j: int, alive: int) -> bool:
        if alive == 0:
            return False
        if j == len(vector):
            return True
        key = (j, alive)
        if key in memo:
            return memo[key]
        ok = all(
            every_offset_has_witness(j + 1, alive & witnesses[j][n_r])
            for n_r in range(q)
        )
        memo[key] = ok
        return ok

    return every_offset_has_witness(0, full)


def in_family_infty(f: EPSet, p_max: int) -> Verdict:
    """Semi-decision of membership in the intersection of the families
    generated by (1,2,...,p) over all p: refute at the first failing p,
    otherwise report the bound reached (membership is monotone in p)."""
    if p_max < 1:
        raise ValueError("p_max must be >= 1")
    for p in range(1, p_max + 1):
        vec = tuple(range(1, p + 1))
        if not in_family(f, vec):
            return refuted(witness=("vector", vec), bound=p)
    return unknown(bound=p_max)
