"""Hitting-time sets and the dynamical deciders built on them.

The central computation is `hitting_set(sys, A, B)`: the exact set of
times n at which the n-step composition pushes A into B, returned as an
eventually periodic set.  Exactness rests on two facts:

* the composition sequence of every supported system is a finite
  transient plus a periodic (or periodically drifting) tail, and
* for a fixed pair (A, B) the hit predicate, as a function of the
  running exponent, is constant outside a finite middle window (shifted
  cylinder windows stop overlapping; expanded arcs saturate to the full
  circle; contracted arcs fall inside or outside a neighbourhood of 0).

Every decider quantifies over a finite sub-basis at a stated resolution
and says so in its verdict: refutations are exact, proofs are scoped to
the resolution, and deciders whose definition quantifies over an
infinite index (all vectors, all block lengths, all transitive systems)
return UNKNOWN-at-bound when nothing fails.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from . import epsets
from .epsets import EPSet, from_predicate, in_family, in_family_infty
from .spaces import (
    ArcSet,
    BoxSet,
    CylinderSet,
    FiniteSpace,
    FiniteSubset,
    ProductSpace,
    ShiftSpace,
    SpaceMismatchError,
    image,
    intersect,
    is_empty,
    space_of,
    subbasis,
)
from .systems import (
    Base,
    ExponentForm,
    Iterate,
    PairGrowing,
    PeriodicExponents,
    PeriodicTables,
    Product,
    Tower,
    VectorProduct,
    composed,
    ep_compose,
    form_to_map,
    system_space,
    render_system,
)
from .verdict import Verdict, proven, refuted, unknown


@dataclass(frozen=True)
class HittingQuery:
    sys: object
    a: object
    b: object
    exact: bool = True

    def run(self) -> EPSet:
        return hitting_set(self.sys, self.a, self.b)


# ---------------------------------------------------------------------------
# hitting sets


def hitting_set(sys, a, b) -> EPSet:
    """Exact set of times n >= 1 with (n-step image of a) meeting b."""
    space = system_space(sys)
    if space_of(a) != space or space_of(b) != space:
        raise SpaceMismatchError("open sets must live on the system's space")
    if is_empty(a) or is_empty(b):
        raise ValueError("hitting sets are defined for nonempty open sets")
    return _hitting(sys, a, b)


def _hitting(sys, a, b) -> EPSet:
    if isinstance(sys, Base):
        return _base_hitting(sys, a, b)
    if isinstance(sys, Iterate):
        return _hitting(sys.inner, a, b).dilate_preimage(sys.block)
    if isinstance(sys, Product):
        parts = [
            _hitting(f, fa, fb)
            for f, fa, fb in zip(sys.factors, a.factors, b.factors)
        ]
        return _intersect_all(parts)
    if isinstance(sys, VectorProduct):
        parts = [
            _hitting(sys.inner, fa, fb).dilate_preimage(rate)
            for rate, fa, fb in zip(sys.rates, a.factors, b.factors)
        ]
        return _intersect_all(parts)
    if isinstance(sys, Tower):
        return _tower_hitting(sys, a, b)
    raise TypeError(f"not a system: {sys!r}")


def _intersect_all(parts) -> EPSet:
    acc = parts[0]
    for p in parts[1:]:
        acc = acc.intersect(p)
    return acc


def _tower_hitting(sys: Tower, a: BoxSet, b: BoxSet) -> EPSet:
    """Hitting times of counter-tagged boxes.

    Starting from counter i, the counter reads j after n steps iff
    n = height*s + (j - i) for some s >= 0, and by then exactly s inner
    steps have fired; so each counter pair contributes an affine copy of
    the inner hitting set (plus the bare offset when the floors already
    overlap at inner time 0)."""
    k = sys.height
    floor_a, counters_a = a.factors
    floor_b, counters_b = b.factors
    inner_hits = _hitting(sys.inner, floor_a, floor_b)
    overlap_now = not is_empty(intersect(floor_a, floor_b))
    total = epsets.empty_set()
    for i in counters_a.elements:
        for j in counters_b.elements:
            offset = j - i
            total = total.union(inner_hits.affine_image(k, offset))
            if overlap_now and offset >= 1:
                total = total.union(epsets.singleton(offset))
    return total


def _base_hitting(sys: Base, a, b) -> EPSet:
    if isinstance(sys.schedule, PeriodicTables):
        ep = ep_compose(sys)
        pred = lambda n: not is_empty(
            intersect(image(form_to_map(sys.space, composed(sys, n)), a), b)
        )
        return from_predicate(pred, ep.preperiod, ep.period)
    return _exponent_hitting(sys, a, b)


def _exponent_hitting(sys: Base, a, b) -> EPSet:
    ep = ep_compose(sys)
    profile = _HitProfile(sys.space, a, b)
    exponent_at = lambda n: composed(sys, n).exponent
    pred = lambda n: profile.value(exponent_at(n))
    t, q = ep.preperiod, ep.period
    if ep.drifts is None:
        return from_predicate(pred, t, q)
    # drifting exponents: each residue class moves linearly, so it leaves
    # the finite middle window after finitely many periods
    horizon = t
    for i in range(1, q + 1):
        rep = t + i
        drift = ep.drifts[rep % q]
        if drift == 0:
            continue
        e0 = exponent_at(rep)
        if drift > 0:
            steps = max(0, -(-(profile.hi_threshold - e0) // drift))
        else:
            steps = max(0, -(-(e0 - profile.lo_threshold) // -drift))
        horizon = max(horizon, rep + steps * q)
    return from_predicate(pred, horizon, q)


class _HitProfile:
    """hit(e) = does base^e move `a` onto `b`?  Constant outside a finite
    window of exponents; middle values are computed exactly on demand."""

    def __init__(self, space, a, b):
        self.space = space
        self.a = a
        self.b = b
        self._middle: dict[int, bool] = {}
        if isinstance(space, ShiftSpace):
            # disjoint windows on a full shift always intersect
            lo_a = min(c.window_lo for c in a.components)
            hi_a = max(c.window_hi for c in a.components)
            lo_b = min(c.window_lo for c in b.components)
            hi_b = max(c.window_hi for c in b.components)
            self.lo_threshold, self.lo_value = lo_a - hi_b - 1, True
            self.hi_threshold, self.hi_value = hi_a - lo_b + 1, True
        else:
            p = space.base
            min_len = 1 if a.is_full else min(comp.length for comp in a.components)
            e = 0
            while p**e * min_len < 1:
                e += 1
            self.hi_threshold, self.hi_value = e, True
            radius = _zero_neighbourhood(b)
            if radius > 0:
                target, self.lo_value = radius, True
            else:
                target = min(comp.lo for comp in b.components)
                self.lo_value = False
            m = 0
            while p**m * target < 1:
                m += 1
            self.lo_threshold = -m

    def value(self, e: int) -> bool:
        if e <= self.lo_threshold:
            return self.lo_value
        if e >= self.hi_threshold:
            return self.hi_value
        if e not in self._middle:
            mapped = image(form_to_map(self.space, ExponentForm(e)), self.a)
            self._middle[e] = not is_empty(intersect(mapped, self.b))
        return self._middle[e]


def _zero_neighbourhood(b: ArcSet):
    """Largest delta with (0, delta) inside b; 0 if b avoids 0 from above."""
    if b.is_full:
        return 1
    best = 0
    for comp in b.components:
        if comp.lo == 0:
            best = max(best, comp.hi)
        elif comp.hi < comp.lo and comp.hi > 0:  # wrap arc runs through 0
            best = max(best, comp.hi)
    return best


# ---------------------------------------------------------------------------
# sub-basis machinery shared by the deciders


@lru_cache(maxsize=256)
def _pair_table(sys, resolution: int):
    """All (A, B, hitting_set) triples over the sub-basis, in a fixed order."""
    basis = subbasis(system_space(sys), resolution)
    return tuple((a, b, hitting_set(sys, a, b)) for a in basis for b in basis)


def _ep_key(e: EPSet):
    return (e.preperiod, e.period, tuple(sorted(e.transient)), tuple(sorted(e.residues)))


@lru_cache(maxsize=4096)
def _dilated_family(sys, resolution: int, factor: int):
    """Deduplicated, subset-minimal dilations of the pair hitting sets,
    each tagged with a representative pair.  Keeping only minimal sets is
    sound: shrinking any coordinate only shrinks a diagonal intersection,
    so refutations live on minimal tuples and proofs lift to all."""
    by_set: dict[EPSet, tuple] = {}
    for a, b, hits in _pair_table(sys, resolution):
        d = hits.dilate_preimage(factor)
        if d not in by_set:
            by_set[d] = (a, b)
    items = sorted(by_set.items(), key=lambda kv: _ep_key(kv[0]))
    minimal = []
    for d, pair in items:
        if not any(o != d and o.is_subset_of(d) for o, _ in items):
            minimal.append((d, pair))
    return tuple(minimal)


def _diagonal_refutation(families):
    """Search for one choice of pairs per coordinate whose dilated hitting
    sets have empty common intersection; None when every choice meets."""
    memo: dict[tuple[int, EPSet], bool] = {}

    def search(index, acc, chosen):
        if acc.is_empty:
            filler = [fam[0][1] for fam in families[index:]]
            return chosen + filler
        if index == len(families):
            return None
        key = (index, acc)
        if key in memo:  # memo only records fully safe states
            return None
        for hits, pair in families[index]:
            witness = search(index + 1, acc.intersect(hits), chosen + [pair])
            if witness is not None:
                return witness
        memo[key] = True
        return None

    return search(0, epsets.all_naturals(), [])


# ---------------------------------------------------------------------------
# deciders


def is_transitive(sys, resolution: int = 1) -> Verdict:
    """Every sub-basic pair has a nonempty hitting set."""
    for a, b, hits in _pair_table(sys, resolution):
        if hits.is_empty:
            return refuted(witness=(str(a), str(b)), resolution=resolution)
    return proven(resolution=resolution)


def is_vector_transitive(sys, rates: tuple[int, ...], resolution: int = 1) -> Verdict:
    """Transitivity of the rate-vector product system, decided on diagonal
    intersections of dilated hitting sets over sub-basic boxes."""
    if not rates or any(a < 1 for a in rates):
        raise ValueError("rate vector components must be positive")
    families = [_dilated_family(sys, resolution, a) for a in rates]
    witness = _diagonal_refutation(families)
    if witness is not None:
        return refuted(
            witness=tuple((str(a), str(b)) for a, b in witness),
            resolution=resolution,
        )
    return proven(resolution=resolution)


def is_multi_transitive(sys, p_max: int = 3, resolution: int = 1) -> Verdict:
    """Vector transitivity for (1..p), p up to the bound."""
    for p in range(1, p_max + 1):
        v = is_vector_transitive(sys, tuple(range(1, p + 1)), resolution)
        if v.is_refuted:
            return refuted(witness=("p", p, v.witness), bound=p, resolution=resolution)
    return unknown(bound=p_max, resolution=resolution)


def is_strongly_multi_transitive(
    sys, p_max: int = 2, a_max: int = 3, resolution: int = 1
) -> Verdict:
    """Vector transitivity for every vector with length <= p_max and
    components <= a_max."""
    from itertools import product as iter_product

    for p in range(1, p_max + 1):
        for vec in iter_product(range(1, a_max + 1), repeat=p):
            v = is_vector_transitive(sys, vec, resolution)
            if v.is_refuted:
                return refuted(
                    witness=("vector", vec, v.witness),
                    bound=(p_max, a_max),
                    resolution=resolution,
                )
    return unknown(bound=(p_max, a_max), resolution=resolution)


def is_totally_transitive(sys, n_max: int = 4, resolution: int = 1) -> Verdict:
    """Transitivity of every block-iterate up to the bound."""
    for n in range(1, n_max + 1):
        v = is_transitive(Iterate(sys, n), resolution)
        if v.is_refuted:
            return refuted(witness=("block", n, v.witness), bound=n, resolution=resolution)
    return unknown(bound=n_max, resolution=resolution)


def is_weakly_mixing(sys, order: int = 2, resolution: int = 1) -> Verdict:
    """Transitivity of the order-fold self product."""
    if order < 2:
        raise ValueError("weak mixing order must be >= 2")
    return is_vector_transitive(sys, (1,) * order, resolution)


def is_strongly_mixing(sys, resolution: int = 1) -> Verdict:
    """Every sub-basic pair has a cofinite hitting set."""
    for a, b, hits in _pair_table(sys, resolution):
        if not hits.is_cofinite():
            return refuted(witness=(str(a), str(b), str(hits)), resolution=resolution)
    return proven(resolution=resolution)


def is_family_transitive(sys, rates: tuple[int, ...], resolution: int = 1) -> Verdict:
    """Every sub-basic hitting set belongs to the family generated by the
    rate vector."""
    for a, b, hits in _pair_table(sys, resolution):
        if not in_family(hits, tuple(rates)):
            return refuted(witness=(str(a), str(b), str(hits)), resolution=resolution)
    return proven(resolution=resolution)


def is_family_infty_transitive(sys, p_max: int = 3, resolution: int = 1) -> Verdict:
    """Membership of every sub-basic hitting set in the intersection family,
    semi-decided up to p_max."""
    for a, b, hits in _pair_table(sys, resolution):
        v = in_family_infty(hits, p_max)
        if v.is_refuted:
            return refuted(
                witness=(str(a), str(b), v.witness), bound=v.bound, resolution=resolution
            )
    return unknown(bound=p_max, resolution=resolution)


def weakly_disjoint(sys_a, sys_b, resolution: int = 1) -> Verdict:
    """Transitivity of the two-system product over boxes of sub-basic opens."""
    fam_a = _dilated_family(sys_a, resolution, 1)
    fam_b = _dilated_family(sys_b, resolution, 1)
    witness = _diagonal_refutation([fam_a, fam_b])
    if witness is not None:
        return refuted(
            witness=tuple((str(a), str(b)) for a, b in witness), resolution=resolution
        )
    return proven(resolution=resolution)


def mild_mixing_battery(sys, battery=None, resolution: int = 1) -> Verdict:
    """Weak disjointness against a battery of transitive test systems.

    A failure is a definitive refutation; a clean pass is only evidence,
    since the defining condition quantifies over all transitive systems."""
    if battery is None:
        battery = default_battery()
    checked = 0
    skipped = []
    for member in battery:
        member_ok = is_transitive(member, resolution)
        if member_ok.is_refuted:
            skipped.append(render_system(member))
            continue
        checked += 1
        v = weakly_disjoint(sys, member, resolution)
        if v.is_refuted:
            return refuted(
                witness=("member", render_system(member), v.witness),
                resolution=resolution,
            )
    return unknown(bound=("checked", checked, "skipped", len(skipped)), resolution=resolution)


@lru_cache(maxsize=1)
def default_battery() -> tuple:
    """Transitive test systems: a constant-shift system, the two drifting
    shift schedules, a finite rotation, and height-2/3 towers of each
    (towers contribute residue-constrained hitting sets, which is what
    catches systems frozen on arithmetic progressions)."""
    shift2 = ShiftSpace(2)
    members = [
        Base(shift2, PeriodicExponents((1,))),
        Base(shift2, PeriodicExponents((1, -4, 4))),
        Base(shift2, PeriodicExponents((1, -2, 2))),
        Base(FiniteSpace(4), PeriodicTables(((1, 2, 3, 0),))),
    ]
    towers = [Tower(m, k) for m in list(members) for k in (2, 3)]
    return tuple(members + towers)
