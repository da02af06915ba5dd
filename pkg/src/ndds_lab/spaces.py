"""Exact open-set calculus on the three phase-space families.

Shift spaces carry finite unions of cylinders, the circle carries finite
unions of open arcs with rational endpoints, finite discrete spaces carry
subset bitmasks.  Product spaces (used by towers and joint-transitivity
checks) carry boxes of component open sets.  Everything is immutable and
computed with exact integer / rational arithmetic; no floats anywhere.

Conventions fixed here and relied on throughout:

* the left shift moves the origin marker rightward, so its image of a
  cylinder over window [l, r] sits over [l-1, r-1];
* all arcs are open and endpoint coincidences count as non-intersecting,
  e.g. (0,1/4) and (1/4,1/2) are disjoint;
* an expanding circle map whose image covers the circle up to finitely
  many points reports the full circle -- open-set hitting predicates
  cannot see the difference, and it keeps ArcSet closed under images.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product as iter_product


class SpaceMismatchError(ValueError):
    """Operands live over different phase spaces."""


# ---------------------------------------------------------------------------
# spaces


@dataclass(frozen=True)
class ShiftSpace:
    """Two-sided full shift on `alphabet` symbols."""

    alphabet: int

    def __post_init__(self):
        if self.alphabet < 2:
            raise ValueError("shift alphabet needs at least 2 symbols")

    def __str__(self):
        return f"shift{{s={self.alphabet}}}"


@dataclass(frozen=True)
class CircleSpace:
    """Unit circle R/Z; `base` is the expansion base of its power maps."""

    base: int

    def __post_init__(self):
        if self.base < 2:
            raise ValueError("circle power base must be >= 2")

    def __str__(self):
        return f"circle{{p={self.base}}}"


@dataclass(frozen=True)
class FiniteSpace:
    """Discrete space on points 0..size-1; every subset is open."""

    size: int

    def __post_init__(self):
        if self.size < 1:
            raise ValueError("finite space needs at least one point")

    def __str__(self):
        return f"finite{{n={self.size}}}"


@dataclass(frozen=True)
class ProductSpace:
    factors: tuple

    def __post_init__(self):
        if not self.factors:
            raise ValueError("product of no spaces")

    def __str__(self):
        return "x".join(str(f) for f in self.factors)


# ---------------------------------------------------------------------------
# open sets


@dataclass(frozen=True)
class Cylinder:
    """Sequences agreeing with `word` on indices window_lo .. window_lo+len-1."""

    window_lo: int
    word: tuple[int, ...]

    def __post_init__(self):
        if not self.word:
            raise ValueError("cylinder word must be nonempty")

    @property
    def window_hi(self) -> int:
        return self.window_lo + len(self.word) - 1

    def symbol_at(self, index: int):
        if self.window_lo <= index <= self.window_hi:
            return self.word[index - self.window_lo]
        return None

    def contains_cyl(self, other: Cylinder) -> bool:
        """Set containment: self's constraints are implied by other's."""
        if other.window_lo > self.window_lo or other.window_hi < self.window_hi:
            return False
        return all(
            other.symbol_at(i) == self.word[i - self.window_lo]
            for i in range(self.window_lo, self.window_hi + 1)
        )

    def __str__(self):
        return "cyl{%d:%s}" % (self.window_lo, "".join(str(s) for s in self.word))


@dataclass(frozen=True)
class CylinderSet:
    space: ShiftSpace
    components: tuple[Cylinder, ...]

    def __str__(self):
        if not self.components:
            return "empty"
        return "|".join(str(c) for c in self.components)


@dataclass(frozen=True)
class Arc:
    """Open arc (lo, hi) on R/Z, wrapping through 0 when hi < lo.

    Endpoints are reduced fractions in [0,1).  The wrap arc (a, b) with
    b < a is the set {t > a} | {0} | {t < b}; in particular it contains
    the point 0.  hi = 0 denotes the arc running from lo up to (but not
    including) 1.
    """

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        for x in (self.lo, self.hi):
            if not (0 <= x < 1):
                raise ValueError("arc endpoints must lie in [0,1)")
        if self.lo == self.hi:
            raise ValueError("degenerate arc (lo == hi)")

    @property
    def length(self) -> Fraction:
        return (self.hi - self.lo) % 1

    def __str__(self):
        hi = "1" if self.hi == 0 else str(self.hi)
        return f"arc({self.lo},{hi})"


@dataclass(frozen=True)
class ArcSet:
    space: CircleSpace
    components: tuple[Arc, ...]
    is_full: bool = False

    def __str__(self):
        if self.is_full:
            return "full"
        if not self.components:
            return "empty"
        return "|".join(str(a) for a in self.components)


@dataclass(frozen=True)
class FiniteSubset:
    space: FiniteSpace
    members: int  # bitmask over 0..size-1

    def __post_init__(self):
        if self.members < 0 or self.members >> self.space.size:
            raise ValueError("bitmask exceeds space size")

    @property
    def elements(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.space.size) if self.members >> i & 1)

    def __str__(self):
        if not self.members:
            return "empty"
        return "fin{%s}" % ",".join(str(i) for i in self.elements)


@dataclass(frozen=True)
class BoxSet:
    """Product box: one open set per product-space factor."""

    space: ProductSpace
    factors: tuple

    def __post_init__(self):
        if len(self.factors) != len(self.space.factors):
            raise ValueError("box arity does not match product space")

    def __str__(self):
        return "box(" + ";".join(str(f) for f in self.factors) + ")"


# ---------------------------------------------------------------------------
# maps


@dataclass(frozen=True)
class ShiftPower:
    """The left shift composed with itself `exponent` times (inverse if < 0)."""

    exponent: int

    def __str__(self):
        return f"shift^{self.exponent}"


@dataclass(frozen=True)
class CirclePower:
    """t -> base^exponent * t mod 1 for exponent >= 0, else the literal
    scaling t -> t / base^-exponent taken on the fundamental domain [0,1)."""

    exponent: int
    base: int

    def __post_init__(self):
        if self.base < 2:
            raise ValueError("circle power base must be >= 2")

    def __str__(self):
        return f"circle^{self.exponent}(p={self.base})"


@dataclass(frozen=True)
class FiniteFunc:
    table: tuple[int, ...]

    def __post_init__(self):
        n = len(self.table)
        if n == 0 or any(not (0 <= v < n) for v in self.table):
            raise ValueError("table must be total on 0..n-1")

    def __str__(self):
        return "table(%s)" % ",".join(str(v) for v in self.table)


@dataclass(frozen=True)
class TupleMap:
    parts: tuple

    def __str__(self):
        return "x".join(str(p) for p in self.parts)


# ---------------------------------------------------------------------------
# canonical constructors


def cylinder_set(space: ShiftSpace, cylinders) -> CylinderSet:
    """Canonical form: drop components contained in another, sort."""
    uniq = []
    for c in cylinders:
        if any(s >= space.alphabet or s < 0 for s in c.word):
            raise ValueError("cylinder symbol outside alphabet")
        if c not in uniq:
            uniq.append(c)
    kept = [c for c in uniq if not any(o != c and o.contains_cyl(c) for o in uniq)]
    kept.sort(key=lambda c: (c.window_lo, len(c.word), c.word))
    return CylinderSet(space, tuple(kept))


def full_shift_set(space: ShiftSpace) -> CylinderSet:
    return cylinder_set(space, [Cylinder(0, (a,)) for a in range(space.alphabet)])


def arc(lo, hi) -> Arc:
    return Arc(Fraction(lo) % 1, Fraction(hi) % 1)


def arc_set(space: CircleSpace, arcs=(), is_full: bool = False) -> ArcSet:
    """Canonical form: merge overlapping arcs circularly, sort by lo.

    A merged run of open arcs covering total length >= 1 is the circle
    minus finitely many points and is reported as full.
    """
    if is_full:
        return ArcSet(space, (), True)
    work = [(a.lo, a.length) for a in arcs]
    changed = True
    while changed:
        changed = False
        for i in range(len(work)):
            for j in range(i + 1, len(work)):
                merged = _merge_two(work[i], work[j])
                if merged is None:
                    continue
                lo, ln = merged
                if ln >= 1:
                    return ArcSet(space, (), True)
                del work[j], work[i]
                work.append((lo, ln))
                changed = True
                break
            if changed:
                break
    comps = sorted((Arc(lo, (lo + ln) % 1) for lo, ln in work), key=lambda a: (a.lo, a.hi))
    return ArcSet(space, tuple(comps))


def _merge_two(a, b):
    """Union of two overlapping circular arcs given as (lo, length); None if
    their open intersection is empty."""
    alo, alen = a
    blo, blen = b
    d = (blo - alo) % 1
    if d < alen:
        return alo, max(alen, d + blen)
    d2 = (alo - blo) % 1
    if d2 < blen:
        return blo, max(blen, d2 + alen)
    return None


def full_circle_set(space: CircleSpace) -> ArcSet:
    return ArcSet(space, (), True)


def finite_subset(space: FiniteSpace, members) -> FiniteSubset:
    if isinstance(members, int):
        return FiniteSubset(space, members)
    mask = 0
    for i in members:
        if not (0 <= i < space.size):
            raise ValueError("point outside finite space")
        mask |= 1 << i
    return FiniteSubset(space, mask)


def full_finite_set(space: FiniteSpace) -> FiniteSubset:
    return FiniteSubset(space, (1 << space.size) - 1)


def box_set(space: ProductSpace, factors) -> BoxSet:
    factors = tuple(factors)
    for f, sp in zip(factors, space.factors):
        if space_of(f) != sp:
            raise SpaceMismatchError("box factor over wrong space")
    return BoxSet(space, factors)


def full_set(space):
    if isinstance(space, ShiftSpace):
        return full_shift_set(space)
    if isinstance(space, CircleSpace):
        return full_circle_set(space)
    if isinstance(space, FiniteSpace):
        return full_finite_set(space)
    if isinstance(space, ProductSpace):
        return BoxSet(space, tuple(full_set(f) for f in space.factors))
    raise TypeError(f"not a space: {space!r}")


def space_of(open_set):
    return open_set.space


# ---------------------------------------------------------------------------
# core operations


def is_empty(a) -> bool:
    if isinstance(a, CylinderSet):
        return not a.components
    if isinstance(a, ArcSet):
        return not a.is_full and not a.components
    if isinstance(a, FiniteSubset):
        return a.members == 0
    if isinstance(a, BoxSet):
        return any(is_empty(f) for f in a.factors)
    raise TypeError(f"not an open set: {a!r}")


def intersect(a, b):
    if a.space != b.space:
        raise SpaceMismatchError(f"cannot intersect over {a.space} and {b.space}")
    if isinstance(a, CylinderSet):
        pieces = []
        for ca in a.components:
            for cb in b.components:
                pieces.extend(_cyl_intersect(ca, cb, a.space.alphabet))
        return cylinder_set(a.space, pieces)
    if isinstance(a, ArcSet):
        if a.is_full:
            return b
        if b.is_full:
            return a
        pieces = []
        for aa in a.components:
            for ab in b.components:
                pieces.extend(_arc_intersect(aa, ab))
        return arc_set(a.space, pieces)
    if isinstance(a, FiniteSubset):
        return FiniteSubset(a.space, a.members & b.members)
    if isinstance(a, BoxSet):
        return BoxSet(a.space, tuple(intersect(fa, fb) for fa, fb in zip(a.factors, b.factors)))
    raise TypeError(f"not an open set: {a!r}")


def _cyl_intersect(c1: Cylinder, c2: Cylinder, alphabet: int) -> list[Cylinder]:
    lo = min(c1.window_lo, c2.window_lo)
    hi = max(c1.window_hi, c2.window_hi)
    template = []
    for i in range(lo, hi + 1):
        s1 = c1.symbol_at(i)
        s2 = c2.symbol_at(i)
        if s1 is not None and s2 is not None and s1 != s2:
            return []
        template.append(s1 if s1 is not None else s2)
    holes = [i for i, s in enumerate(template) if s is None]
    if not holes:
        return [Cylinder(lo, tuple(template))]
    out = []
    for fill in iter_product(range(alphabet), repeat=len(holes)):
        word = list(template)
        for pos, sym in zip(holes, fill):
            word[pos] = sym
        out.append(Cylinder(lo, tuple(word)))
    return out


def _arc_intersect(a: Arc, b: Arc) -> list[Arc]:
    """Intersection of two circular open arcs: zero, one or two arcs.

    Works in coordinates rotated so `a` starts at 0; the only excluded
    points are genuine endpoints of a or b, so wrap arcs keep the point 0
    when both operands contain it.
    """
    la = a.length
    lb = b.length
    d = (b.lo - a.lo) % 1
    pieces = []
    if d < la:
        pieces.append((d, min(la, d + lb)))
    if d + lb > 1:
        end = min(la, d + lb - 1)
        if end > 0:
            pieces.append((Fraction(0), end))
    return [Arc((a.lo + s) % 1, (a.lo + e) % 1) for s, e in pieces if e > s]


def union(a, b):
    if a.space != b.space:
        raise SpaceMismatchError(f"cannot union over {a.space} and {b.space}")
    if isinstance(a, CylinderSet):
        return cylinder_set(a.space, a.components + b.components)
    if isinstance(a, ArcSet):
        if a.is_full or b.is_full:
            return full_circle_set(a.space)
        return arc_set(a.space, a.components + b.components)
    if isinstance(a, FiniteSubset):
        return FiniteSubset(a.space, a.members | b.members)
    raise TypeError(f"union not defined for {a!r}")


def image(m, a):
    if isinstance(m, ShiftPower):
        if not isinstance(a, CylinderSet):
            raise SpaceMismatchError("shift power acts on cylinder sets")
        moved = [Cylinder(c.window_lo - m.exponent, c.word) for c in a.components]
        return cylinder_set(a.space, moved)
    if isinstance(m, CirclePower):
        if not isinstance(a, ArcSet) or a.space.base != m.base:
            raise SpaceMismatchError("circle power acts on arc sets with matching base")
        return _circle_image(m, a)
    if isinstance(m, FiniteFunc):
        if not isinstance(a, FiniteSubset) or len(m.table) != a.space.size:
            raise SpaceMismatchError("table size must match finite space")
        mask = 0
        for i in a.elements:
            mask |= 1 << m.table[i]
        return FiniteSubset(a.space, mask)
    if isinstance(m, TupleMap):
        if not isinstance(a, BoxSet) or len(m.parts) != len(a.factors):
            raise SpaceMismatchError("tuple map acts on boxes of matching arity")
        return BoxSet(a.space, tuple(image(p, f) for p, f in zip(m.parts, a.factors)))
    raise TypeError(f"not a map descriptor: {m!r}")


def _circle_image(m: CirclePower, a: ArcSet) -> ArcSet:
    e = m.exponent
    if e == 0:
        return a
    if e >= 1:
        scale = m.base ** e
        if a.is_full:
            return full_circle_set(a.space)
        out = []
        for comp in a.components:
            if comp.length * scale >= 1:
                return full_circle_set(a.space)
            out.append(Arc((comp.lo * scale) % 1, (comp.hi * scale) % 1))
        return arc_set(a.space, out)
    shrink = m.base ** (-e)
    if a.is_full:
        return arc_set(a.space, [Arc(Fraction(0), Fraction(1, shrink))])
    out = []
    for comp in a.components:
        if comp.hi > comp.lo:
            out.append(Arc(comp.lo / shrink, comp.hi / shrink))
        else:
            # wrap arc: split at 0 on the fundamental domain, then scale;
            # the single point 0 in the true image is dropped (open sets
            # cannot witness it)
            out.append(Arc(comp.lo / shrink, Fraction(1, shrink)))
            if comp.hi > 0:
                out.append(Arc(Fraction(0), comp.hi / shrink))
    return arc_set(a.space, out)


def preimage(m, a):
    if isinstance(m, ShiftPower):
        return image(ShiftPower(-m.exponent), a)
    if isinstance(m, CirclePower):
        if not isinstance(a, ArcSet) or a.space.base != m.base:
            raise SpaceMismatchError("circle power acts on arc sets with matching base")
        return _circle_preimage(m, a)
    if isinstance(m, FiniteFunc):
        if not isinstance(a, FiniteSubset) or len(m.table) != a.space.size:
            raise SpaceMismatchError("table size must match finite space")
        mask = 0
        for i in range(a.space.size):
            if a.members >> m.table[i] & 1:
                mask |= 1 << i
        return FiniteSubset(a.space, mask)
    if isinstance(m, TupleMap):
        return BoxSet(a.space, tuple(preimage(p, f) for p, f in zip(m.parts, a.factors)))
    raise TypeError(f"not a map descriptor: {m!r}")


def _circle_preimage(m: CirclePower, a: ArcSet) -> ArcSet:
    e = m.exponent
    if e == 0:
        return a
    if a.is_full:
        return full_circle_set(a.space)
    if e >= 1:
        scale = m.base ** e
        out = []
        for comp in a.components:
            ln = comp.length
            for k in range(scale):
                start = (comp.lo + k) / scale
                out.append(Arc(start % 1, (start + ln / scale) % 1))
        return arc_set(a.space, out)
    shrink = m.base ** (-e)
    window = arc_set(a.space, [Arc(Fraction(0), Fraction(1, shrink))])
    reachable = intersect(a, window)
    out = [Arc(comp.lo * shrink, (comp.hi * shrink) % 1) for comp in reachable.components]
    return arc_set(a.space, out)


def subbasis(space, resolution: int = 1) -> list:
    """Finite test family standing in for "every nonempty open set".

    Shift: all cylinders with window inside [-resolution, resolution].
    Circle: the `resolution` arcs (i/q, (i+1)/q).  Finite: all nonempty
    subsets.  Product: boxes of factor sub-bases.
    """
    if resolution < 0:
        raise ValueError("resolution must be >= 0")
    if isinstance(space, ShiftSpace):
        out = []
        r = resolution
        for lo in range(-r, r + 1):
            for hi in range(lo, r + 1):
                for word in iter_product(range(space.alphabet), repeat=hi - lo + 1):
                    out.append(cylinder_set(space, [Cylinder(lo, word)]))
        return out
    if isinstance(space, CircleSpace):
        q = max(resolution, 1)
        return [
            arc_set(space, [Arc(Fraction(i, q), Fraction(i + 1, q) % 1)])
            for i in range(q)
        ]
    if isinstance(space, FiniteSpace):
        return [FiniteSubset(space, mask) for mask in range(1, 1 << space.size)]
    if isinstance(space, ProductSpace):
        factor_bases = [subbasis(f, resolution) for f in space.factors]
        return [BoxSet(space, combo) for combo in iter_product(*factor_bases)]
    raise TypeError(f"not a space: {space!r}")


# ---------------------------------------------------------------------------
# points (exact membership oracle used by tests and orbits)


@dataclass(frozen=True)
class ShiftPoint:
    """Bi-infinite word with eventually periodic tails.

    value(i) reads core[i - core_lo] inside the core window; to the left
    the `left` tuple repeats reading outward (x[core_lo-1-k] = left[k % L]),
    to the right `right` repeats forward.
    """

    core: tuple[int, ...]
    core_lo: int = 0
    left: tuple[int, ...] = (0,)
    right: tuple[int, ...] = (0,)

    def value(self, i: int) -> int:
        if self.core and self.core_lo <= i < self.core_lo + len(self.core):
            return self.core[i - self.core_lo]
        if i < self.core_lo:
            return self.left[(self.core_lo - 1 - i) % len(self.left)]
        return self.right[(i - self.core_lo - len(self.core)) % len(self.right)]

    def shifted(self, e: int) -> ShiftPoint:
        """The image under shift^e (origin marker moves right e times)."""
        return ShiftPoint(self.core, self.core_lo - e, self.left, self.right)


def point_in(open_set, point) -> bool:
    if isinstance(open_set, CylinderSet):
        return any(
            all(point.value(i) == c.symbol_at(i) for i in range(c.window_lo, c.window_hi + 1))
            for c in open_set.components
        )
    if isinstance(open_set, ArcSet):
        if open_set.is_full:
            return True
        x = Fraction(point) % 1
        return any(0 < (x - a.lo) % 1 < a.length for a in open_set.components)
    if isinstance(open_set, FiniteSubset):
        return bool(open_set.members >> point & 1)
    if isinstance(open_set, BoxSet):
        return all(point_in(f, p) for f, p in zip(open_set.factors, point))
    raise TypeError(f"not an open set: {open_set!r}")


def apply_point(m, point):
    """Pointwise action of a map descriptor (exact)."""
    if isinstance(m, ShiftPower):
        return point.shifted(m.exponent)
    if isinstance(m, CirclePower):
        x = Fraction(point)
        if m.exponent >= 0:
            return (x * m.base ** m.exponent) % 1
        return (x % 1) / m.base ** (-m.exponent)
    if isinstance(m, FiniteFunc):
        return m.table[point]
    if isinstance(m, TupleMap):
        return tuple(apply_point(p, x) for p, x in zip(m.parts, point))
    raise TypeError(f"not a map descriptor: {m!r}")
