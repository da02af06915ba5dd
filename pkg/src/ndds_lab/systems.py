"""Finitely presented time-varying systems and their composition engine.

A system is a phase space plus a schedule of generator maps; combinators
build block-iterates, products, rate-vector products and towers on top.
`composed(sys, n)` returns an exact symbolic description of the
composition of the first n step maps; `ep_compose` packages the whole
sequence n -> composed(sys, n) as a finite transient plus a periodic
(or periodically drifting) tail, which is what turns hitting-time sets
into eventually periodic sets downstream.

For exponent schedules the composition calculus is formal: the n-step
map is the base map raised to the running exponent sum.  Orbits, by
contrast, apply the literal step maps pointwise; on the circle the two
disagree beyond the fundamental domain because the contracting step is
taken literally on [0,1).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import gcd, lcm

from .spaces import (
    CirclePower,
    CircleSpace,
    FiniteFunc,
    FiniteSpace,
    ProductSpace,
    ShiftPower,
    ShiftSpace,
    TupleMap,
    apply_point,
)


class UnsupportedSystemError(ValueError):
    """The request needs structure this system family does not have."""


# ---------------------------------------------------------------------------
# schedules


@dataclass(frozen=True)
class PeriodicExponents:
    """Step n applies base^exps[(n-1) mod q]; base is the shift or t -> p*t."""

    exps: tuple[int, ...]

    def __post_init__(self):
        if not self.exps:
            raise ValueError("exponent schedule must be nonempty")


@dataclass(frozen=True)
class PeriodicTables:
    tables: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if not self.tables:
            raise ValueError("table schedule must be nonempty")


@dataclass(frozen=True)
class PairGrowing:
    """Exponent +m at step 2m-1 and -m at step 2m."""


# ---------------------------------------------------------------------------
# system descriptors


@dataclass(frozen=True)
class Base:
    space: object
    schedule: object

    def __post_init__(self):
        sched, space = self.schedule, self.space
        if isinstance(sched, PeriodicTables):
            if not isinstance(space, FiniteSpace):
                raise ValueError("table schedules live on finite spaces")
            for t in sched.tables:
                if len(t) != space.size or any(not (0 <= v < space.size) for v in t):
                    raise ValueError("table must be total on the space")
        elif isinstance(sched, (PeriodicExponents, PairGrowing)):
            if not isinstance(space, (ShiftSpace, CircleSpace)):
                raise ValueError("exponent schedules live on shift or circle spaces")
        else:
            raise TypeError(f"not a schedule: {sched!r}")


@dataclass(frozen=True)
class Iterate:
    inner: object
    block: int

    def __post_init__(self):
        if self.block < 1:
            raise ValueError("iterate block length must be >= 1")


@dataclass(frozen=True)
class Product:
    factors: tuple

    def __post_init__(self):
        if not self.factors:
            raise ValueError("product of no systems")


@dataclass(frozen=True)
class VectorProduct:
    inner: object
    rates: tuple[int, ...]

    def __post_init__(self):
        if not self.rates or any(a < 1 for a in self.rates):
            raise ValueError("rate vector components must be positive")


@dataclass(frozen=True)
class Tower:
    inner: object
    height: int

    def __post_init__(self):
        if self.height < 1:
            raise ValueError("tower height must be >= 1")


def tower(sys, height: int) -> Tower:
    """System on inner-space x {0..height-1}: each step advances the counter,
    and one inner step fires each time the counter wraps."""
    return Tower(sys, height)


def system_space(sys):
    if isinstance(sys, Base):
        return sys.space
    if isinstance(sys, Iterate):
        return system_space(sys.inner)
    if isinstance(sys, Product):
        return ProductSpace(tuple(system_space(f) for f in sys.factors))
    if isinstance(sys, VectorProduct):
        inner = system_space(sys.inner)
        return ProductSpace((inner,) * len(sys.rates))
    if isinstance(sys, Tower):
        return ProductSpace((system_space(sys.inner), FiniteSpace(sys.height)))
    raise TypeError(f"not a system: {sys!r}")


# ---------------------------------------------------------------------------
# composed forms


@dataclass(frozen=True)
class ExponentForm:
    exponent: int

    def __str__(self):
        return f"base^{self.exponent}"


@dataclass(frozen=True)
class TableForm:
    table: tuple[int, ...]

    def __str__(self):
        return "table(%s)" % ",".join(str(v) for v in self.table)


@dataclass(frozen=True)
class TupleForm:
    parts: tuple

    def __str__(self):
        return "(" + " x ".join(str(p) for p in self.parts) + ")"


@dataclass(frozen=True)
class TowerForm:
    """Floor composition after floor(n/height) inner steps, counter advanced
    by n mod height (as seen from counter 0)."""

    inner: object
    phase: int
    height: int

    def __str__(self):
        return f"tower[{self.inner}; +{self.phase} mod {self.height}]"


def compose_tables(outer: tuple[int, ...], inner: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(outer[inner[i]] for i in range(len(inner)))


def identity_table(n: int) -> tuple[int, ...]:
    return tuple(range(n))


def table_power(t: tuple[int, ...], k: int) -> tuple[int, ...]:
    result = identity_table(len(t))
    base = t
    while k:
        if k & 1:
            result = compose_tables(base, result)
        base = compose_tables(base, base)
        k >>= 1
    return result


@lru_cache(maxsize=None)
def composed(sys, n: int):
    """Exact form of the composition of the first n step maps of sys."""
    if n < 0:
        raise ValueError("composition length must be >= 0")
    if isinstance(sys, Base):
        sched = sys.schedule
        if isinstance(sched, PeriodicExponents):
            return ExponentForm(_exponent_sum(sched.exps, n))
        if isinstance(sched, PairGrowing):
            return ExponentForm((n + 1) // 2 if n % 2 else 0)
        q = len(sched.tables)
        k, r = divmod(n, q)
        # n = kq + r: the full cycle k times, then the r-step remainder on top
        acc = identity_table(sys.space.size)
        if k:
            cycle = identity_table(sys.space.size)
            for t in sched.tables:
                cycle = compose_tables(t, cycle)
            acc = table_power(cycle, k)
        for i in range(r):
            acc = compose_tables(sched.tables[i], acc)
        return TableForm(acc)
    if isinstance(sys, Iterate):
        return composed(sys.inner, sys.block * n)
    if isinstance(sys, Product):
        return TupleForm(tuple(composed(f, n) for f in sys.factors))
    if isinstance(sys, VectorProduct):
        return TupleForm(tuple(composed(sys.inner, a * n) for a in sys.rates))
    if isinstance(sys, Tower):
        return TowerForm(composed(sys.inner, n // sys.height), n % sys.height, sys.height)
    raise TypeError(f"not a system: {sys!r}")


def _exponent_sum(exps: tuple[int, ...], n: int) -> int:
    q = len(exps)
    return (n // q) * sum(exps) + sum(exps[: n % q])


def form_to_map(space, form):
    """Concrete map descriptor acting on the space's open sets."""
    if isinstance(form, ExponentForm):
        if isinstance(space, ShiftSpace):
            return ShiftPower(form.exponent)
        if isinstance(space, CircleSpace):
            return CirclePower(form.exponent, space.base)
        raise UnsupportedSystemError("exponent form over a non shift/circle space")
    if isinstance(form, TableForm):
        return FiniteFunc(form.table)
    if isinstance(form, TupleForm):
        return TupleMap(tuple(form_to_map(f, p) for f, p in zip(space.factors, form.parts)))
    raise UnsupportedSystemError(f"no single map descriptor for {form!r}")


# ---------------------------------------------------------------------------
# eventually periodic presentation of n -> composed(sys, n)


@dataclass(frozen=True)
class EPCompose:
    preperiod: int
    period: int
    forms: tuple  # composed forms for n = 1 .. preperiod+period
    drifts: tuple | None  # per-residue (n mod period) form delta; None = exact repeat

    def form_at(self, n: int):
        if n < 1:
            raise ValueError("forms are presented for n >= 1")
        t, q = self.preperiod, self.period
        if n <= t + q:
            return self.forms[n - 1]
        rep = t + 1 + ((n - t - 1) % q)
        steps = (n - rep) // q
        base = self.forms[rep - 1]
        if self.drifts is None:
            return base
        return _shift_form(base, self.drifts[n % q], steps)


def _form_delta(later, earlier):
    """later - earlier as a drift value; raises if shapes disagree."""
    if isinstance(later, ExponentForm) and isinstance(earlier, ExponentForm):
        return later.exponent - earlier.exponent
    if isinstance(later, TableForm) and isinstance(earlier, TableForm):
        if later == earlier:
            return 0
        raise UnsupportedSystemError("table forms drift without repeating")
    if isinstance(later, TupleForm) and isinstance(earlier, TupleForm):
        return tuple(_form_delta(a, b) for a, b in zip(later.parts, earlier.parts))
    raise UnsupportedSystemError(f"no drift between {earlier!r} and {later!r}")


def _shift_form(form, delta, steps: int):
    if isinstance(form, ExponentForm):
        return ExponentForm(form.exponent + delta * steps)
    if isinstance(form, TableForm):
        return form
    if isinstance(form, TupleForm):
        return TupleForm(tuple(_shift_form(f, d, steps) for f, d in zip(form.parts, delta)))
    raise UnsupportedSystemError(f"cannot drift {form!r}")


def _zero_delta(delta) -> bool:
    if isinstance(delta, tuple):
        return all(_zero_delta(d) for d in delta)
    return delta == 0


def _ep_bounds(sys) -> tuple[int, int]:
    """A valid (not necessarily minimal) preperiod/period pair for sys."""
    if isinstance(sys, Base):
        sched = sys.schedule
        if isinstance(sched, PeriodicExponents):
            return 0, len(sched.exps)
        if isinstance(sched, PairGrowing):
            return 0, 2
        seen: dict = {}
        q = len(sched.tables)
        n = 1
        while True:
            state = (composed(sys, n), n % q)
            if state in seen:
                return seen[state] - 1, n - seen[state]
            seen[state] = n
            n += 1
    if isinstance(sys, Iterate):
        t, q = _ep_bounds(sys.inner)
        return -(-t // sys.block), q
    if isinstance(sys, Product):
        parts = [_ep_bounds(f) for f in sys.factors]
        return max(t for t, _ in parts), lcm(*(q for _, q in parts))
    if isinstance(sys, VectorProduct):
        t, q = _ep_bounds(sys.inner)
        return max(-(-t // a) for a in sys.rates), q
    if isinstance(sys, Tower):
        raise UnsupportedSystemError(
            "tower compositions have no eventually periodic form presentation"
        )
    raise TypeError(f"not a system: {sys!r}")


@lru_cache(maxsize=None)
def ep_compose(sys) -> EPCompose:
    """Minimal eventually periodic presentation of n -> composed(sys, n).

    Candidate periods are the divisors of a structurally valid bound; a
    divisor d is accepted when the drift form(n+d) - form(n) depends only
    on n mod d across a two-period verification window, which pins the
    relation for every later n by induction on whole periods.
    """
    t_bound, q_bound = _ep_bounds(sys)
    form = lambda n: composed(sys, n)

    best = None
    for d in range(1, q_bound + 1):
        if q_bound % d:
            continue
        try:
            deltas = {}
            ok = True
            for n in range(t_bound + 1, t_bound + 2 * q_bound + 1):
                delta = _form_delta(form(n + d), form(n))
                r = n % d
                if r in deltas and deltas[r] != delta:
                    ok = False
                    break
                deltas[r] = delta
            if ok:
                best = (d, tuple(deltas[r] for r in range(d)))
                break
        except UnsupportedSystemError:
            continue
    if best is None:
        raise UnsupportedSystemError("no eventually periodic presentation found")
    period, drifts = best

    preperiod = t_bound
    while preperiod > 0:
        try:
            delta = _form_delta(form(preperiod + period), form(preperiod))
        except UnsupportedSystemError:
            break
        if delta != drifts[preperiod % period]:
            break
        preperiod -= 1

    forms = tuple(form(n) for n in range(1, preperiod + period + 1))
    if all(_zero_delta(d) for d in drifts):
        drifts_out = None
    else:
        drifts_out = drifts
    return EPCompose(preperiod, period, forms, drifts_out)


# ---------------------------------------------------------------------------
# pointwise steps and orbits


def generator_map(base: Base, n: int):
    """The n-th step map of a base system as a concrete map descriptor."""
    sched = base.schedule
    if isinstance(sched, PeriodicExponents):
        e = sched.exps[(n - 1) % len(sched.exps)]
        return form_to_map(base.space, ExponentForm(e))
    if isinstance(sched, PairGrowing):
        e = (n + 1) // 2 if n % 2 else -(n // 2)
        return form_to_map(base.space, ExponentForm(e))
    return FiniteFunc(sched.tables[(n - 1) % len(sched.tables)])


def step(sys, n: int, point):
    """Apply the n-th step map of sys to a point, literally."""
    if n < 1:
        raise ValueError("steps are numbered from 1")
    if isinstance(sys, Base):
        return apply_point(generator_map(sys, n), point)
    if isinstance(sys, Iterate):
        k = sys.block
        for i in range(k * (n - 1) + 1, k * n + 1):
            point = step(sys.inner, i, point)
        return point
    if isinstance(sys, Product):
        return tuple(step(f, n, x) for f, x in zip(sys.factors, point))
    if isinstance(sys, VectorProduct):
        out = []
        for a, x in zip(sys.rates, point):
            for i in range(a * (n - 1) + 1, a * n + 1):
                x = step(sys.inner, i, x)
            out.append(x)
        return tuple(out)
    if isinstance(sys, Tower):
        x, counter = point
        if counter < sys.height - 1:
            return (x, counter + 1)
        fire_index = -(-n // sys.height)  # ceil: inner steps fire in order
        return (step(sys.inner, fire_index, x), 0)
    raise TypeError(f"not a system: {sys!r}")


def orbit(sys, start, steps: int) -> list:
    """[start, f(start), ..., f^steps(start)] by literal pointwise stepping."""
    if steps < 0:
        raise ValueError("steps must be >= 0")
    points = [start]
    current = start
    for n in range(1, steps + 1):
        current = step(sys, n, current)
        points.append(current)
    return points


# ---------------------------------------------------------------------------
# textual form (shared by the CLI grammar and report dumps)


def render_system(sys) -> str:
    if isinstance(sys, Base):
        sched = sys.schedule
        if isinstance(sched, PeriodicExponents):
            return f"{sys.space} exps=({','.join(str(e) for e in sched.exps)})"
        if isinstance(sched, PairGrowing):
            return f"{sys.space} pairgrowing"
        tables = ";".join("(" + ",".join(str(v) for v in t) + ")" for t in sched.tables)
        return f"{sys.space} tables=[{tables}]"
    if isinstance(sys, Iterate):
        return f"iterate({render_system(sys.inner)},{sys.block})"
    if isinstance(sys, Product):
        return "prod(" + " , ".join(render_system(f) for f in sys.factors) + ")"
    if isinstance(sys, VectorProduct):
        rates = ",".join(str(a) for a in sys.rates)
        return f"vprod({render_system(sys.inner)};{rates})"
    if isinstance(sys, Tower):
        return f"tower({render_system(sys.inner)},{sys.height})"
    raise TypeError(f"not a system: {sys!r}")
