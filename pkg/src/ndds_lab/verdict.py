"""Three-valued decision results.

Every decider whose defining condition quantifies over infinitely many
objects (all open sets, all vectors, all times) reports one of three
outcomes: a proof scoped to the checked sub-basis, a refutation with a
concrete witness, or an honest "unknown up to this bound".
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

PROVEN = "PROVEN"
REFUTED = "REFUTED"
UNKNOWN = "UNKNOWN"


@dataclass(frozen=True)
class Verdict:
    kind: str
    witness: Any = None
    bound: Any = None
    resolution: int | None = None

    def __post_init__(self):
        if self.kind not in (PROVEN, REFUTED, UNKNOWN):
            raise ValueError(f"bad verdict kind {self.kind!r}")
        if self.kind == REFUTED and self.witness is None:
            raise ValueError("a refutation must carry a witness")

    @property
    def is_proven(self) -> bool:
        return self.kind == PROVEN

    @property
    def is_refuted(self) -> bool:
        return self.kind == REFUTED

    @property
    def is_unknown(self) -> bool:
        return self.kind == UNKNOWN

    @property
    def passed(self) -> bool:
        """True when nothing was refuted (proven or ran out of bound)."""
        return self.kind != REFUTED

    def __str__(self) -> str:
        if self.kind == PROVEN:
            scope = f"@res={self.resolution}" if self.resolution is not None else ""
            return f"PROVEN{scope}"
        if self.kind == REFUTED:
            return f"REFUTED witness={render_witness(self.witness)}"
        return f"UNKNOWN bound={render_witness(self.bound)}"


def proven(resolution: int | None = None) -> Verdict:
    return Verdict(PROVEN, resolution=resolution)


def refuted(witness, resolution: int | None = None, bound=None) -> Verdict:
    return Verdict(REFUTED, witness=witness, bound=bound, resolution=resolution)


def unknown(bound, resolution: int | None = None) -> Verdict:
    return Verdict(UNKNOWN, bound=bound, resolution=resolution)


def render_witness(obj) -> str:
    """Stable, compact textual form for witnesses and bounds."""
    if obj is None:
        return "-"
    if isinstance(obj, (list, tuple)):
        return "(" + ",".join(render_witness(x) for x in obj) + ")"
    if isinstance(obj, dict):
        items = ",".join(f"{k}={render_witness(v)}" for k, v in sorted(obj.items()))
        return "{" + items + "}"
    return str(obj)
