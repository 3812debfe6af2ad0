"""Characteristic-function windows forming a tight multi-window Gabor frame.

For each ``j < d`` the pairs ``(k, r)`` with ``k`` in ``K_j`` and ``r < R`` are
listed ``k``-major and packed ``q`` at a time into consecutive windows; the
``t``-th pair in a window gets row ``s = t``.  Pair ``(k, r)`` placed in
window ``l`` with row ``s`` contributes the point ``j + kM + sN`` to the
channel-``r`` support of ``g_l``.  When ``R`` divides ``q`` this is the block
partition of ``K_j`` into runs of ``q/R`` elements with ``s = iR + r``.

Each window's channel ``r`` is the indicator of its point set, which gives an
``M``-tight frame.  Dividing by ``sqrt(M)`` gives a Parseval frame.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Sequence

from .admissibility import frame_admissible
from .frames import frame_bounds, gram_field, strong_disjointness
from .lattice import (
    GaborGeometry,
    PeriodicSet,
    check_support_set,
    congruent_to_subset_mod,
    k_set,
    nz_congruent_to,
    reduce_geometry,
)
from .zak import SparseSequence, ThetaGrid


class NotAdmissible(ValueError):
    """``R |K_j| <= qL`` fails for some ``j``: no complete system exists."""


class UnsupportedChannelCount(ValueError):
    """``R > q``; rejected unless ``allow_wide=True``."""


@dataclass(frozen=True)
class Assignment:
    j: int
    l: int
    r: int
    k: int
    s: int

    def element(self, geo: GaborGeometry) -> int:
        return self.j + self.k * geo.M + self.s * geo.N


@dataclass(frozen=True)
class SynthesisPlan:
    geometry: GaborGeometry
    support: PeriodicSet
    assignments: tuple[Assignment, ...]
    sets: tuple[tuple[tuple[int, ...], ...], ...] = field(init=False)

    def __post_init__(self):
        geo = self.geometry
        sets = [[[] for _ in range(geo.R)] for _ in range(geo.L)]
        for a in self.assignments:
            sets[a.l][a.r].append(a.element(geo))
        object.__setattr__(self, "sets", tuple(tuple(tuple(sorted(E)) for E in row) for row in sets))

    def blocks(self, j: int, l: int, r: int | None = None) -> tuple[int, ...]:
        """The ``k`` values of ``K_j`` handled by window ``l`` (optionally one channel)."""
        return tuple(sorted({a.k for a in self.assignments if a.j == j and a.l == l and (r is None or a.r == r)}))

    def rows(self, j: int, l: int, r: int) -> tuple[int, ...]:
        return tuple(sorted(a.s for a in self.assignments if a.j == j and a.l == l and a.r == r))

    def check(self) -> list[str]:
        """Plan-level obligations; empty list when all hold."""
        geo = self.geometry
        problems = []
        used = defaultdict(list)
        for a in self.assignments:
            used[(a.j, a.l)].append(a.s)
        for (j, l), rows in used.items():
            if len(set(rows)) != len(rows) or len(rows) > geo.q:
                problems.append(f"rows repeat or overflow at j={j}, l={l}: {rows}")
        for l in range(geo.L):
            for r in range(geo.R):
                if not congruent_to_subset_mod(self.sets[l][r], geo.M):
                    problems.append(f"E^{{{l},{r}}} has two points congruent mod M")
        for r in range(geo.R):
            union = [e for l in range(geo.L) for e in self.sets[l][r]]
            if not nz_congruent_to(union, self.support, geo.N):
                problems.append(f"E^{r} is not NZ-congruent to S_N")
        return problems

    def to_json(self) -> dict:
        geo = self.geometry
        return {
            "geometry": geo.to_dict(),
            "support": self.support.to_json(),
            "assignments": [
                {"j": a.j, "l": a.l, "r": a.r, "k": a.k, "s": a.s, "element": a.element(geo)}
                for a in self.assignments
            ],
            "sets": [[list(E) for E in row] for row in self.sets],
        }


def plan(S: PeriodicSet, geo: GaborGeometry, allow_wide: bool = False) -> SynthesisPlan:
    check_support_set(S, geo)
    if not frame_admissible(S, geo.L, geo.M, geo.N, geo.R):
        raise NotAdmissible(
            f"R*card(K_j) <= q*L fails for L={geo.L}, q={geo.q}, R={geo.R}: "
            f"card(K_j) = {[len(k_set(S, geo, j)) for j in range(geo.d)]}"
        )
    if geo.R > geo.q and not allow_wide:
        raise UnsupportedChannelCount(f"R={geo.R} exceeds q={geo.q}")
    out = []
    for j in range(geo.d):
        pairs = [(k, r) for k in k_set(S, geo, j) for r in range(geo.R)]
        for t, (k, r) in enumerate(pairs):
            out.append(Assignment(j=j, l=t // geo.q, r=r, k=k, s=t % geo.q))
    result = SynthesisPlan(geo, S, tuple(out))
    problems = result.check()
    assert not problems, problems
    return result


def windows_from_plan(p: SynthesisPlan, normalize: bool = True) -> list[SparseSequence]:
    value = 1 / math.sqrt(p.geometry.M) if normalize else 1.0
    return [SparseSequence.indicator(row, value).with_support(p.support) for row in p.sets]


def synthesize(S: PeriodicSet, geo: GaborGeometry, normalize: bool = True,
               allow_wide: bool = False) -> list[SparseSequence]:
    """``L`` windows forming an ``M``-tight frame, or a Parseval frame when ``normalize``."""
    return windows_from_plan(plan(S, geo, allow_wide), normalize)


@dataclass
class SynthesisCheck:
    ok: bool
    failures: list[str]
    A: float
    B: float
    expected_bound: float


def _channel_family(family: Sequence[SparseSequence], r: int) -> list[SparseSequence]:
    return [SparseSequence(1, {(i, 0): v for (i, ch), v in w.entries.items() if ch == r}) for w in family]


def verify_synthesis(family: Sequence[SparseSequence], S: PeriodicSet, geo: GaborGeometry,
                     normalized: bool | None = None, grid: ThetaGrid | None = None,
                     tol: float = 1e-9) -> SynthesisCheck:
    """Check the four obligations of an indicator-window family.

    (a) each channel support ``E^{l,r}`` has no two points congruent mod ``M``;
    (b) per channel the union over windows is ``NZ``-congruent to ``S_N``;
    (c) the per-channel scalar families are mutually strongly disjoint;
    (d) the Zak frame bounds are ``A = B = M``, or ``1`` when normalized.

    ``normalized=None`` infers the scale from the common entry magnitude.
    """
    failures = []
    supports = [[w.support_indices(r) for r in range(geo.R)] for w in family]
    for l, row in enumerate(supports):
        for r, E in enumerate(row):
            if not congruent_to_subset_mod(E, geo.M):
                failures.append(f"(a) E^{{{l},{r}}} = {E} has points congruent mod {geo.M}")
    for r in range(geo.R):
        union = [e for row in supports for e in row[r]]
        if not nz_congruent_to(union, S, geo.N):
            failures.append(f"(b) channel {r} supports are not NZ-congruent to S_N")
    scalar = reduce_geometry(geo.L, geo.M, geo.N, 1)
    for r in range(geo.R):
        for r2 in range(r + 1, geo.R):
            if not strong_disjointness(_channel_family(family, r), _channel_family(family, r2), scalar, grid):
                failures.append(f"(c) channels {r} and {r2} are not strongly disjoint")
    if normalized is None:
        mags = {round(abs(v), 12) for w in family for v in w.entries.values()}
        normalized = mags == {round(1 / math.sqrt(geo.M), 12)}
    expected = 1.0 if normalized else float(geo.M)
    A, B, _ = frame_bounds(gram_field(family, S, geo, grid))
    if abs(A - expected) > tol or abs(B - expected) > tol:
        failures.append(f"(d) frame bounds ({A}, {B}) differ from {expected}")
    return SynthesisCheck(not failures, failures, A, B, expected)
