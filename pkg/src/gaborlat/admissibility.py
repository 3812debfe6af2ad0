"""Parameter-level existence tests; no windows involved."""

from __future__ import annotations

from dataclasses import dataclass

from .lattice import GaborGeometry, PeriodicSet, check_support_set, k_set, reduce_geometry


@dataclass(frozen=True)
class AdmissibilityReport:
    geometry: GaborGeometry
    k_cards: tuple[int, ...]
    card_S_N: int
    frame_admissible: bool
    basis_admissible: bool
    cardinality_necessary: bool
    min_windows: int

    def __post_init__(self):
        assert not self.basis_admissible or self.frame_admissible
        assert not self.frame_admissible or self.cardinality_necessary

    def to_json(self) -> dict:
        return {
            "geometry": self.geometry.to_dict(),
            "k_cards": list(self.k_cards),
            "card_S_N": self.card_S_N,
            "frame_admissible": self.frame_admissible,
            "basis_admissible": self.basis_admissible,
            "cardinality_necessary": self.cardinality_necessary,
            "min_windows": self.min_windows,
        }


def _cards(S: PeriodicSet, geo: GaborGeometry) -> list[int]:
    check_support_set(S, geo)
    return [len(k_set(S, geo, j)) for j in range(geo.d)]


def frame_admissible(S: PeriodicSet, L: int, M: int, N: int, R: int) -> bool:
    """Some ``L``-window system is complete / a frame / a Parseval frame iff ``R |K_j| <= qL`` for all ``j < d``."""
    geo = reduce_geometry(L, M, N, R)
    return all(R * c <= geo.q * L for c in _cards(S, geo))


def basis_admissible(S: PeriodicSet, L: int, M: int, N: int, R: int) -> bool:
    """Some ``L``-window system is a Riesz / orthonormal basis iff ``R |K_j| = qL`` for all ``j < d``."""
    geo = reduce_geometry(L, M, N, R)
    return all(R * c == geo.q * L for c in _cards(S, geo))


def cardinality_necessary(S: PeriodicSet, L: int, M: int, N: int, R: int) -> bool:
    """Necessary condition for any frame: ``R card(S ∩ [0, N)) <= LM``."""
    return R * S.card_in(N) <= L * M


def min_windows(S: PeriodicSet, M: int, N: int, R: int) -> int:
    """Smallest ``L`` for which :func:`frame_admissible` holds."""
    geo = reduce_geometry(1, M, N, R)
    need = R * max(_cards(S, geo))
    return max(1, -(-need // geo.q))


def admissibility_report(S: PeriodicSet, L: int, M: int, N: int, R: int) -> AdmissibilityReport:
    geo = reduce_geometry(L, M, N, R)
    cards = _cards(S, geo)
    return AdmissibilityReport(
        geometry=geo,
        k_cards=tuple(cards),
        card_S_N=S.card_in(N),
        frame_admissible=frame_admissible(S, L, M, N, R),
        basis_admissible=basis_admissible(S, L, M, N, R),
        cardinality_necessary=cardinality_necessary(S, L, M, N, R),
        min_windows=min_windows(S, M, N, R),
    )
