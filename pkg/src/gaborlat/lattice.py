"""Integer machinery for Gabor systems on periodic subsets of the integers.

Everything here is exact integer arithmetic except the two phase matrices
returned by :func:`shift_unitaries`.  Indices are 0-based throughout: windows
``l`` in ``range(L)``, channels ``r`` in ``range(R)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np


class GeometryError(ValueError):
    """Invalid lattice parameters or an incompatible periodic set."""


@dataclass(frozen=True)
class GaborGeometry:
    """Parameters ``(L, M, N, R)`` together with the reduced ratio ``N/M = p/q``.

    ``d = M/q = N/p`` is the length of the fundamental ``j``-range used by the
    Zak-domain criteria.
    """

    L: int
    M: int
    N: int
    R: int
    p: int
    q: int
    d: int

    def __post_init__(self):
        for name in ("L", "M", "N", "R", "p", "q", "d"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or value < 1:
                raise GeometryError(f"{name} must be a positive integer, got {value!r}")
        if math.gcd(self.p, self.q) != 1 or self.N * self.q != self.M * self.p:
            raise GeometryError(f"p={self.p}, q={self.q} is not N/M={self.N}/{self.M} in lowest terms")
        if self.d * self.q != self.M or self.d * self.p != self.N:
            raise GeometryError(f"d={self.d} does not satisfy d = M/q = N/p")

    @property
    def pM(self) -> int:
        """Zak period ``pM = qN``."""
        return self.p * self.M

    def with_windows(self, L: int) -> "GaborGeometry":
        return reduce_geometry(L, self.M, self.N, self.R)

    def to_dict(self) -> dict:
        return {"L": self.L, "M": self.M, "N": self.N, "R": self.R, "p": self.p, "q": self.q, "d": self.d}


def reduce_geometry(L: int, M: int, N: int, R: int) -> GaborGeometry:
    """Build a :class:`GaborGeometry`, reducing ``N/M`` to lowest terms."""
    for name, value in (("L", L), ("M", M), ("N", N), ("R", R)):
        if not isinstance(value, (int, np.integer)) or isinstance(value, bool) or value < 1:
            raise GeometryError(f"{name} must be a positive integer, got {value!r}")
    g = math.gcd(N, M)
    p, q = N // g, M // g
    return GaborGeometry(L=int(L), M=int(M), N=int(N), R=int(R), p=p, q=q, d=M // q)


@dataclass(frozen=True)
class PeriodicSet:
    """A periodic subset of the integers, ``{residues} + period * Z``.

    Residues are canonicalized on construction (reduced, sorted, deduplicated).
    """

    period: int
    residues: tuple[int, ...]

    def __post_init__(self):
        if not isinstance(self.period, (int, np.integer)) or self.period < 1:
            raise GeometryError(f"period must be a positive integer, got {self.period!r}")
        canon = tuple(sorted({int(r) % self.period for r in self.residues}))
        object.__setattr__(self, "period", int(self.period))
        object.__setattr__(self, "residues", canon)

    @classmethod
    def full(cls) -> "PeriodicSet":
        """The whole integer line."""
        return cls(1, (0,))

    def __contains__(self, j) -> bool:
        return (int(j) % self.period) in self._lookup

    @property
    def _lookup(self) -> frozenset:
        # frozen dataclass: cache by hand
        cached = self.__dict__.get("_lookup_cache")
        if cached is None:
            cached = frozenset(self.residues)
            object.__setattr__(self, "_lookup_cache", cached)
        return cached

    def contains_array(self, idx) -> np.ndarray:
        idx = np.asarray(idx, dtype=np.int64)
        mask = np.zeros(self.period, dtype=bool)
        mask[list(self.residues)] = True
        return mask[np.mod(idx, self.period)]

    def is_empty(self) -> bool:
        return not self.residues

    def at_period(self, K: int) -> "PeriodicSet":
        """Re-express the same set at period ``K`` (a multiple of the current one)."""
        if K % self.period:
            raise GeometryError(f"period {K} is not a multiple of {self.period}")
        return PeriodicSet(K, tuple(j for j in range(K) if j in self))

    def is_periodic_with(self, N: int) -> bool:
        """True iff ``S + N = S``."""
        return all(((r + N) % self.period) in self._lookup for r in self.residues)

    def members(self, start: int, stop: int) -> list[int]:
        """Elements of the set in ``[start, stop)`` in increasing order."""
        return [j for j in range(start, stop) if j in self]

    def card_in(self, K: int) -> int:
        """``card(S ∩ {0, ..., K-1})``."""
        return len(self.members(0, K))

    def to_json(self) -> dict:
        return {"period": self.period, "residues": list(self.residues)}

    @classmethod
    def from_json(cls, obj: dict) -> "PeriodicSet":
        try:
            period = obj["period"]
            residues = obj["residues"]
        except (KeyError, TypeError) as exc:
            raise GeometryError(f"malformed periodic set: {obj!r}") from exc
        if not isinstance(period, int) or isinstance(period, bool):
            raise GeometryError(f"period must be an integer, got {period!r}")
        if not all(isinstance(r, int) and not isinstance(r, bool) for r in residues):
            raise GeometryError(f"residues must be integers, got {residues!r}")
        return cls(period, tuple(residues))


def check_support_set(S: PeriodicSet, geo: GaborGeometry) -> None:
    """Raise if ``S`` is empty or not ``N``-periodic."""
    if S.is_empty():
        raise GeometryError("the support set must be nonempty")
    if not S.is_periodic_with(geo.N):
        raise GeometryError(f"{S} is not {geo.N}Z-periodic")


@dataclass(frozen=True)
class IndexProjection:
    """Active column indices at a given ``j``.

    ``kset`` are the ``k < p`` with ``j + kM`` in the set; ``lambda_`` is the
    channel-replicated version ``{k + r p}`` indexing coordinates of ``C^{pR}``.
    """

    geometry: GaborGeometry
    j: int
    kset: tuple[int, ...]
    lambda_: tuple[int, ...]

    def __post_init__(self):
        assert len(self.lambda_) == self.geometry.R * len(self.kset)

    def matrix(self) -> np.ndarray:
        """``I_R ⊗ K(j)`` as a dense ``pR × pR`` matrix."""
        return kron_identity(self.geometry.R, projection_matrix(self.kset, self.geometry.p))


def k_set(S: PeriodicSet, geo: GaborGeometry, j: int) -> tuple[int, ...]:
    return tuple(k for k in range(geo.p) if (j + k * geo.M) in S)


def lambda_set(kset: Iterable[int], p: int, R: int) -> tuple[int, ...]:
    return tuple(sorted(k + r * p for r in range(R) for k in kset))


def index_projection(S: PeriodicSet, geo: GaborGeometry, j: int) -> IndexProjection:
    ks = k_set(S, geo, j)
    return IndexProjection(geo, int(j), ks, lambda_set(ks, geo.p, geo.R))


def projection_matrix(kset: Iterable[int], p: int) -> np.ndarray:
    """Diagonal 0/1 matrix selecting ``kset`` inside ``range(p)``."""
    diag = np.zeros(p)
    for k in kset:
        if not 0 <= k < p:
            raise ValueError(f"index {k} outside range({p})")
        diag[k] = 1.0
    return np.diag(diag)


def kron_identity(K: int, A) -> np.ndarray:
    """Block-diagonal ``I_K ⊗ A``."""
    A = np.atleast_2d(np.asarray(A))
    if A.size == 0:
        raise ValueError("kron_identity needs a non-empty matrix")
    return np.kron(np.eye(K, dtype=A.dtype), A)


def decompose_ell(geo: GaborGeometry, ell: int) -> tuple[int, int, int]:
    """The unique ``(k, r, m)`` in ``range(p) x range(q) x Z`` with ``ell = k q + (m q - r) p``.

    Exhaustive over ``range(p) x range(q)``; the remainder ``ell - k q + r p``
    must then be a multiple of ``p q``.
    """
    p, q = geo.p, geo.q
    for k in range(p):
        for r in range(q):
            rest = ell - k * q + r * p
            if rest % (p * q) == 0:
                return k, r, rest // (p * q)
    raise AssertionError(f"no decomposition of {ell} for coprime p={p}, q={q}")


def shift_unitaries(geo: GaborGeometry, ell: int, theta: float) -> tuple[np.ndarray, np.ndarray]:
    """Phase-permutation matrices ``(A_ell(theta), C_ell(theta))`` of sizes ``p`` and ``q``.

    They relate Zak matrices at ``j`` and ``j + d*ell``; see
    :func:`gaborlat.zak.shift_relation_check`.
    """
    p, q = geo.p, geo.q
    k_l, r_l, _ = decompose_ell(geo, ell)
    A = np.eye(p, dtype=complex)
    if k_l:
        A = np.zeros((p, p), dtype=complex)
        A[:k_l, p - k_l:] = np.exp(-2j * np.pi * theta) * np.eye(k_l)
        A[k_l:, :p - k_l] = np.eye(p - k_l)
    C = np.eye(q, dtype=complex)
    if r_l:
        C = np.zeros((q, q), dtype=complex)
        C[:q - r_l, r_l:] = np.eye(q - r_l)
        C[q - r_l:, :r_l] = np.exp(2j * np.pi * theta) * np.eye(r_l)
    return A, C


def congruent_to_subset_mod(E: Iterable[int], M: int) -> bool:
    """True iff no two elements of ``E`` are congruent mod ``M``."""
    E = list(E)
    return len({e % M for e in E}) == len(set(E))


def nz_congruent_to(E: Iterable[int], S: PeriodicSet, N: int) -> bool:
    """True iff ``e -> e mod N`` maps ``E`` bijectively onto ``S ∩ {0..N-1}``."""
    E = list(E)
    if any(e not in S for e in E):
        return False
    residues = [e % N for e in E]
    return len(set(residues)) == len(residues) and set(residues) == set(S.members(0, N))
