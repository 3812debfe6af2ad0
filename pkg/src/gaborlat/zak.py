"""Finitely supported vector-valued sequences and their discrete Zak transforms.

All Zak transforms of finitely supported sequences are trigonometric
polynomials in ``theta``.  Functions accept a scalar ``theta`` or a 1-D array of
nodes; with an array the node axis comes first in the result.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .lattice import GaborGeometry, PeriodicSet, decompose_ell, kron_identity, shift_unitaries


class SupportError(ValueError):
    """A sequence has entries outside its declared support set."""


class GridTooCoarseError(ValueError):
    """The theta grid cannot resolve the trigonometric degrees involved."""


class GridTooCoarseWarning(UserWarning):
    pass


@dataclass(frozen=True)
class SparseSequence:
    """A finitely supported sequence ``Z -> C^R``.

    ``entries`` maps ``(index, channel)`` to a complex value; zero values are
    dropped on construction.
    """

    channels: int
    entries: Mapping[tuple[int, int], complex] = field(default_factory=dict)
    support: PeriodicSet | None = None

    def __post_init__(self):
        if self.channels < 1:
            raise ValueError("channels must be positive")
        clean = {}
        for (idx, ch), value in dict(self.entries).items():
            if not 0 <= ch < self.channels:
                raise ValueError(f"channel {ch} outside range({self.channels})")
            value = complex(value)
            if value != 0:
                clean[(int(idx), int(ch))] = value
        object.__setattr__(self, "entries", clean)
        if self.support is not None:
            bad = [idx for idx, _ in clean if idx not in self.support]
            if bad:
                raise SupportError(f"indices {sorted(set(bad))} lie outside the declared support")

    @classmethod
    def zero(cls, channels: int, support: PeriodicSet | None = None) -> "SparseSequence":
        return cls(channels, {}, support)

    @classmethod
    def spike(cls, index: int, channel: int, channels: int, value: complex = 1.0) -> "SparseSequence":
        return cls(channels, {(index, channel): value})

    @classmethod
    def indicator(cls, sets: Sequence[Iterable[int]], value: complex = 1.0) -> "SparseSequence":
        """``(value * chi_{E_0}, ..., value * chi_{E_{R-1}})``."""
        return cls(len(sets), {(i, r): value for r, E in enumerate(sets) for i in E})

    def __bool__(self) -> bool:
        return bool(self.entries)

    def norm_sq(self) -> float:
        return float(sum(abs(v) ** 2 for v in self.entries.values()))

    def norm(self) -> float:
        return math.sqrt(self.norm_sq())

    def channel(self, r: int) -> dict[int, complex]:
        return {idx: v for (idx, ch), v in self.entries.items() if ch == r}

    def channel_arrays(self, r: int) -> tuple[np.ndarray, np.ndarray]:
        items = sorted(self.channel(r).items())
        idx = np.array([i for i, _ in items], dtype=np.int64)
        vals = np.array([v for _, v in items], dtype=complex)
        return idx, vals

    def support_indices(self, r: int | None = None) -> list[int]:
        return sorted({idx for idx, ch in self.entries if r is None or ch == r})

    def bounds(self) -> tuple[int, int] | None:
        """``(min, max)`` stored index, or ``None`` for the zero sequence."""
        if not self.entries:
            return None
        idx = [i for i, _ in self.entries]
        return min(idx), max(idx)

    def scaled(self, c: complex) -> "SparseSequence":
        return SparseSequence(self.channels, {k: c * v for k, v in self.entries.items()}, self.support)

    def __add__(self, other: "SparseSequence") -> "SparseSequence":
        if other.channels != self.channels:
            raise ValueError("channel count mismatch")
        out = dict(self.entries)
        for k, v in other.entries.items():
            out[k] = out.get(k, 0) + v
        return SparseSequence(self.channels, out)

    def __sub__(self, other: "SparseSequence") -> "SparseSequence":
        return self + other.scaled(-1)

    def with_support(self, S: PeriodicSet) -> "SparseSequence":
        return SparseSequence(self.channels, self.entries, S)

    def max_abs_diff(self, other: "SparseSequence") -> float:
        diff = (self - other).entries
        return max((abs(v) for v in diff.values()), default=0.0)

    def to_json(self) -> dict:
        obj = {
            "channels": self.channels,
            "entries": [
                {"index": i, "channel": r, "re": v.real, "im": v.imag}
                for (i, r), v in sorted(self.entries.items())
            ],
        }
        if self.support is not None:
            obj["support"] = self.support.to_json()
        return obj

    @classmethod
    def from_json(cls, obj: dict) -> "SparseSequence":
        try:
            channels = int(obj["channels"])
            entries = {}
            for e in obj["entries"]:
                key = (int(e["index"]), int(e["channel"]))
                entries[key] = entries.get(key, 0) + complex(float(e.get("re", 0.0)), float(e.get("im", 0.0)))
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed sequence: {exc}") from exc
        support = PeriodicSet.from_json(obj["support"]) if obj.get("support") is not None else None
        return cls(channels, entries, support)


@dataclass(frozen=True)
class ThetaGrid:
    """Uniform nodes ``t/T`` on ``[0, 1)``."""

    T: int = 64

    def __post_init__(self):
        if self.T < 1:
            raise ValueError("grid size must be positive")

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(self.T) / self.T

    def integrate(self, values: np.ndarray) -> np.ndarray:
        """Average over the node axis (axis 0); exact for degrees below ``T``."""
        return np.asarray(values).mean(axis=0)


def _phases(n: np.ndarray, theta) -> np.ndarray:
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    return np.exp(2j * np.pi * np.outer(theta, n))


def _zak_channel(idx: np.ndarray, vals: np.ndarray, K: int, j: int, theta) -> np.ndarray:
    hit = np.mod(idx - j, K) == 0
    n = (idx[hit] - j) // K
    return _phases(n, theta) @ vals[hit]


def _squeeze(out: np.ndarray, theta) -> np.ndarray | complex:
    return out[0] if np.ndim(theta) == 0 else out


def zak(f: SparseSequence, K: int, j: int, theta, channel: int = 0):
    """``z_K f(j, theta) = sum_k f(j + kK) e^{2 pi i k theta}`` for one channel."""
    idx, vals = f.channel_arrays(channel)
    return _squeeze(_zak_channel(idx, vals, K, j, theta), theta)


def zak_vector(f: SparseSequence, K: int, j: int, theta) -> np.ndarray:
    out = np.stack([_zak_channel(*f.channel_arrays(r), K, j, theta) for r in range(f.channels)], axis=-1)
    return _squeeze(out, theta)


def _scatter(idx: np.ndarray, vals: np.ndarray, bases: np.ndarray, K: int, theta) -> np.ndarray:
    """``out[t, b] = z_K h(bases[b], theta_t)`` for offsets distinct mod ``K``."""
    thetas = np.atleast_1d(np.asarray(theta, dtype=float))
    out = np.zeros((bases.size, thetas.size), dtype=complex)
    if idx.size == 0:
        return out.T
    slot = np.full(K, -1, dtype=np.int64)
    slot[np.mod(bases, K)] = np.arange(bases.size)
    pos = slot[np.mod(idx, K)]
    keep = pos >= 0
    pos = pos[keep]
    n = (idx[keep] - bases[pos]) // K
    np.add.at(out, pos, np.exp(2j * np.pi * np.outer(n, thetas)) * vals[keep, None])
    return out.T


def _z_block(idx, vals, geo: GaborGeometry, j: int, theta) -> np.ndarray:
    # offsets j + kM - rN are distinct mod pM
    r, k = np.meshgrid(np.arange(geo.q), np.arange(geo.p), indexing="ij")
    bases = (j + k * geo.M - r * geo.N).ravel()
    out = _scatter(idx, vals, bases, geo.pM, theta)
    return out.reshape(out.shape[0], geo.q, geo.p)


def z_matrix_scalar(h: SparseSequence, geo: GaborGeometry, j: int, theta, channel: int = 0):
    """The ``q x p`` matrix with entries ``z_{pM} h(j + kM - rN, theta)`` at ``(r, k)``."""
    return _squeeze(_z_block(*h.channel_arrays(channel), geo, j, theta), theta)


def z_matrix_vector(f: SparseSequence, geo: GaborGeometry, j: int, theta):
    """``q x pR`` concatenation of the per-channel matrices."""
    if f.channels != geo.R:
        raise ValueError(f"sequence has {f.channels} channels, geometry expects {geo.R}")
    blocks = [_z_block(*f.channel_arrays(r), geo, j, theta) for r in range(geo.R)]
    return _squeeze(np.concatenate(blocks, axis=-1), theta)


def z_matrix_family(g: Sequence[SparseSequence], geo: GaborGeometry, j: int, theta):
    """``qL x pR`` vertical stack of the window matrices, window 0 on top."""
    thetas = np.atleast_1d(np.asarray(theta, dtype=float))
    if len(g) == 0:
        return _squeeze(np.zeros((thetas.size, 0, geo.p * geo.R), dtype=complex), theta)
    blocks = [np.atleast_3d(z_matrix_vector(w, geo, j, thetas)) for w in g]
    return _squeeze(np.concatenate(blocks, axis=1), theta)


def f_vector(f: SparseSequence, geo: GaborGeometry, j: int, theta):
    """Length-``pR`` vector; block ``r`` holds ``z_{pM} f_r(j + kM, theta)`` for ``k < p``."""
    bases = j + np.arange(geo.p) * geo.M
    blocks = [_scatter(*f.channel_arrays(r), bases, geo.pM, theta) for r in range(f.channels)]
    return _squeeze(np.concatenate(blocks, axis=-1), theta)


def exponent_range(seqs: Iterable[SparseSequence], geo: GaborGeometry) -> tuple[int, int] | None:
    """Smallest and largest Zak exponent appearing in any ``Z``/``F`` entry for ``j < M``.

    Offsets ``j + kM - rN`` with ``j < M``, ``k < p``, ``r < q`` lie in
    ``[-(q-1)N, pM - 1]``, and ``F`` offsets are a subset of that range.
    """
    lo_off, hi_off = -(geo.q - 1) * geo.N, geo.pM - 1
    lows, highs = [], []
    for s in seqs:
        b = s.bounds()
        if b is None:
            continue
        lows.append((b[0] - hi_off) // geo.pM)
        highs.append(-((lo_off - b[1]) // geo.pM))
    if not lows:
        return None
    return min(lows), max(highs)


def required_grid_size(seqs: Iterable[SparseSequence], geo: GaborGeometry, extra: int = 0) -> int:
    """Smallest ``T`` for which grid averages of products of two entries are exact.

    ``extra`` accounts for an additional ``e^{±2 pi i n theta}`` factor with
    ``|n| <= extra``.
    """
    rng = exponent_range(seqs, geo)
    if rng is None:
        return 1
    return rng[1] - rng[0] + abs(extra) + 1


def check_grid(grid: ThetaGrid, needed: int, strict: bool = False) -> None:
    if grid.T >= needed:
        return
    msg = f"theta grid T={grid.T} is below the exactness bound {needed}"
    if strict:
        raise GridTooCoarseError(msg)
    warnings.warn(msg, GridTooCoarseWarning, stacklevel=3)


def sequence_from_f_samples(samples: np.ndarray, geo: GaborGeometry, grid: ThetaGrid, n_min: int,
                            channels: int | None = None, atol: float = 0.0) -> SparseSequence:
    """Invert ``f_vector`` from its samples for ``j < M`` on ``grid``.

    ``samples`` has shape ``(M, T, pR)``.  The Zak coefficient of ``e^{2 pi i n theta}``
    in entry ``(r, k)`` at ``j`` is ``f_r(j + kM + n pM)``; exponents are assumed
    to lie in ``[n_min, n_min + T)``.  Values with magnitude ``<= atol`` are dropped.
    """
    R = channels or geo.R
    T = grid.T
    n = np.arange(n_min, n_min + T)
    # coeffs[n] = (1/T) sum_t F(theta_t) e^{-2 pi i n t / T}
    kernel = np.exp(-2j * np.pi * np.outer(n, np.arange(T)) / T) / T
    coeffs = np.einsum("nt,jtc->jnc", kernel, samples)
    entries = {}
    for j in range(geo.M):
        for r in range(R):
            for k in range(geo.p):
                col = coeffs[j, :, r * geo.p + k]
                for ni, value in zip(n, col):
                    if abs(value) > atol:
                        entries[(int(j + k * geo.M + ni * geo.pM), r)] = value
    return SparseSequence(R, entries)


def shift_relation_check(g: Sequence[SparseSequence], geo: GaborGeometry, j: int, ell: int, theta: float,
                         tol: float = 1e-12) -> bool:
    """Check ``Z_g(j + d ell) = e^{-2 pi i m theta} (I_L ⊗ C) Z_g(j) (I_R ⊗ A)`` entrywise."""
    _, _, m_l = decompose_ell(geo, ell)
    A, C = shift_unitaries(geo, ell, theta)
    lhs = z_matrix_family(g, geo, j + geo.d * ell, theta)
    rhs = np.exp(-2j * np.pi * m_l * theta) * (
        kron_identity(len(g), C) @ z_matrix_family(g, geo, j, theta) @ kron_identity(geo.R, A)
    )
    return bool(np.max(np.abs(lhs - rhs), initial=0.0) <= tol)
