"""Brute-force computations straight from the definitions of the Gabor system.

Nothing in this module uses the Zak transform, apart from
:func:`inner_product_via_zak`, which exists to be compared against
:func:`direct_inner_product`.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .lattice import GaborGeometry, PeriodicSet
from .zak import (
    SparseSequence,
    SupportError,
    ThetaGrid,
    check_grid,
    exponent_range,
    f_vector,
    z_matrix_vector,
)

DEFAULT_SEED = 0xC0FFEE


@dataclass(frozen=True)
class OracleConfig:
    tol: float = 1e-10
    trials: int = 100
    seed: int = DEFAULT_SEED


def thread_count() -> int:
    """Worker cap from ``GABORLAT_THREADS`` (default: 1)."""
    try:
        return max(1, int(os.environ.get("GABORLAT_THREADS", "1")))
    except ValueError:
        return 1


def translation_range(f: SparseSequence, g: SparseSequence, N: int) -> range:
    """All ``n`` for which ``supp f`` and ``supp g + nN`` can overlap (from support extrema)."""
    bf, bg = f.bounds(), g.bounds()
    if bf is None or bg is None:
        return range(0)
    lo = -((bg[1] - bf[0]) // N)
    hi = (bf[1] - bg[0]) // N
    return range(lo, hi + 1)


def _dense(f: SparseSequence, lo: int, hi: int) -> np.ndarray:
    """Values of ``f`` on ``[lo, hi)`` as a ``(hi - lo, R)`` array."""
    out = np.zeros((max(hi - lo, 0), f.channels), dtype=complex)
    for (i, r), v in f.entries.items():
        if lo <= i < hi:
            out[i - lo, r] = v
    return out


def _span(f: SparseSequence) -> tuple[int, int]:
    b = f.bounds()
    return (0, 0) if b is None else (b[0], b[1] + 1)


def _shift_coefficients(fd: np.ndarray, f_lo: int, g: SparseSequence, shifts, geo: GaborGeometry) -> np.ndarray:
    """``<f_t, E_{m/M} T_{nN} g>`` for a stack ``fd`` of shape ``(trials, len, R)``.

    Returns shape ``(trials, len(shifts), M)``.
    """
    g_lo, g_hi = _span(g)
    gd = _dense(g, g_lo, g_hi)
    f_hi = f_lo + fd.shape[1]
    ms = np.arange(geo.M)
    out = np.zeros((fd.shape[0], len(shifts), geo.M), dtype=complex)
    for k, n in enumerate(shifts):
        lo, hi = max(f_lo, g_lo + n * geo.N), min(f_hi, g_hi + n * geo.N)
        if lo >= hi:
            continue
        idx = np.arange(lo, hi)
        w = np.einsum("tir,ir->ti", fd[:, lo - f_lo:hi - f_lo], np.conj(gd[lo - n * geo.N - g_lo:hi - n * geo.N - g_lo]))
        out[:, k] = w @ np.exp(-2j * np.pi * np.outer(idx, ms) / geo.M)
    return out


def _coefficients(f: SparseSequence, g: SparseSequence, n: int, geo: GaborGeometry) -> np.ndarray:
    """``<f, E_{m/M} T_{nN} g>`` for all ``m < M``."""
    lo, hi = _span(f)
    return _shift_coefficients(_dense(f, lo, hi)[None], lo, g, [n], geo)[0, 0]


def direct_inner_product(f: SparseSequence, g: SparseSequence, m: int, n: int, geo: GaborGeometry) -> complex:
    """``<f, E_{m/M} T_{nN} g> = sum_{j,r} f_r(j) conj(e^{2 pi i m j / M} g_r(j - nN))``."""
    total = 0j
    for (j, r), v in f.entries.items():
        w = g.entries.get((j - n * geo.N, r))
        if w is not None:
            total += v * np.conj(np.exp(2j * np.pi * m * j / geo.M) * w)
    return complex(total)


def _check_in_support(f: SparseSequence, support: PeriodicSet | None) -> None:
    if support is None:
        return
    bad = sorted({i for i, _ in f.entries if i not in support})
    if bad:
        raise SupportError(f"signal has entries outside the support set at {bad}")


def frame_sums(signals: Sequence[SparseSequence], family: Sequence[SparseSequence], geo: GaborGeometry,
               support: PeriodicSet | None = None) -> np.ndarray:
    """:func:`frame_sum` for several signals at once."""
    for f in signals:
        _check_in_support(f, support)
    spans = [f.bounds() for f in signals if f.bounds() is not None]
    if not spans or not family:
        return np.zeros(len(signals))
    lo, hi = min(s[0] for s in spans), max(s[1] for s in spans) + 1
    fd = np.stack([_dense(f, lo, hi) for f in signals])
    hull = SparseSequence(signals[0].channels, {(lo, 0): 1, (hi - 1, 0): 1})
    total = np.zeros(len(signals))
    for g in family:
        shifts = list(translation_range(hull, g, geo.N))
        c = _shift_coefficients(fd, lo, g, shifts, geo)
        total += np.sum(np.abs(c) ** 2, axis=(1, 2))
    return total


def frame_sum(f: SparseSequence, family: Sequence[SparseSequence], geo: GaborGeometry,
              support: PeriodicSet | None = None) -> float:
    """``sum_{l, m < M, n} |<f, E_{m/M} T_{nN} g_l>|^2`` over all overlapping translates."""
    return float(frame_sums([f], family, geo, support)[0])


def apply_frame_operator_direct(h: Sequence[SparseSequence], g: Sequence[SparseSequence], f: SparseSequence,
                                geo: GaborGeometry) -> SparseSequence:
    """``S_{h,g} f = sum_{l,m,n} <f, E_{m/M} T_{nN} h_l> E_{m/M} T_{nN} g_l``."""
    out: dict[tuple[int, int], complex] = {}
    ms = np.arange(geo.M)
    for hl, gl in zip(h, g):
        if not gl:
            continue
        gidx = np.array([i for i, _ in gl.entries], dtype=np.int64)
        gch = [r for _, r in gl.entries]
        gval = np.array(list(gl.entries.values()), dtype=complex)
        for n in translation_range(f, hl, geo.N):
            c = _coefficients(f, hl, n, geo)
            if not np.any(c):
                continue
            pos = gidx + n * geo.N
            # sum_m c_m e^{2 pi i m i / M}, evaluated at every shifted support point
            envelope = np.exp(2j * np.pi * np.outer(pos, ms) / geo.M) @ c
            for i, r, v in zip(pos, gch, envelope * gval):
                out[(int(i), r)] = out.get((int(i), r), 0) + v
    scale = max((abs(v) for v in out.values()), default=0.0)
    cleaned = {k: v for k, v in out.items() if abs(v) > 1e-12 * max(1.0, scale)}
    return SparseSequence(f.channels, cleaned)


def tightness_certificate(family: Sequence[SparseSequence], S: PeriodicSet, geo: GaborGeometry,
                          tol: float = 1e-10) -> tuple[bool, float]:
    """Test ``S_{g,g} delta = A delta`` for every unit spike on one ``pM``-period of ``S``.

    The frame operator commutes with translation by ``N``, hence by ``pM``, so
    one period of spikes determines it.
    """
    A = None
    tight = True
    for s in S.members(0, geo.pM):
        for r in range(geo.R):
            delta = SparseSequence.spike(s, r, geo.R)
            image = apply_frame_operator_direct(family, family, delta, geo)
            value = image.entries.get((s, r), 0j)
            if A is None:
                A = value.real
            residual = image - delta.scaled(A)
            if abs(value.imag) > tol or residual.max_abs_diff(SparseSequence.zero(geo.R)) > tol * max(1.0, abs(A)):
                tight = False
    A = 0.0 if A is None else float(A)
    return bool(tight and A > tol), A


def inner_products_via_zak(f: SparseSequence, h: SparseSequence, geo: GaborGeometry, ns,
                           grid: ThetaGrid | None = None, strict: bool = True) -> np.ndarray:
    """``<f, E_{m/M} T_{(nq + r)N} h>`` from Zak samples, shape ``(q, len(ns), M)`` indexed ``[r, n, m]``.

    For ``j < M`` the ``r``-th entry of ``conj(Z_h(j, .)) F(j, .)`` has Fourier
    coefficient at ``e^{2 pi i n theta}`` equal to
    ``sum_rho f(j + rho M) conj(h(j + rho M - (nq + r)N))``; summing over ``j``
    against ``e^{-2 pi i m j / M}`` gives the inner product.
    """
    ns = np.asarray(list(ns), dtype=np.int64)
    out = np.zeros((geo.q, ns.size, geo.M), dtype=complex)
    rf, rh = exponent_range([f], geo), exponent_range([h], geo)
    if rf is None or rh is None or ns.size == 0:
        return out
    lo, hi = rf[0] - rh[1], rf[1] - rh[0]
    needed = max(abs(lo - ns.max()), abs(hi - ns.min()), abs(lo - ns.min()), abs(hi - ns.max())) + 1
    if grid is None:
        grid = ThetaGrid(needed)
    check_grid(grid, needed, strict=strict)
    nodes = grid.nodes
    demod = np.exp(-2j * np.pi * np.outer(nodes, ns)) / grid.T
    for j in range(geo.M):
        u = np.einsum("trb,tb->tr", np.conj(z_matrix_vector(h, geo, j, nodes)), f_vector(f, geo, j, nodes))
        out += (u.T @ demod)[:, :, None] * np.exp(-2j * np.pi * np.arange(geo.M) * j / geo.M)
    return out


def inner_product_via_zak(f: SparseSequence, h: SparseSequence, m: int, n: int, r: int, geo: GaborGeometry,
                          grid: ThetaGrid | None = None, strict: bool = True) -> complex:
    """``<f, E_{m/M} T_{(nq + r)N} h>`` assembled from Zak samples for ``j < M``."""
    return complex(inner_products_via_zak(f, h, geo, [n], grid, strict)[r, 0, m])


def random_signal(S: PeriodicSet, geo: GaborGeometry, rng: np.random.Generator) -> SparseSequence:
    """Complex Gaussian entries on a random nonempty subset of ``S ∩ [-2pM, 2pM)``."""
    points = [(i, r) for i in S.members(-2 * geo.pM, 2 * geo.pM) for r in range(geo.R)]
    keep = rng.random(len(points)) < 0.5
    if not keep.any():
        keep[rng.integers(len(points))] = True
    chosen = [pt for pt, k in zip(points, keep) if k]
    values = rng.normal(size=len(chosen)) + 1j * rng.normal(size=len(chosen))
    return SparseSequence(geo.R, dict(zip(chosen, values)), S)


def frame_ratio_trials(family: Sequence[SparseSequence], S: PeriodicSet, geo: GaborGeometry,
                       config: OracleConfig = OracleConfig()) -> np.ndarray:
    """``frame_sum(f) / ||f||^2`` for ``config.trials`` random signals; schedule-independent."""
    seeds = np.random.SeedSequence(config.seed).spawn(config.trials)
    signals = [random_signal(S, geo, np.random.default_rng(ss)) for ss in seeds]
    workers = thread_count()
    chunks = [signals[i::workers] for i in range(workers)]

    def one(chunk):
        return frame_sums(chunk, family, geo, S) if chunk else np.zeros(0)

    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(one, chunks))
    sums = np.empty(len(signals))
    for i, part in enumerate(parts):
        sums[i::workers] = part
    return sums / np.array([f.norm_sq() for f in signals])


def inner_product_sweep(f: SparseSequence, h: SparseSequence, geo: GaborGeometry) -> float:
    """Largest ``|zak - direct|`` over ``m < M``, ``r < q`` and every ``n`` with overlap (plus one each side)."""
    shifts = translation_range(f, h, geo.N)
    if len(shifts) == 0:
        return 0.0
    ns = np.arange(shifts.start // geo.q - 1, (shifts.stop - 1) // geo.q + 2)
    zak_side = inner_products_via_zak(f, h, geo, ns)
    lo, hi = _span(f)
    direct = _shift_coefficients(_dense(f, lo, hi)[None], lo, h, [n * geo.q + r for r in range(geo.q) for n in ns], geo)
    direct = direct[0].reshape(geo.q, ns.size, geo.M)
    return float(np.max(np.abs(zak_side - direct)))


def orthogonal_complement_probe(family: Sequence[SparseSequence], S: PeriodicSet, geo: GaborGeometry,
                                periods: int, rng: np.random.Generator,
                                rank_tol: float = 1e-9) -> SparseSequence | None:
    """A random nonzero ``f`` on ``S ∩ [-periods pM, periods pM)`` orthogonal to every system element.

    Builds the analysis matrix of all translates overlapping the window and
    draws ``f`` from its numerical null space; ``None`` when that is trivial.
    """
    lo, hi = -periods * geo.pM, periods * geo.pM
    points = [(i, r) for i in S.members(lo, hi) for r in range(geo.R)]
    if not points:
        return None
    hull = SparseSequence(geo.R, {(lo, 0): 1, (hi - 1, 0): 1})
    basis = np.zeros((len(points), hi - lo, geo.R), dtype=complex)
    for t, (i, r) in enumerate(points):
        basis[t, i - lo, r] = 1.0
    rows = []
    for g in family:
        if not g:
            continue
        c = _shift_coefficients(basis, lo, g, list(translation_range(hull, g, geo.N)), geo)
        rows.append(c.reshape(len(points), -1).T)
    if not rows:
        coeffs = rng.normal(size=len(points)) + 1j * rng.normal(size=len(points))
        return SparseSequence(geo.R, dict(zip(points, coeffs)), S)
    A = np.vstack(rows)
    _, sv, vh = np.linalg.svd(A, full_matrices=True)
    rank = int(np.sum(sv > rank_tol * max(sv.max(initial=0.0), 1e-300)))
    null = vh[rank:]
    if null.shape[0] == 0:
        return None
    # rows of A are <basis_t, e>, so f = sum c_t basis_t needs A @ c = 0
    weights = rng.normal(size=null.shape[0]) + 1j * rng.normal(size=null.shape[0])
    coeffs = np.conj(null).T @ weights
    return SparseSequence(geo.R, dict(zip(points, coeffs)), S)


def cross_check(family: Sequence[SparseSequence], S: PeriodicSet, geo: GaborGeometry, A: float, B: float,
                config: OracleConfig = OracleConfig(), eps: float = 1e-9) -> dict:
    """Oracle summary against Zak-domain bounds ``(A, B)``; ``ok`` is the overall verdict."""
    from .frames import mixed_frame_operator_zak

    ratios = frame_ratio_trials(family, S, geo, config)
    tight, A_direct = tightness_certificate(family, S, geo, config.tol)
    rng = np.random.default_rng(np.random.SeedSequence(config.seed).spawn(config.trials + 1)[-1])
    f = random_signal(S, geo, rng)
    ip_err = max((inner_product_sweep(f, g, geo) for g in family), default=0.0)
    op_err = apply_frame_operator_direct(family, family, f, geo).max_abs_diff(
        mixed_frame_operator_zak(family, family, f, geo)
    )
    degenerate = not any(family) or A <= 0
    within = bool(np.all(ratios >= A - eps) and np.all(ratios <= B + eps))
    tight_agrees = tight == (abs(B - A) <= eps * max(1.0, B) and A > eps) and (
        not tight or math.isclose(A_direct, A, rel_tol=0, abs_tol=eps * max(1.0, A))
    )
    return {
        "trials": config.trials,
        "seed": config.seed,
        "ratio_min": float(ratios.min()),
        "ratio_max": float(ratios.max()),
        "ratios_within_bounds": within,
        "zak_A": A,
        "zak_B": B,
        "tight_direct": tight,
        "tight_bound_direct": A_direct,
        "tightness_agrees": bool(tight_agrees),
        "inner_product_max_error": ip_err,
        "frame_operator_max_error": op_err,
        "degenerate": degenerate,
        "ok": bool(within and tight_agrees and ip_err <= config.tol and op_err <= config.tol and not degenerate),
    }
