"""Zak-domain decision procedures for multi-window Gabor systems.

The criteria are evaluated on a uniform theta grid.  For finitely supported
windows every Zak entry is a trigonometric polynomial, so the grid is chosen
at least as fine as the exactness bound from :func:`gaborlat.zak.required_grid_size`.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .lattice import GaborGeometry, PeriodicSet, check_support_set, index_projection
from .zak import (
    SparseSequence,
    SupportError,
    ThetaGrid,
    check_grid,
    exponent_range,
    f_vector,
    required_grid_size,
    sequence_from_f_samples,
    z_matrix_family,
)

DEFAULT_T = 64


@dataclass(frozen=True)
class Tolerances:
    rank_rtol: float = 1e-9
    rank_atol: float = 1e-12
    frame_rtol: float = 1e-9
    equal_tol: float = 1e-9
    hermitian_tol: float = 1e-12


def validate_family(g: Sequence[SparseSequence], S: PeriodicSet | None, geo: GaborGeometry) -> None:
    if len(g) != geo.L:
        raise ValueError(f"expected {geo.L} windows, got {len(g)}")
    _check_windows(g, S, geo)


def _check_windows(g: Sequence[SparseSequence], S: PeriodicSet | None, geo: GaborGeometry) -> None:
    for l, w in enumerate(g):
        if w.channels != geo.R:
            raise ValueError(f"window {l} has {w.channels} channels, expected {geo.R}")
        if S is not None:
            bad = sorted({i for i, _ in w.entries if i not in S})
            if bad:
                raise SupportError(f"window {l} has entries outside the support set at {bad}")


def default_grid(seqs: Sequence[SparseSequence], geo: GaborGeometry, extra: int = 0) -> ThetaGrid:
    return ThetaGrid(max(DEFAULT_T, required_grid_size(seqs, geo, extra)))


@dataclass
class GramField:
    """``G(j, theta_t) = sum_l Z_{g_l}(j, theta_t)^* Z_{g_l}(j, theta_t)`` for each ``j`` in ``js``.

    ``matrices`` has shape ``(len(js), T, pR, pR)``.
    """

    geometry: GaborGeometry
    grid: ThetaGrid
    js: tuple[int, ...]
    lambdas: tuple[tuple[int, ...], ...]
    matrices: np.ndarray

    def restricted(self, i: int) -> np.ndarray:
        """Principal ``Lambda_j x Lambda_j`` blocks for the ``i``-th ``j``, shape ``(T, n, n)``."""
        lam = np.array(self.lambdas[i], dtype=int)
        return self.matrices[i][:, lam[:, None], lam[None, :]]

    def eigenvalue_extremes(self) -> list[tuple[int, int, float, float]]:
        """``(j, t, lambda_min, lambda_max)`` of every restricted block; empty blocks give zeros."""
        out = []
        for i, j in enumerate(self.js):
            if not self.lambdas[i]:
                out.extend((j, t, 0.0, 0.0) for t in range(self.grid.T))
                continue
            ev = np.linalg.eigvalsh(self.restricted(i))
            out.extend((j, t, float(ev[t, 0]), float(ev[t, -1])) for t in range(self.grid.T))
        return out


def gram_field(g: Sequence[SparseSequence], S: PeriodicSet, geo: GaborGeometry, grid: ThetaGrid | None = None,
               j_range: str = "fundamental", tol: Tolerances = Tolerances()) -> GramField:
    """Build the Gram field on ``j < d`` (``"fundamental"``) or ``j < M`` (``"full"``)."""
    check_support_set(S, geo)
    _check_windows(g, S, geo)
    grid = grid or default_grid(g, geo)
    js = tuple(range(geo.d if j_range == "fundamental" else geo.M))
    pR = geo.p * geo.R
    mats = np.zeros((len(js), grid.T, pR, pR), dtype=complex)
    lambdas = []
    for i, j in enumerate(js):
        proj = index_projection(S, geo, j)
        lambdas.append(proj.lambda_)
        if g:
            Z = z_matrix_family(g, geo, j, grid.nodes)
            mats[i] = np.conj(np.swapaxes(Z, 1, 2)) @ Z
        off = np.ones(pR, dtype=bool)
        off[list(proj.lambda_)] = False
        herm_err = np.max(np.abs(mats[i] - np.conj(np.swapaxes(mats[i], 1, 2))), initial=0.0)
        assert herm_err <= tol.hermitian_tol * max(1.0, np.max(np.abs(mats[i]), initial=0.0))
        assert np.max(np.abs(mats[i][:, off, :]), initial=0.0) <= tol.hermitian_tol
    return GramField(geo, grid, js, tuple(lambdas), mats)


def numerical_rank(A: np.ndarray, tol: Tolerances = Tolerances()) -> int:
    if A.size == 0:
        return 0
    s = np.linalg.svd(A, compute_uv=False)
    cutoff = max(tol.rank_rtol * (s[0] if s.size else 0.0), tol.rank_atol)
    return int(np.sum(s > cutoff))


def completeness_check(g: Sequence[SparseSequence], S: PeriodicSet, geo: GaborGeometry,
                       grid: ThetaGrid | None = None, tol: Tolerances = Tolerances()):
    """Rank criterion: ``rank Z_g(j, theta) = R * card(K_j)`` at every ``j < d`` and grid node.

    Returns ``(is_complete, certificates)`` where each certificate records
    ``j``, ``theta_index``, ``rank`` and ``required``.
    """
    check_support_set(S, geo)
    grid = grid or default_grid(g, geo)
    ok = True
    certs = []
    for j in range(geo.d):
        need = geo.R * len(index_projection(S, geo, j).kset)
        Z = z_matrix_family(g, geo, j, grid.nodes) if g else np.zeros((grid.T, 0, geo.p * geo.R))
        for t in range(grid.T):
            rank = numerical_rank(Z[t], tol)
            ok &= rank == need
            certs.append({"j": j, "theta_index": t, "rank": rank, "required": need})
    return bool(ok), certs


def frame_bounds(gram: GramField, tol: Tolerances = Tolerances()) -> tuple[float, float, bool]:
    """Optimal grid frame bounds ``(A, B)`` from the restricted Gram eigenvalues."""
    M = gram.geometry.M
    lo, hi = np.inf, 0.0
    for i in range(len(gram.js)):
        if not gram.lambdas[i]:
            continue
        ev = np.linalg.eigvalsh(gram.restricted(i))
        lo = min(lo, float(ev[:, 0].min()))
        hi = max(hi, float(ev[:, -1].max()))
    if lo == np.inf:
        return 0.0, 0.0, False
    A, B = M * lo, M * hi
    return A, B, bool(A > tol.frame_rtol * max(1.0, B))


def parseval_check(gram: GramField, tol: float = 1e-9) -> bool:
    """Every restricted Gram block equals ``I / M`` to within ``tol``."""
    M = gram.geometry.M
    for i in range(len(gram.js)):
        n = len(gram.lambdas[i])
        if n and np.max(np.abs(gram.restricted(i) - np.eye(n) / M)) > tol:
            return False
    return True


def strong_disjointness(g: Sequence[SparseSequence], h: Sequence[SparseSequence], geo: GaborGeometry,
                        grid: ThetaGrid | None = None, tol: float = 1e-12) -> bool:
    """``sum_l Z_{g_l}^* Z_{h_l}`` vanishes for ``j < d`` at every grid node."""
    if len(g) != len(h) or any(a.channels != b.channels for a, b in zip(g, h)):
        raise ValueError("families must have the same number of windows and channels")
    if not g:
        return True
    grid = grid or default_grid(list(g) + list(h), geo)
    for j in range(geo.d):
        Zg = z_matrix_family(g, geo, j, grid.nodes)
        Zh = z_matrix_family(h, geo, j, grid.nodes)
        if np.max(np.abs(np.conj(np.swapaxes(Zg, 1, 2)) @ Zh), initial=0.0) > tol:
            return False
    return True


def mixed_frame_operator_zak(h: Sequence[SparseSequence], g: Sequence[SparseSequence], f: SparseSequence,
                             geo: GaborGeometry, grid: ThetaGrid | None = None,
                             strict: bool = True) -> SparseSequence:
    """``S_{h,g} f = sum_{l,m,n} <f, E_m T_{nN} h_l> E_m T_{nN} g_l`` through the Zak domain.

    Per ``j < M`` the Zak vector of the output is ``M sum_l Z_{g_l}^T conj(Z_{h_l}) F``;
    the sequence is recovered from its samples by a discrete Fourier inversion.
    """
    if len(g) != len(h):
        raise ValueError("families must have the same number of windows")
    R = f.channels
    rg, rh, rf = exponent_range(g, geo), exponent_range(h, geo), exponent_range([f], geo)
    if rg is None or rh is None or rf is None:
        return SparseSequence.zero(R)
    n_lo = rg[0] - rh[1] + rf[0]
    n_hi = rg[1] - rh[0] + rf[1]
    needed = n_hi - n_lo + 1
    if grid is None:
        grid = ThetaGrid(needed)
    check_grid(grid, needed, strict=strict)
    nodes = grid.nodes
    samples = np.zeros((geo.M, grid.T, geo.p * R), dtype=complex)
    for j in range(geo.M):
        F = f_vector(f, geo, j, nodes)
        acc = np.zeros_like(F)
        for wg, wh in zip(g, h):
            Zg = z_matrix_family([wg], geo, j, nodes)
            Zh = z_matrix_family([wh], geo, j, nodes)
            coef = np.einsum("tab,tb->ta", np.conj(Zh), F)
            acc += np.einsum("tab,ta->tb", Zg, coef)
        samples[j] = geo.M * acc
    scale = max(1.0, float(np.max(np.abs(samples), initial=0.0)))
    return sequence_from_f_samples(samples, geo, grid, n_lo, channels=R, atol=1e-12 * scale)


def bessel_check(g: Sequence[SparseSequence], geo: GaborGeometry, grid: ThetaGrid | None = None):
    """Finitely supported windows always give a Bessel system; returns ``(True, max |Z entry|)``."""
    if not g:
        return True, 0.0
    grid = grid or default_grid(g, geo)
    peak = 0.0
    for j in range(geo.d):
        peak = max(peak, float(np.max(np.abs(z_matrix_family(g, geo, j, grid.nodes)), initial=0.0)))
    return True, peak


def norm_identity_check(g: Sequence[SparseSequence], S: PeriodicSet, geo: GaborGeometry, tol: float = 1e-10) -> bool:
    """Parseval necessary condition ``sum_l ||g_l||^2 = R card(S ∩ [0, N)) / M``."""
    total = sum(w.norm_sq() for w in g)
    return abs(total - geo.R * S.card_in(geo.N) / geo.M) <= tol


@dataclass
class FrameReport:
    is_bessel: bool
    is_complete: bool
    is_frame: bool
    lower_bound: float
    upper_bound: float
    is_tight: bool
    is_parseval: bool
    is_riesz: bool
    is_onb: bool
    certificates: list = field(default_factory=list)
    grid_T: int = DEFAULT_T
    degree_bound: int = 1
    tolerances: Tolerances = field(default_factory=Tolerances)
    bessel_max_entry: float = 0.0

    def to_json(self) -> dict:
        return {
            "bessel": self.is_bessel,
            "complete": self.is_complete,
            "frame": self.is_frame,
            "A": self.lower_bound,
            "B": self.upper_bound,
            "tight": self.is_tight,
            "parseval": self.is_parseval,
            "riesz": self.is_riesz,
            "onb": self.is_onb,
            "certificates": self.certificates,
            "grid_T": self.grid_T,
            "degree_bound": self.degree_bound,
            "bessel_max_entry": self.bessel_max_entry,
            "tolerances": asdict(self.tolerances),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "FrameReport":
        return cls(
            is_bessel=obj["bessel"], is_complete=obj["complete"], is_frame=obj["frame"],
            lower_bound=float(obj["A"]), upper_bound=float(obj["B"]), is_tight=obj["tight"],
            is_parseval=obj["parseval"], is_riesz=obj["riesz"], is_onb=obj["onb"],
            certificates=list(obj.get("certificates", [])), grid_T=int(obj["grid_T"]),
            degree_bound=int(obj.get("degree_bound", 1)),
            tolerances=Tolerances(**obj.get("tolerances", {})),
            bessel_max_entry=float(obj.get("bessel_max_entry", 0.0)),
        )


def riesz_onb_check(report: FrameReport, g: Sequence[SparseSequence], S: PeriodicSet, geo: GaborGeometry,
                    tol: float = 1e-9) -> tuple[bool, bool]:
    """Riesz iff ``R card(S_N) = LM`` (given a frame); ONB iff Parseval with unit-norm windows."""
    if not report.is_frame:
        return False, False
    is_riesz = geo.R * S.card_in(geo.N) == geo.L * geo.M
    is_onb = report.is_parseval and all(abs(w.norm() - 1.0) <= tol for w in g)
    return is_riesz, is_onb


def analyze(g: Sequence[SparseSequence], S: PeriodicSet, geo: GaborGeometry, grid: ThetaGrid | None = None,
            tol: Tolerances = Tolerances(), strict: bool = False) -> FrameReport:
    """Full verdict for the system generated by ``g`` on ``l^2(S, C^R)``."""
    validate_family(g, S, geo)
    check_support_set(S, geo)
    needed = required_grid_size(g, geo)
    if grid is None:
        grid = ThetaGrid(max(DEFAULT_T, needed))
    check_grid(grid, needed, strict=strict)

    bessel, peak = bessel_check(g, geo, grid)
    complete, rank_certs = completeness_check(g, S, geo, grid, tol)
    gram = gram_field(g, S, geo, grid, tol=tol)
    A, B, is_frame = frame_bounds(gram, tol)
    is_frame = is_frame and complete
    is_tight = is_frame and abs(B - A) <= tol.equal_tol * max(1.0, B)
    is_parseval = is_tight and parseval_check(gram, tol.equal_tol)

    ranks = {(c["j"], c["theta_index"]): c["rank"] for c in rank_certs}
    certs = [
        {"j": j, "theta_index": t, "lambda_min": lmin, "lambda_max": lmax, "rank": ranks[(j, t)]}
        for j, t, lmin, lmax in gram.eigenvalue_extremes()
    ]
    report = FrameReport(
        is_bessel=bessel, is_complete=complete, is_frame=is_frame, lower_bound=A, upper_bound=B,
        is_tight=is_tight, is_parseval=is_parseval, is_riesz=False, is_onb=False, certificates=certs,
        grid_T=grid.T, degree_bound=needed, tolerances=tol, bessel_max_entry=peak,
    )
    report.is_riesz, report.is_onb = riesz_onb_check(report, g, S, geo, tol.equal_tol)
    return report
