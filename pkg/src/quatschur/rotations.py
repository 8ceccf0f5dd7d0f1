"""Elementary unitary quaternion transformations.

Four Householder style reflectors (H1..H4), the 4x4 real rotation that
maps a single quaternion entry to its modulus, and two quaternion Givens
rotations (the fast form G1 and the generalized form G2). Every transform
is applied through rank-one or phase updates on the four real blocks of a
quaternion matrix; no expanded real matrix is ever formed.

The module also hosts the low-level array kernels shared by the
Hessenberg, QR, and Schur drivers. Those kernels mutate the (4, m, n)
``data`` array of a working matrix in place.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import opcount
from .qcore import QuatMatrix, Quaternion, qabs2, qconj, qmul

__all__ = [
    "HouseholderVariant",
    "HouseholderQ",
    "JRSGivens4",
    "GivensG2",
    "make_householder",
    "apply_householder_left",
    "apply_householder_right",
    "jrs_givens4",
    "make_givens",
]

_EPS = np.finfo(float).eps


class HouseholderVariant(enum.Enum):
    H1 = "h1"
    H2 = "h2"
    H3 = "h3"
    H4 = "h4"


# ---------------------------------------------------------------------------
# Array kernels. ``d`` is always a (4, N, M) float array mutated in place.

def _qvec_dot_panel(v: np.ndarray, p: np.ndarray) -> np.ndarray:
    """w = v^* P for a quaternion vector v (4, m) and panel P (4, m, q)."""
    t = np.tensordot(v, p, axes=([1], [1]))  # (4, 4, q): t[k, l] = v[k].P[l]
    w = np.stack((
        t[0, 0] + t[1, 1] + t[2, 2] + t[3, 3],
        t[0, 1] - t[1, 0] - t[2, 3] + t[3, 2],
        t[0, 2] - t[2, 0] - t[3, 1] + t[1, 3],
        t[0, 3] - t[3, 0] - t[1, 2] + t[2, 1],
    ))
    if opcount.counting():
        m, q = v.shape[1], p.shape[2]
        opcount.tally(muls=16 * m * q, adds=(16 * m - 4) * q)
    return w


def _panel_sub_vw(p: np.ndarray, v: np.ndarray, w: np.ndarray) -> None:
    """P -= v w for quaternion column v (4, m) and row w (4, q)."""
    t = v[:, None, :, None] * w[None, :, None, :]  # (4, 4, m, q)
    p[0] -= t[0, 0] - t[1, 1] - t[2, 2] - t[3, 3]
    p[1] -= t[0, 1] + t[1, 0] + t[2, 3] - t[3, 2]
    p[2] -= t[0, 2] + t[2, 0] + t[3, 1] - t[1, 3]
    p[3] -= t[0, 3] + t[3, 0] + t[1, 2] - t[2, 1]
    if opcount.counting():
        m, q = v.shape[1], w.shape[1]
        opcount.tally(muls=16 * m * q, adds=16 * m * q)


def _panel_dot_qvec(p: np.ndarray, v: np.ndarray) -> np.ndarray:
    """t = P v for a panel P (4, p, m) and quaternion vector v (4, m)."""
    t = np.tensordot(p, v, axes=([2], [1]))  # (4, rows, 4)
    out = np.stack((
        t[0, :, 0] - t[1, :, 1] - t[2, :, 2] - t[3, :, 3],
        t[0, :, 1] + t[1, :, 0] + t[2, :, 3] - t[3, :, 2],
        t[0, :, 2] + t[2, :, 0] + t[3, :, 1] - t[1, :, 3],
        t[0, :, 3] + t[3, :, 0] + t[1, :, 2] - t[2, :, 1],
    ))
    if opcount.counting():
        rows, m = p.shape[1], v.shape[1]
        opcount.tally(muls=16 * m * rows, adds=(16 * m - 4) * rows)
    return out


def _panel_sub_tvc(p: np.ndarray, t: np.ndarray, v: np.ndarray) -> None:
    """P -= t v^* for quaternion column t (4, rows) and vector v (4, m)."""
    o = t[:, None, :, None] * v[None, :, None, :]  # (4, 4, rows, m)
    p[0] -= o[0, 0] + o[1, 1] + o[2, 2] + o[3, 3]
    p[1] -= -o[0, 1] + o[1, 0] - o[2, 3] + o[3, 2]
    p[2] -= -o[0, 2] + o[2, 0] - o[3, 1] + o[1, 3]
    p[3] -= -o[0, 3] + o[3, 0] - o[1, 2] + o[2, 1]
    if opcount.counting():
        rows, m = t.shape[1], v.shape[1]
        opcount.tally(muls=16 * m * rows, adds=16 * m * rows)


def _qrefl_left(d, v, r0, c0, c1) -> None:
    """Panel update P -= v (v^* P) on rows r0..r0+m-1, cols c0..c1-1."""
    m = v.shape[1]
    p = d[:, r0:r0 + m, c0:c1]
    w = _qvec_dot_panel(v, p)
    _panel_sub_vw(p, v, w)


def _qrefl_right(d, v, c0, r0, r1) -> None:
    """Panel update P -= (P v) v^* on cols c0..c0+m-1, rows r0..r1-1."""
    m = v.shape[1]
    p = d[:, r0:r1, c0:c0 + m]
    t = _panel_dot_qvec(p, v)
    _panel_sub_tvc(p, t, v)


def _phase_row(d, g, i, c0, c1, conj_g=True) -> None:
    """Row i, cols c0..c1-1 <- g . row (conjugated phase by default)."""
    d[:, i, c0:c1] = qmul(g.reshape(4, 1), d[:, i, c0:c1], conj_a=conj_g)


def _phase_col(d, g, j, r0, r1, conj_g=False) -> None:
    """Col j, rows r0..r1-1 <- col . g."""
    d[:, r0:r1, j] = qmul(d[:, r0:r1, j], g.reshape(4, 1), conj_b=conj_g)


def _diag_phase_rows(d, g, r0, c0, c1, conj_g=True) -> None:
    """Rows r0..r0+T-1 scaled from the left by unit quaternions g (4, T)."""
    t = g.shape[1]
    p = d[:, r0:r0 + t, c0:c1]
    d[:, r0:r0 + t, c0:c1] = qmul(g[:, :, None], p, conj_a=conj_g)


def _diag_phase_cols(d, g, c0, r0, r1, conj_g=False) -> None:
    """Cols c0..c0+T-1 scaled from the right by unit quaternions g (4, T)."""
    t = g.shape[1]
    p = d[:, r0:r1, c0:c0 + t]
    d[:, r0:r1, c0:c0 + t] = qmul(p, g[:, None, :], conj_b=conj_g)


def _scale_panel(d, s, r0, r1, c0, c1, side, conj_s=False) -> None:
    """Scale a panel by one quaternion scalar from the given side."""
    p = d[:, r0:r1, c0:c1]
    sb = s.reshape(4, 1, 1)
    if side == "left":
        d[:, r0:r1, c0:c1] = qmul(sb, p, conj_a=conj_s)
    else:
        d[:, r0:r1, c0:c1] = qmul(p, sb, conj_b=conj_s)


def _rhouse_left(d, u, beta, r0, c0, c1) -> None:
    """Real Householder I - beta u u^T applied to all four blocks, left."""
    m = u.shape[0]
    p = d[:, r0:r0 + m, c0:c1]
    w = np.tensordot(u, p, axes=([0], [1]))  # (4, q)
    p -= beta * u[None, :, None] * w[:, None, :]
    if opcount.counting():
        q = c1 - c0
        opcount.tally(muls=8 * m * q + 4 * q, adds=4 * (2 * m - 1) * q)


def _rhouse_right(d, u, beta, c0, r0, r1) -> None:
    """Real Householder applied to all four blocks from the right."""
    m = u.shape[0]
    p = d[:, r0:r1, c0:c0 + m]
    w = np.tensordot(p, u, axes=([2], [0]))  # (4, rows)
    p -= beta * w[:, :, None] * u[None, None, :]
    if opcount.counting():
        rows = r1 - r0
        opcount.tally(muls=8 * m * rows + 4 * rows,
                      adds=4 * (2 * m - 1) * rows)


def _q2_left(d, g, i, j, c0, c1, adjoint=False) -> None:
    """Rows (i, j), cols c0..c1-1 <- M [row_i; row_j] for a 2x2 quaternion
    matrix g (4, 2, 2); ``adjoint`` applies g^* instead of g."""
    ri = d[:, i, c0:c1].copy()
    rj = d[:, j, c0:c1].copy()
    if adjoint:
        m11, m12 = g[:, 0, 0].reshape(4, 1), g[:, 1, 0].reshape(4, 1)
        m21, m22 = g[:, 0, 1].reshape(4, 1), g[:, 1, 1].reshape(4, 1)
        ca = True
    else:
        m11, m12 = g[:, 0, 0].reshape(4, 1), g[:, 0, 1].reshape(4, 1)
        m21, m22 = g[:, 1, 0].reshape(4, 1), g[:, 1, 1].reshape(4, 1)
        ca = False
    d[:, i, c0:c1] = qmul(m11, ri, conj_a=ca) + qmul(m12, rj, conj_a=ca)
    d[:, j, c0:c1] = qmul(m21, ri, conj_a=ca) + qmul(m22, rj, conj_a=ca)
    if opcount.counting():
        opcount.tally(adds=8 * (c1 - c0))


def _q2_right(d, g, i, j, r0, r1, adjoint=False) -> None:
    """Cols (i, j), rows r0..r1-1 <- [col_i, col_j] M."""
    ci = d[:, r0:r1, i].copy()
    cj = d[:, r0:r1, j].copy()
    if adjoint:
        m11, m12 = g[:, 0, 0].reshape(4, 1), g[:, 1, 0].reshape(4, 1)
        m21, m22 = g[:, 0, 1].reshape(4, 1), g[:, 1, 1].reshape(4, 1)
        cb = True
    else:
        m11, m12 = g[:, 0, 0].reshape(4, 1), g[:, 0, 1].reshape(4, 1)
        m21, m22 = g[:, 1, 0].reshape(4, 1), g[:, 1, 1].reshape(4, 1)
        cb = False
    d[:, r0:r1, i] = qmul(ci, m11, conj_b=cb) + qmul(cj, m21, conj_b=cb)
    d[:, r0:r1, j] = qmul(ci, m12, conj_b=cb) + qmul(cj, m22, conj_b=cb)
    if opcount.counting():
        opcount.tally(adds=8 * (r1 - r0))


def _unit_phase(q4: np.ndarray) -> tuple[np.ndarray, float]:
    """Return (q/|q|, |q|) for one quaternion (4,); identity phase at 0."""
    r2 = float(q4 @ q4)
    r = math.sqrt(r2)
    opcount.tally(muls=4, adds=3, sqrts=1)
    if r == 0.0:
        return np.array([1.0, 0.0, 0.0, 0.0]), 0.0
    opcount.tally(divs=1, muls=4)
    return q4 / r, r


# ---------------------------------------------------------------------------
# Realifying reflector: the workhorse of the bulge chase. Maps a quaternion
# vector f to sigma e1 with sigma = ||f|| >= 0 real. Realized as the
# projector I - v v^* (with ||v||^2 = 2 after prescaling) composed with one
# unit quaternion phase on the leading coordinate.

@dataclass
class HouseVec:
    m: int
    v: np.ndarray | None      # (4, m), prescaled so P -= v (v^* P)
    g: np.ndarray | None      # (4,), leading-coordinate phase, unit
    sigma: float
    identity: bool


def realifying_reflector(f: np.ndarray) -> HouseVec:
    """Build the transform W with W^* f = ||f|| e1 (real, nonnegative)."""
    f = np.asarray(f, dtype=float)
    m = f.shape[1]
    sig2 = float(np.einsum("km,km->", f, f))
    opcount.tally(muls=4 * m, adds=4 * m - 1, sqrts=1)
    sigma = math.sqrt(sig2)
    if sigma == 0.0:
        return HouseVec(m, None, None, 0.0, True)
    f0 = f[:, 0]
    a2 = float(f0 @ f0)
    a0 = math.sqrt(a2)
    opcount.tally(muls=4, adds=3, sqrts=1)
    tail2 = max(sig2 - a2, 0.0)
    if tail2 <= (8.0 * _EPS * sigma) ** 2 and f0[0] >= 0.0 \
            and a2 - f0[0] * f0[0] <= (8.0 * _EPS * sigma) ** 2:
        # already sigma e1 up to roundoff
        return HouseVec(m, None, None, sigma, True)
    if a0 > 0.0:
        phase = f0 / a0
        opcount.tally(divs=1, muls=4)
    else:
        phase = np.array([1.0, 0.0, 0.0, 0.0])
    # v = f - alpha e1 with alpha = -phase * sigma never cancels; right
    # scaling v by conj(phase) leaves the projector unchanged and makes
    # the leading entry the real value a0 + sigma
    v = qmul(f, qconj(phase).reshape(4, 1))
    v[0, 0] = a0 + sigma
    v[1:, 0] = 0.0
    scale = 1.0 / math.sqrt(sigma * (sigma + a0))
    v *= scale
    opcount.tally(muls=4 * m + 2, adds=1, divs=1, sqrts=1)
    g = -phase
    return HouseVec(m, v, g, sigma, False)


def _house_left(d, hv: HouseVec, r0, c0, c1) -> None:
    """Apply W^* from the left to rows r0..r0+m-1, cols c0..c1-1."""
    if hv.identity:
        return
    if hv.v is not None:
        _qrefl_left(d, hv.v, r0, c0, c1)
    if hv.g is not None:
        _phase_row(d, hv.g, r0, c0, c1, conj_g=True)


def _house_right(d, hv: HouseVec, c0, r0, r1) -> None:
    """Apply W from the right to cols c0..c0+m-1, rows r0..r1-1."""
    if hv.identity:
        return
    if hv.v is not None:
        _qrefl_right(d, hv.v, c0, r0, r1)
    if hv.g is not None:
        _phase_col(d, hv.g, c0, r0, r1, conj_g=False)


# ---------------------------------------------------------------------------
# Public Householder API

@dataclass
class HouseholderQ:
    """One of the four Householder style transforms.

    ``u`` is the constructing vector (unit for H1/H3/H4; for H2 it carries
    the textbook normalization with ||u||^2 = 2). ``beta`` is the rank-one
    coefficient. ``xi`` is the H2 phase; ``phases`` holds the diagonal unit
    quaternions of the H3/H4 factor G.
    """

    variant: HouseholderVariant
    m: int
    u: np.ndarray | None            # (4, m)
    beta: float
    xi: Quaternion | None = None
    phases: np.ndarray | None = None  # (4, m)

    @property
    def is_identity(self) -> bool:
        return self.beta == 0.0 and self.xi is None and self.phases is None

    def as_matrix(self) -> QuatMatrix:
        ident = QuatMatrix.eye(self.m)
        return apply_householder_left(ident, self)


def _as_qvec(y) -> np.ndarray:
    if isinstance(y, QuatMatrix):
        if y.cols != 1:
            raise ValueError("expected a column vector")
        return y.data[:, :, 0].astype(float, copy=True)
    arr = np.asarray(y, dtype=float)
    if arr.ndim == 1:
        arr = np.stack((arr, np.zeros_like(arr), np.zeros_like(arr),
                        np.zeros_like(arr)))
    if arr.ndim != 2 or arr.shape[0] != 4:
        raise ValueError(f"expected quaternion vector of shape (4, m), got"
                         f" {arr.shape}")
    return arr.copy()


def _target_vector(v, m: int) -> np.ndarray:
    if v is None:
        t = np.zeros(m)
        t[0] = 1.0
        return t
    t = np.asarray(v, dtype=float).reshape(m)
    nv = np.linalg.norm(t)
    if abs(nv - 1.0) > 1e-12:
        raise ValueError("target direction must be a unit real vector")
    return t


def make_householder(y, variant=HouseholderVariant.H1, v=None) -> HouseholderQ:
    """Construct the transform of the requested variant sending y toward
    the real direction v (default e1).

    H1 maps y to alpha v with a quaternion alpha, |alpha| = ||y||; H2, H3,
    and H4 map y to ||y|| v with a real nonnegative leading coefficient.
    A zero y is rejected; a y already equal to its target produces the
    identity transform (beta = 0).
    """
    if isinstance(variant, str):
        variant = HouseholderVariant(variant.lower())
    yv = _as_qvec(y)
    m = yv.shape[1]
    t = _target_vector(v, m)
    ny = math.sqrt(float(np.einsum("km,km->", yv, yv)))
    opcount.tally(muls=4 * m, adds=4 * m - 1, sqrts=1)
    if ny == 0.0:
        raise ValueError("cannot build a Householder transform from the"
                         " zero vector")

    w = yv @ t  # quaternion y^T v, shape (4,)
    opcount.tally(muls=4 * m, adds=4 * (m - 1))
    aw = math.sqrt(float(w @ w))
    opcount.tally(muls=4, adds=3, sqrts=1)

    # y already equal to the resolved target: identity transform
    rest2 = float(np.einsum("km,km->", yv, yv)) - float(w @ w)

    if variant == HouseholderVariant.H1:
        if rest2 <= (4.0 * _EPS * ny) ** 2 * m:
            # alpha = y^T v keeps x = y exactly; nothing to do
            return HouseholderQ(variant, m, None, 0.0)
        if aw > 0.0:
            alpha = -(w / aw) * ny
            opcount.tally(divs=1, muls=8)
        else:
            alpha = np.array([ny, 0.0, 0.0, 0.0])
        u = yv - np.outer(alpha, t)
        nu = math.sqrt(float(np.einsum("km,km->", u, u)))
        opcount.tally(muls=8 * m, adds=8 * m, sqrts=1, divs=1)
        u /= nu
        return HouseholderQ(variant, m, u, 2.0)

    if variant == HouseholderVariant.H2:
        aligned = yv - np.outer(np.array([ny, 0.0, 0.0, 0.0]), t)
        if float(np.einsum("km,km->", aligned, aligned)) \
                <= (4.0 * _EPS * ny) ** 2 * m:
            return HouseholderQ(variant, m, None, 0.0)
        if aw == 0.0:
            xi = Quaternion(1.0)
            xiv = np.array([1.0, 0.0, 0.0, 0.0])
        else:
            xiv = -(w / aw)
            xi = Quaternion.from_array(xiv)
            opcount.tally(divs=1, muls=4)
        diff = yv - np.outer(xiv * ny, t)
        nd2 = ny * (ny + aw)
        if nd2 <= 0.0 or float(np.einsum("km,km->", diff, diff)) \
                <= (4.0 * _EPS * ny) ** 2 * m:
            return HouseholderQ(variant, m, None, 0.0)
        u = diff / math.sqrt(nd2)
        opcount.tally(muls=8 * m + 4, adds=4 * m + 1, divs=1, sqrts=1)
        return HouseholderQ(variant, m, u, 1.0, xi=xi)

    if variant == HouseholderVariant.H3:
        mods = np.sqrt(qabs2(yv))
        opcount.tally(sqrts=m)
        # diagonal phases g_l = conj(y_l)/|y_l| rotate each entry to |y_l|
        phases = np.where(mods > 0.0,
                          qconj(yv) / np.where(mods > 0, mods, 1.0),
                          np.array([1.0, 0, 0, 0]).reshape(4, 1))
        opcount.tally(divs=m, muls=3 * m)
        gy = mods  # G y has real entries |y_l|
        diff = gy - ny * t
        nd = np.linalg.norm(diff)
        opcount.tally(muls=3 * m, adds=3 * m, sqrts=1)
        if nd <= 4.0 * _EPS * ny * m:
            u = None
            beta = 0.0
            # pure phase transform; keep phases so the image is realified
            if np.allclose(phases[0], 1.0) and np.allclose(phases[1:], 0.0):
                return HouseholderQ(variant, m, None, 0.0)
            return HouseholderQ(variant, m, None, 0.0, phases=phases)
        u4 = np.zeros((4, m))
        u4[0] = diff / nd
        opcount.tally(divs=1, muls=m)
        return HouseholderQ(variant, m, u4, 2.0, phases=phases)

    if variant == HouseholderVariant.H4:
        core = make_householder(yv, HouseholderVariant.H1, t)
        z = yv.copy()
        if not core.is_identity:
            zp = yv[:, :, None].copy()
            _qrefl_left(zp, core.u * math.sqrt(2.0), 0, 0, 1)
            z = zp[:, :, 0]
        mods = np.sqrt(qabs2(z))
        opcount.tally(sqrts=m)
        phases = np.where(mods > 1e-300,
                          qconj(z) / np.where(mods > 1e-300, mods, 1.0),
                          np.array([1.0, 0, 0, 0]).reshape(4, 1))
        opcount.tally(divs=m, muls=3 * m)
        if core.is_identity and np.allclose(phases[0], 1.0) \
                and np.allclose(phases[1:], 0.0):
            return HouseholderQ(variant, m, None, 0.0)
        return HouseholderQ(variant, m, core.u, core.beta, phases=phases)

    raise ValueError(f"unknown variant {variant!r}")


def _check_range(rng, n: int, what: str) -> tuple[int, int]:
    if rng is None:
        return 0, n
    if isinstance(rng, slice):
        start, stop, step = rng.indices(n)
        if step != 1:
            raise ValueError(f"{what} range must be contiguous")
        return start, stop
    start, stop = int(rng[0]), int(rng[1])
    if not (0 <= start <= stop <= n):
        raise ValueError(f"{what} range ({start}, {stop}) out of bounds"
                         f" for size {n}")
    return start, stop


def _hq_left(d, h: HouseholderQ, r0, c0, c1, adjoint: bool) -> None:
    var = h.variant
    if var == HouseholderVariant.H1:
        if h.u is not None:
            _qrefl_left(d, h.u * math.sqrt(h.beta), r0, c0, c1)
        return
    if var == HouseholderVariant.H2:
        if h.u is None and h.xi is None:
            return
        xiv = h.xi.array if h.xi is not None else np.array([1.0, 0, 0, 0])
        if adjoint:
            # M^* Y = (I - u u^*) (xi Y)
            _scale_panel(d, xiv, r0, r0 + h.m, c0, c1, "left")
            if h.u is not None:
                _qrefl_left(d, h.u, r0, c0, c1)
        else:
            # M Y = (1/xi) (Y - u (u^* Y)) and 1/xi = conj(xi)
            if h.u is not None:
                _qrefl_left(d, h.u, r0, c0, c1)
            _scale_panel(d, xiv, r0, r0 + h.m, c0, c1, "left", conj_s=True)
        return
    if var == HouseholderVariant.H3:
        if adjoint:
            # M^* = G^* (I - 2 u u^T)
            if h.u is not None:
                _rhouse_left(d, h.u[0], h.beta, r0, c0, c1)
            if h.phases is not None:
                _diag_phase_rows(d, h.phases, r0, c0, c1, conj_g=True)
        else:
            # M = (I - 2 u u^T) G
            if h.phases is not None:
                _diag_phase_rows(d, h.phases, r0, c0, c1, conj_g=False)
            if h.u is not None:
                _rhouse_left(d, h.u[0], h.beta, r0, c0, c1)
        return
    if var == HouseholderVariant.H4:
        if adjoint:
            # M^* = (I - 2 u u^*) G^*
            if h.phases is not None:
                _diag_phase_rows(d, h.phases, r0, c0, c1, conj_g=True)
            if h.u is not None:
                _qrefl_left(d, h.u * math.sqrt(h.beta), r0, c0, c1)
        else:
            if h.u is not None:
                _qrefl_left(d, h.u * math.sqrt(h.beta), r0, c0, c1)
            if h.phases is not None:
                _diag_phase_rows(d, h.phases, r0, c0, c1, conj_g=False)
        return
    raise ValueError(f"unknown variant {var!r}")


def _hq_right(d, h: HouseholderQ, c0, r0, r1, adjoint: bool) -> None:
    var = h.variant
    if var == HouseholderVariant.H1:
        if h.u is not None:
            _qrefl_right(d, h.u * math.sqrt(h.beta), c0, r0, r1)
        return
    if var == HouseholderVariant.H2:
        if h.u is None and h.xi is None:
            return
        xiv = h.xi.array if h.xi is not None else np.array([1.0, 0, 0, 0])
        if adjoint:
            # Y M^* = (Y (I - u u^*)) . xi  (entrywise right scale)
            if h.u is not None:
                _qrefl_right(d, h.u, c0, r0, r1)
            _scale_panel(d, xiv, r0, r1, c0, c0 + h.m, "right")
        else:
            # Y M = (Y . conj(xi)) (I - u u^*)
            _scale_panel(d, xiv, r0, r1, c0, c0 + h.m, "right", conj_s=True)
            if h.u is not None:
                _qrefl_right(d, h.u, c0, r0, r1)
        return
    if var == HouseholderVariant.H3:
        if adjoint:
            # Y M^* = (Y G^*) (I - 2 u u^T)
            if h.phases is not None:
                _diag_phase_cols(d, h.phases, c0, r0, r1, conj_g=True)
            if h.u is not None:
                _rhouse_right(d, h.u[0], h.beta, c0, r0, r1)
        else:
            if h.u is not None:
                _rhouse_right(d, h.u[0], h.beta, c0, r0, r1)
            if h.phases is not None:
                _diag_phase_cols(d, h.phases, c0, r0, r1, conj_g=False)
        return
    if var == HouseholderVariant.H4:
        if adjoint:
            # Y M^* = (Y (I-2uu^*)) ... with M^* = H1 G^*: Y H1 then G^*
            if h.u is not None:
                _qrefl_right(d, h.u * math.sqrt(h.beta), c0, r0, r1)
            if h.phases is not None:
                _diag_phase_cols(d, h.phases, c0, r0, r1, conj_g=True)
        else:
            # Y M = (Y G) H1
            if h.phases is not None:
                _diag_phase_cols(d, h.phases, c0, r0, r1, conj_g=False)
            if h.u is not None:
                _qrefl_right(d, h.u * math.sqrt(h.beta), c0, r0, r1)
        return
    raise ValueError(f"unknown variant {var!r}")


def apply_householder_left(a: QuatMatrix, h: HouseholderQ, rows=None,
                           cols=None, adjoint: bool = False) -> QuatMatrix:
    """Overwrite the selected panel of ``a`` with the transform applied
    from the left (its adjoint when ``adjoint``), and return ``a``.

    The row range must span exactly the transform size m; updates are
    rank-one block operations on the four real blocks.
    """
    r0, r1 = _check_range(rows, a.rows, "row")
    c0, c1 = _check_range(cols, a.cols, "col")
    if r1 - r0 != h.m:
        raise ValueError(f"row range spans {r1 - r0} rows, transform"
                         f" size is {h.m}")
    _hq_left(a.data, h, r0, c0, c1, adjoint)
    return a


def apply_householder_right(a: QuatMatrix, h: HouseholderQ, rows=None,
                            cols=None, adjoint: bool = False) -> QuatMatrix:
    """Right-side counterpart of :func:`apply_householder_left`."""
    r0, r1 = _check_range(rows, a.rows, "row")
    c0, c1 = _check_range(cols, a.cols, "col")
    if c1 - c0 != h.m:
        raise ValueError(f"col range spans {c1 - c0} cols, transform"
                         f" size is {h.m}")
    _hq_right(a.data, h, c0, r0, r1, adjoint)
    return a


# ---------------------------------------------------------------------------
# 4x4 real rotation realifying one quaternion entry

@dataclass
class JRSGivens4:
    """4x4 orthogonal rotation built from the unit phase of a quaternion.

    ``g`` equals the real expansion of q/|q|; applying g^T to the
    coefficient vector (w, -y, -x, -z) of q yields (|q|, 0, 0, 0). Used as
    a two-sided similarity it rewrites one matrix entry as its modulus.
    """

    g: np.ndarray
    phase: Quaternion


def jrs_givens4(q) -> JRSGivens4:
    if isinstance(q, Quaternion):
        q4 = q.array
    else:
        q4 = np.asarray(q, dtype=float).reshape(4)
    g4, r = _unit_phase(q4)
    w, x, y, z = g4
    g = np.array([
        [w, y, x, z],
        [-y, w, z, -x],
        [-x, -z, w, y],
        [-z, x, -y, w],
    ])
    return JRSGivens4(g, Quaternion.from_array(g4))


# ---------------------------------------------------------------------------
# Quaternion Givens rotations

class GivensVariant(enum.Enum):
    G1 = "g1"
    G2 = "g2"


@dataclass
class GivensG2:
    """2x2 unitary quaternion rotation with G^* x = [r, 0]^T."""

    g11: Quaternion
    g12: Quaternion
    g21: Quaternion
    g22: Quaternion
    variant: GivensVariant = GivensVariant.G2

    def as_matrix(self) -> QuatMatrix:
        d = np.zeros((4, 2, 2))
        d[:, 0, 0] = self.g11.array
        d[:, 0, 1] = self.g12.array
        d[:, 1, 0] = self.g21.array
        d[:, 1, 1] = self.g22.array
        return QuatMatrix._wrap(d)

    def components(self) -> np.ndarray:
        return self.as_matrix().data


def givens_g2_components(x1: np.ndarray, x2: np.ndarray):
    """Vectorized G2 construction for stacked quaternions x1, x2 (4, N).

    Assumes every x2 is nonzero (the generic case); returns the four
    component arrays (g11, g12, g21, g22), each of shape (4, N).
    """
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    n = x1.shape[1]
    s1 = np.einsum("kn,kn->n", x1, x1)
    s2 = np.einsum("kn,kn->n", x2, x2)
    r = np.sqrt(s1 + s2)
    inv = 1.0 / r
    g11 = x1 * inv
    g21 = x2 * inv
    a1 = np.sqrt(s1) * inv   # |g11|
    a2 = np.sqrt(s2) * inv   # |g21|
    low = s1 <= s2           # the |x1| <= |x2| branch
    # g22 = -g21 conj(g11) / |g21| on the low branch,
    # g12 = -g11 conj(g21) / |g11| on the other
    p2211 = qmul(g21, g11, conj_b=True)
    p1221 = qmul(g11, g21, conj_b=True)
    safe_a2 = np.where(a2 > 0, a2, 1.0)
    safe_a1 = np.where(a1 > 0, a1, 1.0)
    g12 = np.where(low, np.concatenate(([a2], np.zeros((3, n)))),
                   -p1221 / safe_a1)
    g22 = np.where(low, -p2211 / safe_a2,
                   np.concatenate(([a1], np.zeros((3, n)))))
    if opcount.counting():
        opcount.tally(muls=(8 + 8 + 2 + 4) * n, adds=7 * n,
                      divs=(1 + 1) * n, sqrts=(1 + 1) * n)
    return g11, g12, g21, g22


def _givens_g2_scalar(x1: np.ndarray, x2: np.ndarray) -> GivensG2:
    s2 = float(x2 @ x2)
    opcount.tally(muls=4, adds=3)
    if s2 == 0.0:
        # degenerate: identity composed with the phase making x1 real
        g, r = _unit_phase(x1)
        return GivensG2(Quaternion.from_array(g), Quaternion(),
                        Quaternion(), Quaternion(1.0))
    if np.all(x2[1:] == 0.0):
        # real x2 shortcut: |x2| and the branch products need no
        # quaternion arithmetic
        s1 = float(x1 @ x1)
        r = math.sqrt(s1 + s2)
        inv = 1.0 / r
        g11 = x1 * inv
        g21v = x2[0] * inv
        opcount.tally(muls=4 + 4 + 1, adds=3 + 1, divs=1, sqrts=1)
        if s1 <= s2:
            a2 = abs(g21v)
            sgn = 1.0 if g21v >= 0 else -1.0
            g12 = np.array([a2, 0.0, 0.0, 0.0])
            g22 = -sgn * np.array([g11[0], -g11[1], -g11[2], -g11[3]])
            opcount.tally(muls=4)
        else:
            a1 = math.sqrt(s1) * inv
            opcount.tally(muls=1, sqrts=1)
            g22 = np.array([a1, 0.0, 0.0, 0.0])
            scale = -g21v / a1 if a1 > 0 else 0.0
            g12 = scale * np.array([g11[0], -g11[1], -g11[2], -g11[3]])
            opcount.tally(muls=4, divs=1)
        g21 = np.array([g21v, 0.0, 0.0, 0.0])
        return GivensG2(*(Quaternion.from_array(v)
                          for v in (g11, g12, g21, g22)))
    g11, g12, g21, g22 = (c[:, 0] for c in givens_g2_components(
        x1.reshape(4, 1), x2.reshape(4, 1)))
    return GivensG2(*(Quaternion.from_array(v)
                      for v in (g11, g12, g21, g22)))


def _givens_g1_scalar(x1: np.ndarray, x2: np.ndarray) -> GivensG2:
    s1 = float(x1 @ x1)
    s2 = float(x2 @ x2)
    r = math.sqrt(s1 + s2)
    opcount.tally(muls=8, adds=7, sqrts=1)
    if r == 0.0:
        raise ValueError("cannot build a Givens rotation from the zero"
                         " vector")
    # sigma from the first nonzero component; dependence over the reals
    # (x2 = lambda x1) leaves sigma free and we take sigma = 1
    cross = qmul(x2.reshape(4, 1), x1.reshape(4, 1), conj_b=True)[:, 0]
    if s1 == 0.0 or s2 == 0.0 or np.linalg.norm(cross[1:]) \
            <= 16 * _EPS * math.sqrt(s1 * s2):
        sigma = np.array([1.0, 0.0, 0.0, 0.0])
    else:
        sigma = x1 / math.sqrt(s1)
        opcount.tally(divs=1, muls=4, sqrts=1)
    inv = 1.0 / r
    opcount.tally(divs=1)
    c = qmul(sigma.reshape(4, 1), (x1 * inv).reshape(4, 1),
             conj_b=True)[:, 0]
    s = -qmul(sigma.reshape(4, 1), (x2 * inv).reshape(4, 1),
              conj_b=True)[:, 0]
    opcount.tally(muls=8)
    # G1 = [[conj(c), s], [-conj(s), c]]
    return GivensG2(Quaternion.from_array(qconj(c)),
                    Quaternion.from_array(s),
                    Quaternion.from_array(-qconj(s)),
                    Quaternion.from_array(c),
                    GivensVariant.G1)


def make_givens(x, variant=GivensVariant.G2) -> GivensG2:
    """Build a 2x2 unitary quaternion rotation from a 2-vector.

    G2 satisfies G^* x = [||x||, 0]^T with a real nonnegative leading
    image; G1 yields sigma ||x|| in the leading slot for a unit quaternion
    sigma. A zero x is rejected; for G2 with x2 = 0 the rotation reduces to
    the identity composed with the phase that makes x1 real nonnegative.
    """
    if isinstance(variant, str):
        variant = GivensVariant(variant.lower())
    xv = _as_qvec(x)
    if xv.shape[1] != 2:
        raise ValueError(f"expected a 2-vector, got length {xv.shape[1]}")
    x1, x2 = xv[:, 0].copy(), xv[:, 1].copy()
    if not (np.any(x1) or np.any(x2)):
        raise ValueError("cannot build a Givens rotation from the zero"
                         " vector")
    if variant == GivensVariant.G2:
        return _givens_g2_scalar(x1, x2)
    return _givens_g1_scalar(x1, x2)
