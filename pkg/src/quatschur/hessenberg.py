"""Reduction of a square quaternion matrix to upper Hessenberg form with
real block structure: B0 upper Hessenberg and B1, B2, B3 upper triangular.

Three methods are provided. ``h1`` sweeps full quaternion reflectors and
leaves quaternion entries on the subdiagonal (B1..B3 keep nonzero
subdiagonals). ``h2`` runs the same sweep and then rotates every
subdiagonal entry to a nonnegative real number with one 4D phase rotation
per entry. ``h3`` interleaves per-entry phase rotations with one real
Householder per column, producing nonnegative real subdiagonals directly.
Entries annihilated by a method are written as exact zeros.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import opcount
from .qcore import QuatMatrix, adjoint, fro_norm, mat_mul, qconj, qmul
from .rotations import (
    _diag_phase_cols,
    _diag_phase_rows,
    _phase_col,
    _phase_row,
    _qrefl_left,
    _qrefl_right,
    _rhouse_left,
    _rhouse_right,
)

__all__ = ["HessMethod", "HessenbergResult", "hess_reduce",
           "tridiag_hermitian"]

_EPS = np.finfo(float).eps


class HessMethod(enum.Enum):
    H1 = "h1"
    H2 = "h2"
    H3 = "h3"


@dataclass
class HessenbergResult:
    """Reduced matrix H, optional unitary accumulator W with W^* Q W = H,
    the method used, and the real subdiagonal of B0."""

    H: QuatMatrix
    W: QuatMatrix | None
    method: HessMethod
    subdiag: np.ndarray


def _eye_data(n: int) -> np.ndarray:
    d = np.zeros((4, n, n))
    d[0] = np.eye(n)
    return d


def _h1_vector(y: np.ndarray):
    """Reflector data for one column sweep: returns (v, alpha, identity).

    v is prescaled so the update is P -= v (v^* P); alpha is the quaternion
    the leading entry maps to. When the tail of y is negligible the
    transform degenerates to the identity and alpha = y[0].
    """
    m = y.shape[1]
    tot2 = float(np.einsum("km,km->", y, y))
    opcount.tally(muls=4 * m, adds=4 * m - 1)
    ny = math.sqrt(tot2)
    opcount.tally(sqrts=1)
    if ny == 0.0:
        return None, np.zeros(4), True
    a2 = float(y[:, 0] @ y[:, 0])
    tail2 = max(tot2 - a2, 0.0)
    if tail2 <= (4.0 * _EPS * ny) ** 2:
        # keep alpha = y0 so the target equals y exactly
        return None, y[:, 0].copy(), True
    a0 = math.sqrt(a2)
    opcount.tally(muls=4, adds=4, sqrts=1)
    if a0 > 0.0:
        phase = y[:, 0] / a0
        opcount.tally(divs=1, muls=4)
    else:
        phase = np.array([1.0, 0.0, 0.0, 0.0])
    alpha = -phase * ny
    opcount.tally(muls=4)
    v = y.copy()
    v[:, 0] -= alpha
    # ||v||^2 = 2 ny (ny + |y0|); prescale so that beta folds into v
    scale = 1.0 / math.sqrt(ny * (ny + a0))
    v *= scale
    opcount.tally(muls=4 * m + 1, adds=5, divs=1, sqrts=1)
    return v, alpha, False


def _reduce_h1(d: np.ndarray, w: np.ndarray | None) -> None:
    n = d.shape[1]
    for s in range(1, n - 1):
        y = d[:, s:, s - 1].copy()
        v, alpha, ident = _h1_vector(y)
        # the annihilated column is written exactly
        d[:, s, s - 1] = alpha
        d[:, s + 1:, s - 1] = 0.0
        if ident:
            continue
        _qrefl_left(d, v, s, s, n)
        _qrefl_right(d, v, s, 0, n)
        if w is not None:
            _qrefl_right(w, v, s, 0, n)


def _realify_subdiag(d: np.ndarray, w: np.ndarray | None) -> None:
    """Rotate each subdiagonal entry to |entry| >= 0 by a phase similarity."""
    n = d.shape[1]
    for s in range(1, n):
        q = d[:, s, s - 1].copy()
        r2 = float(q @ q)
        opcount.tally(muls=4, adds=3)
        if r2 == 0.0:
            d[:, s, s - 1] = 0.0
            continue
        if q[1] == 0.0 and q[2] == 0.0 and q[3] == 0.0 and q[0] > 0.0:
            continue
        r = math.sqrt(r2)
        g = q / r
        opcount.tally(sqrts=1, divs=1, muls=4)
        d[0, s, s - 1] = r
        d[1:, s, s - 1] = 0.0
        _phase_row(d, g, s, s, n, conj_g=True)
        _phase_col(d, g, s, 0, n)
        if w is not None:
            _phase_col(w, g, s, 0, n)


def _real_house_vector(x: np.ndarray):
    """Real reflector with target +||x|| e1, cancellation safe."""
    m = x.shape[0]
    tail2 = float(x[1:] @ x[1:])
    nx2 = tail2 + x[0] * x[0]
    opcount.tally(muls=m, adds=m)
    if nx2 == 0.0:
        return None, 0.0, 0.0
    nx = math.sqrt(nx2)
    opcount.tally(sqrts=1)
    if tail2 == 0.0 and x[0] > 0.0:
        return None, 0.0, nx
    v = x.copy()
    if x[0] <= 0.0:
        v[0] = x[0] - nx
    else:
        v[0] = -tail2 / (x[0] + nx)
    v2 = tail2 + v[0] * v[0]
    beta = 2.0 / v2
    opcount.tally(muls=2, adds=3, divs=2)
    return v, beta, nx


def _reduce_h3(d: np.ndarray, w: np.ndarray | None) -> None:
    n = d.shape[1]
    ident4 = np.array([1.0, 0.0, 0.0, 0.0]).reshape(4, 1)
    for s in range(n - 1):
        col = d[:, s + 1:, s]
        r2 = np.einsum("kt,kt->t", col, col)
        r = np.sqrt(r2)
        t = col.shape[1]
        opcount.tally(muls=4 * t, adds=3 * t, sqrts=t)
        trivial = (col[0] == r) & (col[1] == 0) & (col[2] == 0) & (col[3] == 0)
        if not np.all(trivial):
            g = np.where(r > 0.0, col / np.where(r > 0.0, r, 1.0), ident4)
            opcount.tally(divs=t, muls=3 * t)
            _diag_phase_rows(d, g, s + 1, s, n, conj_g=True)
            _diag_phase_cols(d, g, s + 1, 0, n)
            if w is not None:
                _diag_phase_cols(w, g, s + 1, 0, n)
        d[0, s + 1:, s] = r
        d[1:, s + 1:, s] = 0.0
        if s < n - 2:
            u, beta, nx = _real_house_vector(d[0, s + 1:, s].copy())
            d[0, s + 1, s] = nx
            d[0, s + 2:, s] = 0.0
            if u is None:
                continue
            _rhouse_left(d, u, beta, s + 1, s + 1, n)
            _rhouse_right(d, u, beta, s + 1, 0, n)
            if w is not None:
                _rhouse_right(w, u, beta, s + 1, 0, n)


def hess_reduce(q: QuatMatrix, method=HessMethod.H3,
                accumulate: bool = True) -> HessenbergResult:
    """Reduce a square quaternion matrix to upper Hessenberg form by a
    unitary similarity W^* Q W = H, optionally accumulating W.

    Methods ``h2`` and ``h3`` leave a nonnegative real subdiagonal with
    exact zeros in the B1..B3 subdiagonals; ``h1`` leaves quaternion
    subdiagonal entries. For n <= 2 there is nothing to annihilate beyond
    the subdiagonal phase normalization of h2/h3.
    """
    if isinstance(method, str):
        method = HessMethod(method.lower())
    if q.rows != q.cols:
        raise ValueError(f"matrix must be square, got {q.rows}x{q.cols}")
    n = q.rows
    d = q.data.copy()
    w = _eye_data(n) if accumulate else None
    if n > 2:
        if method == HessMethod.H1:
            _reduce_h1(d, w)
        elif method == HessMethod.H2:
            _reduce_h1(d, w)
            _realify_subdiag(d, w)
        else:
            _reduce_h3(d, w)
    elif n == 2 and method in (HessMethod.H2, HessMethod.H3):
        _realify_subdiag(d, w)
    sub = np.diagonal(d[0], -1).copy()
    return HessenbergResult(
        QuatMatrix._wrap(d),
        QuatMatrix._wrap(w) if w is not None else None,
        method,
        sub,
    )


def tridiag_hermitian(q: QuatMatrix) -> tuple[np.ndarray, QuatMatrix]:
    """Reduce a Hermitian quaternion matrix to a real symmetric
    tridiagonal T0 with W^* Q W = T0 (as a quaternion matrix with zero
    imaginary blocks). Returns (T0, W).

    The eigenvalues of Q are exactly the eigenvalues of T0. Rejects inputs
    whose measured asymmetry ||Q - Q^*|| exceeds 8 eps ||Q||.
    """
    if q.rows != q.cols:
        raise ValueError(f"matrix must be square, got {q.rows}x{q.cols}")
    nq = fro_norm(q)
    asym = fro_norm(q - adjoint(q))
    if asym > 8.0 * _EPS * max(nq, 1e-300):
        raise ValueError(f"matrix is not Hermitian: ||Q - Q^*|| = {asym:.3e}"
                         f" exceeds {8.0 * _EPS * nq:.3e}")
    res = hess_reduce(q, HessMethod.H3, accumulate=True)
    n = q.rows
    t0 = np.zeros((n, n))
    idx = np.arange(n)
    t0[idx, idx] = res.H.b0.diagonal()
    if n > 1:
        t0[idx[1:], idx[:-1]] = res.subdiag
        t0[idx[:-1], idx[1:]] = res.subdiag
    return t0, res.W
