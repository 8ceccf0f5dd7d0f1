"""Quaternion scalars and block-stored quaternion matrices.

A quaternion matrix Q = B0 + B1 i + B2 j + B3 k is held as a single
float64 array of shape (4, rows, cols) in row-major (C) order; ``data[s]``
is the real block Bs. This block layout is the only in-memory
representation used anywhere in the library. The 4m x 4n real expansion

    [  B0   B2   B1   B3 ]
    [ -B2   B0   B3  -B1 ]
    [ -B1  -B3   B0   B2 ]
    [ -B3   B1  -B2   B0 ]

is never formed by the solvers; ``expand_counterpart`` exists so that
tests can compare the block kernels against explicit real arithmetic.

Operations in this module are pure: they return fresh values and never
mutate their arguments. Transformation kernels in the other modules work
on private copies of the ``data`` array.
"""

from __future__ import annotations

import enum
import io
import math
from dataclasses import dataclass

import numpy as np

from . import opcount

__all__ = [
    "Quaternion",
    "QuatMatrix",
    "StructureKind",
    "StructureCheck",
    "quat_mul",
    "adjoint",
    "mat_mul",
    "expand_counterpart",
    "complex_adjoint",
    "fro_norm",
    "check_structure",
    "jrs_matrices",
    "read_qmat",
    "write_qmat",
    "QmatFormatError",
]

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class Quaternion:
    """Quaternion w + x i + y j + z k with i^2 = j^2 = k^2 = ijk = -1."""

    w: float = 0.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    @classmethod
    def from_array(cls, a) -> "Quaternion":
        a = np.asarray(a, dtype=float).reshape(4)
        return cls(float(a[0]), float(a[1]), float(a[2]), float(a[3]))

    @property
    def array(self) -> np.ndarray:
        return np.array([self.w, self.x, self.y, self.z])

    def conj(self) -> "Quaternion":
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def __abs__(self) -> float:
        return math.sqrt(self.w * self.w + self.x * self.x
                         + self.y * self.y + self.z * self.z)

    def __add__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion(self.w + other.w, self.x + other.x,
                          self.y + other.y, self.z + other.z)

    def __sub__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion(self.w - other.w, self.x - other.x,
                          self.y - other.y, self.z - other.z)

    def __neg__(self) -> "Quaternion":
        return Quaternion(-self.w, -self.x, -self.y, -self.z)

    def __mul__(self, other):
        if isinstance(other, Quaternion):
            a, b = self, other
            return Quaternion(
                a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
                a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
                a.w * b.y + a.y * b.w + a.z * b.x - a.x * b.z,
                a.w * b.z + a.z * b.w + a.x * b.y - a.y * b.x,
            )
        return Quaternion(self.w * other, self.x * other,
                          self.y * other, self.z * other)

    def __rmul__(self, other):
        # other is a real scalar; reals commute with everything
        return self.__mul__(other)

    def isclose(self, other: "Quaternion", tol: float = 1e-12) -> bool:
        return abs(self - other) <= tol


def quat_mul(a: Quaternion, b: Quaternion) -> Quaternion:
    """Hamilton product a * b (noncommutative)."""
    return a * b


# ---------------------------------------------------------------------------
# Componentwise quaternion arithmetic on arrays of shape (4, ...).
# These helpers carry the operation tallies for all block kernels.

def qmul(a, b, conj_a: bool = False, conj_b: bool = False) -> np.ndarray:
    """Hamilton product of quaternion arrays, broadcasting trailing axes.

    ``a`` and ``b`` have shape (4, ...); conjugation flags flip the sign of
    the imaginary parts of the corresponding factor before multiplying.
    """
    a0, a1, a2, a3 = a[0], a[1], a[2], a[3]
    b0, b1, b2, b3 = b[0], b[1], b[2], b[3]
    if conj_a:
        a1, a2, a3 = -a1, -a2, -a3
    if conj_b:
        b1, b2, b3 = -b1, -b2, -b3
    c0 = a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3
    c1 = a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2
    c2 = a0 * b2 + a2 * b0 + a3 * b1 - a1 * b3
    c3 = a0 * b3 + a3 * b0 + a1 * b2 - a2 * b1
    out = np.stack((c0, c1, c2, c3))
    if opcount.counting():
        p = int(c0.size) if isinstance(c0, np.ndarray) else 1
        opcount.tally(muls=16 * p, adds=12 * p)
    return out


def qconj(a) -> np.ndarray:
    out = np.array(a, dtype=float, copy=True)
    out[1:] = -out[1:]
    return out


def qabs2(a) -> np.ndarray:
    """Squared modulus along the leading quaternion axis."""
    a = np.asarray(a, dtype=float)
    out = np.einsum("k...,k...->...", a, a)
    if opcount.counting():
        p = int(np.asarray(out).size)
        opcount.tally(muls=4 * p, adds=3 * p)
    return out


def qabs(a) -> np.ndarray:
    out = np.sqrt(qabs2(a))
    if opcount.counting():
        opcount.tally(sqrts=int(np.asarray(out).size))
    return out


class QuatMatrix:
    """An m x n quaternion matrix stored as four real blocks.

    ``data`` has shape (4, m, n); ``data[0]`` is the real part, ``data[1]``,
    ``data[2]``, ``data[3]`` the i, j, k coefficient blocks. Values are
    treated as immutable at this layer: all public operations return fresh
    matrices. Kernel modules copy ``data`` before transforming it.
    """

    __slots__ = ("data",)

    def __init__(self, data):
        arr = np.array(data, dtype=float, copy=True, order="C")
        if arr.ndim != 3 or arr.shape[0] != 4:
            raise ValueError(f"expected shape (4, m, n), got {arr.shape}")
        self.data = arr

    @classmethod
    def _wrap(cls, data: np.ndarray) -> "QuatMatrix":
        # internal constructor taking ownership of a ready (4, m, n) array
        obj = object.__new__(cls)
        obj.data = data
        return obj

    @classmethod
    def from_blocks(cls, b0, b1=None, b2=None, b3=None) -> "QuatMatrix":
        b0 = np.atleast_2d(np.asarray(b0, dtype=float))
        parts = [b0]
        for b in (b1, b2, b3):
            if b is None:
                parts.append(np.zeros_like(b0))
            else:
                b = np.atleast_2d(np.asarray(b, dtype=float))
                if b.shape != b0.shape:
                    raise ValueError(
                        f"block shapes differ: {b.shape} vs {b0.shape}")
                parts.append(b)
        return cls._wrap(np.stack(parts))

    @classmethod
    def from_real(cls, b0) -> "QuatMatrix":
        return cls.from_blocks(b0)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "QuatMatrix":
        return cls._wrap(np.zeros((4, rows, cols)))

    @classmethod
    def eye(cls, n: int) -> "QuatMatrix":
        d = np.zeros((4, n, n))
        d[0] = np.eye(n)
        return cls._wrap(d)

    @classmethod
    def from_scalar(cls, q: Quaternion) -> "QuatMatrix":
        return cls._wrap(q.array.reshape(4, 1, 1).copy())

    @property
    def rows(self) -> int:
        return self.data.shape[1]

    @property
    def cols(self) -> int:
        return self.data.shape[2]

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def b0(self) -> np.ndarray:
        return self.data[0]

    @property
    def b1(self) -> np.ndarray:
        return self.data[1]

    @property
    def b2(self) -> np.ndarray:
        return self.data[2]

    @property
    def b3(self) -> np.ndarray:
        return self.data[3]

    def block(self, s: int) -> np.ndarray:
        return self.data[s]

    def entry(self, i: int, j: int) -> Quaternion:
        return Quaternion.from_array(self.data[:, i, j])

    def copy(self) -> "QuatMatrix":
        return QuatMatrix._wrap(self.data.copy())

    def __add__(self, other: "QuatMatrix") -> "QuatMatrix":
        return QuatMatrix._wrap(self.data + other.data)

    def __sub__(self, other: "QuatMatrix") -> "QuatMatrix":
        return QuatMatrix._wrap(self.data - other.data)

    def __mul__(self, scalar: float) -> "QuatMatrix":
        return QuatMatrix._wrap(self.data * float(scalar))

    __rmul__ = __mul__

    def __matmul__(self, other: "QuatMatrix") -> "QuatMatrix":
        return mat_mul(self, other)

    def adjoint(self) -> "QuatMatrix":
        return adjoint(self)

    def fro_norm(self) -> float:
        return fro_norm(self)

    def __repr__(self) -> str:
        return f"QuatMatrix({self.rows}x{self.cols})"


def adjoint(a: QuatMatrix) -> QuatMatrix:
    """Conjugate transpose: B0^T - B1^T i - B2^T j - B3^T k."""
    d = a.data
    out = np.stack((d[0].T, -d[1].T, -d[2].T, -d[3].T))
    return QuatMatrix._wrap(np.ascontiguousarray(out))


def _qmm(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Block product of (4, m, k) with (4, k, n) arrays."""
    # T[s, t] = a[s] @ b[t] for all 16 block pairs in one batched matmul
    t = np.matmul(a[:, None], b[None, :])
    c0 = t[0, 0] - t[1, 1] - t[2, 2] - t[3, 3]
    c1 = t[0, 1] + t[1, 0] + t[2, 3] - t[3, 2]
    c2 = t[0, 2] + t[2, 0] + t[3, 1] - t[1, 3]
    c3 = t[0, 3] + t[3, 0] + t[1, 2] - t[2, 1]
    if opcount.counting():
        m, k = a.shape[1], a.shape[2]
        n = b.shape[2]
        opcount.tally(muls=16 * m * k * n,
                      adds=16 * (k - 1) * m * n + 12 * m * n)
    return np.stack((c0, c1, c2, c3))


def mat_mul(a: QuatMatrix, b: QuatMatrix) -> QuatMatrix:
    """Quaternion matrix product via 16 real block products."""
    if a.cols != b.rows:
        raise ValueError(
            f"dimension mismatch: {a.rows}x{a.cols} @ {b.rows}x{b.cols}")
    return QuatMatrix._wrap(_qmm(a.data, b.data))


def expand_counterpart(a: QuatMatrix) -> np.ndarray:
    """Real 4m x 4n expansion of the block layout. Test utility only."""
    b0, b1, b2, b3 = a.data
    return np.block([
        [b0, b2, b1, b3],
        [-b2, b0, b3, -b1],
        [-b1, -b3, b0, b2],
        [-b3, b1, -b2, b0],
    ])


def complex_adjoint(a: QuatMatrix) -> np.ndarray:
    """Complex 2n x 2n matrix [[C, D], [-conj(D), conj(C)]] of Q = C + D j.

    C = B0 + B1 i and D = B2 + B3 i. The spectrum of this matrix is closed
    under complex conjugation, and its eigenvalues with nonnegative
    imaginary part are the standard eigenvalues of Q.
    """
    if a.rows != a.cols:
        raise ValueError(f"matrix must be square, got {a.rows}x{a.cols}")
    c = a.data[0] + 1j * a.data[1]
    d = a.data[2] + 1j * a.data[3]
    return np.block([[c, d], [-d.conj(), c.conj()]])


def fro_norm(a: QuatMatrix) -> float:
    """Frobenius norm: sqrt of the sum of squares over all four blocks."""
    return float(np.linalg.norm(a.data))


def jrs_matrices(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """The three 4n x 4n sign-permutation matrices J, R, S (test utility).

    A 4m x 4n real matrix M is an expansion of a quaternion matrix exactly
    when J M J^T = R M R^T = S M S^T = M.
    """
    i = np.eye(n)
    z = np.zeros((n, n))
    j = np.block([[z, z, -i, z], [z, z, z, -i], [i, z, z, z], [z, i, z, z]])
    r = np.block([[z, -i, z, z], [i, z, z, z], [z, z, z, i], [z, z, -i, z]])
    s = np.block([[z, z, z, -i], [z, z, i, z], [z, -i, z, z], [i, z, z, z]])
    return j, r, s


# ---------------------------------------------------------------------------
# Structure predicates

class StructureKind(enum.Enum):
    UPPER_JRS_HESSENBERG = "upper_jrs_hessenberg"
    UNREDUCED_UPPER_JRS_HESSENBERG = "unreduced_upper_jrs_hessenberg"
    UPPER_JRS_TRIANGULAR = "upper_jrs_triangular"
    JRS_SCHUR = "jrs_schur"
    HERMITIAN_TRIDIAGONAL_REAL = "hermitian_tridiagonal_real"


@dataclass
class StructureCheck:
    ok: bool
    violation: float
    witness: tuple[int, int, int] | None  # (block, row, col)

    def __bool__(self) -> bool:
        return self.ok


def _max_below(block: np.ndarray, k: int):
    """Max |entry| strictly below diagonal k, with its index."""
    n = block.shape[0]
    mask = np.tril(np.ones((n, n), dtype=bool), k)
    if not mask.any():
        return 0.0, None
    vals = np.where(mask, np.abs(block), 0.0)
    idx = np.unravel_index(int(np.argmax(vals)), vals.shape)
    return float(vals[idx]), (int(idx[0]), int(idx[1]))


def check_structure(a: QuatMatrix, kind: StructureKind,
                    tol: float = 1e-13) -> StructureCheck:
    """Test a block-structure profile; entries of magnitude at most
    tol * fro_norm(a) count as structural zeros.

    ``violation`` is the largest |entry| found outside the allowed profile
    (0 when the profile holds exactly). For the unreduced Hessenberg kind a
    zero subdiagonal entry also fails the check, and for the Schur kind a
    2x2 diagonal bump of B0 whose eigenvalues are real, or two consecutive
    nonzero subdiagonal entries, fail the check with the offending
    subdiagonal magnitude reported.
    """
    if a.rows != a.cols:
        raise ValueError(f"matrix must be square, got {a.rows}x{a.cols}")
    n = a.rows
    d = a.data
    thresh = tol * fro_norm(a)

    if kind in (StructureKind.UPPER_JRS_HESSENBERG,
                StructureKind.UNREDUCED_UPPER_JRS_HESSENBERG):
        offsets = (-2, -1, -1, -1)
    elif kind == StructureKind.UPPER_JRS_TRIANGULAR:
        offsets = (-1, 0, 0, 0)  # B1..B3 strictly upper triangular
    elif kind == StructureKind.JRS_SCHUR:
        offsets = (-2, -1, -1, -1)
    elif kind == StructureKind.HERMITIAN_TRIDIAGONAL_REAL:
        offsets = None
    else:
        raise ValueError(f"unknown structure kind: {kind!r}")

    violation = 0.0
    witness = None
    if offsets is not None:
        for s, off in enumerate(offsets):
            v, idx = _max_below(d[s], off)
            if v > violation:
                violation, witness = v, (s, *idx)
    else:
        # real symmetric tridiagonal B0, zero imaginary blocks
        band = np.tril(np.triu(np.ones((n, n), dtype=bool), -1), 1)
        off_band = np.where(~band, np.abs(d[0]), 0.0)
        asym = np.abs(d[0] - d[0].T)
        for vals, s in ((off_band, 0), (asym, 0), (np.abs(d[1]), 1),
                        (np.abs(d[2]), 2), (np.abs(d[3]), 3)):
            idx = np.unravel_index(int(np.argmax(vals)), vals.shape)
            if float(vals[idx]) > violation:
                violation, witness = float(vals[idx]), (s, *idx)

    ok = violation <= thresh

    if ok and kind == StructureKind.UNREDUCED_UPPER_JRS_HESSENBERG:
        sub = np.abs(np.diagonal(d[0], -1))
        if n > 1 and sub.min(initial=np.inf) <= thresh:
            i = int(np.argmin(sub))
            return StructureCheck(False, violation, (0, i + 1, i))

    if ok and kind == StructureKind.JRS_SCHUR and n > 1:
        sub = np.abs(np.diagonal(d[0], -1)) > thresh
        for i in range(n - 1):
            if not sub[i]:
                continue
            if i + 1 < n - 1 and sub[i + 1]:
                return StructureCheck(False, float(abs(d[0, i + 2, i + 1])),
                                      (0, i + 2, i + 1))
            # isolated 2x2 bump must carry a nonreal complex pair
            disc = (d[0, i, i] - d[0, i + 1, i + 1]) ** 2 \
                + 4.0 * d[0, i, i + 1] * d[0, i + 1, i]
            if disc >= 0.0:
                return StructureCheck(False, float(abs(d[0, i + 1, i])),
                                      (0, i + 1, i))

    return StructureCheck(ok, violation, witness if not ok else witness)


# ---------------------------------------------------------------------------
# QMAT text format

class QmatFormatError(ValueError):
    """Malformed QMAT input; carries the offending 1-based line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


_BLOCK_NAMES = ("B0", "B1", "B2", "B3")


def write_qmat(a: QuatMatrix, path_or_file) -> None:
    """Write the QMAT text format.

    Line 1 is ``QMAT 1 <rows> <cols>``; the four blocks follow in order
    B0, B1, B2, B3, one matrix row per line with entries printed to 17
    significant digits, and a blank line between consecutive blocks.
    """
    close = False
    if isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__"):
        f = open(path_or_file, "w")
        close = True
    else:
        f = path_or_file
    try:
        f.write(f"QMAT 1 {a.rows} {a.cols}\n")
        for s in range(4):
            if s:
                f.write("\n")
            for r in range(a.rows):
                f.write(" ".join(f"{v:.17g}" for v in a.data[s, r]))
                f.write("\n")
    finally:
        if close:
            f.close()


def read_qmat(path_or_file) -> QuatMatrix:
    """Read the QMAT text format written by :func:`write_qmat`."""
    close = False
    if isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__"):
        f = open(path_or_file, "r")
        close = True
    else:
        f = path_or_file
    try:
        lines = f.read().splitlines()
    finally:
        if close:
            f.close()

    if not lines:
        raise QmatFormatError("empty file, expected QMAT header", 1)
    head = lines[0].split()
    if len(head) != 4 or head[0] != "QMAT":
        raise QmatFormatError(f"bad header {lines[0]!r}, expected"
                              " 'QMAT 1 <rows> <cols>'", 1)
    if head[1] != "1":
        raise QmatFormatError(f"unsupported QMAT version {head[1]!r}", 1)
    try:
        rows, cols = int(head[2]), int(head[3])
    except ValueError:
        raise QmatFormatError(f"bad dimensions in header {lines[0]!r}", 1)
    if rows < 1 or cols < 1:
        raise QmatFormatError(f"dimensions must be positive, got"
                              f" {rows}x{cols}", 1)

    data = np.empty((4, rows, cols))
    ln = 1  # 0-based index of the next unread line
    for s in range(4):
        for r in range(rows):
            while ln < len(lines) and not lines[ln].strip():
                ln += 1
            if ln >= len(lines):
                raise QmatFormatError(
                    f"file ended before block {_BLOCK_NAMES[s]} row {r + 1}",
                    len(lines))
            parts = lines[ln].split()
            if len(parts) != cols:
                raise QmatFormatError(
                    f"block {_BLOCK_NAMES[s]} row {r + 1}: expected {cols}"
                    f" entries, got {len(parts)}", ln + 1)
            try:
                data[s, r] = [float(p) for p in parts]
            except ValueError:
                raise QmatFormatError(
                    f"block {_BLOCK_NAMES[s]} row {r + 1}: non-numeric entry",
                    ln + 1)
            ln += 1
    return QuatMatrix._wrap(data)
