"""The circulant polynomial ring R_p = F_q[x]/(x^p - 1) and block matrices over it.

A p x p circulant matrix is identified with the polynomial whose
coefficients are its first row; row r of the matrix is the first row
cyclically right-shifted r times, i.e. entry (r, c) = a_{(c-r) mod p}.
Multiplication of circulants is cyclic convolution of first rows.

Block matrices of circulants (QCMatrix) store one row per block, a
factor-p saving over the dense expansion. Heavy products run batched
cyclic convolutions through a real FFT; coefficients are small enough
(bounded by inner_dim * p * (q-1)^2) that rounding the inverse transform
is exact, which is asserted before taking the fast path.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .field import is_prime

# Largest coefficient magnitude for which float64 FFT round-tripping is
# guaranteed exact (conservative: doubles are exact to 2^53).
_FFT_EXACT_BOUND = 2**52


class DimensionMismatchError(ValueError):
    """Operands disagree on p, q or block geometry."""


# ---------------------------------------------------------------------------
# raw polynomial helpers (coefficient arrays of length p, canonical mod q)
# ---------------------------------------------------------------------------

def _cyc_conv(a: np.ndarray, b: np.ndarray, p: int, q: int) -> np.ndarray:
    """Cyclic convolution of two length-p coefficient arrays, mod q."""
    if p == 1:
        return (a * b) % q
    full = np.convolve(a, b)
    out = full[:p].copy()
    out[: full.size - p] += full[p:]
    return out % q


def _poly_trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_divmod(num: list[int], den: list[int], q: int) -> tuple[list[int], list[int]]:
    """Division with remainder in F_q[x]; inputs/outputs trimmed coefficient lists."""
    num = num[:]
    quot = [0] * max(0, len(num) - len(den) + 1)
    inv_lead = pow(den[-1], -1, q)
    for shift in range(len(num) - len(den), -1, -1):
        coeff = (num[shift + len(den) - 1] * inv_lead) % q
        if coeff:
            quot[shift] = coeff
            for i, d in enumerate(den):
                num[shift + i] = (num[shift + i] - coeff * d) % q
    return _poly_trim(quot), _poly_trim(num)


def _poly_mul_lists(a: list[int], b: list[int], q: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % q
    return _poly_trim(out)


def _poly_sub_lists(a: list[int], b: list[int], q: int) -> list[int]:
    out = [0] * max(len(a), len(b))
    for i, ai in enumerate(a):
        out[i] = ai
    for i, bi in enumerate(b):
        out[i] = (out[i] - bi) % q
    return _poly_trim(out)


def _poly_inv_raw(a: np.ndarray, p: int, q: int) -> np.ndarray | None:
    """Inverse of a(x) in F_q[x]/(x^p - 1) via extended Euclid, or None.

    a is invertible iff gcd(a(x), x^p - 1) = 1.
    """
    A = _poly_trim([int(v) % q for v in a])
    if not A:
        return None
    modulus = [0] * (p + 1)
    modulus[0] = q - 1  # -1
    modulus[p] = 1
    # invariants: r0 = t0*a (mod x^p - 1), r1 = t1*a (mod x^p - 1)
    r0, r1 = modulus, A
    t0, t1 = [], [1]
    while True:
        if len(r1) == 0:
            return None  # gcd landed on earlier non-unit remainder
        if len(r1) == 1:
            break
        quot, rem = _poly_divmod(r0, r1, q)
        r0, r1 = r1, rem
        t0, t1 = t1, _poly_sub_lists(t0, _poly_mul_lists(quot, t1, q), q)
    scale = pow(r1[0], -1, q)
    t1 = [(c * scale) % q for c in t1]
    _, t1 = _poly_divmod(t1, modulus, q) if len(t1) > p else (None, t1)
    out = np.zeros(p, dtype=np.int64)
    out[: len(t1)] = t1
    return out


# ---------------------------------------------------------------------------
# batched block products (cyclic convolution via rfft, exact by bound check)
# ---------------------------------------------------------------------------

def _assert_fft_exact(inner: int, p: int, q: int):
    if inner * p * (q - 1) ** 2 > _FFT_EXACT_BOUND:
        raise OverflowError(
            "block product too large for exact FFT accumulation "
            f"(inner={inner}, p={p}, q={q})"
        )


def _block_matmul(A: np.ndarray, B: np.ndarray, p: int, q: int) -> np.ndarray:
    """(m, k, p) x (k, n, p) -> (m, n, p) with cyclic-convolution block products."""
    inner = A.shape[1]
    _assert_fft_exact(inner, p, q)
    if p == 1:
        return np.einsum("ikp,kjp->ijp", A, B) % q
    fa = np.fft.rfft(A, axis=-1)
    fb = np.fft.rfft(B, axis=-1)
    fc = np.einsum("ikf,kjf->ijf", fa, fb)
    return np.rint(np.fft.irfft(fc, n=p, axis=-1)).astype(np.int64) % q


def _conv_outer(F: np.ndarray, G: np.ndarray, p: int, q: int) -> np.ndarray:
    """(m, p) x (l, p) -> (m, l, p), entry (i, j) = F_i conv G_j (cyclic, mod q)."""
    _assert_fft_exact(1, p, q)
    if p == 1:
        return np.einsum("ip,jp->ijp", F, G) % q
    ff = np.fft.rfft(F, axis=-1)
    fg = np.fft.rfft(G, axis=-1)
    fc = np.einsum("if,jf->ijf", ff, fg)
    return np.rint(np.fft.irfft(fc, n=p, axis=-1)).astype(np.int64) % q


# ---------------------------------------------------------------------------
# dense F_q linear algebra (fallback path and test oracles)
# ---------------------------------------------------------------------------

def gf_matmul(A: np.ndarray, B: np.ndarray, q: int) -> np.ndarray:
    """Dense matrix product over F_q (int64, exact for the sizes used here)."""
    if A.shape[1] * (q - 1) ** 2 > 2**62:
        raise OverflowError("dense product would overflow int64")
    return (A.astype(np.int64) @ B.astype(np.int64)) % q


def gf_inv_dense(M: np.ndarray, q: int) -> np.ndarray | None:
    """Gauss-Jordan inversion over F_q; returns None when M is singular.

    Off-pivot entries are reduced lazily: each elimination step only adds
    products of reduced values, so magnitudes stay below dim * q^2 and a
    single final reduction suffices.
    """
    n = M.shape[0]
    W = np.concatenate([M.astype(np.int64) % q, np.eye(n, dtype=np.int64)], axis=1)
    for col in range(n):
        W[:, col] %= q
        pivots = np.nonzero(W[col:, col])[0]
        if pivots.size == 0:
            return None
        r = col + int(pivots[0])
        if r != col:
            W[[col, r]] = W[[r, col]]
        W[col] %= q
        W[col] = (W[col] * pow(int(W[col, col]), -1, q)) % q
        factors = W[:, col].copy()
        factors[col] = 0
        W -= np.outer(factors, W[col])
    return W[:, n:] % q


def gf_rank(M: np.ndarray, q: int) -> int:
    """Row rank over F_q (test oracle)."""
    W = M.astype(np.int64) % q
    rank = 0
    rows, cols = W.shape
    for col in range(cols):
        piv = np.nonzero(W[rank:, col])[0]
        if piv.size == 0:
            continue
        r = rank + int(piv[0])
        if r != rank:
            W[[rank, r]] = W[[r, rank]]
        W[rank] = (W[rank] * pow(int(W[rank, col]), -1, q)) % q
        others = np.nonzero(W[:, col])[0]
        for s in others:
            if s != rank:
                W[s] = (W[s] - W[s, col] * W[rank]) % q
        rank += 1
        if rank == rows:
            break
    return rank


# ---------------------------------------------------------------------------
# public types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CirculantPoly:
    """Element of R_p: first row of a p x p circulant over F_q."""

    coeffs: np.ndarray
    q: int

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=np.int64) % self.q
        object.__setattr__(self, "coeffs", c)

    @property
    def p(self) -> int:
        return int(self.coeffs.size)

    @classmethod
    def zero(cls, p: int, q: int) -> "CirculantPoly":
        return cls(np.zeros(p, dtype=np.int64), q)

    @classmethod
    def one(cls, p: int, q: int) -> "CirculantPoly":
        c = np.zeros(p, dtype=np.int64)
        c[0] = 1
        return cls(c, q)

    @classmethod
    def monomial(cls, exp: int, p: int, q: int, coeff: int = 1) -> "CirculantPoly":
        c = np.zeros(p, dtype=np.int64)
        c[exp % p] = coeff % q
        return cls(c, q)

    def is_zero(self) -> bool:
        return not self.coeffs.any()

    def expand(self) -> np.ndarray:
        """The p x p circulant matrix with this polynomial as first row."""
        p = self.p
        idx = (np.arange(p)[None, :] - np.arange(p)[:, None]) % p
        return self.coeffs[idx]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, CirculantPoly)
            and self.q == other.q
            and np.array_equal(self.coeffs, other.coeffs)
        )


def _check_ring(a: CirculantPoly, b: CirculantPoly):
    if a.p != b.p or a.q != b.q:
        raise DimensionMismatchError(
            f"ring mismatch: (p={a.p}, q={a.q}) vs (p={b.p}, q={b.q})"
        )


def poly_add(a: CirculantPoly, b: CirculantPoly) -> CirculantPoly:
    _check_ring(a, b)
    return CirculantPoly((a.coeffs + b.coeffs) % a.q, a.q)


def poly_mul(a: CirculantPoly, b: CirculantPoly) -> CirculantPoly:
    _check_ring(a, b)
    return CirculantPoly(_cyc_conv(a.coeffs, b.coeffs, a.p, a.q), a.q)


def poly_inv(a: CirculantPoly) -> CirculantPoly | None:
    """Inverse in R_p, or None when gcd(a(x), x^p - 1) != 1."""
    c = _poly_inv_raw(a.coeffs, a.p, a.q)
    return None if c is None else CirculantPoly(c, a.q)


@dataclass(frozen=True)
class QCMatrix:
    """rows0 x cols0 grid of circulant blocks; blocks[i, j] is a first row."""

    blocks: np.ndarray  # (rows0, cols0, p) int64, canonical mod q
    q: int

    def __post_init__(self):
        b = np.asarray(self.blocks, dtype=np.int64)
        if b.ndim != 3:
            raise DimensionMismatchError("blocks must have shape (rows0, cols0, p)")
        object.__setattr__(self, "blocks", b % self.q)

    @property
    def rows0(self) -> int:
        return self.blocks.shape[0]

    @property
    def cols0(self) -> int:
        return self.blocks.shape[1]

    @property
    def p(self) -> int:
        return self.blocks.shape[2]

    @classmethod
    def zero(cls, rows0: int, cols0: int, p: int, q: int) -> "QCMatrix":
        return cls(np.zeros((rows0, cols0, p), dtype=np.int64), q)

    @classmethod
    def identity(cls, size0: int, p: int, q: int) -> "QCMatrix":
        b = np.zeros((size0, size0, p), dtype=np.int64)
        b[np.arange(size0), np.arange(size0), 0] = 1
        return cls(b, q)

    def block(self, i: int, j: int) -> CirculantPoly:
        return CirculantPoly(self.blocks[i, j].copy(), self.q)

    def transpose(self) -> "QCMatrix":
        # transpose of circ(a) is circ(a') with a'_t = a_{(p-t) mod p}
        rev = np.roll(self.blocks[..., ::-1], 1, axis=-1)
        return QCMatrix(rev.swapaxes(0, 1).copy(), self.q)

    def neg(self) -> "QCMatrix":
        return QCMatrix((-self.blocks) % self.q, self.q)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, QCMatrix)
            and self.q == other.q
            and np.array_equal(self.blocks, other.blocks)
        )


def expand(A: QCMatrix) -> np.ndarray:
    """Dense (rows0*p) x (cols0*p) matrix over F_q."""
    p = A.p
    idx = (np.arange(p)[None, :] - np.arange(p)[:, None]) % p
    dense = A.blocks[:, :, idx]  # (rows0, cols0, p, p)
    return dense.transpose(0, 2, 1, 3).reshape(A.rows0 * p, A.cols0 * p)


def qc_mat_mul(A: QCMatrix, B: QCMatrix) -> QCMatrix:
    if A.p != B.p or A.q != B.q or A.cols0 != B.rows0:
        raise DimensionMismatchError(
            f"cannot multiply {A.rows0}x{A.cols0} by {B.rows0}x{B.cols0} "
            f"(p {A.p}/{B.p}, q {A.q}/{B.q})"
        )
    return QCMatrix(_block_matmul(A.blocks, B.blocks, A.p, A.q), A.q)


def qc_mat_add(A: QCMatrix, B: QCMatrix) -> QCMatrix:
    if A.blocks.shape != B.blocks.shape or A.q != B.q:
        raise DimensionMismatchError("shape mismatch in block addition")
    return QCMatrix((A.blocks + B.blocks) % A.q, A.q)


# expanded dimension above which the dense fallback is not attempted
# (memory guard; ring-level elimination with pivoting handles real keys)
_DENSE_FALLBACK_LIMIT = 4096


def qc_mat_inv(A: QCMatrix) -> QCMatrix | None:
    """Inverse of a square block matrix, or None when singular.

    Strategy: Gauss-Jordan over the ring R_p using invertible polynomial
    pivots (with block-row pivoting). If elimination stalls the dense
    expansion is inverted over F_q and folded back to QC form (the inverse
    of a QC matrix is QC). Returns None iff the expansion is singular.
    """
    if A.rows0 != A.cols0:
        raise DimensionMismatchError("inversion requires a square block matrix")
    s, p, q = A.rows0, A.p, A.q
    aug = np.concatenate([A.blocks.copy(), QCMatrix.identity(s, p, q).blocks], axis=1)
    for col in range(s):
        pivot_inv = None
        for r in range(col, s):
            pivot_inv = _poly_inv_raw(aug[r, col], p, q)
            if pivot_inv is not None:
                if r != col:
                    aug[[col, r]] = aug[[r, col]]
                break
        if pivot_inv is None:
            return _qc_inv_dense_fallback(A)
        frow = np.fft.rfft(aug[col], axis=-1) if p > 1 else aug[col].astype(complex)
        fp = np.fft.rfft(pivot_inv) if p > 1 else pivot_inv.astype(complex)
        if p > 1:
            aug[col] = np.rint(np.fft.irfft(frow * fp, n=p, axis=-1)).astype(np.int64) % q
        else:
            aug[col] = np.rint((frow * fp).real).astype(np.int64) % q
        factors = aug[:, col].copy()
        factors[col] = 0
        if factors.any():
            delta = _conv_outer(factors, aug[col], p, q)
            aug = (aug - delta) % q
    return QCMatrix(aug[:, s:], q)


def _qc_inv_dense_fallback(A: QCMatrix) -> QCMatrix | None:
    n = A.rows0 * A.p
    if n > _DENSE_FALLBACK_LIMIT:
        # too large to expand; ring elimination stalled, treat as singular
        # so key generation resamples
        return None
    dense_inv = gf_inv_dense(expand(A), A.q)
    if dense_inv is None:
        return None
    return fold_dense(dense_inv, A.rows0, A.rows0, A.p, A.q)


def fold_dense(M: np.ndarray, rows0: int, cols0: int, p: int, q: int) -> QCMatrix:
    """Read a QC matrix off a dense matrix known to have QC structure."""
    blocks = np.empty((rows0, cols0, p), dtype=np.int64)
    for i in range(rows0):
        blocks[i] = M[i * p, :].reshape(cols0, p)
    return QCMatrix(blocks % q, q)


# ---------------------------------------------------------------------------
# vectors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SparseVector:
    """Sparse vector over F_q: strictly increasing indices, nonzero values."""

    length: int
    indices: np.ndarray
    values: np.ndarray
    q: int

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64)
        val = np.asarray(self.values, dtype=np.int64) % self.q
        keep = val != 0
        idx, val = idx[keep], val[keep]
        order = np.argsort(idx)
        idx, val = idx[order], val[order]
        if idx.size and (idx[0] < 0 or idx[-1] >= self.length):
            raise ValueError("index out of range")
        if idx.size > 1 and np.any(np.diff(idx) == 0):
            raise ValueError("duplicate indices")
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "values", val)

    @classmethod
    def from_dense(cls, v: np.ndarray, q: int) -> "SparseVector":
        v = np.asarray(v, dtype=np.int64) % q
        idx = np.nonzero(v)[0]
        return cls(v.size, idx, v[idx], q)

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.length, dtype=np.int64)
        out[self.indices] = self.values
        return out

    def weight(self) -> int:
        return int(self.indices.size)

    def add(self, other: "SparseVector") -> "SparseVector":
        if self.length != other.length or self.q != other.q:
            raise DimensionMismatchError("sparse addition shape mismatch")
        dense = self.to_dense()
        np.add.at(dense, other.indices, other.values)
        return SparseVector.from_dense(dense, self.q)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SparseVector)
            and self.length == other.length
            and self.q == other.q
            and np.array_equal(self.indices, other.indices)
            and np.array_equal(self.values, other.values)
        )


def qc_vec_mul(v, A: QCMatrix) -> np.ndarray:
    """v * expand(A) over F_q for v sparse or dense of length rows0*p.

    The sparse path costs O(|support| * cols0 * p); the dense path runs one
    cyclic convolution per block.
    """
    n_in = A.rows0 * A.p
    p, q = A.p, A.q
    if isinstance(v, SparseVector):
        if v.length != n_in:
            raise DimensionMismatchError(f"vector length {v.length} != {n_in}")
        out = np.zeros((A.cols0, p), dtype=np.int64)
        for idx, val in zip(v.indices.tolist(), v.values.tolist()):
            blk, off = divmod(idx, p)
            out += val * np.roll(A.blocks[blk], off, axis=-1)
        return (out % q).reshape(-1)
    v = np.asarray(v, dtype=np.int64)
    if v.size != n_in:
        raise DimensionMismatchError(f"vector length {v.size} != {n_in}")
    _assert_fft_exact(A.rows0, p, q)
    vb = (v % q).reshape(A.rows0, p)
    if p == 1:
        out = np.einsum("ip,ijp->jp", vb, A.blocks)
        return (out % q).reshape(-1)
    fv = np.fft.rfft(vb, axis=-1)
    fa = np.fft.rfft(A.blocks, axis=-1)
    fo = np.einsum("if,ijf->jf", fv, fa)
    out = np.rint(np.fft.irfft(fo, n=p, axis=-1)).astype(np.int64) % q
    return out.reshape(-1)


# ---------------------------------------------------------------------------
# QC permutations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QCPermutation:
    """Block permutation with per-block cyclic shifts.

    Maps input index pi(i)*p + j to output index i*p + (j + shift_i) mod p;
    the expansion has exactly one 1 per row and column and is QC.
    """

    block_perm: np.ndarray  # pi, permutation of {0..m-1}
    shifts: np.ndarray  # t_i in [0, p)
    p: int
    q: int
    _inv_perm: np.ndarray = dc_field(init=False, repr=False, compare=False)

    def __post_init__(self):
        perm = np.asarray(self.block_perm, dtype=np.int64)
        shifts = np.asarray(self.shifts, dtype=np.int64) % self.p
        if perm.size != shifts.size:
            raise DimensionMismatchError("permutation/shift length mismatch")
        if not np.array_equal(np.sort(perm), np.arange(perm.size)):
            raise ValueError("block_perm is not a bijection")
        object.__setattr__(self, "block_perm", perm)
        object.__setattr__(self, "shifts", shifts)
        inv = np.empty_like(perm)
        inv[perm] = np.arange(perm.size)
        object.__setattr__(self, "_inv_perm", inv)

    @property
    def size0(self) -> int:
        return int(self.block_perm.size)

    @property
    def dim(self) -> int:
        return self.size0 * self.p

    def inverse(self) -> "QCPermutation":
        inv_shifts = (-self.shifts[self._inv_perm]) % self.p
        return QCPermutation(self._inv_perm.copy(), inv_shifts, self.p, self.q)

    def to_qc_matrix(self) -> QCMatrix:
        blocks = np.zeros((self.size0, self.size0, self.p), dtype=np.int64)
        for i in range(self.size0):
            # first-row convention: coefficient (p - t) mod p realizes j -> j + t
            blocks[i, self.block_perm[i], (self.p - self.shifts[i]) % self.p] = 1
        return QCMatrix(blocks, self.q)

    def expand(self) -> np.ndarray:
        return expand(self.to_qc_matrix())


def perm_apply(P: QCPermutation, s: SparseVector) -> SparseVector:
    """s' = P s, computed on the support; preserves Hamming weight."""
    if s.length != P.dim:
        raise DimensionMismatchError(f"vector length {s.length} != {P.dim}")
    blk, off = np.divmod(s.indices, P.p)
    out_blk = P._inv_perm[blk]
    out_off = (off + P.shifts[out_blk]) % P.p
    return SparseVector(s.length, out_blk * P.p + out_off, s.values.copy(), s.q)


def random_qc_permutation(size0: int, p: int, q: int, rng: np.random.Generator) -> QCPermutation:
    return QCPermutation(rng.permutation(size0), rng.integers(0, p, size=size0), p, q)


def _validate_prime(q: int):
    if not is_prime(q):
        raise ValueError(f"{q} is not prime")
