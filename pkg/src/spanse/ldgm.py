"""Sparse-generator quasi-cyclic codes.

The secret code is defined by a binary k x n generator G whose expanded
rows all have Hamming weight exactly w_g. Because the matrix is
quasi-cyclic it is enough to place w_g ones in the expanded first row of
each block row; the circulant structure propagates the weight to every
other row. A systematic parity-check matrix H = [-W^T | I] is derived by
block elimination so that syndromes of vectors of the form [0_k | s'] read
off s' directly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import ParameterSet
from .qcalg import QCMatrix, SparseVector, qc_mat_inv, qc_mat_mul, qc_vec_mul

# how many generator resamples to attempt before declaring keygen failure
MAX_GENERATOR_RETRIES = 100


class NotReducibleError(Exception):
    """The left k x k part of G is singular; the caller should resample."""


class GenerationError(Exception):
    """Retry budget exhausted while sampling a reducible generator."""


@dataclass(frozen=True)
class LdgmCode:
    """Generator/parity-check pair with the defining parameters."""

    G: QCMatrix  # k0 x n0 blocks, binary entries
    H: QCMatrix  # r0 x n0 blocks, right r0 x r0 block part = identity
    params: ParameterSet


def sample_generator(params: ParameterSet, rng: np.random.Generator) -> QCMatrix:
    """Binary QC matrix whose expanded rows all have weight exactly w_g.

    For each block row, w_g one-positions are drawn uniformly without
    replacement from the n positions of that row's expanded first row.
    """
    p, n0, k0 = params.p, params.n0, params.k0
    blocks = np.zeros((k0, n0, p), dtype=np.int64)
    for i in range(k0):
        pos = rng.choice(params.n, size=params.w_g, replace=False)
        blk, off = np.divmod(pos, p)
        np.add.at(blocks[i], (blk, off), 1)
    return QCMatrix(blocks, params.q)


def systematic_parity_check(G: QCMatrix) -> QCMatrix:
    """H = [-W^T | I] from G = [M1 | M2] with W = M1^{-1} M2.

    Raises NotReducibleError when the left block part M1 is singular.
    The identity right part means H e^T = s' for e = [0_k | s'^T].
    """
    k0 = G.rows0
    r0 = G.cols0 - k0
    p, q = G.p, G.q
    M1 = QCMatrix(G.blocks[:, :k0].copy(), q)
    M1_inv = qc_mat_inv(M1)
    if M1_inv is None:
        raise NotReducibleError("left block part of the generator is singular")
    W = qc_mat_mul(M1_inv, QCMatrix(G.blocks[:, k0:].copy(), q))
    H_blocks = np.zeros((r0, k0 + r0, p), dtype=np.int64)
    H_blocks[:, :k0] = W.transpose().neg().blocks
    H_blocks[np.arange(r0), k0 + np.arange(r0), 0] = 1
    return QCMatrix(H_blocks, q)


def make_code(params: ParameterSet, rng: np.random.Generator) -> LdgmCode:
    """Sample generators until one admits a systematic parity check."""
    for _ in range(MAX_GENERATOR_RETRIES):
        G = sample_generator(params, rng)
        try:
            H = systematic_parity_check(G)
        except NotReducibleError:
            continue
        return LdgmCode(G, H, params)
    raise GenerationError(
        f"no reducible generator found in {MAX_GENERATOR_RETRIES} attempts"
    )


def random_information_word(params: ParameterSet, rng: np.random.Generator) -> SparseVector:
    """Uniform binary vector of length k and weight exactly m_g."""
    pos = rng.choice(params.k, size=params.m_g, replace=False)
    return SparseVector(params.k, np.sort(pos), np.ones(params.m_g, dtype=np.int64), params.q)


def codeword_from_generator(G: QCMatrix, params: ParameterSet, m_g: int,
                            rng: np.random.Generator) -> SparseVector:
    """c = u G for uniform binary u of weight m_g.

    The sum is taken over F_q, so overlapping selected rows can produce
    entries larger than 1; the typical weight is close to m_g * w_g.
    """
    if m_g == 0:
        return SparseVector(params.n, np.array([], dtype=np.int64),
                            np.array([], dtype=np.int64), params.q)
    if not (1 <= m_g <= params.k):
        raise ValueError(f"m_g={m_g} outside [0, k={params.k}]")
    pos = rng.choice(params.k, size=m_g, replace=False)
    u = SparseVector(params.k, np.sort(pos), np.ones(m_g, dtype=np.int64), params.q)
    dense = qc_vec_mul(u, G)
    return SparseVector.from_dense(dense, params.q)


def random_codeword(code: LdgmCode, m_g: int, rng: np.random.Generator) -> SparseVector:
    return codeword_from_generator(code.G, code.params, m_g, rng)
