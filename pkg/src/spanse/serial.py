"""Byte-exact serialization of parameters, keys and signatures.

Layout (all integers little-endian):

    magic "SPNS" | version u16 = 1 | object-type u8 | params block | payload

object-type: 1 = parameters, 2 = public key, 3 = private key, 4 = signature.

params block: q, p, n0, k0, w, w_g, m_g as u16, then the density as a u16
entry count followed by (value u8, numerator u32, denominator u32) triples.

payloads:
    public     r0*n0 circulant first rows, p bytes each (row-major blocks)
    private    block permutation as r0 u16, shifts as r0 u16, then per
               generator block row: count u32, count u32 positions into the
               expanded first row, count u8 values; then n0*n0 circulant
               first rows of the dense transform, p bytes each
    signature  theta length u16, theta bytes, n signature bytes

Every symbol byte must be < q; anything else is a parse error. Derived
private components (systematic parity check, inverse transform) are not
stored and are recomputed on load. File writes go to a temporary name in
the target directory and are renamed into place, so failures never leave a
partial file.
"""

from __future__ import annotations

import os
import struct
import tempfile
import warnings
from fractions import Fraction

import numpy as np

from .ldgm import LdgmCode, systematic_parity_check
from .params import DensityPolynomial, ParameterSet
from .qcalg import QCMatrix, QCPermutation, qc_mat_inv
from .scheme import PrivateKey, PublicKey, Signature

MAGIC = b"SPNS"
VERSION = 1

OBJ_PARAMS = 1
OBJ_PUBLIC = 2
OBJ_PRIVATE = 3
OBJ_SIGNATURE = 4


class SerializationError(ValueError):
    """Malformed or out-of-range encoding."""


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise SerializationError("truncated input")
        out = self.data[self.pos : self.pos + n]
        self.pos += n
        return out

    def u8(self) -> int:
        return self.take(1)[0]

    def u16(self) -> int:
        return struct.unpack("<H", self.take(2))[0]

    def u32(self) -> int:
        return struct.unpack("<I", self.take(4))[0]

    def done(self):
        if self.pos != len(self.data):
            raise SerializationError(f"{len(self.data) - self.pos} trailing bytes")


def _u16(v: int) -> bytes:
    if not (0 <= v < 2**16):
        raise SerializationError(f"value {v} does not fit in u16")
    return struct.pack("<H", v)


def _u32(v: int) -> bytes:
    if not (0 <= v < 2**32):
        raise SerializationError(f"value {v} does not fit in u32")
    return struct.pack("<I", v)


def _params_block(params: ParameterSet) -> bytes:
    out = b"".join(
        _u16(v)
        for v in (params.q, params.p, params.n0, params.k0, params.w, params.w_g, params.m_g)
    )
    entries = sorted(params.density.coeffs.items())
    out += _u16(len(entries))
    for value, prob in entries:
        if value >= 256:
            raise SerializationError("density value does not fit in u8")
        out += bytes([value]) + _u32(prob.numerator) + _u32(prob.denominator)
    return out


def _read_params(rd: _Reader) -> ParameterSet:
    q, p, n0, k0, w, w_g, m_g = (rd.u16() for _ in range(7))
    nent = rd.u16()
    coeffs: dict[int, Fraction] = {}
    for _ in range(nent):
        value = rd.u8()
        num = rd.u32()
        den = rd.u32()
        if den == 0:
            raise SerializationError("zero denominator in density entry")
        if value in coeffs:
            raise SerializationError("duplicate density entry")
        coeffs[value] = Fraction(num, den)
    try:
        density = DensityPolynomial(coeffs, q)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return ParameterSet("restored", q, p, n0, k0, w, w_g, m_g, density)
    except ValueError as exc:
        raise SerializationError(f"invalid parameters: {exc}") from exc


def _header(objtype: int, params: ParameterSet) -> bytes:
    return MAGIC + _u16(VERSION) + bytes([objtype]) + _params_block(params)


def _symbols(rd: _Reader, count: int, q: int) -> np.ndarray:
    raw = np.frombuffer(rd.take(count), dtype=np.uint8).astype(np.int64)
    if raw.size and raw.max() >= q:
        raise SerializationError("symbol byte out of field range")
    return raw


def serialize_params(params: ParameterSet) -> bytes:
    return _header(OBJ_PARAMS, params)


def serialize_public(pk: PublicKey) -> bytes:
    rows = pk.Hpub.blocks.reshape(-1, pk.params.p)
    return _header(OBJ_PUBLIC, pk.params) + rows.astype(np.uint8).tobytes()


def serialize_private(sk: PrivateKey) -> bytes:
    params = sk.params
    out = [_header(OBJ_PRIVATE, params)]
    out.append(b"".join(_u16(int(v)) for v in sk.P.block_perm))
    out.append(b"".join(_u16(int(v)) for v in sk.P.shifts))
    for i in range(params.k0):
        row = sk.code.G.blocks[i]  # (n0, p)
        flat = row.reshape(-1)
        pos = np.nonzero(flat)[0]
        out.append(_u32(pos.size))
        out.append(b"".join(_u32(int(v)) for v in pos))
        out.append(flat[pos].astype(np.uint8).tobytes())
    out.append(sk.S.blocks.reshape(-1, params.p).astype(np.uint8).tobytes())
    return b"".join(out)


def serialize_signature(sig: Signature, params: ParameterSet) -> bytes:
    if len(sig.theta) >= 2**16:
        raise SerializationError("theta too long")
    return (
        _header(OBJ_SIGNATURE, params)
        + _u16(len(sig.theta))
        + sig.theta
        + np.asarray(sig.sigma, dtype=np.int64).astype(np.uint8).tobytes()
    )


def _read_header(data: bytes, expected: int | None = None) -> tuple[_Reader, int, ParameterSet]:
    rd = _Reader(data)
    if rd.take(4) != MAGIC:
        raise SerializationError("bad magic")
    version = rd.u16()
    if version != VERSION:
        raise SerializationError(f"unsupported version {version}")
    objtype = rd.u8()
    if objtype not in (OBJ_PARAMS, OBJ_PUBLIC, OBJ_PRIVATE, OBJ_SIGNATURE):
        raise SerializationError(f"unknown object type {objtype}")
    if expected is not None and objtype != expected:
        raise SerializationError(f"expected object type {expected}, found {objtype}")
    return rd, objtype, _read_params(rd)


def deserialize_params(data: bytes) -> ParameterSet:
    rd, _, params = _read_header(data, OBJ_PARAMS)
    rd.done()
    return params


def deserialize_public(data: bytes) -> PublicKey:
    rd, _, params = _read_header(data, OBJ_PUBLIC)
    syms = _symbols(rd, params.r0 * params.n0 * params.p, params.q)
    rd.done()
    blocks = syms.reshape(params.r0, params.n0, params.p)
    return PublicKey(params, QCMatrix(blocks, params.q))


def deserialize_private(data: bytes) -> PrivateKey:
    rd, _, params = _read_header(data, OBJ_PRIVATE)
    r0, p, q = params.r0, params.p, params.q
    perm = np.array([rd.u16() for _ in range(r0)], dtype=np.int64)
    shifts = np.array([rd.u16() for _ in range(r0)], dtype=np.int64)
    if np.any(shifts >= p):
        raise SerializationError("shift out of range")
    try:
        P = QCPermutation(perm, shifts, p, q)
    except ValueError as exc:
        raise SerializationError(f"invalid permutation: {exc}") from exc
    g_blocks = np.zeros((params.k0, params.n0, p), dtype=np.int64)
    for i in range(params.k0):
        count = rd.u32()
        if count > params.n:
            raise SerializationError("generator row weight out of range")
        pos = np.array([rd.u32() for _ in range(count)], dtype=np.int64)
        if pos.size and (pos.max() >= params.n or np.unique(pos).size != pos.size):
            raise SerializationError("bad generator positions")
        vals = _symbols(rd, count, q)
        if np.any(vals == 0):
            raise SerializationError("explicit zero in sparse generator row")
        flat = g_blocks[i].reshape(-1)
        flat[pos] = vals
    s_syms = _symbols(rd, params.n0 * params.n0 * p, q)
    rd.done()
    S = QCMatrix(s_syms.reshape(params.n0, params.n0, p), q)
    try:
        G = QCMatrix(g_blocks, q)
        H = systematic_parity_check(G)
    except Exception as exc:
        raise SerializationError(f"generator is not reducible: {exc}") from exc
    Sinv = qc_mat_inv(S)
    if Sinv is None:
        raise SerializationError("dense transform is singular")
    return PrivateKey(params, P, LdgmCode(G, H, params), S, Sinv)


def deserialize_signature(data: bytes) -> tuple[Signature, ParameterSet]:
    rd, _, params = _read_header(data, OBJ_SIGNATURE)
    tlen = rd.u16()
    theta = rd.take(tlen)
    sigma = _symbols(rd, params.n, params.q)
    rd.done()
    if np.any(sigma == 0):
        raise SerializationError("signature contains zero entries")
    return Signature(sigma, theta), params


_DESERIALIZERS = {
    OBJ_PARAMS: deserialize_params,
    OBJ_PUBLIC: deserialize_public,
    OBJ_PRIVATE: deserialize_private,
    OBJ_SIGNATURE: deserialize_signature,
}


def deserialize(data: bytes):
    """Dispatch on the object-type byte."""
    _, objtype, _ = _read_header(data)
    return _DESERIALIZERS[objtype](data)


def atomic_write(path: str, data: bytes):
    """Write via a temporary file and rename, so readers never see a prefix."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".spanse-tmp-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise
