"""Signed big-integer packing for fast polynomial products (Kronecker substitution).

A 2-D integer array a[i, d] is packed into one integer sum a[i, d] * 2**(B*(i*S + d))
with slot width B and row stride S. Multiplying two packed integers multiplies the
underlying bivariate polynomials as long as no slot overflows, so a product of
dense series costs a single GMP multiplication.
"""

import gmpy2
import numpy as np
from gmpy2 import mpz


def _bitlen(a: np.ndarray) -> int:
    if a.size == 0:
        return 0
    return max(int(abs(a.max())).bit_length(), int(abs(a.min())).bit_length())


def pack(a: np.ndarray, B: int) -> mpz:
    flat = a.ravel()
    if flat.size == 0:
        return mpz(0)
    mask = (mpz(1) << B) - 1
    body = gmpy2.pack([mpz(v) & mask for v in flat], B)
    negs = [1 if v < 0 else 0 for v in flat]
    if any(negs):
        body -= gmpy2.pack(negs, B) << B
    return body


def unpack(X: mpz, n: int, S: int, B: int) -> np.ndarray:
    """Inverse of ``pack`` for the lowest n*S slots, each assumed |v| < 2**(B-1)."""
    count = n * S
    X = mpz(X) & ((mpz(1) << (count * B)) - 1)
    chunks = gmpy2.unpack(X, B)[:count] if X else []
    out = np.zeros(count, dtype=object)
    if chunks:
        c = np.empty(len(chunks), dtype=object)
        c[:] = chunks
        high = c >= (mpz(1) << (B - 1))
        c[high] -= mpz(1) << B
        c[1:][high[:-1]] += 1
        out[: len(chunks)] = c
        if len(chunks) < count and high[-1]:
            out[len(chunks)] += 1
    return out.reshape(n, S)


def mul2d(a: np.ndarray, b: np.ndarray, rows: int) -> np.ndarray:
    """Product of bivariate integer polynomials, first ``rows`` rows in the first axis.

    a has shape (na, Da), b has shape (nb, Db); the second axis is kept in full
    (Da + Db - 1 columns), the first is truncated to ``rows``.
    """
    na, Da = a.shape
    nb, Db = b.shape
    S = Da + Db - 1
    a = a[:rows]
    b = b[:rows]
    terms = min(a.shape[0], b.shape[0]) * min(Da, Db)
    B = _bitlen(a) + _bitlen(b) + max(terms, 1).bit_length() + 2
    if S > Da:
        a = np.concatenate([a, np.zeros((a.shape[0], S - Da), dtype=object)], axis=1)
    if S > Db:
        b = np.concatenate([b, np.zeros((b.shape[0], S - Db), dtype=object)], axis=1)
    return unpack(pack(a, B) * pack(b, B), rows, S, B)
