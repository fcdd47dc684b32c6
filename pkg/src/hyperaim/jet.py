"""Truncated Taylor series (jets) in block floating point.

A jet of order P at x0 stores the coefficients c[j] = f^(j)(x0)/j!, j = 0..P, as
integer mantissas sharing one binary exponent: c[j] = mant[j] * 2**exp. After every
operation the mantissas are rounded so the largest one has at most ``prec`` bits,
so errors are bounded relative to the largest coefficient. Products go through a
single big-integer multiplication (see ``_kronecker``).

Jets may carry a second polynomial axis: mant has shape (P+1, width) and column d
holds the coefficient of t**d for some external parameter t. The AIM engine uses
this to carry the energy dependence through the recurrence. Ordinary jets have
width 1.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import mpmath
import numpy as np

from . import _kronecker
from .errors import DivisionByZeroConstantTerm, DomainError, OrderExhausted, OrderMismatch
from .precision import MIN_BITS, Real, from_man_exp, man_exp, to_real

GUARD_BITS = 32


def _shift(a, s: int):
    """Multiply integer(s) by 2**s, rounding to nearest when s < 0."""
    if s >= 0:
        return a << s
    return (a + (1 << (-s - 1))) >> -s


def _bitlen(a: np.ndarray) -> int:
    return _kronecker._bitlen(a)


def _as_int_array(rows: Sequence[Sequence[int]]) -> np.ndarray:
    n = len(rows)
    width = max((len(r) for r in rows), default=1)
    out = np.zeros((n, max(width, 1)), dtype=object)
    for i, r in enumerate(rows):
        for d, v in enumerate(r):
            out[i, d] = int(v)
    return out


class Jet:
    """Immutable truncated Taylor series at ``x0``."""

    __slots__ = ("_mant", "_exp", "_x0", "_prec")

    def __init__(self, mant: np.ndarray, exp: int, x0, prec: int):
        if mant.ndim == 1:
            mant = mant.reshape(-1, 1)
        if mant.shape[0] < 1 or mant.shape[1] < 1:
            raise ValueError("jet needs at least one coefficient")
        prec = max(int(prec), MIN_BITS)
        bits = _bitlen(mant)
        if bits > prec:
            sh = bits - prec
            mant = _shift(mant, -sh)
            exp += sh
        elif bits == 0:
            exp = 0
        mant.flags.writeable = False
        self._mant = mant
        self._exp = int(exp)
        self._x0 = to_real(x0, prec)
        self._prec = prec

    # construction

    @classmethod
    def from_coeffs(cls, coeffs: Iterable, x0=0, prec: int = 340) -> "Jet":
        """Jet from coefficients; a nested sequence gives a parameter-width jet."""
        rows = [list(c) if isinstance(c, (list, tuple)) else [c] for c in coeffs]
        if not rows:
            raise ValueError("jet needs at least one coefficient")
        bits = prec + GUARD_BITS
        pairs = [[man_exp(v, bits) for v in r] for r in rows]
        tops = [m.bit_length() + e for r in pairs for m, e in r if m]
        if not tops:
            return cls(_as_int_array([[0] * len(r) for r in rows]), 0, x0, prec)
        exp = max(tops) - prec
        mant = _as_int_array([[_shift(m, e - exp) if m else 0 for m, e in r] for r in pairs])
        return cls(mant, exp, x0, prec)

    @classmethod
    def constant(cls, value, order: int, x0=0, prec: int = 340) -> "Jet":
        return cls.from_coeffs([value] + [0] * order, x0, prec)

    @classmethod
    def affine(cls, a, b, order: int, x0=0, prec: int = 340) -> "Jet":
        """Jet of a*x + b expanded at x0."""
        with mpmath.workprec(prec + GUARD_BITS):
            c0 = to_real(a, prec + GUARD_BITS) * to_real(x0, prec + GUARD_BITS) + to_real(b, prec + GUARD_BITS)
        coeffs = [c0, a] + [0] * (order - 1) if order >= 1 else [c0]
        return cls.from_coeffs(coeffs, x0, prec)

    # accessors

    @property
    def order(self) -> int:
        return self._mant.shape[0] - 1

    @property
    def width(self) -> int:
        return self._mant.shape[1]

    @property
    def x0(self) -> Real:
        return self._x0

    @property
    def prec(self) -> int:
        return self._prec

    @property
    def mantissas(self) -> np.ndarray:
        return self._mant

    @property
    def exponent(self) -> int:
        return self._exp

    @property
    def coeffs(self) -> list:
        """Coefficients as Reals; for width > 1, one list per order."""
        if self.width == 1:
            return [from_man_exp(int(v), self._exp) for v in self._mant[:, 0]]
        return [[from_man_exp(int(v), self._exp) for v in row] for row in self._mant]

    def coeff(self, j: int, d: int = 0) -> Real:
        return from_man_exp(int(self._mant[j, d]), self._exp)

    def __repr__(self) -> str:
        shown = ", ".join(mpmath.nstr(c, 8) for c in (self.coeffs if self.width == 1 else []))
        return f"Jet(order={self.order}, width={self.width}, x0={mpmath.nstr(self._x0, 8)}, [{shown}])"

    # structure

    def _check(self, other: "Jet") -> None:
        if self.order != other.order:
            raise OrderMismatch(f"orders differ: {self.order} vs {other.order}")
        if self._x0 != other._x0:
            raise OrderMismatch("jets expanded at different points")

    def _wrap(self, mant: np.ndarray, exp: int, prec: int | None = None) -> "Jet":
        return Jet(mant, exp, self._x0, self._prec if prec is None else prec)

    def truncate(self, order: int) -> "Jet":
        if order < 0 or order > self.order:
            raise OrderMismatch(f"cannot truncate order {self.order} to {order}")
        return self._wrap(self._mant[: order + 1].copy(), self._exp)

    def with_prec(self, prec: int) -> "Jet":
        return self._wrap(self._mant.copy(), self._exp, prec)

    def _coerce(self, value) -> "Jet":
        if isinstance(value, Jet):
            return value
        return Jet.constant(value, self.order, self._x0, self._prec)

    # arithmetic

    def _add(self, other: "Jet", sign: int) -> "Jet":
        other = self._coerce(other)
        self._check(other)
        e = min(self._exp, other._exp)
        width = max(self.width, other.width)
        out = np.zeros((self.order + 1, width), dtype=object)
        out[:, : self.width] = self._mant << (self._exp - e)
        b = other._mant << (other._exp - e)
        if sign > 0:
            out[:, : other.width] += b
        else:
            out[:, : other.width] -= b
        return self._wrap(out, e, max(self._prec, other._prec))

    def __add__(self, other) -> "Jet":
        return self._add(other, 1)

    def __radd__(self, other) -> "Jet":
        return self._add(other, 1)

    def __sub__(self, other) -> "Jet":
        return self._add(other, -1)

    def __rsub__(self, other) -> "Jet":
        return (-self)._add(other, 1)

    def __neg__(self) -> "Jet":
        return self._wrap(-self._mant, self._exp)

    def scale(self, value) -> "Jet":
        m, e = man_exp(value, self._prec + GUARD_BITS)
        return self._wrap(self._mant * m, self._exp + e)

    def __mul__(self, other) -> "Jet":
        if not isinstance(other, Jet):
            return self.scale(other)
        self._check(other)
        mant = _kronecker.mul2d(self._mant, other._mant, self.order + 1)
        return self._wrap(mant, self._exp + other._exp, max(self._prec, other._prec))

    def __rmul__(self, other) -> "Jet":
        return self.scale(other)

    def __truediv__(self, other) -> "Jet":
        if not isinstance(other, Jet):
            with mpmath.workprec(self._prec + GUARD_BITS):
                return self.scale(1 / to_real(other, self._prec + GUARD_BITS))
        return _divide(self, other)

    def __rtruediv__(self, other) -> "Jet":
        return _divide(self._coerce(other), self)

    def square(self) -> "Jet":
        return self * self

    def derivative(self) -> "Jet":
        if self.order == 0:
            raise OrderExhausted("derivative of an order-0 jet; raise the series order")
        idx = np.arange(1, self.order + 1, dtype=object).reshape(-1, 1)
        return self._wrap(self._mant[1:] * idx, self._exp)

    def integral(self, constant=0) -> "Jet":
        """Antiderivative with the given value at x0; order stays the same (top term dropped)."""
        bits = self._prec + GUARD_BITS
        with mpmath.workprec(bits):
            coeffs = [to_real(constant, bits)] + [c / (j + 1) for j, c in enumerate(self._scalar_coeffs()[:-1])]
        return Jet.from_coeffs(coeffs, self._x0, self._prec)

    def sqrt(self) -> "Jet":
        return _sqrt(self)

    def arctanh(self) -> "Jet":
        return _arctanh(self)

    def _scalar_coeffs(self) -> list:
        if self.width != 1:
            raise ValueError("operation defined only for width-1 jets")
        return self.coeffs

    def value(self, d: int = 0) -> Real:
        """Constant term, the function value at x0."""
        return self.coeff(0, d)


def _divide(a: Jet, b: Jet) -> Jet:
    a._check(b)
    if b.width != 1:
        raise ValueError("division by a parameter-width jet is not supported")
    B = b.mantissas[:, 0]
    if B[0] == 0:
        raise DivisionByZeroConstantTerm("divisor has zero constant term")
    prec = max(a.prec, b.prec)
    # q = a/b, q_i = (a_i - sum_{j>=1} b_j q_{i-j}) / b_0, with q_i = Q_i * 2**eq
    A = a.mantissas
    G = max(GUARD_BITS, prec + GUARD_BITS + int(abs(B[0])).bit_length() - _bitlen(A))
    eq = a.exponent - b.exponent - G
    Q = np.zeros_like(A)
    b0 = int(B[0])
    for i in range(a.order + 1):
        num = A[i] << G
        if i:
            num = num - np.dot(B[i:0:-1], Q[:i])
        Q[i] = np.array([_round_div(int(v), b0) for v in num], dtype=object)
    return Jet(Q, eq, a.x0, prec)


def _round_div(n: int, d: int) -> int:
    q, r = divmod(n, d)
    if 2 * abs(r) >= abs(d):
        q += 1 if (r > 0) == (d > 0) else 0
    return q


def _sqrt(a: Jet) -> Jet:
    c = a._scalar_coeffs()
    if c[0] <= 0:
        raise DomainError("sqrt needs a positive constant term")
    prec = a.prec
    bits = prec + GUARD_BITS
    # g_0 = sqrt(a_0), g_i = (a_i - sum_{j=1}^{i-1} g_j g_{i-j}) / (2 g_0)
    with mpmath.workprec(2 * bits):
        g0 = mpmath.sqrt(c[0])
        eg = int(mpmath.floor(mpmath.log(g0, 2))) - bits
        G0 = int(mpmath.nint(mpmath.ldexp(g0, -eg)))
    A = a.mantissas[:, 0]
    s = a.exponent - 2 * eg
    Gs = np.zeros(a.order + 1, dtype=object)
    Gs[0] = G0
    for i in range(1, a.order + 1):
        num = _shift(int(A[i]), s)
        if i > 1:
            num -= int(np.dot(Gs[1:i], Gs[i - 1:0:-1]))
        Gs[i] = _round_div(num, 2 * G0)
    return Jet(Gs, eg, a.x0, prec)


def _arctanh(a: Jet) -> Jet:
    c = a._scalar_coeffs()
    if not abs(c[0]) < 1:
        raise DomainError("arctanh needs |constant term| < 1")
    bits = a.prec + GUARD_BITS
    if a.order == 0:
        with mpmath.workprec(bits):
            return Jet.from_coeffs([mpmath.atanh(c[0])], a.x0, a.prec)
    # g' = a' / (1 - a^2)
    top = a.truncate(a.order - 1)
    q = a.derivative() / (1 - top * top)
    with mpmath.workprec(bits):
        g0 = mpmath.atanh(c[0])
        coeffs = [g0] + [v / (j + 1) for j, v in enumerate(q.coeffs)]
    return Jet.from_coeffs(coeffs, a.x0, a.prec)


# functional interface


def jet_arith(a: Jet, b: Jet, op: str) -> Jet:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown jet operation {op!r}")


def jet_transcendental(a: Jet, op: str) -> Jet:
    if op == "sqrt":
        return a.sqrt()
    if op == "arctanh":
        return a.arctanh()
    if op == "square":
        return a.square()
    raise ValueError(f"unknown jet function {op!r}")


def jet_derivative(a: Jet) -> Jet:
    return a.derivative()
