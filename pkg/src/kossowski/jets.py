"""Truncated power series in one and two variables.

A :class:`Jet2` of order ``N`` is the Taylor polynomial

    sum_{i+j <= N} c[i, j] u**i v**j

of an analytic germ at the origin; a :class:`Jet1` is the univariate
analogue in ``t``.  Arithmetic is closed at the stated order: products are
truncated, operations that lose information (differentiation, division by a
non-unit) return a jet of lower order, and jets of different orders never
combine silently.  Call :meth:`Jet2.truncate` to bring operands to a common
order first.

Elementary functions are evaluated by splitting off the constant term and
summing the Taylor series of the function in the nilpotent remainder::

    >>> v = Jet2.var_v(4)
    >>> jet_exp(v * v)
    Jet2(order=4: 1 + 1*v^2 + 0.5*v^4)
"""
from __future__ import annotations

import math
from functools import lru_cache
from typing import Iterable, Mapping

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.signal import convolve2d
from scipy.special import binom

from .errors import (
    DivisionObstruction,
    NoJetSquareRoot,
    DegenerateSemiDefinitePoint,
    NonPositiveConstantTerm,
    NotDivisibleByV,
    OrderMismatch,
    ZeroConstantTerm,
)

#: absolute tolerance on coefficients for divisibility and perfect-square tests
DIVISIBILITY_TOL = 1e-12

DEFAULT_ORDER = 12

#: coefficient type; extended precision keeps round-off well below the
#: tolerances even when high-degree coefficients grow large
DTYPE = np.longdouble


@lru_cache(maxsize=None)
def _mask(order: int) -> np.ndarray:
    i, j = np.indices((order + 1, order + 1))
    mask = (i + j) <= order
    mask.setflags(write=False)
    return mask


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


class _Jet:
    """Behaviour shared by :class:`Jet1` and :class:`Jet2`."""

    __slots__ = ("order", "coeffs")
    __array_priority__ = 100.0

    # subclasses provide: _new, __mul__, constant_term, zero_like
    def _check(self, other):
        if type(other) is not type(self):
            raise TypeError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
        if other.order != self.order:
            raise OrderMismatch(f"order {self.order} != order {other.order}")

    def __add__(self, other):
        if isinstance(other, _Jet):
            self._check(other)
            return self._new(self.coeffs + other.coeffs)
        out = self.coeffs.copy()
        out.flat[0] += other
        return self._new(out)

    __radd__ = __add__

    def __neg__(self):
        return self._new(-self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __truediv__(self, other):
        if isinstance(other, _Jet):
            return jet_div_unit(self, other)
        return self._new(self.coeffs / other)

    def __rtruediv__(self, other):
        return other * self.reciprocal()

    def __pow__(self, n: int):
        if not isinstance(n, (int, np.integer)) or n < 0:
            raise ValueError("only non-negative integer powers are supported")
        result = self.one_like()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    @property
    def constant_term(self) -> float:
        return self.coeffs.flat[0]

    def one_like(self):
        out = np.zeros_like(self.coeffs)
        out.flat[0] = 1.0
        return self._new(out)

    def zero_like(self):
        return self._new(np.zeros_like(self.coeffs))

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.coeffs)))

    def _series(self, coeffs: np.ndarray):
        """Evaluate sum_k coeffs[k] * x**k at the nilpotent part x of self.

        ``coeffs[0]`` is the value at the constant term; the caller supplies
        the Taylor coefficients of the outer function there.
        """
        x = self - self.constant_term
        acc = self.one_like() * coeffs[self.order]
        for k in range(self.order - 1, -1, -1):
            acc = x * acc + coeffs[k]
        return acc

    def reciprocal(self):
        c0 = self.constant_term
        if c0 == 0.0:
            raise ZeroConstantTerm("reciprocal of a jet with zero constant term")
        k = np.arange(self.order + 1)
        return self._series(np.where(k % 2 == 0, 1, -1).astype(DTYPE) / c0 ** (k + 1))

    def exp(self):
        c0 = self.constant_term
        fact = np.array([math.factorial(n) for n in range(self.order + 1)], dtype=DTYPE)
        return self._series(np.exp(c0) / fact)

    def log(self):
        c0 = self.constant_term
        if not c0 > 0.0:
            raise NonPositiveConstantTerm(f"log needs a positive constant term, got {c0}")
        k = np.arange(1, self.order + 1, dtype=DTYPE)
        coeffs = np.empty(self.order + 1, dtype=DTYPE)
        coeffs[0] = np.log(c0)
        coeffs[1:] = (-1.0) ** (k + 1) / (k * c0 ** k)
        return self._series(coeffs)

    def sqrt(self):
        c0 = self.constant_term
        if not c0 > 0.0:
            raise NonPositiveConstantTerm(f"sqrt needs a positive constant term, got {c0}")
        k = np.arange(self.order + 1, dtype=DTYPE)
        half = DTYPE(0.5)
        b = np.ones(self.order + 1, dtype=DTYPE)
        for i in range(1, self.order + 1):
            b[i] = b[i - 1] * (half - (i - 1)) / i
        return self._series(b * c0 ** (half - k))

    def abs(self):
        """Jet of absolute coefficient values (for round-off magnitude bounds)."""
        return self._new(np.abs(self.coeffs))

    def allclose(self, other, atol: float = 1e-12) -> bool:
        if isinstance(other, _Jet):
            n = min(self.order, other.order)
            return (self.truncate(n) - other.truncate(n)).max_abs() <= atol
        return (self - other).max_abs() <= atol


class Jet2(_Jet):
    """Bivariate truncated Taylor series in ``(u, v)``.

    ``coeffs[i, j]`` multiplies ``u**i * v**j``; entries with ``i + j > order``
    are held at zero.  Instances are immutable.
    """

    __slots__ = ()

    def __init__(self, coeffs, order: int | None = None):
        src = np.asarray(coeffs, dtype=DTYPE)
        if src.ndim != 2:
            raise ValueError("Jet2 coefficients must be a 2-d array")
        if order is None:
            order = max(src.shape) - 1
        order = int(order)
        if order < 0:
            raise ValueError("order must be non-negative")
        out = np.zeros((order + 1, order + 1), dtype=DTYPE)
        n0 = min(order + 1, src.shape[0])
        n1 = min(order + 1, src.shape[1])
        out[:n0, :n1] = src[:n0, :n1]
        out[~_mask(order)] = 0.0
        self.order = order
        self.coeffs = _frozen(out)

    def _new(self, coeffs, order=None):
        return Jet2(coeffs, self.order if order is None else order)

    # constructors ---------------------------------------------------------
    @classmethod
    def zero(cls, order: int = DEFAULT_ORDER) -> "Jet2":
        return cls(np.zeros((order + 1, order + 1), dtype=DTYPE), order)

    @classmethod
    def constant(cls, value: float, order: int = DEFAULT_ORDER) -> "Jet2":
        out = np.zeros((order + 1, order + 1), dtype=DTYPE)
        out[0, 0] = value
        return cls(out, order)

    @classmethod
    def var_u(cls, order: int = DEFAULT_ORDER) -> "Jet2":
        return cls.from_terms({(1, 0): 1.0}, order)

    @classmethod
    def var_v(cls, order: int = DEFAULT_ORDER) -> "Jet2":
        return cls.from_terms({(0, 1): 1.0}, order)

    @classmethod
    def from_terms(cls, terms, order: int = DEFAULT_ORDER) -> "Jet2":
        """Build from ``{(i, j): c}`` or an iterable of ``(i, j, c)`` triples.

        Monomials above the order are dropped.
        """
        out = np.zeros((order + 1, order + 1), dtype=DTYPE)
        items = terms.items() if isinstance(terms, Mapping) else (((t[0], t[1]), t[2]) for t in terms)
        for (i, j), c in items:
            i, j = int(i), int(j)
            if i < 0 or j < 0:
                raise ValueError("negative exponent")
            if i + j <= order:
                out[i, j] += c
        return cls(out, order)

    @classmethod
    def from_function_of_u(cls, jet1: "Jet1") -> "Jet2":
        out = np.zeros((jet1.order + 1, jet1.order + 1), dtype=DTYPE)
        out[:, 0] = jet1.coeffs
        return cls(out, jet1.order)

    @classmethod
    def from_function_of_v(cls, jet1: "Jet1") -> "Jet2":
        out = np.zeros((jet1.order + 1, jet1.order + 1), dtype=DTYPE)
        out[0, :] = jet1.coeffs
        return cls(out, jet1.order)

    # algebra --------------------------------------------------------------
    def __getitem__(self, idx) -> float:
        i, j = idx
        if i < 0 or j < 0 or i + j > self.order:
            return 0.0
        return self.coeffs[i, j]

    def __mul__(self, other):
        if isinstance(other, Jet2):
            self._check(other)
            n = self.order + 1
            return Jet2(convolve2d(self.coeffs, other.coeffs)[:n, :n], self.order)
        if isinstance(other, _Jet):
            raise TypeError("cannot multiply Jet2 by Jet1; embed with from_function_of_u/v")
        return Jet2(self.coeffs * other, self.order)

    __rmul__ = __mul__

    def truncate(self, order: int) -> "Jet2":
        if order > self.order:
            raise OrderMismatch(f"cannot raise order {self.order} to {order} by truncation")
        return Jet2(self.coeffs, order)

    def as_polynomial(self, order: int) -> "Jet2":
        """Re-read the coefficients as an exact polynomial at another order.

        Raising the order pads with zeros, which is only meaningful when the
        jet is known to be a polynomial (fixture maps, user-supplied data).
        """
        return Jet2(self.coeffs, order)

    def diff(self, var: str) -> "Jet2":
        """Formal partial derivative; the result has order ``N - 1``."""
        n = self.order
        if n == 0:
            raise OrderMismatch("cannot differentiate an order-0 jet")
        if var == "u":
            out = self.coeffs[1:, :n] * np.arange(1, n + 1)[:, None]
        elif var == "v":
            out = self.coeffs[:n, 1:] * np.arange(1, n + 1)[None, :]
        else:
            raise ValueError("var must be 'u' or 'v'")
        return Jet2(out, n - 1)

    def integrate_v(self) -> "Jet2":
        """Antiderivative in ``v`` vanishing on ``v = 0`` (same order)."""
        n = self.order
        out = np.zeros((n + 1, n + 1), dtype=DTYPE)
        out[:, 1:] = self.coeffs[:, :n] / np.arange(1, n + 1)[None, :]
        return Jet2(out, n)

    def integrate_u(self) -> "Jet2":
        n = self.order
        out = np.zeros((n + 1, n + 1), dtype=DTYPE)
        out[1:, :] = self.coeffs[:n, :] / np.arange(1, n + 1)[:, None]
        return Jet2(out, n)

    def factor_v(self, tol: float = DIVISIBILITY_TOL) -> "Jet2":
        """Return ``a_hat`` with ``v * a_hat == self``; order drops by one."""
        resid = np.max(np.abs(self.coeffs[:, 0]))
        if resid > tol:
            raise NotDivisibleByV(f"restriction to v=0 does not vanish (max |c[i,0]| = {resid:.3e})")
        return Jet2(self.coeffs[: self.order, 1:], self.order - 1)

    def times_v(self) -> "Jet2":
        """Multiply by ``v`` (same order, top row is truncated)."""
        n = self.order
        out = np.zeros((n + 1, n + 1), dtype=DTYPE)
        out[:, 1:] = self.coeffs[:, :n]
        return Jet2(out, n)

    def restrict_v0(self) -> "Jet1":
        """The univariate jet ``u -> a(u, 0)``."""
        return Jet1(self.coeffs[:, 0], self.order)

    def restrict_u0(self) -> "Jet1":
        return Jet1(self.coeffs[0, :], self.order)

    def v_slice(self, j: int) -> "Jet1":
        """Coefficient of ``v**j`` as a jet in ``u`` of order ``N - j``."""
        if j > self.order:
            raise OrderMismatch("v-degree above order")
        return Jet1(self.coeffs[: self.order + 1 - j, j], self.order - j)

    def __call__(self, u, v):
        return jet_eval(self, u, v)

    def homogeneous(self, d: int) -> np.ndarray:
        """Coefficients ``h[i]`` of ``u**i v**(d-i)`` in the degree-``d`` part."""
        h = np.zeros(d + 1, dtype=DTYPE)
        if d > self.order:
            return h
        for i in range(d + 1):
            h[i] = self.coeffs[i, d - i]
        return h

    @classmethod
    def from_homogeneous(cls, parts: Mapping[int, np.ndarray], order: int) -> "Jet2":
        out = np.zeros((order + 1, order + 1), dtype=DTYPE)
        for d, h in parts.items():
            if d > order:
                continue
            for i in range(d + 1):
                out[i, d - i] = h[i]
        return cls(out, order)

    # substitutions --------------------------------------------------------
    def shift(self, pu: float, pv: float) -> "Jet2":
        """Re-expand the polynomial about ``(pu, pv)``.

        Exact for the truncated polynomial; as a germ of the underlying
        function it is accurate only when ``(pu, pv)`` is well inside the
        region where the truncation error is negligible.
        """
        n = self.order
        return Jet2(_taylor_shift_matrix(n, pu) @ self.coeffs @ _taylor_shift_matrix(n, pv).T, n)

    def compose_linear(self, matrix) -> "Jet2":
        """Substitute ``(u, v) -> (m00 u + m01 v, m10 u + m11 v)``."""
        (a, b), (c, d) = np.asarray(matrix, dtype=DTYPE)
        n = self.order
        x = Jet2.from_terms({(1, 0): a, (0, 1): b}, n)
        y = Jet2.from_terms({(1, 0): c, (0, 1): d}, n)
        return _substitute2(self, x, y)

    def compose_u(self, phi: "Jet1") -> "Jet2":
        """Substitute ``u -> phi(u)`` where ``phi(0) = 0``; ``v`` is unchanged."""
        if phi.order != self.order:
            raise OrderMismatch("phi must share the order of the jet")
        if abs(phi.constant_term) > 0.0:
            raise ValueError("phi must vanish at the origin")
        x = Jet2.from_function_of_u(phi)
        y = Jet2.var_v(self.order)
        return _substitute2(self, x, y)

    def along(self, cu: "Jet1", cv: "Jet1") -> "Jet1":
        """Restrict to the curve ``t -> (cu(t), cv(t))`` through the origin."""
        if cu.order != cv.order:
            raise OrderMismatch("curve components differ in order")
        if abs(cu.constant_term) > 0.0 or abs(cv.constant_term) > 0.0:
            raise ValueError("curve must pass through the origin")
        n = min(self.order, cu.order)
        cu, cv = cu.truncate(n), cv.truncate(n)
        upow = [Jet1.constant(1.0, n)]
        for _ in range(n):
            upow.append(upow[-1] * cu)
        acc = Jet1.zero(n)
        vpow = Jet1.constant(1.0, n)
        for j in range(n + 1):
            row = Jet1.zero(n)
            for i in range(n + 1 - j):
                cij = self.coeffs[i, j]
                if cij != 0.0:
                    row = row + upow[i] * cij
            acc = acc + row * vpow
            vpow = vpow * cv
        return acc

    # serialisation --------------------------------------------------------
    def to_json(self) -> dict:
        terms = [[int(i), int(j), float(self.coeffs[i, j])]
                 for i, j in zip(*np.nonzero(self.coeffs))]
        return {"order": self.order, "coeffs": terms}

    @classmethod
    def from_json(cls, obj, order: int | None = None) -> "Jet2":
        """Parse ``{"order": N, "coeffs": [[i, j, c], ...]}``.

        A bare number is read as a constant jet.  When ``order`` is given the
        data are read as an exact polynomial at that order.
        """
        if isinstance(obj, (int, float)):
            return cls.constant(float(obj), order if order is not None else DEFAULT_ORDER)
        n = int(obj.get("order", DEFAULT_ORDER)) if order is None else int(order)
        return cls.from_terms(obj.get("coeffs", []), n)

    def __repr__(self) -> str:
        terms = []
        for d in range(self.order + 1):
            for i in range(d, -1, -1):
                c = self.coeffs[i, d - i]
                if c != 0.0:
                    terms.append(_monomial(c, (("u", i), ("v", d - i))))
        return f"Jet2(order={self.order}: {' + '.join(terms) if terms else '0'})"


class Jet1(_Jet):
    """Univariate truncated Taylor series in ``t`` (usually ``t = u``)."""

    __slots__ = ()

    def __init__(self, coeffs, order: int | None = None):
        src = np.atleast_1d(np.asarray(coeffs, dtype=DTYPE))
        if src.ndim != 1:
            raise ValueError("Jet1 coefficients must be a 1-d array")
        if order is None:
            order = src.shape[0] - 1
        order = int(order)
        if order < 0:
            raise ValueError("order must be non-negative")
        out = np.zeros(order + 1, dtype=DTYPE)
        n0 = min(order + 1, src.shape[0])
        out[:n0] = src[:n0]
        self.order = order
        self.coeffs = _frozen(out)

    def _new(self, coeffs, order=None):
        return Jet1(coeffs, self.order if order is None else order)

    @classmethod
    def zero(cls, order: int = DEFAULT_ORDER) -> "Jet1":
        return cls(np.zeros(order + 1, dtype=DTYPE), order)

    @classmethod
    def constant(cls, value: float, order: int = DEFAULT_ORDER) -> "Jet1":
        out = np.zeros(order + 1, dtype=DTYPE)
        out[0] = value
        return cls(out, order)

    @classmethod
    def var(cls, order: int = DEFAULT_ORDER) -> "Jet1":
        out = np.zeros(order + 1, dtype=DTYPE)
        if order >= 1:
            out[1] = 1.0
        return cls(out, order)

    def __getitem__(self, i) -> float:
        if i < 0 or i > self.order:
            return 0.0
        return self.coeffs[i]

    def __mul__(self, other):
        if isinstance(other, Jet1):
            self._check(other)
            return Jet1(np.convolve(self.coeffs, other.coeffs)[: self.order + 1], self.order)
        if isinstance(other, _Jet):
            raise TypeError("cannot multiply Jet1 by Jet2")
        return Jet1(self.coeffs * other, self.order)

    __rmul__ = __mul__

    def truncate(self, order: int) -> "Jet1":
        if order > self.order:
            raise OrderMismatch(f"cannot raise order {self.order} to {order} by truncation")
        return Jet1(self.coeffs, order)

    def as_polynomial(self, order: int) -> "Jet1":
        return Jet1(self.coeffs, order)

    def diff(self) -> "Jet1":
        n = self.order
        if n == 0:
            raise OrderMismatch("cannot differentiate an order-0 jet")
        return Jet1(self.coeffs[1:] * np.arange(1, n + 1), n - 1)

    def integrate(self) -> "Jet1":
        n = self.order
        out = np.zeros(n + 1, dtype=DTYPE)
        out[1:] = self.coeffs[:n] / np.arange(1, n + 1)
        return Jet1(out, n)

    def factor_t(self, tol: float = DIVISIBILITY_TOL) -> "Jet1":
        """Return ``b`` with ``t * b == self``; order drops by one."""
        if abs(self.coeffs[0]) > tol:
            raise DivisionObstruction("constant term does not vanish")
        return Jet1(self.coeffs[1:], self.order - 1)

    def compose(self, inner: "Jet1") -> "Jet1":
        """``t -> self(inner(t))`` for ``inner(0) = 0``."""
        self._check(inner)
        if abs(inner.constant_term) > 0.0:
            raise ValueError("inner series must vanish at 0")
        acc = Jet1.constant(self.coeffs[self.order], self.order)
        for k in range(self.order - 1, -1, -1):
            acc = inner * acc + self.coeffs[k]
        return acc

    def revert(self) -> "Jet1":
        """Compositional inverse of a series with ``s(0) = 0``, ``s'(0) != 0``."""
        s1 = self[1]
        if abs(self.constant_term) > 0.0:
            raise ValueError("series must vanish at 0")
        if s1 == 0.0:
            raise ZeroConstantTerm("series is not invertible (zero linear term)")
        t = Jet1.var(self.order)
        phi = t / s1
        # each pass fixes one more coefficient
        for _ in range(self.order):
            phi = phi - (self.compose(phi) - t) / s1
        return phi

    def __call__(self, t):
        return npoly.polyval(t, self.coeffs)

    def to_json(self) -> dict:
        terms = [[int(i), float(c)] for i, c in enumerate(self.coeffs) if c != 0.0]
        return {"order": self.order, "coeffs": terms}

    @classmethod
    def from_json(cls, obj, order: int | None = None) -> "Jet1":
        """Parse ``{"order": N, "coeffs": [[i, c], ...]}``, a list, or a number."""
        if isinstance(obj, (int, float)):
            return cls.constant(float(obj), order if order is not None else DEFAULT_ORDER)
        if isinstance(obj, (list, tuple)):
            n = len(obj) - 1 if order is None else int(order)
            return cls(np.asarray(obj, dtype=DTYPE), n)
        n = int(obj.get("order", DEFAULT_ORDER)) if order is None else int(order)
        out = np.zeros(n + 1, dtype=DTYPE)
        for i, c in obj.get("coeffs", []):
            if int(i) <= n:
                out[int(i)] += c
        return cls(out, n)

    def __repr__(self) -> str:
        terms = [_monomial(c, (("t", i),)) for i, c in enumerate(self.coeffs) if c != 0.0]
        return f"Jet1(order={self.order}: {' + '.join(terms) if terms else '0'})"


def _taylor_shift_matrix(n: int, p: float) -> np.ndarray:
    """``T[i, k] = C(k, i) p**(k - i)``, so ``T @ c`` re-expands about ``p``."""
    k = np.arange(n + 1)
    expo = k[None, :] - k[:, None]
    T = binom(k[None, :], k[:, None]).astype(DTYPE) * DTYPE(p) ** np.clip(expo, 0, None)
    return np.where(expo >= 0, T, DTYPE(0))


def _monomial(c, powers) -> str:
    mono = "*".join(name if p == 1 else f"{name}^{p}" for name, p in powers if p)
    if not mono:
        return f"{float(c):.6g}"
    return f"{float(c):.6g}*{mono}"


def _substitute2(a: Jet2, x: Jet2, y: Jet2) -> Jet2:
    """Evaluate ``sum c[i, j] x**i y**j`` for jets ``x, y`` without constant term."""
    n = a.order
    xpow = [Jet2.constant(1.0, n)]
    for _ in range(n):
        xpow.append(xpow[-1] * x)
    acc = Jet2.zero(n)
    ypow = Jet2.constant(1.0, n)
    for j in range(n + 1):
        row = Jet2.zero(n)
        for i in range(n + 1 - j):
            cij = a.coeffs[i, j]
            if cij != 0.0:
                row = row + xpow[i] * cij
        acc = acc + row * ypow
        ypow = ypow * y
    return acc


# ---------------------------------------------------------------------------
# module-level operations

def scaled_residual(res, mag) -> float:
    """Componentwise relative residual ``max |res_ij| / max(1, mag_ij)``.

    ``mag`` is the same expression as ``res`` evaluated on absolute
    coefficient values, i.e. the size of the terms that cancelled.  The
    floor of this quantity is a small multiple of the unit round-off,
    independent of how large individual coefficients grow.
    """
    n = min(res.order, mag.order)
    r = np.abs(res.truncate(n).coeffs)
    d = np.maximum(1.0, mag.truncate(n).coeffs)
    return float(np.max(r / d))


def jet_mul(a, b):
    """Cauchy product truncated at the common order."""
    return a * b


def jet_div_unit(a, b):
    """Quotient ``q`` with ``q * b == a``; ``b`` must have a nonzero constant term."""
    if isinstance(b, _Jet):
        if b.constant_term == 0.0:
            raise ZeroConstantTerm("divisor has zero constant term")
        a._check(b) if isinstance(a, _Jet) else None
        return a * b.reciprocal()
    return a / b


def jet_exp(a):
    return a.exp()


def jet_log_unit(a):
    return a.log()


def jet_sqrt_unit(a):
    return a.sqrt()


def jet_diff(a: Jet2, var: str) -> Jet2:
    return a.diff(var)


def jet_factor_v(a: Jet2, tol: float = DIVISIBILITY_TOL) -> Jet2:
    return a.factor_v(tol)


def jet_integrate_v(a: Jet2) -> Jet2:
    return a.integrate_v()


def jet_eval(a: Jet2, u, v):
    """Evaluate the truncated polynomial; ``u`` and ``v`` may be arrays."""
    return npoly.polyval2d(u, v, a.coeffs)


def _divide_homogeneous(h: np.ndarray, p: float, r: float, tol: float):
    """Divide ``sum h[i] u^i v^(d-i)`` by ``p u + r v``.

    Returns ``(q, remainder)`` with ``q`` of degree ``d - 1``.  The larger of
    ``|p|, |r|`` is used as pivot.
    """
    d = len(h) - 1
    q = np.zeros(d, dtype=DTYPE)
    if d == 0:
        return q, abs(h[0])
    if abs(r) >= abs(p):
        # h[i] = p q[i-1] + r q[i], sweep upward in the u-power
        for i in range(d):
            prev = q[i - 1] if i > 0 else 0.0
            q[i] = (h[i] - p * prev) / r
        rem = h[d] - p * q[d - 1]
    else:
        for i in range(d, 0, -1):
            nxt = q[i] if i < d else 0.0
            q[i - 1] = (h[i] - r * nxt) / p
        rem = h[0] - r * q[0]
    return q, abs(rem)


def jet_div_exact(a: Jet2, b: Jet2, tol: float = DIVISIBILITY_TOL) -> Jet2:
    """Exact quotient ``a / b`` for ``b(0,0) = 0`` with nonzero linear part.

    The quotient is determined degree by degree; the result has order
    ``N - 1``.  Raises :class:`DivisionObstruction` when ``a`` is not
    divisible by ``b`` to the given coefficient tolerance.
    """
    a._check(b)
    n = a.order
    if abs(b[0, 0]) > tol:
        return jet_div_unit(a, b).truncate(n - 1)
    p, r = b[1, 0], b[0, 1]
    if p == 0.0 and r == 0.0:
        raise DivisionObstruction("divisor has vanishing linear part")
    if abs(a[0, 0]) > tol:
        raise DivisionObstruction(f"dividend does not vanish at the origin ({a[0, 0]:.3e})")
    bparts = {k: b.homogeneous(k) for k in range(2, n + 1)}
    qparts: dict[int, np.ndarray] = {}
    for d in range(0, n):
        target = a.homogeneous(d + 1).copy()
        for k in range(2, d + 2):
            qd = qparts[d + 1 - k]
            target -= np.convolve(bparts[k], qd)
        q, rem = _divide_homogeneous(target, p, r, tol)
        if rem > tol:
            raise DivisionObstruction(f"remainder {rem:.3e} in degree {d + 1}")
        qparts[d] = q
    return Jet2.from_homogeneous(qparts, n - 1)


def jet_sqrt_square(a: Jet2, tol: float = DIVISIBILITY_TOL) -> Jet2:
    """Square root of a jet that is a perfect square.

    For ``a(0,0) > 0`` this is :func:`jet_sqrt_unit` (same order).  For
    ``a(0,0) = 0`` the lowest part must be the square of a nonzero linear
    form ``l``; the root ``l + r2 + r3 + ...`` is recovered degree by degree
    and has order ``N - 1``.  The sign is chosen so that ``l`` has a
    positive leading coefficient in the ``v`` variable (else in ``u``).
    """
    n = a.order
    c0 = a[0, 0]
    if c0 > tol:
        return a.sqrt()
    if c0 < -tol:
        raise NoJetSquareRoot("negative constant term")
    if abs(a[1, 0]) > tol or abs(a[0, 1]) > tol:
        raise NoJetSquareRoot("linear part of a square must vanish")
    h2 = a.homogeneous(2)  # [c(0,2), c(1,1), c(2,0)] = v^2, uv, u^2
    cvv, cuv, cuu = h2
    scale = max(abs(cvv), abs(cuv), abs(cuu))
    if scale <= tol:
        raise DegenerateSemiDefinitePoint("quadratic part vanishes: the root has zero gradient")
    if cvv < -tol or cuu < -tol or abs(cuv * cuv - 4.0 * cuu * cvv) > 1e-9 * scale * scale:
        raise NoJetSquareRoot("quadratic part is not the square of a linear form")
    if cvv > tol:
        r = np.sqrt(cvv)
        p = cuv / (2.0 * r)
    else:
        p = np.sqrt(max(cuu, DTYPE(0)))
        r = DTYPE(0)
    parts: dict[int, np.ndarray] = {1: np.array([r, p])}
    for d in range(2, n):
        target = a.homogeneous(d + 1).copy()
        for i in range(2, d):
            target -= np.convolve(parts[i], parts[d + 1 - i])
        q, rem = _divide_homogeneous(target, 2.0 * p, 2.0 * r, tol)
        if rem > tol * max(1.0, a.max_abs()):
            raise NoJetSquareRoot(f"not a perfect square (remainder {rem:.3e} in degree {d + 1})")
        parts[d] = q
    # top degree of a is only used as a consistency check for the last part
    return Jet2.from_homogeneous(parts, n - 1)
