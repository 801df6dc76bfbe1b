"""Dense truncated power series over the rationals, and the identity checks
built on them.

Coefficients are Python ints or :class:`fractions.Fraction`; there is no
floating point in this module.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Optional, Sequence, Union

from .barrier import BarrierLike, as_barrier
from .counting import InternalInconsistency, binomial, dp_counts, dp_f

__all__ = [
    "KernelReport",
    "OrderMismatch",
    "TruncatedSeries",
    "gf_identity_residual",
    "kernel_identity_check",
    "lagrange_coefficient",
    "lagrange_inversion_coefficient",
    "negative_binomial_coefficient",
    "one_minus_x_pow",
    "series_add",
    "series_mul",
    "series_pow",
    "solve_fixed_point_series",
]

Coeff = Union[int, Fraction]


class OrderMismatch(ValueError):
    pass


def _norm(c) -> Coeff:
    if isinstance(c, int):
        return c
    if isinstance(c, Fraction):
        return c.numerator if c.denominator == 1 else c
    if isinstance(c, Rational):
        return _norm(Fraction(c.numerator, c.denominator))
    raise TypeError(f"series coefficients must be exact rationals, got {type(c).__name__}")


class TruncatedSeries:
    """``c_0 + c_1 x + ... + c_N x^N`` modulo ``x^(N+1)``."""

    __slots__ = ("order", "coeffs")

    def __init__(self, coeffs: Iterable, order: Optional[int] = None):
        cs = [_norm(c) for c in coeffs]
        if order is None:
            order = len(cs) - 1
        if order < 0:
            raise ValueError("order must be >= 0")
        cs = cs[: order + 1]
        cs.extend([0] * (order + 1 - len(cs)))
        self.order = order
        self.coeffs = tuple(cs)

    @classmethod
    def zero(cls, order: int) -> "TruncatedSeries":
        return cls([], order)

    @classmethod
    def one(cls, order: int) -> "TruncatedSeries":
        return cls([1], order)

    @classmethod
    def x(cls, order: int) -> "TruncatedSeries":
        return cls([0, 1], order)

    def __getitem__(self, k: int) -> Coeff:
        return self.coeffs[k] if 0 <= k <= self.order else 0

    def __repr__(self) -> str:
        return f"TruncatedSeries({list(self.coeffs)!r}, order={self.order})"

    def __str__(self) -> str:
        terms = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mono = "" if k == 0 else ("x" if k == 1 else f"x^{k}")
            if mono and c == 1:
                terms.append(mono)
            elif mono and c == -1:
                terms.append("-" + mono)
            else:
                terms.append(f"{c}{'*' if mono else ''}{mono}")
        return (" + ".join(terms).replace("+ -", "- ") or "0") + f" + O(x^{self.order + 1})"

    def __eq__(self, other) -> bool:
        if isinstance(other, TruncatedSeries):
            return self.order == other.order and self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.order, self.coeffs))

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def first_nonzero(self) -> Optional[int]:
        for k, c in enumerate(self.coeffs):
            if c:
                return k
        return None

    def _check(self, other: "TruncatedSeries") -> None:
        if not isinstance(other, TruncatedSeries):
            raise TypeError(f"expected TruncatedSeries, got {type(other).__name__}")
        if other.order != self.order:
            raise OrderMismatch(f"order {self.order} vs {other.order}")

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        self._check(other)
        return TruncatedSeries([a + b for a, b in zip(self.coeffs, other.coeffs)], self.order)

    def __sub__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        self._check(other)
        return TruncatedSeries([a - b for a, b in zip(self.coeffs, other.coeffs)], self.order)

    def __neg__(self) -> "TruncatedSeries":
        return TruncatedSeries([-a for a in self.coeffs], self.order)

    def scale(self, c) -> "TruncatedSeries":
        c = _norm(c)
        return TruncatedSeries([c * a for a in self.coeffs], self.order)

    def __mul__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        self._check(other)
        a, b, N = self.coeffs, other.coeffs, self.order
        out: list[Coeff] = [0] * (N + 1)
        for i, ai in enumerate(a):
            if ai == 0:
                continue
            for j in range(N + 1 - i):
                bj = b[j]
                if bj:
                    out[i + j] += ai * bj
        return TruncatedSeries(out, N)

    def __pow__(self, k: int) -> "TruncatedSeries":
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a nonnegative int")
        result = TruncatedSeries.one(self.order)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def shift(self, k: int) -> "TruncatedSeries":
        """Multiply by ``x^k``."""
        if k < 0:
            raise ValueError("shift must be >= 0")
        return TruncatedSeries([0] * k + list(self.coeffs), self.order)

    def inverse(self) -> "TruncatedSeries":
        c0 = self.coeffs[0]
        if c0 == 0:
            raise ZeroDivisionError("series with zero constant term is not invertible")
        N = self.order
        inv: list[Coeff] = [_norm(Fraction(1) / c0)]
        for n in range(1, N + 1):
            s = sum(self.coeffs[k] * inv[n - k] for k in range(1, n + 1))
            inv.append(_norm(-s * inv[0]))
        return TruncatedSeries(inv, N)

    def derivative(self) -> "TruncatedSeries":
        """Formal derivative; the top coefficient becomes 0."""
        return TruncatedSeries([k * c for k, c in enumerate(self.coeffs)][1:], self.order)


def series_add(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    return a + b


def series_mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    return a * b


def series_pow(a: TruncatedSeries, k: int) -> TruncatedSeries:
    return a ** k


def one_minus_x_pow(k: int, N: int) -> TruncatedSeries:
    """``(1 - x)^k`` truncated at ``x^N``; coefficient ``(-1)^j C(k, j)``."""
    if k < 0:
        raise ValueError("k must be >= 0")
    return TruncatedSeries([(-1) ** j * binomial(k, j) for j in range(min(k, N) + 1)], N)


def gf_identity_residual(b: BarrierLike, N: int) -> TruncatedSeries:
    """``1 - (1-x)^(1+b_0) - sum_{n<N} f(n) x^(n+1) (1-x)^(1+b_{n+1})``.

    Terms with ``n >= N`` start at ``x^(N+1)``, so the residual must vanish
    identically through degree ``N``.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    b = as_barrier(b)
    f = dp_f(b, N - 1).values
    bvals = b.prefix(N + 1)
    res = TruncatedSeries.one(N) - one_minus_x_pow(1 + bvals[0], N)
    for n in range(N):
        term = one_minus_x_pow(1 + bvals[n + 1], N).shift(n + 1).scale(f[n])
        res = res - term
    return res


@dataclass
class KernelReport:
    """Coefficient comparison of both sides of

        (1 - x - t) C(x, t) = 1 - t^(1+b_0) - sum_{m>0} f(m-1) x^m t^(1+b_m)

    over the window ``m <= M``, ``j <= J``.
    """

    M: int
    J: int
    checked: int
    mismatches: list[tuple[int, int, int, int]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.mismatches


def kernel_identity_check(b: BarrierLike, M: int = 40, J: int = 40) -> KernelReport:
    if M < 1 or J < 1:
        raise ValueError("M and J must be >= 1")
    b = as_barrier(b)
    table, counts = dp_counts(b, M)
    f = counts.values
    bvals = table.barrier
    c = table.c
    report = KernelReport(M, J, 0)
    for m in range(M + 1):
        for j in range(J + 1):
            lhs = c(m, j) - c(m - 1, j) - c(m, j - 1)
            rhs = 0
            if m == 0:
                rhs += (j == 0) - (j == 1 + bvals[0])
            elif j == 1 + bvals[m]:
                rhs -= f[m - 1]
            report.checked += 1
            if lhs != rhs:
                report.mismatches.append((m, j, lhs, rhs))
    return report


def solve_fixed_point_series(r: int, N: int) -> TruncatedSeries:
    """The series ``X(y)`` with ``X(0) = 0`` and ``X (1 - X)^r = y``.

    Coefficient ``n`` of ``X (1-X)^r`` is ``x_n`` plus terms in
    ``x_1..x_{n-1}``, so each coefficient is solved for in turn.
    """
    if r < 0:
        raise ValueError("r must be >= 0")
    if N < 1:
        raise ValueError("N must be >= 1")
    one = TruncatedSeries.one(N)
    xs: list[Coeff] = [0] * (N + 1)
    for n in range(1, N + 1):
        X = TruncatedSeries(xs, N)
        lhs = X * (one - X) ** r
        xs[n] = (n == 1) - lhs[n]
    X = TruncatedSeries(xs, N)
    if X * (one - X) ** r != TruncatedSeries.x(N):
        raise InternalInconsistency(f"X(1-X)^{r} != y through order {N}")
    return X


def negative_binomial_coefficient(k: int, n: int) -> int:
    """``[x^n] (1 - x)^(-k) = C(n + k - 1, n)``."""
    if k == 0:
        return int(n == 0)
    return binomial(n + k - 1, n)


def lagrange_inversion_coefficient(
    h_prime: TruncatedSeries, phi: TruncatedSeries, n: int
) -> Fraction:
    """``[y^n] H(x(y)) = (1/n) [x^(n-1)] H'(x) phi(x)^n`` where ``x = y phi(x)``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if phi[0] != 1:
        raise ValueError("phi must have constant term 1")
    if h_prime.order < n - 1:
        raise ValueError(f"series order {h_prime.order} too small for n={n}")
    return Fraction((h_prime * phi ** n)[n - 1]) / n


def lagrange_coefficient(r: int, s: int, n: int) -> int:
    """``f(n)`` for ``b_j = rj + s`` as ``(1/(n+1)) [x^n] (s+1)(1-x)^-(s+2+(n+1)r)``."""
    if min(r, s, n) < 0:
        raise ValueError("r, s, n must be nonnegative")
    k = s + 2 + (n + 1) * r
    value = Fraction((s + 1) * negative_binomial_coefficient(k, n), n + 1)
    if value.denominator != 1:
        raise InternalInconsistency(f"non-integral coefficient at r={r}, s={s}, n={n}")
    return value.numerator
