"""Barrier families and the barrier-spec mini-language.

A barrier is an infinite nondecreasing sequence ``b_0 <= b_1 <= ...`` of
nonnegative integers.  Only closed families are supported so that the
growth rate ``liminf b_n / n`` is known exactly:

    const:s=7
    linear:r=2,s=1                  b_n = 2n + 1
    list:0,2,2,5;ext=last           0, 2, 2, 5, 5, 5, ...
    list:1,3;ext=linear(2)          1, 3, 5, 7, ...
    linsqrt:theta=1/2,c=5           b_n = floor(n/2 + 5 sqrt(n))
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Optional, Union

__all__ = [
    "Barrier",
    "BarrierSpecError",
    "Constant",
    "Explicit",
    "GrowthRate",
    "Linear",
    "LinearSqrt",
    "format_barrier_spec",
    "growth_rate",
    "parse_barrier_spec",
    "prefix",
]


class BarrierSpecError(ValueError):
    """Raised for malformed or semantically invalid barrier specs.

    ``position`` is the 0-based character offset of a syntax error, or
    ``None`` for semantic errors (decreasing lists, zero denominators).
    """

    def __init__(self, message: str, position: Optional[int] = None, spec: str = ""):
        self.position = position
        self.spec = spec
        if position is not None:
            message = f"{message} at position {position}"
            if spec:
                message += f"\n  {spec}\n  {' ' * position}^"
        super().__init__(message)


@dataclass(frozen=True)
class GrowthRate:
    """Exact ``liminf b_n / n``.

    ``value`` is a Fraction for finite rates; ``kind`` is one of
    ``"finite"``, ``"infinite"`` or ``"unknown"``.  The supported families
    always produce a finite rate; the other kinds exist so callers handle
    them explicitly.
    """

    value: Optional[Fraction]
    kind: str = "finite"

    @property
    def is_finite(self) -> bool:
        return self.kind == "finite"

    def __str__(self) -> str:
        if self.kind == "finite":
            return f"{self.value.numerator}/{self.value.denominator}"
        return self.kind


def _check_nonneg(name: str, value: int) -> None:
    if not isinstance(value, int) or isinstance(value, bool):
        raise TypeError(f"{name} must be an int, got {type(value).__name__}")
    if value < 0:
        raise BarrierSpecError(f"{name} must be nonnegative, got {value}")


class Barrier:
    """Base class; subclasses are immutable and hashable."""

    def eval(self, n: int) -> int:
        raise NotImplementedError

    def __getitem__(self, n: int) -> int:
        return self.eval(n)

    def prefix(self, n: int) -> list[int]:
        return [self.eval(i) for i in range(n)]

    def growth_rate(self) -> GrowthRate:
        raise NotImplementedError

    def sqrt_deviation_certified(self) -> bool:
        """True if ``|b_n - theta*n| = O(sqrt(n))`` holds for this family."""
        raise NotImplementedError

    def spec(self) -> str:
        return format_barrier_spec(self)

    def _check_index(self, n: int) -> None:
        if n < 0:
            raise ValueError(f"barrier index must be >= 0, got {n}")


@dataclass(frozen=True)
class Constant(Barrier):
    s: int

    def __post_init__(self) -> None:
        _check_nonneg("s", self.s)

    def eval(self, n: int) -> int:
        self._check_index(n)
        return self.s

    def growth_rate(self) -> GrowthRate:
        return GrowthRate(Fraction(0))

    def sqrt_deviation_certified(self) -> bool:
        return True


@dataclass(frozen=True)
class Linear(Barrier):
    """``b_n = r*n + s``."""

    r: int
    s: int

    def __post_init__(self) -> None:
        _check_nonneg("r", self.r)
        _check_nonneg("s", self.s)

    def eval(self, n: int) -> int:
        self._check_index(n)
        return self.r * n + self.s

    def growth_rate(self) -> GrowthRate:
        return GrowthRate(Fraction(self.r))

    def sqrt_deviation_certified(self) -> bool:
        return True


EXT_LAST = "last"
EXT_LINEAR = "linear"


@dataclass(frozen=True)
class Explicit(Barrier):
    """A finite nondecreasing list, continued forever by ``extension``.

    ``extension`` is ``"last"`` (repeat the final value) or ``"linear"``
    (keep adding ``step`` per index).
    """

    values: tuple[int, ...]
    extension: str = EXT_LAST
    step: int = 0

    def __post_init__(self) -> None:
        if not isinstance(self.values, tuple):
            object.__setattr__(self, "values", tuple(self.values))
        if not self.values:
            raise BarrierSpecError("explicit barrier needs at least one value")
        for i, v in enumerate(self.values):
            _check_nonneg(f"values[{i}]", v)
            if i and v < self.values[i - 1]:
                raise BarrierSpecError(f"barrier not nondecreasing at index {i}")
        if self.extension not in (EXT_LAST, EXT_LINEAR):
            raise BarrierSpecError(f"unknown extension {self.extension!r}")
        _check_nonneg("step", self.step)
        if self.extension == EXT_LAST and self.step:
            raise BarrierSpecError("ext=last takes no step")

    def eval(self, n: int) -> int:
        self._check_index(n)
        k = len(self.values)
        if n < k:
            return self.values[n]
        return self.values[-1] + self.step * (n - k + 1)

    def growth_rate(self) -> GrowthRate:
        return GrowthRate(Fraction(self.step))

    def sqrt_deviation_certified(self) -> bool:
        # b_n - step*n is eventually constant
        return True


@dataclass(frozen=True)
class LinearSqrt(Barrier):
    """``b_n = floor(theta*n + c*sqrt(n))`` with rational ``theta``.

    Monotone for all nonnegative parameters since ``theta*n + c*sqrt(n)``
    is nondecreasing in ``n``.
    """

    theta: Fraction
    c: int

    def __post_init__(self) -> None:
        theta = self.theta
        if isinstance(theta, tuple):
            num, den = theta
            if den == 0:
                raise BarrierSpecError("theta denominator must be positive")
            theta = Fraction(num, den)
        theta = Fraction(theta)
        if theta < 0:
            raise BarrierSpecError(f"theta must be nonnegative, got {theta}")
        object.__setattr__(self, "theta", theta)
        _check_nonneg("c", self.c)

    def eval(self, n: int) -> int:
        self._check_index(n)
        num, den = self.theta.numerator, self.theta.denominator
        # floor((num*n + den*c*sqrt(n)) / den); the floor is unchanged when
        # the irrational part is replaced by its integer floor
        return (num * n + isqrt(den * den * self.c * self.c * n)) // den

    def growth_rate(self) -> GrowthRate:
        return GrowthRate(self.theta)

    def sqrt_deviation_certified(self) -> bool:
        return True


def growth_rate(b: Barrier) -> GrowthRate:
    return b.growth_rate()


def prefix(b: Barrier, n: int) -> list[int]:
    if n < 0:
        raise ValueError(f"prefix length must be >= 0, got {n}")
    return b.prefix(n)


def format_barrier_spec(b: Barrier) -> str:
    if isinstance(b, Constant):
        return f"const:s={b.s}"
    if isinstance(b, Linear):
        return f"linear:r={b.r},s={b.s}"
    if isinstance(b, LinearSqrt):
        t = b.theta
        return f"linsqrt:theta={t.numerator}/{t.denominator},c={b.c}"
    if isinstance(b, Explicit):
        body = "list:" + ",".join(str(v) for v in b.values)
        if b.extension == EXT_LINEAR:
            return body + f";ext=linear({b.step})"
        return body + ";ext=last"
    raise TypeError(f"not a barrier: {b!r}")


class _Scanner:
    """Cursor over a spec string with position-annotated failures."""

    _INT = re.compile(r"[0-9]+")

    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def fail(self, message: str, pos: Optional[int] = None) -> BarrierSpecError:
        return BarrierSpecError(message, self.pos if pos is None else pos, self.text)

    def literal(self, lit: str) -> None:
        if not self.text.startswith(lit, self.pos):
            raise self.fail(f"expected {lit!r}")
        self.pos += len(lit)

    def peek(self, lit: str) -> bool:
        return self.text.startswith(lit, self.pos)

    def integer(self) -> int:
        m = self._INT.match(self.text, self.pos)
        if m is None:
            raise self.fail("expected nonnegative integer")
        self.pos = m.end()
        return int(m.group())

    def at_end(self) -> bool:
        return self.pos == len(self.text)


def parse_barrier_spec(spec: str) -> Barrier:
    """Parse a barrier spec such as ``"linear:r=1,s=0"``.

    Raises BarrierSpecError with a character position for syntax errors.
    """
    sc = _Scanner(spec)
    if sc.peek("const:"):
        sc.literal("const:s=")
        family = ("const", sc.integer())
    elif sc.peek("linear:"):
        sc.literal("linear:r=")
        r = sc.integer()
        sc.literal(",s=")
        family = ("linear", r, sc.integer())
    elif sc.peek("list:"):
        sc.literal("list:")
        values = [sc.integer()]
        while sc.peek(","):
            sc.literal(",")
            values.append(sc.integer())
        family = ("list", values)
    elif sc.peek("linsqrt:"):
        sc.literal("linsqrt:theta=")
        num = sc.integer()
        sc.literal("/")
        den_pos = sc.pos
        den = sc.integer()
        if den == 0:
            raise sc.fail("theta denominator must be positive", den_pos)
        sc.literal(",c=")
        family = ("linsqrt", Fraction(num, den), sc.integer())
    else:
        raise sc.fail("expected one of 'const:', 'linear:', 'list:', 'linsqrt:'")

    ext: Optional[tuple[str, int]] = None
    while not sc.at_end():
        sc.literal(";")
        opt_pos = sc.pos
        sc.literal("ext=")
        if sc.peek("last"):
            sc.literal("last")
            opt = (EXT_LAST, 0)
        elif sc.peek("linear("):
            sc.literal("linear(")
            opt = (EXT_LINEAR, sc.integer())
            sc.literal(")")
        else:
            raise sc.fail("expected 'last' or 'linear(INT)'")
        if family[0] != "list":
            raise BarrierSpecError(f"ext option only applies to list barriers (at position {opt_pos})")
        if ext is not None:
            raise BarrierSpecError(f"duplicate ext option (at position {opt_pos})")
        ext = opt

    kind = family[0]
    if kind == "const":
        return Constant(family[1])
    if kind == "linear":
        return Linear(family[1], family[2])
    if kind == "linsqrt":
        return LinearSqrt(family[1], family[2])
    extension, step = ext or (EXT_LAST, 0)
    return Explicit(tuple(family[1]), extension, step)


BarrierLike = Union[Barrier, str]


def as_barrier(b: BarrierLike) -> Barrier:
    """Accept either a Barrier or a spec string."""
    if isinstance(b, Barrier):
        return b
    if isinstance(b, str):
        return parse_barrier_spec(b)
    raise TypeError(f"expected Barrier or spec string, got {type(b).__name__}")
