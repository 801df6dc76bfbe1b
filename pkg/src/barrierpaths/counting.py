"""Exact counts of nondecreasing sequences under a barrier.

``f(n)`` is the number of sequences ``0 <= a_0 <= ... <= a_n`` with
``a_j <= b_j``.  Four independent routes are provided:

* :func:`dp_counts` - the last-value triangle ``c(m, j)``
* :func:`recurrence_counts` - a signed linear recurrence in ``f``
* :func:`proctor_closed_form` - closed form for linear barriers
* :func:`kreweras_determinant` - a binomial determinant, two-barrier case

All arithmetic is on Python ints; nothing here touches floating point.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import accumulate, chain, repeat
from math import comb
from typing import Optional, Sequence

from .barrier import Barrier, BarrierLike, Linear, as_barrier

__all__ = [
    "CellBudgetExceeded",
    "CountTable",
    "DEFAULT_CELL_BUDGET",
    "DPTable",
    "DetConvention",
    "InternalInconsistency",
    "PRINTED_CONVENTION",
    "ResolutionReport",
    "AmbiguousConvention",
    "bareiss_determinant",
    "binomial",
    "candidate_conventions",
    "determinant_battery",
    "dp_counts",
    "dp_f",
    "kreweras_determinant",
    "kreweras_matrix",
    "proctor_closed_form",
    "proctor_counts",
    "recurrence_counts",
    "resolve_determinant_convention",
    "two_barrier_dp",
]

DEFAULT_CELL_BUDGET = 10**8


class CellBudgetExceeded(RuntimeError):
    """The DP triangle would need more cells than the configured budget."""


class InternalInconsistency(ArithmeticError):
    """An exact identity that must hold did not; indicates a bug."""


class AmbiguousConvention(RuntimeError):
    """More than one determinant convention survived the whole battery."""


def binomial(top: int, k: int) -> int:
    """``C(top, k)``, zero outside ``0 <= k <= top``."""
    if k < 0 or top < 0 or k > top:
        return 0
    return comb(top, k)


@dataclass
class CountTable:
    values: list[int]
    provenance: str

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, n: int) -> int:
        return self.values[n]

    @property
    def tags(self) -> tuple[str, ...]:
        return (self.provenance,) * len(self.values)


@dataclass
class DPTable:
    """Rows ``c(m, 0..b_m)`` of the last-value triangle.

    ``c(m, j)`` counts sequences of length ``m+1`` under the barrier whose
    last term is exactly ``j``; it is zero for ``j > b_m``.
    """

    barrier: list[int]
    rows: list[list[int]] = field(repr=False)

    def c(self, m: int, j: int) -> int:
        if m < 0 or j < 0 or m >= len(self.rows):
            return 0
        row = self.rows[m]
        return row[j] if j < len(row) else 0

    @property
    def num_rows(self) -> int:
        return len(self.rows)


def _cells(bvals: Sequence[int]) -> int:
    return sum(v + 1 for v in bvals)


def _iter_rows(bvals: Sequence[int]):
    # c(m, j) = c(m-1, j) + c(m, j-1): a running sum of the previous row
    # zero-padded out to b_m
    row = [1] * (bvals[0] + 1)
    yield row
    for bm in bvals[1:]:
        if bm + 1 <= len(row):
            src = row[: bm + 1]
        else:
            src = chain(row, repeat(0, bm + 1 - len(row)))
        row = list(accumulate(src))
        yield row


def dp_counts(
    b: BarrierLike,
    N: int,
    cell_budget: int = DEFAULT_CELL_BUDGET,
) -> tuple[DPTable, CountTable]:
    """Triangle rows ``0..N+1`` and ``f(0..N)``.

    Keeps every row in memory; use :func:`dp_f` when only ``f`` is needed.
    """
    if N < 0:
        raise ValueError(f"N must be >= 0, got {N}")
    b = as_barrier(b)
    bvals = b.prefix(N + 2)
    cells = _cells(bvals)
    if cells > cell_budget:
        raise CellBudgetExceeded(f"DP needs {cells} cells, budget is {cell_budget}")
    rows = list(_iter_rows(bvals))
    f = [sum(rows[n]) for n in range(N + 1)]
    return DPTable(bvals, rows), CountTable(f, "dp")


def dp_f(b: BarrierLike, N: int, cell_budget: int = DEFAULT_CELL_BUDGET) -> CountTable:
    """``f(0..N)`` by the triangle, holding one row at a time."""
    if N < 0:
        raise ValueError(f"N must be >= 0, got {N}")
    b = as_barrier(b)
    bvals = b.prefix(N + 1)
    cells = _cells(bvals)
    if cells > cell_budget:
        raise CellBudgetExceeded(f"DP needs {cells} cells, budget is {cell_budget}")
    return CountTable([sum(row) for row in _iter_rows(bvals)], "dp")


def recurrence_counts(b: BarrierLike, N: int) -> CountTable:
    """``f(0..N)`` from

        f(n) = (-1)^n C(b_0+1, n+1)
               + sum_{m<n} (-1)^(m+n+1) C(1+b_{m+1}, n-m) f(m)

    Evaluated in push form: once ``f(m)`` is known its contribution is added
    to every later ``n``.  Each accumulator still receives its terms in
    increasing ``m``.  ``O(N^2)`` big-int operations at worst, fewer when
    ``1+b_{m+1} < N-m`` since the binomial then vanishes.
    """
    if N < 0:
        raise ValueError(f"N must be >= 0, got {N}")
    b = as_barrier(b)
    bvals = b.prefix(N + 2)
    b0 = bvals[0]
    acc = [0] * (N + 1)
    f: list[int] = []
    for n in range(N + 1):
        head = comb(b0 + 1, n + 1) if n + 1 <= b0 + 1 else 0
        fn = (head if n % 2 == 0 else -head) + acc[n]
        if fn < 0:
            raise InternalInconsistency(f"recurrence produced negative f({n}) = {fn}")
        f.append(fn)
        if fn == 0:
            continue
        top = 1 + bvals[n + 1]
        c = 1
        for k in range(1, min(N - n, top) + 1):
            c = c * (top - k + 1) // k
            term = c * fn
            acc[n + k] += term if k % 2 else -term
    return CountTable(f, "recurrence")


def proctor_closed_form(r: int, s: int, n: int) -> int:
    """``(s+1)/(n+1) * C(s + (n+1)(r+1), n)`` for the barrier ``b_j = rj + s``."""
    if min(r, s, n) < 0:
        raise ValueError("r, s, n must be nonnegative")
    q, rem = divmod((s + 1) * comb(s + (n + 1) * (r + 1), n), n + 1)
    if rem:
        raise InternalInconsistency(f"closed form not integral at r={r}, s={s}, n={n}")
    return q


def proctor_counts(b: BarrierLike, N: int) -> CountTable:
    b = as_barrier(b)
    if not isinstance(b, Linear):
        raise TypeError("proctor method requires a linear barrier")
    if N < 0:
        raise ValueError(f"N must be >= 0, got {N}")
    r, s, a = b.r, b.s, b.r + 1
    # B(n) = C(T_n, n) with T_n = s + (n+1)(r+1), stepped by its ratio
    out = []
    B = 1
    for n in range(N + 1):
        q, rem = divmod((s + 1) * B, n + 1)
        if rem:
            raise InternalInconsistency(f"closed form not integral at r={r}, s={s}, n={n}")
        out.append(q)
        T = s + (n + 1) * a
        num = B
        for i in range(1, a + 1):
            num *= T + i
        den = n + 1
        for i in range(1, a):
            den *= T - n + i
        B = num // den
    return CountTable(out, "proctor")


def _check_two_barriers(lower: Sequence[int], upper: Sequence[int], n: int) -> None:
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if len(lower) < n + 1 or len(upper) < n + 1:
        raise ValueError(f"barriers need at least {n + 1} entries")
    for i in range(n + 1):
        if lower[i] > upper[i]:
            raise ValueError(f"barriers cross at index {i}: {lower[i]} > {upper[i]}")
        if i and (lower[i] < lower[i - 1] or upper[i] < upper[i - 1]):
            raise ValueError(f"barrier decreases at index {i}")
    if lower[0] < 0:
        raise ValueError("lower barrier must be nonnegative")


def two_barrier_dp(lower: Sequence[int], upper: Sequence[int], n: int) -> int:
    """Number of ``x_0 <= ... <= x_n`` with ``lower_i <= x_i <= upper_i``."""
    _check_two_barriers(lower, upper, n)
    # row[v - lower_i] = number of valid prefixes ending at value v
    row = [1] * (upper[0] - lower[0] + 1)
    for i in range(1, n + 1):
        lo_prev, hi_prev = lower[i - 1], upper[i - 1]
        prefix = list(accumulate(row))
        new = []
        for v in range(lower[i], upper[i] + 1):
            top = min(v, hi_prev) - lo_prev
            new.append(prefix[top] if top >= 0 else 0)
        row = new
    return sum(row)


def bareiss_determinant(matrix: Sequence[Sequence[int]]) -> int:
    """Exact determinant of an integer matrix by fraction-free elimination.

    Every division is exact.  Zero pivots are handled by a row swap, which
    flips the sign.
    """
    a = [list(r) for r in matrix]
    n = len(a)
    if n == 0:
        return 1
    if any(len(r) != n for r in a):
        raise ValueError("matrix must be square")
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = a[k][k]
        rk = a[k]
        for i in range(k + 1, n):
            ri = a[i]
            aik = ri[k]
            for j in range(k + 1, n):
                ri[j] = (pivot * ri[j] - aik * rk[j]) // prev
            ri[k] = 0
        prev = pivot
    return sign * a[n - 1][n - 1]


@dataclass(frozen=True)
class DetConvention:
    """One reading of the binomial determinant.

    Entry ``(i, j)`` is ``C(b_i - a_j + K, d + K)`` where ``K`` is ``n`` or
    ``1`` (``offset``), ``d`` is ``i - j`` or ``j - i`` (``diff``), and
    ``i, j`` range over ``indices``: ``"0..n"`` ((n+1)x(n+1)), ``"1..n"`` or
    ``"0..n-1"`` (both n x n).  ``transpose`` swaps the roles of ``i`` and
    ``j`` in the entry formula.
    """

    offset: str = "n"
    diff: str = "i-j"
    indices: str = "0..n"
    transpose: bool = False

    @property
    def name(self) -> str:
        t = "^T" if self.transpose else ""
        return f"C(b_i-a_j+{self.offset}, {self.diff}+{self.offset}), i,j={self.indices}{t}"

    def __str__(self) -> str:
        return self.name


PRINTED_CONVENTION = DetConvention()


def candidate_conventions() -> list[DetConvention]:
    out = [PRINTED_CONVENTION, DetConvention(transpose=True)]
    for offset in ("n", "1"):
        for diff in ("i-j", "j-i"):
            for indices in ("0..n", "1..n", "0..n-1"):
                conv = DetConvention(offset, diff, indices)
                if conv != PRINTED_CONVENTION:
                    out.append(conv)
    return out


def kreweras_matrix(
    lower: Sequence[int], upper: Sequence[int], n: int, conv: DetConvention = PRINTED_CONVENTION
) -> list[list[int]]:
    _check_two_barriers(lower, upper, n)
    K = n if conv.offset == "n" else 1
    idx = {"0..n": range(0, n + 1), "1..n": range(1, n + 1), "0..n-1": range(0, n)}[conv.indices]

    def entry(i: int, j: int) -> int:
        if conv.transpose:
            i, j = j, i
        d = i - j if conv.diff == "i-j" else j - i
        return binomial(upper[i] - lower[j] + K, d + K)

    return [[entry(i, j) for j in idx] for i in idx]


def kreweras_determinant(
    lower: Sequence[int], upper: Sequence[int], n: int, conv: DetConvention = PRINTED_CONVENTION
) -> int:
    """Determinant of the binomial matrix under ``conv``.

    The value may be negative or disagree with :func:`two_barrier_dp`; that
    is data about the convention, not an error.
    """
    return bareiss_determinant(kreweras_matrix(lower, upper, n, conv))


Instance = tuple[tuple[int, ...], tuple[int, ...], int]

# lower = 0, upper = (0, 1, 2), n = 2: the printed reading gives 1, the count is 5
WITNESS_INSTANCE: Instance = ((0, 0, 0), (0, 1, 2), 2)


def determinant_battery(
    seed: int, size: int = 60, max_n: int = 6, max_value: int = 8, include_witness: bool = True
) -> list[Instance]:
    """Deterministic random two-barrier instances."""
    rng = random.Random(seed)
    out: list[Instance] = [WITNESS_INSTANCE] if include_witness else []
    while len(out) < size + include_witness:
        n = rng.randint(0, max_n)
        xs = sorted(rng.randint(0, max_value) for _ in range(n + 1))
        ys = sorted(rng.randint(0, max_value) for _ in range(n + 1))
        lower = tuple(min(x, y) for x, y in zip(xs, ys))
        upper = tuple(max(x, y) for x, y in zip(xs, ys))
        out.append((lower, upper, n))
    return out


@dataclass
class ResolutionReport:
    """Outcome of matching determinant conventions against the DP count.

    ``convention`` is the unique survivor, or ``None`` (no match).
    ``failures`` maps each candidate name to its mismatch count.
    """

    convention: Optional[DetConvention]
    failures: dict[str, int]
    battery_size: int
    seed: int

    @property
    def matched(self) -> bool:
        return self.convention is not None


def resolve_determinant_convention(battery_seed: int = 0, size: int = 60) -> ResolutionReport:
    battery = determinant_battery(battery_seed, size)
    oracle = [two_barrier_dp(lo, hi, n) for lo, hi, n in battery]
    candidates = candidate_conventions()
    failures = {}
    for conv in candidates:
        failures[conv.name] = sum(
            kreweras_determinant(lo, hi, n, conv) != want
            for (lo, hi, n), want in zip(battery, oracle)
        )
    survivors = [c for c in candidates if failures[c.name] == 0]
    if len(survivors) > 1:
        names = ", ".join(c.name for c in survivors)
        raise AmbiguousConvention(f"{len(survivors)} conventions survive the battery: {names}")
    return ResolutionReport(survivors[0] if survivors else None, failures, len(battery), battery_seed)
