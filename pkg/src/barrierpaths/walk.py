"""Random walk below a barrier, exact weights, and the equality trichotomy.

The walk starts at ``(-1, 0)``.  Each step is rightward with probability
``p`` and upward with probability ``q = 1 - p``; while in column ``x`` the
height may not exceed ``b_{x+1}``.  The walk stops the first time it does.
``M`` is the last column reached and ``A_i`` the height at which column
``i`` was entered, so ``A`` is a nondecreasing sequence under ``b`` and

    P(M = -1)        = q^(b_0 + 1)
    P(A = a), |a|=m+1 = p^(m+1) q^(b_{m+1} + 1)

Exact quantities use :class:`fractions.Fraction`; only the Monte Carlo
summaries carry floats, and those are labelled approximate.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from statistics import NormalDist
from collections.abc import Sequence
from typing import Optional, Union

import numpy as np

from . import _kernels
from .barrier import Barrier, BarrierLike, GrowthRate, Linear, as_barrier
from .counting import DEFAULT_CELL_BUDGET, dp_f, proctor_counts

__all__ = [
    "CASE_I",
    "CASE_II",
    "CASE_III",
    "UNKNOWN",
    "EscapeEstimate",
    "ExitStats",
    "PartialSums",
    "WalkConfig",
    "WalkOutcome",
    "WeightReport",
    "approx_decimal",
    "classify_equality",
    "escape_probability_estimate",
    "exit_distribution",
    "escape_from_runs",
    "exit_probability",
    "exit_stats_from_runs",
    "run_trials",
    "simulate_walk",
    "truncated_weight_sum",
    "walk_from_moves",
    "weight",
]

CASE_I = "Equality-case-i"
CASE_II = "Equality-case-ii"
CASE_III = "Inequality-case-iii"
UNKNOWN = "Unknown"

DEFAULT_STEP_CAP = 10**5

RationalLike = Union[Fraction, int, str]


def as_probability(p: RationalLike) -> Fraction:
    """Parse ``p`` exactly; floats are refused."""
    if isinstance(p, float):
        raise TypeError("p must be an exact rational such as Fraction(1, 2) or '1/2'")
    p = Fraction(p)
    if not 0 < p < 1:
        raise ValueError(f"p must lie strictly between 0 and 1, got {p}")
    return p


def approx_decimal(x: Fraction, digits: int = 12) -> str:
    """Render ``x`` with ``digits`` significant digits, correctly rounded."""
    x = Fraction(x)
    if x == 0:
        return "0"
    sign = "-" if x < 0 else ""
    x = abs(x)
    # estimate then correct the decimal exponent
    e = math.floor((x.numerator.bit_length() - x.denominator.bit_length()) * math.log10(2))
    while x >= Fraction(10) ** (e + 1):
        e += 1
    while x < Fraction(10) ** e:
        e -= 1
    scaled = x * Fraction(10) ** (digits - 1 - e)
    q = round(scaled)
    if q >= 10**digits:
        q //= 10
        e += 1
    s = str(q)
    mantissa = s[0] + ("." + s[1:].rstrip("0") if s[1:].rstrip("0") else "")
    if -5 <= e < digits:
        return sign + format_plain(s, e)
    return f"{sign}{mantissa}e{e:+d}"


def format_plain(digit_str: str, e: int) -> str:
    if e >= 0:
        head, tail = digit_str[: e + 1], digit_str[e + 1:]
        head = head.ljust(e + 1, "0")
    else:
        head, tail = "0", "0" * (-e - 1) + digit_str
    tail = tail.rstrip("0")
    return head + ("." + tail if tail else "")


def weight(m: int, b: BarrierLike, p: RationalLike) -> Fraction:
    """Weight of any one sequence of length ``m+1`` under ``b``."""
    if m < 0:
        raise ValueError("m must be >= 0")
    b = as_barrier(b)
    p = as_probability(p)
    q = 1 - p
    return p ** (m + 1) * q ** (b.eval(m + 1) + 1) / (1 - q ** (1 + b.eval(0)))


def exit_probability(m: int, b: BarrierLike, p: RationalLike, f_m: Optional[int] = None) -> Fraction:
    """``P(M = m)``: ``q^(b_0+1)`` for ``m = -1``, else ``f(m) p^(m+1) q^(b_{m+1}+1)``."""
    b = as_barrier(b)
    p = as_probability(p)
    q = 1 - p
    if m == -1:
        return q ** (b.eval(0) + 1)
    if f_m is None:
        f_m = dp_f(b, m).values[m]
    return f_m * p ** (m + 1) * q ** (b.eval(m + 1) + 1)


def classify_equality(b: BarrierLike, p: RationalLike) -> str:
    """Whether the total weight equals 1, by comparing ``theta`` with ``q/p``."""
    b = as_barrier(b)
    p = as_probability(p)
    ratio = (1 - p) / p
    theta = b.growth_rate()
    if theta.kind == "infinite":
        return CASE_III
    if not theta.is_finite:
        return UNKNOWN
    if theta.value < ratio:
        return CASE_I
    if theta.value > ratio:
        return CASE_III
    return CASE_II if b.sqrt_deviation_certified() else UNKNOWN


class PartialSums(Sequence):
    """``S_0..S_N`` held as unreduced ``(numerator, denominator)`` pairs.

    Reducing tens of thousands of huge fractions dominates the cost of a
    long sum, so a :class:`~fractions.Fraction` is built only on access.
    """

    def __init__(self, numerators: list[int], exps: list[int], base: int, norm: tuple[int, int]):
        self._nums = numerators
        self._exps = exps
        self._base = base
        self._norm = norm

    def __len__(self) -> int:
        return len(self._nums)

    def raw(self, n: int) -> tuple[int, int]:
        if n < 0:
            n += len(self)
        num, den = self._norm
        return self._nums[n] * num, self._base ** self._exps[n] * den

    def __eq__(self, other):
        if isinstance(other, PartialSums):
            if len(self) != len(other):
                return False
            return all(a * d == c * b for (a, b), (c, d) in
                       zip(map(self.raw, range(len(self))), map(other.raw, range(len(other)))))
        if isinstance(other, Sequence):
            return list(self) == list(other)
        return NotImplemented

    __hash__ = None

    def __getitem__(self, n):
        if isinstance(n, slice):
            return [self[i] for i in range(*n.indices(len(self)))]
        return Fraction(*self.raw(n))


@dataclass
class WeightReport:
    """Exact partial sums ``S_0 = 0, S_1, ..., S_N`` of the weights."""

    barrier: str
    p: Fraction
    N: int
    partial_sums: PartialSums = field(repr=False)
    classification: str
    theta: GrowthRate
    q_over_p: Fraction

    @property
    def total(self) -> Fraction:
        return self.partial_sums[-1]

    @property
    def total_approx(self) -> str:
        return approx_decimal(self.total)

    def increments(self) -> list[Fraction]:
        s = self.partial_sums
        return [s[n + 1] - s[n] for n in range(len(s) - 1)]


def truncated_weight_sum(
    b: BarrierLike, p: RationalLike, N: int, cell_budget: int = DEFAULT_CELL_BUDGET
) -> WeightReport:
    """``S_N = sum_{n<N} f(n) p^(n+1) q^(b_{n+1}+1) / (1 - q^(1+b_0))``.

    Accumulated over a growing power of the denominator of ``p``.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    b = as_barrier(b)
    p = as_probability(p)
    # the closed form is exact and O(N) for linear barriers
    f = proctor_counts(b, N - 1).values if isinstance(b, Linear) else dp_f(b, N - 1, cell_budget).values
    bvals = b.prefix(N + 1)

    pn, d = p.numerator, p.denominator
    qn = d - pn
    # 1/(1 - q^(1+b0)) = d^(1+b0) / (d^(1+b0) - qn^(1+b0))
    e0 = 1 + bvals[0]
    norm = (d ** e0, d ** e0 - qn ** e0)

    nums = [0]
    exps = [0]
    acc = 0        # running numerator over d^exp
    exp = 0
    ppow = 1       # pn^(n+1)
    qexp = 0
    qpow = 1       # qn^qexp
    for n in range(N):
        ppow *= pn
        want = bvals[n + 1] + 1
        if want != qexp:
            qpow *= qn ** (want - qexp)
            qexp = want
        term_exp = n + 1 + want
        if term_exp > exp:
            acc *= d ** (term_exp - exp)
            exp = term_exp
        acc += f[n] * ppow * qpow * d ** (exp - term_exp)
        nums.append(acc)
        exps.append(exp)

    return WeightReport(
        barrier=b.spec(),
        p=p,
        N=N,
        partial_sums=PartialSums(nums, exps, d, norm),
        classification=classify_equality(b, p),
        theta=b.growth_rate(),
        q_over_p=(1 - p) / p,
    )


@dataclass(frozen=True)
class WalkConfig:
    barrier: Barrier
    p: Fraction
    master_seed: int = 0
    step_cap: int = DEFAULT_STEP_CAP

    def __post_init__(self) -> None:
        object.__setattr__(self, "barrier", as_barrier(self.barrier))
        object.__setattr__(self, "p", as_probability(self.p))
        if self.step_cap < 1:
            raise ValueError("step_cap must be >= 1")
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must fit in 64 unsigned bits")

    @property
    def q(self) -> Fraction:
        return 1 - self.p

    @property
    def threshold(self) -> int:
        """``floor(p * 2^64)``; a uniform 64-bit draw below it moves right."""
        return (self.p.numerator << 64) // self.p.denominator


@lru_cache(maxsize=32)
def _barrier_array(b: Barrier, cap: int) -> np.ndarray:
    # columns reached within `cap` steps are < cap, so indices <= cap suffice;
    # heights never exceed cap, so larger barrier values are clamped
    out = np.empty(cap + 1, dtype=np.int64)
    for i in range(cap + 1):
        v = b.eval(i)
        out[i] = v if v <= cap + 1 else cap + 1
    out.setflags(write=False)
    return out


def _kernel_barrier(kern, b: Barrier, cap: int):
    arr = _barrier_array(b, cap)
    return arr if kern is not _kernels.python_kernel else arr.tolist()


@dataclass(frozen=True)
class WalkOutcome:
    """``M`` is -1 for the empty path; for censored walks it is the column
    reached when the step cap ran out and ``footprint`` is partial."""

    censored: bool
    M: int
    footprint: tuple[int, ...]
    steps_used: int

    @property
    def status(self) -> str:
        return "censored" if self.censored else "exited"


def walk_from_moves(b: BarrierLike, moves: Sequence[int]) -> WalkOutcome:
    """Run the walk on an explicit move list (0 = right, 1 = up).

    Reference semantics for the kernels; censored if ``moves`` runs out
    before the walk exits.
    """
    b = as_barrier(b)
    x, s = -1, 0
    foot: list[int] = []
    for k, w in enumerate(moves):
        if w == 0:
            x += 1
            foot.append(s)
        elif w == 1:
            s += 1
        else:
            raise ValueError(f"moves must be 0 or 1, got {w!r}")
        if s > b.eval(x + 1):
            return WalkOutcome(False, x, tuple(foot), k + 1)
    return WalkOutcome(True, x, tuple(foot), len(moves))


def simulate_walk(cfg: WalkConfig, trial_index: int, kernel=None) -> WalkOutcome:
    if trial_index < 0:
        raise ValueError("trial_index must be >= 0")
    kern = kernel or _kernels.kernel
    key = kern.trial_key(cfg.master_seed, trial_index)
    m, steps, cens, foot = kern.run_trial(
        _kernel_barrier(kern, cfg.barrier, cfg.step_cap), cfg.threshold, key, cfg.step_cap, True
    )
    return WalkOutcome(bool(cens), int(m), tuple(foot), int(steps))


def run_trials(cfg: WalkConfig, trials: int, start: int = 0, workers: int = 1, kernel=None):
    """Exit columns, step counts and censoring flags for a block of trials.

    Trials are keyed by index, so the result does not depend on ``workers``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    kern = kernel or _kernels.kernel
    bvals = _kernel_barrier(kern, cfg.barrier, cfg.step_cap)
    out_m = np.empty(trials, dtype=np.int64)
    out_steps = np.empty(trials, dtype=np.int64)
    out_cens = np.empty(trials, dtype=np.uint8)

    def block(lo: int, hi: int) -> None:
        kern.run_batch(bvals, cfg.threshold, cfg.master_seed, start + lo, hi - lo, cfg.step_cap,
                       out_m[lo:hi], out_steps[lo:hi], out_cens[lo:hi])

    workers = max(1, min(workers, trials))
    if workers == 1:
        block(0, trials)
    else:
        edges = np.linspace(0, trials, workers + 1, dtype=np.int64)
        with ThreadPoolExecutor(workers) as pool:
            list(pool.map(block, edges[:-1].tolist(), edges[1:].tolist()))
    return out_m, out_steps, out_cens.astype(bool)


@dataclass
class ExitStats:
    """Histogram of exit columns against the exact law.

    ``counts[m]`` for ``m`` in ``-1..m_max``; ``overflow`` counts exits past
    ``m_max``.  ``expected[m]`` is exact; ``z_scores`` are approximate.
    """

    trials: int
    m_max: int
    counts: dict[int, int]
    overflow: int
    censored: int
    expected: dict[int, Fraction]
    z_scores: dict[int, float]

    @property
    def max_abs_z(self) -> float:
        return max(abs(z) for z in self.z_scores.values())


def exit_distribution(
    cfg: WalkConfig, trials: int, m_max: int, workers: int = 1, kernel=None
) -> ExitStats:
    if m_max < 0:
        raise ValueError("m_max must be >= 0")
    ms, _, cens = run_trials(cfg, trials, workers=workers, kernel=kernel)
    return exit_stats_from_runs(cfg, ms, cens, m_max)


def exit_stats_from_runs(cfg: WalkConfig, ms: np.ndarray, cens: np.ndarray, m_max: int) -> ExitStats:
    trials = len(ms)
    exited = ms[~cens]
    binned = np.bincount(np.minimum(exited, m_max + 1) + 1, minlength=m_max + 3)
    counts = {m: int(binned[m + 1]) for m in range(-1, m_max + 1)}
    overflow = int(binned[m_max + 2])

    f = dp_f(cfg.barrier, m_max).values
    expected = {-1: exit_probability(-1, cfg.barrier, cfg.p)}
    for m in range(m_max + 1):
        expected[m] = exit_probability(m, cfg.barrier, cfg.p, f[m])
    z = {}
    for m, pr in expected.items():
        pr_f = float(pr)
        sd = math.sqrt(trials * pr_f * (1 - pr_f))
        z[m] = (counts[m] - trials * pr_f) / sd if sd > 0 else float("nan")
    return ExitStats(trials, m_max, counts, overflow, int(cens.sum()), expected, z)


CENSORING_NOTE = (
    "censored walks hit the step cap without exiting; some would exit later, "
    "so the censored fraction overestimates P(M = infinity)"
)


@dataclass
class EscapeEstimate:
    trials: int
    censored: int
    step_cap: int
    point: float
    low: float
    high: float
    note: str = CENSORING_NOTE

    @property
    def excludes_zero(self) -> bool:
        return self.low > 0


def wilson_interval(successes: int, n: int, level: float = 0.95) -> tuple[float, float]:
    z = NormalDist().inv_cdf(0.5 + level / 2)
    phat = successes / n
    denom = 1 + z * z / n
    centre = (phat + z * z / (2 * n)) / denom
    half = z * math.sqrt(phat * (1 - phat) / n + z * z / (4 * n * n)) / denom
    low = 0.0 if successes == 0 else max(0.0, centre - half)
    high = 1.0 if successes == n else min(1.0, centre + half)
    return low, high


def escape_probability_estimate(
    cfg: WalkConfig, trials: int, workers: int = 1, kernel=None
) -> EscapeEstimate:
    """Fraction of censored trials with a 95% Wilson interval."""
    _, _, cens = run_trials(cfg, trials, workers=workers, kernel=kernel)
    return escape_from_runs(cfg, cens)


def escape_from_runs(cfg: WalkConfig, cens: np.ndarray) -> EscapeEstimate:
    trials = len(cens)
    k = int(cens.sum())
    low, high = wilson_interval(k, trials)
    return EscapeEstimate(trials, k, cfg.step_cap, k / trials, low, high)
