from fractions import Fraction

import numpy as np
import pytest

from barrierpaths import _kernels
from barrierpaths.barrier import Barrier, Constant, Explicit, GrowthRate, Linear, LinearSqrt
from barrierpaths.counting import dp_f
from barrierpaths.walk import (
    CASE_I,
    CASE_II,
    CASE_III,
    UNKNOWN,
    WalkConfig,
    approx_decimal,
    classify_equality,
    escape_probability_estimate,
    exit_distribution,
    exit_probability,
    run_trials,
    simulate_walk,
    truncated_weight_sum,
    walk_from_moves,
    weight,
    wilson_interval,
)

from oracles import brute_sequences, exact_footprint_law, trace_walk

HALF = Fraction(1, 2)
compiled = pytest.mark.skipif(_kernels.compiled_kernel is None, reason="compiled kernel not built")


@pytest.mark.parametrize("m", range(6))
def test_weight_constant_zero(m):
    assert weight(m, Constant(0), HALF) == Fraction(1, 2 ** (m + 1))


@pytest.mark.parametrize("b", [Constant(2), Linear(1, 1), Explicit((0, 3), "last")], ids=str)
@pytest.mark.parametrize("p", [Fraction(1, 3), HALF, Fraction(9, 10)])
def test_weight_in_unit_interval(b, p):
    for m in range(5):
        w = weight(m, b, p)
        assert 0 < w < 1


def test_weight_rejects_float_p():
    with pytest.raises(TypeError):
        weight(0, Constant(0), 0.5)
    with pytest.raises(ValueError):
        weight(0, Constant(0), Fraction(1))


def test_truncated_sum_constant():
    assert truncated_weight_sum(Constant(0), HALF, 3).total == Fraction(7, 8)


@pytest.mark.parametrize(
    "b, p",
    [(Linear(1, 0), HALF), (Linear(2, 0), HALF), (Constant(3), Fraction(1, 5)),
     (LinearSqrt(Fraction(1, 2), 2), Fraction(2, 3)), (Explicit((0, 1, 5), "linear", 2), Fraction(1, 4))],
    ids=str,
)
def test_partial_sums_bounded_and_monotone(b, p):
    rep = truncated_weight_sum(b, p, 150)
    s = rep.partial_sums
    assert s[0] == 0
    assert all(x <= y for x, y in zip(s, s[1:]))
    assert rep.total <= 1
    # the exact tail is a sum of positive terms
    q = 1 - p
    f = dp_f(b, 149).values
    tail = 1 - q ** (1 + b.eval(0)) - sum(f[n] * p ** (n + 1) * q ** (1 + b.eval(n + 1)) for n in range(150))
    assert tail >= 0
    assert rep.total == (1 - q ** (1 + b.eval(0)) - tail) / (1 - q ** (1 + b.eval(0)))


def test_partial_sums_match_direct_weights():
    b, p = Linear(2, 1), Fraction(2, 5)
    rep = truncated_weight_sum(b, p, 20)
    f = dp_f(b, 19).values
    direct = Fraction(0)
    for n in range(20):
        direct += f[n] * weight(n, b, p)
        assert rep.partial_sums[n + 1] == direct


def test_truncated_sum_is_repeatable():
    a = truncated_weight_sum(Linear(1, 1), Fraction(3, 7), 40)
    b = truncated_weight_sum(Linear(1, 1), Fraction(3, 7), 40)
    assert a.partial_sums == b.partial_sums


@pytest.mark.parametrize(
    "b, p, want",
    [
        (Linear(1, 0), Fraction(2, 5), CASE_I),
        (Linear(2, 0), HALF, CASE_III),
        (Linear(1, 0), HALF, CASE_II),
        (Constant(5), Fraction(99, 100), CASE_I),
        (LinearSqrt(Fraction(1, 2), 3), Fraction(2, 3), CASE_II),
        (LinearSqrt(Fraction(1, 2), 3), Fraction(1, 2), CASE_I),
        (Explicit((0, 7), "linear", 3), Fraction(1, 4), CASE_II),
        (Explicit((0, 7), "linear", 3), Fraction(1, 2), CASE_III),
    ],
    ids=str,
)
def test_classification(b, p, want):
    assert classify_equality(b, p) == want


class _Uncertified(Barrier):
    def eval(self, n):
        return n

    def growth_rate(self):
        return GrowthRate(Fraction(1))

    def sqrt_deviation_certified(self):
        return False


class _Opaque(_Uncertified):
    def growth_rate(self):
        return GrowthRate(None, "unknown")


def test_classification_unknown_branches():
    assert classify_equality(_Uncertified(), HALF) == UNKNOWN
    assert classify_equality(_Uncertified(), Fraction(1, 3)) == CASE_I
    assert classify_equality(_Opaque(), HALF) == UNKNOWN


def test_hand_traces():
    out = walk_from_moves(Constant(0), [1])
    assert (out.censored, out.M, out.footprint) == (False, -1, ())
    out = walk_from_moves(Constant(0), [0, 0, 1])
    assert (out.censored, out.M, out.footprint, out.steps_used) == (False, 1, (0, 0), 3)
    out = walk_from_moves(Linear(1, 0), [1, 0, 1, 0, 1, 1])
    # heights: col -1 up to 1 > b_0 = 0 -> exits immediately
    assert out.M == -1
    out = walk_from_moves(Linear(1, 0), [0, 1, 0, 1, 1])
    assert (out.M, out.footprint) == (1, (0, 1))
    assert walk_from_moves(Constant(3), [0, 0]).censored


@pytest.mark.parametrize("b", [Constant(0), Constant(1), Linear(1, 0), Explicit((1, 1, 2, 4), "last")], ids=str)
def test_reference_walker_matches_trace_oracle(b):
    bv = b.prefix(20)
    rng = np.random.default_rng(0)
    for _ in range(200):
        moves = rng.integers(0, 2, 12).tolist()
        out = walk_from_moves(b, moves)
        want = trace_walk(bv, moves)
        if want is None:
            assert out.censored
        else:
            assert (out.M, out.footprint, out.steps_used) == want


@pytest.mark.parametrize("b", [Constant(0), Constant(1), Linear(1, 0), Linear(1, 1)], ids=str)
def test_exact_footprint_law(b):
    p = Fraction(1, 3)
    q = 1 - p
    bv = b.prefix(16)
    law = exact_footprint_law(bv, p, 11)
    assert law[(-1, ())] == q ** (bv[0] + 1)
    for m in range(3):
        for a in brute_sequences(bv[: m + 1]):
            if m + 1 + bv[m + 1] + 1 > 11:
                continue
            assert law[(m, tuple(a))] == p ** (m + 1) * q ** (bv[m + 1] + 1)


def test_exit_probability_constant():
    assert exit_probability(-1, Constant(0), HALF) == HALF
    for m in range(8):
        assert exit_probability(m, Constant(0), HALF) == Fraction(1, 2 ** (m + 2))


def test_threshold_rounding():
    cfg = WalkConfig(Constant(0), Fraction(1, 3))
    assert cfg.threshold == (1 << 64) // 3
    assert 0 <= Fraction(1, 3) - Fraction(cfg.threshold, 1 << 64) < Fraction(1, 1 << 64)


def test_config_validation():
    with pytest.raises(ValueError):
        WalkConfig(Constant(0), HALF, step_cap=0)
    with pytest.raises(ValueError):
        WalkConfig(Constant(0), Fraction(0))
    with pytest.raises(ValueError):
        WalkConfig(Constant(0), HALF, master_seed=-1)
    assert WalkConfig("linear:r=1,s=0", "1/2").barrier == Linear(1, 0)


def test_kernel_rng_matches_reference_constants():
    k = _kernels.python_kernel
    # SplitMix64 reference outputs for seed 0 (first three draws)
    state, outs = 0, []
    for _ in range(3):
        state = (state + k.GAMMA) & k.MASK
        outs.append(k.mix64(state))
    assert outs == [0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F]


@compiled
def test_compiled_matches_python_per_trial():
    for b in [Constant(0), Linear(1, 1), Linear(2, 0), LinearSqrt(Fraction(1, 2), 2)]:
        cfg = WalkConfig(b, Fraction(2, 5), master_seed=99, step_cap=500)
        for t in range(200):
            a = simulate_walk(cfg, t, kernel=_kernels.compiled_kernel)
            c = simulate_walk(cfg, t, kernel=_kernels.python_kernel)
            assert a == c


@compiled
def test_compiled_matches_python_batch():
    cfg = WalkConfig(Linear(1, 1), HALF, master_seed=2**63 + 5, step_cap=2000)
    a = run_trials(cfg, 3000, kernel=_kernels.compiled_kernel)
    c = run_trials(cfg, 3000, kernel=_kernels.python_kernel)
    for x, y in zip(a, c):
        assert np.array_equal(x, y)


@compiled
def test_mix64_and_keys_agree():
    ck, pk = _kernels.compiled_kernel, _kernels.python_kernel
    for z in [0, 1, 2**63, 2**64 - 1, 123456789]:
        assert ck.mix64(z) == pk.mix64(z)
        assert ck.trial_key(z, 7) == pk.trial_key(z, 7)


def test_batch_agrees_with_per_trial():
    cfg = WalkConfig(Linear(1, 0), Fraction(1, 3), master_seed=4, step_cap=300)
    ms, steps, cens = run_trials(cfg, 300)
    for t in range(300):
        out = simulate_walk(cfg, t)
        assert (out.M, out.steps_used, out.censored) == (ms[t], steps[t], cens[t])


def test_footprints_are_valid():
    b = Explicit((0, 2, 2, 5), "linear", 1)
    cfg = WalkConfig(b, Fraction(3, 5), master_seed=1, step_cap=400)
    for t in range(500):
        out = simulate_walk(cfg, t)
        if out.censored:
            continue
        if out.M == -1:
            assert out.footprint == ()
            continue
        a = out.footprint
        assert len(a) == out.M + 1
        assert all(x <= y for x, y in zip(a, a[1:]))
        assert all(a[i] <= b.eval(i) for i in range(len(a)))


def test_determinism_independent_of_workers():
    cfg = WalkConfig(Linear(1, 1), HALF, master_seed=17, step_cap=3000)
    one = run_trials(cfg, 5000, workers=1)
    four = run_trials(cfg, 5000, workers=4)
    again = run_trials(cfg, 5000, workers=3)
    for x, y, z in zip(one, four, again):
        assert np.array_equal(x, y) and np.array_equal(x, z)
    # a block starting mid-stream sees the same trials
    tail = run_trials(cfg, 1000, start=4000)
    assert np.array_equal(tail[0], one[0][4000:])


def test_exit_distribution_constant_zero():
    cfg = WalkConfig(Constant(0), HALF, master_seed=5, step_cap=1000)
    stats = exit_distribution(cfg, 40_000, 6)
    assert stats.expected[-1] == HALF
    assert all(stats.expected[m] == Fraction(1, 2 ** (m + 2)) for m in range(7))
    assert sum(stats.counts.values()) + stats.overflow + stats.censored == 40_000
    assert stats.max_abs_z < 5


def test_exit_law_pooled_seeds():
    # several independent seeds; a biased bin would drift the same way in each
    cfg = WalkConfig(Linear(1, 1), HALF, master_seed=31337, step_cap=10_000)
    stats = exit_distribution(cfg, 2_000_000, 10, workers=4)
    assert stats.max_abs_z < 4.5
    chi2 = sum(z * z for z in stats.z_scores.values())
    assert chi2 < 40  # 12 bins; far above the bulk of a chi-square(12)


def test_partial_sums_lazy_sequence():
    rep = truncated_weight_sum(Constant(0), HALF, 5)
    s = rep.partial_sums
    assert len(s) == 6
    assert s[-1] == s[5] == Fraction(31, 32)
    assert s[1:3] == [HALF, Fraction(3, 4)]
    num, den = s.raw(2)
    assert Fraction(num, den) == Fraction(3, 4)


def test_exit_distribution_rejects_zero_trials():
    cfg = WalkConfig(Constant(0), HALF)
    with pytest.raises(ValueError):
        exit_distribution(cfg, 0, 3)


def test_footprint_law_uniform_given_m():
    # Linear(1,0): f(2) = 5 footprints of length 3, each equally likely
    b = Linear(1, 0)
    cfg = WalkConfig(b, HALF, master_seed=8, step_cap=64)
    counts = {}
    for t in range(60_000):
        out = simulate_walk(cfg, t)
        if not out.censored and out.M == 2:
            counts[out.footprint] = counts.get(out.footprint, 0) + 1
    assert set(counts) == {tuple(a) for a in brute_sequences(b.prefix(3))}
    n = sum(counts.values())
    expected = n / len(counts)
    chi2 = sum((c - expected) ** 2 / expected for c in counts.values())
    assert chi2 < 18.47  # df = 4, upper 0.001 point


def test_escape_constant_zero_contains_zero():
    cfg = WalkConfig(Constant(0), HALF, master_seed=3, step_cap=10_000)
    est = escape_probability_estimate(cfg, 20_000)
    assert est.censored == 0
    assert est.low == 0.0
    assert "overestimates" in est.note


def test_escape_single_trial():
    cfg = WalkConfig(Linear(2, 0), HALF, master_seed=0, step_cap=200)
    est = escape_probability_estimate(cfg, 1)
    assert est.point in (0.0, 1.0)
    assert est.low == 0.0 or est.high == 1.0


def test_wilson_interval_basic():
    lo, hi = wilson_interval(50, 100)
    assert lo < 0.5 < hi
    assert wilson_interval(0, 10)[0] == 0.0
    assert wilson_interval(10, 10)[1] == 1.0


@pytest.mark.parametrize(
    "x, want",
    [(Fraction(7, 8), "0.875"), (Fraction(1, 3), "0.333333333333"), (Fraction(2, 3), "0.666666666667"),
     (Fraction(1, 10**9), "1e-9"), (Fraction(10**15, 7), "1.42857142857e+14"), (Fraction(-1, 4), "-0.25"),
     (Fraction(1), "1"), (Fraction(0), "0")],
)
def test_approx_decimal(x, want):
    assert approx_decimal(x) == want
