"""Pure-Python walk kernel.  Bit-identical to ``_walk_core`` (Cython).

Random stream: SplitMix64 in counter mode.  Trial ``t`` under master seed
``s`` has key ``mix64(s + mix64(t + 1))``; its ``k``-th draw (from 0) is
``mix64(key + (k + 1) * GAMMA)``.  A draw below ``threshold`` is a
rightward move (probability ~p), otherwise an upward move.
"""
from __future__ import annotations

MASK = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
M1 = 0xBF58476D1CE4E5B9
M2 = 0x94D049BB133111EB

BACKEND = "python"


def mix64(z: int) -> int:
    z &= MASK
    z = ((z ^ (z >> 30)) * M1) & MASK
    z = ((z ^ (z >> 27)) * M2) & MASK
    return z ^ (z >> 31)


def trial_key(master_seed: int, trial_index: int) -> int:
    return mix64((master_seed & MASK) + mix64(trial_index + 1))


def run_trial(bvals, threshold: int, key: int, cap: int, want_footprint: bool = True):
    """One walk from (-1, 0).

    ``bvals[i]`` is ``b_i`` (clamped); column ``x`` is bounded by
    ``bvals[x + 1]``.  Returns ``(M, steps, censored, footprint)``.
    """
    x = -1
    s = 0
    state = key
    foot = [] if want_footprint else None
    limit = bvals[0]
    for k in range(cap):
        state = (state + GAMMA) & MASK
        z = state
        z = ((z ^ (z >> 30)) * M1) & MASK
        z = ((z ^ (z >> 27)) * M2) & MASK
        z ^= z >> 31
        if z < threshold:
            x += 1
            limit = bvals[x + 1]
            if foot is not None:
                foot.append(s)
        else:
            s += 1
            if s > limit:
                return x, k + 1, False, foot
    return x, cap, True, foot


def run_batch(bvals, threshold: int, master_seed: int, start: int, count: int, cap: int,
              out_m, out_steps, out_censored) -> None:
    bl = [int(v) for v in bvals]
    for i in range(count):
        key = trial_key(master_seed, start + i)
        m, steps, cens, _ = run_trial(bl, threshold, key, cap, False)
        out_m[i] = m
        out_steps[i] = steps
        out_censored[i] = cens
