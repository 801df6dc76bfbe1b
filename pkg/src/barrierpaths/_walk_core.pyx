# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled walk kernel; see ``_walk_py`` for the stream definition."""
from libc.stdint cimport int64_t, uint64_t, uint8_t

BACKEND = "cython"

cdef uint64_t GAMMA = 0x9E3779B97F4A7C15ULL
cdef uint64_t M1 = 0xBF58476D1CE4E5B9ULL
cdef uint64_t M2 = 0x94D049BB133111EBULL


cdef inline uint64_t _mix(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * M1
    z = (z ^ (z >> 27)) * M2
    return z ^ (z >> 31)


def mix64(z):
    return _mix(<uint64_t>(z & 0xFFFFFFFFFFFFFFFF))


cdef inline uint64_t _key(uint64_t seed, uint64_t t) noexcept nogil:
    return _mix(seed + _mix(t + 1))


def trial_key(master_seed, trial_index):
    return _key(<uint64_t>(master_seed & 0xFFFFFFFFFFFFFFFF),
                <uint64_t>(trial_index & 0xFFFFFFFFFFFFFFFF))


cdef int64_t _walk(const int64_t[::1] b, uint64_t threshold, uint64_t key, int64_t cap,
                   int64_t* steps_out, int* censored, int64_t* foot) noexcept nogil:
    cdef int64_t x = -1
    cdef int64_t s = 0
    cdef int64_t k
    cdef int64_t limit = b[0]
    cdef uint64_t state = key
    for k in range(cap):
        state = state + GAMMA
        if _mix(state) < threshold:
            x += 1
            limit = b[x + 1]
            if foot != NULL:
                foot[x] = s
        else:
            s += 1
            if s > limit:
                steps_out[0] = k + 1
                censored[0] = 0
                return x
    steps_out[0] = cap
    censored[0] = 1
    return x


def run_trial(const int64_t[::1] bvals, uint64_t threshold, uint64_t key, int64_t cap,
              bint want_footprint=True):
    cdef int64_t steps = 0
    cdef int cens = 0
    cdef int64_t m
    cdef int64_t[::1] foot
    if want_footprint:
        import numpy as np
        arr = np.empty(cap + 1, dtype=np.int64)
        foot = arr
        m = _walk(bvals, threshold, key, cap, &steps, &cens, &foot[0])
        return m, steps, bool(cens), [int(v) for v in arr[: m + 1]]
    m = _walk(bvals, threshold, key, cap, &steps, &cens, NULL)
    return m, steps, bool(cens), None


def run_batch(const int64_t[::1] bvals, uint64_t threshold, uint64_t master_seed,
              int64_t start, int64_t count, int64_t cap,
              int64_t[::1] out_m, int64_t[::1] out_steps, uint8_t[::1] out_censored):
    cdef int64_t i
    cdef int64_t steps = 0
    cdef int cens = 0
    with nogil:
        for i in range(count):
            out_m[i] = _walk(bvals, threshold, _key(master_seed, <uint64_t>(start + i)),
                             cap, &steps, &cens, NULL)
            out_steps[i] = steps
            out_censored[i] = cens
