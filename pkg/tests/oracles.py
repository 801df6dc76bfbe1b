"""Independent reference computations used only by the tests.

Nothing here imports the code under test.
"""
from fractions import Fraction
from itertools import combinations_with_replacement, product
from math import prod


def brute_count(bvals):
    """Nondecreasing sequences a_0..a_n with 0 <= a_i <= bvals[i], by enumeration."""
    n = len(bvals)
    top = max(bvals)
    return sum(
        all(a <= bv for a, bv in zip(seq, bvals))
        for seq in combinations_with_replacement(range(top + 1), n)
    )


def brute_two_barrier(lower, upper):
    lo, hi = min(lower), max(upper)
    return sum(
        all(l <= a <= u for a, l, u in zip(seq, lower, upper))
        for seq in combinations_with_replacement(range(lo, hi + 1), len(lower))
    )


def brute_sequences(bvals):
    top = max(bvals)
    return [
        seq
        for seq in combinations_with_replacement(range(top + 1), len(bvals))
        if all(a <= bv for a, bv in zip(seq, bvals))
    ]


def catalan(n):
    """Product formula: prod_{k=2..n} (n+k)/k."""
    return prod(Fraction(n + k, k) for k in range(2, n + 1)).numerator if n >= 2 else 1


def fraction_det(matrix):
    """Determinant by Gaussian elimination over Fraction, with partial pivoting on nonzero."""
    a = [[Fraction(x) for x in row] for row in matrix]
    n = len(a)
    det = Fraction(1)
    for k in range(n):
        piv = next((i for i in range(k, n) if a[i][k] != 0), None)
        if piv is None:
            return 0
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            det = -det
        det *= a[k][k]
        for i in range(k + 1, n):
            r = a[i][k] / a[k][k]
            for j in range(k, n):
                a[i][j] -= r * a[k][j]
    return det


def trace_walk(bvals, moves):
    """Hand-rule walk: start (-1,0); 0 = right, 1 = up; column x bounded by bvals[x+1].

    Returns (M, footprint, steps) on exit or None if the moves run out.
    """
    x, s, foot = -1, 0, []
    for k, w in enumerate(moves):
        if w:
            s += 1
        else:
            x += 1
            foot.append(s)
        if s > bvals[x + 1]:
            return x, tuple(foot), k + 1
    return None


def exact_footprint_law(bvals, p, length):
    """Exact P(M = m, A = a) from every move string of the given length.

    Only outcomes decided within ``length`` steps are included; any path of
    a fixed footprint exits by a fixed step, so short footprints are exact.
    """
    q = 1 - p
    law = {}
    for moves in product((0, 1), repeat=length):
        out = trace_walk(bvals, moves)
        if out is None:
            continue
        m, foot, steps = out
        # only the first `steps` moves matter; weight by that prefix once
        if any(moves[steps:]):
            continue
        ups = sum(moves[:steps])
        pr = p ** (steps - ups) * q ** ups
        law[(m, foot)] = law.get((m, foot), 0) + pr
    return law
