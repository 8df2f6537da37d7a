"""Brute-force reference implementations, kept independent of the package code."""

from collections import Counter
from itertools import combinations, product


def contains(pattern, sequence):
    """Two-pointer order-preserving containment."""
    k = 0
    for item in sequence:
        if k < len(pattern) and item == pattern[k]:
            k += 1
    return k == len(pattern)


def all_subsequences(sequence, max_len):
    out = set()
    for length in range(1, min(max_len, len(sequence)) + 1):
        for idx in combinations(range(len(sequence)), length):
            out.add(tuple(sequence[i] for i in idx))
    return out


def brute_force_frequent(sequences, min_count, max_len=6, full_enumeration=False):
    """Every ordered item list up to ``max_len`` with support >= ``min_count``.

    With ``full_enumeration`` every list over the item universe is tried;
    otherwise only lists occurring in some sequence (all others have zero
    support, below any min_count >= 1).
    """
    universe = sorted({i for s in sequences for i in s})
    if full_enumeration:
        space = (p for L in range(1, max_len + 1) for p in product(universe, repeat=L))
    else:
        space = set().union(*(all_subsequences(s, max_len) for s in sequences)) if sequences else set()
    result = {}
    for p in space:
        count = sum(1 for s in sequences if contains(p, s))
        if count >= min_count:
            result[tuple(p)] = count
    return result


def exhaustive_frequent(sequences, min_count, max_len=6, is_sub=contains):
    """Enumerate every ordered list over the universe up to ``max_len``.

    Support comes from a table of each sequence's distinct subsequences, so a
    list missing from the table has support zero; every reported count is
    then recounted with ``is_sub``.
    """
    table = Counter()
    for s in sequences:
        table.update(all_subsequences(s, max_len))
    universe = sorted({i for s in sequences for i in s})
    result = {}
    for length in range(1, max_len + 1):
        for p in product(universe, repeat=length):
            count = table.get(p, 0)
            if count >= min_count:
                result[p] = count
    for p, count in result.items():
        assert count == sum(1 for s in sequences if is_sub(p, s))
    return result
