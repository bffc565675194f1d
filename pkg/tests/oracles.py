"""Independent reference computations used only by the tests."""

import itertools
import math
from fractions import Fraction


def brute_force_f_distribution(n):
    """Enumerate all n**n bucket assignments."""
    counts = {}
    for assign in itertools.product(range(n), repeat=n):
        occ = [0] * n
        for j in assign:
            occ[j] += 1
        f = sum(b * b for b in occ)
        counts[f] = counts.get(f, 0) + 1
    return counts


def binomial_upper_tail(trials, p, x):
    """Pr[X >= x] for X ~ Binomial(trials, p) by direct summation."""
    start = max(0, math.ceil(x - 1e-9))
    return math.fsum(math.comb(trials, j) * p**j * (1 - p) ** (trials - j) for j in range(start, trials + 1))


def binomial_lower_tail(trials, p, x):
    """Pr[X <= x]."""
    stop = math.floor(x + 1e-9)
    return math.fsum(math.comb(trials, j) * p**j * (1 - p) ** (trials - j) for j in range(0, stop + 1))


def harmonic_quicksort_mean(n):
    return 2 * (n + 1) * sum(Fraction(1, i) for i in range(1, n + 1)) - 4 * n


class _Node:
    __slots__ = ("children", "leaf")

    def __init__(self):
        self.children = [None, None]
        self.leaf = None


def trie_leaf_depths(bit_of, n):
    """Insert strings one by one into an explicit binary trie.

    Each leaf holds one string; when a new string lands on an occupied leaf
    both are pushed down until their bits differ. Returns each string's leaf
    depth, i.e. its minimal prefix length with no floor.
    """
    root = _Node()
    for i in range(n):
        node, depth = root, 0
        while True:
            if node.leaf is None and node.children == [None, None]:
                node.leaf = i
                break
            if node.leaf is not None:
                j = node.leaf
                node.leaf = None
                while bit_of(i, depth) == bit_of(j, depth):
                    b = bit_of(i, depth)
                    node.children[b] = _Node()
                    node = node.children[b]
                    depth += 1
                bi, bj = bit_of(i, depth), bit_of(j, depth)
                node.children[bi] = _Node()
                node.children[bi].leaf = i
                node.children[bj] = _Node()
                node.children[bj].leaf = j
                break
            b = bit_of(i, depth)
            if node.children[b] is None:
                node.children[b] = _Node()
                node.children[b].leaf = i
                break
            node = node.children[b]
            depth += 1
    depths = [0] * n

    def walk(node, depth):
        if node is None:
            return
        if node.leaf is not None:
            depths[node.leaf] = depth
        walk(node.children[0], depth + 1)
        walk(node.children[1], depth + 1)

    walk(root, 0)
    return depths


def brute_minimal_prefixes(strings, k):
    """Minimize the total length over all prefix-free choices of lengths >= k.

    ``strings`` are finite '0'/'1' strings long enough to separate each other.
    """
    top = max(len(s) for s in strings)
    best = None
    for lengths in itertools.product(range(k, top + 1), repeat=len(strings)):
        pre = [s[:l] for s, l in zip(strings, lengths)]
        if any(len(s) < l for s, l in zip(strings, lengths)):
            continue
        ok = all(not pre[b].startswith(pre[a]) for a in range(len(pre)) for b in range(len(pre)) if a != b)
        if ok and (best is None or sum(lengths) < sum(best)):
            best = lengths
    return list(best)
