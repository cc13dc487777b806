"""Exponential Huffman coding for finite alphabets.

The classical Huffman merge, except that the merged item of weights x and y
gets weight a*(x + y).  After the last merge the remaining weight equals
sum_i w(i) a^n(i).

Ties between equal weights are broken so that the output does not depend on
whether the heap or the sorted two-queue construction is used: merged items
are taken before original ones, merged items in creation order, and originals
from the highest index down (so lower indices keep the shorter codewords).
"""

from __future__ import annotations

import heapq
import json
import math
from collections import Counter, deque
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

from .errors import InvalidParameter, UnsortedWeights
from .model import CodeLengths, FiniteWeights, _check_a

_MERGED, _ORIGINAL = 0, 1


@dataclass(frozen=True)
class FiniteCode:
    codewords: Tuple[str, ...]
    root_weight: float = math.nan

    @property
    def lengths(self) -> Tuple[int, ...]:
        return tuple(len(c) for c in self.codewords)

    def code_lengths(self) -> CodeLengths:
        return CodeLengths(self.lengths)

    def __len__(self) -> int:
        return len(self.codewords)

    def codeword(self, i: int) -> str:
        if not 0 <= i < len(self.codewords):
            raise InvalidParameter(f"symbol {i} outside a {len(self.codewords)}-symbol code")
        return self.codewords[i]

    def length(self, i: int) -> int:
        return len(self.codeword(i))

    def to_dict(self) -> dict:
        return {"kind": "explicit", "codewords": list(self.codewords)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _as_weights(weights) -> Tuple[float, ...]:
    if isinstance(weights, FiniteWeights):
        return weights.weights
    return FiniteWeights(tuple(weights)).weights


def _codewords_from_merges(n: int, merges: Sequence[Tuple[int, int]]) -> Tuple[str, ...]:
    """Node ids 0..n-1 are leaves, n+t is the node created by merge t."""
    if n == 1:
        return ("",)
    children = {n + t: pair for t, pair in enumerate(merges)}
    words = [""] * n
    stack = [(n + len(merges) - 1, "")]
    while stack:
        node, prefix = stack.pop()
        if node < n:
            words[node] = prefix
            continue
        zero, one = children[node]
        stack.append((zero, prefix + "0"))
        stack.append((one, prefix + "1"))
    return tuple(words)


def _heap_merge(keys: List[float], combine) -> Tuple[List[Tuple[int, int]], float]:
    n = len(keys)
    heap = [(k, _ORIGINAL, -i, i) for i, k in enumerate(keys)]
    heapq.heapify(heap)
    merges = []
    while len(heap) > 1:
        kx, _, _, x = heapq.heappop(heap)
        ky, _, _, y = heapq.heappop(heap)
        node = n + len(merges)
        merges.append((x, y))
        heapq.heappush(heap, (combine(kx, ky), _MERGED, node, node))
    return merges, heap[0][0]


def exp_huffman(weights, a: float) -> FiniteCode:
    """Prefix code optimal for sum_i w(i) a^n(i).

    For a > 1 the sum is minimized, for a < 1 it is maximized (both minimize
    log_a of it), and a = 1 reduces to ordinary Huffman coding.  Of each
    merged pair the smaller item gets bit 0.
    """
    w = _as_weights(weights)
    a = _check_a(a)
    scale = max(w)
    keys = [x / scale for x in w]
    if a == 1.0:
        merges, root = _heap_merge(keys, lambda x, y: x + y)
    else:
        merges, root = _heap_merge(keys, lambda x, y: a * (x + y))
    return FiniteCode(_codewords_from_merges(len(w), merges), root * scale)


def exp_huffman_log(log_weights: Sequence[float], log_a: float) -> FiniteCode:
    """Same construction on log-weights; ``root_weight`` holds the log of the root weight.

    Used where a and the weight spread overflow double precision, e.g. the
    2^d exponents of the minimax limit.
    """
    lw = [float(x) for x in log_weights]
    if not lw:
        raise InvalidParameter("weight list must be nonempty")

    def combine(x, y):
        hi, lo = (x, y) if x >= y else (y, x)
        return log_a + hi + math.log1p(math.exp(lo - hi))

    merges, root = _heap_merge(lw, combine)
    return FiniteCode(_codewords_from_merges(len(lw), merges), root)


def exp_huffman_sorted(weights, a: float, counter: Optional[Counter] = None) -> FiniteCode:
    """Linear-time variant for weights sorted nonincreasing (two-queue method).

    ``counter``, if given, is incremented with the number of queue pushes and
    pops performed.
    """
    w = _as_weights(weights)
    a = _check_a(a)
    if any(w[i] < w[i + 1] for i in range(len(w) - 1)):
        raise UnsortedWeights("weights must be sorted nonincreasing")
    n = len(w)
    scale = w[0]
    factor = a
    # originals are consumed from the small end of the list
    originals = deque((w[i] / scale, i) for i in range(n - 1, -1, -1))
    merged: deque = deque()
    ops = counter if counter is not None else Counter()
    ops["push"] += n
    merges = []

    def take():
        ops["pop"] += 1
        if merged and (not originals or merged[0][0] <= originals[0][0]):
            return merged.popleft()
        return originals.popleft()

    while len(originals) + len(merged) > 1:
        kx, x = take()
        ky, y = take()
        node = n + len(merges)
        merges.append((x, y))
        s = kx + ky
        merged.append((s if factor == 1.0 else factor * s, node))
        ops["push"] += 1
    root = (merged or originals)[0][0]
    return FiniteCode(_codewords_from_merges(n, merges), root * scale)


def unary_like_lengths(n_symbols: int) -> CodeLengths:
    if n_symbols < 1:
        raise InvalidParameter("need at least one symbol")
    if n_symbols == 1:
        return CodeLengths((0,))
    return CodeLengths(tuple(range(1, n_symbols)) + (n_symbols - 1,))


def weighted_cost(weights: Iterable[float], lengths: Iterable[int], a: float) -> float:
    """sum w(i) a^n(i), or sum w(i) n(i) when a = 1."""
    if a == 1.0:
        return math.fsum(x * n for x, n in zip(weights, lengths))
    return math.fsum(x * a ** n for x, n in zip(weights, lengths))


def is_prefix_free(codewords: Sequence[str]) -> bool:
    words = sorted(codewords)
    return all(not words[i + 1].startswith(words[i]) for i in range(len(words) - 1))
