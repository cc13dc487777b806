"""Independent checks: exhaustive optimal-code search and the m-reduced geometric bracket.

Nothing here calls into the Huffman construction except
``golomb_sandwich_check``, whose whole point is to compare against it.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple

from .errors import DivergentPenalty, InvalidParameter, OracleLimit
from .model import FiniteWeights, _check_a, classify, Regime

MAX_LEAVES = 8


@lru_cache(maxsize=None)
def tree_shapes(n: int) -> Tuple[Tuple[int, ...], ...]:
    """Leaf depths, left to right, of every ordered full binary tree with n leaves."""
    if n < 1:
        raise InvalidParameter("a tree needs at least one leaf")
    if n == 1:
        return ((0,),)
    shapes = []
    for left in range(1, n):
        for ls in tree_shapes(left):
            for rs in tree_shapes(n - left):
                shapes.append(tuple(d + 1 for d in ls + rs))
    return tuple(shapes)


def catalan(n: int) -> int:
    return math.comb(2 * n, n) // (n + 1)


def _cost(weights: Sequence[float], lengths: Sequence[int], a: float) -> float:
    if a == 1.0:
        return math.fsum(w * n for w, n in zip(weights, lengths))
    return math.fsum(w * a ** n for w, n in zip(weights, lengths))


@dataclass
class OracleResult:
    lengths: Tuple[int, ...]     # per input index
    cost: float                  # sum w a^n (sum w n when a = 1)
    direction: str               # "min" or "max"
    counts: Counter = field(default_factory=Counter)

    @property
    def multiset(self) -> Tuple[int, ...]:
        return tuple(sorted(self.lengths))


def _better(direction: str, x: float, y: float) -> bool:
    return x < y if direction == "min" else x > y


def brute_force_optimal(weights, a: float, exhaustive: bool = False,
                        direction: Optional[str] = None) -> OracleResult:
    """Best sum_i w(i) a^n(i) over all complete prefix codes.

    The objective is minimized for a >= 1 and maximized for a < 1 (where
    log_a reverses the order), unless ``direction`` overrides it.  By default
    each distinct leaf-depth multiset is assigned by rearrangement (largest
    weight to shortest length); ``exhaustive`` instead scores every
    assignment of weights to the leaves of every tree shape.
    """
    w = FiniteWeights(tuple(weights)).weights
    a = _check_a(a)
    n = len(w)
    if n > MAX_LEAVES:
        raise OracleLimit(f"exhaustive search is limited to {MAX_LEAVES} symbols, got {n}")
    if direction is None:
        direction = "max" if a < 1.0 else "min"
    counts = Counter()
    best: Optional[Tuple[float, Tuple[int, ...]]] = None
    shapes = tree_shapes(n)
    counts["shapes"] = len(shapes)
    if exhaustive:
        for shape in shapes:
            for perm in itertools.permutations(range(n)):
                counts["assignments"] += 1
                lengths = [0] * n
                for leaf, sym in enumerate(perm):
                    lengths[sym] = shape[leaf]
                c = _cost(w, lengths, a)
                if best is None or _better(direction, c, best[0]):
                    best = (c, tuple(lengths))
    else:
        order = sorted(range(n), key=lambda i: -w[i])
        for ms in sorted(set(tuple(sorted(s)) for s in shapes)):
            counts["assignments"] += 1
            lengths = [0] * n
            for sym, d in zip(order, ms):
                lengths[sym] = d
            c = _cost(w, lengths, a)
            if best is None or _better(direction, c, best[0]):
                best = (c, tuple(lengths))
    return OracleResult(best[1], best[0], direction, counts)


def m_reduced_source(theta: float, a: float, k: int, m: int) -> FiniteWeights:
    """Weights (1-theta) theta^i for i <= m, then (1-theta) a theta^i / (1 - a theta^k) up to m + k."""
    a = _check_a(a)
    if m < -1:
        raise InvalidParameter("m must be at least -1")
    if k < 1:
        raise InvalidParameter("k must be positive")
    atk = a * theta ** k
    if atk >= 1.0:
        raise DivergentPenalty(f"a * theta^k = {atk} >= 1")
    head = [(1.0 - theta) * theta ** i for i in range(m + 1)]
    tail = [(1.0 - theta) * a * theta ** i / (1.0 - atk) for i in range(m + 1, m + k + 1)]
    return FiniteWeights(tuple(head + tail))


@dataclass
class SandwichRow:
    m: int
    head_match: bool
    golomb_penalty: float
    reduced_penalty: float

    @property
    def gap(self) -> float:
        return self.golomb_penalty - self.reduced_penalty


@dataclass
class SandwichReport:
    theta: float
    a: float
    k: Optional[int]
    rows: List[SandwichRow] = field(default_factory=list)
    skipped: Optional[str] = None
    failures: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {
            "theta": self.theta, "a": self.a, "k": self.k, "passed": self.passed,
            "skipped": self.skipped, "failures": self.failures,
            "final_gap": self.rows[-1].gap if self.rows else None,
        }


def _reduced_penalty(w: FiniteWeights, lengths, a: float) -> float:
    if a == 1.0:
        return _cost(w.weights, lengths, 1.0) / w.total()
    return math.log(_cost(w.weights, lengths, a)) / math.log(a)


def golomb_sandwich_check(theta: float, a: float, m_max: int = 200, step: int = 5,
                          gap_tol: float = 1e-6, neg_tol: float = 1e-12) -> SandwichReport:
    """Compare G_k with optimal codes for the m-reduced sources W_m, m = 0, step, ..., m_max.

    Checks that the Huffman code for W_m reproduces the Golomb lengths on
    symbols 0..m, that the penalty gap never goes below -``neg_tol``, and
    that it is under ``gap_tol`` at ``m_max``.
    """
    from . import golomb
    from .exp_huffman import exp_huffman

    if classify(a) is Regime.DEGENERATE:
        return SandwichReport(theta, a, None, skipped="degenerate: a <= 0.5, unary code optimal")
    k = golomb.optimal_k(theta, a)
    code = golomb.GolombCode(k)
    report = SandwichReport(theta, a, k)
    gk = golomb.golomb_penalty_closed_form(theta, a, k)
    for m in range(0, m_max + 1, step):
        w = m_reduced_source(theta, a, k, m)
        lengths = exp_huffman(w, a).lengths
        match = all(lengths[i] == code.length(i) for i in range(m + 1))
        row = SandwichRow(m, match, gk, _reduced_penalty(w, lengths, a))
        report.rows.append(row)
        if not match:
            report.failures.append(f"m={m}: W_m head lengths {lengths[:m + 1]} differ from G{k}")
        if row.gap < -neg_tol * max(1.0, abs(gk)):
            report.failures.append(f"m={m}: negative gap {row.gap:.3e}")
    if report.rows and not abs(report.rows[-1].gap) < gap_tol:
        report.failures.append(f"gap {report.rows[-1].gap:.3e} at m={report.rows[-1].m} "
                               f"not below {gap_tol}")
    return report
