"""Exponential penalties, expected lengths, Renyi entropies and redundancies.

Infinite sums are truncated with a certificate: past the truncation point every
block of ``period`` terms is at most x times the previous block, where x comes
from the source's ratio bound, so the remainder is below block * x / (1 - x).
For geometric sources that ratio is exact and the remainder is summed in
closed form.  Sums of terms spanning many magnitudes are accumulated as
shifted exponentials with ``math.fsum``.
"""

from __future__ import annotations

import math
from typing import Callable, Optional, Tuple

from . import golomb
from .errors import DegenerateRegime, DivergentEntropy, DivergentPenalty, InvalidParameter
from .model import (LN2, CodeLengths, FiniteWeights, GeometricSource, SourceModel,
                    _check_a, probabilities, renyi_order)

__all__ = ["CodeLengths", "penalty", "penalty_bounds", "expected_length", "renyi_entropy",
           "shannon_entropy", "avg_redundancy", "log_sum_certified"]

MAX_TERMS = 2_000_000


def _logsumexp(values) -> float:
    values = list(values)
    if not values:
        return -math.inf
    m = max(values)
    if m == -math.inf or m == math.inf:
        return m
    return m + math.log(math.fsum(math.exp(v - m) for v in values))


def _log_add(x: float, y: float) -> float:
    if x < y:
        x, y = y, x
    if y == -math.inf:
        return x
    return x + math.log1p(math.exp(y - x))


def log_sum_certified(log_term: Callable[[int], float],
                      log_block_ratio: Optional[Callable[[int], float]], period: int,
                      start: int, rel_tol: float, size: Optional[int] = None,
                      exact: bool = False, divergent=DivergentPenalty) -> Tuple[float, float]:
    """Bracket (log lower, log upper) on sum_{i < size} term(i).

    ``log_block_ratio(m)`` bounds log(term(i + period) / term(i)) for all
    i >= m; summation always runs at least up to ``start`` (a multiple of
    ``period`` past which the bound is valid).  With ``exact`` the bound is
    taken to be attained, so the remainder is summed in closed form.
    """
    if size is not None:
        s = _logsumexp(log_term(i) for i in range(size))
        return s, s
    logs = [log_term(i) for i in range(start)]
    n = start
    while True:
        head = _logsumexp(logs)
        lr = log_block_ratio(n - period)
        block = _logsumexp(logs[n - period:n])
        if lr >= 0.0 and exact:
            raise divergent(f"terms do not decay: block ratio {math.exp(lr):.6g} >= 1")
        if lr < 0.0:
            tail = block + lr - math.log(-math.expm1(lr))
            if exact:
                s = _log_add(head, tail)
                return s, s
            if tail - head <= math.log(rel_tol) or tail == -math.inf:
                return head, _log_add(head, tail)
        if n >= MAX_TERMS:
            raise divergent("could not certify convergence within the truncation limit")
        grow = max(period, (n // period) * period)
        logs.extend(log_term(i) for i in range(n, n + grow))
        n += grow


def _log_ratio(source: SourceModel, m: int, power: float) -> float:
    r = source.ratio_bound(m)
    if r <= 0.0:
        return -math.inf
    return power * math.log(r)


def _start(lengths: CodeLengths) -> Tuple[int, int]:
    p = lengths.period
    if p is None:
        raise InvalidParameter("an infinite source needs an infinite length sequence")
    h = len(lengths.head)
    return p, -(-h // p) * p


def _check_lengths_cover(source: SourceModel, lengths: CodeLengths):
    if source.size is not None and lengths.size is not None and lengths.size < source.size:
        raise InvalidParameter(f"{lengths.size} lengths for a {source.size}-symbol source")


def _inner_bounds(source: SourceModel, lengths: CodeLengths, a: float, rel_tol: float,
                  closed_form: bool) -> Tuple[float, float]:
    """Natural-log bracket on sum_i p(i) a^n(i)."""
    src = probabilities(source)
    _check_lengths_cover(src, lengths)
    la = math.log(a)
    if src.size is not None:
        return log_sum_certified(lambda i: src.log_pmf(i) + lengths[i] * la,
                                 None, 1, 0, rel_tol, size=src.size)
    period, start = _start(lengths)
    return log_sum_certified(
        lambda i: src.log_pmf(i) + lengths[i] * la,
        lambda m: _log_ratio(src, m, period) + la, period, start, rel_tol,
        exact=closed_form and src.exact_ratio)


def penalty_bounds(source: SourceModel, lengths: CodeLengths, a: float, tol: float = 1e-12,
                   closed_form: bool = True) -> Tuple[float, float]:
    """(low, high) bracket on log_a sum_i p(i) a^n(i), width at most ``tol``."""
    a = _check_a(a)
    if a == 1.0:
        v = expected_length(source, lengths, tol, closed_form)
        return v, v
    rel_tol = math.expm1(tol * abs(math.log(a)))
    lo, hi = _inner_bounds(source, lengths, a, rel_tol, closed_form)
    lo, hi = lo / math.log(a), hi / math.log(a)
    return (lo, hi) if lo <= hi else (hi, lo)


def penalty(source: SourceModel, lengths: CodeLengths, a: float, tol: float = 1e-12,
            closed_form: bool = True) -> float:
    """L_a(P, N) = log_a sum_i p(i) a^n(i); a = 1 gives the expected length."""
    a = _check_a(a)
    if a == 1.0:
        return expected_length(source, lengths, tol, closed_form)
    rel_tol = math.expm1(tol * abs(math.log(a)))
    lo, hi = _inner_bounds(source, lengths, a, rel_tol, closed_form)
    mid = _log_add(lo, hi) - LN2 if hi > lo else lo
    return mid / math.log(a)


def expected_length(source: SourceModel, lengths: CodeLengths, tol: float = 1e-12,
                    closed_form: bool = True) -> float:
    src = probabilities(source)
    _check_lengths_cover(src, lengths)
    if src.size is not None:
        return math.fsum(src.pmf(i) * lengths[i] for i in range(src.size))
    period, n = _start(lengths)
    exact = closed_form and src.exact_ratio
    terms_p = [src.pmf(i) for i in range(n)]
    while True:
        x = src.ratio_bound(n - period) ** period
        if x < 1.0:
            bp = math.fsum(terms_p[n - period:n])
            bn = math.fsum(terms_p[i] * lengths[i] for i in range(n - period, n))
            # block q past the head: sum_s p(s) x^q (n(s) + q)
            tail = bn * x / (1.0 - x) + bp * x / (1.0 - x) ** 2
            head = math.fsum(terms_p[i] * lengths[i] for i in range(n))
            if exact or tail <= tol / 2 or tail == 0.0:
                return head + (tail if exact else tail / 2)
        elif exact:
            raise DivergentPenalty("expected length diverges")
        if n >= MAX_TERMS:
            raise DivergentPenalty("could not certify convergence within the truncation limit")
        grow = max(period, (n // period) * period)
        terms_p.extend(src.pmf(i) for i in range(n, n + grow))
        n += grow


def shannon_entropy(source: SourceModel, tol: float = 1e-12, closed_form: bool = True) -> float:
    src = probabilities(source)
    if closed_form and isinstance(src, GeometricSource):
        return golomb.geometric_shannon_entropy(src.theta)

    def h(i):
        lp = src.log2_pmf(i)
        return -math.exp(lp * LN2) * lp

    if src.size is not None:
        return math.fsum(h(i) for i in range(src.size))
    # -p ln p <= (2/e) sqrt(p), and the sqrt(p) tail is dominated geometrically
    terms = []
    n = 0
    grow = 64
    while n < MAX_TERMS:
        terms.extend(h(i) for i in range(n, n + grow))
        n += grow
        r = math.sqrt(src.ratio_bound(n))
        lp = src.log_pmf(n)
        if r < 1.0 and lp <= -2.0:
            bound = (2.0 / math.e) * math.exp(lp / 2.0) / (1.0 - r) / LN2
            if bound <= tol / 2:
                return math.fsum(terms) + bound / 2
        grow = n
    raise DivergentEntropy("could not certify convergence of the Shannon entropy")


def renyi_entropy(source: SourceModel, alpha: float, tol: float = 1e-12,
                  closed_form: bool = True) -> float:
    """H_alpha(P) = log2(sum_i p(i)^alpha) / (1 - alpha), in bits."""
    alpha = float(alpha)
    if not alpha > 0.0:
        raise InvalidParameter(f"Renyi order must be positive, got {alpha}")
    if alpha == 1.0:
        return shannon_entropy(source, tol, closed_form)
    src = probabilities(source)
    if closed_form and isinstance(src, GeometricSource):
        a = 2.0 ** (1.0 / alpha - 1.0)
        if a != 1.0:
            return golomb.geometric_renyi_entropy(src.theta, a)
    scale = abs(1.0 - alpha) * LN2
    rel_tol = math.expm1(tol * scale)
    lo, hi = log_sum_certified(lambda i: alpha * src.log_pmf(i),
                               lambda m: _log_ratio(src, m, alpha), 1, 1, rel_tol,
                               size=src.size, exact=closed_form and src.exact_ratio,
                               divergent=DivergentEntropy)
    mid = _log_add(lo, hi) - LN2 if hi > lo else lo
    return mid / LN2 / (1.0 - alpha)


def avg_redundancy(source: SourceModel, lengths: CodeLengths, a: float,
                   tol: float = 1e-12, closed_form: bool = True) -> float:
    """L_a(P, N) - H_alpha(a)(P)."""
    a = _check_a(a)
    if a <= 0.5:
        raise DegenerateRegime(f"a = {a} <= 0.5 has no corresponding Renyi entropy")
    return (penalty(source, lengths, a, tol / 2, closed_form)
            - renyi_entropy(source, renyi_order(a), tol / 2, closed_form))
