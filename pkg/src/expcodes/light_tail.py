"""Unary-ended codes, optimal for light-tailed sources.

If some r makes p(i) >= max(p(j), sum_{k>j} p(k) a^(k-j)) hold for every
j > r and i < j, the symbols past r can be lumped into one reduced item; the
exponential Huffman code of the reduced alphabet, with the lumped item's
codeword continued by a unary code, is optimal for the whole source.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

from .errors import DivergentPenalty, InvalidParameter, NotVerifiablyLightTailed
from .exp_huffman import FiniteCode, exp_huffman, is_prefix_free
from .model import CodeLengths, FiniteWeights, PoissonSource, SourceModel, _check_a

DEFAULT_SEARCH_CAP = 10_000


@dataclass(frozen=True)
class UnaryEndedCode:
    head_codewords: Tuple[str, ...]
    continuation_prefix: str

    def __post_init__(self):
        object.__setattr__(self, "head_codewords", tuple(self.head_codewords))
        if not self.continuation_prefix or set(self.continuation_prefix) != {"1"}:
            raise InvalidParameter("continuation prefix must be a nonempty run of 1s")
        if not is_prefix_free(self.head_codewords + (self.continuation_prefix,)):
            raise InvalidParameter("head codewords and continuation are not prefix-free")

    @property
    def r(self) -> int:
        return len(self.head_codewords) - 1

    @property
    def x(self) -> int:
        """Offset with codeword j > r equal to j - x ones followed by a zero."""
        return self.r + 1 - len(self.continuation_prefix)

    def codeword(self, i: int) -> str:
        if i < 0:
            raise InvalidParameter(f"symbol must be nonnegative, got {i}")
        if i <= self.r:
            return self.head_codewords[i]
        return self.continuation_prefix + "1" * (i - self.r - 1) + "0"

    def length(self, i: int) -> int:
        if i < 0:
            raise InvalidParameter(f"symbol must be nonnegative, got {i}")
        if i <= self.r:
            return len(self.head_codewords[i])
        return len(self.continuation_prefix) + i - self.r

    def code_lengths(self) -> CodeLengths:
        return CodeLengths(tuple(self.length(i) for i in range(self.r + 2)), 1)

    def to_dict(self) -> dict:
        return {"kind": "unary_ended", "head": list(self.head_codewords),
                "continuation": self.continuation_prefix, "x": self.x}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


# exact ties such as Poisson(1)'s p(0) = p(1) must not be lost to rounding
TIE_REL = 1e-12


def _condition_holds(p_j: float, min_before: float, tail_hi: float) -> bool:
    floor = min_before * (1.0 + TIE_REL)
    return floor >= p_j and floor >= tail_hi


def _tail_certificate(source: SourceModel, a: float, j: int, min_before: float) -> bool:
    """True when the condition provably holds for every index past j.

    With rho bounding p(k+1)/p(k) for k >= j and c = a rho / (1 - a rho),
    every later tail sum is at most c p(k) <= c rho p(k-1), so it suffices
    that c rho <= 1 and rho max(1, c) p(j) stays below the minimum so far.
    """
    rho = source.ratio_bound(j)
    if rho > 1.0 or a * rho >= 1.0:
        return False
    c = a * rho / (1.0 - a * rho)
    return c * rho <= 1.0 and rho * max(1.0, c) * source.pmf(j) <= min_before


def light_tail_failures(source: SourceModel, a: float, search_cap: int = DEFAULT_SEARCH_CAP):
    """Indices j where the light-tail condition fails, plus the certificate index.

    Returns (failures, J) such that the condition holds for every j > J.
    Uncertified tail sums count as failures.
    """
    a = _check_a(a)
    size = source.size
    failures = []
    min_before = source.pmf(0)
    j = 1
    while True:
        if size is not None and j >= size:
            return failures, j
        pj = source.pmf(j)
        _, hi = source.tail_exp_sum(j, a)
        if not _condition_holds(pj, min_before, hi):
            failures.append(j)
        min_before = min(min_before, pj)
        if size is None and _tail_certificate(source, a, j, min_before):
            return failures, j
        if j >= search_cap:
            raise NotVerifiablyLightTailed(
                f"no tail certificate for {source!r} with a = {a} up to index {search_cap}")
        j += 1


def find_r(source: SourceModel, a: float, search_cap: int = DEFAULT_SEARCH_CAP) -> int:
    """Smallest r for which the light-tail condition is certified for all j > r."""
    failures, _ = light_tail_failures(source, a, search_cap)
    return max(failures, default=0)


def verify_r(source: SourceModel, a: float, r: int, search_cap: int = DEFAULT_SEARCH_CAP) -> bool:
    try:
        failures, _ = light_tail_failures(source, a, max(search_cap, r + 1))
    except NotVerifiablyLightTailed:
        return False
    return all(j <= r for j in failures)


def poisson_r(lam: float, a: float) -> int:
    """max(ceil(2 a lambda) - 2, ceil(e lambda) - 1), sufficient for Poisson(lambda)."""
    a = _check_a(a)
    if not lam > 0.0:
        raise InvalidParameter(f"lambda must be positive, got {lam}")
    return max(math.ceil(2.0 * a * lam) - 2, math.ceil(math.e * lam) - 1, 0)


def poisson_tail_closed_form(lam: float, a: float, r: int) -> float:
    """sum_{k>r} p(k) a^(k-r) = a^-r e^(lambda (a-1)) - sum_{k<=r} p(k) a^(k-r)."""
    src = PoissonSource(lam)
    la = math.log(_check_a(a))
    total = math.exp(lam * (a - 1.0) - r * la)
    return total - math.fsum(math.exp(src.log_pmf(k) + (k - r) * la) for k in range(r + 1))


def reduced_weights(source: SourceModel, a: float, r: int) -> FiniteWeights:
    """p(0), ..., p(r) followed by the lumped tail weight sum_{k>r} p(k) a^(k-r)."""
    a = _check_a(a)
    if r < 0:
        raise InvalidParameter("r must be nonnegative")
    if source.size is not None and r + 1 >= source.size:
        raise InvalidParameter(f"r = {r} leaves no tail in a {source.size}-symbol source")
    head = [source.pmf(i) for i in range(r + 1)]
    if isinstance(source, PoissonSource):
        tail = poisson_tail_closed_form(source.lam, a, r)
        scale = math.exp(source.lam * (a - 1.0) - r * math.log(a))
        if tail < 1e-4 * scale:
            # cancellation would eat the significant digits; sum directly
            lo, hi = source.tail_exp_sum(r, a)
            tail = 0.5 * (lo + hi)
    else:
        lo, hi = source.tail_exp_sum(r, a)
        if math.isinf(hi):
            raise DivergentPenalty(f"tail sum past {r} diverges or is uncertified")
        tail = 0.5 * (lo + hi)
    if not tail > 0.0:
        raise DivergentPenalty(f"tail weight past {r} is not positive: {tail}")
    return FiniteWeights(tuple(head) + (tail,))


def relabel_all_ones(codewords: Sequence[str], target: int) -> Tuple[str, ...]:
    """Swap child labels along the target's path so its codeword becomes all 1s.

    Every codeword keeps its length and the code stays prefix-free.
    """
    words = list(codewords)
    for depth in range(len(words[target])):
        if words[target][depth] == "1":
            continue
        prefix = words[target][:depth]
        for i, w in enumerate(words):
            if len(w) > depth and w.startswith(prefix):
                flipped = "1" if w[depth] == "0" else "0"
                words[i] = w[:depth] + flipped + w[depth + 1:]
    return tuple(words)


def assemble_unary_ended(code: FiniteCode) -> UnaryEndedCode:
    """Turn a reduced-alphabet code (last item = lumped tail) into a unary-ended code."""
    words = relabel_all_ones(code.codewords, len(code.codewords) - 1)
    return UnaryEndedCode(words[:-1], words[-1])


def build_unary_ended(source: SourceModel, a: float, r: Optional[int] = None,
                      search_cap: int = DEFAULT_SEARCH_CAP) -> UnaryEndedCode:
    """Optimal unary-ended code for a light-tailed source.

    ``r`` defaults to the closed-form bound for Poisson sources and to
    ``find_r`` otherwise.
    """
    a = _check_a(a)
    if r is None:
        if isinstance(source, PoissonSource):
            r = poisson_r(source.lam, a)
        else:
            r = find_r(source, a, search_cap)
    return assemble_unary_ended(exp_huffman(reduced_weights(source, a, r), a))
