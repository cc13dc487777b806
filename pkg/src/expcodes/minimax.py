"""Maximum pointwise redundancy R* = sup_i [n(i) + log2 p(i)] and its exponential relaxations.

The d-th exponential redundancy R_d = (1/d) log2 sum_i p(i)^(1+d) 2^(d n(i))
is the exponential penalty with base 2^d on weights p^(1+d), and increases to
R* as d grows.  Minimax codes for light tails are obtained as the limit of
exponential Huffman codes along d = 1, 2, 4, ...
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple, Union

from .errors import InvalidParameter, NonStabilized, NotVerifiablyLightTailed
from .exp_huffman import FiniteCode, _codewords_from_merges, _heap_merge, exp_huffman_log
from .golomb import GolombCode, _check_theta
from .light_tail import DEFAULT_SEARCH_CAP, TIE_REL, UnaryEndedCode, assemble_unary_ended
from .model import LN2, CodeLengths, SourceModel, probabilities
from .penalty_eval import _logsumexp, _log_add, log_sum_certified

# per-block drift this close to zero counts as flat (geometric ratios are rounded)
FLAT_TOL = 1e-12
SCAN_CAP = 1_000_000
D_SCHEDULE = (1, 2, 4, 8, 16, 32, 64)


@dataclass(frozen=True)
class RedundancyProfile:
    pointwise: Callable[[int], float]
    sup_value: float
    sup_witness: Optional[int]
    lower: float
    upper: float
    scanned: int

    @property
    def certified(self) -> bool:
        return self.lower == self.upper

    def to_dict(self) -> dict:
        return {"sup": self.sup_value, "sup_witness": self.sup_witness,
                "lower": self.lower, "upper": self.upper, "certified": self.certified}


def max_pointwise_redundancy(source: SourceModel, lengths: CodeLengths,
                             scan_cap: int = SCAN_CAP) -> RedundancyProfile:
    """Exact R* when a tail certificate exists, otherwise a (lower, inf) bracket.

    Past index m every residue class of the length period gains 1 bit per
    period while log2 p drops by at least -period * log2 rho(m); once that
    drift is <= 0 the supremum is attained within one more period.
    """
    src = probabilities(source)

    def pw(i: int) -> float:
        return lengths[i] + src.log2_pmf(i)

    if src.size is not None:
        if lengths.size is not None and lengths.size < src.size:
            raise InvalidParameter(f"{lengths.size} lengths for a {src.size}-symbol source")
        vals = [pw(i) for i in range(src.size)]
        best = max(range(len(vals)), key=vals.__getitem__)
        return RedundancyProfile(pw, vals[best], best, vals[best], vals[best], len(vals))
    if lengths.period is None:
        raise InvalidParameter("an infinite source needs an infinite length sequence")
    period = lengths.period
    m = max(len(lengths.head) - period, 0)
    best_i, best_v, scanned = 0, -math.inf, 0

    def scan_to(limit):
        nonlocal best_i, best_v, scanned
        for i in range(scanned, limit):
            v = pw(i)
            if v > best_v:
                best_i, best_v = i, v
        scanned = max(scanned, limit)

    while m <= scan_cap:
        rho = src.ratio_bound(m)
        drift = 1.0 + period * math.log2(rho) if rho > 0.0 else -math.inf
        if drift <= (FLAT_TOL if src.exact_ratio else 0.0):
            scan_to(m + period)
            return RedundancyProfile(pw, best_v, best_i, best_v, best_v, scanned)
        if src.exact_ratio:
            # every residue class grows by a fixed positive drift per period
            return RedundancyProfile(pw, math.inf, None, math.inf, math.inf, scanned)
        m = max(2 * m, m + period)
    scan_to(min(m, scan_cap))
    return RedundancyProfile(pw, math.inf, None, best_v, math.inf, scanned)


def d_redundancy(source: SourceModel, lengths: CodeLengths, d: float, tol: float = 1e-12) -> float:
    """R_d(N, P), in bits."""
    d = float(d)
    if not d > 0.0:
        raise InvalidParameter(f"d must be positive, got {d}")
    src = probabilities(source)
    rel_tol = math.expm1(tol * d * LN2)

    def term(i):
        return (1.0 + d) * src.log_pmf(i) + d * lengths[i] * LN2

    if src.size is not None:
        lo = hi = _logsumexp(term(i) for i in range(src.size))
    else:
        if lengths.period is None:
            raise InvalidParameter("an infinite source needs an infinite length sequence")
        period = lengths.period
        start = -(-len(lengths.head) // period) * period

        def block(m):
            rho = src.ratio_bound(m)
            if rho <= 0.0:
                return -math.inf
            return (1.0 + d) * period * math.log(rho) + d * LN2

        lo, hi = log_sum_certified(term, block, period, start, rel_tol, exact=src.exact_ratio)
    mid = _log_add(lo, hi) - LN2 if hi > lo else lo
    return mid / LN2 / d


def _golomb_rstar(theta: float, k: int) -> float:
    from .model import GeometricSource
    return max_pointwise_redundancy(GeometricSource(theta), GolombCode(k).code_lengths()).sup_value


def minimax_golomb_k(theta: float) -> int:
    """ceil(-1 / log2 theta), repaired by comparing R* of the neighbouring parameters."""
    theta = _check_theta(theta)
    k0 = max(1, math.ceil(-1.0 / math.log2(theta)))
    candidates = [k for k in (k0 - 1, k0, k0 + 1) if k >= 1]
    scored = [(_golomb_rstar(theta, k), k) for k in candidates]
    best = min(v for v, _ in scored)
    return min(k for v, k in scored if v <= best + FLAT_TOL)


def minimax_light_tail_r(source: SourceModel, search_cap: int = DEFAULT_SEARCH_CAP) -> int:
    """Smallest r with p(i) >= p(r) for i < r and p(j) >= 2 p(j+1) for j >= r."""
    src = probabilities(source)
    size = src.size
    # first index past which the halving condition is certified
    cert = 0
    if size is None:
        while src.ratio_bound(cert) > 0.5:
            cert += 1
            if cert > search_cap:
                raise NotVerifiablyLightTailed(
                    f"p(j+1)/p(j) <= 1/2 could not be certified up to index {search_cap}")
    else:
        cert = size - 1
    r = 0
    for j in range(cert):
        if src.pmf_ratio(j) > 0.5 * (1.0 + TIE_REL):
            r = j + 1
    while r <= search_cap:
        pr = src.pmf(r) * (1.0 - TIE_REL)
        if all(src.pmf(i) >= pr for i in range(r)):
            return r
        r += 1
    raise NotVerifiablyLightTailed(f"no valid r up to {search_cap}")


def _stabilized(log_weights: Callable[[int], List[float]]) -> Tuple[FiniteCode, int]:
    """Code at the largest d, provided the last three doublings agree on it.

    Lengths can sit still over small d and still move later, so the whole
    schedule is always run.
    """
    history = []
    for d in D_SCHEDULE:
        code = exp_huffman_log(log_weights(d), d * LN2)
        history.append(code.lengths)
    if not history[-1] == history[-2] == history[-3]:
        raise NonStabilized(f"lengths still changing at d = {D_SCHEDULE[-1]}: {history[-3:]}")
    return code, D_SCHEDULE[-1]


def _limit_code(keys: List[float], log_weights: List[float]) -> FiniteCode:
    """Merge with combine(x, y) = max(x, y) + 1 on keys log2 p, the d -> oo member.

    This greedy merge minimizes max_i (key_i + n_i) exactly.  Ties in the
    limit key are broken by the d = D_SCHEDULE[-1] log-weights, so the result
    refines the finite-d exponential Huffman codes.  ``root_weight`` is the
    achieved maximum.
    """
    log_a = D_SCHEDULE[-1] * LN2

    def combine(x, y):
        return (max(x[0], y[0]) + 1.0, log_a + _log_add(x[1], y[1]))

    merges, root = _heap_merge(list(zip(keys, log_weights)), combine)
    return FiniteCode(_codewords_from_merges(len(keys), merges), root[0])


def _tail_limit_key(src: SourceModel, r: int, search_cap: int) -> float:
    """max_{k>r} log2 p(k) + (k - r); terms stop growing once p(k+1)/p(k) <= 1/2."""
    best = -math.inf
    k = r + 1
    while True:
        best = max(best, src.log2_pmf(k) + (k - r))
        if src.ratio_bound(k) <= 0.5:
            return best
        if k - r > search_cap:
            raise NotVerifiablyLightTailed(f"tail maximum past {r} not certified by index {k}")
        k += 1


def minimax_reduced_code(source: SourceModel, r: Optional[int] = None,
                         search_cap: int = DEFAULT_SEARCH_CAP,
                         method: str = "limit") -> Union[UnaryEndedCode, FiniteCode]:
    """Code minimizing R*, as the d -> oo limit of exponential Huffman codes for R_d.

    Finite sources yield a FiniteCode over the whole alphabet; infinite
    light-tailed sources yield a unary-ended code with head 0..r.

    ``method="limit"`` merges with the limiting rule directly, which is exact.
    ``method="schedule"`` runs exponential Huffman at d = 1, 2, ..., 64 and
    takes the d = 64 code, raising NonStabilized unless d = 16, 32, 64 agree;
    it can settle on a suboptimal code when two candidates differ in R* by
    less than about log2(n) / 64.
    """
    if method not in ("limit", "schedule"):
        raise InvalidParameter(f"unknown method {method!r}")
    src = probabilities(source)
    if src.size is not None:
        logs = [src.log_pmf(i) for i in range(src.size)]
        weights = lambda d: [(1.0 + d) * x for x in logs]
        if method == "schedule":
            return _stabilized(weights)[0]
        return _limit_code([x / LN2 for x in logs], weights(D_SCHEDULE[-1]))
    if r is None:
        r = minimax_light_tail_r(src, search_cap)
    head = [src.log_pmf(i) for i in range(r + 1)]

    def weights(d):
        # sum_{k>r} p(k)^(1+d) 2^(d (k - r)), summed from k = r + 1
        lo, hi = log_sum_certified(
            lambda t: (1.0 + d) * src.log_pmf(r + 1 + t) + d * (t + 1) * LN2,
            lambda t: (1.0 + d) * math.log(src.ratio_bound(r + 1 + t)) + d * LN2
            if src.ratio_bound(r + 1 + t) > 0.0 else -math.inf,
            1, 1, 1e-15, exact=src.exact_ratio)
        tail = _log_add(lo, hi) - LN2 if hi > lo else lo
        return [(1.0 + d) * x for x in head] + [tail]

    if method == "schedule":
        code = _stabilized(weights)[0]
    else:
        keys = [x / LN2 for x in head] + [_tail_limit_key(src, r, search_cap)]
        code = _limit_code(keys, weights(D_SCHEDULE[-1]))
    return assemble_unary_ended(code)
