"""Penalty parameters, source distributions and codeword-length sequences.

Sources are immutable.  Every source exposes its pmf in linear and log
space, the successive ratio p(i+1)/p(i), and an upper bound on that ratio
over a whole suffix of the alphabet.  The ratio bound is what lets the
evaluation code certify how much mass a truncated infinite sum leaves out.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence, Tuple, Union

from .errors import DegenerateRegime, DivergentPenalty, InvalidParameter

Interval = Tuple[float, float]

LN2 = math.log(2.0)


class Regime(enum.Enum):
    DEGENERATE = "degenerate"
    LINEAR = "linear"
    EXPONENTIAL = "exponential"


def _check_a(a: float) -> float:
    a = float(a)
    if not (a > 0.0) or math.isinf(a):
        raise InvalidParameter(f"penalty exponent must be a positive real, got {a!r}")
    return a


def classify(a: float) -> Regime:
    a = _check_a(a)
    if a <= 0.5:
        return Regime.DEGENERATE
    if a == 1.0:
        return Regime.LINEAR
    return Regime.EXPONENTIAL


def renyi_order(a: float) -> float:
    """Renyi order matched to the exponential penalty with base ``a``: 1/(1 + log2 a)."""
    a = _check_a(a)
    if a <= 0.5:
        raise DegenerateRegime(f"a = {a} <= 0.5 has no corresponding Renyi entropy")
    return 1.0 / (1.0 + math.log2(a))


@dataclass(frozen=True)
class PenaltyParam:
    a: float

    def __post_init__(self):
        object.__setattr__(self, "a", _check_a(self.a))

    @property
    def regime(self) -> Regime:
        return classify(self.a)

    @property
    def alpha(self) -> float:
        return renyi_order(self.a)


def _sum_ratio_tail(log_first: Callable[[int], float], ratio_bound: Callable[[int], float],
                    start: int, log_a: float, rel_tol: float = 1e-15,
                    max_terms: int = 1_000_000) -> Interval:
    """Certified bracket on sum_{t>=1} p(start+t) a^t.

    ``log_first(i)`` is log p(i).  Once a^1 * ratio_bound(i) drops below one
    the remainder is dominated by a geometric series.
    """
    terms = []
    total = 0.0
    t = 1
    while t <= max_terms:
        lt = log_first(start + t) + t * log_a
        term = math.exp(lt)
        terms.append(term)
        total += term
        x = math.exp(log_a) * ratio_bound(start + t)
        if x < 1.0:
            rest = term * x / (1.0 - x)
            if rest <= rel_tol * total or rest == 0.0:
                s = math.fsum(terms)
                return s, s + rest
        t += 1
    s = math.fsum(terms)
    return s, math.inf


class SourceModel:
    """Common interface of probability sources over 0, 1, 2, ..."""

    kind: str = ""

    @property
    def size(self) -> Optional[int]:
        """Alphabet size, or ``None`` for an infinite alphabet."""
        return None

    @property
    def exact_ratio(self) -> bool:
        """True when ``ratio_bound`` is attained at every index (geometric)."""
        return False

    def log_pmf(self, i: int) -> float:
        raise NotImplementedError

    def pmf(self, i: int) -> float:
        return math.exp(self.log_pmf(i))

    def log2_pmf(self, i: int) -> float:
        return self.log_pmf(i) / LN2

    def pmf_ratio(self, i: int) -> float:
        return math.exp(self.log_pmf(i + 1) - self.log_pmf(i))

    def ratio_bound(self, j: int) -> float:
        """Upper bound on p(k+1)/p(k) valid for every k >= j."""
        raise NotImplementedError

    def tail_exp_sum(self, j: int, a: float) -> Interval:
        """Bracket on sum_{k>j} p(k) a^(k-j)."""
        return _sum_ratio_tail(self.log_pmf, self.ratio_bound, j, math.log(a))

    def _check_index(self, i: int) -> int:
        if i < 0 or (self.size is not None and i >= self.size):
            raise InvalidParameter(f"symbol {i} outside the alphabet of {self!r}")
        return i

    def to_dict(self) -> dict:
        raise NotImplementedError

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


@dataclass(frozen=True)
class GeometricSource(SourceModel):
    theta: float
    kind = "geometric"

    def __post_init__(self):
        if not (0.0 < self.theta < 1.0):
            raise InvalidParameter(f"theta must lie in (0, 1), got {self.theta!r}")

    @property
    def exact_ratio(self) -> bool:
        return True

    def log_pmf(self, i: int) -> float:
        self._check_index(i)
        return math.log1p(-self.theta) + i * math.log(self.theta)

    def pmf(self, i: int) -> float:
        self._check_index(i)
        return (1.0 - self.theta) * self.theta ** i

    def pmf_ratio(self, i: int) -> float:
        return self.theta

    def ratio_bound(self, j: int) -> float:
        return self.theta

    def tail_exp_sum(self, j: int, a: float) -> Interval:
        at = a * self.theta
        if at >= 1.0:
            return math.inf, math.inf
        v = (1.0 - self.theta) * self.theta ** (j + 1) * a / (1.0 - at)
        return v, v

    def to_dict(self) -> dict:
        return {"kind": self.kind, "theta": self.theta}


@dataclass(frozen=True)
class PoissonSource(SourceModel):
    lam: float
    kind = "poisson"

    def __post_init__(self):
        if not (self.lam > 0.0) or math.isinf(self.lam):
            raise InvalidParameter(f"lambda must be positive, got {self.lam!r}")

    def log_pmf(self, i: int) -> float:
        self._check_index(i)
        return i * math.log(self.lam) - self.lam - math.lgamma(i + 1)

    def pmf_ratio(self, i: int) -> float:
        return self.lam / (i + 1)

    def ratio_bound(self, j: int) -> float:
        return self.lam / (j + 1)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "lambda": self.lam}


@dataclass(frozen=True)
class FiniteWeights(SourceModel):
    """Positive weights in caller order; they need not sum to one."""

    weights: Tuple[float, ...]
    kind = "finite"

    def __post_init__(self):
        w = tuple(float(x) for x in self.weights)
        if not w:
            raise InvalidParameter("weight list must be nonempty")
        if any(not (x > 0.0) or math.isinf(x) for x in w):
            raise InvalidParameter("weights must be finite and strictly positive")
        object.__setattr__(self, "weights", w)

    @property
    def size(self) -> int:
        return len(self.weights)

    def __len__(self) -> int:
        return len(self.weights)

    def __iter__(self):
        return iter(self.weights)

    def __getitem__(self, i):
        return self.weights[i]

    def total(self) -> float:
        return math.fsum(self.weights)

    def normalized(self) -> "FiniteWeights":
        s = self.total()
        return FiniteWeights(tuple(x / s for x in self.weights))

    def log_pmf(self, i: int) -> float:
        return math.log(self.weights[self._check_index(i)])

    def pmf(self, i: int) -> float:
        return self.weights[self._check_index(i)]

    def pmf_ratio(self, i: int) -> float:
        if i + 1 >= len(self.weights):
            return 0.0
        return self.weights[i + 1] / self.weights[i]

    def ratio_bound(self, j: int) -> float:
        return max((self.pmf_ratio(k) for k in range(j, len(self.weights))), default=0.0)

    def tail_exp_sum(self, j: int, a: float) -> Interval:
        s = math.fsum(self.weights[k] * a ** (k - j) for k in range(j + 1, len(self.weights)))
        return s, s

    def to_dict(self) -> dict:
        return {"kind": self.kind, "weights": list(self.weights)}


@dataclass(frozen=True)
class CustomSource(SourceModel):
    """A source defined by caller-supplied accessors.

    ``tail`` maps (j, a) to sum_{k>j} p(k) a^(k-j), either as a float or as a
    certified (lower, upper) pair.  ``ratio`` maps j to an upper bound on
    p(k+1)/p(k) over all k >= j; without it nothing about the infinite tail
    can be certified.
    """

    pmf_fn: Callable[[int], float]
    tail: Optional[Callable[[int, float], Union[float, Interval]]] = None
    ratio: Optional[Callable[[int], float]] = None
    kind = "custom"

    def log_pmf(self, i: int) -> float:
        self._check_index(i)
        p = self.pmf_fn(i)
        if not (p > 0.0):
            raise InvalidParameter(f"custom pmf must be positive, got p({i}) = {p!r}")
        return math.log(p)

    def pmf(self, i: int) -> float:
        return math.exp(self.log_pmf(i))

    def ratio_bound(self, j: int) -> float:
        if self.ratio is None:
            return math.inf
        return self.ratio(j)

    def tail_exp_sum(self, j: int, a: float) -> Interval:
        if self.tail is None:
            if self.ratio is None:
                return 0.0, math.inf
            return super().tail_exp_sum(j, a)
        v = self.tail(j, a)
        if isinstance(v, tuple):
            lo, hi = v
            if lo > hi:
                raise InvalidParameter(f"tail bounds out of order: {lo} > {hi}")
            return float(lo), float(hi)
        return float(v), float(v)

    def to_dict(self) -> dict:
        raise InvalidParameter("custom sources are not serializable")


def pmf(source: SourceModel, i: int) -> float:
    return source.pmf(i)


def source_from_dict(d: dict) -> SourceModel:
    kind = d.get("kind")
    if kind == "geometric":
        return GeometricSource(float(d["theta"]))
    if kind == "poisson":
        return PoissonSource(float(d["lambda"]))
    if kind == "finite":
        return FiniteWeights(tuple(d["weights"]))
    raise InvalidParameter(f"unknown source kind {kind!r}")


def source_from_json(text: str) -> SourceModel:
    return source_from_dict(json.loads(text))


def probabilities(source: SourceModel) -> SourceModel:
    """Finite weights rescaled to a probability vector; other sources unchanged."""
    if isinstance(source, FiniteWeights):
        return source.normalized()
    return source


@dataclass(frozen=True)
class CodeLengths:
    """Codeword lengths n(0), n(1), ...

    ``head`` lists the first lengths explicitly.  With ``period`` set, the
    sequence continues past the head by n(i) = n(i - period) + 1, which covers
    the unary code (period 1), Golomb codes (period k) and unary-ended codes.
    """

    head: Tuple[int, ...]
    period: Optional[int] = None

    def __post_init__(self):
        head = tuple(int(n) for n in self.head)
        if not head:
            raise InvalidParameter("length sequence needs at least one entry")
        if any(n < 0 for n in head):
            raise InvalidParameter("codeword lengths must be nonnegative")
        if self.period is not None and not (1 <= self.period <= len(head)):
            raise InvalidParameter("period must be between 1 and the head length")
        object.__setattr__(self, "head", head)

    @classmethod
    def unary(cls) -> "CodeLengths":
        return cls((1,), 1)

    @property
    def infinite(self) -> bool:
        return self.period is not None

    @property
    def size(self) -> Optional[int]:
        return None if self.infinite else len(self.head)

    def __getitem__(self, i: int) -> int:
        if i < 0:
            raise IndexError(i)
        h = len(self.head)
        if i < h:
            return self.head[i]
        if self.period is None:
            raise IndexError(f"finite length sequence has no entry {i}")
        q, s = divmod(i - h, self.period)
        return self.head[h - self.period + s] + q + 1

    def first(self, count: int) -> list:
        return [self[i] for i in range(count)]

    def shifted(self, c: int) -> "CodeLengths":
        return CodeLengths(tuple(n + c for n in self.head), self.period)

    def kraft_sum(self) -> Fraction:
        total = sum(Fraction(1, 2 ** n) for n in self.head)
        if self.period is not None:
            # each residue class of the tail adds a geometric series summing to
            # the mass of its representative in the last head period
            total += sum(Fraction(1, 2 ** n) for n in self.head[-self.period:])
        return total
