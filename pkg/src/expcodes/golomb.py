"""Golomb codes and their optimality for geometric sources under exponential penalties."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterator, List

from .errors import DegenerateRegime, DivergentPenalty, InvalidParameter
from .model import CodeLengths, _check_a, renyi_order

ONES = "ones"    # 1^q 0 prefix, alphabetic
ZEROS = "zeros"  # 0^q 1 prefix


def _check_theta(theta: float) -> float:
    theta = float(theta)
    if not (0.0 < theta < 1.0):
        raise InvalidParameter(f"theta must lie in (0, 1), got {theta!r}")
    return theta


@dataclass(frozen=True)
class GolombCode:
    k: int
    prefix: str = ONES

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise InvalidParameter(f"Golomb parameter must be a positive integer, got {self.k!r}")
        if self.prefix not in (ONES, ZEROS):
            raise InvalidParameter(f"unknown prefix convention {self.prefix!r}")
        object.__setattr__(self, "k", int(self.k))

    @property
    def g(self) -> int:
        return self.k.bit_length()

    @property
    def z(self) -> int:
        return (1 << self.g) - self.k

    def suffix(self, rem: int) -> str:
        g, z = self.g, self.z
        if rem < z:
            return format(rem, "b").zfill(g - 1) if g > 1 else ""
        return format(rem + z, "b").zfill(g)

    def codeword(self, j: int) -> str:
        if j < 0:
            raise InvalidParameter(f"symbol must be nonnegative, got {j}")
        q, rem = divmod(j, self.k)
        run, stop = ("1", "0") if self.prefix == ONES else ("0", "1")
        return run * q + stop + self.suffix(rem)

    def length(self, j: int) -> int:
        if j < 0:
            raise InvalidParameter(f"symbol must be nonnegative, got {j}")
        # ceil((j + 1 - z) / k) + g
        return -((self.z - j - 1) // self.k) + self.g

    def code_lengths(self) -> CodeLengths:
        return CodeLengths(tuple(self.length(j) for j in range(self.k)), self.k)

    def to_dict(self) -> dict:
        if self.k == 1:
            return {"kind": "unary", "prefix": self.prefix}
        return {"kind": "golomb", "k": self.k, "prefix": self.prefix}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def unary_code(prefix: str = ONES) -> GolombCode:
    return GolombCode(1, prefix)


def codeword(code: GolombCode, j: int) -> str:
    return code.codeword(j)


def length(code: GolombCode, j: int) -> int:
    return code.length(j)


def _ineq_sides(theta: float, a: float, k: int):
    """(theta^k + theta^(k+1), 1/a, theta^(k-1) + theta^k)."""
    tk = theta ** k
    return tk * (1.0 + theta), 1.0 / a, theta ** (k - 1) * (1.0 + theta)


def satisfies_ineq(theta: float, a: float, k: int) -> bool:
    left, mid, right = _ineq_sides(theta, a, k)
    return left <= mid < right


def optimal_k(theta: float, a: float) -> int:
    """Golomb parameter optimal for Geometric(theta) under penalty base ``a``.

    The ceiling formula is evaluated first and then repaired against the
    defining inequalities, because the ceiling is unreliable near integers.
    When no k satisfies the inequalities within range the unary code (k = 1)
    is optimal.
    """
    theta = _check_theta(theta)
    a = _check_a(a)
    if 1.0 / a >= 1.0 + theta:
        return 1
    guess = math.ceil(-(math.log(a) + math.log1p(theta)) / math.log(theta))
    guess = max(1, guess)
    for k in (guess - 1, guess, guess + 1):
        if k >= 1 and satisfies_ineq(theta, a, k):
            return k
    # far outside the window only when the float guess is badly off
    k = 1
    while not theta ** k * (1.0 + theta) <= 1.0 / a:
        k += 1
    return k


def is_left_boundary(theta: float, a: float, k: int, rel: float = 1e-12) -> bool:
    """True when theta^k + theta^(k+1) = 1/a up to rounding (G_k and G_(k+1) tie)."""
    left, mid, _ = _ineq_sides(theta, a, k)
    return abs(left - mid) <= rel * mid


def golomb_penalty_closed_form(theta: float, a: float, k: int) -> float:
    """L_a of Geometric(theta) under G_k; the expected length when a = 1."""
    theta = _check_theta(theta)
    a = _check_a(a)
    code = GolombCode(k)
    g, z = code.g, code.z
    if a == 1.0:
        return g + theta ** z / (1.0 - theta ** k)
    atk = a * theta ** k
    if atk >= 1.0:
        raise DivergentPenalty(f"a * theta^k = {atk} >= 1: penalty diverges")
    return g + math.log1p((a - 1.0) * theta ** z / (1.0 - atk)) / math.log(a)


def geometric_shannon_entropy(theta: float) -> float:
    theta = _check_theta(theta)
    h = -(theta * math.log2(theta) + (1.0 - theta) * math.log2(1.0 - theta))
    return h / (1.0 - theta)


def geometric_renyi_entropy(theta: float, a: float) -> float:
    """Renyi entropy of order 1/(1 + log2 a) of Geometric(theta), in bits."""
    theta = _check_theta(theta)
    a = _check_a(a)
    if a <= 0.5:
        raise DegenerateRegime(f"a = {a} <= 0.5 has no corresponding Renyi entropy")
    if a == 1.0:
        return geometric_shannon_entropy(theta)
    alpha = renyi_order(a)
    # log_a of (1 - theta) / (1 - theta^alpha)^(1/alpha)
    inner = math.log1p(-theta) - math.log1p(-theta ** alpha) / alpha
    return inner / math.log(a)


def geometric_redundancy(theta: float, a: float) -> float:
    k = optimal_k(theta, a)
    return golomb_penalty_closed_form(theta, a, k) - geometric_renyi_entropy(theta, a)


SWEEP_HEADER = ("theta", "a", "k_opt", "penalty", "entropy", "redundancy")


def sweep_rows(thetas, a_values) -> Iterator[tuple]:
    """Rows (theta, a, k_opt, penalty, entropy, redundancy), sorted by (a, theta)."""
    for a in sorted(set(float(x) for x in a_values)):
        if a <= 0.5:
            raise DegenerateRegime(f"sweep needs a > 0.5, got {a}")
        for theta in sorted(set(float(t) for t in thetas)):
            theta = _check_theta(theta)
            k = optimal_k(theta, a)
            pen = golomb_penalty_closed_form(theta, a, k)
            ent = geometric_renyi_entropy(theta, a)
            yield theta, a, k, pen, ent, pen - ent
