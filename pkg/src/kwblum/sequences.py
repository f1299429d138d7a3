"""Exact algebra for the parametric family of regularly varying sequences.

Every step-size and spacing sequence used by the recursions has the form

    v(n) = coefficient * n**e * log(n)**l1 * loglog(n)**l2 * logloglog(n)**l3,

with a positive coefficient and rational exponents.  This family is closed
under products and real powers, and the limit of any product of powers of
such sequences is decided *exactly* by a lexicographic comparison of the
combined exponent vector (e, l1, l2, l3): a negative leading entry means the
limit is zero, a positive one means infinity, and an all-zero vector leaves
a finite limit equal to the combined coefficient.  Exponents are stored as
``fractions.Fraction`` so these decisions never hinge on float rounding.

The slow-variation index of ``v`` (the alpha with n*(1 - v(n-1)/v(n)) -> alpha)
equals ``e``; the log factors contribute nothing.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, Union

import numpy as np

__all__ = [
    "ParamSequence",
    "LimitValue",
    "combine",
    "limit_ratio",
    "limit_n_times",
    "partial_sum",
    "cesaro_ratio",
    "sum_converges",
    "partial_sum_growth_class",
    "log_partial_sum_growth_class",
    "parse_sequence",
    "format_sequence",
]

MAX_LOG_DEPTH = 3

ExponentLike = Union[int, float, str, Fraction]


def _as_fraction(x: ExponentLike) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, str)):
        return Fraction(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValueError(f"exponent must be finite, got {x!r}")
        return Fraction(x)
    raise TypeError(f"cannot interpret {x!r} as an exponent")


def _min_index_for_depth(depth: int) -> int:
    # Smallest n with log_depth(n) >= 0.1; keeps every iterated log factor
    # safely positive so eval() never flips sign or divides by ~0.
    if depth == 0:
        return 1
    n = 2
    while True:
        v = float(n)
        ok = True
        for _ in range(depth):
            v = math.log(v)
            if v <= 0.0:
                ok = False
                break
        if ok and v >= 0.1:
            return n
        n += 1


_N_START_BY_DEPTH = {d: _min_index_for_depth(d) for d in range(MAX_LOG_DEPTH + 1)}


@dataclass(frozen=True)
class LimitValue:
    """Outcome of a limit as n -> infinity: zero, a positive finite value, or infinity."""

    kind: str
    value: float | None = None

    _KINDS = ("zero", "finite", "infinite")

    def __post_init__(self) -> None:
        if self.kind not in self._KINDS:
            raise ValueError(f"unknown limit kind {self.kind!r}")
        if self.kind == "finite":
            if self.value is None or not (self.value > 0.0) or not math.isfinite(self.value):
                raise ValueError("a finite limit must carry a positive value; zero limits use kind='zero'")
        elif self.value is not None:
            raise ValueError(f"kind={self.kind!r} carries no value")

    @classmethod
    def zero(cls) -> "LimitValue":
        return cls("zero")

    @classmethod
    def finite(cls, value: float) -> "LimitValue":
        return cls("finite", float(value))

    @classmethod
    def infinite(cls) -> "LimitValue":
        return cls("infinite")

    @property
    def is_zero(self) -> bool:
        return self.kind == "zero"

    @property
    def is_finite(self) -> bool:
        return self.kind == "finite"

    @property
    def is_infinite(self) -> bool:
        return self.kind == "infinite"

    def as_float(self) -> float:
        """Numeric value of the limit, with infinity mapped to math.inf."""
        if self.kind == "zero":
            return 0.0
        if self.kind == "finite":
            return float(self.value)  # type: ignore[arg-type]
        return math.inf

    def __repr__(self) -> str:
        if self.kind == "finite":
            return f"LimitValue.finite({self.value!r})"
        return f"LimitValue.{self.kind}()"


@dataclass(frozen=True)
class ParamSequence:
    """A sequence coefficient * n**n_power * prod_j log_j(n)**log_powers[j-1].

    ``log_j`` is the j-fold iterated natural logarithm (log, loglog, ...),
    capped at depth 3.  The first valid index ``n_start`` is the smallest
    integer at which every active log factor is at least 0.1.
    """

    coefficient: float
    n_power: Fraction
    log_powers: tuple[Fraction, ...] = ()
    n_start: int = field(init=False)

    def __init__(
        self,
        coefficient: float,
        n_power: ExponentLike,
        log_powers: Sequence[ExponentLike] = (),
    ) -> None:
        coefficient = float(coefficient)
        if not math.isfinite(coefficient) or coefficient <= 0.0:
            raise ValueError(f"coefficient must be a positive real, got {coefficient!r}")
        powers = tuple(_as_fraction(p) for p in log_powers)
        while powers and powers[-1] == 0:
            powers = powers[:-1]
        if len(powers) > MAX_LOG_DEPTH:
            raise ValueError(f"iterated log depth capped at {MAX_LOG_DEPTH}, got {len(powers)} factors")
        object.__setattr__(self, "coefficient", coefficient)
        object.__setattr__(self, "n_power", _as_fraction(n_power))
        object.__setattr__(self, "log_powers", powers)
        object.__setattr__(self, "n_start", _N_START_BY_DEPTH[len(powers)])

    # -- evaluation ---------------------------------------------------------

    def eval(self, n):
        """Value at n (scalar or array); n must be >= n_start everywhere."""
        arr = np.asarray(n, dtype=np.float64)
        if np.any(arr < self.n_start):
            raise ValueError(f"index {n!r} below n_start={self.n_start} for {self!r}")
        out = np.full_like(arr, self.coefficient)
        if self.n_power != 0:
            out = out * np.power(arr, float(self.n_power))
        if self.log_powers:
            lg = np.log(arr)
            for j, p in enumerate(self.log_powers):
                if j > 0:
                    lg = np.log(lg)
                if p != 0:
                    out = out * np.power(lg, float(p))
        if arr.ndim == 0:
            return float(out)
        return out

    @property
    def gs_exponent(self) -> Fraction:
        """Slow-variation index: the log factors contribute zero."""
        return self.n_power

    @property
    def exponent_vector(self) -> tuple[Fraction, ...]:
        padded = self.log_powers + (Fraction(0),) * (MAX_LOG_DEPTH - len(self.log_powers))
        return (self.n_power,) + padded

    # -- algebra ------------------------------------------------------------

    def __mul__(self, other: "ParamSequence") -> "ParamSequence":
        return combine([(self, 1), (other, 1)])

    def __truediv__(self, other: "ParamSequence") -> "ParamSequence":
        return combine([(self, 1), (other, -1)])

    def __pow__(self, power: ExponentLike) -> "ParamSequence":
        return combine([(self, power)])

    def limit(self) -> LimitValue:
        """Limit of the sequence itself as n -> infinity, decided exactly."""
        for e in self.exponent_vector:
            if e > 0:
                return LimitValue.infinite()
            if e < 0:
                return LimitValue.zero()
        return LimitValue.finite(self.coefficient)

    def notation(self) -> str:
        return format_sequence(self)

    def __repr__(self) -> str:
        return f"ParamSequence({self.notation()!r})"


N_SEQ = ParamSequence(1.0, 1)
"""The sequence v(n) = n, handy for building rates like sqrt(n * c(n)**2)."""


def combine(terms: Iterable[tuple[ParamSequence, ExponentLike]]) -> ParamSequence:
    """Product of powers of sequences, computed exactly on the exponents."""
    coeff = 1.0
    n_power = Fraction(0)
    logs = [Fraction(0)] * MAX_LOG_DEPTH
    for seq, p in terms:
        p = _as_fraction(p)
        if p == 0:
            continue
        coeff *= seq.coefficient ** float(p)
        n_power += seq.n_power * p
        for j, lp in enumerate(seq.log_powers):
            logs[j] += lp * p
    return ParamSequence(coeff, n_power, logs)


def limit_ratio(
    num: Iterable[tuple[ParamSequence, ExponentLike]],
    den: Iterable[tuple[ParamSequence, ExponentLike]] = (),
) -> LimitValue:
    """Limit of prod num_i**p_i / prod den_j**q_j, exact on the exponent vector."""
    terms = list(num) + [(seq, -_as_fraction(p)) for seq, p in den]
    return combine(terms).limit()


def limit_n_times(seq: ParamSequence) -> LimitValue:
    """Limit of n * v(n); the quantity the step-size shift conditions constrain."""
    return combine([(N_SEQ, 1), (seq, 1)]).limit()


def partial_sum(seq: ParamSequence, n: int, start: int | None = None) -> float:
    """Sum of eval(k) for k from n_start (or ``start``) to n, by direct accumulation."""
    lo = seq.n_start if start is None else int(start)
    if lo < seq.n_start:
        raise ValueError(f"start {lo} below n_start={seq.n_start}")
    n = int(n)
    if n < lo:
        raise ValueError(f"index {n} below start {lo}")
    total = 0.0
    chunk = 2_000_000
    for a in range(lo, n + 1, chunk):
        b = min(n, a + chunk - 1)
        total += float(np.sum(seq.eval(np.arange(a, b + 1, dtype=np.float64))))
    return total


def cesaro_ratio(seq: ParamSequence, n: int) -> float:
    """n * v(n) / sum_{k<=n} v(k); tends to 1 + gs_exponent when that is > -1."""
    return n * seq.eval(n) / partial_sum(seq, n)


def sum_converges(seq: ParamSequence) -> bool:
    """Whether sum_n v(n) is finite, via the iterated-log series criterion.

    The series converges exactly when the exponent vector is lexicographically
    below (-1, -1, -1, -1): a factor 1/n is not enough on its own, each
    successive log factor must dig strictly deeper at the first place the
    vectors differ.
    """
    threshold = (Fraction(-1),) * (MAX_LOG_DEPTH + 1)
    return seq.exponent_vector < threshold


def partial_sum_growth_class(seq: ParamSequence) -> ParamSequence | None:
    """Growth class of sum_{k<=n} v(k) for a divergent series, scale ignored.

    The returned sequence has coefficient 1 and is only meant for sign
    decisions (zero / infinite limits); the true constant is not tracked.
    Returns None when the series converges or the class leaves the
    three-level iterated-log family.
    """
    if sum_converges(seq):
        return None
    e, l1, l2, l3 = seq.exponent_vector
    if e > -1:
        return ParamSequence(1.0, e + 1, (l1, l2, l3))
    if e == -1:
        if l1 > -1:
            return ParamSequence(1.0, 0, (l1 + 1, l2, l3))
        if l1 == -1:
            if l2 > -1:
                return ParamSequence(1.0, 0, (0, l2 + 1, l3))
            if l2 == -1 and l3 > -1:
                return ParamSequence(1.0, 0, (0, 0, l3 + 1))
    return None


def log_partial_sum_growth_class(seq: ParamSequence) -> ParamSequence | None:
    """Growth class of log(sum_{k<=n} v(k)), scale ignored; None if undecidable."""
    cls = partial_sum_growth_class(seq)
    if cls is None:
        return None
    e, l1, l2, _ = cls.exponent_vector
    if e > 0:
        return ParamSequence(1.0, 0, (1,))
    if e == 0:
        if l1 > 0:
            return ParamSequence(1.0, 0, (0, 1))
        if l1 == 0 and l2 > 0:
            return ParamSequence(1.0, 0, (0, 0, 1))
    return None


# -- textual notation -------------------------------------------------------

_FACTOR_NAMES = ("log", "loglog", "log3")
_FACTOR_RE = re.compile(r"^(log|loglog|log3)\^(.+)$")


def _format_exponent(e: Fraction) -> str:
    if e.denominator == 1:
        return str(e.numerator)
    return f"{e.numerator}/{e.denominator}"


def format_sequence(seq: ParamSequence) -> str:
    """Render in the config notation, e.g. '0.5*n^-1*loglog^1'."""
    parts = [repr(seq.coefficient), f"n^{_format_exponent(seq.n_power)}"]
    for name, p in zip(_FACTOR_NAMES, seq.log_powers):
        if p != 0:
            parts.append(f"{name}^{_format_exponent(p)}")
    if len(parts) == 2 and seq.n_power == 0:
        return parts[0]
    return "*".join(parts)


def parse_sequence(text: str) -> ParamSequence:
    """Parse the config notation '<coeff>*n^<e>[*log^<l1>][*loglog^<l2>][*log3^<l3>]'.

    Exponents accept integers, decimals, and fractions like '-1/6'.  A bare
    number denotes a constant sequence.
    """
    tokens = [t.strip() for t in str(text).split("*")]
    if not tokens or not tokens[0]:
        raise ValueError(f"empty sequence notation {text!r}")
    try:
        coefficient = float(Fraction(tokens[0]))
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"bad coefficient in {text!r}: {tokens[0]!r}") from exc
    n_power = Fraction(0)
    logs = [Fraction(0)] * MAX_LOG_DEPTH
    seen_n = False
    for tok in tokens[1:]:
        if tok.startswith("n^"):
            if seen_n:
                raise ValueError(f"repeated n factor in {text!r}")
            n_power = _parse_exponent(tok[2:], text)
            seen_n = True
            continue
        m = _FACTOR_RE.match(tok)
        if m is None:
            raise ValueError(f"unrecognized factor {tok!r} in {text!r}")
        idx = _FACTOR_NAMES.index(m.group(1))
        if logs[idx] != 0:
            raise ValueError(f"repeated {m.group(1)} factor in {text!r}")
        logs[idx] = _parse_exponent(m.group(2), text)
    return ParamSequence(coefficient, n_power, logs)


def _parse_exponent(token: str, context: str) -> Fraction:
    try:
        return Fraction(token)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"bad exponent {token!r} in {context!r}") from exc
