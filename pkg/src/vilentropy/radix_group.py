"""Mixed-radix digit arithmetic on the Vilenkin group.

Indices n >= 0 are expanded as n = sum n_k P_k with 0 <= n_k < s_k and
P_k = s_0 ... s_{k-1}.  Digit-wise modular addition/subtraction turns the
non-negative integers into a group isomorphic to the character group of
G = prod Z_{s_k}.  All arithmetic is on Python integers, so nothing overflows.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence

import numpy as np

from .errors import InputError

__all__ = [
    "RadixSequence",
    "Digits",
    "GroupPoint",
    "ParityClass",
    "parse_radix",
    "digits_of",
    "value_of",
    "oplus",
    "ominus",
    "neg",
    "classify",
    "digit_matrix",
]


@dataclass(frozen=True)
class RadixSequence:
    """Periodic generating sequence s_0, s_1, ... of the group."""

    pattern: tuple[int, ...]
    _prods: list = field(default_factory=lambda: [1], init=False, repr=False, compare=False)

    def __post_init__(self):
        pattern = tuple(int(s) for s in self.pattern)
        if not pattern:
            raise InputError("radix pattern must be nonempty")
        if any(s < 2 for s in pattern):
            raise InputError(f"radix entries must be >= 2, got {pattern}")
        object.__setattr__(self, "pattern", pattern)

    @classmethod
    def constant(cls, s: int) -> "RadixSequence":
        return cls((s,))

    def s(self, k: int) -> int:
        return self.pattern[k % len(self.pattern)]

    def P(self, k: int) -> int:
        """Partial product P_k = s_0 ... s_{k-1}; P_0 = 1."""
        prods = self._prods
        while len(prods) <= k:
            prods.append(prods[-1] * self.s(len(prods) - 1))
        return prods[k]

    def depth_for(self, n: int) -> int:
        """Smallest r with P_r > n."""
        r = 0
        while self.P(r) <= n:
            r += 1
        return r

    @property
    def period_lcm(self) -> int:
        return lcm(*self.pattern)

    def __str__(self) -> str:
        return ",".join(map(str, self.pattern))


def parse_radix(text: str | int | Sequence[int] | RadixSequence) -> RadixSequence:
    """Accept a string like ``"2,3"``, an int, a sequence of ints or a RadixSequence."""
    if isinstance(text, RadixSequence):
        return text
    if isinstance(text, int):
        return RadixSequence((text,))
    if isinstance(text, str):
        try:
            parts = tuple(int(tok) for tok in text.replace(" ", "").split(",") if tok)
        except ValueError as exc:
            raise InputError(f"bad radix pattern {text!r}") from exc
        return RadixSequence(parts)
    return RadixSequence(tuple(text))


@dataclass(frozen=True)
class Digits:
    """Canonical digit expansion (n_0, ..., n_r); empty for zero."""

    entries: tuple[int, ...]
    radix: RadixSequence

    def __post_init__(self):
        for k, nk in enumerate(self.entries):
            if not 0 <= nk < self.radix.s(k):
                raise InputError(f"digit {nk} out of range at position {k}")
        if self.entries and self.entries[-1] == 0:
            raise InputError("non-canonical digits: trailing zero")

    @property
    def value(self) -> int:
        return value_of(self.entries, self.radix)

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, k: int) -> int:
        return self.entries[k] if k < len(self.entries) else 0


class ParityClass(enum.Enum):
    K = "K"  # n < (-)n
    L = "L"  # n > (-)n
    M = "M"  # n = (-)n, psi_n real-valued

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class GroupPoint:
    """A point of G given by finitely many coordinates (the rest are zero)."""

    entries: tuple[int, ...]
    radix: RadixSequence

    def __post_init__(self):
        entries = tuple(int(x) for x in self.entries)
        for k, xk in enumerate(entries):
            if not 0 <= xk < self.radix.s(k):
                raise InputError(f"coordinate {xk} out of range at position {k}")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def from_code(cls, code: int, radix: RadixSequence, depth: int | None = None) -> "GroupPoint":
        """Point whose first coordinates are the mixed-radix digits of ``code``."""
        entries = list(_raw_digits(code, radix))
        if depth is not None:
            entries += [0] * (depth - len(entries))
        return cls(tuple(entries), radix)

    @property
    def code(self) -> int:
        return value_of(self.entries, self.radix)

    def real_image(self) -> Fraction:
        """|x| = sum x_k / P_{k+1} in [0, 1); display only."""
        return sum((Fraction(xk, self.radix.P(k + 1)) for k, xk in enumerate(self.entries)), Fraction(0))


def _raw_digits(n: int, radix: RadixSequence) -> list[int]:
    out = []
    k = 0
    while n:
        n, nk = divmod(n, radix.s(k))
        out.append(nk)
        k += 1
    return out


def digits_of(n: int, radix: RadixSequence) -> Digits:
    if n < 0:
        raise InputError(f"n must be >= 0, got {n}")
    return Digits(tuple(_raw_digits(int(n), radix)), radix)


def value_of(entries: Iterable[int], radix: RadixSequence) -> int:
    return sum(nk * radix.P(k) for k, nk in enumerate(entries))


def _digitwise(n: int, m: int, radix: RadixSequence, sign: int) -> int:
    if n < 0 or m < 0:
        raise InputError("operands must be non-negative")
    total, k, P = 0, 0, 1
    while n or m:
        s = radix.s(k)
        n, nk = divmod(n, s)
        m, mk = divmod(m, s)
        total += ((nk + sign * mk) % s) * P
        P *= s
        k += 1
    return total


def oplus(n: int, m: int, radix: RadixSequence) -> int:
    """Digit-wise sum modulo s_k."""
    return _digitwise(n, m, radix, 1)


def ominus(n: int, m: int, radix: RadixSequence) -> int:
    """Digit-wise difference modulo s_k."""
    return _digitwise(n, m, radix, -1)


def neg(n: int, radix: RadixSequence) -> int:
    return _digitwise(0, n, radix, -1)


def classify(n: int, radix: RadixSequence, method: str = "direct") -> ParityClass:
    """K/L/M class of ``n``.

    ``direct`` compares n with its group inverse.  ``fast`` peels leading
    digits.  A leading digit below s_r/2 gives K and one above gives L; a
    digit of exactly s_r/2 defers to the number with that digit removed.
    """
    if n < 0:
        raise InputError(f"n must be >= 0, got {n}")
    if method == "direct":
        other = neg(n, radix)
        if n < other:
            return ParityClass.K
        if n > other:
            return ParityClass.L
        return ParityClass.M
    if method != "fast":
        raise InputError(f"unknown method {method!r}")
    digits = _raw_digits(n, radix)
    for r in range(len(digits) - 1, -1, -1):
        twice = 2 * digits[r]
        s = radix.s(r)
        if twice == 0:
            continue
        if twice < s:
            return ParityClass.K
        if twice > s:
            return ParityClass.L
    return ParityClass.M


def digit_matrix(codes: np.ndarray, radix: RadixSequence, depth: int) -> np.ndarray:
    """Digits of each code as an int64 array of shape (len(codes), depth)."""
    codes = np.asarray(codes, dtype=np.int64)
    out = np.empty(codes.shape + (depth,), dtype=np.int64)
    rest = codes.copy()
    for k in range(depth):
        s = radix.s(k)
        out[..., k] = rest % s
        rest //= s
    return out
