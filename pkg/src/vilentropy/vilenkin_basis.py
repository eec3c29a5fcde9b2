"""Vilenkin characters with their real orderings, plus the trigonometric system.

Points of the group are passed either as :class:`GroupPoint` objects or, for
vectorized work, as integer *point codes* ``t = sum x_k P_k`` (the first
``depth`` coordinates packed in mixed radix).  Phases are accumulated exactly
as integers modulo ``lcm(pattern)`` and only converted to floating point at
the very end, through a table of roots of unity.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Union

import numpy as np

from .config import budget
from .errors import InputError, ResourceError
from .radix_group import (
    GroupPoint,
    ParityClass,
    RadixSequence,
    _raw_digits,
    classify,
    digit_matrix,
    neg,
)

SQRT2 = math.sqrt(2.0)


class OrderingMode(enum.Enum):
    Z = "z"
    ZTILDE = "ztilde"

    @classmethod
    def parse(cls, text: Union[str, "OrderingMode"]) -> "OrderingMode":
        if isinstance(text, cls):
            return text
        try:
            return cls(str(text).lower())
        except ValueError:
            raise InputError(f"ordering must be 'z' or 'ztilde', got {text!r}") from None


@dataclass(frozen=True)
class Vilenkin:
    radix: RadixSequence
    ordering: OrderingMode = OrderingMode.Z

    kind = "vilenkin"

    def evaluate(self, m: int, codes: np.ndarray, depth: int) -> np.ndarray:
        return basis_on_codes(m, self.ordering, codes, depth, self.radix)


@dataclass(frozen=True)
class Trigonometric:
    kind = "trig"

    def evaluate(self, m: int, x: np.ndarray, depth: int | None = None) -> np.ndarray:
        return trig_basis(m, np.asarray(x, dtype=np.float64))


FactorSystem = Union[Vilenkin, Trigonometric]


@lru_cache(maxsize=64)
def _roots(L: int) -> np.ndarray:
    j = np.arange(L, dtype=np.float64)
    return np.exp(2j * np.pi * j / L)


def _phase(n: int, entries, radix: RadixSequence) -> int:
    L = radix.period_lcm
    total = 0
    for k, nk in enumerate(_raw_digits(n, radix)):
        if k < len(entries):
            s = radix.s(k)
            total += (nk * entries[k] % s) * (L // s)
    return total % L


def psi(n: int, x: GroupPoint, radix: RadixSequence) -> complex:
    """Character psi_n at the point x."""
    if n < 0:
        raise InputError("n must be >= 0")
    return complex(_roots(radix.period_lcm)[_phase(n, x.entries, radix)])


def psi_on_codes(n: int, codes: np.ndarray, depth: int, radix: RadixSequence) -> np.ndarray:
    """psi_n at every point code (codes index the first ``depth`` coordinates)."""
    L = radix.period_lcm
    nd = _raw_digits(n, radix)
    D = digit_matrix(codes, radix, depth)
    phase = np.zeros(D.shape[:-1], dtype=np.int64)
    for k, nk in enumerate(nd[:depth]):
        if nk:
            s = radix.s(k)
            phase += (nk * D[..., k] % s) * (L // s)
    return _roots(L)[phase % L]


def z_identity(n: int, mode: OrderingMode | str, radix: RadixSequence) -> tuple[str, int]:
    """Which real function Z_n (or Z~_n) is: ``("X", j)`` or ``("Y", j)``."""
    mode = OrderingMode.parse(mode)
    if classify(n, radix) is not ParityClass.L:
        return ("X", n)
    return ("Y", neg(n, radix) if mode is OrderingMode.Z else n)


def _xy_from_psi(kind: str, cls: ParityClass, values):
    if cls is ParityClass.M:
        return np.real(values) if kind == "X" else np.zeros_like(np.real(values))
    part = np.real(values) if kind == "X" else np.imag(values)
    return SQRT2 * part


def basis_on_codes(n: int, mode, codes: np.ndarray, depth: int, radix: RadixSequence) -> np.ndarray:
    """Real basis function Z_n or Z~_n at every point code."""
    kind, j = z_identity(n, mode, radix)
    return _xy_from_psi(kind, classify(j, radix), psi_on_codes(j, codes, depth, radix))


def real_basis(n: int, mode, x: GroupPoint, radix: RadixSequence) -> float:
    kind, j = z_identity(n, mode, radix)
    return float(_xy_from_psi(kind, classify(j, radix), psi(j, x, radix)))


def X(n: int, x: GroupPoint, radix: RadixSequence) -> float:
    return float(_xy_from_psi("X", classify(n, radix), psi(n, x, radix)))


def Y(n: int, x: GroupPoint, radix: RadixSequence) -> float:
    return float(_xy_from_psi("Y", classify(n, radix), psi(n, x, radix)))


def integrate_cylinder(f: Callable[[np.ndarray], np.ndarray], r: int, radix: RadixSequence):
    """Haar integral of a function of the first ``r`` coordinates.

    ``f`` receives the int64 array of all point codes ``0 .. P_r - 1`` and
    must return one value per code.  The result is the exact average.
    """
    size = radix.P(r)
    limit = budget("integration")
    if size > limit:
        raise ResourceError(f"cylinder depth {r} needs {size} points, budget is {limit}")
    vals = np.asarray(f(np.arange(size, dtype=np.int64)))
    if vals.shape != (size,):
        raise InputError(f"integrand returned shape {vals.shape}, expected ({size},)")
    total = math.fsum(vals.real) if not np.iscomplexobj(vals) else complex(
        math.fsum(vals.real), math.fsum(vals.imag)
    )
    return total / size


def trig_basis(m: int, x):
    """phi_0 = 1, phi_{2k} = sqrt2 cos(kx), phi_{2k-1} = sqrt2 sin(kx)."""
    if m < 0:
        raise InputError("m must be >= 0")
    x = np.asarray(x, dtype=np.float64)
    if m == 0:
        out = np.ones_like(x)
    else:
        k = (m + 1) // 2
        out = SQRT2 * (np.cos(k * x) if m % 2 == 0 else np.sin(k * x))
    return float(out) if out.ndim == 0 else out


def trig_degree(m: int) -> int:
    return (m + 1) // 2


def vilenkin_table(radix: RadixSequence, count: int, start: int = 0) -> list[dict]:
    """Rows n, digits, (-)n, class, Z_n and Z~_n for n in [start, start+count)."""
    rows = []
    for n in range(start, start + count):
        z = z_identity(n, OrderingMode.Z, radix)
        zt = z_identity(n, OrderingMode.ZTILDE, radix)
        rows.append(
            {
                "n": n,
                "digits": tuple(_raw_digits(n, radix)),
                "neg": neg(n, radix),
                "class": classify(n, radix).value,
                "Z": f"{z[0]}_{z[1]}",
                "Ztilde": f"{zt[0]}_{zt[1]}",
            }
        )
    return rows
