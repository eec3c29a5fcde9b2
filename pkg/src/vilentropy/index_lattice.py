"""Multi-indices with their layers and integer-point counts.

A_l = {k in N_0^d : |k| <= l}, the l-th layer is A_l minus A_{l-1} and
d_l its size.  Norm comparisons are exact integer comparisons of squared
norms.  In max-norm mode everything has a closed form.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from . import kernels
from .config import budget
from .errors import InputError, ResourceError


class NormMode(enum.Enum):
    EUCLID = "euclid"
    MAX = "max"

    @classmethod
    def parse(cls, text) -> "NormMode":
        if isinstance(text, cls):
            return text
        try:
            return cls(str(text).lower())
        except ValueError:
            raise InputError(f"norm mode must be 'euclid' or 'max', got {text!r}") from None


@dataclass(frozen=True, order=False)
class MultiIndex:
    components: tuple[int, ...]
    norm2: int = field(init=False, compare=False)
    max_norm: int = field(init=False, compare=False)

    def __post_init__(self):
        comps = tuple(int(c) for c in self.components)
        if not comps or any(c < 0 for c in comps):
            raise InputError(f"multi-index needs nonnegative components, got {self.components}")
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "norm2", sum(c * c for c in comps))
        object.__setattr__(self, "max_norm", max(comps))

    @property
    def d(self) -> int:
        return len(self.components)

    @property
    def norm(self) -> float:
        return math.sqrt(self.norm2)

    def norm_in(self, mode: NormMode) -> float:
        return float(self.max_norm) if mode is NormMode.MAX else self.norm

    def layer(self, mode: NormMode) -> int:
        """Smallest l with the index in A_l."""
        if mode is NormMode.MAX:
            return self.max_norm
        r = math.isqrt(self.norm2)
        return r if r * r == self.norm2 else r + 1

    def key(self) -> str:
        return ",".join(map(str, self.components))

    @classmethod
    def parse(cls, text: str) -> "MultiIndex":
        try:
            return cls(tuple(int(t) for t in text.split(",")))
        except ValueError:
            raise InputError(f"bad multi-index {text!r}") from None

    def __iter__(self):
        return iter(self.components)

    def __len__(self):
        return len(self.components)


# ---------------------------------------------------------------------------
# counting


def ball_volume_coefficient(d: int) -> float:
    """Volume of the Euclidean unit ball, 2 pi^{d/2} / (d Gamma(d/2))."""
    return 2.0 * math.pi ** (d / 2) / (d * math.gamma(d / 2))


def _theta_exponent(d: int) -> float:
    if d == 1:
        return 0.0
    if d == 2:
        return 132 / 208
    if d == 3:
        return 21 / 16
    return float(d - 2)


@dataclass(frozen=True)
class BallCount:
    d: int
    R: float
    count: int
    main_term: float
    error: float
    theta: float


def ball_count(d: int, R: float) -> BallCount:
    """Exact number of integer points z in R^d with |z| <= R."""
    if d < 1:
        raise InputError("d must be >= 1")
    if R < 0:
        raise InputError("R must be >= 0")
    fr = Fraction(R)
    bound = math.floor(fr * fr)
    side = 2 * math.isqrt(bound) + 1
    limit = budget("ball")
    if side**d > limit:
        raise ResourceError(f"ball count scans {side}^{d} points, budget is {limit}")
    count = kernels.ball_count_int(d, bound)
    main = ball_volume_coefficient(d) * float(R) ** d
    return BallCount(d, float(R), count, main, count - main, _theta_exponent(d))


def max_ball_count(d: int, l: int) -> int:
    """Integer points with max-norm at most l: (2l+1)^d."""
    return (2 * l + 1) ** d


@lru_cache(maxsize=32)
def _orthant_cached(d: int, L: int) -> np.ndarray:
    steps = L * L // 2 if d == 2 else d * (L + 1) ** 3
    limit = budget("lattice")
    if d > 1 and steps > limit:
        raise ResourceError(f"layer counts for d={d} up to l={L} need ~{steps} steps, budget is {limit}")
    out = kernels.orthant_counts(d, L)
    out.setflags(write=False)
    return out


def _orthant(d: int, L: int) -> np.ndarray:
    # round up so repeated queries with growing L reuse one table
    size = 16
    while size < L:
        size *= 2
    if d > 1 and size > L:
        try:
            return _orthant_cached(d, size)[: L + 1]
        except ResourceError:
            pass
    return _orthant_cached(d, L)[: L + 1]


def count_A(d: int, mode, l: int) -> int:
    """#A_l (0 for l < 0)."""
    mode = NormMode.parse(mode)
    if l < 0:
        return 0
    if mode is NormMode.MAX or d == 1:
        return (l + 1) ** d
    return int(_orthant(d, l)[l])


def count_A_range(d: int, mode, L: int) -> list[int]:
    """[#A_0, ..., #A_L] as Python ints."""
    mode = NormMode.parse(mode)
    if mode is NormMode.MAX or d == 1:
        return [(l + 1) ** d for l in range(L + 1)]
    return [int(v) for v in _orthant(d, L)]


def layer_dim(d: int, mode, l: int) -> int:
    return count_A(d, mode, l) - count_A(d, mode, l - 1)


@dataclass(frozen=True)
class LayerCounts:
    d: int
    mode: NormMode
    sizes: tuple[int, ...]  # #A_l
    dims: tuple[int, ...]  # d_l

    @property
    def l_max(self) -> int:
        return len(self.sizes) - 1

    def dim_T(self, N: int) -> int:
        return self.sizes[N]

    def rows(self) -> list[dict]:
        return [
            {"l": l, "A_l": self.sizes[l], "d_l": self.dims[l], "dim_T": self.sizes[l]}
            for l in range(len(self.sizes))
        ]


def layer_table(d: int, mode, l_max: int) -> LayerCounts:
    mode = NormMode.parse(mode)
    if d < 1 or l_max < 0:
        raise InputError("need d >= 1 and l_max >= 0")
    sizes = count_A_range(d, mode, l_max)
    dims = [sizes[0]] + [sizes[l] - sizes[l - 1] for l in range(1, l_max + 1)]
    return LayerCounts(d, mode, tuple(sizes), tuple(dims))


# ---------------------------------------------------------------------------
# enumeration


def _euclid_layer(d: int, lo2: int, hi2: int) -> Iterator[tuple[int, ...]]:
    # all k in N_0^d with lo2 < |k|^2 <= hi2, lexicographic order
    prefix: list[int] = []

    def rec(rem_dims: int, used: int):
        if rem_dims == 0:
            if used > lo2:
                yield tuple(prefix)
            return
        top = math.isqrt(hi2 - used)
        for c in range(top + 1):
            prefix.append(c)
            yield from rec(rem_dims - 1, used + c * c)
            prefix.pop()

    yield from rec(d, 0)


def layer_enumerate(d: int, mode, l: int) -> list[MultiIndex]:
    """Members of layer l, by increasing norm, ties in lexicographic order."""
    mode = NormMode.parse(mode)
    if l < 0:
        return []
    size = layer_dim(d, mode, l)
    limit = budget("enum")
    if size > limit:
        raise ResourceError(f"layer {l} has {size} members, budget is {limit}")
    if mode is NormMode.MAX:
        grid = np.indices((l + 1,) * d).reshape(d, -1).T
        members = [tuple(int(c) for c in row) for row in grid if row.max() == l]
        return [MultiIndex(m) for m in members]
    lo2 = (l - 1) ** 2 if l > 0 else -1
    members = list(_euclid_layer(d, lo2, l * l))
    members.sort(key=lambda m: (sum(c * c for c in m), m))
    return [MultiIndex(m) for m in members]


def window_indices(d: int, mode, M1: int, M2: int) -> list[MultiIndex]:
    """Canonical ordering of the window: layers M1+1 .. M2, layer-major."""
    if M1 < -1 or M2 < M1:
        raise InputError(f"window needs -1 <= M1 <= M2, got ({M1}, {M2})")
    out: list[MultiIndex] = []
    for l in range(M1 + 1, M2 + 1):
        out.extend(layer_enumerate(d, mode, l))
    return out


def window_dim(d: int, mode, M1: int, M2: int) -> int:
    return count_A(d, mode, M2) - count_A(d, mode, M1)


# ---------------------------------------------------------------------------
# checks of the layer-size estimates


def layer_constant_E(d: int) -> float:
    """Leading coefficient of d_l: 2^{1-d} pi^{d/2} / Gamma(d/2)."""
    return 2.0 ** (1 - d) * math.pi ** (d / 2) / math.gamma(d / 2)


@dataclass
class PropositionReport:
    d: int
    mode: NormMode
    l_max: int
    theta: float
    E: float
    F: float
    C_prime: float
    C: float
    lower_dim_holds: bool
    ratio_min: float
    ratio_max: float
    ok: bool

    def as_dict(self) -> dict:
        out = dict(self.__dict__)
        out["mode"] = self.mode.value
        return out


def proposition_check(d: int, l_max: int, mode="euclid", ratio_from: int = 20) -> PropositionReport:
    """Fit the smallest constants for which the layer estimates hold on 1..l_max.

    Euclidean mode: |d_l - E l^{d-1}| <= C' l^theta and
    F N^d <= dim T_N <= F N^d + C N^{d-1}.  Max mode uses the exact
    leading terms d l^{d-1} and N^d with exponent d-2.
    """
    mode = NormMode.parse(mode)
    if d < 2:
        raise InputError("proposition check needs d >= 2")
    table = layer_table(d, mode, l_max)
    if mode is NormMode.MAX:
        E, F, theta = float(d), 1.0, float(d - 2)
    else:
        E, theta = layer_constant_E(d), _theta_exponent(d)
        F = E / d
    l = np.arange(1, l_max + 1, dtype=np.float64)
    dl = np.array(table.dims[1:], dtype=np.float64)
    dim = np.array(table.sizes[1:], dtype=np.float64)
    lead = E * l ** (d - 1)
    c_prime = float(np.max(np.abs(dl - lead) / l**theta)) if l_max else 0.0
    excess = dim - F * l**d
    C = float(np.max(excess / l ** (d - 1))) if l_max else 0.0
    lower = bool(np.all(excess >= -1e-9 * dim))
    sel = l >= ratio_from
    ratios = dl[sel] / lead[sel] if sel.any() else np.array([np.nan])
    ok = bool(np.isfinite(c_prime) and np.isfinite(C) and lower)
    return PropositionReport(
        d, mode, l_max, theta, E, F, c_prime, C, lower,
        float(np.min(ratios)), float(np.max(ratios)), ok,
    )
