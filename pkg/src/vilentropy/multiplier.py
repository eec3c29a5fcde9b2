"""Multiplier sequences lambda(|k|) and the dyadic level construction.

Two families are supported::

    finite:  lambda(t) = t^-gamma (log2 t)^-xi   for t > 1, 0 on [0, 1]
    exp:     lambda(t) = exp(-gamma t^r)

Everything internal works with ``log|lambda|`` so that very small values
(exp family at large t) and very large level indices stay representable.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np

from .config import budget
from .errors import InputError, ResourceError
from .index_lattice import (
    MultiIndex,
    NormMode,
    ball_volume_coefficient,
    count_A,
)
from .product_system import CoefficientVector, LayerWindow

LN2 = math.log(2.0)


@dataclass(frozen=True)
class MultiplierSpec:
    family: str  # "finite" | "exp"
    gamma: float
    xi: float = 0.0
    r: float = 1.0
    mode: NormMode = NormMode.EUCLID

    def __post_init__(self):
        if self.family not in ("finite", "exp"):
            raise InputError(f"unknown multiplier family {self.family!r}")
        if not self.gamma > 0:
            raise InputError("gamma must be > 0")
        if self.family == "finite" and self.xi < 0:
            raise InputError("xi must be >= 0")
        if self.family == "exp" and not self.r > 0:
            raise InputError("r must be > 0")
        object.__setattr__(self, "mode", NormMode.parse(self.mode))

    @classmethod
    def finite(cls, gamma: float, xi: float = 0.0, mode="euclid") -> "MultiplierSpec":
        return cls("finite", float(gamma), xi=float(xi), mode=mode)

    @classmethod
    def exponential(cls, gamma: float, r: float, mode="euclid") -> "MultiplierSpec":
        return cls("exp", float(gamma), r=float(r), mode=mode)

    @classmethod
    def parse(cls, text: str, mode="euclid") -> "MultiplierSpec":
        """``finite:gamma=G,xi=X`` or ``exp:gamma=G,r=R``."""
        m = re.fullmatch(r"\s*(finite|exp)\s*:\s*(.*)", text)
        if not m:
            raise InputError(f"bad multiplier spec {text!r}")
        params = {}
        for item in filter(None, (s.strip() for s in m.group(2).split(","))):
            key, _, val = item.partition("=")
            try:
                params[key.strip()] = float(val)
            except ValueError:
                raise InputError(f"bad multiplier parameter {item!r}") from None
        allowed = {"finite": {"gamma", "xi"}, "exp": {"gamma", "r"}}[m.group(1)]
        if not set(params) <= allowed or "gamma" not in params:
            raise InputError(f"multiplier {m.group(1)} takes {sorted(allowed)}, got {sorted(params)}")
        if m.group(1) == "finite":
            return cls.finite(params["gamma"], params.get("xi", 0.0), mode)
        if "r" not in params:
            raise InputError("exp multiplier needs r")
        return cls.exponential(params["gamma"], params["r"], mode)

    def describe(self) -> str:
        if self.family == "finite":
            return f"finite:gamma={self.gamma!r},xi={self.xi!r}"
        return f"exp:gamma={self.gamma!r},r={self.r!r}"

    def with_mode(self, mode) -> "MultiplierSpec":
        return MultiplierSpec(self.family, self.gamma, self.xi, self.r, NormMode.parse(mode))


def log_abs_lambda(spec: MultiplierSpec, t) -> float:
    """log|lambda(t)|; ``-inf`` where lambda vanishes.  Accepts huge ints."""
    if spec.family == "exp":
        return -spec.gamma * float(t) ** spec.r if t < 1e300 else -math.inf
    if t <= 1:
        return -math.inf
    lt = math.log(t)
    out = -spec.gamma * lt
    if spec.xi:
        out -= spec.xi * math.log(lt / LN2)
    return out


def log_abs_lambda_array(spec: MultiplierSpec, t: np.ndarray) -> np.ndarray:
    t = np.asarray(t, dtype=np.float64)
    if spec.family == "exp":
        return -spec.gamma * t**spec.r
    out = np.full(t.shape, -np.inf)
    pos = t > 1
    lt = np.log(t[pos])
    vals = -spec.gamma * lt
    if spec.xi:
        vals = vals - spec.xi * np.log(lt / LN2)
    out[pos] = vals
    return out


def lambda_value(spec: MultiplierSpec, t: float) -> float:
    if t < 0:
        raise InputError("t must be >= 0")
    if spec.family == "exp":
        return math.exp(-spec.gamma * t**spec.r)
    if t <= 1:
        return 0.0
    val = t ** (-spec.gamma)
    if spec.xi:
        val *= math.log2(t) ** (-spec.xi)
    return val


def lambda_of_index(spec: MultiplierSpec, k: MultiIndex) -> float:
    return lambda_value(spec, k.norm_in(spec.mode))


def apply_multiplier(spec: MultiplierSpec, f: CoefficientVector) -> CoefficientVector:
    return CoefficientVector({k: lambda_of_index(spec, k) * v for k, v in f.terms.items()}, f.d)


def diagonal_sequence(spec: MultiplierSpec, window: LayerWindow, d: int) -> np.ndarray:
    """lambda values in the canonical order of the window (spec's norm mode wins)."""
    w = LayerWindow(window.M1, window.M2, spec.mode)
    return np.array([lambda_of_index(spec, k) for k in w.indices(d)], dtype=np.float64)


# ---------------------------------------------------------------------------
# dyadic levels


def _theta(d: int, mode: NormMode, a: int, b: int) -> tuple[int | float, bool]:
    """#A_b - #A_a, exactly when affordable, else from the volume main term."""
    try:
        return count_A(d, mode, b) - count_A(d, mode, a), False
    except ResourceError:
        F = ball_volume_coefficient(d) / 2**d
        return F * (float(b) ** d - float(a) ** d), True


def next_level(spec: MultiplierSpec, Nk: int) -> int:
    """min{l > Nk : 2|lambda(l)| <= |lambda(Nk)|} by doubling then bisection."""
    target = log_abs_lambda(spec, Nk) - LN2
    if target == -math.inf:
        raise InputError(f"lambda vanishes at N={Nk}")
    limit = budget("scan")
    evals = 0
    step = 1
    while log_abs_lambda(spec, Nk + step) > target:
        step *= 2
        evals += 1
        if evals > limit or step.bit_length() > 4096:
            raise ResourceError(f"lambda does not halve above N={Nk} within the scan budget")
    lo, hi = Nk + step // 2, Nk + step  # predicate false at lo (or lo == Nk), true at hi
    if step == 1:
        return hi
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if log_abs_lambda(spec, mid) <= target:
            hi = mid
        else:
            lo = mid
    return hi


@dataclass
class DyadicLevels:
    N: int
    levels: list  # N_1 .. N_{count}
    thetas: list  # theta_{N_k, N_{k+1}}, k = 1 .. count-1
    eps: float | None
    M: int | None
    m: list = field(default_factory=list)  # m_1 .. m_M
    approximate: bool = False

    @property
    def theta1(self):
        return self.thetas[0] if self.thetas else None

    @property
    def sum_m(self) -> int:
        return sum(self.m)


def dyadic_levels(spec: MultiplierSpec, N: int, count: int, d: int, eps: float | None = None) -> DyadicLevels:
    """N_1 = N and ``count - 1`` further levels.

    With ``eps`` given, ``count`` is raised if needed so that theta_1 .. theta_M
    are all available.
    """
    if count < 1:
        raise InputError("count must be >= 1")
    if log_abs_lambda(spec, N) == -math.inf:
        raise InputError(f"|lambda(N)| must be > 0, got N={N}")
    mode = spec.mode
    levels = [int(N)]
    thetas: list = []
    approx = False

    def extend(upto: int):
        nonlocal approx
        while len(levels) < upto:
            nxt = next_level(spec, levels[-1])
            th, ap = _theta(d, mode, levels[-1], nxt)
            approx |= ap
            levels.append(nxt)
            thetas.append(th)

    extend(max(count, 2 if eps is not None else 1))
    M = None
    m: list = []
    if eps is not None:
        if not eps > 0:
            raise InputError("eps must be > 0")
        t1 = thetas[0]
        M = int(math.floor(math.log2(t1) / eps)) if t1 >= 1 else 0
        extend(M + 1)
        m = [int(math.floor(2.0 ** (-eps * k) * t1)) + 1 for k in range(1, M + 1)]
    return DyadicLevels(int(N), levels, thetas, eps, M, m, approx)


@dataclass
class KEpsReport:
    eps: float
    p: float
    d: int
    rows: list  # (N, theta1, M, ratio, C_eps)
    sup_ratio: float
    trend_bounded: bool
    approximate: bool

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def keps_ratio(levels: DyadicLevels, eps: float, p: float) -> float:
    t1 = float(levels.thetas[0])
    total = 0.0
    for k in range(1, (levels.M or 0) + 1):
        lt = math.log(levels.thetas[k - 1])
        total += math.exp(-k * (1 - eps / 2) * LN2 + lt / p - 0.5 * math.log(t1))
    return total / t1 ** (1.0 / p - 0.5)


def K_eps_check(spec: MultiplierSpec, eps: float, p: float, d: int, N_range) -> KEpsReport:
    """Evidence (never proof) that the sequence lies in K_{eps,p}.

    For each base N the ratio of the defining sum to theta_1^{1/p-1/2} is
    recorded.  The trend counts as bounded when the largest ratio over the
    upper half of the range exceeds the largest over the lower half by less
    than 25%.
    """
    if not 1 <= p <= 2:
        raise InputError("p must lie in [1, 2]")
    if not eps > 0:
        raise InputError("eps must be > 0")
    rows = []
    approx = False
    for N in N_range:
        if log_abs_lambda(spec, N) == -math.inf:
            continue
        lev = dyadic_levels(spec, int(N), 2, d, eps)
        approx |= lev.approximate
        ratio = keps_ratio(lev, eps, p) if lev.M else 0.0
        c_eps = lev.sum_m / float(lev.thetas[0])
        rows.append((int(N), lev.thetas[0], lev.M, ratio, c_eps))
    if not rows:
        raise InputError("no admissible N in range")
    ratios = [r[3] for r in rows]
    half = len(ratios) // 2
    lower = max(ratios[: max(half, 1)])
    upper = max(ratios[half:]) if half else lower
    bounded = bool(np.all(np.isfinite(ratios)) and upper <= 1.25 * lower + 1e-12)
    return KEpsReport(eps, p, d, rows, max(ratios), bounded, approx)
