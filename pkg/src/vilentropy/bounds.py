"""Levy means and the explicit entropy-number bound expressions.

Unnamed absolute constants are set to 1 everywhere; reports carry
``constants_normalized = True`` to make that explicit.  All maximizations
over the truncation level N are exhaustive scans over a bracket derived from
the closed-form maximizer, with a check that the optimum is interior.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import mpmath
import numpy as np
from scipy.optimize import brentq

from . import sampling
from .errors import BracketError, InputError, PrecisionError
from .index_lattice import NormMode, ball_volume_coefficient, count_A, count_A_range
from .multiplier import (
    LN2,
    MultiplierSpec,
    dyadic_levels,
    keps_ratio,
    log_abs_lambda,
    log_abs_lambda_array,
    next_level,
    _theta,
)
from .product_system import LayerWindow, ProductSpec, lp_from_values, window_matrix

TAIL_CUTOFF = 1e-15
TAIL_MAX_LEVELS = 2000


# ---------------------------------------------------------------------------
# Levy mean


@dataclass
class LevyEstimate:
    window: tuple
    n: int
    p: float
    samples: int
    seed: int
    estimate: float
    stderr: float  # of the estimate M
    mean_sq: float
    stderr_sq: float  # of the mean of ||x||^2
    grid_points: int

    def as_dict(self) -> dict:
        return asdict(self)


def levy_mean_estimate(
    window: LayerWindow, spec: ProductSpec, p: float, samples: int, seed: int, chunk: int = 4096
) -> LevyEstimate:
    """Monte-Carlo M(||.||_(p)) = (E_sphere ||x||_(p)^2)^{1/2}."""
    if samples < 100:
        raise InputError("need at least 100 samples")
    B = window_matrix(window, spec, p)
    n = B.shape[1]
    if n < 1:
        raise InputError("window is empty")
    sq = np.empty(samples)
    for start in range(0, samples, chunk):
        cnt = min(chunk, samples - start)
        x = sampling.sphere(seed, n, cnt, start)
        sq[start : start + cnt] = lp_from_values(x @ B.T, p, axis=1) ** 2
    mean_sq = float(np.mean(sq))
    se_sq = float(np.std(sq, ddof=1) / math.sqrt(samples))
    est = math.sqrt(mean_sq)
    return LevyEstimate(
        (window.M1, window.M2, window.mode.value), n, p, samples, seed,
        est, se_sq / (2 * est) if est else 0.0, mean_sq, se_sq, B.shape[0],
    )


# ---------------------------------------------------------------------------
# constants


def _gamma_half(d: int):
    """Gamma(d/2) exactly via Gamma(1/2) = sqrt(pi) and x Gamma(x) = Gamma(x+1)."""
    if d % 2 == 0:
        return mpmath.factorial(d // 2 - 1)
    g = mpmath.sqrt(mpmath.pi)
    x = mpmath.mpf(1) / 2
    while x < mpmath.mpf(d) / 2:
        g *= x
        x += 1
    return g


@dataclass(frozen=True)
class AsymptoticConstants:
    d: int
    r: float
    gamma: float
    C: float
    C_star: float


def constants(d: int, r: float, gamma: float, dps: int = 40) -> AsymptoticConstants:
    """The rate constants for the exponential family (Euclid and max norm)."""
    if d < 1 or not r > 0 or not gamma > 0:
        raise InputError("need d >= 1, r > 0, gamma > 0")
    with mpmath.workdps(dps):
        d_, r_, g_ = mpmath.mpf(d), mpmath.mpf(r), mpmath.mpf(gamma)
        ln2 = mpmath.log(2)
        outer = g_ ** (d_ / (d_ + r_))
        inner = (d_ + r_) * 2 ** (d_ - 1) * d_ * _gamma_half(d) * ln2 / (r_ * mpmath.pi ** (d_ / 2))
        c = outer * inner ** (r_ / (d_ + r_))
        c_star = outer * ((d_ + r_) * ln2 / r_) ** (r_ / (d_ + r_))
        return AsymptoticConstants(d, float(r), float(gamma), float(c), float(c_star))


# ---------------------------------------------------------------------------
# layer profiles: n(N) = #A_N and the log-product over nonzero layers


def _profile(spec: MultiplierSpec, d: int, Nmax: int):
    """Arrays over N = 0..Nmax: n_N and sum_{1<=l<=N, lambda(l) != 0} d_l log|lambda(l)|."""
    sizes = np.array(count_A_range(d, spec.mode, Nmax), dtype=np.float64)
    dl = np.diff(sizes, prepend=0.0)
    loglam = log_abs_lambda_array(spec, np.arange(Nmax + 1, dtype=np.float64))
    contrib = np.where(np.isfinite(loglam), dl * loglam, 0.0)
    contrib[0] = 0.0
    return sizes, np.cumsum(contrib)


def _density(spec: MultiplierSpec, d: int) -> float:
    # #A_N ~ density * N^d
    return 1.0 if spec.mode is NormMode.MAX else ball_volume_coefficient(d) / 2**d


def _scan_max(values_fn, top: int, what: str):
    """argmax of values_fn(top) over N=1..top, widening once if on the upper edge."""
    for attempt in range(2):
        vals = values_fn(top)
        i = int(np.argmax(vals[1:])) + 1
        if i < top:
            return i, float(vals[i])
        if attempt == 0:
            top *= 4
    raise BracketError(f"{what}: maximum sits on the bracket edge N={top}")


# ---------------------------------------------------------------------------
# exponential family: A_{N,k}


def _require_exp(spec: MultiplierSpec):
    if spec.family != "exp":
        raise InputError("A_{N,k} is defined for the exponential family only")


def A_N_k(spec: MultiplierSpec, N: int, k: float, d: int) -> float:
    """-(k ln2 + gamma sum_{l<=N} l^r d_l) / #A_N."""
    _require_exp(spec)
    if N < 1:
        raise InputError("N must be >= 1")
    sizes = count_A_range(d, spec.mode, N)
    s = math.fsum((sizes[l] - sizes[l - 1]) * float(l) ** spec.r for l in range(1, N + 1))
    return -(k * LN2 + spec.gamma * s) / sizes[N]


def sup_A_bracket(spec: MultiplierSpec, k: float, d: int) -> int:
    x_k = (d / spec.r) ** (1 / (d + spec.r)) * k ** (1 / (d + spec.r))
    return max(4, math.ceil(4 * x_k))


def sup_A(spec: MultiplierSpec, k: float, d: int) -> tuple[int, float]:
    """(N*, max_N A_{N,k}) by exhaustive scan."""
    _require_exp(spec)

    def values(top):
        sizes = np.array(count_A_range(d, spec.mode, top), dtype=np.float64)
        dl = np.diff(sizes, prepend=0.0)
        l = np.arange(top + 1, dtype=np.float64)
        s = np.cumsum(dl * l**spec.r)
        return -(k * LN2 + spec.gamma * s) / sizes

    return _scan_max(values, sup_A_bracket(spec, k, d), "sup_A")


# ---------------------------------------------------------------------------
# g maximizer


@dataclass
class GMax:
    x: float
    g: float
    C1k: float
    C2k: float
    closed_form: float | None
    boundary: bool


def g_function(x: float, gamma: float, xi: float, d: int, k: float) -> float:
    lx = math.log2(x)
    out = -k / x - gamma / d * lx
    if xi:
        out -= xi * math.log2(lx)
    return out


def g_maximizer(gamma: float, xi: float, d: int, k: float) -> GMax:
    if not gamma > 0 or xi < 0 or k < 1:
        raise InputError("need gamma > 0, xi >= 0, k >= 1")
    C1 = d * LN2**2 / (gamma * LN2 + d * xi)
    C2 = d * LN2 / gamma
    closed = k * d * LN2 / gamma if xi == 0 else None

    def dg(x):
        return k / x - gamma / (d * LN2) - (xi / (math.log(x) * LN2) if xi else 0.0)

    lo, hi = max(2.0, C1 * k), C2 * k
    if hi <= 2.0 or (closed is None and dg(lo) <= 0):
        return GMax(2.0, g_function(2.0, gamma, xi, d, k), C1 * k, C2 * k, closed, True)
    if closed is not None:
        x = closed
        # the root of g' must agree with the closed form
        assert abs(dg(x)) <= 1e-10 * (k / x)
    else:
        x = brentq(dg, lo, hi, xtol=1e-14, rtol=1e-12)
    if not C1 * k * (1 - 1e-12) <= x <= C2 * k * (1 + 1e-12):
        raise AssertionError("stationary point outside [C1 k, C2 k]")
    return GMax(x, g_function(x, gamma, xi, d, k), C1 * k, C2 * k, closed, False)


# ---------------------------------------------------------------------------
# lower bound and chi_k


def _n_star(spec: MultiplierSpec, k: float, d: int) -> int:
    """Rough location of the optimizing N for the 2^{-k/n} prod^{1/n} family."""
    if spec.family == "exp":
        return sup_A_bracket(spec, max(k, 1.0), d) // 4
    gm = g_maximizer(spec.gamma, spec.xi, d, max(k, 1.0))
    return max(2, math.ceil((gm.x / _density(spec, d)) ** (1 / d)))


def volume_factor(n: float, p: float, q: float) -> float:
    """1, (log2 n)^{-1/2} or (log2 n)^{-1} depending on p = inf and q = 1."""
    power = (0.5 if math.isinf(p) else 0.0) + (0.5 if q == 1 else 0.0)
    if power == 0:
        return 1.0
    return math.log2(n) ** (-power)


@dataclass
class BoundReport:
    kind: str
    multiplier: str
    mode: str
    d: int
    k: float
    p: float | None
    q: float | None
    value: float
    N: int
    n: int
    details: dict = field(default_factory=dict)
    constants_normalized: bool = True

    def as_dict(self) -> dict:
        return asdict(self)


def _log_term(spec, d, k_shift, top, log_extra=0.0):
    sizes, logprod = _profile(spec, d, top)
    with np.errstate(divide="ignore", invalid="ignore"):
        return (-k_shift * LN2 + log_extra + logprod) / sizes


def lower_bound_expr(spec: MultiplierSpec, k: float, p: float, q: float, d: int, N: int | None = None) -> BoundReport:
    """max_N 2^{-k/n} (prod_{lambda(l) != 0} |lambda(l)|^{d_l})^{1/n} times V_n."""
    if not (p >= 1 and q >= 1):
        raise InputError("p and q must be >= 1")
    if N is None:
        N, _ = _scan_max(lambda top: _log_term(spec, d, k, top), 4 * _n_star(spec, k, d), "lower bound")
    sizes, logprod = _profile(spec, d, N)
    n = int(round(sizes[N]))
    prod_root = math.exp(logprod[N] / n)
    core = 2.0 ** (-k / n) * prod_root
    vf = volume_factor(n, p, q)
    lam_N = math.exp(log_abs_lambda(spec, N)) if log_abs_lambda(spec, N) > -math.inf else 0.0
    return BoundReport(
        "lower", spec.describe(), spec.mode.value, d, k, p, q, core * vf, int(N), n,
        {"product_term": core, "product_root": prod_root, "V_n": vf, "lambda_N": lam_N},
    )


def chi_k(
    spec: MultiplierSpec,
    k: float,
    q: float,
    d: int,
    volume_mode: str = "surrogate",
    samples: int = 20000,
    seed: int | None = None,
    system: ProductSpec | None = None,
) -> BoundReport:
    """3 sup_N (2^{-k+1} V prod |lambda|^{d_l})^{1/n}.

    ``surrogate`` takes V = 1.  ``montecarlo`` estimates the volume ratio of
    the (2)- and (q)-unit balls for every N with n <= 12 and falls back to
    V = 1 beyond, flagging the truncation.
    """
    if q < 1:
        raise InputError("q must be >= 1")
    top = 4 * _n_star(spec, max(k - 1, 1), d)
    if volume_mode == "surrogate":
        N, logv = _scan_max(lambda t: _log_term(spec, d, k - 1, t), top, "chi_k")
        return BoundReport(
            "chi", spec.describe(), spec.mode.value, d, k, None, q, 3 * math.exp(logv), N,
            count_A(d, spec.mode, N), {"volume_mode": "surrogate", "truncated": False},
        )
    if volume_mode != "montecarlo":
        raise InputError("volume_mode must be surrogate or montecarlo")
    if seed is None:
        raise InputError("montecarlo volume mode needs a seed")
    from .entropy_oracle import BodySpec, mc_volume_ratio

    system = system or ProductSpec.walsh(d)
    ratios: dict[int, float] = {}

    def values(t):
        base = _log_term(spec, d, k - 1, t)
        sizes = count_A_range(d, spec.mode, t)
        for N in range(1, t + 1):
            n = sizes[N]
            if n > 12:
                break
            if N not in ratios:
                if q == 2:
                    ratios[N] = 1.0
                else:
                    w = LayerWindow(-1, N, spec.mode)
                    try:
                        ratios[N] = mc_volume_ratio(
                            BodySpec.window(w, system, 2.0), BodySpec.window(w, system, q), n, samples, seed
                        ).ratio
                    except PrecisionError:
                        ratios[N] = None
            if ratios[N] is None:
                break
            base[N] += math.log(ratios[N]) / n
        return base

    N, logv = _scan_max(values, top, "chi_k")
    n = count_A(d, spec.mode, N)
    estimated = ratios.get(N) is not None
    return BoundReport(
        "chi", spec.describe(), spec.mode.value, d, k, None, q, 3 * math.exp(logv), N, n,
        {
            "volume_mode": "montecarlo",
            "truncated": not estimated,
            "volume_ratios": {str(a): b for a, b in sorted(ratios.items())},
        },
    )


# ---------------------------------------------------------------------------
# upper bound


def default_N(spec: MultiplierSpec, k: float, d: int) -> int:
    if spec.family == "finite":
        return max(2, int(math.floor(k ** (1 / d) + 1e-12)))
    c = constants(d, spec.r, spec.gamma)
    C = c.C_star if spec.mode is NormMode.MAX else c.C
    return max(1, math.ceil((C / spec.gamma) ** (1 / spec.r) * k ** (1 / (d + spec.r))))


def smallest_b(lam_N: float, chi: float) -> int:
    """Smallest b >= 0 with lam_N >= 2^{-b} chi."""
    if lam_N <= 0:
        raise InputError("lambda(N) must be positive")
    b = max(0, math.ceil(math.log2(chi / lam_N)))
    while b > 0 and lam_N >= chi * 2.0 ** (-(b - 1)):
        b -= 1
    while lam_N < chi * 2.0**-b:
        b += 1
    return b


def _tail(spec, d, levels, M, q):
    """sum_{j>M} 2^{-j} theta_j^{1/2-1/q}; returns (value, levels_used, converged, approx)."""
    expo = 0.5 - (0.0 if math.isinf(q) else 1.0 / q)
    if expo <= 0:
        return 2.0 ** (-M), M, True, False
    lv = list(levels.levels)
    th = list(levels.thetas)
    approx = False
    total = 0.0
    j = M + 1
    while j <= M + TAIL_MAX_LEVELS:
        while len(th) < j:
            nxt = next_level(spec, lv[-1])
            t, ap = _theta(d, spec.mode, lv[-1], nxt)
            approx |= ap
            lv.append(nxt)
            th.append(t)
        term = math.exp(-j * LN2 + expo * math.log(th[j - 1]))
        total += term
        if term < TAIL_CUTOFF:
            return total, j, True, approx
        j += 1
    return total, j - 1, False, approx


def upper_bound_expr(
    spec: MultiplierSpec,
    k: float,
    p: float,
    q: float,
    d: int,
    eps: float,
    N: int | None = None,
    chi: float | None = None,
) -> BoundReport:
    """|lambda(N)| (main + tail), valid at index eta + b n."""
    if p < 2:
        raise InputError("upper bound needs p >= 2")
    if q < 1:
        raise InputError("q must be >= 1")
    chi_rep = None
    if chi is None:
        chi_rep = chi_k(spec, k, max(q, 2.0), d)
        chi = chi_rep.value
    N = default_N(spec, k, d) if N is None else int(N)
    lam_N = math.exp(log_abs_lambda(spec, N)) if log_abs_lambda(spec, N) > -math.inf else 0.0
    if lam_N == 0.0:
        raise InputError(f"lambda vanishes at N={N}")
    b = smallest_b(lam_N, chi)
    lev = dyadic_levels(spec, N, 2, d, eps)
    M = lev.M
    n = count_A(d, spec.mode, N)
    eta = int(k) + lev.sum_m
    if math.isinf(q):
        top = max(M, 1)
        main = max(math.sqrt(max(math.log2(lev.thetas[j]), 0.0)) for j in range(top))
    else:
        main = math.sqrt(max(q, 2.0))
    tail, used, converged, approx = _tail(spec, d, lev, M, q)
    value = lam_N * (main + tail)
    details = {
        "b": b,
        "eta": eta,
        "index": eta + b * n,
        "M": M,
        "m": lev.m,
        "levels": [int(x) if x < 2**63 else float(x) for x in lev.levels],
        "theta": [float(t) for t in lev.thetas],
        "main": main,
        "tail": tail,
        "tail_levels": used,
        "tail_converged": converged,
        "theta_approximate": approx or lev.approximate,
        "lambda_N": lam_N,
        "chi": chi,
        "eps": eps,
        "keps_ratio": keps_ratio(lev, eps, 2.0) if M else 0.0,
    }
    return BoundReport("upper", spec.describe(), spec.mode.value, d, k, p, q, value, N, n, details)
