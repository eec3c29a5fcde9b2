"""Brute-force entropy-number brackets for small finite sections.

Every norm here has the form ``||x|| = (sum_i w_i |(T x)_i|^q)^{1/q}`` (or a
max for q = inf): coordinate norms use T = I, window norms ||.||_(p) use the
matrix of basis values on the quadrature grid with w_i = 1/G.  A body is the
unit ball of such a norm, optionally stretched by a diagonal map.

Covering numbers are estimated on a dense, centrally symmetric point cloud;
the cloud's own resolution (how far a body point can be from the cloud) is
measured and added to every upper estimate.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import kernels, sampling
from .errors import InputError, PrecisionError, ResourceError
from .index_lattice import NormMode
from .product_system import LayerWindow, ProductSpec, window_matrix

_COORD = {"euclid": 2.0, "sup": math.inf, "one": 1.0}
_DUAL = {"euclid": "euclid", "sup": "one", "one": "sup"}


@dataclass(frozen=True, eq=False)
class BodySpec:
    """Unit ball of a norm on R^n, optionally mapped by diag(scale)."""

    n: int
    kind: str  # euclid | sup | one | window
    q: float
    T: np.ndarray | None = None  # rows = functionals; None means identity
    scale: np.ndarray | None = None
    label: str = ""

    @classmethod
    def coordinate(cls, kind: str, n: int, scale=None) -> "BodySpec":
        if kind not in _COORD:
            raise InputError(f"body must be one of {sorted(_COORD)}, got {kind!r}")
        sc = None if scale is None else np.asarray(scale, dtype=np.float64)
        return cls(n, kind, _COORD[kind], None, sc, kind)

    @classmethod
    def window(cls, window: LayerWindow, system: ProductSpec, p: float, scale=None) -> "BodySpec":
        B = window_matrix(window, system, p)
        sc = None if scale is None else np.asarray(scale, dtype=np.float64)
        return cls(B.shape[1], "window", float(p), B, sc, f"window({window.M1},{window.M2}) p={p}")

    @classmethod
    def walsh_window(cls, n: int, p: float, scale=None) -> "BodySpec":
        """||.||_(p) on the span of the first n Walsh functions."""
        return cls.window(LayerWindow(-1, n - 1, NormMode.MAX), ProductSpec.walsh(1), p, scale)

    def scaled(self, scale) -> "BodySpec":
        return BodySpec(self.n, self.kind, self.q, self.T, np.asarray(scale, dtype=np.float64), self.label)

    # metric view: rows of ``embed(X)`` with weights ``weights`` under l_q
    @property
    def weights(self) -> np.ndarray:
        if self.T is None:
            return np.ones(self.n)
        return np.full(self.T.shape[0], 1.0 / self.T.shape[0])

    def embed(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        return X if self.T is None else X @ self.T.T

    def norm(self, X: np.ndarray) -> np.ndarray:
        """The unscaled norm of each row."""
        Y = np.abs(self.embed(X))
        if math.isinf(self.q):
            return Y.max(axis=1)
        return (Y**self.q @ self.weights) ** (1.0 / self.q)

    def gauge(self, X: np.ndarray) -> np.ndarray:
        """Minkowski functional of the (scaled) body."""
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if self.scale is not None:
            X = X / self.scale
        return self.norm(X)

    def circumradius(self, seed: int = 0, probes: int = 4096) -> tuple[float, bool]:
        """Euclidean circumradius; exact for coordinate bodies, sampled (x1.05) otherwise."""
        s = np.ones(self.n) if self.scale is None else np.abs(self.scale)
        if self.kind in ("euclid", "one"):
            return float(s.max()), True
        if self.kind == "sup":
            return float(np.linalg.norm(s)), True
        U = sampling.sphere(seed, self.n, probes, stream="probe")
        U = np.vstack([U, np.eye(self.n)])
        return 1.05 * float(np.max(1.0 / self.gauge(U))), False

    def boundary(self, U: np.ndarray) -> np.ndarray:
        return U / self.gauge(U)[:, None]


# ---------------------------------------------------------------------------
# Monte-Carlo volumes


@dataclass
class VolumeRatio:
    ratio: float
    stderr: float
    hits_a: int
    hits_b: int
    samples: int
    radius: float

    def as_dict(self) -> dict:
        return asdict(self)


def mc_volume_ratio(a: BodySpec, b: BodySpec, n: int, samples: int, seed: int) -> VolumeRatio:
    """Vol(a)/Vol(b) from hit counts of uniform points in a common Euclidean ball."""
    if a.n != n or b.n != n:
        raise InputError("body dimensions do not match n")
    if n > 12:
        raise InputError("volume estimation is limited to n <= 12")
    R = max(a.circumradius(seed)[0], b.circumradius(seed)[0])
    X = sampling.ball(seed, n, samples) * R
    ia = a.gauge(X) <= 1.0
    ib = b.gauge(X) <= 1.0
    ha, hb = int(ia.sum()), int(ib.sum())
    if min(ha, hb) < 100:
        raise PrecisionError(f"only {min(ha, hb)} hits in {samples} samples")
    pa, pb = ha / samples, hb / samples
    pab = float(np.mean(ia & ib))
    ratio = ha / hb
    var = ratio**2 * ((pa * (1 - pa)) / pa**2 + (pb * (1 - pb)) / pb**2 - 2 * (pab - pa * pb) / (pa * pb))
    return VolumeRatio(ratio, math.sqrt(max(var, 0.0) / samples), ha, hb, samples, R)


# ---------------------------------------------------------------------------
# point clouds


@dataclass
class Cloud:
    points: np.ndarray  # closed under negation
    resolution: float
    size: int


def build_cloud(body: BodySpec, target: BodySpec, budget: int, seed: int) -> Cloud:
    """Lattice points of the body plus boundary and interior samples."""
    n = body.n
    if n < 1:
        raise InputError("empty body")
    if budget < 16:
        raise ResourceError("point budget below 16")
    R, _ = body.circumradius(seed)
    bnd = body.boundary(sampling.sphere(seed, n, max(budget // 8, 2 * n), stream="cloud"))
    axis = body.boundary(np.eye(n))
    half = np.maximum(np.abs(np.vstack([bnd, axis])).max(axis=0), 1e-300)
    if n == 1:
        grid = np.linspace(-half[0], half[0], max(budget - 1, 2))[:, None]
    else:
        box = float(np.prod(2 * half))
        h = (box / (budget / 2)) ** (1.0 / n)
        axes = [np.linspace(-hj, hj, max(2, int(round(2 * hj / h)) + 1)) for hj in half]
        size = math.prod(len(a) for a in axes)
        if size > 64 * budget:
            raise ResourceError(f"lattice grid of {size} points is too large")
        grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n)
        grid = grid[body.gauge(grid) <= 1.0]
    inner = sampling.ball(seed, n, max(budget // 8, 1), stream="cloud") * R
    inner = inner[body.gauge(inner) <= 1.0]
    pts = np.vstack([grid, bnd, axis, inner, np.zeros((1, n))])
    pts = np.unique(np.vstack([pts, -pts]), axis=0)
    # resolution: farthest fresh body point from the cloud, in the target norm
    probe = body.boundary(sampling.sphere(seed + 1, n, 512, stream="probe"))
    frac = sampling.uniforms(seed + 1, 1, 512, stream="probe")[:, 0] ** (1.0 / n)
    probe = np.vstack([probe, probe * frac[:, None]])
    res = _max_nearest(target, probe, pts)
    return Cloud(pts, res, len(pts))


def _max_nearest(target: BodySpec, probe: np.ndarray, pts: np.ndarray, chunk: int = 64) -> float:
    Yp, Yc = target.embed(probe), target.embed(pts)
    w = target.weights
    worst = 0.0
    for i in range(0, len(Yp), chunk):
        diff = np.abs(Yp[i : i + chunk, None, :] - Yc[None, :, :])
        if math.isinf(target.q):
            d = diff.max(axis=2)
        else:
            d = (diff**target.q @ w) ** (1.0 / target.q)
        worst = max(worst, float(d.min(axis=1).max()))
    return worst


# ---------------------------------------------------------------------------
# covering and packing


@dataclass
class CoverPack:
    eps: float
    net: int
    pack: int
    pack_2eps: int
    greedy: int
    resolution: float
    cloud_size: int


def _fps(target: BodySpec, pts: np.ndarray, stop: float):
    Y = target.embed(pts)
    # start from the point of largest norm so the traversal is deterministic
    start = int(np.argmax(target.norm(pts)))
    _, radii, _ = kernels.farthest_point_order(Y, target.weights, target.q, start=start, stop=stop)
    return radii


def cover_and_pack(
    body: BodySpec, target: BodySpec, eps: float, sample_budget: int = 20000, seed: int = 0, cloud: Cloud | None = None
) -> CoverPack:
    """Net and packing sizes on the cloud at radius eps (n <= 8)."""
    if body.n > 8:
        raise InputError("cover_and_pack is limited to n <= 8")
    if not eps > 0:
        raise InputError("eps must be > 0")
    cloud = cloud or build_cloud(body, target, sample_budget, seed)
    radii = _fps(target, cloud.points, eps)
    pack = int(np.sum(radii > eps))
    pack2 = int(np.sum(radii > 2 * eps))
    greedy = kernels.greedy_cover(target.embed(cloud.points), target.weights, target.q, eps)
    net = min(greedy, pack)
    return CoverPack(eps, net, pack, pack2, greedy, cloud.resolution, cloud.size)


@dataclass
class EntropyBracket:
    k: int
    lower: float
    upper: float
    eps_cloud: float
    resolution: float
    net_at_upper: int
    volume_ratio: float
    degenerate: bool
    n_effective: int

    def as_dict(self) -> dict:
        return asdict(self)


def _cover_count(target, Y, eps, limit):
    return kernels.greedy_cover(Y, target.weights, target.q, eps, limit=limit)


def _smallest_eps(target, Y, lo, hi, allowed, rtol=1e-3):
    """Bisection for the smallest radius at which the greedy cover fits."""
    if _cover_count(target, Y, hi, allowed) > allowed:
        return hi
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        if _cover_count(target, Y, mid, allowed) <= allowed:
            hi = mid
        else:
            lo = mid
    return hi


def entropy_estimate(
    diag,
    p: float,
    q: float,
    k,
    budget: int = 20000,
    seed: int = 0,
    volume_samples: int = 100000,
):
    """Bracket for e_k(diag B_(p), ||.||_(q)) on the span of n Walsh functions.

    ``k`` may be an int or a sequence; for a sequence the upper estimates are
    made nonincreasing by a running minimum.
    """
    ks = [int(k)] if np.isscalar(k) else [int(x) for x in k]
    if any(x < 1 or x > 12 for x in ks):
        raise InputError("k must lie in 1..12")
    diag = np.asarray(diag, dtype=np.float64)
    if diag.ndim != 1 or diag.size < 1 or diag.size > 6:
        raise InputError("diag must have 1..6 entries")
    keep = np.abs(diag) > 0
    degenerate = not keep.all()
    lam = diag[keep]
    n = int(lam.size)
    if n == 0:
        out = [EntropyBracket(x, 0.0, 0.0, 0.0, 0.0, 1, 1.0, True, 0) for x in ks]
        return out[0] if np.isscalar(k) else out
    body_p = BodySpec.walsh_window(n, p)
    target = BodySpec.walsh_window(n, q)
    body = body_p.scaled(lam)
    if p == q:
        vol = 1.0
    else:
        vol = mc_volume_ratio(body_p, target, n, volume_samples, seed).ratio
    cloud = build_cloud(body, target, budget, seed)
    Y = target.embed(cloud.points)
    cap = float(target.norm(cloud.points).max())
    log_det = float(np.sum(np.log(np.abs(lam))))
    # farthest-point radii: after j picks the picks form a radii[j]-net
    _, radii, _ = kernels.farthest_point_order(
        Y, target.weights, target.q, start=int(np.argmax(target.norm(cloud.points))),
        max_picks=2 ** (max(ks) - 1) + 1,
    )
    out = []
    best = math.inf
    for x in sorted(ks):
        lower = 2.0 ** (-(x - 1) / n) * math.exp(log_det / n) * vol ** (1.0 / n)
        allowed = 2 ** (x - 1)
        if allowed < len(radii):
            # allowed + 1 picks are radii[allowed]-separated, so no cover by
            # `allowed` balls of radius below half of that exists
            r = float(radii[allowed])
            eps = _smallest_eps(target, Y, 0.5 * r, r, allowed)
        else:
            eps = 0.0
        upper = min(eps + cloud.resolution, cap + cloud.resolution, best)
        best = upper
        net = _cover_count(target, Y, eps, allowed)
        out.append(EntropyBracket(x, lower, upper, eps, cloud.resolution, net, vol, degenerate, n))
    if np.isscalar(k):
        return out[0]
    order = {x: i for i, x in enumerate(ks)}
    return sorted(out, key=lambda b: order[b.k])


# ---------------------------------------------------------------------------
# Urysohn's inequality


@dataclass
class UrysohnReport:
    body: str
    n: int
    samples: int
    seed: int
    lhs: float
    lhs_stderr: float
    rhs: float
    rhs_stderr: float
    holds: bool
    volume_product: float | None
    advisory: bool

    def as_dict(self) -> dict:
        return asdict(self)


def _dual_norm(K: BodySpec, X: np.ndarray, seed: int) -> tuple[np.ndarray, bool]:
    if K.kind in _COORD and K.scale is None:
        return BodySpec.coordinate(_DUAL[K.kind], K.n).norm(X), False
    # support function by maximizing over sampled boundary points
    Yb = K.boundary(sampling.sphere(seed, K.n, 20000, stream="probe"))
    out = np.empty(len(X))
    for i in range(0, len(X), 256):
        out[i : i + 256] = np.abs(X[i : i + 256] @ Yb.T).max(axis=1)
    return out, True


def urysohn_check(K: BodySpec | str, n: int, samples: int, seed: int) -> UrysohnReport:
    """(Vol K / Vol B_2)^{1/n} <= mean over the sphere of ||x||_{K polar}."""
    if isinstance(K, str):
        K = BodySpec.coordinate(K, n)
    if K.n != n or n > 5:
        raise InputError("urysohn_check needs K of dimension n <= 5")
    eucl = BodySpec.coordinate("euclid", n)
    vr = mc_volume_ratio(K, eucl, n, samples, seed)
    lhs = vr.ratio ** (1.0 / n)
    lhs_se = lhs / (n * vr.ratio) * vr.stderr
    U = sampling.sphere(seed, n, samples, stream="sphere")
    dn, advisory = _dual_norm(K, U, seed)
    rhs = float(dn.mean())
    rhs_se = float(dn.std(ddof=1) / math.sqrt(samples))
    holds = lhs <= rhs + 3.0 * math.hypot(lhs_se, rhs_se)
    vp = None
    if K.kind in _DUAL and K.scale is None:
        dual = BodySpec.coordinate(_DUAL[K.kind], n)
        vd = mc_volume_ratio(dual, eucl, n, samples, seed + 1)
        vp = (vr.ratio * vd.ratio) ** (1.0 / n)
    return UrysohnReport(K.label, n, samples, seed, lhs, lhs_se, rhs, rhs_se, bool(holds), vp, advisory)
