"""Tensor-product orthonormal systems and norms of finite expansions.

A :class:`ProductSpec` is a tuple of factor systems (Vilenkin or
trigonometric).  Functions in the span are stored as
:class:`CoefficientVector` maps ``MultiIndex -> float``.  L^p norms are
computed on tensor grids: exact digit grids on Vilenkin axes, uniform
angle grids on trigonometric axes.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .config import budget
from .errors import InputError, ResourceError
from .index_lattice import MultiIndex, NormMode, window_dim, window_indices
from .radix_group import GroupPoint, RadixSequence, parse_radix
from .vilenkin_basis import (
    FactorSystem,
    OrderingMode,
    Trigonometric,
    Vilenkin,
    trig_basis,
    trig_degree,
)


@dataclass(frozen=True)
class ProductSpec:
    factors: tuple

    def __post_init__(self):
        if len(self.factors) < 1:
            raise InputError("a product system needs at least one factor")
        object.__setattr__(self, "factors", tuple(self.factors))

    @property
    def d(self) -> int:
        return len(self.factors)

    @property
    def sup_bound(self) -> float:
        return math.sqrt(2.0) ** self.d

    @classmethod
    def walsh(cls, d: int = 1) -> "ProductSpec":
        return cls(tuple(Vilenkin(RadixSequence((2,))) for _ in range(d)))

    @classmethod
    def parse(cls, text: str) -> "ProductSpec":
        """``"walsh"``, ``"trig"``, ``"vilenkin:3"``, ``"vilenkin:2,3:ztilde"``; joined by ``*``."""
        factors = []
        for tok in text.split("*"):
            tok = tok.strip().lower()
            if tok == "walsh":
                factors.append(Vilenkin(RadixSequence((2,))))
            elif tok == "trig":
                factors.append(Trigonometric())
            elif tok.startswith("vilenkin:"):
                parts = tok.split(":")
                order = OrderingMode.parse(parts[2]) if len(parts) > 2 else OrderingMode.Z
                factors.append(Vilenkin(parse_radix(parts[1]), order))
            else:
                raise InputError(f"unknown factor system {tok!r}")
        return cls(tuple(factors))


def eval_product_basis(m: MultiIndex | Sequence[int], x: Sequence, spec: ProductSpec) -> float:
    """phi_m(x): GroupPoint coordinates for Vilenkin factors, reals for trig ones."""
    m = m if isinstance(m, MultiIndex) else MultiIndex(tuple(m))
    if len(m) != spec.d or len(x) != spec.d:
        raise InputError(f"expected {spec.d} coordinates")
    value = 1.0
    for mj, xj, fac in zip(m, x, spec.factors):
        if isinstance(fac, Vilenkin):
            if not isinstance(xj, GroupPoint):
                raise InputError("Vilenkin factor needs a GroupPoint coordinate")
            depth = max(len(xj.entries), 1)
            value *= float(fac.evaluate(mj, np.array([xj.code]), depth)[0])
        else:
            if isinstance(xj, GroupPoint):
                raise InputError("trigonometric factor needs a real coordinate")
            value *= float(trig_basis(mj, float(xj)))
    return value


# ---------------------------------------------------------------------------
# coefficient vectors


class CoefficientVector:
    """Finite expansion sum a_k phi_k; zero coefficients are dropped."""

    __slots__ = ("terms", "d")

    def __init__(self, terms: Mapping | Iterable = (), d: int | None = None):
        items = terms.items() if isinstance(terms, Mapping) else terms
        clean: dict[MultiIndex, float] = {}
        for k, v in items:
            k = k if isinstance(k, MultiIndex) else (
                MultiIndex.parse(k) if isinstance(k, str) else MultiIndex(tuple(k))
            )
            if d is None:
                d = k.d
            elif k.d != d:
                raise InputError("mixed dimensions in coefficient vector")
            v = float(v)
            if v != 0.0:
                clean[k] = clean.get(k, 0.0) + v
        self.terms = clean
        self.d = d

    def __getitem__(self, k) -> float:
        k = k if isinstance(k, MultiIndex) else MultiIndex(tuple(k))
        return self.terms.get(k, 0.0)

    def __len__(self) -> int:
        return len(self.terms)

    def __eq__(self, other) -> bool:
        return isinstance(other, CoefficientVector) and self.terms == other.terms

    def __repr__(self) -> str:
        return f"CoefficientVector({self.to_json()})"

    def l2(self) -> float:
        return math.sqrt(math.fsum(v * v for v in self.terms.values()))

    def sorted_items(self):
        return sorted(self.terms.items(), key=lambda kv: kv[0].components)

    def to_json(self) -> str:
        return json.dumps({k.key(): v for k, v in self.sorted_items()})

    @classmethod
    def from_json(cls, text: str) -> "CoefficientVector":
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"bad coefficient JSON: {exc}") from exc
        if not isinstance(raw, dict):
            raise InputError("coefficient JSON must be an object")
        return cls(raw)


def spherical_partial_sum(f: CoefficientVector, R: float, mode="euclid") -> CoefficientVector:
    """Keep the terms with |m| <= R (or max-norm <= R)."""
    mode = NormMode.parse(mode)
    if R < 0:
        return CoefficientVector({}, f.d)
    if mode is NormMode.MAX:
        keep = {k: v for k, v in f.terms.items() if k.max_norm <= R}
    else:
        from fractions import Fraction

        fr = Fraction(R)
        keep = {k: v for k, v in f.terms.items() if k.norm2 <= fr * fr}
    return CoefficientVector(keep, f.d)


# ---------------------------------------------------------------------------
# layer windows and the coordinate isomorphism


@dataclass(frozen=True)
class LayerWindow:
    M1: int
    M2: int
    mode: NormMode = NormMode.EUCLID

    def __post_init__(self):
        object.__setattr__(self, "mode", NormMode.parse(self.mode))
        if self.M1 < -1 or self.M2 < self.M1:
            raise InputError(f"window needs -1 <= M1 <= M2, got ({self.M1}, {self.M2})")

    def indices(self, d: int) -> list[MultiIndex]:
        return window_indices(d, self.mode, self.M1, self.M2)

    def dim(self, d: int) -> int:
        return window_dim(d, self.mode, self.M1, self.M2)


def coordinate_map_J(alpha: Sequence[float], window: LayerWindow, d: int) -> CoefficientVector:
    idx = window.indices(d)
    alpha = np.asarray(alpha, dtype=np.float64)
    if alpha.shape != (len(idx),):
        raise InputError(f"vector of length {alpha.size} does not match window dimension {len(idx)}")
    return CoefficientVector(zip(idx, alpha.tolist()), d)


def coordinate_map_J_inverse(f: CoefficientVector, window: LayerWindow, d: int) -> np.ndarray:
    idx = window.indices(d)
    pos = {k: i for i, k in enumerate(idx)}
    out = np.zeros(len(idx))
    for k, v in f.terms.items():
        if k not in pos:
            raise InputError(f"index {k.key()} lies outside the window")
        out[pos[k]] = v
    return out


# ---------------------------------------------------------------------------
# grids


def vilenkin_depth(radix: RadixSequence, max_index: int) -> int:
    return radix.depth_for(max_index)


def trig_grid_size(p: float, max_index: int) -> int:
    p_eff = 8.0 if math.isinf(p) else float(p)
    return int(max(4096, math.ceil(8 * p_eff * trig_degree(max_index))))


def axis_grid(fac: FactorSystem, max_index: int, p: float):
    """(points, depth) for one axis: point codes or angles."""
    if isinstance(fac, Vilenkin):
        depth = vilenkin_depth(fac.radix, max_index)
        return np.arange(fac.radix.P(depth), dtype=np.int64), depth
    size = trig_grid_size(p, max_index)
    return 2.0 * np.pi * np.arange(size) / size, None


def _check_grid(sizes: Sequence[int]) -> None:
    total = math.prod(sizes)
    limit = budget("grid")
    if total > limit:
        raise ResourceError(f"tensor grid of {total} points exceeds budget {limit}")


def axis_matrix(fac: FactorSystem, indices: Sequence[int], pts, depth) -> np.ndarray:
    """Rows: basis functions ``indices``; columns: grid points."""
    return np.array([fac.evaluate(int(m), pts, depth) for m in indices], dtype=np.float64).reshape(
        len(indices), len(pts)
    )


def grid_values(f: CoefficientVector, spec: ProductSpec, p: float = 2.0) -> np.ndarray:
    """Values of f on the tensor grid, flattened."""
    if f.d is not None and f.d != spec.d:
        raise InputError(f"vector has d={f.d}, system has d={spec.d}")
    items = f.sorted_items()
    if not items:
        return np.zeros(1)
    per_axis = [sorted({k.components[j] for k, _ in items}) for j in range(spec.d)]
    grids = [axis_grid(fac, max(ix), p) for fac, ix in zip(spec.factors, per_axis)]
    _check_grid([len(g[0]) for g in grids])
    coef = np.zeros([len(ix) for ix in per_axis])
    pos = [{m: i for i, m in enumerate(ix)} for ix in per_axis]
    for k, v in items:
        coef[tuple(pos[j][c] for j, c in enumerate(k.components))] = v
    vals = coef
    for j, (fac, ix) in enumerate(zip(spec.factors, per_axis)):
        B = axis_matrix(fac, ix, *grids[j])
        # contract the leading coefficient axis, append the grid axis
        vals = np.tensordot(vals, B, axes=([0], [0]))
    return vals.ravel()


def lp_from_values(vals: np.ndarray, p: float, axis=-1):
    a = np.abs(vals)
    if math.isinf(p):
        return a.max(axis=axis)
    if p == 2.0:
        return np.sqrt(np.mean(a * a, axis=axis))
    return np.mean(a**p, axis=axis) ** (1.0 / p)


def lp_norm(f: CoefficientVector, p: float, spec: ProductSpec) -> float:
    """L^p norm of the represented function on the product probability space."""
    if not (p >= 1):
        raise InputError("p must be in [1, inf]")
    if not f.terms:
        return 0.0
    return float(lp_from_values(grid_values(f, spec, p), p))


def window_matrix(window: LayerWindow, spec: ProductSpec, p: float = 2.0) -> np.ndarray:
    """Matrix (grid points x n) mapping window coordinates to grid values."""
    idx = window.indices(spec.d)
    if not idx:
        return np.zeros((1, 0))
    cols = []
    per_axis_max = [max(k.components[j] for k in idx) for j in range(spec.d)]
    grids = [axis_grid(fac, mx, p) for fac, mx in zip(spec.factors, per_axis_max)]
    _check_grid([len(g[0]) for g in grids] + [len(idx)])
    cache: list[dict] = [{} for _ in range(spec.d)]
    for k in idx:
        col = np.ones(1)
        for j, (fac, c) in enumerate(zip(spec.factors, k.components)):
            row = cache[j].get(c)
            if row is None:
                row = np.asarray(fac.evaluate(c, *grids[j]), dtype=np.float64)
                cache[j][c] = row
            col = np.multiply.outer(col, row).ravel()
        cols.append(col)
    return np.stack(cols, axis=1)


def fourier_coefficient(
    f,
    m: MultiIndex | Sequence[int],
    spec: ProductSpec,
    depths: Sequence[int] | None = None,
    trig_points: int = 4096,
) -> float:
    """Coefficient of phi_m in f.

    ``f`` is a CoefficientVector or a callable taking one coordinate array
    per axis (meshgrid form): point codes on Vilenkin axes (the callable must
    depend only on the first ``depths[j]`` digits) and angles on trig axes.
    """
    m = m if isinstance(m, MultiIndex) else MultiIndex(tuple(m))
    if isinstance(f, CoefficientVector):
        return f[m]
    if len(m) != spec.d:
        raise InputError("index dimension mismatch")
    axes, mats = [], []
    for j, fac in enumerate(spec.factors):
        if isinstance(fac, Vilenkin):
            need = vilenkin_depth(fac.radix, m.components[j])
            depth = max(need, depths[j] if depths else need)
            pts = np.arange(fac.radix.P(depth), dtype=np.int64)
        else:
            depth = None
            pts = 2.0 * np.pi * np.arange(trig_points) / trig_points
        axes.append(pts)
        mats.append(np.asarray(fac.evaluate(m.components[j], pts, depth), dtype=np.float64))
    _check_grid([len(a) for a in axes])
    mesh = np.meshgrid(*axes, indexing="ij")
    vals = np.asarray(f(*mesh), dtype=np.float64)
    weight = mats[0]
    for row in mats[1:]:
        weight = np.multiply.outer(weight, row)
    return float(np.sum(vals * weight) / vals.size)
