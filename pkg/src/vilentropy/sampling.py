"""Counter-keyed random streams.

Sample ``i`` is drawn from the Philox stream keyed by ``(seed, i // BLOCK)``
at offset ``i % BLOCK``, so any sample is a pure function of ``(seed, i)`` and
results do not depend on how work is chunked or distributed.
"""
from __future__ import annotations

import numpy as np

BLOCK = 4096

# distinct purposes get distinct keys so streams never overlap
STREAMS = {"sphere": 1, "ball": 2, "cloud": 3, "probe": 4}


def _generator(seed: int, stream: int, block: int) -> np.random.Generator:
    key = np.array([int(seed) & 0xFFFFFFFFFFFFFFFF, (stream << 40) | block], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _blocks(seed, stream, start, count, draw):
    out = []
    i = start
    end = start + count
    while i < end:
        b, off = divmod(i, BLOCK)
        take = min(BLOCK - off, end - i)
        chunk = draw(_generator(seed, stream, b), BLOCK)
        out.append(chunk[off : off + take])
        i += take
    return np.concatenate(out) if out else None


def normals(seed: int, dim: int, count: int, start: int = 0, stream: str = "sphere") -> np.ndarray:
    """Standard normal rows ``start .. start+count-1`` of shape (count, dim)."""
    sid = STREAMS[stream] | (1 << 16)  # never shares a key with uniforms()
    res = _blocks(seed, sid, start, count, lambda g, n: g.standard_normal((n, dim)))
    return np.empty((0, dim)) if res is None else res


def uniforms(seed: int, dim: int, count: int, start: int = 0, stream: str = "ball", lane: int = 0) -> np.ndarray:
    sid = STREAMS[stream] | (lane << 8)
    res = _blocks(seed, sid, start, count, lambda g, n: g.random((n, dim)))
    return np.empty((0, dim)) if res is None else res


def sphere(seed: int, dim: int, count: int, start: int = 0, stream: str = "sphere") -> np.ndarray:
    """Uniform points on the Euclidean unit sphere S^{dim-1}."""
    g = normals(seed, dim, count, start, stream)
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def ball(seed: int, dim: int, count: int, start: int = 0, stream: str = "ball") -> np.ndarray:
    """Uniform points in the Euclidean unit ball."""
    u = sphere(seed, dim, count, start, stream)
    rad = uniforms(seed, 1, count, start, stream=stream, lane=1)[:, 0] ** (1.0 / dim)
    return u * rad[:, None]
