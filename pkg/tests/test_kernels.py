import numpy as np
import pytest

from vilentropy import _accel, kernels, sampling


def test_ball_count_small(kernel_backend):
    assert kernels.ball_count_int(2, 1) == 5
    assert kernels.ball_count_int(2, 4) == 13
    assert kernels.ball_count_int(3, 1) == 7
    assert kernels.ball_count_int(1, 10) == 7


def test_orthant_counts(kernel_backend):
    assert list(kernels.orthant_counts(2, 5)) == [1, 3, 6, 11, 17, 26]
    assert list(kernels.orthant_counts(1, 4)) == [1, 2, 3, 4, 5]
    # brute force for d=3
    g = np.indices((9, 9, 9)).reshape(3, -1)
    n2 = (g**2).sum(axis=0)
    want = [int(np.sum(n2 <= l * l)) for l in range(9)]
    assert list(kernels.orthant_counts(3, 8)) == want


def test_greedy_interval(kernel_backend):
    Y = np.linspace(-1, 1, 2001)[:, None]
    w = np.ones(1)
    assert kernels.greedy_cover(Y, w, 2.0, 0.25) == 4
    assert kernels.greedy_cover(Y, w, 2.0, 1.0) == 1
    assert kernels.greedy_cover(Y, w, 2.0, 0.01, limit=5) == 6


@pytest.mark.skipif(not _accel.HAVE_NUMBA, reason="numba not installed")
@pytest.mark.parametrize("q", [1.0, 2.0, 3.0, np.inf])
def test_backends_agree(q):
    rng = np.random.default_rng(1)
    Y = rng.normal(size=(1500, 3))
    w = np.array([0.2, 0.3, 0.5])
    out = {}
    for name in ("numpy", "numba"):
        _accel.set_backend(name)
        try:
            order, radii, final = kernels.farthest_point_order(Y, w, q, max_picks=40)
            out[name] = (kernels.greedy_cover(Y, w, q, 0.8), order, radii, final)
        finally:
            _accel.set_backend("numba")
    a, b = out["numpy"], out["numba"]
    assert a[0] == b[0]
    assert np.array_equal(a[1], b[1])
    np.testing.assert_allclose(a[2], b[2], rtol=1e-12)
    assert abs(a[3] - b[3]) < 1e-12
    for d, bound in [(2, 50), (3, 30), (4, 9)]:
        _accel.set_backend("numpy")
        x = kernels.ball_count_int(d, bound), kernels.orthant_counts(d, 12)
        _accel.set_backend("numba")
        y = kernels.ball_count_int(d, bound), kernels.orthant_counts(d, 12)
        assert x[0] == y[0]
        assert np.array_equal(x[1], y[1])


def test_fps_radii_nonincreasing(kernel_backend):
    Y = np.random.default_rng(3).uniform(-1, 1, size=(800, 2))
    order, radii, final = kernels.farthest_point_order(Y, np.ones(2), 2.0)
    assert len(set(order.tolist())) == len(order)
    assert np.all(np.diff(radii[1:]) <= 1e-15)
    assert final == 0.0


def test_sampling_chunk_invariance():
    full = sampling.sphere(11, 5, 10000)
    parts = np.vstack([sampling.sphere(11, 5, 3000, 0), sampling.sphere(11, 5, 7000, 3000)])
    assert np.array_equal(full, parts)
    b = sampling.ball(4, 3, 9000)
    assert np.array_equal(b[5000:], sampling.ball(4, 3, 4000, 5000))


def test_sampling_properties():
    s = sampling.sphere(0, 4, 20000)
    np.testing.assert_allclose(np.linalg.norm(s, axis=1), 1.0, atol=1e-12)
    assert np.abs(s.mean(axis=0)).max() < 0.02
    b = sampling.ball(0, 2, 40000)
    r = np.linalg.norm(b, axis=1)
    assert r.max() <= 1.0
    # radius law P(r <= t) = t^2
    assert abs(np.mean(r <= 0.5) - 0.25) < 0.01
    assert not np.array_equal(sampling.sphere(0, 3, 10), sampling.sphere(1, 3, 10))
    assert not np.array_equal(sampling.uniforms(0, 3, 10, lane=0), sampling.uniforms(0, 3, 10, lane=1))
