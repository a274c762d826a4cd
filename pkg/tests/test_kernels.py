import numpy as np
import pytest

from radperturb import _kernels

BACKENDS = _kernels.available_backends()
needs_two = pytest.mark.skipif(len(BACKENDS) < 2, reason="compiled kernels not built")


def levels(seed, shape=(9, 7, 8), ng=5):
    rng = np.random.default_rng(seed)
    grid = rng.integers(1, ng + 1, shape).astype(np.int32)
    grid[rng.random(shape) < 0.3] = 0
    return grid


def test_directions():
    assert len(_kernels.DIRECTIONS) == 13 and len(_kernels.NEIGHBOURS) == 26
    assert set(_kernels.DIRECTIONS) | {tuple(-c for c in d) for d in _kernels.DIRECTIONS} == set(_kernels.NEIGHBOURS)


@needs_two
@pytest.mark.parametrize("seed", range(4))
def test_backends_identical(seed):
    c, p = BACKENDS["cython"], BACKENDS["python"]
    g = levels(seed)
    assert np.array_equal(c.glcm_matrices(g, 5), p.glcm_matrices(g, 5))
    assert np.array_equal(c.glrlm_matrices(g, 5), p.glrlm_matrices(g, 5))
    for a, b in zip(c.neighbourhood_stats(g), p.neighbourhood_stats(g)):
        assert np.array_equal(a, b)
    la, na = c.zone_labels(g)
    lb, nb = p.zone_labels(g)
    assert na == nb and np.array_equal(la, lb)
    rng = np.random.default_rng(seed)
    x = rng.normal(size=50)
    pos = rng.random((50, 3)) * 10
    assert np.allclose(c.moran_geary(x, pos), p.moran_geary(x, pos), rtol=1e-12)


def test_glcm_counts_symmetric(backend):
    g = levels(1)
    m = _kernels.glcm_matrices(g, 5)
    assert np.array_equal(m, m.transpose(0, 2, 1))
    # each direction counts every in-ROI pair twice
    k = _kernels.DIRECTIONS.index((1, 0, 0))
    assert m[k].sum() == 2 * np.count_nonzero((g[:-1] > 0) & (g[1:] > 0))


def test_glrlm_conserves_voxels(backend):
    g = levels(2)
    m = _kernels.glrlm_matrices(g, 5)
    lengths = np.arange(1, m.shape[2] + 1)
    assert np.all((m * lengths).sum(axis=(1, 2)) == np.count_nonzero(g))


def test_neighbourhood_counts(backend):
    g = np.ones((3, 3, 3), np.int32)
    s, n, e = _kernels.neighbourhood_stats(g)
    assert n[1, 1, 1] == 26 and n[0, 0, 0] == 7
    assert np.array_equal(n, e) and np.array_equal(s, n.astype(float))
