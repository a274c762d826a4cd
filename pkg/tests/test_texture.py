import math

import numpy as np
import pytest

from radperturb.errors import EmptyRoi
from radperturb.features.discretise import DiscretisationSpec, discretise_grid
from radperturb.features.texture import (
    border_distance,
    features_glcm,
    features_gldzm,
    features_glrlm,
    features_glszm,
    features_ngldm,
    features_ngtdm,
    find_zones,
)

import oracles

CASES = range(12)


def roi_case(seed, shape=(6, 6, 6), max_voxels=200):
    rng = np.random.default_rng(seed)
    roi = rng.random(shape) < rng.uniform(0.4, 0.9)
    flat = np.flatnonzero(roi)
    if flat.size > max_voxels:
        roi.ravel()[flat[max_voxels:]] = False
    image = rng.integers(-50, 80, shape).astype(float)
    bins = int(rng.integers(2, 7))
    d = discretise_grid(image, roi, DiscretisationSpec("fbn", bins=bins))
    return d, roi


def close(ours, ref):
    assert set(ref) <= set(ours)
    for k, v in ref.items():
        if isinstance(v, float) and math.isnan(v):
            assert math.isnan(ours[k]), k
        else:
            assert ours[k] == pytest.approx(v, rel=1e-9, abs=1e-12), k


@pytest.mark.parametrize("seed", CASES)
def test_glcm_oracle(backend, seed):
    d, _ = roi_case(seed)
    close(features_glcm(d), oracles.glcm(d.grid, d.ng))


@pytest.mark.parametrize("seed", CASES)
def test_glrlm_oracle(backend, seed):
    d, _ = roi_case(seed)
    close(features_glrlm(d), oracles.glrlm(d.grid, d.ng))


@pytest.mark.parametrize("seed", CASES)
def test_glszm_oracle(backend, seed):
    d, _ = roi_case(seed)
    close(features_glszm(d), oracles.glszm(d.grid))


@pytest.mark.parametrize("seed", CASES)
def test_gldzm_oracle(backend, seed):
    d, roi = roi_case(seed)
    # a larger morphological mask than the intensity ROI
    morph = roi | np.roll(roi, 1, axis=0)
    close(features_gldzm(d, morph), oracles.gldzm(d.grid, morph))


@pytest.mark.parametrize("seed", CASES)
def test_ngtdm_oracle(backend, seed):
    d, _ = roi_case(seed)
    close(features_ngtdm(d), oracles.ngtdm(d.grid))


@pytest.mark.parametrize("seed", CASES)
def test_ngldm_oracle(backend, seed):
    d, _ = roi_case(seed)
    close(features_ngldm(d), oracles.ngldm(d.grid))


def test_zone_labels_raster_order(backend):
    grid = np.zeros((4, 1, 1), dtype=np.int32)
    grid[:, 0, 0] = [2, 1, 1, 2]
    z = find_zones(grid)
    assert z.labels.ravel().tolist() == [1, 2, 2, 3]
    assert z.level.tolist() == [2, 1, 2] and z.size.tolist() == [1, 2, 1]


def test_diagonal_zone_connectivity(backend):
    grid = np.zeros((3, 3, 3), dtype=np.int32)
    grid[0, 0, 0] = grid[1, 1, 1] = grid[2, 2, 2] = 1
    assert find_zones(grid).count == 1


def test_border_distance():
    morph = np.ones((5, 5, 5), bool)
    dist = border_distance(morph)
    assert dist[2, 2, 2] == 3 and dist[0, 2, 2] == 1 and dist[1, 1, 2] == 2


def constant_roi(shape=(4, 4, 4)):
    roi = np.ones(shape, bool)
    return discretise_grid(np.full(shape, 7.0), roi, DiscretisationSpec("fbn", bins=8)), roi


def test_constant_glcm(backend):
    d, _ = constant_roi()
    f = features_glcm(d)
    assert f["joint_entropy"] == 0.0 and f["asm"] == 1.0 and f["contrast"] == 0.0
    assert f["joint_max"] == 1.0 and f["inv_diff"] == 1.0
    assert math.isnan(f["correlation"]) and f.reasons["correlation"] == "zero variance"


def test_constant_ngtdm(backend):
    d, _ = constant_roi()
    f = features_ngtdm(d)
    assert f["coarseness"] == 1e6
    assert f["contrast"] == f["busyness"] == f["strength"] == f["complexity"] == 0.0


def test_constant_zones(backend):
    d, roi = constant_roi()
    f = features_glszm(d)
    assert f["zp"] == 1 / 64 and f["lze"] == 64**2
    g = features_gldzm(d, roi)
    assert g["sde"] == 1.0 and g["glnu"] == 1.0


def test_checkerboard_correlation(backend):
    idx = np.indices((2, 2, 1)).sum(axis=0)
    grid_image = np.where(idx % 2 == 0, 10.0, 20.0)
    d = discretise_grid(grid_image, np.ones((2, 2, 1), bool), DiscretisationSpec("fbn", bins=2))
    f = features_glcm(d)
    # the two face directions alternate perfectly, the diagonal pairs are equal
    ref = oracles.glcm(d.grid, d.ng)
    assert f["correlation"] == pytest.approx(ref["correlation"], rel=1e-12)
    line = discretise_grid(np.array([10.0, 20, 10, 20]).reshape(4, 1, 1), np.ones((4, 1, 1), bool), DiscretisationSpec("fbn", bins=2))
    assert features_glcm(line)["correlation"] == pytest.approx(-1.0)


def test_line_run_lengths(backend):
    d = discretise_grid(np.full((1, 1, 4), 3.0), np.ones((1, 1, 4), bool), DiscretisationSpec("fbn", bins=4))
    f = features_glrlm(d)
    # 12 directions see four runs of length 1, one sees a single run of 4
    assert f["rp"] == pytest.approx((12 * 1.0 + 0.25) / 13)
    assert f["sre"] == pytest.approx((12 + 1 / 16) / 13)


def test_single_voxel_ngtdm_missing(backend):
    grid = np.zeros((3, 3, 3), bool)
    grid[1, 1, 1] = True
    d = discretise_grid(np.zeros((3, 3, 3)), grid, DiscretisationSpec("fbn", bins=4))
    f = features_ngtdm(d)
    assert all(math.isnan(v) for v in f.values())
    assert set(f.reasons.values()) == {"no valid neighbourhood"}
    g = features_glcm(d)
    assert g.reasons["asm"] == "no voxel pairs"


def test_empty_grid():
    from radperturb.features.discretise import DiscretisedRoi

    with pytest.raises(EmptyRoi):
        features_glcm(DiscretisedRoi(np.array([1]), 1, np.zeros((2, 2, 2), np.int32)))
