import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from radperturb.errors import EmptyMask, GeometryMismatch, NotBinarised
from radperturb.volume import RoiMask, RoiPair, Volume, check_pair, crop_to_roi


def test_volume_rejects_bad_geometry():
    with pytest.raises(ValueError):
        Volume(np.zeros((2, 2)))
    with pytest.raises(ValueError):
        Volume(np.zeros((2, 2, 2)), spacing=(1, 0, 1))


def test_volume_is_immutable():
    v = Volume(np.zeros((2, 2, 2)))
    with pytest.raises(ValueError):
        v.data[0, 0, 0] = 1


def test_mask_range_checked():
    with pytest.raises(ValueError):
        RoiMask(np.full((2, 2, 2), 1.5))


def test_fractional_mask_not_binary():
    m = RoiMask(np.full((2, 2, 2), 0.5))
    assert not m.is_binary()
    with pytest.raises(NotBinarised):
        m.as_bool()


def test_world_coordinates():
    v = Volume(np.zeros((3, 3, 3)), spacing=(0.5, 1.0, 2.0), origin=(10, 20, 30))
    assert np.allclose(v.world_coordinates((2, 1, 3)), (11.0, 21.0, 36.0))


def test_check_pair_geometry():
    v = Volume(np.zeros((3, 3, 3)))
    m = RoiMask(np.zeros((3, 3, 3)), spacing=(1, 1, 2))
    with pytest.raises(GeometryMismatch):
        check_pair(v, m)


def test_roi_pair_subset():
    morph = RoiMask(np.zeros((2, 2, 2)))
    inten = RoiMask(np.ones((2, 2, 2)))
    with pytest.raises(ValueError):
        RoiPair(morph, inten)


def test_crop_full_mask_identity():
    v = Volume(np.arange(27.0).reshape(3, 3, 3), origin=(1, 2, 3))
    m = RoiMask(np.ones((3, 3, 3)), origin=(1, 2, 3))
    cv, cm = crop_to_roi(v, m, 25)
    assert cv.dims == v.dims and cv.origin == v.origin
    assert np.array_equal(cv.data, v.data)


def test_crop_single_voxel():
    data = np.zeros((40, 50, 30))
    mask = np.zeros_like(data)
    mask[10, 10, 10] = 1
    v, m = Volume(data), RoiMask(mask)
    cv, cm = crop_to_roi(v, m, 25)
    # box 10-25 .. 10+25 inclusive, clipped per axis
    assert cv.dims == (36, 36, 30)
    assert cv.origin == (0.0, 0.0, 0.0)
    assert cm.data[10, 10, 10] == 1


def test_crop_keeps_world_positions():
    data = np.random.default_rng(0).integers(-50, 50, (30, 30, 30)).astype(float)
    mask = np.zeros_like(data)
    mask[20, 22, 25] = 1
    v = Volume(data, spacing=(2, 2, 3), origin=(-5, 0, 7))
    m = RoiMask(mask, spacing=(2, 2, 3), origin=(-5, 0, 7))
    cv, cm = crop_to_roi(v, m, 5)
    idx = tuple(int(i) for i in np.argwhere(cm.data)[0])
    assert np.allclose(cv.world_coordinates(idx), v.world_coordinates((20, 22, 25)))
    assert cv.data[idx] == data[20, 22, 25]


def test_crop_empty():
    with pytest.raises(EmptyMask):
        crop_to_roi(Volume(np.zeros((3, 3, 3))), RoiMask(np.zeros((3, 3, 3))), 25)


@settings(max_examples=40, deadline=None)
@given(
    st.tuples(st.integers(1, 12), st.integers(1, 12), st.integers(1, 12)),
    st.floats(0, 10),
    st.data(),
)
def test_crop_box_property(dims, margin, data):
    pos = tuple(data.draw(st.integers(0, d - 1)) for d in dims)
    mask = np.zeros(dims)
    mask[pos] = 1
    v, m = Volume(np.zeros(dims)), RoiMask(mask)
    cv, cm = crop_to_roi(v, m, margin)
    pad = int(np.ceil(margin))
    for ax in range(3):
        lo = max(pos[ax] - pad, 0)
        hi = min(pos[ax] + pad + 1, dims[ax])
        assert cv.dims[ax] == hi - lo
        assert cv.origin[ax] == lo
    assert cm.data.sum() == 1
