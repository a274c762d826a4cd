import numpy as np
import pytest

from radperturb.errors import EmptyIntensityMask
from radperturb.features import DiscretisationSpec, FeatureConfig
from radperturb.perturb import PerturbationSpec, expand_chain
from radperturb.phantom import PhantomSpec, generate_phantom
from radperturb.pipeline import (
    ProcessingConfig,
    extract_all,
    extract_unperturbed,
    process_instance,
    run_instances,
)
from radperturb.preprocess import ResegmentationSpec
from radperturb.volume import RoiMask, Volume


def config(spacings=(2.0, 3.0)):
    discs = (DiscretisationSpec("fbn", bins=16), DiscretisationSpec("fbs", bin_width=12, fbs_anchor=-1000))
    return ProcessingConfig(ResegmentationSpec(-1000, 400), FeatureConfig(spacings, discs, spatial_seed=3))


@pytest.fixture(scope="module")
def phantom():
    return generate_phantom(PhantomSpec(dims=(32, 32, 24), semi_axes=(9, 8, 7)), seed=4)


def test_neutral_instance_identical(phantom):
    v, m = phantom
    cfg = config()
    ref = extract_unperturbed(v, m, cfg)
    out = process_instance(v, m, PerturbationSpec(), cfg)
    assert out.identical(ref)
    assert extract_all(v, m, cfg).identical(ref)


def test_perturbed_differs(phantom):
    v, m = phantom
    cfg = config()
    ref = extract_unperturbed(v, m, cfg)
    spec = expand_chain("NTVC", 1)[7]
    out = extract_all(v, m, cfg, spec)
    assert out.ids == ref.ids
    assert not out.identical(ref)


def test_spacing_failure_isolated():
    # ROI entirely above the re-segmentation range: every spacing fails alone
    v = Volume(np.full((10, 10, 10), 900.0))
    roi = np.zeros((10, 10, 10))
    roi[3:7, 3:7, 3:7] = 1
    cfg = config()
    fv = extract_unperturbed(v, RoiMask(roi), cfg)
    assert np.isnan(fv.values).all()
    assert set(fv.reasons.values()) == {EmptyIntensityMask.__name__}
    assert len(fv) == len(cfg.schema())


def test_run_instances_order_and_threads(phantom):
    v, m = phantom
    cfg = config((3.0,))
    specs = expand_chain("NTVC", 2)[:4]
    one = run_instances(v, m, specs, cfg, threads=1)
    two = run_instances(v, m, specs, cfg, threads=2)
    assert all(a.identical(b) for a, b in zip(one, two))
    for spec, fv in zip(specs, one):
        assert fv.identical(process_instance(v, m, spec, cfg))
