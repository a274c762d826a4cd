import pytest

from radperturb.errors import UnknownChain
from radperturb.perturb.chains import CATALOGUE, ChainSpec, PerturbationSpec, expand_chain, get_chain

EXPECTED = {
    "R": 27, "N": 30, "T": 27, "V": 29, "C": 30, "RT": 32, "RNT": 32, "RV": 30, "RC": 27,
    "TV": 40, "TC": 27, "RTC": 32, "RNTC": 32, "VC": 30, "RVC": 30, "RNVC": 30, "TVC": 40, "NTVC": 40,
}  # fmt: skip


@pytest.mark.parametrize("cid", list(EXPECTED))
def test_counts(cid):
    assert len(expand_chain(cid, 0)) == EXPECTED[cid] == get_chain(cid).size


def test_catalogue_complete():
    assert list(CATALOGUE) == list(EXPECTED)


def test_unknown():
    with pytest.raises(UnknownChain):
        get_chain("XYZ")


def test_ntvc_content():
    specs = expand_chain("NTVC", 11)
    assert all(s.add_noise and s.randomise_contour and s.rotation_deg == 0 for s in specs)
    assert {s.shift for s in specs} == {(a, b, c) for a in (0.25, 0.75) for b in (0.25, 0.75) for c in (0.25, 0.75)}
    assert sorted({s.volume_fraction for s in specs}) == [-0.2, -0.1, 0.0, 0.1, 0.2]
    assert [s.index for s in specs] == list(range(40))


def test_rotation_and_volume_grids():
    r = sorted({s.rotation_deg for s in expand_chain("R", 0)})
    assert r == list(range(-13, 14))
    v = sorted({s.volume_fraction for s in expand_chain("V", 0)})
    assert v[0] == -0.28 and v[-1] == 0.28 and 0.0 in v and len(v) == 29


def test_seeds_unique_and_master_dependent():
    a = expand_chain("N", 1)
    b = expand_chain("N", 2)
    assert len({s.noise_seed for s in a}) == 30
    assert [s.noise_seed for s in a] != [s.noise_seed for s in b]
    assert [s.noise_seed for s in a] == [s.noise_seed for s in expand_chain("N", 1)]


def test_custom_chain_identity():
    specs = expand_chain(ChainSpec("ID"), 0)
    assert len(specs) == 1 and specs[0].is_neutral


def test_spec_validation():
    with pytest.raises(ValueError):
        PerturbationSpec(shift=(1.0, 0, 0))
    with pytest.raises(ValueError):
        PerturbationSpec(volume_fraction=-1.0)
    with pytest.raises(ValueError):
        ChainSpec("X", translation_set=(1.2,))
