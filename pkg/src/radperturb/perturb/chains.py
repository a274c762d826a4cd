"""Perturbation chains and their expansion into concrete instances."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from ..errors import UnknownChain
from ..seeding import CONTOUR_STREAM, NOISE_STREAM, VOLUME_STREAM, derive_seed


@dataclass(frozen=True)
class PerturbationSpec:
    """One fully determined perturbation of an image and its mask.

    Besides the noise and contour seeds, the volume adaptation step carries
    its own seed because the final rim voxels are picked at random.
    """

    rotation_deg: float = 0.0
    add_noise: bool = False
    noise_seed: int = 0
    shift: tuple[float, float, float] = (0.0, 0.0, 0.0)
    volume_fraction: float = 0.0
    randomise_contour: bool = False
    contour_seed: int = 0
    volume_seed: int = 0
    index: int = 0

    def __post_init__(self):
        if not self.volume_fraction > -1.0:
            raise ValueError(f"volume fraction must exceed -1, got {self.volume_fraction}")
        shift = tuple(float(s) for s in self.shift)
        if len(shift) != 3 or not all(0.0 <= s < 1.0 for s in shift):
            raise ValueError(f"shift components must lie in [0, 1), got {self.shift}")
        object.__setattr__(self, "shift", shift)

    @property
    def is_neutral(self) -> bool:
        return (
            self.rotation_deg == 0
            and not self.add_noise
            and self.shift == (0.0, 0.0, 0.0)
            and self.volume_fraction == 0
            and not self.randomise_contour
        )


@dataclass(frozen=True)
class ChainSpec:
    chain_id: str
    rotation_set: tuple[float, ...] = ()
    noise_repeats: int = 0
    translation_set: tuple[float, ...] = ()
    volume_set: tuple[float, ...] = ()
    contour_repeats: int = 0

    def __post_init__(self):
        for name in ("rotation_set", "translation_set", "volume_set"):
            object.__setattr__(self, name, tuple(float(v) for v in getattr(self, name)))
        if self.noise_repeats < 0 or self.contour_repeats < 0:
            raise ValueError("repeat counts must be non-negative")
        if any(not 0.0 <= t < 1.0 for t in self.translation_set):
            raise ValueError("translation fractions must lie in [0, 1)")
        if any(not v > -1.0 for v in self.volume_set):
            raise ValueError("volume fractions must exceed -1")

    @property
    def size(self) -> int:
        n = max(len(self.rotation_set), 1) * max(self.noise_repeats, 1)
        n *= max(len(self.translation_set), 1) ** 3
        n *= max(len(self.volume_set), 1) * max(self.contour_repeats, 1)
        return n


def _steps(lo: float, hi: float, step: float) -> tuple[float, ...]:
    n = round((hi - lo) / step)
    return tuple(round(lo + i * step, 10) for i in range(n + 1))


_ROT_FULL = _steps(-13, 13, 1)
_ROT_SMALL = (-6.0, -2.0, 2.0, 6.0)
_ROT_WIDE = (-10.0, -6.0, -2.0, 2.0, 6.0, 10.0)
_ETA_THREE = (0.0, 0.333, 0.667)
_ETA_TWO = (0.25, 0.75)
_TAU_FULL = _steps(-0.28, 0.28, 0.02)
_TAU_FIVE = (-0.2, -0.1, 0.0, 0.1, 0.2)

CATALOGUE: dict[str, ChainSpec] = {
    c.chain_id: c
    for c in [
        ChainSpec("R", rotation_set=_ROT_FULL),
        ChainSpec("N", noise_repeats=30),
        ChainSpec("T", translation_set=_ETA_THREE),
        ChainSpec("V", volume_set=_TAU_FULL),
        ChainSpec("C", contour_repeats=30),
        ChainSpec("RT", rotation_set=_ROT_SMALL, translation_set=_ETA_TWO),
        ChainSpec("RNT", rotation_set=_ROT_SMALL, noise_repeats=1, translation_set=_ETA_TWO),
        ChainSpec("RV", rotation_set=_ROT_WIDE, volume_set=_TAU_FIVE),
        ChainSpec("RC", rotation_set=_ROT_FULL, contour_repeats=1),
        ChainSpec("TV", translation_set=_ETA_TWO, volume_set=_TAU_FIVE),
        ChainSpec("TC", translation_set=_ETA_THREE, contour_repeats=1),
        ChainSpec("RTC", rotation_set=_ROT_SMALL, translation_set=_ETA_TWO, contour_repeats=1),
        ChainSpec(
            "RNTC", rotation_set=_ROT_SMALL, noise_repeats=1, translation_set=_ETA_TWO, contour_repeats=1
        ),
        ChainSpec("VC", volume_set=_TAU_FIVE, contour_repeats=6),
        ChainSpec("RVC", rotation_set=_ROT_WIDE, volume_set=_TAU_FIVE, contour_repeats=1),
        ChainSpec(
            "RNVC", rotation_set=_ROT_WIDE, noise_repeats=1, volume_set=_TAU_FIVE, contour_repeats=1
        ),
        ChainSpec("TVC", translation_set=_ETA_TWO, volume_set=_TAU_FIVE, contour_repeats=1),
        ChainSpec(
            "NTVC", noise_repeats=1, translation_set=_ETA_TWO, volume_set=_TAU_FIVE, contour_repeats=1
        ),
    ]
}


def get_chain(chain_id: str) -> ChainSpec:
    try:
        return CATALOGUE[chain_id]
    except KeyError:
        raise UnknownChain(f"unknown perturbation chain {chain_id!r}") from None


def expand_chain(chain: ChainSpec | str, master_seed: int) -> list[PerturbationSpec]:
    """All perturbation instances of a chain, in a fixed order.

    Factors vary slowest to fastest as rotation, noise repetition, shift
    triple (x, y, z), volume fraction and contour repetition. Missing
    factors contribute a single neutral value. Seeds depend only on the
    master seed and the instance position.
    """
    if isinstance(chain, str):
        chain = get_chain(chain)
    rotations = chain.rotation_set or (0.0,)
    noise = range(chain.noise_repeats) if chain.noise_repeats else (None,)
    shifts = list(itertools.product(chain.translation_set or (0.0,), repeat=3))
    volumes = chain.volume_set or (0.0,)
    contours = range(chain.contour_repeats) if chain.contour_repeats else (None,)

    out = []
    combos = itertools.product(rotations, noise, shifts, volumes, contours)
    for index, (theta, n_rep, shift, tau, c_rep) in enumerate(combos):
        out.append(
            PerturbationSpec(
                rotation_deg=theta,
                add_noise=n_rep is not None,
                noise_seed=derive_seed(master_seed, index, NOISE_STREAM),
                shift=shift,
                volume_fraction=tau,
                randomise_contour=c_rep is not None,
                contour_seed=derive_seed(master_seed, index, CONTOUR_STREAM),
                volume_seed=derive_seed(master_seed, index, VOLUME_STREAM),
                index=index,
            )
        )
    return out
