"""Run configuration read from a YAML document.

Unknown keys are rejected so that typos fail loudly. Relative paths are
resolved against the directory holding the configuration file.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .errors import ConfigError, RadPerturbError, UnknownChain
from .features import FBN, FBS, DiscretisationSpec, FeatureConfig
from .perturb import CATALOGUE, MAD_CONSTANT, NOISE_CONSTANT, ChainSpec
from .phantom import AcquisitionDelta, PhantomSpec
from .pipeline import ProcessingConfig
from .preprocess import ResegmentationSpec
from .robustness import ROBUST_THRESHOLD

TOP_KEYS = {
    "subjects",
    "subjects_file",
    "spacings",
    "beta",
    "resegmentation",
    "discretisation",
    "chains",
    "custom_chains",
    "seed",
    "icc_threshold",
    "output",
    "noise_constant",
    "phantom",
}
SUBJECT_KEYS = {"id", "image", "mask", "retest"}
RETEST_KEYS = {"image", "mask"}
RESEG_KEYS = {"range_low", "range_high", "outlier_sigma"}
DISC_KEYS = {"fbn", "fbs"}
CHAIN_KEYS = {"id", "rotation_set", "noise_repeats", "translation_set", "volume_set", "contour_repeats"}
PHANTOM_KEYS = {
    "subjects",
    "dims",
    "spacing",
    "semi_axes",
    "semi_axes_jitter",
    "base_hu",
    "base_hu_jitter",
    "modulation",
    "correlation_mm",
    "noise_sigma",
    "background_hu",
    "retest_noise_scale",
    "retest_smoothing_sigma",
    "independent_retest_noise",
}


@dataclass(frozen=True)
class SubjectInput:
    id: str
    image: Path
    mask: Path
    retest_image: Path | None = None
    retest_mask: Path | None = None

    def images(self) -> list[tuple[str, Path, Path]]:
        out = [("test", self.image, self.mask)]
        if self.retest_image is not None:
            out.append(("retest", self.retest_image, self.retest_mask))
        return out


@dataclass(frozen=True)
class PhantomCohort:
    """Cohort of phantoms: one base spec with per-subject jitter of the
    semi-axes (relative) and base intensity (HU)."""

    n_subjects: int
    spec: PhantomSpec
    semi_axes_jitter: float = 0.0
    base_hu_jitter: float = 0.0
    delta: AcquisitionDelta = AcquisitionDelta()
    independent_retest_noise: bool = False


@dataclass(frozen=True)
class RunConfig:
    subjects: tuple[SubjectInput, ...]
    processing: ProcessingConfig
    chains: tuple[ChainSpec, ...]
    seed: int = 0
    icc_threshold: float = ROBUST_THRESHOLD
    output: Path | None = None
    phantom: PhantomCohort | None = None
    subjects_file: Path | None = None
    canonical: str = field(default="", repr=False)

    @property
    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical.encode("utf-8")).hexdigest()

    def check_inputs(self) -> None:
        """Raise ConfigError unless every referenced input file exists."""
        if self.subjects_file is not None and not self.subjects_file.is_file():
            raise ConfigError(f"subjects file not found: {self.subjects_file}")
        if not self.subjects:
            raise ConfigError("no subjects configured")
        for s in self.subjects:
            for _, img, msk in s.images():
                for p in (img, msk):
                    if not p.is_file():
                        raise ConfigError(f"input file not found: {p}")


def _check_keys(section: dict, allowed: set, where: str) -> None:
    if not isinstance(section, dict):
        raise ConfigError(f"{where} must be a mapping")
    unknown = sorted(set(section) - allowed)
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {', '.join(unknown)}")


def _resolve(base: Path, value) -> Path:
    if not isinstance(value, str):
        raise ConfigError(f"expected a path, got {value!r}")
    p = Path(value)
    return p if p.is_absolute() else base / p


def _subjects(raw, base: Path) -> list[SubjectInput]:
    if not isinstance(raw, list):
        raise ConfigError("subjects must be a list")
    out = []
    for i, entry in enumerate(raw):
        _check_keys(entry, SUBJECT_KEYS, f"subjects[{i}]")
        for key in ("image", "mask"):
            if key not in entry:
                raise ConfigError(f"subjects[{i}] lacks {key!r}")
        retest = entry.get("retest")
        ri = rm = None
        if retest is not None:
            if isinstance(retest, list):
                raise ConfigError("at most one retest acquisition per subject is supported")
            _check_keys(retest, RETEST_KEYS, f"subjects[{i}].retest")
            if set(retest) != RETEST_KEYS:
                raise ConfigError(f"subjects[{i}].retest needs both image and mask")
            ri, rm = _resolve(base, retest["image"]), _resolve(base, retest["mask"])
        sid = str(entry.get("id", f"subject{i + 1:03d}"))
        out.append(SubjectInput(sid, _resolve(base, entry["image"]), _resolve(base, entry["mask"]), ri, rm))
    ids = [s.id for s in out]
    if len(set(ids)) != len(ids):
        raise ConfigError("subject ids must be unique")
    return out


def _discretisations(raw, anchor: float) -> tuple[DiscretisationSpec, ...]:
    _check_keys(raw, DISC_KEYS, "discretisation")
    out = [DiscretisationSpec(FBN, bins=int(b)) for b in raw.get("fbn", [])]
    out += [DiscretisationSpec(FBS, bin_width=float(w), fbs_anchor=anchor) for w in raw.get("fbs", [])]
    return tuple(out)


def _chains(ids, custom) -> tuple[ChainSpec, ...]:
    defined = dict(CATALOGUE)
    for i, c in enumerate(custom or []):
        _check_keys(c, CHAIN_KEYS, f"custom_chains[{i}]")
        if "id" not in c:
            raise ConfigError(f"custom_chains[{i}] lacks an id")
        spec = ChainSpec(
            chain_id=str(c["id"]),
            rotation_set=tuple(c.get("rotation_set", ())),
            noise_repeats=int(c.get("noise_repeats", 0)),
            translation_set=tuple(c.get("translation_set", ())),
            volume_set=tuple(c.get("volume_set", ())),
            contour_repeats=int(c.get("contour_repeats", 0)),
        )
        defined[spec.chain_id] = spec
    if not isinstance(ids, list) or not ids:
        raise ConfigError("chains must be a non-empty list of chain ids")
    out = []
    for cid in ids:
        if str(cid) not in defined:
            raise UnknownChain(f"unknown perturbation chain {cid!r}")
        out.append(defined[str(cid)])
    if len({c.chain_id for c in out}) != len(out):
        raise ConfigError("chain ids must be unique")
    return tuple(out)


def _phantom(raw) -> PhantomCohort:
    _check_keys(raw, PHANTOM_KEYS, "phantom")
    spec_keys = ("dims", "spacing", "semi_axes", "base_hu", "modulation", "correlation_mm", "noise_sigma", "background_hu")
    kwargs = {k: raw[k] for k in spec_keys if k in raw}
    for k in ("dims", "spacing", "semi_axes"):
        if k in kwargs and isinstance(kwargs[k], list):
            kwargs[k] = tuple(kwargs[k])
    delta = AcquisitionDelta(
        float(raw.get("retest_noise_scale", 1.0)), float(raw.get("retest_smoothing_sigma", 0.0))
    )
    return PhantomCohort(
        n_subjects=int(raw.get("subjects", 10)),
        spec=PhantomSpec(**kwargs),
        semi_axes_jitter=float(raw.get("semi_axes_jitter", 0.0)),
        base_hu_jitter=float(raw.get("base_hu_jitter", 0.0)),
        delta=delta,
        independent_retest_noise=bool(raw.get("independent_retest_noise", False)),
    )


def parse_config(raw: dict, base: Path = Path("."), seed: int | None = None) -> RunConfig:
    """Build a :class:`RunConfig` from a parsed document."""
    if raw is None:
        raw = {}
    _check_keys(raw, TOP_KEYS, "configuration")
    try:
        reseg_raw = raw.get("resegmentation", {"range_low": -1000, "range_high": 400})
        _check_keys(reseg_raw, RESEG_KEYS, "resegmentation")
        reseg = ResegmentationSpec(
            float(reseg_raw["range_low"]),
            float(reseg_raw["range_high"]),
            float(reseg_raw.get("outlier_sigma", 3.0)),
        )
        disc_raw = raw.get("discretisation", {"fbn": [8, 16, 32, 64], "fbs": [6, 12, 18, 24]})
        master = int(seed if seed is not None else raw.get("seed", 0))
        features = FeatureConfig(
            spacings=tuple(raw.get("spacings", (1.0, 2.0, 3.0, 4.0))),
            discretisations=_discretisations(disc_raw, reseg.range_low),
            spatial_seed=master,
        )
        noise_constant = raw.get("noise_constant", NOISE_CONSTANT)
        if noise_constant == "mad":
            noise_constant = MAD_CONSTANT
        processing = ProcessingConfig(
            reseg=reseg,
            features=features,
            beta=float(raw.get("beta", 0.93)),
            noise_constant=float(noise_constant),
        )
        if not 0 < processing.beta <= 1:
            raise ConfigError(f"beta must lie in (0, 1], got {processing.beta}")
        threshold = float(raw.get("icc_threshold", ROBUST_THRESHOLD))
        if not 0 < threshold <= 1:
            raise ConfigError(f"icc_threshold must lie in (0, 1], got {threshold}")
        subjects = []
        subjects_file = None
        if "subjects_file" in raw:
            # may not exist yet when the phantom command is about to write it
            subjects_file = _resolve(base, raw["subjects_file"])
            if subjects_file.is_file():
                try:
                    listed = yaml.safe_load(subjects_file.read_text())
                except (OSError, yaml.YAMLError) as exc:
                    raise ConfigError(f"cannot read subjects file {subjects_file}: {exc}") from None
                subjects += _subjects(listed, subjects_file.parent)
        subjects += _subjects(raw.get("subjects", []), base)
        chains = _chains(raw.get("chains", ["N"]), raw.get("custom_chains"))
        output = _resolve(base, raw["output"]) if "output" in raw else None
        phantom = _phantom(raw["phantom"]) if "phantom" in raw else None
    except ConfigError:
        raise
    except (RadPerturbError, ValueError, TypeError, KeyError) as exc:
        raise ConfigError(f"invalid configuration: {exc}") from None
    canonical = json.dumps({**raw, "seed": master}, sort_keys=True, default=str)
    return RunConfig(
        subjects=tuple(subjects),
        processing=processing,
        chains=chains,
        seed=master,
        icc_threshold=threshold,
        output=output,
        phantom=phantom,
        subjects_file=subjects_file,
        canonical=canonical,
    )


def load_config(path, seed: int | None = None) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read configuration {path}: {exc}") from None
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"configuration is not valid YAML: {exc}") from None
    return parse_config(raw, path.parent, seed)
