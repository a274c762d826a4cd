"""Command line interface: ``phantom``, ``extract``, ``robustness`` and ``report``.

Exit codes are 0 on success, 2 for usage or configuration errors and 3 for
I/O errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import platform
import sys
import zlib
from collections import defaultdict
from pathlib import Path

import numpy as np

from . import __version__, _kernels
from .config import RunConfig, load_config
from .errors import (
    ConfigError,
    DegenerateVariance,
    IoFailure,
    RadPerturbError,
    SchemaMismatch,
    TooFewSubjects,
    ZeroSpread,
)
from .metaimage import load_mask, load_metaimage, save_metaimage
from .perturb import expand_chain
from .phantom import PhantomSpec, generate_retest_pair
from .pipeline import extract_unperturbed, run_instances
from .report import (
    ORIGINAL,
    REFERENCE,
    FeatureRow,
    features_csv,
    format_float,
    read_features_csv,
    read_text,
    robust_fraction_svg,
    confusion_svg,
    to_csv,
    write_text,
)
from .robustness import (
    MeasurementMatrix,
    average_perturbation_icc,
    bias_significant,
    classify,
    confusion,
    icc_1_1,
    pooled_bias_z,
)
from .seeding import derive_seed

log = logging.getLogger("radperturb")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3

FEATURES_FILE = "features.csv"
MANIFEST_FILE = "manifest.json"
ICC_FILE = "icc.csv"
BIAS_FILE = "bias.csv"
FRACTION_CSV = "robust_fraction.csv"
FRACTION_SVG = "robust_fraction.svg"
CONFUSION_CSV = "confusion.csv"
CONFUSION_SVG = "confusion.svg"
COHORT_FILE = "cohort.yaml"


def _out_dir(config: RunConfig, out: str | None) -> Path:
    if out is not None:
        return Path(out)
    if config.output is not None:
        return config.output
    raise ConfigError("no output directory: pass --out or set 'output' in the configuration")


def chain_seed(master: int, subject_index: int, image_index: int, chain_id: str) -> int:
    s = derive_seed(master, subject_index, 41)
    s = derive_seed(s, image_index, 42)
    return derive_seed(s, zlib.crc32(chain_id.encode("utf-8")), 43)


# phantom ----------------------------------------------------------------


def run_phantom(config: RunConfig, out: Path) -> list[dict]:
    """Write a seeded phantom cohort (test and retest images) and a subject list."""
    cohort = config.phantom
    if cohort is None:
        raise ConfigError("the configuration has no 'phantom' section")
    base = cohort.spec
    subjects = []
    for i in range(cohort.n_subjects):
        seed = derive_seed(config.seed, i, 31)
        jitter = np.random.Generator(np.random.Philox(key=derive_seed(config.seed, i, 32)))
        u_axes, u_base = jitter.uniform(-1.0, 1.0, size=2)
        axes = tuple(a * (1.0 + cohort.semi_axes_jitter * u_axes) for a in base.semi_axes)
        spec = PhantomSpec(
            dims=base.dims,
            spacing=base.spacing,
            semi_axes=axes,
            base_hu=base.base_hu + cohort.base_hu_jitter * u_base,
            modulation=base.modulation,
            correlation_mm=base.correlation_mm,
            noise_sigma=base.noise_sigma,
            background_hu=base.background_hu,
            origin=base.origin,
        )
        retest_seed = derive_seed(config.seed, i, 33) if cohort.independent_retest_noise else None
        (v1, m1), (v2, m2) = generate_retest_pair(spec, cohort.delta, seed, retest_seed)
        sid = f"subject{i + 1:03d}"
        names = {}
        for tag, vol, msk in (("test", v1, m1), ("retest", v2, m2)):
            img_name = f"{sid}_{tag}_image.mhd"
            mask_name = f"{sid}_{tag}_mask.mhd"
            save_metaimage(vol, out / img_name)
            save_metaimage(msk, out / mask_name)
            names[tag] = (img_name, mask_name)
        subjects.append(
            {
                "id": sid,
                "image": names["test"][0],
                "mask": names["test"][1],
                "retest": {"image": names["retest"][0], "mask": names["retest"][1]},
            }
        )
    import yaml

    write_text(out / COHORT_FILE, yaml.safe_dump(subjects, sort_keys=False))
    return subjects


# extract ----------------------------------------------------------------


def _versions() -> dict:
    import scipy
    import skimage
    import yaml

    return {
        "radperturb": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "scikit-image": skimage.__version__,
        "pyyaml": yaml.__version__,
        "kernel_backend": _kernels.BACKEND,
    }


def run_extract(config: RunConfig, out: Path, threads: int = 1) -> tuple[Path, int]:
    """Extract features for every subject, image and chain instance.

    Each image contributes one ``original`` row (no perturbation) followed by
    the instances of every chain. Returns the table path and the number of
    rows in which at least one feature is missing.
    """
    config.check_inputs()
    proc = config.processing
    ids = proc.schema()
    rows: list[FeatureRow] = []
    counts = {}
    for s_idx, subject in enumerate(config.subjects):
        for i_idx, (tag, img_path, mask_path) in enumerate(subject.images()):
            volume = load_metaimage(img_path)
            mask = load_mask(mask_path)
            fv = extract_unperturbed(volume, mask, proc)
            rows.append(FeatureRow(subject.id, tag, ORIGINAL, 0, tuple(fv.values.tolist()), fv.reasons))
            for chain in config.chains:
                specs = expand_chain(chain, chain_seed(config.seed, s_idx, i_idx, chain.chain_id))
                counts[chain.chain_id] = len(specs)
                for spec, fv in zip(specs, run_instances(volume, mask, specs, proc, threads)):
                    rows.append(
                        FeatureRow(subject.id, tag, chain.chain_id, spec.index, tuple(fv.values.tolist()), fv.reasons)
                    )
    path = out / FEATURES_FILE
    write_text(path, features_csv(ids, rows))
    incomplete = sum(1 for r in rows if r.reasons)
    manifest = {
        "config_hash": config.config_hash,
        "seed": config.seed,
        "versions": _versions(),
        "chains": counts,
        "subjects": [s.id for s in config.subjects],
        "n_rows": len(rows),
        "n_features": len(ids),
        "rows_with_missing_values": incomplete,
    }
    write_text(out / MANIFEST_FILE, json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path, incomplete


# robustness -------------------------------------------------------------


def _icc_cell(table: np.ndarray):
    """ICC of one feature; returns (IccResult or None, reason)."""
    try:
        return icc_1_1(MeasurementMatrix(table)), ""
    except (DegenerateVariance, TooFewSubjects) as exc:
        return None, type(exc).__name__


def _stack(rows: list[FeatureRow], subjects: list[str]) -> np.ndarray:
    """Array of shape (n_subjects, n_instances, n_features)."""
    by_subject = defaultdict(list)
    for r in rows:
        by_subject[r.subject].append(r)
    blocks = []
    for s in subjects:
        rs = sorted(by_subject[s], key=lambda r: r.instance)
        blocks.append(np.array([r.values for r in rs], dtype=np.float64))
    sizes = {b.shape[0] for b in blocks}
    if len(sizes) != 1:
        raise SchemaMismatch("subjects have different numbers of instances for the same chain")
    return np.stack(blocks)


def run_robustness(config: RunConfig, out: Path) -> Path:
    """Per chain and feature: perturbation ICCs per image, their mean, the
    robust flag, and the test-retest reference when retest images exist."""
    feature_ids, rows = read_features_csv(out / FEATURES_FILE)
    subjects = sorted({r.subject for r in rows})
    if len(subjects) < 2:
        raise TooFewSubjects(f"robustness needs at least 2 subjects, found {len(subjects)}")
    images = sorted({r.image for r in rows}, key=lambda t: (t != "test", t))
    if len(images) > 2:
        raise ConfigError("at most two images per subject are supported")
    chains = []
    for r in rows:
        if r.chain != ORIGINAL and r.chain not in chains:
            chains.append(r.chain)
    threshold = config.icc_threshold

    header = [
        "chain", "feature", "icc", "robust", "reason",
        "icc_image1", "ci_low_image1", "ci_high_image1", "n_used_image1",
        "icc_image2", "ci_low_image2", "ci_high_image2", "n_used_image2",
    ]  # fmt: skip
    out_rows = []
    bias_rows = []

    def cells(res, reason):
        if res is None:
            return ["NaN", "NaN", "NaN", "0"], math.nan, reason
        return [format_float(res.icc), format_float(res.ci_low), format_float(res.ci_high), str(res.n_used)], res.icc, ""

    if len(images) == 2:
        originals = [r for r in rows if r.chain == ORIGINAL]
        per_image = [_stack([r for r in originals if r.image == im], subjects)[:, 0, :] for im in images]
        ref = np.stack(per_image, axis=2)  # subjects x features x 2
        for f, fid in enumerate(feature_ids):
            res, reason = _icc_cell(ref[:, f, :])
            c, icc, reason = cells(res, reason)
            label = classify(icc, threshold)
            out_rows.append([REFERENCE, fid, format_float(icc), str(int(label.robust)), reason or label.reason, *c, "", "", "", ""])

    for chain in chains:
        stacks = [_stack([r for r in rows if r.chain == chain and r.image == im], subjects) for im in images]
        diffs = []
        for f, fid in enumerate(feature_ids):
            parts, iccs, reasons = [], [], []
            for st in stacks:
                res, reason = _icc_cell(st[:, :, f])
                c, icc, reason = cells(res, reason)
                parts += c
                iccs.append(icc)
                reasons.append(reason)
            if len(iccs) == 2:
                icc = average_perturbation_icc(*iccs)
                diffs.append(iccs[0] - iccs[1])
            else:
                icc = iccs[0]
                parts += ["", "", "", ""]
            label = classify(icc, threshold)
            reason = next((r for r in reasons if r), "") or label.reason
            out_rows.append([chain, fid, format_float(icc), str(int(label.robust)), reason, *parts])
        if len(images) == 2:
            d = np.array(diffs)
            finite = d[np.isfinite(d)]
            try:
                z = pooled_bias_z(finite)
                bias_rows.append([chain, str(finite.size), format_float(finite.mean()), format_float(finite.std(ddof=1)), format_float(z), str(int(bias_significant(z))), ""])
            except (ZeroSpread, TooFewSubjects) as exc:
                bias_rows.append([chain, str(finite.size), "NaN", "NaN", "NaN", "0", type(exc).__name__])

    path = out / ICC_FILE
    write_text(path, to_csv(header, out_rows))
    if bias_rows:
        bias_header = ["chain", "n_features", "mean_difference", "sd_difference", "z", "significant", "reason"]
        write_text(out / BIAS_FILE, to_csv(bias_header, bias_rows))
    return path


# report -----------------------------------------------------------------


def read_icc_table(path: Path) -> dict[str, dict[str, bool]]:
    """Robust flags per chain and feature, in file order."""
    reader = csv.DictReader(io.StringIO(read_text(path)))
    if reader.fieldnames is None or not {"chain", "feature", "robust"} <= set(reader.fieldnames):
        raise SchemaMismatch(f"{path} is not an ICC table")
    table: dict[str, dict[str, bool]] = {}
    for row in reader:
        table.setdefault(row["chain"], {})[row["feature"]] = row["robust"] == "1"
    return table


def run_report(config: RunConfig, out: Path) -> list[Path]:
    """Robust-fraction chart per chain and, with a test-retest reference,
    stacked TP/TN/FP/FN bars, each with its CSV."""
    table = read_icc_table(out / ICC_FILE)
    reference = table.pop(REFERENCE, None)
    chains = list(table)
    schema_ids = None
    for c in chains:
        if schema_ids is None:
            schema_ids = set(table[c])
        elif set(table[c]) != schema_ids:
            raise SchemaMismatch(f"chain {c} covers a different feature set")
    labels = ([REFERENCE] if reference is not None else []) + chains
    sources = ([reference] if reference is not None else []) + [table[c] for c in chains]
    rows, fractions = [], []
    for lab, flags in zip(labels, sources):
        n = len(flags)
        k = sum(flags.values())
        frac = k / n if n else math.nan
        fractions.append(frac)
        rows.append([lab, str(n), str(k), format_float(frac)])
    written = [out / FRACTION_CSV, out / FRACTION_SVG]
    write_text(written[0], to_csv(["chain", "n_features", "n_robust", "fraction"], rows))
    write_text(written[1], robust_fraction_svg(labels, fractions))
    if reference is not None and chains:
        crow, cfr = [], []
        for c in chains:
            summary = confusion(reference, table[c])
            fr = summary.fractions()
            cfr.append(fr)
            crow.append([c, str(summary.tp), str(summary.tn), str(summary.fp), str(summary.fn)] + [format_float(fr[k]) for k in ("tp", "tn", "fp", "fn")])
        header = ["chain", "tp", "tn", "fp", "fn", "tp_fraction", "tn_fraction", "fp_fraction", "fn_fraction"]
        written += [out / CONFUSION_CSV, out / CONFUSION_SVG]
        write_text(written[2], to_csv(header, crow))
        write_text(written[3], confusion_svg(chains, cfr))
    return written


# entry point ------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="radperturb", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("phantom", "generate a seeded phantom cohort"),
        ("extract", "extract features for all chain instances"),
        ("robustness", "compute ICCs and robustness labels"),
        ("report", "write robust-fraction and agreement charts"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="YAML run configuration")
        p.add_argument("--seed", type=int, default=None, help="master seed (overrides the configuration)")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--threads", type=int, default=1, help="worker processes (0 = all cores)")
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if args.seed is not None and not 0 <= args.seed < 2**64:
        print("error: --seed must be an unsigned 64-bit integer", file=sys.stderr)
        return EXIT_USAGE
    try:
        config = load_config(args.config, seed=args.seed)
        out = _out_dir(config, args.out)
        if args.command == "phantom":
            out.mkdir(parents=True, exist_ok=True)
        if args.command == "phantom":
            run_phantom(config, out)
        elif args.command == "extract":
            _, incomplete = run_extract(config, out, args.threads)
            if incomplete:
                log.warning("%d row(s) contain missing feature values", incomplete)
        elif args.command == "robustness":
            run_robustness(config, out)
        else:
            run_report(config, out)
    except (ConfigError, SchemaMismatch, TooFewSubjects) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (IoFailure, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except RadPerturbError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
