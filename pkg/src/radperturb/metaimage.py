"""Reading and writing the MetaImage (``.mha``/``.mhd``) subset used for volumes.

Only uncompressed, little-endian, single-channel 3-D images are handled.
``.mha`` files keep the payload inline (``ElementDataFile = LOCAL``);
``.mhd`` files point at a sibling ``.raw`` file.
"""

from __future__ import annotations

import logging
from pathlib import Path

import numpy as np

from .errors import DataSizeMismatch, DimensionUnsupported, IoFailure, MalformedHeader
from .volume import RoiMask, Volume

log = logging.getLogger(__name__)

ELEMENT_TYPES = {
    "MET_CHAR": np.dtype("<i1"),
    "MET_SHORT": np.dtype("<i2"),
    "MET_INT": np.dtype("<i4"),
    "MET_FLOAT": np.dtype("<f4"),
    "MET_DOUBLE": np.dtype("<f8"),
}

MANDATORY = ("ObjectType", "NDims", "DimSize", "ElementSpacing", "Offset", "ElementType", "ElementDataFile")

# Keys we understand but do not need; everything else triggers a warning.
_KNOWN_OPTIONAL = {
    "BinaryData",
    "BinaryDataByteOrderMSB",
    "ElementByteOrderMSB",
    "CompressedData",
    "TransformMatrix",
    "Rotation",
    "Orientation",
    "CenterOfRotation",
    "AnatomicalOrientation",
    "ElementNumberOfChannels",
    "HeaderSize",
    "Comment",
}

_ALIASES = {"Position": "Offset", "Origin": "Offset"}


def _parse_header(lines: list[str]) -> dict[str, str]:
    header: dict[str, str] = {}
    for line in lines:
        if not line.strip():
            continue
        if "=" not in line:
            raise MalformedHeader(f"header line without '=': {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        key = _ALIASES.get(key, key)
        if key not in MANDATORY and key not in _KNOWN_OPTIONAL:
            log.warning("ignoring unknown MetaImage key %r", key)
        header[key] = value
    return header


def _floats(header: dict[str, str], key: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in header[key].split())
    except ValueError as exc:
        raise MalformedHeader(f"{key}: cannot parse {header[key]!r}") from exc


def _read_header_and_payload(path: Path) -> tuple[dict[str, str], bytes]:
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    lines: list[str] = []
    pos = 0
    while True:
        end = raw.find(b"\n", pos)
        if end < 0:
            raise MalformedHeader(f"{path}: header is not terminated by ElementDataFile")
        try:
            line = raw[pos:end].decode("ascii").rstrip("\r")
        except UnicodeDecodeError as exc:
            raise MalformedHeader(f"{path}: non-text header line") from exc
        lines.append(line)
        pos = end + 1
        if line.split("=", 1)[0].strip() == "ElementDataFile":
            break
    return _parse_header(lines), raw[pos:]


def load_metaimage(path) -> Volume:
    """Load a 3-D MetaImage into a :class:`Volume` (float64 intensities)."""
    path = Path(path)
    header, payload = _read_header_and_payload(path)
    for key in MANDATORY:
        if key not in header:
            raise MalformedHeader(f"{path}: missing mandatory key {key}")
    if header["ObjectType"] != "Image":
        raise MalformedHeader(f"{path}: ObjectType {header['ObjectType']!r} is not Image")
    try:
        ndims = int(header["NDims"])
    except ValueError as exc:
        raise MalformedHeader(f"{path}: bad NDims {header['NDims']!r}") from exc
    if ndims != 3:
        raise DimensionUnsupported(f"{path}: NDims = {ndims}, only 3 is supported")
    if header.get("CompressedData", "False").lower() == "true":
        raise MalformedHeader(f"{path}: compressed payloads are not supported")
    for key in ("BinaryDataByteOrderMSB", "ElementByteOrderMSB"):
        if header.get(key, "False").lower() == "true":
            raise MalformedHeader(f"{path}: big-endian payloads are not supported")
    if int(header.get("ElementNumberOfChannels", "1")) != 1:
        raise MalformedHeader(f"{path}: multi-channel images are not supported")
    if "TransformMatrix" in header:
        tm = _floats(header, "TransformMatrix")
        if tm != (1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0):
            log.warning("%s: non-identity TransformMatrix ignored; grid treated as axis aligned", path)

    try:
        dims = tuple(int(v) for v in header["DimSize"].split())
    except ValueError as exc:
        raise MalformedHeader(f"{path}: bad DimSize {header['DimSize']!r}") from exc
    spacing = _floats(header, "ElementSpacing")
    origin = _floats(header, "Offset")
    if len(dims) != 3 or len(spacing) != 3 or len(origin) != 3:
        raise MalformedHeader(f"{path}: DimSize/ElementSpacing/Offset must have 3 entries")
    etype = header["ElementType"]
    if etype not in ELEMENT_TYPES:
        raise MalformedHeader(f"{path}: unsupported ElementType {etype}")
    dtype = ELEMENT_TYPES[etype]

    data_file = header["ElementDataFile"]
    if data_file != "LOCAL":
        raw_path = path.parent / data_file
        try:
            payload = raw_path.read_bytes()
        except OSError as exc:
            raise IoFailure(f"cannot read payload {raw_path}: {exc}") from exc
    expected = dims[0] * dims[1] * dims[2] * dtype.itemsize
    if len(payload) != expected:
        raise DataSizeMismatch(f"{path}: payload has {len(payload)} bytes, expected {expected}")
    flat = np.frombuffer(payload, dtype=dtype)
    # x varies fastest on disk
    data = flat.reshape(dims[::-1]).transpose(2, 1, 0).astype(np.float64)
    return Volume(data, spacing, origin)


def _fmt(values) -> str:
    return " ".join(format(float(v), ".17g") for v in values)


def _choose_element_type(data: np.ndarray) -> str:
    if data.size and np.all(np.isfinite(data)) and np.all(data == np.round(data)):
        lo, hi = data.min(), data.max()
        if -(2**15) <= lo and hi < 2**15:
            return "MET_SHORT"
        if -(2**31) <= lo and hi < 2**31:
            return "MET_INT"
    return "MET_DOUBLE"


def save_metaimage(volume, path, element_type: str | None = None) -> None:
    """Write a volume or mask as MetaImage.

    Integer-valued grids are stored as ``MET_SHORT`` (or ``MET_INT`` when out
    of 16-bit range), so loading returns exactly the same values. Everything
    else is stored as ``MET_DOUBLE``.
    """
    path = Path(path)
    etype = element_type or _choose_element_type(volume.data)
    dtype = ELEMENT_TYPES[etype]
    payload = np.ascontiguousarray(volume.data.transpose(2, 1, 0)).astype(dtype).tobytes()
    inline = path.suffix.lower() != ".mhd"
    data_file = "LOCAL" if inline else path.with_suffix(".raw").name
    header = "\n".join(
        [
            "ObjectType = Image",
            "NDims = 3",
            "BinaryData = True",
            "BinaryDataByteOrderMSB = False",
            "CompressedData = False",
            f"Offset = {_fmt(volume.origin)}",
            f"ElementSpacing = {_fmt(volume.spacing)}",
            f"DimSize = {' '.join(str(d) for d in volume.dims)}",
            f"ElementType = {etype}",
            f"ElementDataFile = {data_file}",
        ]
    ) + "\n"
    try:
        with open(path, "wb") as fh:
            fh.write(header.encode("ascii"))
            if inline:
                fh.write(payload)
        if not inline:
            path.with_suffix(".raw").write_bytes(payload)
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def load_mask(path):
    """Load a MetaImage as a :class:`~radperturb.volume.RoiMask`."""
    vol = load_metaimage(path)
    return RoiMask(vol.data, vol.spacing, vol.origin)
