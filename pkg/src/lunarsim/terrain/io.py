"""Raster file formats: ESRI ASCII grid, the ``LDEM1`` binary grid, and PGM."""

from __future__ import annotations

import logging
import struct
from pathlib import Path

import numpy as np

from ..exceptions import GridFormatError, GridStructureError
from .grid import DemGrid, Raster

logger = logging.getLogger(__name__)

BINARY_MAGIC = b"LDEM1\0"
# magic, 2 reserved bytes, rows, cols, cell_size
_BINARY_HEADER = struct.Struct("<6s2xIId")
DEFAULT_NODATA = -99999.0

_HEADER_KEYS = {
    "ncols", "nrows", "xllcorner", "yllcorner", "xllcenter", "yllcenter",
    "cellsize", "nodata_value",
}


def _sniff(path):
    with open(path, "rb") as fh:
        head = fh.read(6)
    if head == BINARY_MAGIC:
        return "binary"
    if head[:2] in (b"P5", b"P2"):
        return "pgm"
    return "ascii"


def _is_number(token):
    try:
        float(token)
    except ValueError:
        return False
    return True


def read_ascii_grid(path):
    """Parse an ESRI ASCII grid into ``(values, cell_size, origin_x, origin_y, nodata)``.

    The file lists the northern row first; the returned array has row 0 in the south.
    """
    path = Path(path)
    header = {}
    body = []
    body_start = None
    with open(path, encoding="ascii", errors="replace") as fh:
        for lineno, line in enumerate(fh, start=1):
            tokens = line.split()
            if not tokens:
                continue
            if body_start is None and not _is_number(tokens[0]):
                key = tokens[0].lower()
                if key not in _HEADER_KEYS or len(tokens) != 2 or not _is_number(tokens[1]):
                    raise GridFormatError(f"malformed header line {line.strip()!r}", path, lineno)
                if key in header:
                    raise GridFormatError(f"duplicate header key {key!r}", path, lineno)
                header[key] = (float(tokens[1]), lineno)
                continue
            if body_start is None:
                body_start = lineno
            for tok in tokens:
                try:
                    body.append(float(tok))
                except ValueError:
                    raise GridFormatError(f"invalid value {tok!r}", path, lineno) from None

    for key in ("ncols", "nrows", "cellsize"):
        if key not in header:
            raise GridFormatError(f"missing header key {key!r}", path)
    if ("xllcorner" in header) == ("xllcenter" in header):
        raise GridFormatError("exactly one of xllcorner/xllcenter is required", path)
    if ("yllcorner" in header) == ("yllcenter" in header):
        raise GridFormatError("exactly one of yllcorner/yllcenter is required", path)

    def count(key):
        value, lineno = header[key]
        if value != int(value) or value < 1:
            raise GridFormatError(f"{key} must be a positive integer, got {value}", path, lineno)
        return int(value)

    ncols, nrows = count("ncols"), count("nrows")
    cell_size, lineno = header["cellsize"]
    if not cell_size > 0:
        raise GridFormatError(f"cellsize must be positive, got {cell_size}", path, lineno)
    if len(body) != ncols * nrows:
        raise GridStructureError(
            f"header declares {nrows}x{ncols} = {nrows * ncols} values but body has {len(body)}",
            path,
        )
    if "xllcenter" in header:
        origin_x = header["xllcenter"][0]
    else:
        origin_x = header["xllcorner"][0] + 0.5 * cell_size
    if "yllcenter" in header:
        origin_y = header["yllcenter"][0]
    else:
        origin_y = header["yllcorner"][0] + 0.5 * cell_size
    nodata = header["nodata_value"][0] if "nodata_value" in header else None

    values = np.array(body, dtype=np.float64).reshape(nrows, ncols)[::-1]
    if nodata is not None:
        values = np.where(values == nodata, np.nan, values)
    if not np.all(np.isfinite(values[~np.isnan(values)])):
        raise GridFormatError("non-finite elevation values", path)
    if nodata is None and np.isnan(values).any():
        raise GridFormatError("NaN values without a NODATA_value header", path)
    return values, cell_size, origin_x, origin_y, nodata


def write_ascii_grid(raster, path):
    values = raster.values
    nodata = raster.nodata
    if nodata is None and np.isnan(values).any():
        nodata = DEFAULT_NODATA
    lines = [
        f"ncols {raster.cols}",
        f"nrows {raster.rows}",
        f"xllcenter {raster.origin_x!r}",
        f"yllcenter {raster.origin_y!r}",
        f"cellsize {raster.cell_size!r}",
    ]
    if nodata is not None:
        lines.append(f"NODATA_value {nodata!r}")
    fill = DEFAULT_NODATA if nodata is None else nodata
    for row in values[::-1]:
        lines.append(" ".join(repr(fill) if np.isnan(v) else repr(float(v)) for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def read_binary_grid(path):
    """Parse an ``LDEM1`` file into ``(values, cell_size)``; NaN marks nodata."""
    path = Path(path)
    data = path.read_bytes()
    if len(data) < _BINARY_HEADER.size:
        raise GridFormatError("truncated binary header", path)
    magic, rows, cols, cell_size = _BINARY_HEADER.unpack_from(data)
    if magic != BINARY_MAGIC:
        raise GridFormatError(f"bad magic {magic!r}", path)
    if rows < 1 or cols < 1:
        raise GridFormatError(f"invalid dimensions {rows}x{cols}", path)
    if not cell_size > 0:
        raise GridFormatError(f"cell size must be positive, got {cell_size}", path)
    expected = _BINARY_HEADER.size + 4 * rows * cols
    if len(data) != expected:
        raise GridStructureError(
            f"header declares {rows}x{cols} float32 values ({expected} bytes) "
            f"but file has {len(data)} bytes",
            path,
        )
    values = np.frombuffer(data, dtype="<f4", offset=_BINARY_HEADER.size)
    values = values.reshape(rows, cols).astype(np.float64)
    if np.isinf(values).any():
        raise GridFormatError("infinite values in binary grid", path)
    return values, cell_size


def write_binary_grid(values, cell_size, path):
    values = np.asarray(values)
    rows, cols = values.shape
    header = _BINARY_HEADER.pack(BINARY_MAGIC, rows, cols, float(cell_size))
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(values, dtype="<f4").tobytes())


def read_pgm(path):
    """Read a binary (P5) or plain (P2) PGM as an integer array plus its maxval.

    Rows are returned in file order (top of the image first).
    """
    path = Path(path)
    data = path.read_bytes()
    magic = data[:2]
    if magic not in (b"P5", b"P2"):
        raise GridFormatError("not a PGM file", path)
    tokens = []
    pos = 2
    while len(tokens) < 3:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if pos >= len(data):
            raise GridFormatError("truncated PGM header", path)
        if data[pos:pos + 1] == b"#":
            while pos < len(data) and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        tokens.append(data[start:pos])
    try:
        width, height, maxval = (int(t) for t in tokens)
    except ValueError:
        raise GridFormatError(f"malformed PGM header {tokens!r}", path) from None
    if width < 1 or height < 1 or not 0 < maxval < 65536:
        raise GridFormatError(f"invalid PGM header {width}x{height} maxval {maxval}", path)
    if magic == b"P2":
        body = data[pos:].split()
        if len(body) != width * height:
            raise GridStructureError(
                f"expected {width * height} samples, found {len(body)}", path
            )
        img = np.array([int(b) for b in body], dtype=np.int64).reshape(height, width)
    else:
        pos += 1  # single whitespace byte after maxval
        dtype = np.dtype("u1") if maxval < 256 else np.dtype(">u2")
        nbytes = width * height * dtype.itemsize
        if len(data) - pos != nbytes:
            raise GridStructureError(
                f"expected {nbytes} pixel bytes, found {len(data) - pos}", path
            )
        img = np.frombuffer(data, dtype=dtype, offset=pos).reshape(height, width)
    if (img > maxval).any():
        raise GridFormatError("pixel value exceeds maxval", path)
    return img, maxval


def write_pgm(path, image):
    """Write an 8-bit image (row 0 at the top) as binary PGM."""
    image = np.ascontiguousarray(image, dtype=np.uint8)
    if image.ndim != 2:
        raise ValueError(f"image must be 2-D, got shape {image.shape}")
    height, width = image.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{width} {height}\n255\n".encode("ascii"))
        fh.write(image.tobytes())


def load_dem(path) -> DemGrid:
    """Load a DEM from an ESRI ASCII grid or an ``LDEM1`` binary file.

    The binary format carries no georeference, so its origin is ``(0, 0)``.
    """
    path = Path(path)
    kind = _sniff(path)
    if kind == "binary":
        values, cell_size = read_binary_grid(path)
        origin_x = origin_y = 0.0
        nodata = None
    elif kind == "ascii":
        values, cell_size, origin_x, origin_y, nodata = read_ascii_grid(path)
    else:
        raise GridFormatError("PGM is accepted for albedo rasters only, not DEMs", path)
    try:
        dem = DemGrid(values, cell_size, origin_x, origin_y, nodata)
    except ValueError as exc:
        raise GridStructureError(str(exc), path) from None
    logger.debug("loaded %s: %dx%d cells of %g m", path, dem.rows, dem.cols, dem.cell_size)
    return dem


def save_dem(dem, path, fmt=None):
    """Write ``dem`` as ASCII grid (default) or ``LDEM1`` binary.

    ``fmt`` is ``"ascii"`` or ``"binary"``; when omitted, ``.ldem``/``.bin`` suffixes
    select binary.
    """
    path = Path(path)
    if fmt is None:
        fmt = "binary" if path.suffix.lower() in (".ldem", ".bin") else "ascii"
    if fmt == "binary":
        v = dem.values
        lossy = not np.array_equal(v.astype(np.float32).astype(np.float64), v, equal_nan=True)
        if lossy or dem.origin_x != 0 or dem.origin_y != 0:
            logger.warning("%s: binary grids hold float32 values and no origin; "
                           "the round trip is not exact", path)
        write_binary_grid(v, dem.cell_size, path)
    elif fmt == "ascii":
        write_ascii_grid(dem, path)
    else:
        raise ValueError(f"unknown grid format {fmt!r}")


def load_raster(path, like=None) -> Raster:
    """Load a single-channel raster (ASCII, binary, or 8/16-bit PGM).

    PGM samples are scaled to ``[0, 1]`` and flipped so row 0 is south. When ``like``
    is given the raster is registered to it and must have the same dimensions.
    """
    path = Path(path)
    kind = _sniff(path)
    if kind == "pgm":
        img, maxval = read_pgm(path)
        values = img[::-1].astype(np.float64) / maxval
        raster = Raster(values)
    elif kind == "binary":
        values, cell_size = read_binary_grid(path)
        raster = Raster(values, cell_size)
    else:
        values, cell_size, origin_x, origin_y, nodata = read_ascii_grid(path)
        raster = Raster(values, cell_size, origin_x, origin_y, nodata)
    if like is not None:
        if raster.shape != like.shape:
            raise GridStructureError(
                f"raster is {raster.rows}x{raster.cols} but must match {like.rows}x{like.cols}",
                path,
            )
        raster = like.like(raster.values, raster.nodata)
    return raster


def save_raster(raster, path, fmt="binary"):
    if fmt == "binary":
        write_binary_grid(raster.values, raster.cell_size, path)
    elif fmt == "ascii":
        write_ascii_grid(raster, path)
    else:
        raise ValueError(f"unknown grid format {fmt!r}")
