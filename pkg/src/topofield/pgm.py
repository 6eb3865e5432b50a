"""PGM (P2 ASCII / P5 binary) raster I/O mapped linearly to [0, 1] fields."""

from __future__ import annotations

import numpy as np

from .grid import DimensionMismatchError, Grid2D, ScalarField


class PgmParseError(ValueError):
    """Malformed PGM data; carries the byte offset where parsing failed."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte offset {offset})")
        self.offset = offset


def _read_header_tokens(data: bytes, count: int, start: int) -> tuple[list[bytes], int]:
    """Read whitespace-separated tokens, skipping '#' comments to end of line."""
    tokens = []
    pos = start
    while len(tokens) < count:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if pos >= len(data):
            raise PgmParseError("unexpected end of header", pos)
        if data[pos : pos + 1] == b"#":
            eol = data.find(b"\n", pos)
            if eol < 0:
                raise PgmParseError("unterminated comment", pos)
            pos = eol + 1
            continue
        end = pos
        while end < len(data) and not data[end : end + 1].isspace():
            end += 1
        tokens.append(data[pos:end])
        pos = end
    return tokens, pos


def load_pgm(path, grid: Grid2D | None = None) -> ScalarField:
    """Load a P2/P5 PGM image as a field with values in [0, 1].

    Pixel values are divided by the file's maxval.  If ``grid`` is given, the
    image dimensions must match it.
    """
    with open(path, "rb") as fh:
        data = fh.read()

    magic, pos = _read_header_tokens(data, 1, 0)
    magic = magic[0]
    if magic not in (b"P2", b"P5"):
        raise PgmParseError(f"not a PGM file (magic {magic!r})", 0)
    fields, pos = _read_header_tokens(data, 3, pos)
    try:
        width, height, maxval = (int(t) for t in fields)
    except ValueError:
        raise PgmParseError(f"non-numeric header field {fields!r}", pos) from None
    if width < 1 or height < 1:
        raise PgmParseError(f"bad dimensions {width}x{height}", pos)
    if not 0 < maxval <= 65535:
        raise PgmParseError(f"maxval {maxval} out of range (1..65535)", pos)

    n = width * height
    if magic == b"P5":
        pos += 1  # exactly one whitespace byte separates header from raster
        bytes_per = 2 if maxval > 255 else 1
        raster = data[pos : pos + n * bytes_per]
        if len(raster) < n * bytes_per:
            raise PgmParseError(
                f"raster truncated: expected {n * bytes_per} bytes, got {len(raster)}",
                pos + len(raster),
            )
        dtype = ">u2" if bytes_per == 2 else np.uint8
        pixels = np.frombuffer(raster, dtype=dtype, count=n).astype(np.float64)
    else:
        try:
            tokens, pos = _read_header_tokens(data, n, pos)
        except PgmParseError as err:
            raise PgmParseError("ASCII raster truncated", err.offset) from None
        try:
            pixels = np.array([int(t) for t in tokens], dtype=np.float64)
        except ValueError:
            raise PgmParseError("non-numeric ASCII pixel", pos) from None

    if np.any(pixels > maxval):
        raise PgmParseError(f"pixel value exceeds maxval {maxval}", pos)
    values = (pixels / maxval).reshape(height, width)
    if grid is None:
        grid = Grid2D(nx=width, ny=height)
    elif (grid.ny, grid.nx) != (height, width):
        raise DimensionMismatchError(
            f"image is {width}x{height}, expected {grid.nx}x{grid.ny}"
        )
    return ScalarField(grid, values)


def save_pgm(f: ScalarField, path) -> None:
    """Write a field as binary P5 with maxval 255, clamping values to [0, 1]."""
    pixels = np.clip(f.values, 0.0, 1.0)
    raster = np.rint(pixels * 255.0).astype(np.uint8)
    header = f"P5\n{f.grid.nx} {f.grid.ny}\n255\n".encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(raster.tobytes())
