"""
Basin-of-attraction rendering
File: fractal.py

Every pixel centre is a complex seed iterated in double precision until it
lands within tol of a declared root, escapes, or runs out of iterations.
Rows are split into blocks rendered on a thread pool; blocks are assembled by
index, so the output never depends on scheduling.
"""

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import IO, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from maps import RationalMap
from rootdyn.config import get_config

logger = logging.getLogger(__name__)

NON_CONVERGENT = -1


@dataclass(frozen=True)
class GridSpec:
    """Pixel lattice over a rectangle of the complex plane (pixel centres)"""
    center: complex
    width: float
    height: float
    cols: int
    rows: int

    def __post_init__(self):
        object.__setattr__(self, "center", complex(self.center))
        if self.width <= 0 or self.height <= 0:
            raise ValueError(f"viewport must have positive size, got {self.width}x{self.height}")
        if self.cols < 1 or self.rows < 1:
            raise ValueError(f"grid needs at least one pixel, got {self.cols}x{self.rows}")
        budget = get_config().render.max_pixels
        if self.cols * self.rows > budget:
            raise ValueError(f"{self.cols}x{self.rows} pixels exceed the budget of {budget}")

    @property
    def pixel_count(self) -> int:
        return self.cols * self.rows

    def pixel_seed(self, c: int, r: int) -> complex:
        real = self.center.real + (c - (self.cols - 1) / 2) * self.width / self.cols
        imag = self.center.imag + ((self.rows - 1) / 2 - r) * self.height / self.rows
        return complex(real, imag)

    def seeds(self, row_start: int = 0, row_stop: Optional[int] = None) -> np.ndarray:
        """Seeds for rows [row_start, row_stop) as a (rows, cols) complex128 array"""
        row_stop = self.rows if row_stop is None else row_stop
        c = np.arange(self.cols, dtype=np.float64)
        r = np.arange(row_start, row_stop, dtype=np.float64)
        real = self.center.real + (c - (self.cols - 1) / 2) * self.width / self.cols
        imag = self.center.imag + ((self.rows - 1) / 2 - r) * self.height / self.rows
        return real[np.newaxis, :] + 1j * imag[:, np.newaxis]


class Verdict(NamedTuple):
    root_index: int
    iterations: int

    @property
    def converged(self) -> bool:
        return self.root_index != NON_CONVERGENT


@dataclass
class BasinImage:
    """Per-pixel root index (NON_CONVERGENT = -1) and iteration counts"""
    grid: GridSpec
    root_index: np.ndarray
    iterations: np.ndarray
    roots: Tuple[complex, ...]
    max_iter: int

    def __post_init__(self):
        shape = (self.grid.rows, self.grid.cols)
        if self.root_index.shape != shape or self.iterations.shape != shape:
            raise ValueError(f"verdict arrays must have shape {shape}")
        if self.root_index.size and self.root_index.max() >= len(self.roots):
            raise ValueError("root index out of range")

    def verdict(self, c: int, r: int) -> Verdict:
        return Verdict(int(self.root_index[r, c]), int(self.iterations[r, c]))

    @property
    def verdicts(self) -> List[Verdict]:
        """Row-major verdict list"""
        return [Verdict(int(i), int(n)) for i, n in zip(self.root_index.ravel(), self.iterations.ravel())]

    def counts(self) -> dict:
        values, counts = np.unique(self.root_index, return_counts=True)
        return {int(v): int(n) for v, n in zip(values, counts)}

    def boundary_mask(self) -> np.ndarray:
        """Pixels with a 4-neighbour of a different verdict"""
        idx = self.root_index
        mask = np.zeros(idx.shape, dtype=bool)
        vertical = idx[1:, :] != idx[:-1, :]
        horizontal = idx[:, 1:] != idx[:, :-1]
        mask[1:, :] |= vertical
        mask[:-1, :] |= vertical
        mask[:, 1:] |= horizontal
        mask[:, :-1] |= horizontal
        return mask

    def boundary_count(self) -> int:
        return int(self.boundary_mask().sum())


def _iterate_block(
    z: np.ndarray,
    num_coeffs: np.ndarray,
    den_coeffs: np.ndarray,
    roots: np.ndarray,
    max_iter: int,
    tol: float,
    escape: float,
) -> Tuple[np.ndarray, np.ndarray]:
    index = np.full(z.shape, NON_CONVERGENT, dtype=np.int32)
    iterations = np.full(z.shape, max_iter, dtype=np.int32)
    active = np.ones(z.shape, dtype=bool)

    with np.errstate(all="ignore"):
        for n in range(max_iter + 1):
            for j, root in enumerate(roots):
                hit = active & (np.abs(z - root) < tol)
                index[hit] = j
                iterations[hit] = n
                active &= ~hit
            if n == max_iter or not active.any():
                break
            z_next = np.polyval(num_coeffs, z) / np.polyval(den_coeffs, z)
            escaped = active & (~np.isfinite(z_next) | (np.abs(z_next) > escape))
            iterations[escaped] = n + 1
            active &= ~escaped
            z = np.where(active, z_next, z)

    return index, iterations


def render(
    G: RationalMap,
    grid: GridSpec,
    roots: Sequence[complex],
    max_iter: int,
    tol: float,
    workers: Optional[int] = None,
) -> BasinImage:
    """Basin image of G over grid; poles, overflow and timeouts are non-convergent"""
    if not roots:
        raise ValueError("render needs at least one root")
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    if max_iter < 0:
        raise ValueError(f"max_iter must be >= 0, got {max_iter}")

    settings = get_config().render
    workers = workers or settings.workers
    num_coeffs = G.num.descending_floats()
    den_coeffs = G.den.descending_floats()
    root_array = np.asarray(roots, dtype=np.complex128)

    block = max(1, math.ceil(grid.rows / (workers * 4)))
    bounds = [(r0, min(r0 + block, grid.rows)) for r0 in range(0, grid.rows, block)]

    def run(bound: Tuple[int, int]) -> Tuple[np.ndarray, np.ndarray]:
        z = grid.seeds(*bound)
        return _iterate_block(z, num_coeffs, den_coeffs, root_array, max_iter, tol, settings.escape_radius)

    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(run, bounds))

    image = BasinImage(
        grid=grid,
        root_index=np.vstack([r[0] for r in results]),
        iterations=np.vstack([r[1] for r in results]),
        roots=tuple(complex(r) for r in roots),
        max_iter=max_iter,
    )
    logger.info(f"rendered {grid.cols}x{grid.rows} basins of {G}: {image.counts()}")
    return image


def _palette_array(palette: Sequence[Sequence[int]]) -> np.ndarray:
    colours = np.asarray(palette, dtype=np.int64)
    if colours.ndim != 2 or colours.shape[1] != 3:
        raise ValueError("palette entries must be RGB triples")
    if (colours < 0).any() or (colours > 255).any():
        raise ValueError("palette channels must lie in [0, 255]")
    return colours.astype(np.uint8)


def ppm_bytes(img: BasinImage, palette: Sequence[Sequence[int]], shade: bool = False) -> bytes:
    """Binary P6 encoding; the last palette entry colours non-convergent pixels"""
    if len(palette) < len(img.roots) + 1:
        raise ValueError(f"palette needs {len(img.roots) + 1} colours, got {len(palette)}")
    colours = _palette_array(palette)
    index = np.where(img.root_index >= 0, img.root_index, len(colours) - 1)
    pixels = colours[index]
    if shade and img.max_iter > 0:
        factor = np.clip(1.0 - img.iterations / img.max_iter, 0.0, 1.0)
        pixels = np.rint(pixels * factor[..., np.newaxis]).astype(np.uint8)
    header = f"P6\n{img.grid.cols} {img.grid.rows}\n255\n".encode("ascii")
    return header + np.ascontiguousarray(pixels, dtype=np.uint8).tobytes()


def write_ppm(
    img: BasinImage,
    palette: Sequence[Sequence[int]],
    destination: Union[str, os.PathLike, IO[bytes]],
    shade: bool = False,
) -> None:
    payload = ppm_bytes(img, palette, shade)
    if hasattr(destination, "write"):
        destination.write(payload)
        return
    with open(destination, "wb") as f:
        f.write(payload)
    logger.info(f"wrote {len(payload)} bytes to {destination}")


def read_ppm_header(source: Union[str, os.PathLike, bytes]) -> Tuple[str, int, int, int, int]:
    """(magic, width, height, maxval, payload offset) of a PPM file"""
    if isinstance(source, bytes):
        data = source
    else:
        with open(source, "rb") as f:
            data = f.read(4096)

    tokens: List[bytes] = []
    pos = 0
    while len(tokens) < 4 and pos < len(data):
        ch = data[pos:pos + 1]
        if ch == b"#":
            pos = data.index(b"\n", pos) + 1
        elif ch.isspace():
            pos += 1
        else:
            end = pos
            while end < len(data) and not data[end:end + 1].isspace():
                end += 1
            tokens.append(data[pos:end])
            pos = end
    if len(tokens) < 4:
        raise ValueError("truncated PPM header")
    # exactly one whitespace byte separates maxval from the payload
    return tokens[0].decode("ascii"), int(tokens[1]), int(tokens[2]), int(tokens[3]), pos + 1
