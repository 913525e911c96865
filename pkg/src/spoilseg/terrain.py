"""Terrain preprocessing: hillshade derivation and sigmoid contrast stretching.

The hillshade uses Horn's eight-neighbour gradient estimate with the usual
GIS conventions: azimuth in degrees clockwise from north, altitude in degrees
above the horizon.  The stretch maps min-max-normalised values through a
logistic curve rescaled to span [0, 1] exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .grids import GrayImage, ScalarGrid

# sentinel used when the input nodata value would collide with the [0,1] output range
_SAFE_NODATA = -9999.0


@dataclass
class HillshadeParams:
    azimuth: float = 315.0
    altitude: float = 45.0
    z_factor: float = 1.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.azimuth < 360.0:
            raise ValueError("azimuth must lie in [0, 360)")
        if not 0.0 < self.altitude <= 90.0:
            raise ValueError("altitude must lie in (0, 90]")
        if not self.z_factor > 0:
            raise ValueError("z_factor must be positive")


@dataclass
class StretchParams:
    strength: float = 3.0
    scale: float = 2.0

    def __post_init__(self) -> None:
        if not self.strength > 0:
            raise ValueError("strength must be positive")
        if not self.scale > 0:
            raise ValueError("scale must be positive")


def _output_nodata(nodata: float | None) -> float | None:
    if nodata is None:
        return None
    return _SAFE_NODATA if 0.0 <= nodata <= 1.0 else nodata


def hillshade(dsm: ScalarGrid, params: HillshadeParams | None = None) -> ScalarGrid:
    """Illumination in [0, 1] per cell from Horn slope/aspect.

    Gradients are central differences over the eight neighbours weighted
    1-2-1 and divided by 8 x cellsize; borders replicate the edge row/column.
    Cells whose 3x3 window touches nodata become nodata in the output.
    """
    p = params if params is not None else HillshadeParams()
    if dsm.height < 3 or dsm.width < 3:
        raise ValueError("hillshade needs a grid of at least 3x3 cells")
    if dsm.cellsize is None:
        raise ValueError("hillshade needs the grid cellsize")

    z = np.pad(dsm.values, 1, mode="edge")
    a, b, c = z[:-2, :-2], z[:-2, 1:-1], z[:-2, 2:]
    d, f = z[1:-1, :-2], z[1:-1, 2:]
    g, h, i = z[2:, :-2], z[2:, 1:-1], z[2:, 2:]
    denom = 8.0 * dsm.cellsize
    dzdx = ((c + 2.0 * f + i) - (a + 2.0 * d + g)) / denom
    dzdy = ((g + 2.0 * h + i) - (a + 2.0 * b + c)) / denom

    slope = np.arctan(p.z_factor * np.hypot(dzdx, dzdy))
    aspect = np.arctan2(dzdy, -dzdx)
    zenith = math.radians(90.0 - p.altitude)
    az_math = math.radians((360.0 - p.azimuth + 90.0) % 360.0)
    shade = math.cos(zenith) * np.cos(slope) + math.sin(zenith) * np.sin(slope) * np.cos(
        az_math - aspect
    )
    shade = np.maximum(shade, 0.0)

    out_nodata = _output_nodata(dsm.nodata)
    if dsm.nodata is not None:
        touched = ndimage.maximum_filter(dsm.nodata_mask.astype(np.uint8), size=3, mode="nearest")
        shade = np.where(touched > 0, out_nodata, shade)
    return ScalarGrid(shade, cellsize=dsm.cellsize, nodata=out_nodata)


def sigmoidal_stretch(grid: ScalarGrid, params: StretchParams | None = None) -> ScalarGrid:
    """Contrast stretch through a logistic curve, output spanning [0, 1] exactly.

    Non-nodata values are min-max normalised to x in [0, 1], passed through
    s(x) = 1 / (1 + exp(-strength*scale*(x - 0.5))) and rescaled so the grid
    minimum maps to 0 and the maximum to 1.  Nodata passes through.
    """
    p = params if params is not None else StretchParams()
    mask = grid.nodata_mask
    data = grid.values[~mask]
    if data.size == 0:
        raise ValueError("grid holds no data values")
    lo, hi = data.min(), data.max()
    if lo == hi:
        raise ValueError("constant grid: min-max normalisation undefined")

    k = p.strength * p.scale
    values = np.where(mask, lo, grid.values)  # keep the sigmoid off the sentinel
    x = (values - lo) / (hi - lo)
    s = 1.0 / (1.0 + np.exp(-k * (x - 0.5)))
    s0 = 1.0 / (1.0 + math.exp(k * 0.5))
    s1 = 1.0 / (1.0 + math.exp(-k * 0.5))
    y = (s - s0) / (s1 - s0)

    out_nodata = _output_nodata(grid.nodata)
    if grid.nodata is not None:
        y = np.where(mask, out_nodata, y)
    return ScalarGrid(y, cellsize=grid.cellsize, nodata=out_nodata)


def quantize8(grid: ScalarGrid) -> GrayImage:
    """Map [0, 1] values to 0..255 with round-half-up; nodata becomes 0."""
    mask = grid.nodata_mask
    data = grid.values[~mask]
    if data.size and (data.min() < 0.0 or data.max() > 1.0):
        raise ValueError("quantize8 input must lie in [0, 1]")
    q = np.floor(grid.values * 255.0 + 0.5)
    q = np.where(mask, 0.0, q)
    return GrayImage(q.astype(np.uint8))
