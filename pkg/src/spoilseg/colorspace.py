"""sRGB to CIELAB conversion (D65 reference white)."""

from __future__ import annotations

import numpy as np

from .grids import LabImage, RasterRGB

_SRGB_TO_XYZ = np.array(
    [
        [0.4124564, 0.3575761, 0.1804375],
        [0.2126729, 0.7151522, 0.0721750],
        [0.0193339, 0.1191920, 0.9503041],
    ]
)
# white point as the matrix image of RGB (1,1,1), so pure white lands exactly
# on L=100, a=b=0 and L never exceeds 100
_D65_WHITE = _SRGB_TO_XYZ.sum(axis=1)
_EPS = (6.0 / 29.0) ** 3


def rgb_to_lab(img: RasterRGB) -> LabImage:
    """Convert 8-bit sRGB to CIELAB via linear RGB and XYZ (D65)."""
    c = img.pixels.astype(np.float64) / 255.0
    linear = np.where(c <= 0.04045, c / 12.92, ((c + 0.055) / 1.055) ** 2.4)
    xyz = linear @ _SRGB_TO_XYZ.T / _D65_WHITE
    f = np.where(xyz > _EPS, np.cbrt(xyz), xyz / (3.0 * (6.0 / 29.0) ** 2) + 4.0 / 29.0)
    L = 116.0 * f[..., 1] - 16.0
    a = 500.0 * (f[..., 0] - f[..., 1])
    b = 200.0 * (f[..., 1] - f[..., 2])
    return LabImage(np.stack([L, a, b], axis=-1))
