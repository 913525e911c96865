"""Connected-component normalisation for label maps.

Region-matching evaluation assumes every positive label denotes one connected
blob, so segmentations pass through :func:`relabel_connected` before scoring.
"""

from __future__ import annotations

import numpy as np
from scipy import ndimage

from .grids import LabelMap

_STRUCTURE = {
    4: ndimage.generate_binary_structure(2, 1),
    8: ndimage.generate_binary_structure(2, 2),
}


def relabel_connected(label_map: LabelMap, connectivity: int = 4) -> LabelMap:
    """Split every label into its connected components, renumbered 1..K.

    New ids are assigned in raster-scan discovery order; background pixels
    stay 0 and the partition of foreground pixels is preserved.  The result
    is idempotent under a second application.
    """
    if connectivity not in _STRUCTURE:
        raise ValueError("connectivity must be 4 or 8")
    structure = _STRUCTURE[connectivity]
    lab = label_map.labels
    used = np.unique(lab)
    used = used[used > 0]
    if used.size == 0:
        return LabelMap(np.zeros_like(lab))

    # dense 1..V ids so find_objects can bound the per-label work
    dense = np.searchsorted(used, lab).astype(np.int64) + 1
    dense[lab == 0] = 0

    comp = np.zeros(lab.shape, dtype=np.int64)
    next_id = 0
    for i, sl in enumerate(ndimage.find_objects(dense), start=1):
        if sl is None:
            continue
        mask = dense[sl] == i
        cc, n = ndimage.label(mask, structure=structure)
        sub = comp[sl]
        sub[mask] = cc[mask] + next_id
        next_id += n

    # renumber components by first raster-scan occurrence
    flat = comp.ravel()
    first = np.full(next_id + 1, flat.size, dtype=np.int64)
    np.minimum.at(first, flat, np.arange(flat.size))
    order = np.argsort(first[1:], kind="stable")
    rank = np.empty(next_id, dtype=np.int64)
    rank[order] = np.arange(next_id)
    remap = np.concatenate(([0], rank + 1))
    return LabelMap(remap[comp].astype(np.int32))


def drop_small_regions(label_map: LabelMap, min_size: int) -> LabelMap:
    """Zero out every positive label owning fewer than ``min_size`` pixels."""
    if min_size <= 1:
        return LabelMap(label_map.labels.copy())
    lab = label_map.labels
    counts = np.bincount(lab.ravel())
    small = np.flatnonzero(counts < min_size)
    keep = np.ones(counts.size, dtype=bool)
    keep[small] = False
    keep[0] = False
    out = np.where(keep[lab], lab, 0)
    return LabelMap(out.astype(np.int32))
