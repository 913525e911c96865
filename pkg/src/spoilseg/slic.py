"""SLIC superpixel clustering in the joint (L, a, b, x, y) space.

Cluster centers start on a regular grid of step S = round(sqrt(N/k)), are
nudged to the lowest-gradient pixel of their 3x3 neighbourhood, then iterate
windowed assignment / mean update.  The distance is
D = sqrt(d_lab^2 + (d_xy / S)^2 * m^2) with compactness weight m.  A final
connectivity pass absorbs fragments below a quarter of the nominal
superpixel area into the neighbour sharing the longest boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grids import LabelMap, LabImage
from .labels import relabel_connected


@dataclass
class SlicParams:
    superpixels: int = 550
    compactness: float = 30.0
    iterations: int = 10
    min_region_size: int | None = None  # None: quarter of the nominal area

    def __post_init__(self) -> None:
        if not self.superpixels >= 1:
            raise ValueError("superpixels must be >= 1")
        if not self.compactness > 0:
            raise ValueError("compactness must be positive")
        if not self.iterations >= 1:
            raise ValueError("iterations must be >= 1")
        if self.min_region_size is not None and self.min_region_size < 1:
            raise ValueError("min_region_size must be >= 1")


def _seed_centers(lab: np.ndarray, k: int, step: int) -> np.ndarray:
    """Initial (L, a, b, x, y) centers on an even grid, moved off gradients.

    A center moves to a 3x3 neighbour only when that pixel has strictly
    lower gradient, so uniform images keep the exact grid.
    """
    h, w, _ = lab.shape
    ny = max(1, round(h / step))
    nx = max(1, round(w / step))
    cys = np.floor((np.arange(ny) + 0.5) * h / ny).astype(np.int64)
    cxs = np.floor((np.arange(nx) + 0.5) * w / nx).astype(np.int64)

    right = np.concatenate([lab[:, 1:], lab[:, -1:]], axis=1)
    left = np.concatenate([lab[:, :1], lab[:, :-1]], axis=1)
    down = np.concatenate([lab[1:, :], lab[-1:, :]], axis=0)
    up = np.concatenate([lab[:1, :], lab[:-1, :]], axis=0)
    grad = ((right - left) ** 2).sum(axis=2) + ((down - up) ** 2).sum(axis=2)

    centers = []
    for cy in cys:
        for cx in cxs:
            best_y, best_x = int(cy), int(cx)
            best_g = grad[best_y, best_x]
            for dy in (-1, 0, 1):
                for dx in (-1, 0, 1):
                    y, x = int(cy) + dy, int(cx) + dx
                    if 0 <= y < h and 0 <= x < w and grad[y, x] < best_g:
                        best_g = grad[y, x]
                        best_y, best_x = y, x
            centers.append([*lab[best_y, best_x], float(best_x), float(best_y)])
    return np.array(centers, dtype=np.float64)


def slic_assign(
    lab: np.ndarray, centers: np.ndarray, step: int, compactness: float
) -> np.ndarray:
    """One SLIC assignment sweep: label each pixel with its minimal-D center.

    Each center competes only inside its (2S+1)-sided window; pixels claimed
    by no window fall back to an exhaustive search.  Ties keep the
    lower-index center.  Returns 0-based center indices shaped like the image.
    """
    h, w, _ = lab.shape
    ys, xs = np.mgrid[0:h, 0:w].astype(np.float64)
    best_d2 = np.full((h, w), np.inf)
    assign = np.full((h, w), -1, dtype=np.int64)
    m2_s2 = (compactness / step) ** 2

    for ci, (L, a, b, cx, cy) in enumerate(centers):
        y0, y1 = max(0, int(cy) - step), min(h, int(cy) + step + 1)
        x0, x1 = max(0, int(cx) - step), min(w, int(cx) + step + 1)
        if y0 >= y1 or x0 >= x1:
            continue
        win = lab[y0:y1, x0:x1]
        d_lab2 = ((win - np.array([L, a, b])) ** 2).sum(axis=2)
        d_xy2 = (xs[y0:y1, x0:x1] - cx) ** 2 + (ys[y0:y1, x0:x1] - cy) ** 2
        d2 = d_lab2 + d_xy2 * m2_s2
        better = d2 < best_d2[y0:y1, x0:x1]
        assign[y0:y1, x0:x1][better] = ci
        best_d2[y0:y1, x0:x1][better] = d2[better]

    orphans = assign < 0
    if orphans.any():
        oy, ox = np.nonzero(orphans)
        for y, x in zip(oy, ox):
            d_lab2 = ((centers[:, :3] - lab[y, x]) ** 2).sum(axis=1)
            d_xy2 = (centers[:, 3] - x) ** 2 + (centers[:, 4] - y) ** 2
            assign[y, x] = int(np.argmin(d_lab2 + d_xy2 * m2_s2))
    return assign


def slic(img: LabImage, params: SlicParams | None = None) -> LabelMap:
    """SLIC superpixels: labels 1..K, every region one connected component."""
    p = params if params is not None else SlicParams()
    lab = img.values
    h, w, _ = lab.shape
    n = h * w
    if p.superpixels > n:
        raise ValueError("superpixel count exceeds pixel count")

    step = max(1, round(math.sqrt(n / p.superpixels)))
    centers = _seed_centers(lab, p.superpixels, step)
    ys, xs = np.mgrid[0:h, 0:w].astype(np.float64)

    assign = slic_assign(lab, centers, step, p.compactness)
    for _ in range(p.iterations - 1):
        counts = np.bincount(assign.ravel(), minlength=len(centers)).astype(np.float64)
        nonempty = counts > 0
        feats = [lab[..., 0], lab[..., 1], lab[..., 2], xs, ys]
        for col, feat in enumerate(feats):
            sums = np.bincount(assign.ravel(), weights=feat.ravel(), minlength=len(centers))
            centers[nonempty, col] = sums[nonempty] / counts[nonempty]
        assign = slic_assign(lab, centers, step, p.compactness)

    min_size = p.min_region_size
    if min_size is None:
        min_size = max(1, (n // p.superpixels) // 4)
    return enforce_connectivity(LabelMap(assign.astype(np.int32) + 1), min_size)


def _boundary_counts(labels: np.ndarray) -> dict[tuple[int, int], int]:
    """Shared 4-adjacent pixel-pair counts between distinct labels."""
    pairs = []
    if labels.shape[1] > 1:
        pairs.append(np.column_stack([labels[:, :-1].ravel(), labels[:, 1:].ravel()]))
    if labels.shape[0] > 1:
        pairs.append(np.column_stack([labels[:-1, :].ravel(), labels[1:, :].ravel()]))
    counts: dict[tuple[int, int], int] = {}
    if not pairs:
        return counts
    allp = np.vstack(pairs)
    allp = allp[allp[:, 0] != allp[:, 1]]
    allp.sort(axis=1)
    uniq, cnt = np.unique(allp, axis=0, return_counts=True)
    for (a, b), c in zip(uniq, cnt):
        counts[(int(a), int(b))] = int(c)
    return counts


def enforce_connectivity(label_map: LabelMap, min_size: int) -> LabelMap:
    """Split labels into components, then absorb fragments below min_size.

    The smallest fragment is absorbed first (ties: lower id) into the
    adjacent component sharing the longest boundary (ties: lower id).
    Background pixels are left untouched and never absorb anything.
    """
    current = relabel_connected(label_map, connectivity=4)
    labels = current.labels.astype(np.int64)
    n_labels = int(labels.max()) + 1
    if n_labels <= 1:
        return current
    sizes = np.bincount(labels.ravel(), minlength=n_labels).astype(np.int64)

    boundary: dict[int, dict[int, int]] = {l: {} for l in range(1, n_labels)}
    for (a, b), c in _boundary_counts(labels).items():
        if a == 0 or b == 0:
            continue
        boundary[a][b] = boundary[a].get(b, 0) + c
        boundary[b][a] = boundary[b].get(a, 0) + c

    parent = np.arange(n_labels)
    active = {l for l in range(1, n_labels) if sizes[l] > 0}
    skipped: set[int] = set()
    while len(active) > 1:
        small = [l for l in active - skipped if sizes[l] < min_size]
        if not small:
            break
        src = min(small, key=lambda l: (sizes[l], l))
        if not boundary[src]:
            skipped.add(src)  # isolated fragment, nothing to absorb it
            continue
        dst = min(boundary[src], key=lambda l: (-boundary[src][l], l))
        sizes[dst] += sizes[src]
        parent[src] = dst
        for l, c in boundary[src].items():
            del boundary[l][src]
            if l != dst:
                boundary[l][dst] = boundary[l].get(dst, 0) + c
                boundary[dst][l] = boundary[dst].get(l, 0) + c
        boundary[dst].pop(dst, None)
        del boundary[src]
        active.remove(src)

    root = np.arange(n_labels)
    for l in range(n_labels):
        r = l
        while parent[r] != r:
            r = parent[r]
        root[l] = r
    merged = root[labels]
    return relabel_connected(LabelMap(merged.astype(np.int32)), connectivity=4)
