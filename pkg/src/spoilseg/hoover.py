"""Region-matching segmentation quality metrics (Hoover scheme).

Every ground-truth region ends up in exactly one of {correctly detected,
over-segmented, merged into an under-segmentation instance, missed}; every
machine region in exactly one of {correct, over-instance participant,
under-segmented, noise}.  All overlap comparisons and scores use exact
rational arithmetic so the four ground-truth fractions sum to 1 exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import numpy as np

from .grids import LabelMap


def _as_fraction(t: float | Fraction) -> Fraction:
    if isinstance(t, Fraction):
        return t
    # str() keeps the decimal the caller wrote (0.51 -> 51/100)
    return Fraction(str(t))


@dataclass
class OverlapTable:
    """Pixel-overlap contingency between ground-truth and machine regions."""

    gt_sizes: dict[int, int]
    ms_sizes: dict[int, int]
    overlaps: dict[tuple[int, int], int]


@dataclass
class HooverClassification:
    correct_pairs: list[tuple[int, int]] = field(default_factory=list)
    over_instances: list[tuple[int, tuple[int, ...]]] = field(default_factory=list)
    under_instances: list[tuple[int, tuple[int, ...]]] = field(default_factory=list)
    missed_gt: list[int] = field(default_factory=list)
    noise_ms: list[int] = field(default_factory=list)


@dataclass
class HooverScores:
    """The five normalised metrics plus their raw counts.

    Fractions of ground-truth regions except ``noise``, which is the fraction
    of machine regions.  ``correct + over + under + missed == 1`` exactly.
    """

    correct_detection: Fraction
    over_segmentation: Fraction
    under_segmentation: Fraction
    missed: Fraction
    noise: Fraction
    correct_count: int
    over_count: int
    under_count: int
    missed_count: int
    noise_count: int
    n_gt: int
    n_ms: int
    threshold: Fraction

    def as_floats(self) -> dict[str, float]:
        return {
            "correct_detection": float(self.correct_detection),
            "over_segmentation": float(self.over_segmentation),
            "under_segmentation": float(self.under_segmentation),
            "missed": float(self.missed),
            "noise": float(self.noise),
        }

    def to_dict(self) -> dict:
        out = self.as_floats()
        out["correct_plus_over"] = float(self.correct_detection + self.over_segmentation)
        out["counts"] = {
            "correct": self.correct_count,
            "over": self.over_count,
            "under": self.under_count,
            "missed": self.missed_count,
            "noise": self.noise_count,
            "n_gt": self.n_gt,
            "n_ms": self.n_ms,
        }
        out["threshold"] = float(self.threshold)
        return out


def overlap_table(gt: LabelMap, ms: LabelMap) -> OverlapTable:
    """Single-pass pixel tally of region sizes and pairwise intersections.

    Background (label 0) is excluded on both sides.
    """
    if gt.labels.shape != ms.labels.shape:
        raise ValueError("ground truth and machine maps differ in size")
    g = gt.labels.ravel().astype(np.int64)
    m = ms.labels.ravel().astype(np.int64)

    gt_ids, gt_counts = np.unique(g[g > 0], return_counts=True)
    ms_ids, ms_counts = np.unique(m[m > 0], return_counts=True)

    both = (g > 0) & (m > 0)
    base = int(m.max()) + 1
    key = g[both] * base + m[both]
    pairs, pair_counts = np.unique(key, return_counts=True)
    overlaps = {
        (int(k // base), int(k % base)): int(c) for k, c in zip(pairs, pair_counts)
    }
    return OverlapTable(
        gt_sizes={int(i): int(c) for i, c in zip(gt_ids, gt_counts)},
        ms_sizes={int(i): int(c) for i, c in zip(ms_ids, ms_counts)},
        overlaps=overlaps,
    )


def hoover_classify(table: OverlapTable, threshold: float | Fraction = 0.5) -> HooverClassification:
    """Greedy region classification at overlap threshold T in (0, 1].

    Priority is correct > over-segmentation > under-segmentation; each
    region participates in at most one instance.  Candidate correct pairs
    are taken in decreasing overlap (ties: smaller gt id, then ms id);
    over instances scan gt ids ascending, under instances ms ids ascending.
    """
    T = _as_fraction(threshold)
    if not (0 < T <= 1):
        raise ValueError("threshold must lie in (0, 1]")

    gt_sizes, ms_sizes, overlaps = table.gt_sizes, table.ms_sizes, table.overlaps
    for (gi, mi), ov in overlaps.items():
        if ov > min(gt_sizes.get(gi, 0), ms_sizes.get(mi, 0)):
            raise ValueError("overlap exceeds a region size")

    free_gt = set(gt_sizes)
    free_ms = set(ms_sizes)
    result = HooverClassification()

    candidates = [
        (ov, gi, mi)
        for (gi, mi), ov in overlaps.items()
        if ov >= T * ms_sizes[mi] and ov >= T * gt_sizes[gi]
    ]
    candidates.sort(key=lambda it: (-it[0], it[1], it[2]))
    for ov, gi, mi in candidates:
        if gi in free_gt and mi in free_ms:
            result.correct_pairs.append((gi, mi))
            free_gt.remove(gi)
            free_ms.remove(mi)

    by_gt: dict[int, list[int]] = {}
    by_ms: dict[int, list[int]] = {}
    for gi, mi in overlaps:
        by_gt.setdefault(gi, []).append(mi)
        by_ms.setdefault(mi, []).append(gi)

    for gi in sorted(free_gt):
        members = sorted(
            mi
            for mi in by_gt.get(gi, [])
            if mi in free_ms and overlaps[(gi, mi)] >= T * ms_sizes[mi]
        )
        if len(members) >= 2 and sum(overlaps[(gi, mi)] for mi in members) >= T * gt_sizes[gi]:
            result.over_instances.append((gi, tuple(members)))
            free_gt.remove(gi)
            free_ms.difference_update(members)

    for mi in sorted(free_ms):
        members = sorted(
            gi
            for gi in by_ms.get(mi, [])
            if gi in free_gt and overlaps[(gi, mi)] >= T * gt_sizes[gi]
        )
        if len(members) >= 2 and sum(overlaps[(gi, mi)] for gi in members) >= T * ms_sizes[mi]:
            result.under_instances.append((mi, tuple(members)))
            free_ms.remove(mi)
            free_gt.difference_update(members)

    result.missed_gt = sorted(free_gt)
    result.noise_ms = sorted(free_ms)
    return result


def hoover_bruteforce(table: OverlapTable, threshold: float | Fraction = 0.5) -> HooverClassification:
    """Exhaustive-enumeration oracle for :func:`hoover_classify`.

    Enumerates every subset satisfying the instance conditions instead of
    constructing the maximal set directly, then applies the same greedy
    priority.  Limited to 6 regions per side.
    """
    if len(table.gt_sizes) > 6 or len(table.ms_sizes) > 6:
        raise ValueError("instance too large for brute-force enumeration")
    T = _as_fraction(threshold)
    if not (0 < T <= 1):
        raise ValueError("threshold must lie in (0, 1]")

    gt_sizes, ms_sizes, overlaps = table.gt_sizes, table.ms_sizes, table.overlaps

    def ov(gi: int, mi: int) -> int:
        return overlaps.get((gi, mi), 0)

    free_gt = set(gt_sizes)
    free_ms = set(ms_sizes)
    result = HooverClassification()

    # correct pairs: enumerate every pair, then greedy by overlap
    candidates = [
        (ov(gi, mi), gi, mi)
        for gi in sorted(gt_sizes)
        for mi in sorted(ms_sizes)
        if ov(gi, mi) >= T * ms_sizes[mi] and ov(gi, mi) >= T * gt_sizes[gi]
    ]
    candidates.sort(key=lambda it: (-it[0], it[1], it[2]))
    for _, gi, mi in candidates:
        if gi in free_gt and mi in free_ms:
            result.correct_pairs.append((gi, mi))
            free_gt.remove(gi)
            free_ms.remove(mi)

    def qualifying_subsets(pool: list[int], own_size: int, sizes: dict[int, int], pair) -> list[tuple[int, ...]]:
        found = []
        for r in range(2, len(pool) + 1):
            for subset in combinations(pool, r):
                if all(pair(other) >= T * sizes[other] for other in subset) and sum(
                    pair(other) for other in subset
                ) >= T * own_size:
                    found.append(subset)
        return found

    for gi in sorted(free_gt):
        pool = sorted(free_ms)
        subsets = qualifying_subsets(pool, gt_sizes[gi], ms_sizes, lambda mi: ov(gi, mi))
        if subsets:
            # maximal qualifying subset: not contained in any other
            maximal = [s for s in subsets if not any(set(s) < set(o) for o in subsets)]
            assert len(maximal) == 1
            members = maximal[0]
            result.over_instances.append((gi, members))
            free_gt.remove(gi)
            free_ms.difference_update(members)

    for mi in sorted(free_ms):
        pool = sorted(free_gt)
        subsets = qualifying_subsets(pool, ms_sizes[mi], gt_sizes, lambda gi: ov(gi, mi))
        if subsets:
            maximal = [s for s in subsets if not any(set(s) < set(o) for o in subsets)]
            assert len(maximal) == 1
            members = maximal[0]
            result.under_instances.append((mi, members))
            free_ms.remove(mi)
            free_gt.difference_update(members)

    result.missed_gt = sorted(free_gt)
    result.noise_ms = sorted(free_ms)
    return result


def hoover_scores(
    classification: HooverClassification,
    n_gt: int,
    n_ms: int,
    threshold: float | Fraction = 0.5,
) -> HooverScores:
    """Normalise classification counts into the five scores.

    Ground-truth-side fractions use n_gt; the noise fraction uses n_ms
    (0 when there are no machine regions).
    """
    if n_gt <= 0:
        raise ValueError("need at least one ground-truth region")
    T = _as_fraction(threshold)
    correct = len(classification.correct_pairs)
    over = len(classification.over_instances)
    under = sum(len(members) for _, members in classification.under_instances)
    missed = len(classification.missed_gt)
    noise = len(classification.noise_ms)

    scores = HooverScores(
        correct_detection=Fraction(correct, n_gt),
        over_segmentation=Fraction(over, n_gt),
        under_segmentation=Fraction(under, n_gt),
        missed=Fraction(missed, n_gt),
        noise=Fraction(noise, n_ms) if n_ms > 0 else Fraction(0),
        correct_count=correct,
        over_count=over,
        under_count=under,
        missed_count=missed,
        noise_count=noise,
        n_gt=n_gt,
        n_ms=n_ms,
        threshold=T,
    )
    total = (
        scores.correct_detection
        + scores.over_segmentation
        + scores.under_segmentation
        + scores.missed
    )
    if total != 1:
        raise RuntimeError(f"ground-truth fractions sum to {total}, not 1")
    return scores


def evaluate_segmentation(
    gt: LabelMap, ms: LabelMap, threshold: float | Fraction = 0.5
) -> HooverScores:
    """Overlap table, classification and scores in one call."""
    table = overlap_table(gt, ms)
    if not table.gt_sizes:
        raise ValueError("ground truth has no regions")
    classification = hoover_classify(table, threshold)
    return hoover_scores(classification, len(table.gt_sizes), len(table.ms_sizes), threshold)
