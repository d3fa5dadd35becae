"""Classical (Torgerson) multidimensional scaling and quality metrics.

Pairwise distances are squared and double-centered (B = -1/2 J D2 J),
the resulting Gram matrix is eigendecomposed, and the two dominant
eigenpairs give the 2D coordinates. Negative eigenvalues (non-Euclidean
input) are clamped to zero. The eigensolver is a cyclic Jacobi
iteration; at the handful-of-viewpoints scale this is fast, dependency
free and bit-reproducible, which keeps golden layout files stable.

Orientation is pinned so repeat runs serialize identically: eigenpairs
sort by descending eigenvalue (ties by index) and each axis is flipped
so the first point with a nonzero coordinate gets a positive one.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ValidationError
from .scenario import Scenario, from_refs


def jacobi_eigh(matrix, *, tol: float = 1e-12, max_sweeps: int = 100):
    """Eigenvalues and eigenvectors of a dense symmetric matrix.

    Cyclic Jacobi: sweep all upper-triangle pivots, rotating each to
    zero, until the off-diagonal Frobenius norm drops under *tol* or
    *max_sweeps* is hit. Returns (eigenvalues, eigenvectors) with
    eigenvectors[k] the unit vector for eigenvalues[k], unsorted.
    """
    n = len(matrix)
    a = [[float(x) for x in row] for row in matrix]
    v = [[1.0 if i == k else 0.0 for k in range(n)] for i in range(n)]
    if n == 1:
        return [a[0][0]], [[1.0]]
    for _ in range(max_sweeps):
        off = math.sqrt(2.0 * sum(a[p][q] * a[p][q] for p in range(n) for q in range(p + 1, n)))
        if off <= tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p][q]
                if apq == 0.0:
                    continue
                theta = (a[q][q] - a[p][p]) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 1.0 / (2.0 * theta)
                else:
                    sign = 1.0 if theta >= 0.0 else -1.0
                    t = sign / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                for k in range(n):
                    akp, akq = a[k][p], a[k][q]
                    a[k][p] = c * akp - s * akq
                    a[k][q] = s * akp + c * akq
                for k in range(n):
                    apk, aqk = a[p][k], a[q][k]
                    a[p][k] = c * apk - s * aqk
                    a[q][k] = s * apk + c * aqk
                for k in range(n):
                    vkp, vkq = v[k][p], v[k][q]
                    v[k][p] = c * vkp - s * vkq
                    v[k][q] = s * vkp + c * vkq
    eigenvalues = [a[i][i] for i in range(n)]
    eigenvectors = [[v[i][k] for i in range(n)] for k in range(n)]
    return eigenvalues, eigenvectors


@dataclass(frozen=True)
class DistanceMatrix:
    """Symmetric, zero-diagonal, non-negative distances with labels."""

    labels: tuple[str, ...]
    values: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        n = len(self.labels)
        if n < 1:
            raise ValidationError("distance matrix needs at least one point")
        if len(set(self.labels)) != n:
            raise ValidationError("distance matrix labels must be unique")
        if len(self.values) != n or any(len(row) != n for row in self.values):
            raise ValidationError(f"distance matrix must be {n}x{n}")
        for i in range(n):
            if self.values[i][i] != 0.0:
                raise ValidationError(f"distance matrix diagonal must be zero (row {i})")
            for j in range(n):
                if self.values[i][j] < 0.0:
                    raise ValidationError(f"negative distance at ({i},{j})")
                if self.values[i][j] != self.values[j][i]:
                    raise ValidationError(f"asymmetric distance at ({i},{j})")

    def __len__(self) -> int:
        return len(self.labels)


@dataclass(frozen=True)
class Layout2D:
    labels: tuple[str, ...]
    points: tuple[tuple[float, float], ...]
    eigenvalues: tuple[float, ...]  # full spectrum, descending

    @property
    def non_euclidean(self) -> bool:
        """True when a negative eigenvalue exceeds noise level."""
        if not self.eigenvalues:
            return False
        largest = max(self.eigenvalues[0], 0.0)
        threshold = 1e-9 * largest
        return any(e < -threshold and e < 0.0 for e in self.eigenvalues)

    def distance(self, i: int, j: int) -> float:
        (xi, yi), (xj, yj) = self.points[i], self.points[j]
        return math.hypot(xi - xj, yi - yj)


def mds_project(m: DistanceMatrix) -> Layout2D:
    """Embed the distance matrix in 2D by classical MDS."""
    n = len(m)
    if n == 1:
        return Layout2D(m.labels, ((0.0, 0.0),), (0.0,))
    if n == 2:
        d = m.values[0][1]
        return Layout2D(m.labels, ((d / 2.0, 0.0), (-d / 2.0, 0.0)), (d * d / 2.0, 0.0))
    d2 = [[m.values[i][j] ** 2 for j in range(n)] for i in range(n)]
    row_mean = [sum(row) / n for row in d2]
    grand_mean = sum(row_mean) / n
    b = [
        [-0.5 * (d2[i][j] - row_mean[i] - row_mean[j] + grand_mean) for j in range(n)]
        for i in range(n)
    ]
    eigenvalues, eigenvectors = jacobi_eigh(b)
    order = sorted(range(n), key=lambda k: (-eigenvalues[k], k))
    spectrum = tuple(eigenvalues[k] for k in order)
    axes = []
    for axis in range(2):
        lam = spectrum[axis]
        vec = eigenvectors[order[axis]]
        scale = math.sqrt(lam) if lam > 0.0 else 0.0
        coords = [component * scale for component in vec]
        for component in coords:
            if component != 0.0:
                if component < 0.0:
                    coords = [-c for c in coords]
                break
        axes.append(coords)
    points = tuple((axes[0][i], axes[1][i]) for i in range(n))
    return Layout2D(m.labels, points, spectrum)


# ── Projection quality ─────────────────────────────────────────────────


@dataclass(frozen=True)
class PairQuality:
    i: int
    j: int
    computed: float  # distance before projection
    layout: float  # distance after projection
    ratio: float | None  # layout / computed; None when computed == 0


@dataclass(frozen=True)
class HistogramBin:
    lo: float
    hi: float
    count: int


@dataclass(frozen=True)
class QualityMetrics:
    per_pair: tuple[PairQuality, ...]  # all i < j
    mean_ratio: float | None
    variance_ratio: float | None  # population variance
    histogram: tuple[HistogramBin, ...]
    excluded_pairs: int  # pairs with computed == 0


def quality(m: DistanceMatrix, layout: Layout2D) -> QualityMetrics:
    """Per-pair layout/computed ratios with mean, variance, distribution."""
    n = len(m)
    if layout.labels != m.labels or len(layout.points) != n:
        raise ValidationError("layout does not match the distance matrix")
    pairs = []
    ratios = []
    excluded = 0
    for i in range(n):
        for j in range(i + 1, n):
            computed = m.values[i][j]
            laid_out = layout.distance(i, j)
            if computed == 0.0:
                excluded += 1
                pairs.append(PairQuality(i, j, computed, laid_out, None))
            else:
                ratio = laid_out / computed
                ratios.append(ratio)
                pairs.append(PairQuality(i, j, computed, laid_out, ratio))
    if not ratios:
        return QualityMetrics(tuple(pairs), None, None, (), excluded)
    mean = sum(ratios) / len(ratios)
    variance = sum((r - mean) ** 2 for r in ratios) / len(ratios)
    lo, hi = min(ratios), max(ratios)
    if lo == hi:
        histogram = (HistogramBin(lo, hi, len(ratios)),)
    else:
        counts = [0] * 10
        width = (hi - lo) / 10.0
        for r in ratios:
            idx = min(9, int((r - lo) / (hi - lo) * 10.0))
            counts[idx] += 1
        histogram = tuple(
            HistogramBin(lo + k * width, hi if k == 9 else lo + (k + 1) * width, counts[k])
            for k in range(10)
        )
    return QualityMetrics(tuple(pairs), mean, variance, histogram, excluded)


def scenario_from_path(layout: Layout2D, point_ids: list[str], name: str) -> Scenario:
    """Turn a drawn point sequence into a scenario; revisits preserved."""
    if not point_ids:
        raise ValidationError("a drawn path needs at least one point")
    known = set(layout.labels)
    for point_id in point_ids:
        if point_id not in known:
            raise ValidationError(f"unknown point id: {point_id!r}")
    return from_refs(name, list(point_ids))


LABEL_MODES = ("computed", "layout", "ratio")


def _round9(x: float | None):
    if x is None:
        return None
    return round(x, 9)


def export_layout(layout: Layout2D, metrics: QualityMetrics, default_label: str = "computed") -> dict:
    """Machine-readable layout document for the UI.

    Every edge always carries all three label values; *default_label*
    only selects which one a client shows first.
    """
    if default_label not in LABEL_MODES:
        raise ValidationError(f"label mode must be one of {LABEL_MODES}, got {default_label!r}")
    return {
        "points": [
            {"id": label, "x": _round9(x), "y": _round9(y)}
            for label, (x, y) in zip(layout.labels, layout.points)
        ],
        "edges": [
            {
                "a": layout.labels[p.i],
                "b": layout.labels[p.j],
                "computed": _round9(p.computed),
                "layout": _round9(p.layout),
                "ratio": _round9(p.ratio),
            }
            for p in metrics.per_pair
        ],
        "metrics": {
            "meanRatio": _round9(metrics.mean_ratio),
            "varianceRatio": _round9(metrics.variance_ratio),
            "histogram": [
                {"lo": _round9(b.lo), "hi": _round9(b.hi), "count": b.count} for b in metrics.histogram
            ],
            "excludedPairs": metrics.excluded_pairs,
        },
        "defaultLabel": default_label,
    }
