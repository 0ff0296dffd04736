"""The three comparison anonymizers: Gaussian blur, box downsampling, superpixels.

All three keep frame dimensions: the downsampler re-expands cell means with
nearest-neighbor replication (deliberately blocky), and the superpixel pass
fills every segment with its mean color.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidFactor, InvalidSegments, InvalidSigma, TooManySegments
from .frames import Frame


# --- Gaussian blur -------------------------------------------------------------


@dataclass(frozen=True)
class GaussianParams:
    sigma: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise InvalidSigma(f"sigma must be positive, got {self.sigma}")

    @property
    def radius(self) -> int:
        return int(np.ceil(3.0 * self.sigma))


def gaussian_kernel(sigma: float) -> np.ndarray:
    """Discrete kernel k_i ~ exp(-i^2 / 2 sigma^2) on [-ceil(3 sigma), +], renormalized."""
    params = GaussianParams(sigma)
    offsets = np.arange(-params.radius, params.radius + 1, dtype=np.float64)
    kernel = np.exp(-(offsets**2) / (2.0 * sigma * sigma))
    return kernel / kernel.sum()


def _convolve_rows(plane: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    r = (len(kernel) - 1) // 2
    padded = np.pad(plane, ((0, 0), (r, r)), mode="symmetric")
    out = np.zeros_like(plane)
    for k in range(len(kernel)):
        out += kernel[k] * padded[:, k : k + plane.shape[1]]
    return out


def gaussian_blur(frame: Frame, params: GaussianParams) -> Frame:
    """Separable blur: horizontal then vertical pass, symmetric boundary extension."""
    kernel = gaussian_kernel(params.sigma)
    planes = []
    for p in frame.planes:
        blurred = _convolve_rows(p, kernel)
        blurred = _convolve_rows(blurred.T, kernel).T
        planes.append(blurred)
    return frame.with_planes(planes)


# --- box downsampling ------------------------------------------------------------


@dataclass(frozen=True)
class DownsampleParams:
    factor: int

    def __post_init__(self):
        if self.factor < 2:
            raise InvalidFactor(f"factor must be >= 2, got {self.factor}")


def _cell_mean_fill(plane: np.ndarray, factor: int) -> np.ndarray:
    h, w = plane.shape
    row_starts = np.arange(0, h, factor)
    col_starts = np.arange(0, w, factor)
    sums = np.add.reduceat(np.add.reduceat(plane, row_starts, axis=0), col_starts, axis=1)
    heights = np.diff(np.append(row_starts, h))
    widths = np.diff(np.append(col_starts, w))
    means = sums / np.outer(heights, widths)
    return np.repeat(np.repeat(means, heights, axis=0), widths, axis=1)


def downsample_anonymize(frame: Frame, params: DownsampleParams) -> Frame:
    """Replace every pixel by the mean of its factor x factor cell (edge cells may be smaller)."""
    if params.factor > min(frame.width, frame.height):
        raise InvalidFactor(
            f"factor {params.factor} exceeds frame extent "
            f"{frame.width}x{frame.height}"
        )
    return frame.with_planes([_cell_mean_fill(p, params.factor) for p in frame.planes])


# --- SLIC superpixels ---------------------------------------------------------------


@dataclass(frozen=True)
class SlicParams:
    segments: int
    compactness: float = 10.0
    iterations: int = 10

    def __post_init__(self):
        if self.segments < 2:
            raise InvalidSegments(f"need at least 2 segments, got {self.segments}")
        if not self.compactness > 0:
            raise InvalidSegments(f"compactness must be positive, got {self.compactness}")


def _init_centers(height: int, width: int, k: int) -> np.ndarray:
    """Place exactly k centers on a regular grid, row-major."""
    ny = int(round(np.sqrt(k * height / width))) or 1
    ny = min(max(ny, 1), height)
    nx = min(max(-(-k // ny), 1), width)
    if nx * ny < k:
        ny = min(height, -(-k // nx))
    centers = []
    for i in range(ny):
        for j in range(nx):
            if len(centers) == k:
                break
            cy = int((i + 0.5) * height / ny)
            cx = int((j + 0.5) * width / nx)
            centers.append((min(cy, height - 1), min(cx, width - 1)))
    return np.array(centers, dtype=np.float64)


def _gradient_energy(planes: tuple[np.ndarray, ...]) -> np.ndarray:
    grad = np.zeros_like(planes[0])
    for p in planes:
        gx = np.zeros_like(p)
        gy = np.zeros_like(p)
        gx[:, 1:-1] = p[:, 2:] - p[:, :-2]
        gy[1:-1, :] = p[2:, :] - p[:-2, :]
        grad += gx**2 + gy**2
    return grad


def _perturb_to_min_gradient(centers: np.ndarray, grad: np.ndarray) -> np.ndarray:
    h, w = grad.shape
    out = centers.copy()
    for idx in range(len(centers)):
        cy, cx = int(centers[idx, 0]), int(centers[idx, 1])
        best = (grad[cy, cx], cy, cx)
        for dy in (-1, 0, 1):
            for dx in (-1, 0, 1):
                y, x = cy + dy, cx + dx
                if 0 <= y < h and 0 <= x < w and grad[y, x] < best[0]:
                    best = (grad[y, x], y, x)
        out[idx] = (best[1], best[2])
    return out


def slic_labels(frame: Frame, params: SlicParams) -> np.ndarray:
    """SLIC segmentation: localized k-means over (color, position), then a
    connectivity pass that absorbs orphan components into the largest adjacent
    label. Fully deterministic: centers scan row-major, ties keep the lowest
    label index."""
    h, w = frame.height, frame.width
    n = h * w
    k = params.segments
    if k > n:
        raise TooManySegments(f"{k} segments for {n} pixels")
    spacing = float(np.sqrt(n / k))
    color = np.stack(frame.planes, axis=0)  # (c, h, w)

    centers_yx = _perturb_to_min_gradient(_init_centers(h, w, k), _gradient_energy(frame.planes))
    centers_color = np.stack(
        [color[:, int(cy), int(cx)] for cy, cx in centers_yx], axis=0
    )  # (k, c)

    ratio = (params.compactness / spacing) ** 2
    labels = np.zeros((h, w), dtype=np.int64)
    ys = np.arange(h, dtype=np.float64)
    xs = np.arange(w, dtype=np.float64)

    for _ in range(params.iterations):
        best = np.full((h, w), np.inf)
        labels = np.full((h, w), -1, dtype=np.int64)
        for idx in range(k):
            cy, cx = centers_yx[idx]
            y0 = max(0, int(np.floor(cy - spacing)))
            y1 = min(h, int(np.ceil(cy + spacing)) + 1)
            x0 = max(0, int(np.floor(cx - spacing)))
            x1 = min(w, int(np.ceil(cx + spacing)) + 1)
            window = color[:, y0:y1, x0:x1]
            dc2 = np.sum((window - centers_color[idx][:, None, None]) ** 2, axis=0)
            dy2 = (ys[y0:y1, None] - cy) ** 2
            dx2 = (xs[None, x0:x1] - cx) ** 2
            dist2 = dc2 + ratio * (dy2 + dx2)
            better = dist2 < best[y0:y1, x0:x1]
            best[y0:y1, x0:x1][better] = dist2[better]
            labels[y0:y1, x0:x1][better] = idx

        unassigned = labels < 0
        if np.any(unassigned):
            # pixels outside every search window: assign by full distance
            uy, ux = np.nonzero(unassigned)
            pix = color[:, uy, ux]  # (c, m)
            dc2 = np.sum((pix[None, :, :] - centers_color[:, :, None]) ** 2, axis=1)
            ds2 = (uy[None, :] - centers_yx[:, 0:1]) ** 2 + (ux[None, :] - centers_yx[:, 1:2]) ** 2
            labels[uy, ux] = np.argmin(dc2 + ratio * ds2, axis=0)

        flat = labels.ravel()
        counts = np.bincount(flat, minlength=k).astype(np.float64)
        occupied = counts > 0
        sum_y = np.bincount(flat, weights=np.repeat(ys, w), minlength=k)
        sum_x = np.bincount(flat, weights=np.tile(xs, h), minlength=k)
        centers_yx[occupied, 0] = sum_y[occupied] / counts[occupied]
        centers_yx[occupied, 1] = sum_x[occupied] / counts[occupied]
        for c in range(color.shape[0]):
            sums = np.bincount(flat, weights=color[c].ravel(), minlength=k)
            centers_color[occupied, c] = sums[occupied] / counts[occupied]

    return _enforce_connectivity(labels)


def _connected_components(labels: np.ndarray) -> tuple[np.ndarray, list[tuple[int, int]]]:
    """4-connected components of equal-label runs via union-find.

    Returns (component id map, list of (size, label) per component). Component
    ids are renumbered by first row-major appearance so they are deterministic.
    """
    h, w = labels.shape
    n = h * w
    parent = np.arange(n, dtype=np.int64)

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    flat = labels.ravel()
    right = np.nonzero(labels[:, :-1] == labels[:, 1:])
    pairs_r = right[0] * w + right[1]
    down = np.nonzero(labels[:-1, :] == labels[1:, :])
    pairs_d = down[0] * w + down[1]
    for a in (zip(pairs_r, pairs_r + 1), zip(pairs_d, pairs_d + w)):
        for i, j in a:
            ri, rj = find(int(i)), find(int(j))
            if ri != rj:
                if ri < rj:
                    parent[rj] = ri
                else:
                    parent[ri] = rj
    roots = np.array([find(int(i)) for i in range(n)], dtype=np.int64)
    order = {}
    comp = np.empty(n, dtype=np.int64)
    for i in range(n):
        r = roots[i]
        if r not in order:
            order[r] = len(order)
        comp[i] = order[r]
    sizes = np.bincount(comp)
    comp_label = [int(flat[np.argmax(comp == cid)]) for cid in range(len(sizes))]
    info = [(int(sizes[cid]), comp_label[cid]) for cid in range(len(sizes))]
    return comp.reshape(h, w), info


def _enforce_connectivity(labels: np.ndarray) -> np.ndarray:
    """Keep each label's largest component; absorb every orphan component into
    the adjacent label with the largest pixel count (ties to the lowest label)."""
    h, w = labels.shape
    labels = labels.copy()
    while True:
        comp, info = _connected_components(labels)
        main: dict[int, int] = {}
        for cid, (size, label) in enumerate(info):
            if label not in main or size > info[main[label]][0]:
                main[label] = cid
        orphans = [cid for cid, (_, label) in enumerate(info) if main[label] != cid]
        if not orphans:
            return labels
        label_counts = np.bincount(labels.ravel())
        for cid in orphans:
            mask = comp == cid
            neighbor_labels = set()
            ys, xs = np.nonzero(mask)
            for y, x in zip(ys, xs):
                for ny, nx in ((y - 1, x), (y + 1, x), (y, x - 1), (y, x + 1)):
                    if 0 <= ny < h and 0 <= nx < w and not mask[ny, nx]:
                        neighbor_labels.add(int(labels[ny, nx]))
            neighbor_labels.discard(int(info[cid][1]))
            if not neighbor_labels:
                continue
            target = max(sorted(neighbor_labels), key=lambda lb: (label_counts[lb], -lb))
            label_counts[target] += mask.sum()
            label_counts[info[cid][1]] -= mask.sum()
            labels[mask] = target


def superpixel_anonymize(frame: Frame, params: SlicParams) -> Frame:
    """Segment with SLIC, then fill every superpixel with its mean color."""
    labels = slic_labels(frame, params)
    flat = labels.ravel()
    counts = np.bincount(flat)
    planes = []
    for p in frame.planes:
        sums = np.bincount(flat, weights=p.ravel())
        means = sums / np.maximum(counts, 1)
        planes.append(means[flat].reshape(p.shape))
    return frame.with_planes(planes)
