"""Small planar geometry helpers shared across the toolkit.

Conventions: angles are radians measured counterclockwise from the +x
axis, wrapped into (-pi, pi]; "forward" for the ego vehicle is +y, i.e.
heading pi/2. Oriented boxes have their length axis along the heading.
"""

import math

import numpy as np

TWO_PI = 2.0 * math.pi
FORWARD_HEADING = math.pi / 2.0


def wrap_angle(a):
    """Wrap an angle (scalar or array) into (-pi, pi]."""
    return math.pi - np.mod(math.pi - np.asarray(a, dtype=float), TWO_PI)


def rotation(theta):
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def box_corners(cx, cy, heading, length, width):
    """Corners of an oriented rectangle, counterclockwise, shape (4, 2)."""
    local = np.array(
        [
            [length / 2.0, width / 2.0],
            [-length / 2.0, width / 2.0],
            [-length / 2.0, -width / 2.0],
            [length / 2.0, -width / 2.0],
        ]
    )
    return local @ rotation(heading).T + np.array([cx, cy])


def polygon_area(poly):
    """Signed shoelace area; positive for counterclockwise vertex order."""
    p = np.asarray(poly, dtype=float)
    x, y = p[:, 0], p[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def points_in_polygon(points, poly):
    """Even-odd containment test for an array of points, shape (n, 2).

    Points exactly on an edge may land on either side; callers needing
    strict interiors should use polygon_boundary_distance as well.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    p = np.asarray(poly, dtype=float)
    x1, y1 = p[:, 0], p[:, 1]
    x2, y2 = np.roll(x1, -1), np.roll(y1, -1)
    px = pts[:, 0][:, None]
    py = pts[:, 1][:, None]
    crosses = (y1 <= py) != (y2 <= py)
    with np.errstate(divide="ignore", invalid="ignore"):
        xint = x1 + (py - y1) * (x2 - x1) / (y2 - y1)
    hits = crosses & (px < xint)
    return np.sum(hits, axis=1) % 2 == 1


def polygon_boundary_distance(points, poly):
    """Distance from each point to the closest polygon edge, shape (n,)."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    p = np.asarray(poly, dtype=float)
    a = p
    b = np.roll(p, -1, axis=0)
    ab = b - a
    ab2 = np.maximum(np.sum(ab * ab, axis=1), 1e-300)
    ap = pts[:, None, :] - a[None, :, :]
    t = np.clip(np.sum(ap * ab[None, :, :], axis=2) / ab2[None, :], 0.0, 1.0)
    closest = a[None, :, :] + t[:, :, None] * ab[None, :, :]
    d = np.linalg.norm(pts[:, None, :] - closest, axis=2)
    return np.min(d, axis=1)


def polygon_is_simple(poly):
    """True when no two non-adjacent edges intersect."""
    p = np.asarray(poly, dtype=float)
    m = len(p)
    if m < 3:
        return False
    a = p
    b = np.roll(p, -1, axis=0)

    def orient(p0, p1, q):
        return (p1[..., 0] - p0[..., 0]) * (q[..., 1] - p0[..., 1]) - (
            p1[..., 1] - p0[..., 1]
        ) * (q[..., 0] - p0[..., 0])

    i_idx, j_idx = np.triu_indices(m, k=2)
    keep = ~((i_idx == 0) & (j_idx == m - 1))
    i_idx, j_idx = i_idx[keep], j_idx[keep]
    if len(i_idx) == 0:
        return True
    a1, b1 = a[i_idx], b[i_idx]
    a2, b2 = a[j_idx], b[j_idx]
    d1 = orient(a1, b1, a2)
    d2 = orient(a1, b1, b2)
    d3 = orient(a2, b2, a1)
    d4 = orient(a2, b2, b1)
    proper = (d1 * d2 < 0) & (d3 * d4 < 0)
    if np.any(proper):
        return False
    # collinear overlap: any zero orientation with overlapping bounding boxes
    degen = (d1 == 0) | (d2 == 0) | (d3 == 0) | (d4 == 0)
    if np.any(degen):
        lo1 = np.minimum(a1, b1)[degen]
        hi1 = np.maximum(a1, b1)[degen]
        lo2 = np.minimum(a2, b2)[degen]
        hi2 = np.maximum(a2, b2)[degen]
        touch = np.all((lo1 <= hi2) & (lo2 <= hi1), axis=1)
        zero1 = (d1 == 0) & (d2 == 0)
        if np.any(touch & zero1[degen]):
            return False
    return True


def boxes_overlap(box_a, box_b):
    """Separating-axis overlap test for two oriented rectangles.

    Each box is (cx, cy, heading, length, width). Touching edges count
    as overlap.
    """
    ca = box_corners(*box_a)
    cb = box_corners(*box_b)
    for corners in (ca, cb):
        edges = np.roll(corners, -1, axis=0) - corners
        axes = np.stack([-edges[:, 1], edges[:, 0]], axis=1)
        for ax in axes[:2]:  # rectangle: two unique edge directions
            pa = ca @ ax
            pb = cb @ ax
            if pa.max() < pb.min() or pb.max() < pa.min():
                return False
    return True
