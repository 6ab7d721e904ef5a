"""Dirichlet fundamental polygons.

The polygon around a center point x0 is the intersection of the half-planes
{z : d(z, x0) <= d(z, g x0)} over group elements g.  Computation happens in
the Klein model centered at x0, where every bisector is a straight chord and
the intersection is ordinary convex clipping; results are converted back to
half-plane points.  Areas come from the angle deficit of a central fan of
hyperbolic triangles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConstructionError
from .halfplane import Isometry, UhpPoint, distance

# A vertex this close (in Klein norm) to the ideal boundary means the
# half-planes do not cut out a compact polygon.
_CLOSED_KLEIN_LIMIT = 1.0 - 1e-9
_CLIP_TOL = 1e-13


def to_disk(z: complex, center: complex) -> complex:
    """Conformal map of the upper half-plane onto the unit disk, center -> 0."""
    return (z - center) / (z - center.conjugate())

def from_disk(w: complex, center: complex) -> complex:
    return (w * center.conjugate() - center) / (w - 1.0)

def disk_to_klein(w: complex) -> complex:
    return 2.0 * w / (1.0 + abs(w) ** 2)

def klein_to_disk(k: complex) -> complex:
    return k / (1.0 + math.sqrt(max(0.0, 1.0 - abs(k) ** 2)))


def _klein_distance(p: complex, q: complex) -> float:
    num = 1.0 - (p.real * q.real + p.imag * q.imag)
    den = math.sqrt((1.0 - abs(p) ** 2) * (1.0 - abs(q) ** 2))
    return math.acosh(max(1.0, num / den))


def _triangle_area(a: float, b: float, c: float) -> float:
    """Area (angle deficit) of the hyperbolic triangle with side lengths a, b, c."""
    if min(a, b, c) <= 0.0:
        return 0.0

    def angle(opp: float, s1: float, s2: float) -> float:
        v = (math.cosh(s1) * math.cosh(s2) - math.cosh(opp)) / (
            math.sinh(s1) * math.sinh(s2)
        )
        return math.acos(min(1.0, max(-1.0, v)))

    return math.pi - angle(a, b, c) - angle(b, c, a) - angle(c, a, b)


@dataclass(frozen=True)
class DirichletDomain:
    """Compact Dirichlet polygon: cyclically ordered vertices, the face-pairing
    isometries (one per side, in side order), circumradius and area."""

    vertices: tuple[UhpPoint, ...]
    face_pairings: tuple[Isometry, ...]
    center: UhpPoint
    circumradius: float
    area: float
    # Klein-model data used by samplers: unit normals and offsets with the
    # polygon equal to {k : normals @ k <= offsets}.
    klein_normals: tuple[tuple[float, float], ...]
    klein_offsets: tuple[float, ...]

    @property
    def side_count(self) -> int:
        return len(self.vertices)

    def side_lengths(self) -> tuple[float, ...]:
        n = len(self.vertices)
        return tuple(
            distance(self.vertices[i], self.vertices[(i + 1) % n]) for i in range(n)
        )

    def contains_klein(self, pts: np.ndarray, pad: float = 1e-12) -> np.ndarray:
        """Vectorized membership test for an (n, 2) array of Klein points."""
        normals = np.asarray(self.klein_normals)
        offsets = np.asarray(self.klein_offsets)
        return np.all(pts @ normals.T <= offsets[None, :] + pad, axis=1)

    def max_convexity_violation(self) -> float:
        """Largest amount by which any vertex leaves any face half-plane
        (Klein scale); convexity holds when this is tiny."""
        pts = []
        for v in self.vertices:
            kk = disk_to_klein(to_disk(v.z, self.center.z))
            pts.append((kk.real, kk.imag))
        pts = np.asarray(pts)
        normals = np.asarray(self.klein_normals)
        offsets = np.asarray(self.klein_offsets)
        return float(np.max(pts @ normals.T - offsets[None, :]))


def _clip(poly, edge_ids, normal, offset, plane_id):
    """Clip a convex polygon (vertex list + per-edge plane ids) against
    normal . x <= offset."""
    n = len(poly)
    sides = [normal[0] * p.real + normal[1] * p.imag - offset for p in poly]
    if all(s <= _CLIP_TOL for s in sides):
        return poly, edge_ids, False
    out_pts: list[complex] = []
    out_ids: list[int] = []
    for i in range(n):
        j = (i + 1) % n
        pi, pj = poly[i], poly[j]
        si, sj = sides[i], sides[j]
        if si <= _CLIP_TOL:
            out_pts.append(pi)
            out_ids.append(edge_ids[i])
            if sj > _CLIP_TOL:
                t = si / (si - sj)
                out_pts.append(pi + t * (pj - pi))
                out_ids.append(plane_id)
        elif sj <= _CLIP_TOL:
            t = si / (si - sj)
            out_pts.append(pi + t * (pj - pi))
            out_ids.append(edge_ids[i])
    return out_pts, out_ids, True


def dirichlet_polygon(
    mats: np.ndarray,
    displacements: np.ndarray,
    center: UhpPoint,
    pairings: list[Isometry] | None = None,
    require_closed: bool = True,
) -> DirichletDomain:
    """Intersect the bisector half-planes of the orbit points g(center).

    ``mats``: (n, 2, 2) array of group elements (identity excluded),
    ``displacements``: their displacements at the center.  Raises
    ConstructionError when the supplied elements do not cut out a compact
    polygon (enumeration radius too small).
    """
    z0 = center.z
    order = np.argsort(displacements)
    mats = mats[order]
    disp = displacements[order]

    # Orbit points in Klein coordinates.
    zz = (mats[:, 0, 0] * z0 + mats[:, 0, 1]) / (mats[:, 1, 0] * z0 + mats[:, 1, 1])
    w = (zz - z0) / (zz - np.conj(z0))
    k = 2.0 * w / (1.0 + np.abs(w) ** 2)
    norms = np.abs(k)

    # Start from a square strictly containing the unit disk.
    poly = [complex(2, 2), complex(-2, 2), complex(-2, -2), complex(2, -2)]
    edge_ids = [-1, -1, -1, -1]

    for idx in range(len(mats)):
        if norms[idx] < 1e-12:
            continue
        u = k[idx] / norms[idx]
        offset = math.tanh(disp[idx] / 2.0)
        cur_max = max(abs(p) for p in poly)
        if offset >= cur_max:
            # Sorted by displacement: no later bisector can cut the polygon.
            break
        poly, edge_ids, _ = _clip(poly, edge_ids, (u.real, u.imag), offset, idx)
        if len(poly) < 3:
            raise ConstructionError("Dirichlet polygon collapsed; inconsistent input")

    if require_closed and any(abs(p) >= _CLOSED_KLEIN_LIMIT for p in poly):
        raise ConstructionError(
            "Dirichlet polygon does not close up; enlarge the enumeration radius"
        )
    if any(i < 0 for i in edge_ids):
        raise ConstructionError(
            "Dirichlet polygon not bounded by bisectors; enlarge the enumeration radius"
        )

    # Fan triangulation from the center for area and circumradius.
    n = len(poly)
    radii = [math.atanh(min(abs(p), 1.0 - 1e-15)) for p in poly]
    area = 0.0
    for i in range(n):
        j = (i + 1) % n
        area += _triangle_area(radii[i], radii[j], _klein_distance(poly[i], poly[j]))

    verts = []
    for p in poly:
        z = from_disk(klein_to_disk(p), z0)
        verts.append(UhpPoint(z.real, z.imag))

    face_mats = []
    normals = []
    offsets = []
    for i in range(n):
        gi = edge_ids[i]
        if pairings is not None:
            face_mats.append(pairings[order[gi]])
        else:
            m = mats[gi]
            face_mats.append(Isometry(m[0, 0], m[0, 1], m[1, 0], m[1, 1]))
        u = k[gi] / norms[gi]
        normals.append((u.real, u.imag))
        offsets.append(math.tanh(disp[gi] / 2.0))

    return DirichletDomain(
        vertices=tuple(verts),
        face_pairings=tuple(face_mats),
        center=center,
        circumradius=max(radii),
        area=area,
        klein_normals=tuple(normals),
        klein_offsets=tuple(offsets),
    )
