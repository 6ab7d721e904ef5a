"""Upper half-plane model of the hyperbolic plane.

Points, distances and orientation-preserving isometries (real 2x2 matrices of
determinant one acting by Mobius transformations), plus the building blocks
used elsewhere: axis translations, point rotations, normalizing frames, and a
matrix-holonomy evaluator for two-arc bigon configurations.

All tolerances live in the constants below.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import InputDomainError
from .formulas import BigonConfig, Side

# Matrices with |det - 1| <= DET_TOL are renormalized to unit determinant
# (long composition chains drift at the 1e-10 level); anything further from
# 1 is rejected as not an isometry.
DET_TOL = 1e-6
# Half-width of the |trace| - 2 band separating parabolic from the rest.
CLASSIFY_BAND = 1e-9
# Results within MARGINAL_FACTOR * CLASSIFY_BAND of the band are flagged.
MARGINAL_FACTOR = 10.0
# Generic tolerance for algebraic identities (composition, inversion).
ALGEBRA_TOL = 1e-10

INF = math.inf


class Kind(Enum):
    HYPERBOLIC = "hyperbolic"
    PARABOLIC = "parabolic"
    ELLIPTIC = "elliptic"
    IDENTITY = "identity"


@dataclass(frozen=True)
class UhpPoint:
    """Point x + iy of the open upper half-plane (y > 0)."""

    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise InputDomainError(f"non-finite point ({self.x}, {self.y})")
        if self.y <= 0.0:
            raise InputDomainError(f"point must have y > 0, got y={self.y}")

    @property
    def z(self) -> complex:
        return complex(self.x, self.y)

    @staticmethod
    def from_complex(z: complex) -> "UhpPoint":
        return UhpPoint(z.real, z.imag)


def distance(p: UhpPoint, q: UhpPoint) -> float:
    """Hyperbolic distance: cosh d = 1 + |p - q|^2 / (2 Im p Im q)."""
    dx = p.x - q.x
    dy = p.y - q.y
    u = 1.0 + (dx * dx + dy * dy) / (2.0 * p.y * q.y)
    return math.acosh(max(u, 1.0))


@dataclass(frozen=True)
class IsometryClass:
    """Conjugacy data of an isometry.

    translation_length is present iff kind is HYPERBOLIC and then satisfies
    2 cosh(l/2) = |trace|.  marginal flags traces within ten classification
    bands of |trace| = 2, where the parabolic call is numerically delicate.
    """

    kind: Kind
    translation_length: float | None = None
    marginal: bool = False


@dataclass(frozen=True)
class Isometry:
    """Element of PSL(2, R) stored as a unit-determinant matrix [[a,b],[c,d]].

    The representative is sign-normalized on construction (trace >= 0, with a
    lexicographic tie-break at trace 0) so equality up to a global sign flip
    becomes entrywise equality.  Small determinant drift from composition
    chains is renormalized away; determinants beyond DET_TOL are rejected.
    """

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        det = self.a * self.d - self.b * self.c
        if not math.isfinite(det) or abs(det - 1.0) > DET_TOL:
            raise InputDomainError(f"matrix determinant {det!r} is not 1")
        if det != 1.0:
            s = 1.0 / math.sqrt(det)
            object.__setattr__(self, "a", self.a * s)
            object.__setattr__(self, "b", self.b * s)
            object.__setattr__(self, "c", self.c * s)
            object.__setattr__(self, "d", self.d * s)
        tr = self.a + self.d
        flip = tr < 0.0
        if tr == 0.0:
            for entry in (self.a, self.b, self.c):
                if entry != 0.0:
                    flip = entry < 0.0
                    break
        if flip:
            object.__setattr__(self, "a", -self.a)
            object.__setattr__(self, "b", -self.b)
            object.__setattr__(self, "c", -self.c)
            object.__setattr__(self, "d", -self.d)

    @staticmethod
    def identity() -> "Isometry":
        return Isometry(1.0, 0.0, 0.0, 1.0)

    @property
    def trace(self) -> float:
        return self.a + self.d

    def apply(self, p: UhpPoint) -> UhpPoint:
        """Mobius action z -> (az + b) / (cz + d)."""
        z = p.z
        w = (self.a * z + self.b) / (self.c * z + self.d)
        return UhpPoint(w.real, w.imag)

    def compose(self, other: "Isometry") -> "Isometry":
        """Matrix product self * other (apply ``other`` first)."""
        return Isometry(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def __mul__(self, other: "Isometry") -> "Isometry":
        return self.compose(other)

    def inverse(self) -> "Isometry":
        return Isometry(self.d, -self.b, -self.c, self.a)

    def approx_eq(self, other: "Isometry", tol: float = ALGEBRA_TOL) -> bool:
        return (
            abs(self.a - other.a) <= tol
            and abs(self.b - other.b) <= tol
            and abs(self.c - other.c) <= tol
            and abs(self.d - other.d) <= tol
        )

    def classify(self) -> IsometryClass:
        """Classify by |trace| with a +-CLASSIFY_BAND parabolic band."""
        at = abs(self.trace)
        gap = at - 2.0
        marginal = abs(gap) <= MARGINAL_FACTOR * CLASSIFY_BAND
        if gap > CLASSIFY_BAND:
            return IsometryClass(Kind.HYPERBOLIC, 2.0 * math.acosh(at / 2.0), marginal)
        if gap < -CLASSIFY_BAND:
            return IsometryClass(Kind.ELLIPTIC, None, marginal)
        if (
            abs(self.b) <= CLASSIFY_BAND
            and abs(self.c) <= CLASSIFY_BAND
            and abs(self.a - self.d) <= CLASSIFY_BAND
        ):
            return IsometryClass(Kind.IDENTITY, None, marginal)
        return IsometryClass(Kind.PARABOLIC, None, marginal)

    def translation_length(self) -> float:
        """Translation length of a hyperbolic element."""
        cls = self.classify()
        if cls.kind is not Kind.HYPERBOLIC:
            raise InputDomainError(f"translation length undefined for {cls.kind}")
        return cls.translation_length

    def axis(self) -> tuple[float, float]:
        """Ideal endpoints (repelling, attracting) of a hyperbolic element.

        Endpoints are real numbers on the boundary; INF stands for the point
        at infinity.
        """
        if self.classify().kind is not Kind.HYPERBOLIC:
            raise InputDomainError("axis defined only for hyperbolic elements")
        if abs(self.c) < 1e-300:
            # Fixed points: infinity and b / (d - a).
            finite = self.b / (self.d - self.a)
            return (finite, INF) if abs(self.a) > abs(self.d) else (INF, finite)
        disc = math.sqrt(self.trace * self.trace - 4.0)
        r1 = (self.a - self.d - disc) / (2.0 * self.c)
        r2 = (self.a - self.d + disc) / (2.0 * self.c)
        # Attracting fixed point v has |c v + d| > 1.
        if abs(self.c * r2 + self.d) > 1.0:
            return (r1, r2)
        return (r2, r1)


def _to_zero_inf(u: float, v: float) -> Isometry:
    """Unit-determinant map sending boundary points u -> 0 and v -> infinity."""
    if u == v:
        raise InputDomainError("axis endpoints must be distinct")
    if math.isinf(u) and math.isinf(v):
        raise InputDomainError("axis endpoints must be distinct")
    if math.isinf(v):
        return Isometry(1.0, -u, 0.0, 1.0)
    if math.isinf(u):
        return Isometry(0.0, -1.0, 1.0, -v)
    if u > v:
        s = math.sqrt(u - v)
        return Isometry(1.0 / s, -u / s, 1.0 / s, -v / s)
    s = math.sqrt(v - u)
    return Isometry(-1.0 / s, u / s, 1.0 / s, -v / s)


def translation_along(endpoints: tuple[float, float], d: float) -> Isometry:
    """Hyperbolic translation by d > 0 along the geodesic from endpoints[0]
    toward endpoints[1]."""
    if d <= 0.0 or not math.isfinite(d):
        raise InputDomainError(f"translation distance must be positive, got {d}")
    u, v = endpoints
    s = _to_zero_inf(u, v)
    e = math.exp(d / 2.0)
    return s.inverse() * Isometry(e, 0.0, 0.0, 1.0 / e) * s


def rotation_about(p: UhpPoint, phi: float) -> Isometry:
    """Rotation by angle phi about p (counterclockwise for phi > 0)."""
    if not (-2.0 * math.pi < phi < 2.0 * math.pi):
        raise InputDomainError(f"rotation angle must lie in (-2pi, 2pi), got {phi}")
    ch, sh = math.cos(phi / 2.0), math.sin(phi / 2.0)
    rot = Isometry(ch, sh, -sh, ch)
    sy = math.sqrt(p.y)
    move = Isometry(sy, p.x / sy, 0.0, 1.0 / sy)  # i -> p
    return move * rot * move.inverse()


def frame_at(p: UhpPoint, q: UhpPoint) -> Isometry:
    """Isometry sending p to i and q to a point above i on the imaginary axis.

    This is the normalizing frame of the oriented segment p -> q; it is the
    basic tool for mapping one geodesic segment onto another.
    """
    if p == q:
        raise InputDomainError("frame requires two distinct points")
    if abs(p.x - q.x) < 1e-14 * max(1.0, abs(p.x)):
        u, v = (p.x, INF) if q.y > p.y else (INF, p.x)
    else:
        # Center of the semicircular geodesic through p and q.
        c = (p.x * p.x + p.y * p.y - q.x * q.x - q.y * q.y) / (2.0 * (p.x - q.x))
        r = math.hypot(p.x - c, p.y)
        u, v = (c - r, c + r) if q.x > p.x else (c + r, c - r)
    s = _to_zero_inf(u, v)
    t = s.apply(p).y
    rt = math.sqrt(t)
    return Isometry(1.0 / rt, 0.0, 0.0, rt) * s


def point_pair_map(p1: UhpPoint, p2: UhpPoint, q1: UhpPoint, q2: UhpPoint) -> Isometry:
    """The orientation-preserving isometry sending p1 -> q1 and the direction
    toward p2 to the direction toward q2 (exactly p2 -> q2 when the segment
    lengths agree)."""
    return frame_at(q1, q2).inverse() * frame_at(p1, p2)


def axis_frame(g: Isometry, basepoint: UhpPoint | None = None) -> Isometry:
    """Frame F with F g F^-1 = diag(e^{l/2}, e^{-l/2}) and F(b) = i, where b
    is ``basepoint`` projected onto the axis of g (default: the projection
    of i)."""
    u, v = g.axis()
    s = _to_zero_inf(u, v)
    ref = basepoint if basepoint is not None else UhpPoint(0.0, 1.0)
    w = s.apply(ref)
    t = math.hypot(w.x, w.y)  # projection of ref onto the imaginary axis
    rt = math.sqrt(t)
    return Isometry(1.0 / rt, 0.0, 0.0, rt) * s


def bigon_holonomy(cfg: BigonConfig) -> IsometryClass:
    """Holonomy class of the closed curve made of two arcs of length d meeting
    at angles alpha and beta, computed by composing translations and vertex
    rotations (no trigonometric length formula involved).

    Walking the curve turns through the exterior angle pi - alpha at one
    vertex and pi - beta at the other; for the same-side configuration both
    turns have equal sign, for the opposite-side configuration one sign is
    flipped.  Calibration: alpha = beta = pi gives a smooth geodesic of
    length 2d in either configuration.
    """
    if not (0.0 < cfg.alpha <= math.pi and 0.0 < cfg.beta <= math.pi):
        raise InputDomainError("holonomy requires angles in (0, pi]")
    step = translation_along((0.0, INF), cfg.d)
    origin = UhpPoint(0.0, 1.0)
    turn_beta = rotation_about(origin, math.pi - cfg.beta)
    sign = 1.0 if cfg.side is Side.SAME else -1.0
    psi = sign * (math.pi - cfg.alpha)
    turn_alpha = rotation_about(origin, psi) if psi != 0.0 else Isometry.identity()
    return (step * turn_beta * step * turn_alpha).classify()
