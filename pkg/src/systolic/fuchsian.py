"""Discrete cocompact groups for closed genus-2 surfaces.

Two constructions are provided: the regular-octagon surface of maximal
systole (preset) and arbitrary genus-2 surfaces from Fenchel-Nielsen
coordinates of the handle/handle/separating-curve pants decomposition.  Both
return four generators satisfying the standard relator
[g1, g2][g3, g4] = 1.

Group elements are enumerated breadth-first over an alphabet containing the
generators and the Dirichlet face pairings, pruning words whose displacement
exceeds the target radius plus a slack covering detours through neighboring
fundamental-domain copies.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from functools import cached_property

import mpmath as mp
import numpy as np

from .errors import ConstructionError, ElementCapError, InputDomainError
from .formulas import JENNI_SYS_UPPER
from .halfplane import INF, Isometry, Kind, UhpPoint, distance, translation_along
from .polygon import DirichletDomain, dirichlet_polygon

# Default cap on enumerated group elements; the environment variable
# SYSTOLIC_ELEMENT_CAP or an explicit argument overrides it.
DEFAULT_ELEMENT_CAP = 10**7
ELEMENT_CAP_ENV = "SYSTOLIC_ELEMENT_CAP"

# Matrix entries are quantized at this scale for deduplication.
_DEDUP_TOL = 1e-7

# Relator residual accepted for a constructed surface.
RELATOR_TOL = 1e-8

# Construction precision (decimal digits) for Fenchel-Nielsen assembly.
_MP_DPS = 40


def _element_cap(explicit: int | None) -> int:
    if explicit is not None:
        return int(explicit)
    env = os.environ.get(ELEMENT_CAP_ENV)
    if env:
        return int(env)
    return DEFAULT_ELEMENT_CAP


# ---------------------------------------------------------------------------
# Vectorized matrix helpers (arrays of 2x2 matrices).


def normalize_batch(mats: np.ndarray) -> np.ndarray:
    """Rescale to unit determinant and normalize the global sign in place."""
    det = mats[:, 0, 0] * mats[:, 1, 1] - mats[:, 0, 1] * mats[:, 1, 0]
    if np.any(det <= 0):
        raise ConstructionError("matrix batch contains non-positive determinants")
    mats /= np.sqrt(det)[:, None, None]
    tr = mats[:, 0, 0] + mats[:, 1, 1]
    mats[tr < 0] *= -1.0
    return mats


def mobius_apply(mats: np.ndarray, z: complex | np.ndarray) -> np.ndarray:
    """Apply an (n, 2, 2) matrix array to a point (or array of points)."""
    return (mats[:, 0, 0] * z + mats[:, 0, 1]) / (mats[:, 1, 0] * z + mats[:, 1, 1])


def displacement_batch(mats: np.ndarray, z0: complex) -> np.ndarray:
    """Hyperbolic distances d(z0, g z0) for an (n, 2, 2) matrix array."""
    w = mobius_apply(mats, z0)
    u = 1.0 + np.abs(w - z0) ** 2 / (2.0 * z0.imag * w.imag)
    return np.arccosh(np.maximum(u, 1.0))


def _iso_to_mat(g: Isometry) -> np.ndarray:
    return np.array([[g.a, g.b], [g.c, g.d]], dtype=float)


def _mat_to_iso(m: np.ndarray) -> Isometry:
    return Isometry(float(m[0, 0]), float(m[0, 1]), float(m[1, 0]), float(m[1, 1]))


def _keys(mats: np.ndarray, offset: float) -> np.ndarray:
    """Quantized void-view keys at _DEDUP_TOL resolution with a grid offset."""
    q = np.floor(mats.reshape(len(mats), 4) / _DEDUP_TOL + offset).astype(np.int64)
    q = np.ascontiguousarray(q)
    return q.view(np.dtype((np.void, 32))).reshape(-1)


class _KeyIndex:
    """Membership index over quantized matrices.

    Two grids offset by half a cell make the lookup robust against entries
    that straddle a quantization boundary: equal matrices (within a small
    fraction of the cell) agree on at least one grid.
    """

    def __init__(self):
        self._tiers_a: list[np.ndarray] = []
        self._tiers_b: list[np.ndarray] = []

    def seen(self, mats: np.ndarray) -> np.ndarray:
        ka, kb = _keys(mats, 0.0), _keys(mats, 0.5)
        hit = np.zeros(len(mats), dtype=bool)
        for tier in self._tiers_a:
            idx = np.searchsorted(tier, ka)
            idx = np.minimum(idx, len(tier) - 1)
            hit |= tier[idx] == ka
        for tier in self._tiers_b:
            idx = np.searchsorted(tier, kb)
            idx = np.minimum(idx, len(tier) - 1)
            hit |= tier[idx] == kb
        return hit

    def add(self, mats: np.ndarray) -> None:
        if len(mats):
            self._tiers_a.append(np.sort(_keys(mats, 0.0)))
            self._tiers_b.append(np.sort(_keys(mats, 0.5)))

    @staticmethod
    def level_unique(mats: np.ndarray) -> np.ndarray:
        """Indices of first occurrences within one candidate batch."""
        ka = _keys(mats, 0.0)
        _, first = np.unique(ka, return_index=True)
        kb = _keys(mats[first], 0.5)
        _, second = np.unique(kb, return_index=True)
        return np.sort(first[np.sort(second)])


def _bfs_ball(
    alphabet: np.ndarray,
    z0: complex,
    store_radius: float,
    prune_radius: float,
    cap: int,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Breadth-first closure of the alphabet under right multiplication.

    Returns (mats, displacements, parents, letters) for all non-identity
    elements found with displacement <= store_radius; words are reconstructed
    by following parents (index -1 is the identity).  Exploration continues
    through elements with displacement <= prune_radius.
    """
    nw = len(alphabet)
    index = _KeyIndex()
    eye = np.eye(2)[None, :, :]
    index.add(eye)

    mats_out: list[np.ndarray] = []
    disp_out: list[np.ndarray] = []
    par_out: list[np.ndarray] = []
    let_out: list[np.ndarray] = []

    frontier = eye
    frontier_idx = np.array([-1], dtype=np.int64)
    total = 0
    while len(frontier):
        prod = np.einsum("fab,lbc->flac", frontier, alphabet).reshape(-1, 2, 2)
        parents = np.repeat(frontier_idx, nw)
        letters = np.tile(np.arange(nw, dtype=np.int16), len(frontier))

        prod = normalize_batch(prod)
        disp = displacement_batch(prod, z0)
        keep = disp <= prune_radius
        prod, parents, letters, disp = prod[keep], parents[keep], letters[keep], disp[keep]
        if not len(prod):
            break

        uniq = _KeyIndex.level_unique(prod)
        prod, parents, letters, disp = prod[uniq], parents[uniq], letters[uniq], disp[uniq]
        fresh = ~index.seen(prod)
        prod, parents, letters, disp = prod[fresh], parents[fresh], letters[fresh], disp[fresh]
        if not len(prod):
            break
        index.add(prod)

        idx = np.arange(total, total + len(prod), dtype=np.int64)
        total += len(prod)
        if total > cap:
            raise ElementCapError(cap)
        mats_out.append(prod)
        disp_out.append(disp)
        par_out.append(parents)
        let_out.append(letters)
        frontier = prod
        frontier_idx = idx

    if not mats_out:
        empty = np.empty((0, 2, 2))
        return empty, np.empty(0), np.empty(0, np.int64), np.empty(0, np.int16), np.empty(0, bool)
    mats = np.concatenate(mats_out)
    disp = np.concatenate(disp_out)
    parents = np.concatenate(par_out)
    letters = np.concatenate(let_out)
    stored = disp <= store_radius + 1e-9
    # Parents must stay resolvable: keep full arrays, mark stored subset.
    return mats, disp, parents, letters, stored


@dataclass(frozen=True)
class FNCoords:
    """Fenchel-Nielsen coordinates of the genus-2 decomposition with two
    handle curves (lengths[0], lengths[1]) and the separating curve
    (lengths[2]); twists are in length units along each curve."""

    lengths: tuple[float, float, float]
    twists: tuple[float, float, float]

    def __post_init__(self):
        if len(self.lengths) != 3 or len(self.twists) != 3:
            raise InputDomainError("need exactly three lengths and three twists")
        for l in self.lengths:
            if not math.isfinite(l) or l <= 0.0:
                raise InputDomainError(f"curve lengths must be positive, got {l}")
        for t in self.twists:
            if not math.isfinite(t):
                raise InputDomainError(f"twists must be finite, got {t}")

    @staticmethod
    def parse(text: str) -> "FNCoords":
        """Parse 'l1,l2,l3,t1,t2,t3'."""
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 6:
            raise InputDomainError(
                f"expected six comma-separated numbers l1,l2,l3,t1,t2,t3, got {text!r}"
            )
        try:
            vals = [float(p) for p in parts]
        except ValueError as exc:
            raise InputDomainError(f"could not parse {text!r}: {exc}") from exc
        return FNCoords(tuple(vals[:3]), tuple(vals[3:]))

    def as_tuple(self) -> tuple[float, ...]:
        return (*self.lengths, *self.twists)


@dataclass(eq=False)
class SurfaceModel:
    """A closed genus-2 hyperbolic surface presented by four isometries with
    relator [g1, g2][g3, g4] = 1."""

    genus: int
    generators: tuple[Isometry, ...]
    provenance: str  # "bolza" or "fenchel-nielsen"
    fn: FNCoords | None
    relator_residual: float
    basepoint: UhpPoint
    _domain: DirichletDomain | None = field(default=None, repr=False)
    _balls: dict = field(default_factory=dict, repr=False)

    def descriptor(self) -> str:
        if self.provenance == "bolza":
            return "bolza"
        vals = ",".join(f"{v:g}" for v in self.fn.as_tuple())
        return f"fn({vals})"

    @property
    def domain(self) -> DirichletDomain:
        """Dirichlet domain at the construction basepoint (computed lazily)."""
        if self._domain is None:
            self._domain = _bootstrap_domain(self)
        return self._domain

    @property
    def r_dom(self) -> float:
        return self.domain.circumradius

    @cached_property
    def _alphabet(self) -> tuple[Isometry, ...]:
        """Enumeration alphabet: generators, inverses, and domain faces."""
        items: list[Isometry] = []
        for g in self.generators:
            items.append(g)
            items.append(g.inverse())
        for f in self.domain.face_pairings:
            if not any(f.approx_eq(h, 1e-9) for h in items):
                items.append(f)
                inv = f.inverse()
                if not any(inv.approx_eq(h, 1e-9) for h in items):
                    items.append(inv)
        return tuple(items)


class GroupBall:
    """All non-identity group elements with displacement at most ``radius``
    from the basepoint, with words over ``alphabet`` (index sequence)."""

    def __init__(self, surface, basepoint, radius, alphabet, mats, disps, parents, letters, stored):
        self.surface = surface
        self.basepoint = basepoint
        self.radius = radius
        self.alphabet: tuple[Isometry, ...] = alphabet
        self._mats_all = mats
        self._disp_all = disps
        self._parents = parents
        self._letters = letters
        self._stored = stored

    @property
    def mats(self) -> np.ndarray:
        return self._mats_all[self._stored]

    @property
    def displacements(self) -> np.ndarray:
        return self._disp_all[self._stored]

    def __len__(self) -> int:
        return int(np.count_nonzero(self._stored))

    def word_for(self, full_index: int) -> tuple[int, ...]:
        out = []
        i = full_index
        while i >= 0:
            out.append(int(self._letters[i]))
            i = int(self._parents[i])
        return tuple(reversed(out))

    @property
    def stored_indices(self) -> np.ndarray:
        return np.nonzero(self._stored)[0]

    @property
    def elements(self) -> list[tuple[Isometry, tuple[int, ...]]]:
        return [
            (_mat_to_iso(self._mats_all[i]), self.word_for(i))
            for i in self.stored_indices
        ]

    def restricted(self, radius: float) -> "GroupBall":
        if radius > self.radius + 1e-9:
            raise InputDomainError("cannot restrict to a larger radius")
        stored = self._stored & (self._disp_all <= radius + 1e-9)
        return GroupBall(
            self.surface, self.basepoint, radius, self.alphabet,
            self._mats_all, self._disp_all, self._parents, self._letters, stored,
        )


# ---------------------------------------------------------------------------
# Construction helpers (extended precision).


def _mp_mul(*ms):
    out = ms[0]
    for b in ms[1:]:
        a = out
        out = [
            [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
            [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
        ]
    return out


def _mp_inv(m):
    return [[m[1][1], -m[0][1]], [-m[1][0], m[0][0]]]


def _mp_diag(t):
    return [[mp.exp(t / 2), mp.mpf(0)], [mp.mpf(0), mp.exp(-t / 2)]]


def _mp_axis_frame(g):
    """Frame mapping the axis of g to the imaginary axis (attracting end up)
    with the projection of i sent to i."""
    a, b, c, d = g[0][0], g[0][1], g[1][0], g[1][1]
    tr = a + d
    disc = mp.sqrt(tr * tr - 4)
    if abs(c) < mp.mpf(10) ** (-_MP_DPS):
        fin = b / (d - a)
        u, v = (fin, mp.inf) if abs(a) > abs(d) else (mp.inf, fin)
    else:
        r1 = (a - d - disc) / (2 * c)
        r2 = (a - d + disc) / (2 * c)
        u, v = (r1, r2) if abs(c * r2 + d) > 1 else (r2, r1)
    if v == mp.inf:
        s = [[mp.mpf(1), -u], [mp.mpf(0), mp.mpf(1)]]
    elif u == mp.inf:
        s = [[mp.mpf(0), mp.mpf(-1)], [mp.mpf(1), -v]]
    elif u > v:
        r = mp.sqrt(u - v)
        s = [[1 / r, -u / r], [1 / r, -v / r]]
    else:
        r = mp.sqrt(v - u)
        s = [[-1 / r, u / r], [1 / r, -v / r]]
    z = mp.mpc(0, 1)
    w = (s[0][0] * z + s[0][1]) / (s[1][0] * z + s[1][1])
    t = mp.sqrt(w.real**2 + w.imag**2)
    rt = mp.sqrt(t)
    return _mp_mul([[1 / rt, mp.mpf(0)], [mp.mpf(0), rt]], s)


def _mp_to_iso(m) -> Isometry:
    det = m[0][0] * m[1][1] - m[0][1] * m[1][0]
    s = 1 / mp.sqrt(det)
    return Isometry(
        float(m[0][0] * s), float(m[0][1] * s), float(m[1][0] * s), float(m[1][1] * s)
    )


def _mp_pants(la, lb, lc):
    """Pants group in standard position: x_a along the imaginary axis (up),
    x_b conjugated across the seam (down), x_c = (x_a x_b)^-1 has translation
    length lc.  Seam length from the right-angled hexagon relation
    cosh u = (cosh(lc/2) + cosh(la/2) cosh(lb/2)) / (sinh(la/2) sinh(lb/2))."""
    xa, xb, xc = la / 2, lb / 2, lc / 2
    denom = mp.sinh(xa) * mp.sinh(xb)
    coshu = (mp.cosh(xc) + mp.cosh(xa) * mp.cosh(xb)) / denom
    u = mp.acosh(coshu)
    tu = [[mp.cosh(u / 2), mp.sinh(u / 2)], [mp.sinh(u / 2), mp.cosh(u / 2)]]
    x_a = _mp_diag(la)
    x_b = _mp_mul(tu, _mp_diag(-lb), _mp_inv(tu))
    x_c = _mp_inv(_mp_mul(x_a, x_b))
    return x_a, x_b, x_c, tu


def _mp_torus(l1, t1, l3):
    """One-holed torus: pants (l1, l1, l3) with its two equal boundaries glued
    by B = twist(t1) * (seam translation)^-1, recentered so the boundary curve
    runs along the imaginary axis.  Returns (A, B1, xc) with [A, B1] = xc^-1."""
    x_a, x_b, x_c, tu = _mp_pants(l1, l1, l3)
    b = _mp_mul(_mp_diag(t1), _mp_inv(tu))
    f = _mp_axis_frame(x_c)
    fi = _mp_inv(f)
    return (
        _mp_mul(f, x_a, fi),
        _mp_mul(f, _mp_inv(b), fi),
        _mp_mul(f, x_c, fi),
    )


def relator_residual(gens: tuple[Isometry, ...]) -> float:
    """Max entry deviation of [g1,g2][g3,g4] from the identity (after sign
    normalization)."""
    g1, g2, g3, g4 = gens
    comm1 = g1 * g2 * g1.inverse() * g2.inverse()
    comm2 = g3 * g4 * g3.inverse() * g4.inverse()
    r = comm1 * comm2
    return max(abs(r.a - 1.0), abs(r.b), abs(r.c), abs(r.d - 1.0))


def surface_from_fn(fn: FNCoords) -> SurfaceModel:
    """Genus-2 surface from Fenchel-Nielsen coordinates.

    The two handle curves have lengths fn.lengths[0] and fn.lengths[1]
    (realized by generators g1 and g3), the separating curve has length
    fn.lengths[2] (realized by [g1, g2]); twists act along the respective
    curves.  Raises ConstructionError when the assembly degenerates
    numerically.
    """
    l1, l2, l3 = fn.lengths
    t1, t2, t3 = fn.twists
    with mp.workdps(_MP_DPS):
        try:
            a, b1, _xc = _mp_torus(mp.mpf(l1), mp.mpf(t1), mp.mpf(l3))
            c0, d0, _yc = _mp_torus(mp.mpf(l2), mp.mpf(t2), mp.mpf(l3))
            flip = [[mp.mpf(0), mp.mpf(1)], [mp.mpf(-1), mp.mpf(0)]]
            s = _mp_mul(_mp_diag(mp.mpf(t3)), flip)
            si = _mp_inv(s)
            gens_mp = (a, b1, _mp_mul(s, c0, si), _mp_mul(s, d0, si))
            gens = tuple(_mp_to_iso(m) for m in gens_mp)
        except (mp.libmp.libhyper.NoConvergence, OverflowError, ZeroDivisionError) as exc:
            raise ConstructionError(f"Fenchel-Nielsen assembly failed: {exc}") from exc
    for g in gens:
        if g.classify().kind is not Kind.HYPERBOLIC:
            raise ConstructionError(
                "Fenchel-Nielsen assembly produced a non-hyperbolic generator"
            )
    resid = relator_residual(gens)
    if resid > RELATOR_TOL:
        raise ConstructionError(
            f"relator residual {resid:.3e} exceeds {RELATOR_TOL:.0e}; "
            "coordinates are numerically degenerate"
        )
    return SurfaceModel(
        genus=2,
        generators=gens,
        provenance="fenchel-nielsen",
        fn=fn,
        relator_residual=resid,
        basepoint=UhpPoint(0.0, 1.0),
    )


def bolza_surface() -> SurfaceModel:
    """The regular-octagon genus-2 surface of maximal systole.

    The octagon has all vertex angles pi/4 and is centered at the disk-model
    origin (the point i after conversion to the half-plane).  Opposite sides
    are paired by translations h_k of length 2 arccosh(1 + sqrt 2) through the
    center; these satisfy h0 h1^-1 h2 h3^-1 h0^-1 h1 h2^-1 h3 = 1, and the
    returned generators

        g1 = h0,  g2 = h1^-1 h2 h3^-1,  g3 = h1^-1 h3,  g4 = h3^-1 h2

    generate the same group with [g1, g2][g3, g4] = 1.
    """
    side_pairings = bolza_side_pairings()
    h0, h1, h2, h3 = side_pairings
    gens = (
        h0,
        h1.inverse() * h2 * h3.inverse(),
        h1.inverse() * h3,
        h3.inverse() * h2,
    )
    resid = relator_residual(gens)
    if resid > RELATOR_TOL:
        raise ConstructionError(f"octagon relator residual {resid:.3e} too large")
    return SurfaceModel(
        genus=2,
        generators=gens,
        provenance="bolza",
        fn=None,
        relator_residual=resid,
        basepoint=UhpPoint(0.0, 1.0),
    )


def bolza_side_pairings() -> tuple[Isometry, Isometry, Isometry, Isometry]:
    """The four opposite-side pairing translations of the regular octagon,
    h_k translating by 2 arccosh(1 + sqrt 2) along the axis through the
    center in direction (k + 1) pi / 4 (disk model)."""
    out = []
    step = 2.0 * math.acosh(1.0 + math.sqrt(2.0))
    for k in range(4):
        th = (k + 1) * math.pi / 4.0
        w = complex(math.cos(th), math.sin(th))
        out.append(translation_along((_disk_boundary_to_real(-w), _disk_boundary_to_real(w)), step))
    return tuple(out)


def _disk_boundary_to_real(w: complex) -> float:
    """Cayley image on the real line of a unit-circle point (1 maps to inf)."""
    den = 1.0 - w
    if abs(den) < 1e-15:
        return INF
    z = 1j * (1.0 + w) / den
    return z.real


def bolza_octagon_vertices() -> tuple[UhpPoint, ...]:
    """Vertices of the fundamental octagon (half-plane model), at hyperbolic
    distance arccosh(3 + 2 sqrt 2) from the center i."""
    rv = math.tanh(math.acosh(3.0 + 2.0 * math.sqrt(2.0)) / 2.0)
    out = []
    for k in range(8):
        w = rv * complex(math.cos((2 * k + 1) * math.pi / 8), math.sin((2 * k + 1) * math.pi / 8))
        z = 1j * (1.0 + w) / (1.0 - w)
        out.append(UhpPoint(z.real, z.imag))
    return tuple(out)


# ---------------------------------------------------------------------------
# Dirichlet-domain bootstrap and ball enumeration.

# Floor below which a non-identity displacement signals a broken construction.
DISCRETENESS_FLOOR = 1e-6


def _check_discreteness(disps: np.ndarray) -> None:
    if len(disps) and float(disps.min()) < DISCRETENESS_FLOOR:
        raise ConstructionError(
            f"non-identity element with displacement {disps.min():.2e}; "
            "the group is not discrete or the construction is broken"
        )


def _bootstrap_domain(surface: SurfaceModel) -> DirichletDomain:
    """Dirichlet domain at the construction basepoint.

    The circumradius is unknown beforehand, so enumerate generator words with
    a growing radius until the bisectors cut out a compact polygon, then
    re-enumerate past twice the (over-estimated) circumradius so every true
    face element is present, and repeat until the face set stabilizes.
    """
    gens = []
    for g in surface.generators:
        gens.append(_iso_to_mat(g))
        gens.append(_iso_to_mat(g.inverse()))
    alphabet = np.array(gens)
    z0 = surface.basepoint.z
    cap = _element_cap(None)

    radius = float(displacement_batch(alphabet, z0).max()) + 0.5
    slack = 1.5
    prev_faces = None
    for _ in range(64):
        mats, disps, _, _, stored = _bfs_ball(alphabet, z0, radius, radius + slack, cap)
        _check_discreteness(disps)
        try:
            dom = dirichlet_polygon(mats[stored], disps[stored], surface.basepoint)
        except ConstructionError:
            radius += 1.0
            continue
        faces = tuple(
            sorted(round(f.a / 1e-6) for f in dom.face_pairings)
        )
        needed = 2.0 * dom.circumradius + 0.2
        if radius >= needed and faces == prev_faces:
            return dom
        prev_faces = faces
        radius = max(needed, radius + 0.25)
        slack = min(dom.circumradius + 0.5, 6.0)
    raise ConstructionError("Dirichlet domain bootstrap did not stabilize")


def enumerate_ball(
    surface: SurfaceModel,
    basepoint: UhpPoint | None = None,
    radius: float = 1.0,
    cap: int | None = None,
    slack: float | None = None,
    slack_multiplier: float = 1.0,
) -> GroupBall:
    """All group elements g != 1 with d(basepoint, g basepoint) <= radius.

    Exploration prunes BFS words once their displacement exceeds
    radius + slack; the default slack is the domain circumradius (detours of
    face-pairing paths stay within one domain copy of the connecting
    geodesic), enlarged when the basepoint is not the domain center.
    """
    if radius <= 0.0 or not math.isfinite(radius):
        raise InputDomainError(f"radius must be positive, got {radius}")
    bp = basepoint if basepoint is not None else surface.basepoint
    dom = surface.domain
    if slack is None:
        slack = dom.circumradius + 0.2
        off = distance(bp, surface.basepoint)
        if off > 1e-12:
            slack += 2.0 * off
    slack *= slack_multiplier

    key = (round(bp.x, 12), round(bp.y, 12), round(slack, 9))
    cached = surface._balls.get(key)
    if cached is not None and cached.radius >= radius - 1e-12:
        return cached.restricted(radius)

    alphabet = surface._alphabet
    mats = np.array([_iso_to_mat(g) for g in alphabet])
    out = _bfs_ball(mats, bp.z, radius, radius + slack, _element_cap(cap))
    ball = GroupBall(surface, bp, radius, alphabet, *out)
    _check_discreteness(ball._disp_all)
    surface._balls[key] = ball
    return ball
