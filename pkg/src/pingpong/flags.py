"""Projective and flag geometry: chordal metric, antipodality, ball covers.

A flag is an incident (line, hyperplane) pair in P(K^d) x Gr_{d-1}(K^d).
Compact sets are represented by finite unions of closed balls of flags
(BallCover); all containment and antipodality checks inflate radii with
sound Lipschitz constants, so a positive margin certifies the claim while
a negative one only means "not certified at these parameters".
"""

import csv
import io
import json
import math

import numpy as np

from .errors import DegenerateInput, DomainError, FieldError, ShapeError
from .scalars import QUAT_TABLE, Matrix

#: Lipschitz constant of x -> d_1(x, y) with respect to the flag metric.
#: For unit vectors |<u', w>| >= |<u, w>| - 2 dc(u, u'), hence constant 2.
D1_LIPSCHITZ = 2.0

INCIDENCE_TOL = 1e-10


def _inner(field, x, y):
    """<x, y> linear in x, conjugate-linear in y; for H returns a 4-vector."""
    if field == "H":
        yc = y.copy()
        yc[:, 1:] = -yc[:, 1:]
        return np.einsum("ra,rb,abc->c", yc, x, QUAT_TABLE)
    return np.sum(x * np.conj(y))


def _abs_inner(field, x, y):
    v = _inner(field, x, y)
    if field == "H":
        return float(np.linalg.norm(v))
    return float(abs(v))


def _vec_norm(field, x):
    if field == "H":
        return float(np.linalg.norm(x))
    return float(np.linalg.norm(x))


def _unitize(field, v):
    n = _vec_norm(field, v)
    if n < 1e-14:
        raise DegenerateInput("zero vector cannot represent a projective class")
    return v / n


def _as_vec(field, v):
    if field == "H":
        arr = np.asarray(v, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 4:
            raise ShapeError("an H vector needs shape (d, 4)")
        return arr
    return np.asarray(v, dtype=float if field == "R" else complex).reshape(-1)


class ProjPoint:
    """A point of P(K^d), stored as a unit representative vector."""

    __slots__ = ("field", "v")

    def __init__(self, field, v):
        self.field = field
        self.v = _unitize(field, _as_vec(field, v))
        self.v.setflags(write=False)

    @property
    def ambient(self):
        return self.v.shape[0]

    def __repr__(self):
        return f"ProjPoint({self.field}, d={self.ambient})"


class Hyperplane:
    """A hyperplane of K^d, stored as a unit normal vector."""

    __slots__ = ("field", "normal")

    def __init__(self, field, normal):
        self.field = field
        self.normal = _unitize(field, _as_vec(field, normal))
        self.normal.setflags(write=False)

    @property
    def ambient(self):
        return self.normal.shape[0]

    def __repr__(self):
        return f"Hyperplane({self.field}, d={self.ambient})"


class Flag:
    """An incident (point, hyperplane) pair in the full flag space F_{1,d-1}."""

    __slots__ = ("point", "hyperplane")

    def __init__(self, point, hyperplane, tol=INCIDENCE_TOL):
        if point.field != hyperplane.field:
            raise FieldError("point and hyperplane field mismatch")
        if point.ambient != hyperplane.ambient:
            raise ShapeError("point and hyperplane ambient mismatch")
        if _abs_inner(point.field, point.v, hyperplane.normal) > tol:
            raise DegenerateInput("point does not lie on its hyperplane")
        self.point = point
        self.hyperplane = hyperplane

    @property
    def field(self):
        return self.point.field

    @property
    def ambient(self):
        return self.point.ambient

    def __repr__(self):
        return f"Flag({self.field}, d={self.ambient})"


def flag_from_vectors(field, point_vec, normal_vec, fix_incidence=False):
    """Build a flag; optionally project the normal to restore exact incidence."""
    p = ProjPoint(field, point_vec)
    n = _as_vec(field, normal_vec)
    if fix_incidence and field != "H":
        n = n - p.v * _inner(field, n, p.v)
    return Flag(p, Hyperplane(field, n))


def chordal_dist(p, q):
    """sqrt(1 - |<v_p, v_q>|^2), the sine of the angle between the lines."""
    if p.ambient != q.ambient or p.field != q.field:
        raise ShapeError("points live in different spaces")
    c = _abs_inner(p.field, p.v, q.v)
    return math.sqrt(max(0.0, 1.0 - min(1.0, c) ** 2))


def point_hyperplane_dist(p, h):
    """|<v_p, w_H>|, the chordal distance from p to the projectivized hyperplane."""
    if p.ambient != h.ambient or p.field != h.field:
        raise ShapeError("point and hyperplane live in different spaces")
    return _abs_inner(p.field, p.v, h.normal)


def flag_dist(x, y):
    """max of the chordal distances between the points and between the normals."""
    return max(chordal_dist(x.point, y.point),
               chordal_dist(ProjPoint(x.field, x.hyperplane.normal),
                            ProjPoint(y.field, y.hyperplane.normal)))


def antipodal_distance(x, y):
    """min(dist(x_1, P(V_2)), dist(y_1, P(V_1))); positive iff x, y antipodal."""
    if x.ambient != y.ambient or x.field != y.field:
        raise ShapeError("flags live in different spaces")
    return min(point_hyperplane_dist(x.point, y.hyperplane),
               point_hyperplane_dist(y.point, x.hyperplane))


# ----------------------------------------------------------------------
# ball covers


class BallCover:
    """Finite union of closed flag balls, stored as stacked coordinate arrays."""

    __slots__ = ("field", "points", "normals", "radii", "label")

    def __init__(self, field, points, normals, radii, label=""):
        self.field = field
        dtype = float if field == "R" else complex
        self.points = np.asarray(points, dtype=dtype)
        self.normals = np.asarray(normals, dtype=dtype)
        self.radii = np.asarray(radii, dtype=float)
        if self.points.ndim != 2 or self.points.shape != self.normals.shape:
            raise ShapeError("points and normals must be matching (N, d) arrays")
        if self.radii.shape != (self.points.shape[0],):
            raise ShapeError("radii length must match the number of centers")
        if self.points.shape[0] == 0:
            raise ShapeError("a BallCover must be nonempty")
        if np.any(~np.isfinite(self.radii)) or np.any(self.radii < 0):
            raise DomainError("radii must be finite and nonnegative")
        self.label = label

    @classmethod
    def from_flags(cls, flags, radii, label=""):
        flags = list(flags)
        if np.isscalar(radii):
            radii = [float(radii)] * len(flags)
        pts = np.stack([f.point.v for f in flags])
        nrm = np.stack([f.hyperplane.normal for f in flags])
        return cls(flags[0].field, pts, nrm, radii, label=label)

    def __len__(self):
        return self.points.shape[0]

    @property
    def ambient(self):
        return self.points.shape[1]

    def __repr__(self):
        return f"BallCover({self.label or 'unnamed'}, n={len(self)}, d={self.ambient})"

    def flag(self, i):
        return Flag(ProjPoint(self.field, self.points[i]),
                    Hyperplane(self.field, self.normals[i]),
                    tol=np.inf)

    def flags(self):
        return [self.flag(i) for i in range(len(self))]

    def inflate(self, s):
        return BallCover(self.field, self.points, self.normals, self.radii + float(s),
                         label=self.label)

    def shrink(self, factor):
        """Multiply all radii by a factor in [0, 1] (used for interiors)."""
        return BallCover(self.field, self.points, self.normals, self.radii * float(factor),
                         label=self.label)

    def subset(self, mask):
        mask = np.asarray(mask)
        return BallCover(self.field, self.points[mask], self.normals[mask],
                         self.radii[mask], label=self.label)

    def relabel(self, label):
        return BallCover(self.field, self.points, self.normals, self.radii, label=label)

    def to_json_list(self):
        out = []
        for i in range(len(self)):
            if self.field == "R":
                pt = [float(x) for x in self.points[i]]
                nr = [float(x) for x in self.normals[i]]
            else:
                pt = [[x.real, x.imag] for x in self.points[i]]
                nr = [[x.real, x.imag] for x in self.normals[i]]
            out.append({"point": pt, "normal": nr, "radius": float(self.radii[i])})
        return out

    @classmethod
    def from_json_list(cls, data, field, label=""):
        pts, nrms, radii = [], [], []
        for row in data:
            if field == "R":
                pts.append(np.asarray(row["point"], dtype=float))
                nrms.append(np.asarray(row["normal"], dtype=float))
            else:
                p = np.asarray(row["point"], dtype=float)
                n = np.asarray(row["normal"], dtype=float)
                pts.append(p[:, 0] + 1j * p[:, 1])
                nrms.append(n[:, 0] + 1j * n[:, 1])
            radii.append(row["radius"])
        return cls(field, np.stack(pts), np.stack(nrms), radii, label=label)

    def to_csv(self):
        """One flag per row: point coordinates then normal coordinates."""
        buf = io.StringIO()
        w = csv.writer(buf)
        d = self.ambient
        if self.field == "R":
            header = [f"p{i}" for i in range(d)] + [f"n{i}" for i in range(d)] + ["radius"]
        else:
            header = ([f"p{i}_re" for i in range(d)] + [f"p{i}_im" for i in range(d)]
                      + [f"n{i}_re" for i in range(d)] + [f"n{i}_im" for i in range(d)]
                      + ["radius"])
        w.writerow(header)
        for i in range(len(self)):
            if self.field == "R":
                row = list(self.points[i]) + list(self.normals[i]) + [self.radii[i]]
            else:
                row = (list(self.points[i].real) + list(self.points[i].imag)
                       + list(self.normals[i].real) + list(self.normals[i].imag)
                       + [self.radii[i]])
            w.writerow([repr(float(x)) for x in row])
        return buf.getvalue()


def cover_union(*covers):
    """Union of covers over the same ambient space; size is the sum of sizes."""
    first = covers[0]
    for c in covers[1:]:
        if c.field != first.field or c.ambient != first.ambient:
            raise ShapeError("cannot union covers over different spaces")
    return BallCover(first.field,
                     np.concatenate([c.points for c in covers]),
                     np.concatenate([c.normals for c in covers]),
                     np.concatenate([c.radii for c in covers]),
                     label="|".join(filter(None, dict.fromkeys(c.label for c in covers))))


def _pairwise_abs_inner(field, xs, ys):
    return np.abs(xs @ np.conj(ys).T)


def _chordal_matrix(field, xs, ys):
    c = np.minimum(1.0, _pairwise_abs_inner(field, xs, ys))
    return np.sqrt(np.maximum(0.0, 1.0 - c * c))


def pairwise_flag_dist(a, b):
    """(len(a), len(b)) matrix of flag distances between cover centers."""
    return np.maximum(_chordal_matrix(a.field, a.points, b.points),
                      _chordal_matrix(a.field, a.normals, b.normals))


def pairwise_antipodal(a, b):
    """(len(a), len(b)) matrix of antipodal distances between cover centers."""
    return np.minimum(_pairwise_abs_inner(a.field, a.points, b.normals),
                      _pairwise_abs_inner(a.field, b.points, a.normals).T)


def antipodality_scan(a, b):
    """Exact min over center pairs of d_1 minus inflated radii, with witness.

    Returns (margin, (i, j)); margin > 0 certifies that the two covered
    sets are pointwise antipodal.
    """
    if a.field != b.field or a.ambient != b.ambient:
        raise ShapeError("covers live in different spaces")
    d1 = pairwise_antipodal(a, b)
    margins = d1 - D1_LIPSCHITZ * (a.radii[:, None] + b.radii[None, :])
    i, j = np.unravel_index(np.argmin(margins), margins.shape)
    return float(margins[i, j]), (int(i), int(j))


def cover_margin(a, b):
    """Antipodality margin of two covers (min over pairs, radius-inflated)."""
    return antipodality_scan(a, b)[0]


def cover_contains_point(cover, flag, shrink=0.0):
    """Margin by which the flag sits inside some (shrunk) ball of the cover."""
    pd = _chordal_matrix(cover.field, cover.points, flag.point.v[None, :])[:, 0]
    nd = _chordal_matrix(cover.field, cover.normals, flag.hyperplane.normal[None, :])[:, 0]
    d = np.maximum(pd, nd)
    return float(np.max(cover.radii - shrink - d))


def cover_contains_cover(small, big, shrink=0.0):
    """Margin for: every ball of `small` inside a single (shrunk) ball of `big`."""
    d = pairwise_flag_dist(small, big)
    per_ball = np.max(big.radii[None, :] - shrink - d - small.radii[:, None], axis=1)
    return float(np.min(per_ball))


# ----------------------------------------------------------------------
# group action on covers


def _gram_svd(field, g):
    arr = g.array if isinstance(g, Matrix) else np.asarray(g)
    if field == "H" or (isinstance(g, Matrix) and g.field == "H"):
        raise FieldError("cover images over H go through realify_quat first")
    u, s, vh = np.linalg.svd(arr)
    if s[-1] <= 1e-14 * s[0]:
        raise DomainError("singular matrix cannot act on flags")
    return arr, u, s, vh


def global_flag_lipschitz(s):
    """Sound global Lipschitz constant of the flag action from singular values.

    Points:  d(gx, gy) <= (s1 s2 / sd^2) d(x, y); normals transform by
    g^{-*} whose corresponding constant is s1^2 / (sd s_{d-1}).
    """
    return max(s[0] * s[1] / s[-1] ** 2, s[0] ** 2 / (s[-1] * s[-2]))


def local_flag_lipschitz(s, d1_to_repeller):
    """Sound Lipschitz constant on the region d_1(., Xi(g^{-1})) >= d1_to_repeller.

    Per part: points  (s2/s1) / d^2,  normals  (sd/s_{d-1}) / d^2.
    """
    if d1_to_repeller <= 0:
        return math.inf
    gap = max(s[1] / s[0], s[-1] / s[-2])
    return gap / d1_to_repeller ** 2


def _acted_arrays(field, arr, points, normals, arr_inv=None):
    gp = points @ arr.T
    gpn = np.linalg.norm(gp, axis=1)
    gp = gp / gpn[:, None]
    if arr_inv is None:
        gn = np.linalg.solve(np.conj(arr).T, normals.T).T
    else:
        gn = normals @ np.conj(arr_inv)
    gnn = np.linalg.norm(gn, axis=1)
    gn = gn / gnn[:, None]
    return gp, gn, gpn, gnn


def _ball_lipschitz(s, gpn, gnn, radii, glob):
    """Per-ball Lipschitz bound from exact image-vector norms.

    For unit x in the ball, ||g x|| >= ||g c|| sqrt(1 - r^2) - s1 r, and
    d(gx, gy) <= s1 s2 d(x, y) / (||gx|| ||gy||); dually for normals with
    the singular values of g^{-*}.
    """
    cosr = np.sqrt(np.maximum(0.0, 1.0 - radii ** 2))
    lo_p = gpn * cosr - s[0] * radii
    lo_n = gnn * cosr - radii / s[-1]
    lips = np.full(len(radii), glob)
    ok = (lo_p > 0) & (lo_n > 0)
    lip_p = (s[0] * s[1]) / lo_p[ok] ** 2
    lip_n = (1.0 / (s[-1] * s[-2])) / lo_n[ok] ** 2
    lips[ok] = np.minimum(glob, np.maximum(lip_p, lip_n))
    return lips


def _repeller_distances(field, u, vh, points, normals):
    """d_1 of each center flag from Xi(g^{-1}) = ([v_d], v_1^perp)."""
    v1 = np.conj(vh[0])
    vd = np.conj(vh[-1])
    dp = np.abs(points @ np.conj(v1))
    dn = np.abs(normals @ np.conj(vd))
    return np.minimum(dp, dn)


def cover_image(g, cover, g_inv=None):
    """Image cover g . A: centers moved, radii inflated by sound Lipschitz bounds.

    Each ball uses the sharper of the global constant and the per-ball
    bound from the exact image-vector norms.
    """
    arr, u, s, vh = _gram_svd(cover.field, g)
    inv_arr = None if g_inv is None else (g_inv.array if isinstance(g_inv, Matrix) else np.asarray(g_inv))
    gp, gn, gpn, gnn = _acted_arrays(cover.field, arr, cover.points, cover.normals, inv_arr)
    glob = global_flag_lipschitz(s)
    lips = _ball_lipschitz(s, gpn, gnn, cover.radii, glob)
    return BallCover(cover.field, gp, gn, lips * cover.radii, label=cover.label)


def cover_inner_image(g, cover, g_inv=None):
    """Under-approximation: balls certified to lie inside g . A.

    ball(gc, r_in) is inside g ball(c, r) whenever the Lipschitz constant L
    of g^{-1} on ball(gc, r_in) satisfies L r_in <= r; the per-ball bound
    for g^{-1} at the image center is evaluated with probe radius r.
    """
    arr, u, s, vh = _gram_svd(cover.field, g)
    inv = np.linalg.inv(arr) if g_inv is None else (
        g_inv.array if isinstance(g_inv, Matrix) else np.asarray(g_inv))
    _, ui, si, vhi = _gram_svd(cover.field, inv)
    gp, gn, _gpn, _gnn = _acted_arrays(cover.field, arr, cover.points, cover.normals, inv)
    # image norms under g^{-1} at the image centers are the preimage norms:
    # ||g^{-1} (gc/||gc||)|| = ||c|| / ||gc|| = 1 / ||gc||
    glob = global_flag_lipschitz(si)
    back_p = 1.0 / _gpn
    back_n = 1.0 / _gnn
    lips = _ball_lipschitz(si, back_p, back_n, cover.radii, glob)
    r_in = np.minimum(cover.radii, cover.radii / lips)
    return BallCover(cover.field, gp, gn, r_in, label=cover.label)


def act_on_flag(g, flag):
    """Image of a single flag under an invertible matrix."""
    arr = g.array if isinstance(g, Matrix) else np.asarray(g)
    gp = arr @ flag.point.v
    gn = np.linalg.solve(np.conj(arr).T, flag.hyperplane.normal)
    return flag_from_vectors(flag.field, gp, gn, fix_incidence=False)


def sample_in_ball(rng, cover, i, count):
    """Random flags inside ball i of the cover (point and normal moved <= r)."""
    d = cover.ambient
    out = []
    p0 = cover.points[i]
    n0 = cover.normals[i]
    r = cover.radii[i]
    cplx = cover.field == "C"
    for _ in range(count):
        # move the point by a chordal distance <= r
        q = rng.standard_normal(d) + (1j * rng.standard_normal(d) if cplx else 0.0)
        q = q - p0 * np.sum(q * np.conj(p0))
        qn = np.linalg.norm(q)
        s = min(1.0, r) * rng.uniform(0.0, 1.0)
        p = p0 if qn < 1e-13 else p0 * math.sqrt(1 - s * s) + (q / qn) * s
        p = p / np.linalg.norm(p)
        # restore incidence, then move the normal inside the perp of p
        n = n0 - p * np.sum(n0 * np.conj(p))
        nn = np.linalg.norm(n)
        if nn < 1e-13:
            continue
        n = n / nn
        q2 = rng.standard_normal(d) + (1j * rng.standard_normal(d) if cplx else 0.0)
        q2 = q2 - p * np.sum(q2 * np.conj(p))
        q2 = q2 - n * np.sum(q2 * np.conj(n))
        q2n = np.linalg.norm(q2)
        budget = chordal_dist(ProjPoint(cover.field, n0), ProjPoint(cover.field, n))
        s2 = max(0.0, min(1.0, r) - budget) * rng.uniform(0.0, 1.0)
        if q2n > 1e-13 and s2 > 0:
            n = n * math.sqrt(1 - s2 * s2) + (q2 / q2n) * s2
            n = n / np.linalg.norm(n)
        f = flag_from_vectors(cover.field, p, n, fix_incidence=False)
        if flag_dist(f, cover.flag(i)) <= r + 1e-9:
            out.append(f)
    return out
