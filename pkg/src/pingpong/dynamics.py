"""Cartan (SVD) data, attracting flags, proximality, contraction estimates
and singular-value-gap growth certificates."""

import csv
import io
import json
import math

import numpy as np

from .errors import DomainError, GapTooSmall, NearSingularConfig
from .flags import Flag, Hyperplane, ProjPoint, flag_from_vectors
from .scalars import Matrix, realify_quat
from .words import words_with_matrices

#: chordal-metric comparison constant of the identity flag embedding; the
#: two-sided contraction estimate d(wx, wy) <= C_G (s2/s1) / (d1_x d1_y)
#: is proved with C_G = 2 via the triangle inequality through Xi(w).
C_G = 2.0


def _to_array(g):
    if isinstance(g, Matrix):
        if g.field == "H":
            return realify_quat(g).array
        return g.array
    return np.asarray(g)


class CartanData:
    """Singular value decomposition g = k_g diag(sigma) k_g' (sigma descending)."""

    __slots__ = ("sigma", "left", "right")

    def __init__(self, sigma, left, right):
        self.sigma = sigma
        self.left = left
        self.right = right

    @property
    def log_sigma(self):
        return np.log(self.sigma)

    def gap(self, i=1):
        """log(sigma_i / sigma_{i+1}), 1-based position of the gap."""
        return float(np.log(self.sigma[i - 1] / self.sigma[i]))

    def reconstruct(self):
        return self.left @ np.diag(self.sigma) @ self.right


def cartan(g):
    """SVD with descending singular values; raises DomainError when singular.

    Large powers of proximal matrices have huge sigma_1/sigma_d ratios by
    design, so only genuine rank deficiency is rejected.
    """
    arr = _to_array(g)
    if not np.all(np.isfinite(arr)):
        raise DomainError("matrix has non-finite entries")
    u, s, vh = np.linalg.svd(arr)
    if s[-1] <= 0.0:
        raise DomainError("matrix is singular")
    return CartanData(s, u, vh)


def xi_flag(g, gap_tol=1e-10):
    """Attracting flag Xi(g) = ([u_1], hyperplane with normal u_d).

    Requires a strict top singular gap; H matrices act through their
    realification.
    """
    c = g if isinstance(g, CartanData) else cartan(g)
    if c.sigma[0] - c.sigma[1] <= gap_tol * c.sigma[0]:
        raise GapTooSmall(
            f"sigma_1 = {c.sigma[0]:.3e} and sigma_2 = {c.sigma[1]:.3e} too close")
    field = "C" if np.iscomplexobj(c.left) else "R"
    return Flag(ProjPoint(field, c.left[:, 0]),
                Hyperplane(field, c.left[:, -1]),
                tol=np.inf)


def repelling_flag_of(g):
    """Xi(g^{-1}) computed from the right singular vectors of g."""
    c = g if isinstance(g, CartanData) else cartan(g)
    field = "C" if np.iscomplexobj(c.right) else "R"
    v1 = np.conj(c.right[0])
    vd = np.conj(c.right[-1])
    return Flag(ProjPoint(field, vd), Hyperplane(field, v1), tol=np.inf)


class ProximalData:
    """Eigenvalue moduli, gap, and the attracting / repelling fixed flags."""

    def __init__(self, status, moduli, attracting=None, repelling=None, eig=None):
        self.status = status
        self.moduli = moduli
        self.attracting = attracting
        self.repelling = repelling
        self.eig = eig  # (eigenvalues, right vectors, left vectors) sorted desc

    @property
    def is_proximal(self):
        return self.status == "proximal"

    @property
    def lam1(self):
        return float(self.moduli[0])

    @property
    def lam2(self):
        return float(self.moduli[1])

    @property
    def gap(self):
        return self.lam2 / self.lam1

    @property
    def bottom_gap(self):
        return float(self.moduli[-1] / self.moduli[-2])

    @property
    def biproximal(self):
        return self.status == "proximal" and self._bottom_ok

    def __repr__(self):
        return f"ProximalData({self.status}, gap={self.gap:.3e})"


def proximal(g, tol=1e-6):
    """Eigenvalue analysis: proximal iff the top modulus is uniquely attained.

    A real matrix whose top (or bottom) eigenvalue is nonreal is reported
    not proximal (the projective action on P(R^d) has no attracting point).
    The status is reported, never thrown.
    """
    arr = _to_array(g)
    if isinstance(g, Matrix) and g.field == "H":
        field = "R"
    else:
        field = "C" if np.iscomplexobj(arr) else "R"
    try:
        vals, right = np.linalg.eig(arr)
        lvals, left = np.linalg.eig(np.conj(arr).T)
    except np.linalg.LinAlgError as exc:
        raise DomainError("eigenvalue computation failed") from exc
    order = np.argsort(-np.abs(vals), kind="stable")
    vals, right = vals[order], right[:, order]
    lorder = np.argsort(-np.abs(lvals), kind="stable")
    lvals, left = lvals[lorder], left[:, lorder]
    moduli = np.abs(vals)
    data = ProximalData("not_proximal", moduli, eig=(vals, right, left))
    data._bottom_ok = False
    if moduli[0] <= 1e-300 or moduli[1] / moduli[0] >= 1.0 - tol:
        return data
    top_real_ok = field == "C" or abs(vals[0].imag) <= tol * moduli[0]
    if not top_real_ok:
        return data
    bottom_gap_ok = moduli[-1] / moduli[-2] <= 1.0 - tol
    bottom_real_ok = field == "C" or abs(vals[-1].imag) <= tol * max(moduli[-1], 1e-300)
    data._bottom_ok = bool(bottom_gap_ok and bottom_real_ok)

    def unit(v):
        return v / np.linalg.norm(v)

    p_plus = unit(right[:, 0])
    n_plus = unit(left[:, -1])
    p_minus = unit(right[:, -1])
    n_minus = unit(left[:, 0])
    if field == "R":
        p_plus, n_plus = unit(p_plus.real), unit(n_plus.real)
        if data._bottom_ok:
            p_minus, n_minus = unit(p_minus.real), unit(n_minus.real)
    data.status = "proximal"
    data.attracting = flag_from_vectors(field, p_plus, n_plus, fix_incidence=True)
    if data._bottom_ok:
        data.repelling = flag_from_vectors(field, p_minus, n_minus, fix_incidence=True)
    return data


def contraction_bound(w, x, y, c_g=C_G, tol=1e-8):
    """Sound upper bound for the flag distance d(w x, w y).

    Uses d(wx, wy) <= c_g * max(s2/s1, sd/s_{d-1}) / (d1(x, Xi(w^-1)) d1(y, Xi(w^-1))),
    capped at the diameter 1 of the chordal metric.
    """
    c = w if isinstance(w, CartanData) else cartan(w)
    gap = max(c.sigma[1] / c.sigma[0], c.sigma[-1] / c.sigma[-2])
    if gap >= 1.0 - 1e-15:
        return 1.0  # no contraction; the chordal diameter is the only bound
    rep = repelling_flag_of(c)
    from .flags import antipodal_distance
    dx = antipodal_distance(x, rep)
    dy = antipodal_distance(y, rep)
    if dx <= tol or dy <= tol:
        raise NearSingularConfig("flag too close to the repelling data of w")
    return min(1.0, c_g * gap / (dx * dy))


class GapTable:
    """Per-length minimal singular gaps with an affine lower-bound fit."""

    def __init__(self, rows, slope, intercept, residual_max, horizon):
        self.rows = rows  # (length, min_gap, argmin_word)
        self.slope = slope
        self.intercept = intercept  # fit is gap ~ slope * l + intercept
        self.residual_max = residual_max
        self.horizon = horizon

    @property
    def certificate_constant(self):
        """C in the reading 'min gap(l) >= c l - C'."""
        return -self.intercept

    @property
    def passes(self):
        return self.slope > 0

    def to_csv(self, gens):
        from .words import word_str
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["length", "min_gap", "argmin_word"])
        for ell, gap, word in self.rows:
            w.writerow([ell, repr(gap), word_str(gens, word)])
        return buf.getvalue()

    def to_json_dict(self):
        return {"c": self.slope, "C": self.certificate_constant,
                "residual_max": self.residual_max, "L": self.horizon,
                "pass": bool(self.passes)}

    def dumps(self):
        return json.dumps(self.to_json_dict(), sort_keys=True)


def gap_growth(rep, horizon):
    """Minimal log(sigma_1/sigma_2) over reduced words of each length 1..horizon.

    Fits min_gap(l) against c*l - C by least squares; a positive fitted c
    is the computable Anosov proxy used by the certification pipelines.
    """
    if horizon < 1:
        raise DomainError("horizon must be >= 1")
    rows = []
    for ell, ws, arr in words_with_matrices(rep, horizon):
        s = np.linalg.svd(arr, compute_uv=False)
        gaps = np.log(s[:, 0] / np.maximum(s[:, 1], 1e-300))
        i = int(np.argmin(gaps))
        rows.append((ell, float(gaps[i]), ws[i]))
    ls = np.array([r[0] for r in rows], dtype=float)
    gs = np.array([r[1] for r in rows], dtype=float)
    if len(rows) == 1:
        slope, intercept = gs[0], 0.0
    else:
        slope, intercept = np.polyfit(ls, gs, 1)
    residuals = gs - (slope * ls + intercept)
    return GapTable(rows, float(slope), float(intercept),
                    float(np.max(np.abs(residuals))), horizon)


# ----------------------------------------------------------------------
# geometric tails of powers


class PowerTail:
    """Sound bound for sup_{m > M} d_F(g^m x, g^+) over x in a flag ball.

    Built from the eigendecomposition g = P D P^{-1}: the bound has the
    form coeff * ratio^m with ratio < 1, so the supremum is attained at
    m = M + 1 and decreases geometrically afterwards.
    """

    def __init__(self, g):
        arr = _to_array(g)
        data = proximal(arr)
        if not data.biproximal:
            raise DomainError("power tails need a biproximal matrix")
        vals, right, _left = data.eig
        self.field = "C" if np.iscomplexobj(arr) else "R"
        p = right
        try:
            pinv = np.linalg.inv(p)
        except np.linalg.LinAlgError as exc:
            raise DomainError("matrix is not diagonalizable enough") from exc
        sp = np.linalg.svd(p, compute_uv=False)
        if sp[-1] <= 1e-13 * sp[0]:
            raise DomainError("eigenbasis too ill-conditioned for a tail bound")
        self.attracting = data.attracting
        self.ratio_pt = float(abs(vals[1]) / abs(vals[0]))
        self.ratio_nrm = float(abs(vals[-1]) / abs(vals[-2]))
        # chordal Lipschitz constants of the basis change and its dual
        self.k_pt = sp[0] * sp[1] / sp[-1] ** 2
        self.k_nrm = sp[0] ** 2 / (sp[-1] * sp[-2])
        self.p_norm = sp[0]
        self.pinv_norm = 1.0 / sp[-1]
        # directions whose pairing must stay away from zero on the ball
        q1 = np.conj(pinv[0])
        self.q1_hat = q1 / np.linalg.norm(q1)
        pd = p[:, -1]
        self.pd_hat = pd / np.linalg.norm(pd)

    def bound(self, points, normals, radii, m):
        """Upper bound for max over the balls of d_F(g^m ., g^+)."""
        c_pt = np.abs(points @ np.conj(self.q1_hat)) - 2.0 * radii
        c_nm = np.abs(normals @ np.conj(self.pd_hat)) - 2.0 * radii
        if np.any(c_pt <= 0) or np.any(c_nm <= 0):
            return math.inf
        # ||y_perp|| <= ||P^-1||, |y_1| >= ||q1|| c_pt with ||q1|| >= 1/||P||
        b_pt = self.k_pt * self.ratio_pt ** m * self.pinv_norm * self.p_norm / c_pt
        b_nm = self.k_nrm * self.ratio_nrm ** m * self.p_norm * self.pinv_norm / c_nm
        return float(min(1.0, max(np.max(b_pt), np.max(b_nm))))

    def tail_radius(self, cover, m_from):
        """Sound radius of a ball at g^+ containing g^m . cover for all m >= m_from."""
        return self.bound(cover.points, cover.normals, cover.radii, m_from)
