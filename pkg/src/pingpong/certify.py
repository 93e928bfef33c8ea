"""Limit-set sampling and numerical verification of the ping-pong hypotheses
of the amalgam and HNN combination theorems.

Compact sets are over-approximated by finite ball covers whose radii carry
sound Lipschitz inflation; interiors are under-approximated by deflated
image balls with a quarter-radius shrink.  Conditions that pair points near
the shared limit set Lambda_H are checked through the exact H-equivariance
reduction (translate one side back to the slice), so a positive margin
certifies the pointwise hypothesis for the ideal sets; group-element
quantifiers are checked to the stated word horizon, which the certificate
records.  Supported subgroups: trivial H and cyclic H (one generator word).
"""

import json
import math

import numpy as np

from .errors import (
    ConfigError, DomainError, NoValidEpsilon, NoValidParameters, NotContracting,
)
from .dynamics import PowerTail, cartan, gap_growth, proximal, xi_flag
from .flags import (
    BallCover, D1_LIPSCHITZ, antipodality_scan, cover_contains_cover,
    cover_contains_point, cover_image, cover_inner_image, cover_margin,
    cover_union, flag_dist, pairwise_flag_dist, sample_in_ball,
)
from .scalars import Matrix
from .words import (
    FreeRep, amalgam_normal_forms, coset_norm, enumerate_reduced,
    evaluate_hnn_form, hnn_normal_forms, inverse, parse_word, reduce_word,
    whole_group, word_str, words_with_matrices,
)

DEFAULT_SEED = 0xA905
EPS_GRID = [2.0 ** -k for k in range(3, 13)]
INTERIOR_SHRINK = 0.75  # interiors keep 3/4 of each radius (mu = r/4)


def _as_linear(rep):
    """Representation matrices as complex/real numpy arrays, keyed by letter."""
    return rep.linear_arrays()


def promote_cover(cover, field):
    """View a real cover inside the complex flag space (no-op if already there)."""
    if cover.field == field:
        return cover
    if cover.field == "R" and field == "C":
        return BallCover("C", cover.points.astype(complex),
                         cover.normals.astype(complex), cover.radii, cover.label)
    raise ConfigError(f"cannot promote cover from {cover.field} to {field}")


def _word_matrix(rep, w):
    m = rep.evaluate(w)
    return m.array if m.field != "H" else None


# ----------------------------------------------------------------------
# limit-set sampling


def sample_limit_set(rep, horizon, filter_sub=None, prescreen=True, label=""):
    """Cover of the limit set by balls at Xi(rho(w)), |w| = horizon.

    With filter_sub, only words without a nontrivial prefix in the subgroup
    are kept (the D' slice of the nearest-point projection).  The uniform
    radius is the measured contraction constant at this horizon: the worst
    singular gap ratio divided by the measured transversality of the
    sampled flags to the repelling flags (empirical fidelity constant,
    validated downstream by the random replay).
    """
    if prescreen:
        table = gap_growth(rep, min(horizon, 6))
        if not table.passes:
            raise NotContracting("representation failed the singular-gap pre-screen")
    batches = list(words_with_matrices(rep, horizon))
    ell, ws, arr = batches[-1]
    keep = []
    for i, w in enumerate(ws):
        if filter_sub is not None and not filter_sub.is_trivial:
            if any(filter_sub.contains(w[:k]) for k in range(1, len(w) + 1)):
                continue
        keep.append(i)
    if not keep:
        raise DomainError("no words survive the subgroup filter")
    arr = arr[keep]
    ws = [ws[i] for i in keep]
    u, s, vh = np.linalg.svd(arr)
    field = "C" if np.iscomplexobj(u) else "R"
    points = u[:, :, 0]
    normals = u[:, :, -1]
    gaps = np.maximum(s[:, 1] / s[:, 0], s[:, -1] / s[:, -2])
    # repelling flags ([v_d], v_1^perp) of each sampled word
    rep_pts = np.conj(vh[:, -1, :])
    rep_nrm = np.conj(vh[:, 0, :])
    # measured transversality: sampled attracting flags against repelling ones,
    # restricted to pairs (u, w) with u a legal continuation source of w
    probe_ell = min(horizon, 4)
    p_ell, p_ws, p_arr = batches[probe_ell - 1]
    pu = np.linalg.svd(p_arr)[0]
    probe_pts, probe_nrm = pu[:, :, 0], pu[:, :, -1]
    m_hat = 1.0
    first = np.array([pw[0] for pw in p_ws])
    for i, w in enumerate(ws):
        ok = first != -w[-1]
        if not np.any(ok):
            continue
        t1 = np.abs(probe_pts[ok] @ np.conj(rep_nrm[i]))
        t2 = np.abs(probe_nrm[ok] @ np.conj(rep_pts[i]))
        m_hat = min(m_hat, float(np.min(np.minimum(t1, t2))))
    if m_hat <= 1e-9:
        raise NotContracting("sampled flags degenerate against repelling data")
    radius = float(np.clip(np.max(gaps) / m_hat, 0.0, 1.0))
    return BallCover(field, points, normals, np.full(len(ws), radius),
                     label=label or f"limits(L={horizon})")


def lambda_flags(h_arr, field):
    """Attracting and repelling fixed flags of a biproximal matrix."""
    data = proximal(h_arr)
    if not (data.is_proximal and data.biproximal):
        raise DomainError("subgroup generator image is not biproximal")
    plus, minus = data.attracting, data.repelling
    if field == "C" and plus.field == "R":
        from .flags import flag_from_vectors
        plus = flag_from_vectors("C", plus.point.v.astype(complex),
                                 plus.hyperplane.normal.astype(complex))
        minus = flag_from_vectors("C", minus.point.v.astype(complex),
                                  minus.hyperplane.normal.astype(complex))
    return plus, minus


class OrbitData:
    """Truncated cyclic orbit H . base of a slice cover, with geometric tails.

    translates m = -M..M are iterated sound cover images; everything beyond
    lands inside the tail balls at the fixed flags of h (PowerTail bound).
    For trivial H the orbit degenerates to the slice itself.
    """

    def __init__(self, h_arr, base, m_horizon, label="", inner_seed=None):
        self.label = label
        self.slice = base
        self.h_arr = h_arr
        self.M = m_horizon if h_arr is not None else 0
        if inner_seed is None:
            inner_seed = base
        self.inner_seed = inner_seed
        self.translates = {0: base}
        self.inner_translates = {0: inner_seed}
        if h_arr is None:
            self.h_inv = None
            self.tail_plus = self.tail_minus = None
            self.lam_plus = self.lam_minus = None
            return
        self.h_inv = np.linalg.inv(h_arr)
        self.tail_plus = PowerTail(h_arr)
        self.tail_minus = PowerTail(self.h_inv)
        self.lam_plus = self.tail_plus.attracting
        self.lam_minus = self.tail_minus.attracting
        for m in range(1, self.M + 1):
            for mm in (m, -m):
                self.translates[mm] = cover_image(self.power(mm), base,
                                                  g_inv=self.power(-mm))
                self.inner_translates[mm] = cover_inner_image(
                    self.power(mm), inner_seed, g_inv=self.power(-mm))

    def power(self, m):
        """h^m as a matrix (exact matrix power, cached)."""
        if not hasattr(self, "_pow_cache"):
            self._pow_cache = {}
        if m not in self._pow_cache:
            base = self.h_arr if m >= 0 else self.h_inv
            self._pow_cache[m] = np.linalg.matrix_power(base, abs(m)) if m else \
                np.eye(self.slice.ambient, dtype=self.slice.points.dtype)
        return self._pow_cache[m]

    def extended_translate(self, m):
        """Translate beyond the stored horizon (direct power image)."""
        if m not in self.translates:
            self.translates[m] = cover_image(self.power(m), self.slice,
                                             g_inv=self.power(-m))
        return self.translates[m]

    def tail_radius(self, m_from):
        """Sound radius of balls at the fixed flags containing all |m| >= m_from."""
        rp = self.tail_plus.tail_radius(self.slice, m_from)
        rm = self.tail_minus.tail_radius(self.slice, m_from)
        return rp, rm

    def tail_cover(self, m_from):
        rp, rm = self.tail_radius(m_from)
        if not (math.isfinite(rp) and math.isfinite(rm)):
            raise DomainError("tail bound diverges; slice not transverse enough")
        return BallCover.from_flags([self.lam_plus, self.lam_minus], [rp, rm],
                                    label=f"{self.label}-tails")

    def lam_cover(self, radius=0.0):
        return BallCover.from_flags([self.lam_plus, self.lam_minus], radius,
                                    label=f"{self.label}-lamH")

    def outer(self):
        pieces = [self.translates[m] for m in sorted(self.translates) if abs(m) <= self.M]
        if self.h_arr is not None:
            pieces.append(self.tail_cover(self.M + 1))
        return cover_union(*pieces).relabel(f"{self.label}-outer")

    def inner(self):
        pieces = [self.inner_translates[m].shrink(INTERIOR_SHRINK)
                  for m in sorted(self.inner_translates)]
        return cover_union(*pieces).relabel(f"{self.label}-inner")


# ----------------------------------------------------------------------
# interactive pairs (amalgam case)


class InteractivePair:
    """The compact sets A, B of the amalgam combination theorem as orbit data."""

    def __init__(self, a_orbit, b_orbit, sub, eps, params):
        self.A = a_orbit
        self.B = b_orbit
        self.H = sub
        self.eps = eps
        self.params = params

    def __repr__(self):
        return f"InteractivePair(eps={self.eps}, |A|={len(self.A.outer())}, |B|={len(self.B.outer())})"


def _h_matrix(rep1, rep2, sub):
    """The common matrix of the cyclic subgroup generator under both reps."""
    if sub.is_trivial:
        return None
    if len(sub.generators) != 1:
        raise ConfigError("certification supports trivial or cyclic H only")
    w = sub.generators[0]
    a1 = rep1.evaluate(w).array
    a2 = rep2.evaluate(w).array
    if np.max(np.abs(a1 - a2)) > 1e-8 * max(1.0, np.max(np.abs(a1))):
        raise DomainError("the two representations differ on H")
    if np.iscomplexobj(a1) or np.iscomplexobj(a2):
        return a1.astype(complex)
    return a1


def build_interactive_pair(rep1, rep2, sub, eps_grid=None, slice_horizon=4,
                           orbit_horizon=6):
    """Grid search over eps building H-orbit covers A, B with antipodal slices.

    Realizes the eps_0/eps_1 existence of the construction by halving eps
    until the slice-level antipodality margins are positive.
    """
    eps_grid = list(eps_grid or EPS_GRID)
    h_arr = _h_matrix(rep1, rep2, sub)
    d1 = sample_limit_set(rep1, slice_horizon, filter_sub=sub, label="D1")
    d2 = sample_limit_set(rep2, slice_horizon, filter_sub=sub, label="D2")
    if d1.field != d2.field:
        field = "C"
        d1 = promote_cover(d1, field)
        d2 = promote_cover(d2, field)
    last_reason = ""
    for eps in eps_grid:
        r1 = float(np.max(d1.radii))
        r2 = float(np.max(d2.radii))
        if eps <= max(r1, r2):
            last_reason = f"eps={eps} not above the slice fidelity radius {max(r1, r2):.2e}"
            continue
        s1 = d1.inflate(eps)
        s2 = d2.inflate(eps)
        # cheap slice-level antipodality first; orbits only on success
        checks = [antipodality_scan(s1, s2)[0]]
        if h_arr is not None:
            plus, minus = lambda_flags(h_arr, s1.field)
            lam0 = BallCover.from_flags([plus, minus], 0.0, label="lamH")
            checks.append(antipodality_scan(s1, lam0)[0])
            checks.append(antipodality_scan(s2, lam0)[0])
        if min(checks) <= 0:
            last_reason = f"min precondition margin {min(checks):.3e} at eps={eps}"
            continue
        # interiors: centers are within the fidelity radius of true limit
        # points, so balls of radius eps - r sit inside N_eps(D)
        in1 = BallCover(d1.field, d1.points, d1.normals,
                        np.maximum(0.0, eps - d1.radii), label="D1-in")
        in2 = BallCover(d2.field, d2.points, d2.normals,
                        np.maximum(0.0, eps - d2.radii), label="D2-in")
        try:
            a_orbit = OrbitData(h_arr, s1, orbit_horizon, label="A", inner_seed=in1)
            b_orbit = OrbitData(h_arr, s2, orbit_horizon, label="B", inner_seed=in2)
            if h_arr is not None:
                tails_a = a_orbit.tail_cover(orbit_horizon + 1)
                tails_b = b_orbit.tail_cover(orbit_horizon + 1)
                checks.append(antipodality_scan(tails_a, s2)[0])
                checks.append(antipodality_scan(tails_b, s1)[0])
        except DomainError as exc:
            last_reason = str(exc)
            continue
        if min(checks) > 0:
            params = {"eps": eps, "slice_horizon": slice_horizon,
                      "orbit_horizon": orbit_horizon,
                      "slice_radius": float(np.max(d1.radii))}
            return InteractivePair(a_orbit, b_orbit, sub, eps, params)
        last_reason = f"min precondition margin {min(checks):.3e} at eps={eps}"
    raise NoValidEpsilon(f"epsilon grid exhausted ({last_reason})")


# ----------------------------------------------------------------------
# certificates


class Certificate:
    """Structured verification report for one ping-pong pipeline run."""

    def __init__(self, pipeline, horizon, params, seed=DEFAULT_SEED):
        self.pipeline = pipeline
        self.horizon = horizon
        self.params = dict(params)
        self.seed = seed
        self.conditions = []

    def add(self, cid, description, margin):
        margin = float(margin)
        self.conditions.append({
            "id": cid, "description": description, "margin": margin,
            "status": "pass" if margin > 0 else "fail",
        })

    @property
    def passed(self):
        return all(c["status"] == "pass" for c in self.conditions)

    @property
    def exit_code(self):
        return 0 if self.passed else 2

    def margin(self, cid):
        for c in self.conditions:
            if c["id"] == cid:
                return c["margin"]
        raise KeyError(cid)

    def to_json_dict(self):
        return {"pipeline": self.pipeline, "L": self.horizon,
                "params": self.params, "seed": self.seed,
                "conditions": self.conditions, "pass": self.passed}

    def dumps(self):
        return json.dumps(self.to_json_dict(), sort_keys=True, indent=1)

    def table(self):
        lines = [f"pipeline {self.pipeline}  (L = {self.horizon}, seed = {self.seed:#x})"]
        for c in self.conditions:
            lines.append(f"  [{c['status']:4s}] {c['id']:24s} margin = {c['margin']:+.6f}  {c['description']}")
        lines.append(f"  overall: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines)


def _fi_pair(fi):
    if isinstance(fi, tuple):
        return fi
    return fi, fi


def _prefix_power(w, h_word):
    """Signed count of leading h_word (or inverse) factors of w."""
    if not h_word:
        return 0
    w = tuple(w)
    for sign, piece in ((1, tuple(h_word)), (-1, inverse(h_word))):
        k = 0
        rest = w
        while rest[:len(piece)] == piece:
            k += 1
            rest = rest[len(piece):]
        if k:
            return sign * k
    return 0


def _target_hint(orbit, w, h_word):
    """Inner-cover subset near the expected landing region of w . B."""
    if orbit.h_arr is None:
        return orbit.inner()
    m = max(-orbit.M, min(orbit.M, _prefix_power(w, h_word)))
    pieces = [orbit.inner_translates[k].shrink(INTERIOR_SHRINK)
              for k in (m - 1, m, m + 1) if -orbit.M <= k <= orbit.M]
    return cover_union(*pieces)


def _staged_contains(img, subset_cover, full_cover):
    """Containment margin, testing the hinted subset first and the full
    cover only for balls the subset does not settle (sound either way)."""
    d = pairwise_flag_dist(img, subset_cover)
    per = np.max(subset_cover.radii[None, :] - d - img.radii[:, None], axis=1)
    bad = per <= 0
    if np.any(bad):
        sub_img = img.subset(bad)
        d2 = pairwise_flag_dist(sub_img, full_cover)
        per2 = np.max(full_cover.radii[None, :] - d2 - sub_img.radii[:, None], axis=1)
        per[bad] = np.maximum(per[bad], per2)
    return float(np.min(per))


def _fi_words_outside(gens, fi, sub, horizon, exclude_also=None):
    """Minimal coset representatives of fi-subgroup words outside H, |w| <= L."""
    reps = []
    for w in enumerate_reduced(gens, horizon):
        if not w or not fi.contains(w):
            continue
        if sub.contains(w):
            continue
        if exclude_also is not None and exclude_also.contains(w):
            continue
        if coset_norm(w, sub) != len(w):
            continue
        if any(len(r) <= len(w) and sub.contains(reduce_word(inverse(r) + w)) for r in reps):
            continue
        reps.append(w)
    return reps


def verify_amalgam(rep1, rep2, sub, pair, fi, horizon, seed=DEFAULT_SEED,
                   sample_horizon=None):
    """Margins for the four hypotheses of the amalgam combination theorem.

    (1) interior antipodality via the H-reduced translate family;
    (2) limit samples off Lambda_H interior to their cover, Lambda_H on the
        boundary; (3) gamma B inside A-interior (and symmetrically) for
        finite-index words of positive coset norm up to the horizon;
    (4) H-invariance of the centers with tail absorption.
    """
    fi1, fi2 = _fi_pair(fi)
    a, b = pair.A, pair.B
    params = dict(pair.params)
    params["fi_degree"] = (fi1.degree, fi2.degree)
    cert = Certificate("amalgam", horizon, params, seed=seed)
    m2 = 2 * a.M if a.h_arr is not None else 0

    # (1) interior antipodality through the translate reduction
    margins1 = []
    for m in range(-m2, m2 + 1):
        margins1.append(antipodality_scan(a.extended_translate(m), b.slice)[0])
    if a.h_arr is not None:
        margins1.append(antipodality_scan(a.tail_cover(m2 + 1), b.slice)[0])
        margins1.append(antipodality_scan(a.lam_cover(0.0), b.slice)[0])
        margins1.append(antipodality_scan(b.lam_cover(0.0), a.slice)[0])
    cert.add("interior_antipodality",
             "A deg and B deg antipodal (H-reduced translate family)",
             min(margins1))

    # (2) boundary condition: limit samples off Lambda_H lie in the interiors
    sample_h = sample_horizon or pair.params.get("slice_horizon", 4) + 1
    margins2 = []
    for rep, orbit, other in ((rep1, a, b), (rep2, b, a)):
        cover = promote_cover(sample_limit_set(rep, sample_h, prescreen=False,
                                               label="samples"), a.slice.field)
        inner = orbit.inner()
        if orbit.h_arr is not None:
            lam = orbit.lam_cover(0.0)
            d_lam = np.min(pairwise_flag_dist(cover, lam), axis=1)
            rp, rm = orbit.tail_radius(orbit.M + 1)
            mask = d_lam > max(rp, rm) + cover.radii
            if not np.any(mask):
                margins2.append(-1.0)
                continue
            sel = cover.subset(mask)
        else:
            sel = cover
        for i in range(len(sel)):
            margins2.append(cover_contains_point(inner, sel.flag(i)))
        if orbit.h_arr is not None:
            # Lambda_H stays on the frontier: outside the open cover
            for f in (orbit.lam_plus, orbit.lam_minus):
                margins2.append(-cover_contains_point(inner, f))
    cert.add("limit_boundary",
             "limit samples off Lambda_H interior to covers; Lambda_H on frontier",
             min(margins2))

    # (3) coset words map the opposite cover strictly inside; the orbit
    # pieces are imaged under the composed matrices w h^m directly from the
    # tight slice so Lipschitz constants never compound
    margins3 = []
    words1 = _fi_words_outside(rep1.gens, fi1, sub, horizon)
    words2 = _fi_words_outside(rep2.gens, fi2, sub, horizon)
    if not words1 or not words2:
        margins3.append(-1.0)
    a_inner = a.inner()
    b_inner = b.inner()
    h_word = sub.generators[0] if sub.generators else None
    piece_cut = min(4, a.M) if a.h_arr is not None else 0
    for words, rep, src, dst in ((words1, rep1, b, a), (words2, rep2, a, b)):
        dst_inner = a_inner if dst is a else b_inner
        for w in words:
            wmat = _word_matrix(rep, w)
            wmat_inv = np.linalg.inv(wmat)
            hint = _target_hint(dst, w, h_word)
            if src.h_arr is None:
                img = cover_image(wmat, src.slice, g_inv=wmat_inv)
                margins3.append(_staged_contains(img, hint, dst_inner))
                continue
            for m in range(-piece_cut, piece_cut + 1):
                mat = wmat @ src.power(m)
                mat_inv = src.power(-m) @ wmat_inv
                img = cover_image(mat, src.slice, g_inv=mat_inv)
                margins3.append(_staged_contains(img, hint, dst_inner))
            tail_img = cover_image(wmat, src.tail_cover(piece_cut + 1), g_inv=wmat_inv)
            margins3.append(_staged_contains(tail_img, hint, dst_inner))
    cert.add("coset_ping_pong",
             f"gamma B in A-int and gamma' A in B-int for {len(words1)}+{len(words2)} coset words",
             min(margins3))

    # (4) H-invariance of the centers with tail absorption
    margins4 = []
    if a.h_arr is None:
        margins4.append(1.0)
    else:
        for orbit in (a, b):
            tails = orbit.tail_cover(orbit.M + 1)
            for direction, arr in ((1, orbit.h_arr), (-1, np.linalg.inv(orbit.h_arr))):
                edge = cover_image(arr, orbit.translates[direction * orbit.M])
                margins4.append(cover_contains_cover(edge, tails))
                d = flag_dist(orbit.lam_plus if direction > 0 else orbit.lam_minus,
                              xi_flag(np.linalg.matrix_power(arr, 40)))
                margins4.append(0.5 - d)
    cert.add("h_invariance",
             "H maps translates into the orbit; edge translates absorbed by tails",
             min(margins4))
    return cert


# ----------------------------------------------------------------------
# injectivity cross-checks


def _stack_norm_gaps(mats):
    arr = np.stack(mats)
    n = len(mats)
    best = math.inf
    for i in range(n):
        diffs = np.abs(arr[i + 1:] - arr[i]).reshape(n - i - 1, -1)
        if len(diffs):
            best = min(best, float(np.min(np.max(diffs, axis=1))))
    return best


def amalgam_injectivity(rep1, rep2, sub, syllables=4, rep_len=1):
    """Min pairwise distance between matrices of distinct amalgam normal forms."""
    mats = []
    for form in amalgam_normal_forms(rep1.gens, rep2.gens, sub, syllables,
                                     rep_len=rep_len):
        m = None
        for factor, w in form:
            rep = rep1 if factor == 1 else rep2
            piece = rep.evaluate(w)
            piece = piece.array.astype(complex) if piece.field == "R" else piece.array
            m = piece if m is None else m @ piece
        mats.append(m)
    if len(mats) < 2:
        raise DomainError("not enough normal forms to compare")
    return _stack_norm_gaps(mats), len(mats)


def hnn_injectivity(rep, t_matrix, sub_minus, sub_plus, phi, max_len=4,
                    gamma_len=None):
    """Min pairwise distance between matrices of distinct Britton forms."""
    mats = []
    count = 0
    for form in hnn_normal_forms(rep.gens, sub_minus, sub_plus, phi, max_len,
                                 gamma_len=gamma_len):
        mats.append(evaluate_hnn_form(rep, t_matrix, form).array)
        count += 1
    if count < 2:
        raise DomainError("not enough Britton forms to compare")
    return _stack_norm_gaps(mats), count


# ----------------------------------------------------------------------
# random replay


def replay_amalgam(rep1, rep2, sub, pair, fi, horizon, n_samples=10000,
                   seed=DEFAULT_SEED, word_cap=40):
    """Re-validate a passing certificate's claims on random ball samples.

    Returns the number of violations (0 for a sound certificate).
    """
    rng = np.random.default_rng(seed)
    fi1, fi2 = _fi_pair(fi)
    a, b = pair.A, pair.B
    violations = 0
    per = max(1, n_samples // 4)

    def draw(cover, count):
        out = []
        sizes = rng.multinomial(count, np.full(len(cover), 1.0 / len(cover)))
        for i, k in enumerate(sizes):
            if k:
                out.extend(sample_in_ball(rng, cover, i, int(k)))
        return out

    # claim 1: translate family antipodal to the B slice
    fam = cover_union(*[a.extended_translate(m) for m in range(-a.M, a.M + 1)])
    xs = draw(fam, per)
    ys = draw(b.slice, max(1, per // 10))
    for x in xs:
        for y in ys[:5]:
            from .flags import antipodal_distance
            if antipodal_distance(x, y) <= 0:
                violations += 1

    # claim 2: samples inside the A interior stay in the outer cover
    inner = a.inner()
    outer = a.outer()
    for x in draw(inner, per):
        if cover_contains_point(outer, x) < -1e-12:
            violations += 1

    # claim 3: coset words map sampled B points into the A cover
    words1 = _fi_words_outside(rep1.gens, fi1, sub, horizon)[:word_cap]
    b_outer = b.outer()
    a_inner = a.inner()
    pts = draw(b_outer, per)
    for w in words1:
        arr = _word_matrix(rep1, w)
        for x in pts[: max(1, len(pts) // max(1, len(words1)))]:
            gx = _act(arr, x)
            if cover_contains_point(a_inner, gx) < 0:
                violations += 1

    # claim 4: H moves outer points within the outer cover (with tolerance)
    if a.h_arr is not None:
        for x in draw(outer, per):
            gx = _act(a.h_arr, x)
            if cover_contains_point(outer.inflate(1e-9), gx) < 0:
                violations += 1
    return violations


def _act(arr, flag):
    from .flags import flag_from_vectors
    p = arr @ flag.point.v
    n = np.linalg.solve(np.conj(arr).T, flag.hyperplane.normal)
    return flag_from_vectors(flag.field, p, n, fix_incidence=False)
