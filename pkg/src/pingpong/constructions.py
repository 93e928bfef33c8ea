"""Explicit conjugators, doubled and paired representations, the quaternionic
block machinery, HNN stable letters, and exact dimension budgets."""

import itertools
import math

import numpy as np

from .errors import (
    ConfigError, DomainError, NotProximal, ProximalizationFailed, ShapeError,
)
from .dynamics import cartan, proximal, xi_flag
from .flags import act_on_flag, flag_dist
from .multilinear import WedgeIndex, wedge_matrix, wedge_vector
from .scalars import Matrix, embed_complex_in_quat
from .words import FreeRep, parse_word, reduce_word, word_str

COMMUTE_TOL = 1e-8


def _as_complex(m):
    if m.field == "C":
        return m
    if m.field == "R":
        return Matrix("C", m.array.astype(complex))
    raise ShapeError("expected an R or C matrix")


def bilinear_pair(u, v):
    """Sum u_i v_i without conjugation (the pairing used by the conjugator lemmas)."""
    return np.sum(np.asarray(u) * np.asarray(v))


def cyclic_conjugator(rep, gamma, tol=COMMUTE_TOL):
    """The complex conjugator diag(I_{d-2}, 1, i) in the eigenbasis of rho(gamma).

    rho(gamma) must be real, semisimple and biproximal; the returned matrix
    commutes with rho(gamma) and realizes the bilinear antipodality identity
    <g^{+-1} v_x, v_y> = +-i X_d Y_d + sum_{k<d} X_k Y_k in eigen coordinates.
    """
    gamma = parse_word(rep.gens, gamma) if isinstance(gamma, str) else reduce_word(gamma)
    m = rep.evaluate(gamma)
    if m.field == "C":
        if np.max(np.abs(m.array.imag)) > 1e-12:
            raise DomainError("rho(gamma) must be a real matrix")
        m = Matrix("R", m.array.real)
    if m.field != "R":
        raise DomainError("cyclic_conjugator expects a real representation value")
    d = m.rows
    if d < 2:
        raise ShapeError("need dimension >= 2")
    data = proximal(m.array)
    if not (data.is_proximal and data.biproximal):
        raise NotProximal("rho(gamma) is not biproximal")
    vals, right, _left = data.eig
    p = np.column_stack([right[:, 1:-1], right[:, 0], right[:, -1]]).astype(complex)
    sp = np.linalg.svd(p, compute_uv=False)
    if sp[-1] <= 1e-9 * sp[0]:
        raise DomainError("rho(gamma) is not numerically semisimple")
    diag = np.ones(d, dtype=complex)
    diag[-1] = 1j
    g = Matrix("C", p @ np.diag(diag) @ np.linalg.inv(p))
    # commutation and identity replay
    mc = _as_complex(m)
    comm = (g @ mc - mc @ g).norm_inf()
    if comm > tol * max(1.0, mc.norm_inf()):
        raise DomainError(f"conjugator fails to commute (|[g, rho]| = {comm:.2e})")
    rng = np.random.default_rng(12345)
    pinv = np.linalg.inv(p)
    for _ in range(8):
        vx = rng.standard_normal(d)
        vy = rng.standard_normal(d)
        x_coord = pinv @ vx
        y_coord = p.T @ vy
        for sign, mat in ((1, g.array), (-1, np.conj(g.array))):
            lhs = bilinear_pair(mat @ vx, vy)
            rhs = sign * 1j * x_coord[-1] * y_coord[-1] + np.sum(x_coord[:-1] * y_coord[:-1])
            if abs(lhs - rhs) > 1e-8 * max(1.0, abs(lhs)):
                raise DomainError("conjugator identity replay failed")
    return g


def doubling_conjugator(d):
    """w = diag(I_d, i I_d), the order-4 conjugator of the realified doubling."""
    if d < 1:
        raise ShapeError("d must be >= 1")
    diag = np.concatenate([np.ones(d), 1j * np.ones(d)])
    return Matrix("C", np.diag(diag))


def doubled_plane_pairing(u, v, a, b):
    """Lambda^2 pairing of the w-translated plane with the dual plane.

    Equals i(<u,a>^2 + <u,b>^2 + <v,a>^2 + <v,b>^2) for real u, v, a, b.
    """
    from .multilinear import gram_pairing
    u, v, a, b = (np.asarray(x, dtype=float) for x in (u, v, a, b))
    x1 = np.concatenate([u, 1j * v])
    x2 = np.concatenate([-v, 1j * u])
    y1 = np.concatenate([a, b]).astype(complex)
    y2 = np.concatenate([-b, a]).astype(complex)
    return gram_pairing([x1, x2], [y1, y2])


def pairing_block_matrix(d):
    """The explicit g = [[I, (i/2)I], [iI, (1/2)I]] of the paired construction."""
    eye = np.eye(d)
    return Matrix("C", np.block([[eye, 0.5j * eye], [1j * eye, 0.5 * eye]]))


class PairedRep:
    """Two representations merged into one block representation with the
    unit coordinate appended: rho(w) = diag(g diag(rho1, rho2) g^{-1}, 1)."""

    def __init__(self, rho1, rho2, rho, g):
        self.rho1 = rho1
        self.rho2 = rho2
        self.rho = rho
        self.g = g

    @property
    def dim(self):
        return self.rho.dim


def paired_rep(rho1, rho2, faithful_len=2):
    """Block-pair two d-dimensional representations into SL_{2d+1}(C)."""
    if rho1.dim != rho2.dim:
        raise ShapeError("paired representations must share their dimension")
    if rho1.gens.labels != rho2.gens.labels:
        raise ShapeError("paired representations must share their marking")
    d = rho1.dim
    g = pairing_block_matrix(d)
    gbar_inv_g = g.conj().inv() @ g
    expected = np.block([[np.zeros((d, d)), 0.5j * np.eye(d)],
                         [2j * np.eye(d), np.zeros((d, d))]])
    if np.max(np.abs(gbar_inv_g.array - expected)) > 1e-12:
        raise DomainError("conjugate-mismatch block identity failed")
    # light faithfulness screen on short words
    from .words import enumerate_reduced
    for rho in (rho1, rho2):
        eye = Matrix.identity(rho.field, d)
        for w in enumerate_reduced(rho1.gens, faithful_len):
            if w and rho.evaluate(w).close_to(eye, 1e-10):
                raise DomainError(f"representation not faithful on short word {w}")
    ginv = g.inv()
    images = {}
    for lab in rho1.gens.labels:
        m1 = _as_complex(rho1.images[lab]).array
        m2 = _as_complex(rho2.images[lab]).array
        block = np.zeros((2 * d, 2 * d), dtype=complex)
        block[:d, :d] = m1
        block[d:, d:] = m2
        inner = g.array @ block @ ginv.array
        full = np.zeros((2 * d + 1, 2 * d + 1), dtype=complex)
        full[:2 * d, :2 * d] = inner
        full[2 * d, 2 * d] = 1.0
        images[lab] = Matrix("C", full)
    return PairedRep(rho1, rho2, FreeRep(rho1.gens, images), g)


def paired_mismatch_pairing(a1, a2, b1, b2):
    """<Lambda^2(gbar^-1 g)((a1,0)^(0,a2)), (b1,0)^(0,b2)> = <a1,b2><a2,b1>."""
    from .multilinear import gram_pairing
    d = len(a1)
    gg = pairing_block_matrix(d)
    m = gg.conj().inv().array @ gg.array
    x1 = m @ np.concatenate([a1, np.zeros(d)]).astype(complex)
    x2 = m @ np.concatenate([np.zeros(d), a2]).astype(complex)
    y1 = np.concatenate([b1, np.zeros(d)]).astype(complex)
    y2 = np.concatenate([np.zeros(d), b2]).astype(complex)
    return gram_pairing([x1, x2], [y1, y2])


# ----------------------------------------------------------------------
# quaternionic structure on Lambda^2(R^d + R^d)


class QuatStructure:
    """The splitting Lambda^2(V1 + V2) = W1 + U + W3 with the f_{+-1} twist
    on U and the quaternionic block element beta = diag(j, f_1, j)."""

    def __init__(self, d, w, f1, fm1, beta, perm):
        self.d = d
        self.w = w
        self.f1 = f1
        self.fm1 = fm1
        self.beta = beta
        self.perm = perm  # split-basis index -> lex wedge index
        self.dims = (d * (d - 1) // 2, d * d, d * (d - 1) // 2)

    @property
    def total_dim(self):
        return sum(self.dims)

    def lex_to_split(self, m):
        """Conjugate a Lambda^2 matrix from the lex wedge basis to the split basis."""
        arr = m.array if isinstance(m, Matrix) else np.asarray(m)
        return arr[np.ix_(self.perm, self.perm)]


def quat_structure(d, w, tol=1e-10):
    """Build f_{+-1} = (1/sqrt2)(id +- i w(x)w) on U and beta = diag(j, f_1, j).

    w must be a real involution; f_1 f_{-1} = I_{W_2} exactly because
    (w(x)w)^2 = id.
    """
    warr = w.array if isinstance(w, Matrix) else np.asarray(w, dtype=float)
    if warr.shape != (d, d):
        raise ShapeError(f"w must be {d}x{d}")
    if np.max(np.abs(warr @ warr - np.eye(d))) > tol:
        raise DomainError("w is not an involution")
    ww = np.kron(warr, warr)
    f1 = Matrix("C", (np.eye(d * d) + 1j * ww) / math.sqrt(2.0))
    fm1 = Matrix("C", (np.eye(d * d) - 1j * ww) / math.sqrt(2.0))
    # permutation from the split ordering (W1, U, W3) to the lex wedge basis
    idx = WedgeIndex(2 * d, 2)
    perm = []
    for i, j in itertools.combinations(range(d), 2):
        perm.append(idx.position[(i, j)])
    for p in range(d):
        for q in range(d):
            perm.append(idx.position[(p, d + q)])
    for i, j in itertools.combinations(range(d), 2):
        perm.append(idx.position[(d + i, d + j)])
    perm = np.asarray(perm)
    m1 = d * (d - 1) // 2
    j_comp = [0.0, 0.0, 1.0, 0.0]
    blocks = [Matrix.diag("H", [j_comp] * m1)] if m1 else []
    blocks.append(embed_complex_in_quat(f1))
    if m1:
        blocks.append(Matrix.diag("H", [j_comp] * m1))
    beta = Matrix.from_blocks("H", blocks)
    st = QuatStructure(d, warr, f1, fm1, beta, perm)
    scale = max(1.0, float(np.max(np.abs(ww)) ** 2))
    if (f1 @ fm1 - Matrix.identity("C", d * d)).norm_inf() > 1e-12 * scale:
        raise DomainError("f1 f-1 = I failed")
    return st


def beta_claim_components(st, u, v):
    """Decompose (u,v)-wedge data as in the beta-claim: returns (B1, B2, B3)
    in split coordinates of Lambda^2(R^{2d})."""
    d = st.d
    z = np.zeros(d)

    def emb(x, y):
        return np.concatenate([x, y])

    idx = WedgeIndex(2 * d, 2)
    b1 = wedge_vector([emb(u, z), emb(-v, z)], idx) + wedge_vector([emb(z, v), emb(z, u)], idx)
    b2 = wedge_vector([emb(u, z), emb(z, u)], idx) + wedge_vector([emb(v, z), emb(z, v)], idx)
    b3 = wedge_vector([emb(st.w @ u, z), emb(z, st.w @ u)], idx) + \
        wedge_vector([emb(st.w @ v, z), emb(z, st.w @ v)], idx)
    return b1, b2, b3


# ----------------------------------------------------------------------
# block wedge representation with the shift conjugator


def _psi_as_word_map(gens, psi):
    out = {}
    for lab in gens.labels:
        img = psi[lab]
        out[lab] = parse_word(gens, img) if isinstance(img, str) else reduce_word(img)
    return out


def _apply_word_map(gens, word_map, w):
    from .words import concat, inverse
    out = ()
    for x in w:
        lab = gens.labels[abs(x) - 1]
        piece = word_map[lab] if x > 0 else inverse(word_map[lab])
        out = concat(out, piece)
    return out


def wedge_block_rep(rep, psi, q):
    """tau'(w) = Lambda^{2q} diag(rho(w), rho(psi w), ..., rho(psi^{2q-1} w)),
    together with the order-2 shift element w0 = Lambda^{2q} diag(W0, ..., W0).

    psi maps generator labels to words and must have order dividing 2q.
    """
    if q < 1:
        raise ConfigError("q must be >= 1")
    word_map = _psi_as_word_map(rep.gens, psi)
    # order check: psi^{2q} must restore every generator
    for lab in rep.gens.labels:
        w = (rep.gens.labels.index(lab) + 1,)
        cur = w
        for _ in range(2 * q):
            cur = _apply_word_map(rep.gens, word_map, cur)
        if cur != w:
            raise ConfigError("psi does not have order dividing 2q on the generators")
    d = rep.dim
    if rep.field not in ("R", "C"):
        raise ConfigError("wedge_block_rep expects an R or C representation")
    images = {}
    for lab in rep.gens.labels:
        blocks = []
        w = (rep.gens.labels.index(lab) + 1,)
        cur = w
        for _ in range(2 * q):
            blocks.append(rep.evaluate(cur))
            cur = _apply_word_map(rep.gens, word_map, cur)
        big = Matrix.from_blocks(rep.field, blocks)
        images[lab] = wedge_matrix(big, 2 * q)
    tau = FreeRep(rep.gens, images)
    w0_small = np.zeros((2 * d, 2 * d))
    w0_small[:d, d:] = np.eye(d)
    w0_small[d:, :d] = np.eye(d)
    w0_big = Matrix.from_blocks("R", [Matrix("R", w0_small)] * q)
    w0 = wedge_matrix(w0_big, 2 * q)
    return tau, w0


def shifted_block_image(rep, psi, q, w):
    """Lambda^{2q} of the psi-shifted block tuple (oracle for the w0 identity)."""
    word_map = _psi_as_word_map(rep.gens, psi)
    images = []
    cur = parse_word(rep.gens, w) if isinstance(w, str) else reduce_word(w)
    seq = []
    for _ in range(2 * q):
        seq.append(cur)
        cur = _apply_word_map(rep.gens, word_map, cur)
    # pairwise swap: (g0, g1, g2, g3, ...) -> (g1, g0, g3, g2, ...)
    swapped = []
    for i in range(0, 2 * q, 2):
        swapped += [seq[i + 1], seq[i]]
    blocks = [rep.evaluate(s) for s in swapped]
    return wedge_matrix(Matrix.from_blocks(rep.field, blocks), 2 * q)


# ----------------------------------------------------------------------
# HNN stable letters


class StableLetter:
    """Accepted stable letter t_p = tau rho(gamma)^p with its diagnostics."""

    def __init__(self, matrix, p, xi_defect, gap):
        self.matrix = matrix
        self.p = p
        self.xi_defect = xi_defect
        self.gap = gap

    def __repr__(self):
        return f"StableLetter(p={self.p}, gap={self.gap:.3e}, xi_defect={self.xi_defect:.3e})"


def _xi_defect(t_arr, target_plus, target_minus, k_max):
    worst = 0.0
    cur = np.eye(t_arr.shape[0], dtype=t_arr.dtype)
    inv = np.linalg.inv(t_arr)
    cur_inv = np.eye(t_arr.shape[0], dtype=t_arr.dtype)
    for _k in range(1, k_max + 1):
        cur = cur @ t_arr
        cur_inv = cur_inv @ inv
        try:
            worst = max(worst, flag_dist(xi_flag(cur), target_plus))
            worst = max(worst, flag_dist(xi_flag(cur_inv), target_minus))
        except Exception:
            return math.inf
    return worst


def hnn_stable_letter(tau, rep, gamma, p=None, p_max=64, k_max=8, fact_tol=0.25):
    """t_p = tau rho(gamma)^p, accepted when biproximal with Xi(t_p^k) close
    to tau gamma^+ and Xi(t_p^-k) close to gamma^- for all k <= k_max.

    With p=None the smallest accepted p <= p_max is found by a linear sweep.
    """
    gamma = parse_word(rep.gens, gamma) if isinstance(gamma, str) else reduce_word(gamma)
    gm = rep.evaluate(gamma)
    gdata = proximal(gm.array if gm.field != "H" else gm)
    if not (gdata.is_proximal and gdata.biproximal):
        raise NotProximal("rho(gamma) is not biproximal")
    tau_c = _as_complex(tau)
    gm_c = _as_complex(gm)
    target_plus = act_on_flag(tau_c.array, _complexify_flag(gdata.attracting))
    target_minus = _complexify_flag(gdata.repelling)

    def attempt(pp):
        t = tau_c.array @ np.linalg.matrix_power(gm_c.array, pp)
        data = proximal(t)
        if not (data.is_proximal and data.biproximal):
            return None
        defect = _xi_defect(t, target_plus, target_minus, k_max)
        if defect > fact_tol:
            return None
        return StableLetter(Matrix("C", t), pp, defect, data.gap)

    if p is not None:
        out = attempt(p)
        if out is None:
            raise NotProximal(f"t_p not accepted at p = {p}")
        return out
    for pp in range(1, p_max + 1):
        out = attempt(pp)
        if out is not None:
            return out
    raise ProximalizationFailed(f"no p <= {p_max} gave a biproximal stable letter")


def _complexify_flag(f):
    from .flags import flag_from_vectors
    if f.field == "C":
        return f
    return flag_from_vectors("C", f.point.v.astype(complex),
                             f.hyperplane.normal.astype(complex))


def codim1_conjugator(n):
    """alpha = diag(i, I_{n-1}); alpha^4 = I."""
    if n < 2:
        raise ShapeError("n must be >= 2")
    diag = np.ones(n, dtype=complex)
    diag[0] = 1j
    return Matrix("C", np.diag(diag))


# ----------------------------------------------------------------------
# exact dimension budgets

DIMENSION_TAGS = ("double_2d", "pair_m", "quat_r", "wedge_p", "quat_remark")


def dimension_budget(tag, d, q=None):
    """Exact integer output dimensions of the paper's constructions."""
    if d < 1:
        raise ConfigError("d must be >= 1")
    if tag == "double_2d":
        return 2 * d
    if tag == "pair_m":
        return 2 * d * (2 * d + 1)
    if tag == "quat_r":
        n = math.comb(4 * d * (2 * d - 1), 4)
        return 2 * n * (2 * n + 1)
    if tag == "wedge_p":
        if q is None or q < 1:
            raise ConfigError("wedge_p needs q >= 1")
        n = math.comb(2 * q * d, 2 * q)
        return n * (2 * n + 1)
    if tag == "quat_remark":
        return 2025 * d ** 8
    raise ConfigError(f"unknown dimension tag {tag!r}")
