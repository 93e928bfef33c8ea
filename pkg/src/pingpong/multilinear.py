"""Exterior and symmetric power functors, Gram pairings, Pluecker embeddings.

The wedge basis of Lambda^k K^d is the set of strictly increasing k-tuples
of indices in lexicographic order; all identities in the library are
stated in this basis, so the convention is fixed globally here.
"""

import itertools
import math

import numpy as np

from .errors import DegenerateInput, DomainError, FieldError, ShapeError
from .flags import Hyperplane, ProjPoint
from .scalars import Matrix


class WedgeIndex:
    """Ordered basis of k-subsets of {0..d-1} in lexicographic order."""

    def __init__(self, d, k):
        if not 1 <= k <= d:
            raise ShapeError(f"wedge degree k={k} out of range for d={d}")
        self.d = d
        self.k = k
        self.tuples = list(itertools.combinations(range(d), k))
        self.position = {t: i for i, t in enumerate(self.tuples)}

    def __len__(self):
        return len(self.tuples)

    def __repr__(self):
        return f"WedgeIndex(d={self.d}, k={self.k}, size={len(self)})"


def wedge_matrix(m, k):
    """k-th exterior power: entry (I, J) is the k x k minor on rows I, cols J.

    Functorial by Cauchy-Binet: wedge(AB, k) = wedge(A, k) @ wedge(B, k).
    """
    if isinstance(m, Matrix):
        if m.field == "H":
            raise FieldError("exterior powers over H are not defined; realify first")
        field, arr = m.field, m.array
    else:
        arr = np.asarray(m)
        field = "C" if np.iscomplexobj(arr) else "R"
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ShapeError("wedge_matrix expects a square matrix")
    d = arr.shape[0]
    idx = WedgeIndex(d, k)
    n = len(idx)
    out = np.empty((n, n), dtype=arr.dtype)
    rows = [np.asarray(t) for t in idx.tuples]
    for a, ri in enumerate(rows):
        sub = arr[ri]
        for b, ci in enumerate(rows):
            out[a, b] = np.linalg.det(sub[:, ci])
    return Matrix(field, out)


def wedge_vector(vectors, idx=None):
    """Coordinates of v_1 ^ ... ^ v_k in the lexicographic wedge basis."""
    vs = [np.asarray(v) for v in vectors]
    k = len(vs)
    d = vs[0].shape[0]
    if any(v.shape != (d,) for v in vs):
        raise ShapeError("wedge_vector expects k vectors of equal dimension")
    if idx is None:
        idx = WedgeIndex(d, k)
    mat = np.stack(vs)  # k x d
    out = np.empty(len(idx), dtype=mat.dtype)
    for a, t in enumerate(idx.tuples):
        out[a] = np.linalg.det(mat[:, list(t)])
    return out


def gram_pairing(avecs, bvecs):
    """det of the k x k matrix of inner products <a_r, b_s>.

    Equals the Lambda^k inner product of a_1^...^a_k with b_1^...^b_k in
    the lexicographic wedge coordinates (inner products conjugate-linear
    in the second argument).
    """
    if len(avecs) != len(bvecs):
        raise ShapeError("gram_pairing needs equally many vectors on both sides")
    a = np.stack([np.asarray(v) for v in avecs])
    b = np.stack([np.asarray(v) for v in bvecs])
    if a.shape[1] != b.shape[1]:
        raise ShapeError("ambient dimensions differ")
    gram = a @ np.conj(b).T
    return np.linalg.det(gram)


class Subspace:
    """A subspace given by an orthonormal basis matrix (d x k)."""

    __slots__ = ("field", "basis")

    def __init__(self, field, basis, orthonormalize=True):
        arr = np.asarray(basis, dtype=float if field == "R" else complex)
        if arr.ndim != 2:
            raise ShapeError("basis must be a (d, k) matrix")
        d, k = arr.shape
        if not 1 <= k <= d - 1 and not k == d:
            raise ShapeError(f"subspace dimension {k} out of range in ambient {d}")
        if orthonormalize:
            q, r = np.linalg.qr(arr)
            rank = int(np.sum(np.abs(np.diag(r)) > 1e-10 * max(1.0, np.abs(r).max())))
            if rank < k:
                raise DegenerateInput("rank-deficient basis for subspace")
            arr = q[:, :k]
        self.field = field
        self.basis = arr
        self.basis.setflags(write=False)

    @property
    def ambient(self):
        return self.basis.shape[0]

    @property
    def dim(self):
        return self.basis.shape[1]

    def __repr__(self):
        return f"Subspace({self.field}, {self.dim} in K^{self.ambient})"

    def orthogonal_complement(self):
        d, k = self.ambient, self.dim
        # columns of a unitary completing the basis span the complement
        full, _ = np.linalg.qr(np.column_stack(
            [self.basis, np.eye(d, dtype=self.basis.dtype)]))
        return Subspace(self.field, full[:, k:d], orthonormalize=False)

    def contains_point(self, p, tol=1e-10):
        v = p.v if isinstance(p, ProjPoint) else np.asarray(p)
        proj = self.basis @ (np.conj(self.basis).T @ v)
        return np.linalg.norm(v - proj) <= tol * np.linalg.norm(v)

    def contains_subspace(self, other, tol=1e-10):
        proj = self.basis @ (np.conj(self.basis).T @ other.basis)
        return np.linalg.norm(other.basis - proj) <= tol

    def to_json_dict(self):
        m = Matrix(self.field, self.basis)
        d = m.to_json_dict()
        d.update({"kind": "subspace", "ambient": self.ambient, "dim": self.dim})
        return d

    @classmethod
    def from_json_dict(cls, d):
        m = Matrix.from_json_dict(d)
        return cls(m.field, m.array, orthonormalize=False)


def plucker_point(w):
    """Pluecker image [v_1 ^ v_2] of a 2-dimensional subspace."""
    if w.dim != 2:
        raise ShapeError("plucker_point expects a 2-dimensional subspace")
    coords = wedge_vector([w.basis[:, 0], w.basis[:, 1]])
    if np.linalg.norm(coords) < 1e-12:
        raise DegenerateInput("rank-deficient basis")
    return ProjPoint(w.field, coords)


def plucker_hyperplane(wperp):
    """Dual Pluecker image: the hyperplane (span{v1 ^ v2})^perp in Lambda^2,
    where span{v1, v2} is the orthogonal complement of the input."""
    if wperp.dim != wperp.ambient - 2:
        raise ShapeError("plucker_hyperplane expects a codimension-2 subspace")
    w = wperp.orthogonal_complement()
    coords = wedge_vector([w.basis[:, 0], w.basis[:, 1]])
    return Hyperplane(w.field, coords)


def iota2_plus(p):
    """Realified line embedding: [u + iv] -> span{(u, v), (-v, u)} in R^{2d}.

    Equivariant for realify_complex: iota(A p) = realify_complex(A) iota(p);
    independent of the complex scalar on the representative.
    """
    if isinstance(p, ProjPoint):
        if p.field not in ("C", "R"):
            raise FieldError("iota2_plus expects a complex projective point")
        z = p.v.astype(complex)
    else:
        z = np.asarray(p, dtype=complex).reshape(-1)
        if np.linalg.norm(z) < 1e-14:
            raise DegenerateInput("zero vector")
    u, v = z.real, z.imag
    b1 = np.concatenate([u, v])
    b2 = np.concatenate([-v, u])
    return Subspace("R", np.column_stack([b1, b2]))


def iota2_minus(h):
    """Realified hyperplane embedding: iota2_minus(W^perp) = (iota2_plus(W))^perp."""
    if isinstance(h, Hyperplane):
        if h.field not in ("C", "R"):
            raise FieldError("iota2_minus expects a complex hyperplane")
        w = h.normal.astype(complex)
    else:
        w = np.asarray(h, dtype=complex).reshape(-1)
        if np.linalg.norm(w) < 1e-14:
            raise DegenerateInput("zero normal")
    return iota2_plus(w).orthogonal_complement()


def sym_power_sl2(m, k):
    """Action of an SL_2 matrix on degree-k binary forms, monomial basis.

    Basis e_1^{k-j} e_2^j, j = 0..k; multiplicative, and diagonal matrices
    map to diag(lambda^k, lambda^{k-2}, ..., lambda^{-k}).
    """
    if isinstance(m, Matrix):
        if m.field == "H":
            raise FieldError("sym_power_sl2 is defined over R or C")
        field, arr = m.field, m.array
    else:
        arr = np.asarray(m)
        field = "C" if np.iscomplexobj(arr) else "R"
    if arr.shape != (2, 2):
        raise ShapeError("sym_power_sl2 expects a 2x2 matrix")
    if abs(np.linalg.det(arr) - 1.0) > 1e-10:
        raise DomainError("sym_power_sl2 requires det = 1")
    a, b = arr[0, 0], arr[0, 1]
    c, d = arr[1, 0], arr[1, 1]
    n = k + 1
    out = np.zeros((n, n), dtype=arr.dtype)
    # column j: image of e1^{k-j} e2^j = (a e1 + c e2)^{k-j} (b e1 + d e2)^j
    for j in range(n):
        col = np.zeros(n, dtype=arr.dtype)
        for r in range(k - j + 1):
            for s in range(j + 1):
                coeff = (math.comb(k - j, r) * math.comb(j, s)
                         * a ** (k - j - r) * c ** r * b ** (j - s) * d ** s)
                col[r + s] += coeff
        out[:, j] = col
    return Matrix(field, out)
