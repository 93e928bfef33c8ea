"""Scalar arithmetic over R, C and the quaternions, with dense tagged matrices.

Quaternion matrices are stored componentwise as float arrays of shape
(rows, cols, 4) with component order (a, b, c, d) for a + bi + cj + dk.
The left-multiplication real model (realify_quat) is derived from this
representation, never the other way around.
"""

import json
import math

import numpy as np

from .errors import ConfigError, DomainError, FieldError, ShapeError

TOL_EXACT = 1e-12
TOL_ALGEBRA = 1e-10

#: Hamilton structure tensor: e_a * e_b = sum_c QUAT_TABLE[a, b, c] e_c
QUAT_TABLE = np.zeros((4, 4, 4))
for _i in range(4):
    QUAT_TABLE[0, _i, _i] = 1.0
    QUAT_TABLE[_i, 0, _i] = 1.0
for _a, _b, _c, _s in [
    (1, 1, 0, -1), (2, 2, 0, -1), (3, 3, 0, -1),
    (1, 2, 3, 1), (2, 1, 3, -1),
    (2, 3, 1, 1), (3, 2, 1, -1),
    (3, 1, 2, 1), (1, 3, 2, -1),
]:
    QUAT_TABLE[_a, _b, _c] = _s

#: LEFT_MODEL[c] is the 4x4 matrix of left multiplication by the basis
#: quaternion e_c on H = R^4 in the basis (1, i, j, k).
LEFT_MODEL = np.einsum("cbr->crb", QUAT_TABLE)


class Scalar:
    """A single scalar over R, C or H, stored as 1, 2 or 4 real components."""

    __slots__ = ("field", "components")

    def __init__(self, field, components):
        if field not in ("R", "C", "H"):
            raise FieldError(f"unknown field tag {field!r}")
        comps = np.asarray(components, dtype=float).reshape(-1)
        expected = {"R": 1, "C": 2, "H": 4}[field]
        if comps.size != expected:
            raise FieldError(f"field {field} expects {expected} components, got {comps.size}")
        self.field = field
        self.components = comps

    def __repr__(self):
        return f"Scalar({self.field}, {self.components.tolist()})"

    def abs(self):
        return float(np.linalg.norm(self.components))


def quat_mul(q1, q2):
    """Hamilton product of two H-tagged scalars."""
    if not (isinstance(q1, Scalar) and isinstance(q2, Scalar)):
        raise FieldError("quat_mul expects Scalar operands")
    if q1.field != "H" or q2.field != "H":
        raise FieldError("quat_mul requires both operands tagged H")
    out = np.einsum("a,b,abc->c", q1.components, q2.components, QUAT_TABLE)
    return Scalar("H", out)


def quat_conj(q):
    """Quaternion conjugate a - bi - cj - dk."""
    if q.field != "H":
        raise FieldError("quat_conj requires an H scalar")
    c = q.components.copy()
    c[1:] = -c[1:]
    return Scalar("H", c)


def _qmatmul(a, b):
    """Product of quaternion component arrays (m,k,4) x (k,n,4) -> (m,n,4)."""
    return np.einsum("ika,kjb,abc->ijc", a, b, QUAT_TABLE)


def _as_components(field, array):
    """Normalize raw input to the internal storage of the given field."""
    if field == "H":
        arr = np.asarray(array, dtype=float)
        if arr.ndim != 3 or arr.shape[2] != 4:
            raise ShapeError("H matrices need a (rows, cols, 4) component array")
        return arr
    dtype = float if field == "R" else complex
    arr = np.asarray(array, dtype=dtype)
    if arr.ndim != 2:
        raise ShapeError("R/C matrices need a 2-d array")
    return arr


class Matrix:
    """Dense matrix over a tagged scalar field.

    R and C matrices wrap a numpy array directly; H matrices hold the
    (rows, cols, 4) component array.  All operations are pure; instances
    are treated as immutable values.
    """

    __slots__ = ("field", "array")

    def __init__(self, field, array):
        if field not in ("R", "C", "H"):
            raise FieldError(f"unknown field tag {field!r}")
        self.field = field
        self.array = _as_components(field, array)
        self.array.setflags(write=False)

    # -- constructors -------------------------------------------------
    @classmethod
    def identity(cls, field, n):
        if field == "H":
            arr = np.zeros((n, n, 4))
            arr[range(n), range(n), 0] = 1.0
            return cls("H", arr)
        return cls(field, np.eye(n, dtype=float if field == "R" else complex))

    @classmethod
    def diag(cls, field, entries):
        """Diagonal matrix; entries are numbers (R/C) or 4-component rows (H)."""
        n = len(entries)
        if field == "H":
            arr = np.zeros((n, n, 4))
            for i, e in enumerate(entries):
                arr[i, i] = np.asarray(e, dtype=float).reshape(4)
            return cls("H", arr)
        return cls(field, np.diag(np.asarray(entries, dtype=float if field == "R" else complex)))

    @classmethod
    def from_blocks(cls, field, blocks):
        """Block-diagonal matrix from a list of Matrix instances."""
        sizes = [b.rows for b in blocks]
        n = sum(sizes)
        if field == "H":
            arr = np.zeros((n, n, 4))
        else:
            arr = np.zeros((n, n), dtype=float if field == "R" else complex)
        at = 0
        for b in blocks:
            if b.field != field:
                raise FieldError("block field mismatch")
            arr[at:at + b.rows, at:at + b.rows] = b.array
            at += b.rows
        return cls(field, arr)

    # -- basic structure ----------------------------------------------
    @property
    def rows(self):
        return self.array.shape[0]

    @property
    def cols(self):
        return self.array.shape[1]

    @property
    def is_square(self):
        return self.rows == self.cols

    def __repr__(self):
        return f"Matrix({self.field}, {self.rows}x{self.cols})"

    def entry(self, i, j):
        if self.field == "H":
            return Scalar("H", self.array[i, j])
        v = self.array[i, j]
        if self.field == "R":
            return Scalar("R", [v])
        return Scalar("C", [v.real, v.imag])

    # -- algebra -------------------------------------------------------
    def __matmul__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        if self.field != other.field:
            raise FieldError(f"field mismatch: {self.field} vs {other.field}")
        if self.cols != other.rows:
            raise ShapeError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        if self.field == "H":
            return Matrix("H", _qmatmul(self.array, other.array))
        return Matrix(self.field, self.array @ other.array)

    def __add__(self, other):
        if self.field != other.field:
            raise FieldError("field mismatch")
        return Matrix(self.field, self.array + other.array)

    def __sub__(self, other):
        if self.field != other.field:
            raise FieldError("field mismatch")
        return Matrix(self.field, self.array - other.array)

    def scale(self, s):
        """Multiply every entry by a real number."""
        return Matrix(self.field, self.array * float(s))

    def power(self, k):
        if not self.is_square:
            raise ShapeError("power of a non-square matrix")
        if k < 0:
            return self.inv().power(-k)
        out = Matrix.identity(self.field, self.rows)
        for _ in range(k):
            out = out @ self
        return out

    def conj(self):
        """Entrywise conjugation (trivial over R)."""
        if self.field == "H":
            arr = self.array.copy()
            arr[:, :, 1:] = -arr[:, :, 1:]
            return Matrix("H", arr)
        return Matrix(self.field, np.conj(self.array))

    def transpose(self):
        if self.field == "H":
            return Matrix("H", np.transpose(self.array, (1, 0, 2)))
        return Matrix(self.field, self.array.T)

    def inv(self):
        if not self.is_square:
            raise ShapeError("inverse of a non-square matrix")
        if self.field == "H":
            real = realify_quat(self)
            try:
                rinv = np.linalg.inv(real.array)
            except np.linalg.LinAlgError as exc:
                raise DomainError("singular quaternion matrix") from exc
            n = self.rows
            arr = np.empty((n, n, 4))
            # first column of each 4x4 block is the entry's component vector
            for i in range(n):
                for k in range(n):
                    arr[i, k] = rinv[4 * i:4 * i + 4, 4 * k]
            return Matrix("H", arr)
        try:
            return Matrix(self.field, np.linalg.inv(self.array))
        except np.linalg.LinAlgError as exc:
            raise DomainError("singular matrix") from exc

    def det(self):
        if self.field == "H":
            raise FieldError("determinant over H is not defined in this library")
        return np.linalg.det(self.array)

    def norm_inf(self):
        """Largest absolute entry (entry modulus over C / H)."""
        if self.field == "H":
            return float(np.max(np.linalg.norm(self.array, axis=2))) if self.array.size else 0.0
        return float(np.max(np.abs(self.array))) if self.array.size else 0.0

    def close_to(self, other, tol=TOL_ALGEBRA):
        return (self - other).norm_inf() <= tol

    # -- serialization --------------------------------------------------
    def to_json_dict(self):
        if self.field == "H":
            data = [self.array[i, j].tolist() for i in range(self.rows) for j in range(self.cols)]
        elif self.field == "C":
            data = [[self.array[i, j].real, self.array[i, j].imag]
                    for i in range(self.rows) for j in range(self.cols)]
        else:
            data = [[float(self.array[i, j])] for i in range(self.rows) for j in range(self.cols)]
        return {"field": self.field, "rows": self.rows, "cols": self.cols, "data": data}

    @classmethod
    def from_json_dict(cls, d):
        field, rows, cols = d["field"], d["rows"], d["cols"]
        data = d["data"]
        if len(data) != rows * cols:
            raise ShapeError("data length does not match rows*cols")
        if field == "H":
            arr = np.asarray(data, dtype=float).reshape(rows, cols, 4)
        elif field == "C":
            flat = np.asarray(data, dtype=float)
            arr = (flat[:, 0] + 1j * flat[:, 1]).reshape(rows, cols)
        else:
            arr = np.asarray(data, dtype=float)[:, 0].reshape(rows, cols)
        return cls(field, arr)

    def dumps(self):
        return json.dumps(self.to_json_dict(), sort_keys=True)

    @classmethod
    def loads(cls, s):
        return cls.from_json_dict(json.loads(s))


def conj_transpose(m):
    """Conjugate transpose g* = (conj g_ji); satisfies (AB)* = B*A*."""
    return m.conj().transpose()


def realify_complex(m):
    """Real 2n x 2n model [[X, -Y], [Y, X]] of a complex n x n matrix.

    Unital ring homomorphism: realify(AB) = realify(A) @ realify(B).
    """
    if m.field == "R":
        m = Matrix("C", m.array.astype(complex))
    if m.field != "C":
        raise FieldError("realify_complex expects a complex (or real) matrix")
    if not m.is_square:
        raise ShapeError("realify_complex expects a square matrix")
    x, y = m.array.real, m.array.imag
    return Matrix("R", np.block([[x, -y], [y, x]]))


def realify_quat(m):
    """Real 4n x 4n model of an H matrix via left multiplication on H^n = R^{4n}.

    Coordinates are grouped per quaternion entry in the basis (1, i, j, k).
    """
    if m.field != "H":
        raise FieldError("realify_quat expects an H matrix")
    if not m.is_square:
        raise ShapeError("realify_quat expects a square matrix")
    n = m.rows
    blocks = np.einsum("ikc,crs->irks", m.array, LEFT_MODEL)
    return Matrix("R", blocks.reshape(4 * n, 4 * n))


def embed_complex_in_quat(m):
    """View a complex matrix as a quaternion matrix (j, k components zero)."""
    if m.field == "R":
        m = Matrix("C", m.array.astype(complex))
    if m.field != "C":
        raise FieldError("expected a complex matrix")
    arr = np.zeros((m.rows, m.cols, 4))
    arr[:, :, 0] = m.array.real
    arr[:, :, 1] = m.array.imag
    return Matrix("H", arr)


def embed_real_in_quat(m):
    if m.field != "R":
        raise FieldError("expected a real matrix")
    arr = np.zeros((m.rows, m.cols, 4))
    arr[:, :, 0] = m.array
    return Matrix("H", arr)


class HermitianForm:
    """The standard form J_{n,1} = diag(I_n, -1) of signature (n, 1)."""

    def __init__(self, n, field="R"):
        if n < 1:
            raise ShapeError("signature (n,1) needs n >= 1")
        self.n = n
        self.field = field
        entries = [1.0] * n + [-1.0]
        if field == "H":
            self.matrix = Matrix.diag("H", [[e, 0, 0, 0] for e in entries])
        else:
            self.matrix = Matrix.diag(field, entries)

    @property
    def dim(self):
        return self.n + 1


def form_member(g, form, tol=1e-9):
    """True iff g preserves the form: ||g* J g - J||_inf <= tol."""
    if not g.is_square or g.rows != form.dim:
        raise ShapeError(f"expected a {form.dim}x{form.dim} matrix")
    if g.field != form.field:
        if form.field == "H":
            g = embed_complex_in_quat(g) if g.field == "C" else embed_real_in_quat(g)
        elif form.field == "C" and g.field == "R":
            g = Matrix("C", g.array.astype(complex))
        else:
            raise FieldError(f"matrix field {g.field} incompatible with form field {form.field}")
    j = form.matrix
    return (conj_transpose(g) @ j @ g - j).norm_inf() <= tol


def _unit_scalar_diag(field, n, k, unit):
    """diag(I_k, unit * I_{n+1-k}) over the given field, unit in {-1, i, j, k}."""
    size = n + 1
    if field == "H":
        comp = {"-1": [-1, 0, 0, 0], "i": [0, 1, 0, 0], "j": [0, 0, 1, 0], "k": [0, 0, 0, 1]}[unit]
        entries = [[1, 0, 0, 0]] * k + [comp] * (size - k)
        return Matrix.diag("H", entries)
    if unit == "-1":
        return Matrix.diag(field, [1.0] * k + [-1.0] * (size - k))
    if unit == "i" and field == "C":
        return Matrix.diag("C", [1.0] * k + [1j] * (size - k))
    raise FieldError(f"unit {unit} not available over {field}")


def compatible_automorphism(case, n, k, g, tol=1e-7):
    """Apply one of the catalog automorphisms of the isometry group of J_{n,1}.

    Cases, with b_k = diag(I_k, i I_{n+1-k}), a_k = diag(I_k, j I_{n+1-k}),
    w_k = diag(I_k, -I_{n+1-k}), c_k = b_k a_k = diag(I_k, k I_{n+1-k}):

      1. g -> w_k g w_k^{-1}          (order 2, any field)
      2. g -> conj(g)                 (order 2, R or C)
      3. g -> (i I) g (i I)^{-1}      (order 2, H)
      4. g -> b_k g b_k^{-1}          (order 4, C or H)
      5. g -> a_k g a_k^{-1}          (order 4, H)
      6. g -> (j I) g (j I)^{-1}      (order 2, H)
      7. g -> c_k g c_k^{-1}          (order 4, H)

    Case 7 composes the two order-4 conjugations used for the
    Sp(k) x O(n-k,1) pair, so a single matrix represents that case.
    """
    if case not in range(1, 8):
        raise ConfigError(f"unknown catalog case {case}")
    needs_k = case in (1, 4, 5, 7)
    if needs_k and not (1 <= k <= n - 1):
        raise ConfigError(f"case {case} needs 1 <= k <= n-1, got k={k}")
    form = HermitianForm(n, field=g.field)
    if not form_member(g, form, tol=tol):
        raise DomainError("g does not preserve the form J_{n,1}")
    field = g.field

    if case == 1:
        w = _unit_scalar_diag(field, n, k, "-1")
        return w @ g @ w.inv()
    if case == 2:
        if field == "H":
            raise FieldError("entrywise conjugation is not an automorphism over H")
        return g.conj()
    if case in (3, 6):
        if field != "H":
            raise FieldError(f"case {case} requires an H matrix")
        unit = "i" if case == 3 else "j"
        u = _unit_scalar_diag("H", n, 0, unit)
        return u @ g @ u.inv()
    if case == 4:
        if field == "C":
            b = _unit_scalar_diag("C", n, k, "i")
        elif field == "H":
            b = _unit_scalar_diag("H", n, k, "i")
        else:
            raise FieldError("case 4 requires a C or H matrix")
        return b @ g @ b.inv()
    if case == 5:
        if field != "H":
            raise FieldError("case 5 requires an H matrix")
        a = _unit_scalar_diag("H", n, k, "j")
        return a @ g @ a.inv()
    # case 7
    if field != "H":
        raise FieldError("case 7 requires an H matrix")
    c = _unit_scalar_diag("H", n, k, "k")
    return c @ g @ c.inv()
