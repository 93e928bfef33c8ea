import numpy as np
import pytest

from pingpong.errors import DomainError, FieldError, ShapeError
from pingpong.scalars import (
    HermitianForm, Matrix, Scalar, compatible_automorphism, conj_transpose,
    embed_complex_in_quat, form_member, quat_conj, quat_mul, realify_complex,
    realify_quat,
)

from conftest import quat_real_model, random_quat_matrix, random_sp_n1


def q(a, b, c, d):
    return Scalar("H", [a, b, c, d])


def test_quat_defining_relations():
    i, j, k = q(0, 1, 0, 0), q(0, 0, 1, 0), q(0, 0, 0, 1)
    assert np.allclose(quat_mul(i, j).components, k.components)
    assert np.allclose(quat_mul(j, k).components, i.components)
    assert np.allclose(quat_mul(k, i).components, j.components)
    for u in (i, j, k):
        assert np.allclose(quat_mul(u, u).components, [-1, 0, 0, 0])


def test_quat_bilinearity_example():
    left = quat_mul(q(1, 1, 0, 0), q(1, 0, 1, 0))  # (1+i)(1+j)
    assert np.allclose(left.components, [1, 1, 1, 1])


def test_quat_norm_multiplicative_and_conj(rng):
    for _ in range(200):
        q1 = Scalar("H", rng.uniform(-2, 2, 4))
        q2 = Scalar("H", rng.uniform(-2, 2, 4))
        prod = quat_mul(q1, q2)
        assert abs(prod.abs() - q1.abs() * q2.abs()) < 1e-12
        sq = quat_mul(q1, quat_conj(q1))
        assert np.allclose(sq.components, [q1.abs() ** 2, 0, 0, 0], atol=1e-12)


def test_quat_mul_field_check():
    with pytest.raises(FieldError):
        quat_mul(Scalar("R", [1.0]), q(1, 0, 0, 0))


def test_conj_transpose_examples():
    m = Matrix("H", np.array([[[0.0, 1.0, 0.0, 0.0]]]))  # [[i]]
    assert np.allclose(conj_transpose(m).array[0, 0], [0, -1, 0, 0])
    r = Matrix("R", [[0.0, 1.0], [0.0, 0.0]])
    assert np.allclose(conj_transpose(r).array, [[0, 0], [1, 0]])


def test_conj_transpose_antihomomorphism(rng):
    for _ in range(50):
        a = random_quat_matrix(rng, 3)
        b = random_quat_matrix(rng, 3)
        lhs = quat_real_model(conj_transpose(a @ b))
        rhs = quat_real_model(conj_transpose(b) @ conj_transpose(a))
        assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_realify_complex_examples():
    m = Matrix("C", [[1j]])
    assert np.allclose(realify_complex(m).array, [[0, -1], [1, 0]])
    eye = Matrix.identity("C", 3)
    assert np.allclose(realify_complex(eye).array, np.eye(6))
    with pytest.raises(ShapeError):
        realify_complex(Matrix("C", np.ones((2, 3), dtype=complex)))


def test_realify_complex_multiplicative(rng):
    for _ in range(300):
        a = Matrix("C", rng.uniform(-1, 1, (3, 3)) + 1j * rng.uniform(-1, 1, (3, 3)))
        b = Matrix("C", rng.uniform(-1, 1, (3, 3)) + 1j * rng.uniform(-1, 1, (3, 3)))
        # oracle: the complex product, realified afterwards
        lhs = realify_complex(a @ b).array
        rhs = (realify_complex(a) @ realify_complex(b)).array
        assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_realify_quat_basis_action():
    j = Matrix("H", np.array([[[0.0, 0.0, 1.0, 0.0]]]))
    expected = np.array([
        [0, 0, -1, 0],
        [0, 0, 0, 1],
        [1, 0, 0, 0],
        [0, -1, 0, 0],
    ])
    assert np.allclose(realify_quat(j).array, expected)
    assert np.allclose(realify_quat(Matrix.identity("H", 2)).array, np.eye(8))


def test_realify_quat_matches_entrywise_model_and_multiplicative(rng):
    for _ in range(100):
        a = random_quat_matrix(rng, 2)
        b = random_quat_matrix(rng, 2)
        assert np.max(np.abs(realify_quat(a).array - quat_real_model(a))) == 0.0
        lhs = realify_quat(a @ b).array
        rhs = (realify_quat(a) @ realify_quat(b)).array
        assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_quat_complex_model_consistency(rng):
    # realify_quat o (embed C -> H) has the same characteristic polynomial
    # as realify_complex applied twice
    m = Matrix("C", rng.uniform(-1, 1, (3, 3)) + 1j * rng.uniform(-1, 1, (3, 3)))
    big1 = realify_quat(embed_complex_in_quat(m)).array
    once = realify_complex(m)
    big2 = realify_complex(Matrix("C", once.array.astype(complex))).array
    p1 = np.poly(big1)
    p2 = np.poly(big2)
    assert np.max(np.abs(p1 - p2)) < 1e-8 * max(1.0, np.max(np.abs(p1)))


def test_quat_inverse(rng):
    a = random_quat_matrix(rng, 3)
    prod = a @ a.inv()
    assert prod.close_to(Matrix.identity("H", 3), 1e-10)


def test_form_member_examples():
    form = HermitianForm(2, field="R")
    assert form_member(Matrix.identity("R", 3), form)
    assert not form_member(Matrix.diag("R", [1, 1, 2]), form)
    t = 0.7
    boost = Matrix("R", [[np.cosh(t), 0, np.sinh(t)],
                         [0, 1, 0],
                         [np.sinh(t), 0, np.cosh(t)]])
    assert form_member(boost, form)  # cosh^2 - sinh^2 = 1
    with pytest.raises(ShapeError):
        form_member(Matrix.identity("R", 4), form)


def test_random_sp_n1_preserves_form(rng):
    form = HermitianForm(2, field="H")
    for _ in range(10):
        g = random_sp_n1(rng, 2)
        assert form_member(g, form, tol=1e-9)


def test_automorphism_case1_fixed_point():
    # diagonal g commutes with w_k, so case 1 fixes it
    g = Matrix.diag("R", [1.0, 1.0, 1.0])
    out = compatible_automorphism(1, 2, 1, g)
    assert out.close_to(g, 1e-12)


def test_automorphism_case2_fixes_reals():
    t = 0.3
    boost = Matrix("C", np.array([[np.cosh(t), 0, np.sinh(t)],
                                  [0, 1, 0],
                                  [np.sinh(t), 0, np.cosh(t)]], dtype=complex))
    out = compatible_automorphism(2, 2, 1, boost)
    assert out.close_to(boost, 1e-12)


def test_automorphism_case4_order_four(rng):
    g = random_sp_n1(rng, 2)
    cur = g
    seen_nontrivial = False
    for _ in range(4):
        cur = compatible_automorphism(4, 2, 1, cur)
    assert cur.close_to(g, 1e-8)
    twice = compatible_automorphism(4, 2, 1, compatible_automorphism(4, 2, 1, g))
    assert not twice.close_to(g, 1e-6) or g.close_to(Matrix.identity("H", 3), 1e-6)


def test_automorphism_orders_and_homomorphism(rng):
    form = HermitianForm(2, field="H")
    cases_orders = {1: 2, 3: 2, 5: 4, 6: 2, 7: 4}
    for case, order in cases_orders.items():
        g = random_sp_n1(rng, 2)
        h = random_sp_n1(rng, 2)
        lhs = compatible_automorphism(case, 2, 1, g @ h)
        rhs = compatible_automorphism(case, 2, 1, g) @ compatible_automorphism(case, 2, 1, h)
        assert lhs.close_to(rhs, 1e-8)
        cur = g
        for _ in range(order):
            cur = compatible_automorphism(case, 2, 1, cur)
        assert cur.close_to(g, 1e-8)
        # conjugation stability of the form
        assert form_member(compatible_automorphism(case, 2, 1, g), form, tol=1e-8)


def test_automorphism_rejects_bad_input(rng):
    from pingpong.errors import ConfigError
    with pytest.raises(ConfigError):
        compatible_automorphism(9, 2, 1, Matrix.identity("R", 3))
    with pytest.raises(ConfigError):
        compatible_automorphism(1, 2, 2, Matrix.identity("R", 3))
    with pytest.raises(DomainError):
        compatible_automorphism(1, 2, 1, Matrix.diag("R", [2.0, 1.0, 1.0]))


def test_matrix_json_roundtrip(rng):
    for mk in (lambda: Matrix("R", rng.uniform(-1, 1, (2, 3))),
               lambda: Matrix("C", rng.uniform(-1, 1, (2, 2)) + 1j * rng.uniform(-1, 1, (2, 2))),
               lambda: random_quat_matrix(rng, 2)):
        m = mk()
        again = Matrix.loads(m.dumps())
        assert again.field == m.field
        assert (again - m).norm_inf() == 0.0
