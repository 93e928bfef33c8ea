import math

import numpy as np
import pytest

from pingpong.errors import DegenerateInput, ShapeError
from pingpong.flags import (
    BallCover, Flag, Hyperplane, ProjPoint, antipodal_distance,
    antipodality_scan, chordal_dist, cover_contains_cover, cover_contains_point,
    cover_image, cover_inner_image, cover_margin, cover_union, flag_dist,
    flag_from_vectors, point_hyperplane_dist, sample_in_ball,
)


def std_flag(d, i, j, field="R"):
    """Flag with point e_i and hyperplane normal e_j (i != j)."""
    e = np.eye(d) if field == "R" else np.eye(d, dtype=complex)
    return Flag(ProjPoint(field, e[i]), Hyperplane(field, e[j]))


def test_chordal_examples():
    e = np.eye(3)
    p1 = ProjPoint("R", e[0])
    assert chordal_dist(p1, ProjPoint("R", e[0])) == 0.0
    assert abs(chordal_dist(p1, ProjPoint("R", e[1])) - 1.0) < 1e-15
    diag = ProjPoint("R", (e[0] + e[1]) / math.sqrt(2))
    assert abs(chordal_dist(p1, diag) - 1 / math.sqrt(2)) < 1e-12
    assert chordal_dist(p1, ProjPoint("R", -e[0])) == 0.0  # class, not vector


def test_point_hyperplane_examples():
    e = np.eye(3)
    p = ProjPoint("R", e[0])
    assert point_hyperplane_dist(p, Hyperplane("R", e[0])) == 1.0
    assert point_hyperplane_dist(p, Hyperplane("R", e[1])) == 0.0


def test_point_hyperplane_matches_sampled_min(rng):
    # |<v, w>| equals the min chordal distance to points of the hyperplane
    for _ in range(10):
        v = rng.standard_normal(3)
        w = rng.standard_normal(3)
        p = ProjPoint("R", v)
        h = Hyperplane("R", w)
        d = point_hyperplane_dist(p, h)
        # dense sampling oracle on the projectivized hyperplane
        basis = np.linalg.qr(np.column_stack([w, np.eye(3)]))[0][:, 1:3]
        best = 1.0
        for t in np.linspace(0, math.pi, 2000):
            q = ProjPoint("R", basis @ [math.cos(t), math.sin(t)])
            best = min(best, chordal_dist(p, q))
        assert abs(best - d) < 1e-3


def test_antipodal_examples():
    x = std_flag(3, 0, 2)
    y = std_flag(3, 2, 0)
    assert abs(antipodal_distance(x, y) - 1.0) < 1e-15
    assert antipodal_distance(x, x) == 0.0
    z = std_flag(3, 1, 1, field="R") if False else Flag(
        ProjPoint("R", np.eye(3)[1]), Hyperplane("R", np.eye(3)[1]), tol=np.inf)
    # incident configuration: point of x orthogonal to normal of z
    w = Flag(ProjPoint("R", np.eye(3)[1]), Hyperplane("R", np.eye(3)[2]))
    assert antipodal_distance(x, w) == 0.0


def test_flag_incidence_enforced():
    e = np.eye(3)
    with pytest.raises(DegenerateInput):
        Flag(ProjPoint("R", e[0]), Hyperplane("R", e[0]))


def test_cover_margin_examples():
    a = BallCover.from_flags([std_flag(3, 0, 2)], 0.0, label="A")
    b = BallCover.from_flags([std_flag(3, 2, 0)], 0.0, label="B")
    assert abs(cover_margin(a, b) - 1.0) < 1e-15
    assert cover_margin(a, a) <= 0.0


def test_cover_margin_soundness_sampling(rng):
    # positive margin implies every sampled pair is antipodal
    a = BallCover.from_flags([std_flag(4, 0, 3)], 0.12, label="A")
    b = BallCover.from_flags([std_flag(4, 3, 0)], 0.12, label="B")
    margin = cover_margin(a, b)
    assert margin > 0
    sa = sample_in_ball(rng, a, 0, 100)
    sb = sample_in_ball(rng, b, 0, 100)
    for fa in sa:
        for fb in sb:
            assert antipodal_distance(fa, fb) >= margin - 1e-9


def test_cover_union_size():
    a = BallCover.from_flags([std_flag(3, 0, 2)], 0.1)
    b = BallCover.from_flags([std_flag(3, 2, 0), std_flag(3, 1, 2)], 0.2)
    assert len(cover_union(a, b)) == 3


def test_cover_image_identity():
    a = BallCover.from_flags([std_flag(3, 0, 2), std_flag(3, 1, 0)], 0.05)
    img = cover_image(np.eye(3), a)
    assert np.allclose(img.radii, a.radii)
    assert cover_contains_cover(img, a.inflate(1e-12)) >= -1e-9


def test_cover_image_contraction_at_attracting_flag():
    g = np.diag([2.0, 1.0, 0.5])
    a = BallCover.from_flags([std_flag(3, 0, 2)], 0.05)
    img = cover_image(g, a)
    assert img.radii[0] < a.radii[0]  # contracted near the attracting flag
    # derivative-bound oracle: sampled points map inside the claimed ball
    rng = np.random.default_rng(7)
    for f in sample_in_ball(rng, a, 0, 200):
        gp = g @ f.point.v
        gn = np.linalg.solve(g.T, f.hyperplane.normal)
        gf = flag_from_vectors("R", gp, gn)
        assert flag_dist(gf, img.flag(0)) <= img.radii[0] + 1e-9


def test_cover_image_soundness_random(rng):
    # image balls always contain the images of sampled ball points
    for _ in range(10):
        g = rng.standard_normal((3, 3))
        if abs(np.linalg.det(g)) < 0.3:
            continue
        pt = rng.standard_normal(3)
        nr = rng.standard_normal(3)
        f = flag_from_vectors("R", pt, nr - pt * (nr @ pt) / (pt @ pt), fix_incidence=True)
        a = BallCover.from_flags([f], 0.08)
        img = cover_image(g, a)
        for s in sample_in_ball(rng, a, 0, 50):
            gf = flag_from_vectors("R", g @ s.point.v,
                                   np.linalg.solve(g.T, s.hyperplane.normal))
            assert flag_dist(gf, img.flag(0)) <= img.radii[0] + 1e-8


def test_cover_image_roundtrip_contains_centers(rng):
    g = np.diag([3.0, 1.0, 1 / 3.0]) @ np.linalg.qr(rng.standard_normal((3, 3)))[0]
    a = BallCover.from_flags([std_flag(3, 0, 2), std_flag(3, 1, 2)], 0.02)
    back = cover_image(np.linalg.inv(g), cover_image(g, a))
    for i in range(len(a)):
        assert cover_contains_point(back, a.flag(i)) >= 0


def test_cover_inner_image_is_inside_true_image(rng):
    g = np.diag([2.0, 1.0, 0.5])
    a = BallCover.from_flags([std_flag(3, 0, 2)], 0.1)
    inner = cover_inner_image(g, a)
    # any sampled point of the inner ball must be the g-image of a ball point
    ginv = np.linalg.inv(g)
    for s in sample_in_ball(rng, inner, 0, 100):
        pre = flag_from_vectors("R", ginv @ s.point.v,
                                np.linalg.solve(ginv.T, s.hyperplane.normal))
        assert flag_dist(pre, a.flag(0)) <= a.radii[0] + 1e-9


def test_cover_serialization_roundtrip():
    a = BallCover.from_flags([std_flag(3, 0, 2), std_flag(3, 1, 0)], [0.1, 0.2], label="X")
    data = a.to_json_list()
    b = BallCover.from_json_list(data, "R", label="X")
    assert np.allclose(a.points, b.points) and np.allclose(a.radii, b.radii)
    csv_text = a.to_csv()
    assert csv_text.splitlines()[0].startswith("p0")
    assert len(csv_text.splitlines()) == 3


def test_complex_field_support():
    e = np.eye(2, dtype=complex)
    x = Flag(ProjPoint("C", e[0]), Hyperplane("C", e[1]))
    y = Flag(ProjPoint("C", e[1]), Hyperplane("C", e[0]))
    assert abs(antipodal_distance(x, y) - 1.0) < 1e-15
    p = ProjPoint("C", np.array([1.0, 1j]) / math.sqrt(2))
    assert abs(chordal_dist(p, ProjPoint("C", e[0])) - 1 / math.sqrt(2)) < 1e-12


def test_quaternion_distances():
    e = np.zeros((2, 4))
    e1 = e.copy()
    e1[0, 0] = 1.0
    ej = e.copy()
    ej[1, 2] = 1.0  # e_2 * j
    p = ProjPoint("H", e1)
    q = ProjPoint("H", ej)
    assert abs(chordal_dist(p, q) - 1.0) < 1e-15
    assert abs(point_hyperplane_dist(p, Hyperplane("H", e1)) - 1.0) < 1e-15
