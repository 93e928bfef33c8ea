import numpy as np
import pytest

from pingpong.scalars import Matrix


@pytest.fixture
def rng():
    return np.random.default_rng(0xA905)


def random_quat_matrix(rng, n, scale=1.0):
    return Matrix("H", rng.uniform(-scale, scale, size=(n, n, 4)))


def quat_real_model(m):
    """Independent 4x4-block real model of an H matrix, built entrywise.

    Writes each entry's left-multiplication matrix directly from the
    Hamilton relations, without using the library's structure tensor.
    """
    n = m.rows
    out = np.zeros((4 * n, 4 * n))
    for i in range(n):
        for k in range(n):
            a, b, c, d = m.array[i, k]
            out[4 * i:4 * i + 4, 4 * k:4 * k + 4] = np.array([
                [a, -b, -c, -d],
                [b, a, -d, c],
                [c, d, a, -b],
                [d, -c, b, a],
            ])
    return out


def random_sp_n1(rng, n, steps=4):
    """Random element of Sp(n,1) as a product of Sp(n)-rotations and boosts."""
    g = Matrix.identity("H", n + 1)
    for _ in range(steps):
        # diagonal of unit quaternions
        qs = rng.standard_normal((n + 1, 4))
        qs /= np.linalg.norm(qs, axis=1)[:, None]
        g = g @ Matrix.diag("H", list(qs))
        # real rotation in two of the first n coordinates
        if n >= 2:
            i, j = rng.choice(n, size=2, replace=False)
            th = rng.uniform(0, 2 * np.pi)
            rot = np.eye(n + 1)
            rot[i, i] = rot[j, j] = np.cos(th)
            rot[i, j] = -np.sin(th)
            rot[j, i] = np.sin(th)
            arr = np.zeros((n + 1, n + 1, 4))
            arr[:, :, 0] = rot
            g = g @ Matrix("H", arr)
        # boost mixing coordinate k with the negative-signature one
        k = int(rng.integers(0, n))
        t = rng.uniform(-0.8, 0.8)
        boost = np.eye(n + 1)
        boost[k, k] = boost[n, n] = np.cosh(t)
        boost[k, n] = boost[n, k] = np.sinh(t)
        arr = np.zeros((n + 1, n + 1, 4))
        arr[:, :, 0] = boost
        g = g @ Matrix("H", arr)
    return g
