"""测试共用的随机几何与多项式构造"""

import numpy as np

from core.geometry import Triangle


def make_triangles(rng: np.random.Generator, count: int, min_area: float = 0.05) -> list[Triangle]:
    """[-1,1]^2 内面积不太小的随机三角形，顶点顺序随机（可能顺时针）"""
    triangles = []
    while len(triangles) < count:
        coords = rng.uniform(-1.0, 1.0, size=(3, 2))
        a, b, c = coords
        area = abs((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1])) / 2
        if area >= min_area:
            triangles.append(Triangle.from_coords(coords))
    return triangles


def make_quadratic(rng: np.random.Generator):
    """随机二元二次多项式"""
    c = rng.normal(size=6)

    def f(x, y):
        return c[0] + c[1] * x + c[2] * y + c[3] * x * x + c[4] * x * y + c[5] * y * y

    return f


def make_affine(rng: np.random.Generator):
    c = rng.normal(size=3)

    def f(x, y):
        return c[0] + c[1] * x + c[2] * y

    return f


def interior_points(tri: Triangle, rng: np.random.Generator, count: int = 20) -> tuple[np.ndarray, np.ndarray]:
    lam = rng.dirichlet(np.ones(3), size=count)
    pts = tri.to_cartesian(lam)
    return pts[:, 0], pts[:, 1]


def lam_of(tri: Triangle, x, y) -> np.ndarray:
    """(..., 3) 重心坐标"""
    return np.moveaxis(tri.barycentric_xy(x, y), 0, -1)


