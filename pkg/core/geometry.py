"""三角形、重心坐标、边参数化、函数 H 以及 [-1,1]^2 上的 Friedrichs-Keller 网格

约定：
- 三角形顶点 v1, v2, v3 循环编号，v4 = v1, v5 = v2
- 第 j 条边 s_j = [v_{j+1}, v_{j+2}]，与顶点 v_j 相对
- 边参数化 gamma_j(t) = (1+t)/2 * v_{j+1} + (1-t)/2 * v_{j+2}，t in [-1, 1]
"""

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .constants import DEGENERATE_AREA, LOCATE_TOL
from .exception import DegenerateTriangleException, DomainException, PointLocationException
from .utils import logger


@dataclass(frozen=True, slots=True)
class Point2:
    """二维点"""

    x: float
    y: float

    def __post_init__(self):
        if not (np.isfinite(self.x) and np.isfinite(self.y)):
            raise DomainException(f"点坐标必须有限: ({self.x}, {self.y})")

    def as_array(self) -> NDArray[np.float64]:
        return np.array([self.x, self.y], dtype=float)


def _xy(p: Point2 | ArrayLike) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """把 Point2 或 (..., 2) 数组拆成 x, y"""
    if isinstance(p, Point2):
        return np.asarray(p.x, dtype=float), np.asarray(p.y, dtype=float)
    arr = np.asarray(p, dtype=float)
    return arr[..., 0], arr[..., 1]


def _check_edge(j: int) -> None:
    if j not in (1, 2, 3):
        raise DomainException(f"边编号必须为 1、2、3，收到 {j}")


@dataclass(frozen=True, slots=True)
class Triangle:
    """非退化三角形，构造时缓存仿射重心映射"""

    v1: Point2
    v2: Point2
    v3: Point2
    signed_area: float = field(init=False, repr=False)
    """有向面积，逆时针为正"""
    _inv_jac: NDArray[np.float64] = field(init=False, repr=False, compare=False)
    """(lambda1, lambda2) = inv_jac @ (p - v3)"""

    def __post_init__(self):
        jac = np.array(
            [
                [self.v1.x - self.v3.x, self.v2.x - self.v3.x],
                [self.v1.y - self.v3.y, self.v2.y - self.v3.y],
            ]
        )
        det = float(jac[0, 0] * jac[1, 1] - jac[0, 1] * jac[1, 0])
        if abs(det) / 2 <= DEGENERATE_AREA:
            raise DegenerateTriangleException(f"三角形退化: {self}")
        inv = np.array([[jac[1, 1], -jac[0, 1]], [-jac[1, 0], jac[0, 0]]]) / det
        object.__setattr__(self, "signed_area", det / 2)
        object.__setattr__(self, "_inv_jac", inv)

    @classmethod
    def from_coords(cls, coords: ArrayLike) -> "Triangle":
        """由 3x2 坐标数组构造"""
        c = np.asarray(coords, dtype=float).reshape(3, 2)
        return cls(*(Point2(float(x), float(y)) for x, y in c))

    @property
    def area(self) -> float:
        return abs(self.signed_area)

    @property
    def vertices(self) -> NDArray[np.float64]:
        """3x2 顶点坐标"""
        return np.array([[v.x, v.y] for v in (self.v1, self.v2, self.v3)])

    def vertex(self, k: int) -> Point2:
        """循环编号的顶点，k = 1..5"""
        return (self.v1, self.v2, self.v3)[(k - 1) % 3]

    @property
    def centroid(self) -> Point2:
        c = self.vertices.mean(axis=0)
        return Point2(float(c[0]), float(c[1]))

    def barycentric_xy(self, x: ArrayLike, y: ArrayLike) -> NDArray[np.float64]:
        """向量化重心坐标，返回形状 (3, ...) 的数组"""
        dx = np.asarray(x, dtype=float) - self.v3.x
        dy = np.asarray(y, dtype=float) - self.v3.y
        lam1 = self._inv_jac[0, 0] * dx + self._inv_jac[0, 1] * dy
        lam2 = self._inv_jac[1, 0] * dx + self._inv_jac[1, 1] * dy
        return np.stack([lam1, lam2, 1.0 - lam1 - lam2])

    def to_cartesian(self, lam: ArrayLike) -> NDArray[np.float64]:
        """重心坐标 (..., 3) 转笛卡尔坐标 (..., 2)"""
        return np.asarray(lam, dtype=float) @ self.vertices


def barycentric(tri: Triangle, p: Point2 | ArrayLike) -> tuple[float, float, float] | NDArray[np.float64]:
    """重心坐标

    Args:
        tri: 三角形
        p: Point2 或形状 (..., 2) 的点数组

    Returns:
        Point2 输入时返回三元组，数组输入时返回形状 (3, ...) 的数组
    """
    x, y = _xy(p)
    lam = tri.barycentric_xy(x, y)
    if isinstance(p, Point2):
        return float(lam[0]), float(lam[1]), float(lam[2])
    return lam


def edge_point(tri: Triangle, j: int, t: float | ArrayLike) -> Point2 | NDArray[np.float64]:
    """第 j 条边上参数为 t 的点

    Args:
        tri: 三角形
        j: 边编号 1..3
        t: 标量或数组，取值 [-1, 1]

    Returns:
        标量 t 返回 Point2，数组 t 返回形状 (..., 2) 的坐标
    """
    _check_edge(j)
    t_arr = np.asarray(t, dtype=float)
    if np.any(np.abs(t_arr) > 1.0) or not np.all(np.isfinite(t_arr)):
        raise DomainException(f"边参数 t 必须位于 [-1, 1]，收到 {t}")
    head = tri.vertex(j + 1).as_array()
    tail = tri.vertex(j + 2).as_array()
    pts = (1.0 + t_arr)[..., None] / 2 * head + (1.0 - t_arr)[..., None] / 2 * tail
    if t_arr.ndim == 0:
        return Point2(float(pts[0]), float(pts[1]))
    return pts


def h_from_barycentric(lam: NDArray[np.float64]) -> NDArray[np.float64]:
    """H = 2 * sum(lambda_i^2) - 1，lam 形状 (3, ...)"""
    return 2.0 * np.sum(lam * lam, axis=0) - 1.0


def h_function(tri: Triangle, p: Point2 | ArrayLike) -> float | NDArray[np.float64]:
    """函数 H(x) = 2 (lambda1^2 + lambda2^2 + lambda3^2) - 1，在边 s_j 的参数 t 处等于 t^2"""
    x, y = _xy(p)
    h = h_from_barycentric(tri.barycentric_xy(x, y))
    return float(h) if isinstance(p, Point2) else h


# region 网格


@dataclass(frozen=True, slots=True)
class GridLayout:
    """结构化网格的桶定位信息"""

    cells: int
    """每个方向上的方格数 n+1"""
    lower: float
    """区域左下角坐标（两个方向相同）"""
    step: float
    """方格边长"""


@dataclass(frozen=True, slots=True)
class Mesh:
    """三角网格，构造后不可变

    - vertices: (V, 2) 顶点坐标
    - triangles: (T, 3) 顶点编号，逆时针
    - edges: (E, 2) 边的顶点编号，按 (小, 大) 排序
    - edge_triangles: 每条边相邻的三角形编号（边界边一个，内部边两个）
    - triangle_edges: (T, 3) 第 j 条局部边对应的全局边编号
    - edge_flipped: (T, 3) 局部参数方向与全局方向相反时为 True
    """

    vertices: NDArray[np.float64]
    triangles: NDArray[np.int64]
    edges: NDArray[np.int64] = field(init=False, repr=False)
    edge_triangles: tuple[tuple[int, ...], ...] = field(init=False, repr=False)
    triangle_edges: NDArray[np.int64] = field(init=False, repr=False)
    edge_flipped: NDArray[np.bool_] = field(init=False, repr=False)
    signed_areas: NDArray[np.float64] = field(init=False, repr=False)
    inv_jac: NDArray[np.float64] = field(init=False, repr=False)
    layout: GridLayout | None = None

    def __post_init__(self):
        verts = np.ascontiguousarray(self.vertices, dtype=float)
        tris = np.ascontiguousarray(self.triangles, dtype=np.int64)
        if verts.ndim != 2 or verts.shape[1] != 2 or tris.ndim != 2 or tris.shape[1] != 3:
            raise DomainException("网格数组形状错误")
        verts.setflags(write=False)
        tris.setflags(write=False)
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "triangles", tris)

        # 仿射映射
        p1, p2, p3 = verts[tris[:, 0]], verts[tris[:, 1]], verts[tris[:, 2]]
        jac = np.stack([p1 - p3, p2 - p3], axis=-1)  # (T, 2, 2)，列为 v1-v3, v2-v3
        det = jac[:, 0, 0] * jac[:, 1, 1] - jac[:, 0, 1] * jac[:, 1, 0]
        if np.any(np.abs(det) / 2 <= DEGENERATE_AREA):
            bad = int(np.argmin(np.abs(det)))
            raise DegenerateTriangleException(f"网格中第 {bad} 个三角形退化")
        inv = np.empty_like(jac)
        inv[:, 0, 0] = jac[:, 1, 1] / det
        inv[:, 0, 1] = -jac[:, 0, 1] / det
        inv[:, 1, 0] = -jac[:, 1, 0] / det
        inv[:, 1, 1] = jac[:, 0, 0] / det
        object.__setattr__(self, "signed_areas", det / 2)
        object.__setattr__(self, "inv_jac", inv)

        # 边与邻接关系，局部边 j（0 基）连接 v_{j+1} 与 v_{j+2}
        heads = tris[:, [1, 2, 0]]
        tails = tris[:, [2, 0, 1]]
        lo = np.minimum(heads, tails)
        hi = np.maximum(heads, tails)
        pairs = np.stack([lo.ravel(), hi.ravel()], axis=1)
        edges, inverse = np.unique(pairs, axis=0, return_inverse=True)
        inverse = inverse.reshape(tris.shape)
        adjacency: list[list[int]] = [[] for _ in range(len(edges))]
        for t_idx, row in enumerate(inverse):
            for e_idx in row:
                adjacency[e_idx].append(t_idx)
        if any(len(a) > 2 for a in adjacency):
            raise DomainException("网格不协调：存在被 3 个以上三角形共享的边")
        # 全局方向 t=-1 在小编号顶点，局部方向 t=-1 在 v_{j+2}
        flipped = tails != lo
        for arr in (edges, inverse, flipped):
            arr.setflags(write=False)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "edge_triangles", tuple(tuple(a) for a in adjacency))
        object.__setattr__(self, "triangle_edges", inverse)
        object.__setattr__(self, "edge_flipped", flipped)

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    @property
    def areas(self) -> NDArray[np.float64]:
        return np.abs(self.signed_areas)

    @property
    def boundary_edges(self) -> list[int]:
        return [e for e, adj in enumerate(self.edge_triangles) if len(adj) == 1]

    def triangle(self, i: int) -> Triangle:
        return Triangle.from_coords(self.vertices[self.triangles[i]])

    def corners(self) -> NDArray[np.float64]:
        """(T, 3, 2) 每个三角形的顶点坐标"""
        return self.vertices[self.triangles]

    def barycentric_of(self, tri_idx: NDArray[np.int64], x: NDArray[np.float64], y: NDArray[np.float64]) -> NDArray[np.float64]:
        """点 (x[k], y[k]) 在三角形 tri_idx[k] 中的重心坐标，返回 (..., 3)"""
        origin = self.vertices[self.triangles[tri_idx, 2]]
        inv = self.inv_jac[tri_idx]
        dx = x - origin[..., 0]
        dy = y - origin[..., 1]
        lam1 = inv[..., 0, 0] * dx + inv[..., 0, 1] * dy
        lam2 = inv[..., 1, 0] * dx + inv[..., 1, 1] * dy
        return np.stack([lam1, lam2, 1.0 - lam1 - lam2], axis=-1)

    def _candidates(self, x: NDArray[np.float64], y: NDArray[np.float64]) -> NDArray[np.int64]:
        """每个点的候选三角形编号 (P, C)"""
        if self.layout is None:
            return np.broadcast_to(np.arange(self.n_triangles), (len(x), self.n_triangles))
        lay = self.layout
        fx = (x - lay.lower) / lay.step
        fy = (y - lay.lower) / lay.step
        tol = LOCATE_TOL / lay.step
        cols = [np.clip(np.floor(fx + d), 0, lay.cells - 1).astype(np.int64) for d in (-tol, tol)]
        rows = [np.clip(np.floor(fy + d), 0, lay.cells - 1).astype(np.int64) for d in (-tol, tol)]
        cells = [r * lay.cells + c for r in rows for c in cols]
        return np.stack([2 * cell + k for cell in cells for k in (0, 1)], axis=1)

    def locate(self, x: ArrayLike, y: ArrayLike) -> NDArray[np.int64]:
        """点定位，落在公共边上的点取编号最小的三角形

        Raises:
            PointLocationException: 存在不在网格内的点
        """
        xs = np.atleast_1d(np.asarray(x, dtype=float)).ravel()
        ys = np.atleast_1d(np.asarray(y, dtype=float)).ravel()
        cand = self._candidates(xs, ys)
        lam = self.barycentric_of(cand, xs[:, None], ys[:, None])
        inside = np.all(lam >= -LOCATE_TOL, axis=-1)
        masked = np.where(inside, cand, np.iinfo(np.int64).max)
        found = masked.min(axis=1)
        missing = ~inside.any(axis=1)
        if np.any(missing):
            k = int(np.argmax(missing))
            raise PointLocationException(f"点 ({xs[k]}, {ys[k]}) 不在网格内")
        return found.reshape(np.shape(np.asarray(x)))

    def to_text(self) -> str:
        """纯文本导出：先顶点后三角形，仅用于调试"""
        lines = [f"vertices {len(self.vertices)}"]
        lines += [f"{x:.17g} {y:.17g}" for x, y in self.vertices]
        lines.append(f"triangles {self.n_triangles}")
        lines += [f"{a} {b} {c}" for a, b, c in self.triangles]
        return "\n".join(lines) + "\n"

    def export(self, path: Path) -> Path:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_text(), encoding="utf-8")
        logger.debug(f"网格已导出到 {path}")
        return path


def friedrichs_keller(n: int) -> Mesh:
    """[-1,1]^2 上第 n 层 Friedrichs-Keller 三角剖分

    (n+1) x (n+1) 个正方形，每个正方形沿左下到右上的对角线剖分为两个三角形，
    共 2(n+1)^2 个三角形。第 (i, j) 个方格的两个三角形编号为 2(j(n+1)+i) 和
    2(j(n+1)+i)+1。
    """
    if n < 0:
        raise DomainException(f"网格层数必须非负，收到 n={n}")
    cells = n + 1
    step = 2.0 / cells
    coords = -1.0 + step * np.arange(cells + 1)
    coords[-1] = 1.0
    gx, gy = np.meshgrid(coords, coords)
    vertices = np.stack([gx.ravel(), gy.ravel()], axis=1)

    i, j = np.meshgrid(np.arange(cells), np.arange(cells))
    i, j = i.ravel(), j.ravel()
    a = j * (cells + 1) + i  # 左下
    b = a + 1  # 右下
    c = a + cells + 2  # 右上
    d = a + cells + 1  # 左上
    lower = np.stack([a, b, c], axis=1)
    upper = np.stack([a, c, d], axis=1)
    triangles = np.stack([lower, upper], axis=1).reshape(-1, 3)
    return Mesh(vertices, triangles, layout=GridLayout(cells=cells, lower=-1.0, step=step))


# endregion
