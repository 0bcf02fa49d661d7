from collections.abc import Iterator
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .constants import CSV_HEADER, SURFACE_HEADER
from .geometry import Mesh, Triangle
from .utils import write_csv


def eval_barycentric(coefficients: NDArray[np.float64], lam: NDArray[np.float64]) -> NDArray[np.float64]:
    """sum a_i lambda_i + sum b_i lambda_i^2

    coefficients 形状 (..., 6)，lam 形状 (..., 3)，前导维度可广播
    """
    a, b = coefficients[..., :3], coefficients[..., 3:]
    return np.sum(a * lam + b * lam * lam, axis=-1)


@dataclass(frozen=True, slots=True)
class QValidationReport:
    """用户给出的 q 的检查结果"""

    residual_constant: float
    """|int q omega|"""
    residual_linear: float
    """|int t q omega|"""
    kappa: float
    """int t^2 q omega"""
    degree: int
    accepted: bool
    reason: str = ""
    """未通过时的原因"""


@dataclass(frozen=True, slots=True)
class LocalReconstruction:
    """单个三角形上的重构 sum a_i lambda_i + sum b_i lambda_i^2（经典格式 b = 0）"""

    triangle: Triangle
    a: NDArray[np.float64]
    b: NDArray[np.float64]

    @property
    def coefficients(self) -> NDArray[np.float64]:
        """(a1, a2, a3, b1, b2, b3)"""
        return np.concatenate([self.a, self.b])

    def at_barycentric(self, lam: ArrayLike) -> NDArray[np.float64]:
        """lam 形状 (..., 3)"""
        return eval_barycentric(self.coefficients, np.asarray(lam, dtype=float))

    def __call__(self, x: ArrayLike, y: ArrayLike) -> NDArray[np.float64]:
        lam = self.triangle.barycentric_xy(x, y)
        return eval_barycentric(self.coefficients, np.moveaxis(lam, 0, -1))


@dataclass(frozen=True, slots=True)
class GlobalReconstruction:
    """网格上逐三角形的非协调重构"""

    mesh: Mesh
    coefficients: NDArray[np.float64]
    """(T, 6) 每个三角形的 (a1, a2, a3, b1, b2, b3)"""
    operator: str = ""
    """算子名称，仅用于日志与导出"""

    def __len__(self) -> int:
        return len(self.coefficients)

    def local(self, i: int) -> LocalReconstruction:
        c = self.coefficients[i]
        return LocalReconstruction(self.mesh.triangle(i), c[:3].copy(), c[3:].copy())

    def __iter__(self) -> Iterator[LocalReconstruction]:
        return (self.local(i) for i in range(len(self)))

    def at_barycentric(self, tri_idx: ArrayLike, lam: ArrayLike) -> NDArray[np.float64]:
        """三角形 tri_idx[k] 内重心坐标为 lam[k] 的点上的值"""
        return eval_barycentric(self.coefficients[np.asarray(tri_idx)], np.asarray(lam, dtype=float))

    def __call__(self, x: ArrayLike, y: ArrayLike) -> NDArray[np.float64]:
        """按点定位求值，公共边上的点取编号最小的三角形

        Raises:
            PointLocationException: 点不在网格内
        """
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        idx = self.mesh.locate(x, y)
        lam = self.mesh.barycentric_of(idx, x, y)
        return self.at_barycentric(idx, lam)

    def export(self, path: Path) -> Path:
        """逐三角形系数：triangle, a1, a2, a3, b1, b2, b3"""
        header = ("triangle", "a1", "a2", "a3", "b1", "b2", "b3")
        rows = ([i, *row] for i, row in enumerate(self.coefficients.tolist()))
        return write_csv(path, header, rows)


@dataclass(frozen=True, slots=True)
class ErrorRow:
    """误差表的一行"""

    function: str
    n: int
    """网格层数"""
    triangles: int
    operator: str
    """classical / enriched"""
    l1_error: float

    def as_row(self) -> tuple[str, int, int, str, float]:
        return (self.function, self.n, self.triangles, self.operator, self.l1_error)


@dataclass(slots=True)
class ErrorReport:
    """误差数组，按输入顺序排列"""

    rows: list[ErrorRow] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self) -> Iterator[ErrorRow]:
        return iter(self.rows)

    def error(self, function: str, n: int, operator: str) -> float:
        for row in self.rows:
            if (row.function, row.n, row.operator) == (function, n, operator):
                return row.l1_error
        raise KeyError((function, n, operator))

    def export(self, path: Path) -> Path:
        return write_csv(path, CSV_HEADER, (row.as_row() for row in self.rows))


@dataclass(frozen=True, slots=True)
class TuningResult:
    """网格搜索结果"""

    best_mu: float
    best_sigma: float
    best_total_error: float
    surface: list[tuple[float, float, float]]
    """按网格顺序（先 mu 后 sigma）排列的 (mu, sigma, E)"""
    family: int = 1

    @property
    def best(self) -> tuple[float, float]:
        return self.best_mu, self.best_sigma

    def export_surface(self, path: Path) -> Path:
        return write_csv(path, SURFACE_HEADER, self.surface)
