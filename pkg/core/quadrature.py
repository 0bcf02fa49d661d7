"""[-1,1] 上的 Gauss-Legendre 规则、对称分半边规则与三角形上的 Duffy 规则"""

from collections.abc import Callable
from dataclasses import dataclass
from threading import RLock

import numpy as np
from numpy.typing import NDArray

from .constants import DEFAULT_EDGE_NODES, DEFAULT_TRI_NODES
from .exception import DomainException, NonFiniteValueException
from .geometry import Triangle
from .utils import LimitedSizeDict

EdgeFunc = Callable[[NDArray[np.float64]], NDArray[np.float64]]
PlaneFunc = Callable[[NDArray[np.float64], NDArray[np.float64]], NDArray[np.float64]]


@dataclass(frozen=True, slots=True)
class Rule1D:
    """[-1,1] 上的求积规则，节点升序且关于 0 对称"""

    nodes: NDArray[np.float64]
    weights: NDArray[np.float64]

    def __len__(self) -> int:
        return len(self.nodes)

    @property
    def degree(self) -> int:
        """代数精度"""
        return 2 * len(self.nodes) - 1


@dataclass(frozen=True, slots=True)
class TriRule:
    """三角形上的求积规则

    nodes 为 (K, 3) 重心坐标，weights 之和为 1（相对三角形面积）
    """

    nodes: NDArray[np.float64]
    weights: NDArray[np.float64]
    degree: int

    def __len__(self) -> int:
        return len(self.weights)

    def refined(self) -> "TriRule":
        """中点四分一次后的复合规则，仍以母三角形的重心坐标表示"""
        e = np.eye(3)
        m12, m23, m31 = (e[0] + e[1]) / 2, (e[1] + e[2]) / 2, (e[2] + e[0]) / 2
        subs = (
            (e[0], m12, m31),
            (m12, e[1], m23),
            (m31, m23, e[2]),
            (m23, m31, m12),
        )
        nodes = np.concatenate([self.nodes @ np.array(corners) for corners in subs])
        weights = np.tile(self.weights / 4, 4)
        return TriRule(nodes, weights, self.degree)


_GL_CACHE: LimitedSizeDict[int, Rule1D] = LimitedSizeDict(max_size=32)
_EDGE_CACHE: LimitedSizeDict[int, Rule1D] = LimitedSizeDict(max_size=32)
_TRI_CACHE: LimitedSizeDict[int, TriRule] = LimitedSizeDict(max_size=16)
_RULE_LOCK = RLock()


def _freeze(*arrays: NDArray[np.float64]) -> None:
    for arr in arrays:
        arr.setflags(write=False)


def gauss_legendre(m: int) -> Rule1D:
    """m 点 Gauss-Legendre 规则，Legendre 多项式零点由 Newton 迭代求得

    Args:
        m: 节点数，m >= 1
    """
    if m < 1:
        raise DomainException(f"Gauss-Legendre 节点数必须 >= 1，收到 {m}")
    with _RULE_LOCK:
        if m not in _GL_CACHE:
            _GL_CACHE[m] = _build_gauss_legendre(m)
        return _GL_CACHE[m]


def _build_gauss_legendre(m: int) -> Rule1D:
    k = np.arange(1, m + 1)
    x = np.cos(np.pi * (k - 0.25) / (m + 0.5))
    for _ in range(100):
        p0 = np.ones_like(x)
        p1 = x.copy()
        for n in range(2, m + 1):
            p0, p1 = p1, ((2 * n - 1) * x * p1 - (n - 1) * p0) / n
        # P_m = p1, P_{m-1} = p0
        dp = m * (x * p1 - p0) / (x * x - 1.0)
        dx = p1 / dp
        x = x - dx
        if np.max(np.abs(dx)) < 5e-16:
            break
    p0 = np.ones_like(x)
    p1 = x.copy()
    for n in range(2, m + 1):
        p0, p1 = p1, ((2 * n - 1) * x * p1 - (n - 1) * p0) / n
    dp = m * (x * p1 - p0) / (x * x - 1.0)
    w = 2.0 / ((1.0 - x * x) * dp * dp)

    # 升序并强制对称
    order = np.argsort(x)
    x, w = x[order], w[order]
    x = (x - x[::-1]) / 2
    w = (w + w[::-1]) / 2
    _freeze(x, w)
    return Rule1D(x, w)


def edge_rule(m: int = DEFAULT_EDGE_NODES) -> Rule1D:
    """对称分半边规则：[-1,0] 与 [0,1] 上各放 m 个 Gauss-Legendre 节点

    边密度可能在 t=0 处不光滑（例如非整数 mu 时的 |t|^{2mu}），分半后两侧被积函数各自光滑。
    """
    with _RULE_LOCK:
        if m not in _EDGE_CACHE:
            _EDGE_CACHE[m] = _build_edge_rule(m)
        return _EDGE_CACHE[m]


def _build_edge_rule(m: int) -> Rule1D:
    base = gauss_legendre(m)
    half_nodes = (base.nodes + 1.0) / 2
    half_weights = base.weights / 2
    nodes = np.concatenate([-half_nodes[::-1], half_nodes])
    weights = np.concatenate([half_weights[::-1], half_weights])
    _freeze(nodes, weights)
    return Rule1D(nodes, weights)


def duffy_rule(m: int = DEFAULT_TRI_NODES) -> TriRule:
    """由 [0,1]^2 上 m x m 张量 Gauss 规则经 Duffy（塌缩正方形）变换得到的三角形规则

    lambda1 = u, lambda2 = (1-u) v, lambda3 = (1-u)(1-v)，Jacobian 因子 (1-u)。
    对次数不超过 2m-2 的多项式精确。
    """
    if m < 1:
        raise DomainException(f"三角形规则节点数必须 >= 1，收到 {m}")
    with _RULE_LOCK:
        if m not in _TRI_CACHE:
            _TRI_CACHE[m] = _build_duffy_rule(m)
        return _TRI_CACHE[m]


def _build_duffy_rule(m: int) -> TriRule:
    base = gauss_legendre(m)
    u = (base.nodes + 1.0) / 2
    wu = base.weights / 2
    uu, vv = np.meshgrid(u, u, indexing="ij")
    ww = np.outer(wu, wu)
    uu, vv, ww = uu.ravel(), vv.ravel(), ww.ravel()
    nodes = np.stack([uu, (1.0 - uu) * vv, (1.0 - uu) * (1.0 - vv)], axis=1)
    weights = 2.0 * (1.0 - uu) * ww
    _freeze(nodes, weights)
    return TriRule(nodes, weights, 2 * m - 2)


def _check_finite(values: NDArray[np.float64], what: str) -> None:
    if not np.all(np.isfinite(values)):
        raise NonFiniteValueException(f"{what} 在积分节点处取到非有限值")


def integrate_edge(f: EdgeFunc, rule: Rule1D) -> float:
    """sum_i w_i f(t_i)，f 需接受节点数组"""
    values = np.asarray(f(rule.nodes), dtype=float)
    values = np.broadcast_to(values, rule.nodes.shape)
    _check_finite(values, "边被积函数")
    return float(values @ rule.weights)


def integrate_triangle(f: PlaneFunc, tri: Triangle, rule: TriRule) -> float:
    """三角形上按面积加权的求积，f(x, y) 需接受数组"""
    pts = tri.to_cartesian(rule.nodes)
    values = np.asarray(f(pts[:, 0], pts[:, 1]), dtype=float)
    values = np.broadcast_to(values, rule.weights.shape)
    _check_finite(values, "三角形被积函数")
    return tri.area * float(values @ rule.weights)


@dataclass(frozen=True, slots=True)
class Rules:
    """重构与误差计算所用的一组求积规则"""

    edge: Rule1D
    triangle: TriRule
    refine: bool = True
    """误差积分时是否对每个三角形做一次四分"""

    @classmethod
    def default(cls, edge_nodes: int = DEFAULT_EDGE_NODES, tri_nodes: int = DEFAULT_TRI_NODES, refine: bool = True) -> "Rules":
        return cls(edge_rule(edge_nodes), duffy_rule(tri_nodes), refine)

    @property
    def error_rule(self) -> TriRule:
        return self.triangle.refined() if self.refine else self.triangle
