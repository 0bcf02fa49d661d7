"""边泛函、对偶基函数与局部 / 全局重构算子

三角形 T 上的试探空间：经典格式为 P1（3 个泛函 I_j^CH），加权格式为 P2（6 个泛函 I_j, L_j）。
重构以重心坐标系数 (a1, a2, a3, b1, b2, b3) 表示：sum a_i lambda_i + sum b_i lambda_i^2。

在第 j 条边上 lambda_j = 0，lambda_{j+1} = (1+t)/2，lambda_{j+2} = (1-t)/2，因此泛函作用于
单项式 {lambda_i, lambda_i^2} 的值只依赖于密度的矩，与三角形无关。
"""

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .config import HistoConfig
from .constants import CERTIFICATE_TOL
from .data import GlobalReconstruction, LocalReconstruction
from .densities import (
    EdgeDensity,
    Family1Density,
    Family2Density,
    LimitBetaDensity,
    OrthoQuadratic,
    ortho_quadratic_canonical,
    ortho_quadratic_closed_form,
)
from .exception import DomainException, NonFiniteValueException, SpecException
from .geometry import Mesh, Triangle, edge_point
from .quadrature import PlaneFunc, Rule1D, Rules
from .utils import logger

# 1 - 2 delta_{ki}：phi_i 在单项式 lambda_k 上的系数
_S = np.ones((3, 3)) - 2.0 * np.eye(3)
# 经典泛函的 lambda_i 块与 lambda_i^2 块的结构矩阵，det = 2
ADJACENCY = np.ones((3, 3)) - np.eye(3)


class OperatorKind(str, Enum):
    CLASSICAL = "classical"
    ENRICHED1 = "enriched1"
    ENRICHED2 = "enriched2"
    GENERIC = "generic"


@dataclass(frozen=True, slots=True)
class LocalOperatorSpec:
    """局部算子描述，构造后不可变

    - CLASSICAL: P1，三个均匀权重的边平均
    - ENRICHED1 / ENRICHED2: 解析密度族（sigma = inf 时为 beta 型极限），q = t^2 - m2
    - GENERIC: 一般密度 omega 与首一正交二次式 q（也可由用户给出）
    """

    kind: OperatorKind
    density: EdgeDensity
    q: OrthoQuadratic | None = None
    sigma: float | None = None
    mu: float | None = None
    m2: float = field(init=False)
    norm2: float = field(init=False)
    """||q||^2"""
    kappa: float = field(init=False)
    """int t^2 q omega"""
    A: float = field(init=False)
    """(1 + m2) / kappa"""
    closed_form: bool = field(init=False)
    """omega 与 q 都是偶函数时使用闭式对偶基"""
    functional_matrix: NDArray[np.float64] = field(init=False, repr=False)
    """(6, 6) 泛函 (I1, I2, I3, L1, L2, L3) 作用于 (lambda_i, lambda_i^2) 的值"""
    dual: NDArray[np.float64] = field(init=False, repr=False)
    """(6, 6) 泛函值到重心系数的映射，列为 phi_1..3, psi_1..3 的系数"""

    def __post_init__(self):
        classical = self.kind is OperatorKind.CLASSICAL
        if not classical and self.q is None:
            raise SpecException(f"{self.kind.value} 算子需要正交多项式 q")
        if not classical:
            self.q.check_orthogonal()
        m1 = self.density.moment(1)
        m2 = self.density.moment(2)
        if classical:
            q0 = q1 = kappa = norm2 = 0.0
        else:
            q0 = float(self.q.coefficients @ [self.density.moment(k) for k in range(len(self.q.coefficients))])
            q1 = float(self.q.coefficients @ [self.density.moment(k + 1) for k in range(len(self.q.coefficients))])
            kappa, norm2 = self.q.kappa, self.q.norm2
        closed_form = self.density.is_even and (classical or self.q.is_even)

        # 第 j 个泛函作用于 lambda_{j+1}, lambda_{j+2}（lambda_j 在边 j 上为 0）
        lin_i = ((1 + m1) / 2, (1 - m1) / 2)
        quad_i = ((1 + 2 * m1 + m2) / 4, (1 - 2 * m1 + m2) / 4)
        lin_l = ((q0 + q1) / 2, (q0 - q1) / 2)
        quad_l = ((q0 + 2 * q1 + kappa) / 4, (q0 - 2 * q1 + kappa) / 4)
        matrix = np.zeros((6, 6))
        for j in range(3):
            for offset, k in ((0, (j + 1) % 3), (1, (j + 2) % 3)):
                matrix[j, k] = lin_i[offset]
                matrix[j, 3 + k] = quad_i[offset]
                matrix[3 + j, k] = lin_l[offset]
                matrix[3 + j, 3 + k] = quad_l[offset]

        if classical:
            A = 0.0
            dual = np.zeros((6, 6))
            dual[:3, :3] = _S
        elif closed_form:
            A = (1 + m2) / kappa
            dual = np.block([[_S, -A * _S], [np.zeros((3, 3)), 2.0 / kappa * _S]])
        else:
            A = (1 + m2) / kappa
            dual = np.linalg.inv(matrix)
            logger.debug(f"{self.label}: 密度或 q 非偶，对偶基由 6x6 矩阵求逆得到")

        matrix.setflags(write=False)
        dual.setflags(write=False)
        object.__setattr__(self, "m2", m2)
        object.__setattr__(self, "norm2", norm2)
        object.__setattr__(self, "kappa", kappa)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "closed_form", closed_form)
        object.__setattr__(self, "functional_matrix", matrix)
        object.__setattr__(self, "dual", dual)

    # region 构造

    @classmethod
    def classical(cls) -> "LocalOperatorSpec":
        return cls(OperatorKind.CLASSICAL, LimitBetaDensity.uniform())

    @classmethod
    def enriched1(cls, sigma: float, mu: float) -> "LocalOperatorSpec":
        """第一族，sigma = inf 时取 beta 型极限密度"""
        density = LimitBetaDensity(mu, 1) if np.isinf(sigma) else Family1Density(sigma, mu)
        return cls(OperatorKind.ENRICHED1, density, ortho_quadratic_closed_form(density), sigma, mu)

    @classmethod
    def enriched2(cls, sigma: float, mu: float) -> "LocalOperatorSpec":
        density = LimitBetaDensity(mu, 2) if np.isinf(sigma) else Family2Density(sigma, mu)
        return cls(OperatorKind.ENRICHED2, density, ortho_quadratic_closed_form(density), sigma, mu)

    @classmethod
    def generic(cls, omega: EdgeDensity, q: OrthoQuadratic | ArrayLike | None = None) -> "LocalOperatorSpec":
        """一般密度；q 缺省时由矩写出首一正交二次式，也可传入升幂系数"""
        if q is None:
            q = ortho_quadratic_canonical(omega)
        elif not isinstance(q, OrthoQuadratic):
            q = OrthoQuadratic.from_coefficients(omega, q)
        elif q.density is not omega:
            q = OrthoQuadratic.from_coefficients(omega, q.coefficients)
        return cls(OperatorKind.GENERIC, omega, q)

    @classmethod
    def from_density(cls, density: EdgeDensity) -> "LocalOperatorSpec":
        match density:
            case Family1Density():
                return cls.enriched1(density.sigma, density.mu)
            case Family2Density():
                return cls.enriched2(density.sigma, density.mu)
            case LimitBetaDensity(family=1):
                return cls.enriched1(np.inf, density.mu)
            case LimitBetaDensity(family=2):
                return cls.enriched2(np.inf, density.mu)
            case _:
                return cls.generic(density)

    @classmethod
    def from_config(cls, config: HistoConfig) -> "LocalOperatorSpec":
        """由 --family 经密度注册表解析"""
        return cls.from_density(EdgeDensity.by_kind(config.family).from_config(config))

    # endregion

    @property
    def is_classical(self) -> bool:
        return self.kind is OperatorKind.CLASSICAL

    @property
    def n_functionals(self) -> int:
        return 3 if self.is_classical else 6

    @property
    def symmetric(self) -> bool:
        """omega 与 q 均为偶函数时，公共边上两侧的泛函值相同"""
        return self.closed_form

    @property
    def label(self) -> str:
        if self.kind in (OperatorKind.ENRICHED1, OperatorKind.ENRICHED2):
            return f"{self.kind.value}(sigma={self.sigma:g}, mu={self.mu:g})"
        if self.kind is OperatorKind.GENERIC:
            return f"generic({getattr(self.density, 'name', type(self.density).__name__)})"
        return self.kind.value

    def edge_weights(self, rule: Rule1D) -> NDArray[np.float64]:
        """(F, K) 每个泛函的边权重：I 为 w_k omega(t_k)，L 再乘 q(t_k)"""
        w_i = self.density.weights(rule)
        if self.is_classical:
            return w_i[None, :]
        return np.stack([w_i, w_i * self.q(rule.nodes)])


# region 泛函


def _edge_values(f: PlaneFunc, tri: Triangle, j: int, rule: Rule1D) -> NDArray[np.float64]:
    pts = edge_point(tri, j, rule.nodes)
    values = np.broadcast_to(np.asarray(f(pts[:, 0], pts[:, 1]), dtype=float), rule.nodes.shape)
    if not np.all(np.isfinite(values)):
        raise NonFiniteValueException(f"被积函数在第 {j} 条边的节点处取到非有限值")
    return values


def functional_I(f: PlaneFunc, tri: Triangle, j: int, density: EdgeDensity, rule: Rule1D) -> float:
    """I_j(f) = int f(gamma_j(t)) omega(t) dt"""
    return float(_edge_values(f, tri, j, rule) @ density.weights(rule))


def functional_L(f: PlaneFunc, tri: Triangle, j: int, density: EdgeDensity, q: OrthoQuadratic, rule: Rule1D) -> float:
    """L_j(f) = int q(t) f(gamma_j(t)) omega(t) dt，对一次多项式为 0"""
    return float(_edge_values(f, tri, j, rule) @ (density.weights(rule) * q(rule.nodes)))


def classical_functional(f: PlaneFunc, tri: Triangle, j: int, rule: Rule1D) -> float:
    """I_j^CH(f) = 1/2 int f(gamma_j(t)) dt"""
    return float(_edge_values(f, tri, j, rule) @ rule.weights) / 2


def spec_functionals(f: PlaneFunc, tri: Triangle, spec: LocalOperatorSpec, rule: Rule1D) -> NDArray[np.float64]:
    """按 (I1, I2, I3, L1, L2, L3) 顺序的泛函值，经典格式 L 部分补 0"""
    weights = spec.edge_weights(rule)
    values = np.zeros(6)
    for j in range(3):
        per_edge = weights @ _edge_values(f, tri, j + 1, rule)
        values[j] = per_edge[0]
        if not spec.is_classical:
            values[3 + j] = per_edge[1]
    return values


# endregion

# region 基函数


def _lam_last(lam: ArrayLike) -> NDArray[np.float64]:
    arr = np.asarray(lam, dtype=float)
    if arr.shape[-1] != 3:
        raise DomainException(f"重心坐标最后一维必须为 3，收到形状 {arr.shape}")
    return arr


def _check_index(i: int) -> None:
    if i not in (1, 2, 3):
        raise DomainException(f"基函数编号必须为 1、2、3，收到 {i}")


def basis_coefficients(spec: LocalOperatorSpec) -> NDArray[np.float64]:
    """(6, F) 每列是一个对偶基函数的重心系数：phi_1..3（经典格式为 phi^CH），随后 psi_1..3"""
    return spec.dual[:, : spec.n_functionals]


def basis_phi(i: int, lam: ArrayLike, spec: LocalOperatorSpec | None = None) -> NDArray[np.float64] | float:
    """phi_i = 1 - 2 lambda_i，lam 形状 (..., 3)

    spec 为非偶的一般算子时返回数值对偶基。
    """
    _check_index(i)
    arr = _lam_last(lam)
    if spec is not None and not spec.closed_form:
        coeffs = spec.dual[:, i - 1]
        result = arr @ coeffs[:3] + (arr * arr) @ coeffs[3:]
    else:
        result = 1.0 - 2.0 * arr[..., i - 1]
    return float(result) if np.ndim(result) == 0 else result


def basis_psi(i: int, lam: ArrayLike, spec: LocalOperatorSpec) -> NDArray[np.float64] | float:
    """psi_i = -A (1 - 2 lambda_i) + 2/kappa (-lambda_i^2 + lambda_{i+1}^2 + lambda_{i+2}^2)"""
    _check_index(i)
    if spec.is_classical:
        raise SpecException("经典格式没有 psi 基函数")
    arr = _lam_last(lam)
    if spec.closed_form:
        sq = arr * arr
        k = i - 1
        result = -spec.A * (1.0 - 2.0 * arr[..., k]) + 2.0 / spec.kappa * (-sq[..., k] + sq[..., (k + 1) % 3] + sq[..., (k + 2) % 3])
    else:
        coeffs = spec.dual[:, 2 + i]
        result = arr @ coeffs[:3] + (arr * arr) @ coeffs[3:]
    return float(result) if np.ndim(result) == 0 else result


# endregion

# region 重构


def reconstruct_local(f: PlaneFunc, tri: Triangle, spec: LocalOperatorSpec, rules: Rules) -> LocalReconstruction:
    """sum I_j(f) phi_j + sum L_j(f) psi_j（经典格式只有第一项）"""
    coeffs = spec.dual @ spec_functionals(f, tri, spec, rules.edge)
    return LocalReconstruction(tri, coeffs[:3], coeffs[3:])


def edge_samples(f: PlaneFunc, mesh: Mesh, rule: Rule1D) -> NDArray[np.float64]:
    """(E, K) 每条全局边上的 f 值，全局方向 t = -1 在编号较小的顶点"""
    lo = mesh.vertices[mesh.edges[:, 0]]
    hi = mesh.vertices[mesh.edges[:, 1]]
    t = rule.nodes[None, :, None]
    pts = (1.0 - t) / 2 * lo[:, None, :] + (1.0 + t) / 2 * hi[:, None, :]
    values = np.broadcast_to(np.asarray(f(pts[..., 0], pts[..., 1]), dtype=float), pts.shape[:2])
    if not np.all(np.isfinite(values)):
        raise NonFiniteValueException("被积函数在网格边的节点处取到非有限值")
    return values


def mesh_functionals(samples: NDArray[np.float64], mesh: Mesh, spec: LocalOperatorSpec, rule: Rule1D) -> NDArray[np.float64]:
    """(T, 6) 每个三角形的泛函值

    偶对称时每条边只算一次、两侧三角形共用；否则按局部方向翻转节点后逐三角形计算。
    """
    weights = spec.edge_weights(rule)  # (F, K)
    n_f = len(weights)
    values = np.zeros((mesh.n_triangles, 6))
    if spec.symmetric:
        per_edge = samples @ weights.T  # (E, F)
        for f_idx in range(n_f):
            values[:, 3 * f_idx : 3 * f_idx + 3] = per_edge[mesh.triangle_edges, f_idx]
        return values
    local = samples[mesh.triangle_edges]  # (T, 3, K)
    local = np.where(mesh.edge_flipped[..., None], local[..., ::-1], local)
    per_local = local @ weights.T  # (T, 3, F)
    for f_idx in range(n_f):
        values[:, 3 * f_idx : 3 * f_idx + 3] = per_local[..., f_idx]
    return values


def reconstruct_global(
    f: PlaneFunc,
    mesh: Mesh,
    spec: LocalOperatorSpec,
    rules: Rules,
    samples: NDArray[np.float64] | None = None,
) -> GlobalReconstruction:
    """逐三角形重构

    Args:
        samples: 可选的 edge_samples(f, mesh, rules.edge) 结果，多个算子共用同一网格时避免重复求值
    """
    if samples is None:
        samples = edge_samples(f, mesh, rules.edge)
    values = mesh_functionals(samples, mesh, spec, rules.edge)
    coeffs = values @ spec.dual.T
    coeffs.setflags(write=False)
    return GlobalReconstruction(mesh, coeffs, spec.label)


# endregion

# region 可解性


def functional_matrix(tri: Triangle, spec: LocalOperatorSpec, rules: Rules) -> NDArray[np.float64]:
    """在三角形上用求积直接装配 (F, 6) 的泛函-单项式矩阵"""
    columns = []
    for k in range(6):
        power = 1 + k // 3
        idx = k % 3

        def monomial(x, y, idx=idx, power=power):
            return tri.barycentric_xy(x, y)[idx] ** power

        columns.append(spec_functionals(monomial, tri, spec, rules.edge)[: spec.n_functionals])
    return np.stack(columns, axis=1)


def unisolvency_certificate(tri: Triangle, spec: LocalOperatorSpec, rules: Rules) -> float:
    """行缩放后 6x6 泛函矩阵的 |det|，大于 1e-10 时可解"""
    if spec.is_classical:
        raise SpecException("经典格式的试探空间为 P1，无需 6x6 可解性证书")
    matrix = functional_matrix(tri, spec, rules)
    scale = np.max(np.abs(matrix), axis=1, keepdims=True)
    if np.any(scale == 0.0):
        return 0.0
    det = abs(float(np.linalg.det(matrix / scale)))
    if det <= CERTIFICATE_TOL:
        logger.warning(f"{spec.label}: 行缩放后的行列式 {det:.3g} 过小")
    return det


def is_unisolvent(tri: Triangle, spec: LocalOperatorSpec, rules: Rules) -> bool:
    return unisolvency_certificate(tri, spec, rules) > CERTIFICATE_TOL


def block_structure(spec: LocalOperatorSpec) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """偶对称算子的两个对角块：I 作用于 lambda_i 为 ADJACENCY/2，L 作用于 lambda_i^2 为 kappa/4 * ADJACENCY"""
    matrix = spec.functional_matrix
    return matrix[:3, :3], matrix[3:, 3:]


# endregion
