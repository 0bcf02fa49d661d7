"""边密度基类定义"""

from abc import ABC, abstractmethod
from typing import TYPE_CHECKING, ClassVar

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ..exception import DomainException, SpecException
from ..quadrature import Rule1D

if TYPE_CHECKING:
    from ..config import HistoConfig


def check_t(t: ArrayLike) -> NDArray[np.float64]:
    """检查边参数位于 [-1, 1]"""
    arr = np.asarray(t, dtype=float)
    if np.any(np.abs(arr) > 1.0) or not np.all(np.isfinite(arr)):
        raise DomainException("边参数 t 必须位于 [-1, 1]")
    return arr


def check_sigma_mu(sigma: float, mu: float) -> None:
    if not sigma > 0.0:
        raise DomainException(f"尺度参数 sigma 必须为正，收到 {sigma}")
    if not mu >= 1.0 or not np.isfinite(mu):
        raise DomainException(f"形状参数 mu 必须 >= 1，收到 {mu}")


class EdgeDensity(ABC):
    """[-1,1] 上所有边概率密度的抽象基类

    子类必须实现：
    - kind: 注册名（命令行 --family 的取值）
    - pdf / moment / is_even
    """

    _registry: ClassVar[dict[str, type["EdgeDensity"]]] = {}
    """ 存储所有已注册的密度类 """

    kind: ClassVar[str]
    """ 注册名 """

    def __init_subclass__(cls, **kwargs):
        """自动注册子类到 _registry"""
        super().__init_subclass__(**kwargs)
        if ABC not in cls.__bases__ and "kind" in cls.__dict__:  # 跳过抽象类
            EdgeDensity._registry[cls.kind] = cls

    @classmethod
    def get_all_subclass(cls) -> dict[str, type["EdgeDensity"]]:
        """获取所有已注册的密度类"""
        return cls._registry

    @classmethod
    def by_kind(cls, kind: str) -> type["EdgeDensity"]:
        try:
            return cls._registry[kind]
        except KeyError:
            raise SpecException(f"未知的密度族: {kind}，可选 {sorted(cls._registry)}") from None

    @classmethod
    @abstractmethod
    def from_config(cls, config: "HistoConfig") -> "EdgeDensity":
        """由配置构造"""

    @abstractmethod
    def pdf(self, t: ArrayLike) -> NDArray[np.float64]:
        """密度值"""

    @abstractmethod
    def moment(self, m: int) -> float:
        """m 阶矩 int t^m w(t) dt"""

    @property
    @abstractmethod
    def is_even(self) -> bool:
        """密度是否为偶函数"""

    @property
    def second_moment(self) -> float:
        return self.moment(2)

    def moments(self, upto: int) -> NDArray[np.float64]:
        """0..upto 阶矩"""
        return np.array([self.moment(m) for m in range(upto + 1)])

    def weights(self, rule: Rule1D) -> NDArray[np.float64]:
        """求积权重与密度值之积 w_i * w(t_i)"""
        return rule.weights * self.pdf(rule.nodes)

    def quadrature_moment(self, m: int, rule: Rule1D) -> float:
        """数值求积得到的 m 阶矩"""
        return float(self.weights(rule) @ rule.nodes**m)

    def mass(self, rule: Rule1D) -> float:
        return float(np.sum(self.weights(rule)))
