from dataclasses import dataclass, field
from typing import TYPE_CHECKING, ClassVar, Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ..exception import DomainException
from .base import EdgeDensity, check_t

if TYPE_CHECKING:
    from ..config import HistoConfig


@dataclass(frozen=True, eq=False)
class LimitBetaDensity(EdgeDensity):
    """sigma -> inf 时两族密度的 beta 型极限

    第一族：(4mu-3)/2 * (t^2)^(2mu-2)
    第二族：(2mu-1)/2 * (t^2)^(mu-1)
    mu = 1 时两者都是均匀密度 1/2。
    """

    kind: ClassVar[str] = "limit"

    mu: float
    family: Literal[1, 2] = 1
    exponent: float = field(init=False)
    """t^2 的幂次 e"""
    constant: float = field(init=False)
    """2e + 1，密度为 constant/2 * (t^2)^e"""

    def __post_init__(self):
        if not self.mu >= 1.0 or not np.isfinite(self.mu):
            raise DomainException(f"形状参数 mu 必须 >= 1，收到 {self.mu}")
        if self.family not in (1, 2):
            raise DomainException(f"极限密度的族编号必须为 1 或 2，收到 {self.family}")
        exponent = 2 * self.mu - 2 if self.family == 1 else self.mu - 1
        object.__setattr__(self, "exponent", exponent)
        object.__setattr__(self, "constant", 2 * exponent + 1)

    @classmethod
    def uniform(cls) -> "LimitBetaDensity":
        """[-1,1] 上的均匀密度 1/2"""
        return cls(mu=1.0, family=1)

    @classmethod
    def from_config(cls, config: "HistoConfig") -> "LimitBetaDensity":
        family = 2 if config.family == "2" else 1
        return cls(mu=config.mu, family=family)

    @property
    def is_even(self) -> bool:
        return True

    def pdf(self, t: ArrayLike) -> NDArray[np.float64]:
        t = check_t(t)
        return self.constant / 2 * np.power(t * t, self.exponent)

    def moment(self, m: int) -> float:
        if m < 0:
            raise DomainException(f"矩的阶数必须非负，收到 {m}")
        if m % 2:
            return 0.0
        return self.constant / (m + self.constant)
