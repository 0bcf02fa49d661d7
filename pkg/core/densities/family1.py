from dataclasses import dataclass, field
from typing import TYPE_CHECKING, ClassVar

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ..exception import DomainException
from ..geometry import Triangle, h_from_barycentric
from ..special import modified_incomplete_gamma
from .base import EdgeDensity, check_sigma_mu, check_t
from .limit import LimitBetaDensity

if TYPE_CHECKING:
    from ..config import HistoConfig


@dataclass(frozen=True, eq=False)
class Family1Density(EdgeDensity):
    """第一族广义截断正态边密度

    k(t) = mu / gamma_mod((4mu-3)/(2mu), z) * (t^2)^(2mu-2) * exp(-(t^2/sigma^2)^mu / 2)，
    其中 z = 1 / (2 sigma^(2mu))。mu = 1 时即 [-1,1] 上的双截断正态分布。
    """

    kind: ClassVar[str] = "1"

    sigma: float
    mu: float
    normalization: float = field(init=False)
    """a_{sigma,mu}"""
    t2: float = field(init=False)
    t4: float = field(init=False)
    _z: float = field(init=False, repr=False)
    _gamma0: float = field(init=False, repr=False)

    def __post_init__(self):
        check_sigma_mu(self.sigma, self.mu)
        if not np.isfinite(self.sigma):
            raise DomainException("sigma = inf 请使用 LimitBetaDensity")
        z = 0.5 / self.sigma ** (2 * self.mu)
        gamma0 = modified_incomplete_gamma((4 * self.mu - 3) / (2 * self.mu), z)
        object.__setattr__(self, "_z", z)
        object.__setattr__(self, "_gamma0", gamma0)
        object.__setattr__(self, "normalization", self.mu / gamma0)
        object.__setattr__(self, "t2", self._even_moment(1))
        object.__setattr__(self, "t4", self._even_moment(2))

    @classmethod
    def from_config(cls, config: "HistoConfig") -> "Family1Density | LimitBetaDensity":
        if not np.isfinite(config.sigma):
            return LimitBetaDensity(mu=config.mu, family=1)
        return cls(sigma=config.sigma, mu=config.mu)

    @property
    def is_even(self) -> bool:
        return True

    def _profile(self, t2: NDArray[np.float64]) -> NDArray[np.float64]:
        return np.power(t2, 2 * self.mu - 2) * np.exp(-0.5 * np.power(t2 / self.sigma**2, self.mu))

    def pdf(self, t: ArrayLike) -> NDArray[np.float64]:
        t = check_t(t)
        return self.normalization * self._profile(t * t)

    def _even_moment(self, k: int) -> float:
        s = (2 * k + 4 * self.mu - 3) / (2 * self.mu)
        return modified_incomplete_gamma(s, self._z) / self._gamma0

    def moment(self, m: int) -> float:
        if m < 0:
            raise DomainException(f"矩的阶数必须非负，收到 {m}")
        if m % 2:
            return 0.0
        if m == 0:
            return 1.0
        return self._even_moment(m // 2)

    def bivariate(self, tri: Triangle, x: ArrayLike, y: ArrayLike) -> NDArray[np.float64]:
        """二元权函数 K(x) = a (H^2)^(mu-1) exp(-(H/sigma^2)^mu / 2)

        仅作求值用；H < 0 且 mu 非整数时结果无定义（返回 nan）。
        """
        h = h_from_barycentric(tri.barycentric_xy(x, y))
        return self.normalization * np.power(h * h, self.mu - 1) * np.exp(-0.5 * np.power(h / self.sigma**2, self.mu))


def family1_pdf(sigma: float, mu: float, t: ArrayLike) -> NDArray[np.float64] | float:
    """第一族密度值，标量输入返回 float"""
    values = Family1Density(sigma, mu).pdf(t)
    return float(values) if np.ndim(values) == 0 else values


def family1_moment(sigma: float, mu: float, m: int) -> float:
    """第一族 m 阶矩：奇数阶为 0，m = 2k 时为 gamma_mod 之比"""
    return Family1Density(sigma, mu).moment(m)
