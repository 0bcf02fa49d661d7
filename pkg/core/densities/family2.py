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
class Family2Density(EdgeDensity):
    """第二族边密度，即二元函数 G 在任一边上的限制

    g(t) = (2mu-1) / gamma_mod(1/2, z) * (t^2)^(mu-1) * exp(-(t^2/sigma^2)^(2mu-1) / 2)，
    其中 z = 1 / (2 sigma^(4mu-2))。mu = 1 时与第一族重合。
    """

    kind: ClassVar[str] = "2"

    sigma: float
    mu: float
    normalization: float = field(init=False)
    s2: float = field(init=False)
    s4: float = field(init=False)
    _z: float = field(init=False, repr=False)
    _gamma0: float = field(init=False, repr=False)

    def __post_init__(self):
        check_sigma_mu(self.sigma, self.mu)
        if not np.isfinite(self.sigma):
            raise DomainException("sigma = inf 请使用 LimitBetaDensity")
        z = 0.5 / self.sigma ** (4 * self.mu - 2)
        gamma0 = modified_incomplete_gamma(0.5, z)
        object.__setattr__(self, "_z", z)
        object.__setattr__(self, "_gamma0", gamma0)
        object.__setattr__(self, "normalization", (2 * self.mu - 1) / gamma0)
        object.__setattr__(self, "s2", self._even_moment(1))
        object.__setattr__(self, "s4", self._even_moment(2))

    @classmethod
    def from_config(cls, config: "HistoConfig") -> "Family2Density | LimitBetaDensity":
        if not np.isfinite(config.sigma):
            return LimitBetaDensity(mu=config.mu, family=2)
        return cls(sigma=config.sigma, mu=config.mu)

    @property
    def is_even(self) -> bool:
        return True

    def pdf(self, t: ArrayLike) -> NDArray[np.float64]:
        t = check_t(t)
        t2 = t * t
        profile = np.power(t2, self.mu - 1) * np.exp(-0.5 * np.power(t2 / self.sigma**2, 2 * self.mu - 1))
        return self.normalization * profile

    def _even_moment(self, k: int) -> float:
        s = (2 * k + 2 * self.mu - 1) / (2 * (2 * self.mu - 1))
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
        """二元函数 G(x) = c H^(mu-1) exp(-(H/sigma^2)^(2mu-1) / 2)

        注意：H 在重心附近为负，mu 非奇数时 G 在三角形内部可能取负值，
        因此 G 一般不是 T 上的权函数，仅其边限制参与算子构造。
        """
        h = h_from_barycentric(tri.barycentric_xy(x, y))
        return self.normalization * np.power(h, self.mu - 1) * np.exp(-0.5 * np.power(h / self.sigma**2, 2 * self.mu - 1))


def family2_pdf(sigma: float, mu: float, t: ArrayLike) -> NDArray[np.float64] | float:
    values = Family2Density(sigma, mu).pdf(t)
    return float(values) if np.ndim(values) == 0 else values


def family2_moment(sigma: float, mu: float, m: int) -> float:
    """第二族 m 阶矩：奇数阶为 0，m = 2k 时为 gamma_mod 之比"""
    return Family2Density(sigma, mu).moment(m)
