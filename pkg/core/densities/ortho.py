"""边密度诱导的二次正交多项式 q

q 与一次多项式在 <f, g>_omega = int f g omega 下正交，三种构造：
- closed_form: 偶对称的解析族，q = t^2 - m2
- canonical:   q = t^2 - b t - a，由前四阶矩解出 a, b，可选归一化
- gram_schmidt: 对 {1, t, t^2} 做 Gram-Schmidt（Hankel 矩阵的 Cholesky 分解）

所有积分都由矩给出：int t^s q omega = sum_k c_k mu_{k+s}。
"""

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as P
from numpy.typing import ArrayLike, NDArray

from ..constants import EVEN_TOL, KAPPA_TOL, ORTHO_TOL, VARIANCE_TOL
from ..data import QValidationReport
from ..exception import DegenerateDensityException, SpecException
from ..utils import logger
from .base import EdgeDensity
from .family1 import Family1Density
from .family2 import Family2Density
from .limit import LimitBetaDensity


def _moment_integral(density: EdgeDensity, coefficients: NDArray[np.float64], shift: int) -> float:
    """int t^shift q(t) omega(t) dt"""
    return float(sum(c * density.moment(k + shift) for k, c in enumerate(coefficients) if c != 0.0))


@dataclass(frozen=True, slots=True)
class OrthoQuadratic:
    """q(t) = c0 + c1 t + c2 t^2 (+ 更高次项)，与一次多项式 omega-正交"""

    coefficients: NDArray[np.float64]
    """升幂系数 (c0, c1, c2, ...)"""
    density: EdgeDensity = field(repr=False)
    norm2: float
    """||q||^2 = int q^2 omega"""
    kappa: float = field(init=False)
    """int t^2 q omega，首一 q 时等于 ||q||^2"""
    residuals: tuple[float, float] = field(init=False)
    """(|int q omega|, |int t q omega|)"""

    def __post_init__(self):
        coeffs = np.trim_zeros(np.asarray(self.coefficients, dtype=float), "b")
        if len(coeffs) < 3:
            raise SpecException(f"q 的次数必须 >= 2，收到系数 {self.coefficients}")
        coeffs.setflags(write=False)
        object.__setattr__(self, "coefficients", coeffs)
        object.__setattr__(self, "kappa", _moment_integral(self.density, coeffs, 2))
        r0 = abs(_moment_integral(self.density, coeffs, 0))
        r1 = abs(_moment_integral(self.density, coeffs, 1))
        object.__setattr__(self, "residuals", (r0, r1))
        if not self.norm2 > 0.0:
            raise DegenerateDensityException(f"||q||^2 = {self.norm2} 必须为正")

    @classmethod
    def from_coefficients(cls, density: EdgeDensity, coefficients: ArrayLike) -> "OrthoQuadratic":
        """||q||^2 由矩求得 sum_{k,l} c_k c_l mu_{k+l}"""
        c = np.asarray(coefficients, dtype=float)
        norm2 = float(sum(ck * cl * density.moment(k + l) for k, ck in enumerate(c) for l, cl in enumerate(c)))
        return cls(c, density, norm2)

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def is_even(self) -> bool:
        odd = np.abs(self.coefficients[1::2])
        return bool(np.all(odd <= EVEN_TOL * np.max(np.abs(self.coefficients))))

    @property
    def m2(self) -> float:
        """密度的二阶矩"""
        return self.density.moment(2)

    def __call__(self, t: ArrayLike) -> NDArray[np.float64]:
        return P.polyval(np.asarray(t, dtype=float), self.coefficients)

    def check_orthogonal(self, tol: float = ORTHO_TOL) -> None:
        r0, r1 = self.residuals
        if r0 > tol or r1 > tol:
            raise SpecException(f"q 与一次多项式不正交: 残差 ({r0:.3g}, {r1:.3g})")
        if abs(self.kappa) <= KAPPA_TOL:
            raise SpecException(f"int t^2 q omega = {self.kappa:.3g} 退化")


def ortho_quadratic_closed_form(density: Family1Density | Family2Density | LimitBetaDensity) -> OrthoQuadratic:
    """解析族的 q(t) = t^2 - m2，||q||^2 = m4 - m2^2"""
    if not isinstance(density, Family1Density | Family2Density | LimitBetaDensity):
        raise SpecException(f"闭式 q 仅适用于解析密度族，收到 {type(density).__name__}")
    m2, m4 = density.moment(2), density.moment(4)
    return OrthoQuadratic(np.array([-m2, 0.0, 1.0]), density, m4 - m2 * m2)


def _check_variance(omega: EdgeDensity) -> tuple[float, float, float, float]:
    mu1, mu2, mu3, mu4 = (omega.moment(m) for m in range(1, 5))
    if mu2 - mu1 * mu1 <= VARIANCE_TOL:
        raise DegenerateDensityException(f"方差退化: mu2 - mu1^2 = {mu2 - mu1 * mu1:.3g}")
    return mu1, mu2, mu3, mu4


def ortho_quadratic_canonical(omega: EdgeDensity, normalize: bool = False) -> OrthoQuadratic:
    """由矩直接写出首一的 q = t^2 - b t - a

    b = (mu1 mu2 - mu3) / (mu1^2 - mu2)，a = mu2 - b mu1，
    nu = mu4 - a mu2 - b mu3 = ||q||^2。normalize=True 时返回 q / sqrt(nu)。
    """
    mu1, mu2, mu3, mu4 = _check_variance(omega)
    b = (mu1 * mu2 - mu3) / (mu1 * mu1 - mu2)
    a = mu2 - b * mu1
    nu = mu4 - a * mu2 - b * mu3
    if not nu > KAPPA_TOL:
        raise DegenerateDensityException(f"nu = {nu:.3g}，q 退化")
    coefficients = np.array([-a, -b, 1.0])
    if normalize:
        return OrthoQuadratic(coefficients / np.sqrt(nu), omega, 1.0)
    return OrthoQuadratic(coefficients, omega, nu)


def ortho_quadratic_gram_schmidt(omega: EdgeDensity) -> OrthoQuadratic:
    """{1, t, t^2} 的 Gram-Schmidt 正交化，返回单位范数的 pi_2

    Hankel 矩阵 H_{ij} = mu_{i+j} = L L^T，inv(L) 的第 3 行即 pi_2 的升幂系数，首项系数为正。
    """
    _check_variance(omega)
    hankel = np.array([[omega.moment(i + j) for j in range(3)] for i in range(3)])
    try:
        chol = np.linalg.cholesky(hankel)
    except np.linalg.LinAlgError:
        raise DegenerateDensityException("Gram 矩阵非正定") from None
    coefficients = np.linalg.inv(chol)[2]
    return OrthoQuadratic(coefficients, omega, 1.0)


def validate_user_q(omega: EdgeDensity, q: ArrayLike) -> QValidationReport:
    """检查用户给出的 q（升幂系数，次数 >= 2）

    接受条件：两个正交残差都不超过 1e-8 且 |int t^2 q omega| > 1e-10。
    """
    coeffs = np.trim_zeros(np.asarray(q, dtype=float), "b")
    degree = len(coeffs) - 1
    r0 = abs(_moment_integral(omega, coeffs, 0))
    r1 = abs(_moment_integral(omega, coeffs, 1))
    kappa = _moment_integral(omega, coeffs, 2)
    reasons = []
    if degree < 2:
        reasons.append(f"次数 {degree} < 2")
    if r0 > ORTHO_TOL:
        reasons.append(f"int q omega = {r0:.3g}")
    if r1 > ORTHO_TOL:
        reasons.append(f"int t q omega = {r1:.3g}")
    if abs(kappa) <= KAPPA_TOL:
        reasons.append(f"int t^2 q omega = {kappa:.3g}")
    report = QValidationReport(
        residual_constant=r0,
        residual_linear=r1,
        kappa=kappa,
        degree=degree,
        accepted=not reasons,
        reason="; ".join(reasons),
    )
    if not report.accepted:
        logger.debug(f"用户 q 未通过检查: {report.reason}")
    return report
