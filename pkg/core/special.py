"""下不完全 gamma 函数与修正不完全 gamma 函数

z < s + 1 时使用级数，其余情况使用上不完全 gamma 的连分式（Lentz 算法）再取补。
修正函数 gamma_mod(s, z) = gamma(s, z) / z^s 在级数区间内直接由

    gamma_mod(s, z) = e^{-z} * sum_{n>=0} z^n / (s (s+1) ... (s+n))

求得，不经过 z^s 的缩放，因此在 z -> 0 时没有抵消误差。
"""

import math

from .constants import GAMMA_LIMIT_Z, GAMMA_MAX_ITER, GAMMA_SERIES_EPS, TINY
from .exception import ConvergenceException, DomainException


def _check_args(s: float, z: float) -> None:
    if not s > 0.0:
        raise DomainException(f"不完全 gamma 函数要求 s > 0，收到 s={s}")
    if not z >= 0.0 or math.isinf(z):
        raise DomainException(f"不完全 gamma 函数要求 z >= 0 且有限，收到 z={z}")


def _series_mod(s: float, z: float) -> float:
    """级数求 gamma(s, z) / z^s"""
    term = 1.0 / s
    total = term
    ap = s
    for _ in range(GAMMA_MAX_ITER):
        ap += 1.0
        term *= z / ap
        total += term
        if abs(term) < abs(total) * GAMMA_SERIES_EPS:
            return total * math.exp(-z)
    raise ConvergenceException(f"级数未收敛: s={s}, z={z}")


def _upper_continued_fraction(s: float, z: float) -> float:
    """连分式求 Gamma(s, z) * e^z / z^s"""
    b = z + 1.0 - s
    c = 1.0 / TINY
    d = 1.0 / b
    h = d
    for i in range(1, GAMMA_MAX_ITER + 1):
        an = -i * (i - s)
        b += 2.0
        d = an * d + b
        if abs(d) < TINY:
            d = TINY
        c = b + an / c
        if abs(c) < TINY:
            c = TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < GAMMA_SERIES_EPS:
            return h
    raise ConvergenceException(f"连分式未收敛: s={s}, z={z}")


def lower_incomplete_gamma(s: float, z: float) -> float:
    """下不完全 gamma 函数 gamma(s, z) = int_0^z t^{s-1} e^{-t} dt

    Args:
        s: 形状参数，s > 0
        z: 积分上限，z >= 0

    Raises:
        DomainException: s <= 0 或 z < 0
    """
    s, z = float(s), float(z)
    _check_args(s, z)
    if z == 0.0:
        return 0.0
    if z < s + 1.0:
        return _series_mod(s, z) * math.exp(s * math.log(z))
    upper = _upper_continued_fraction(s, z) * math.exp(-z + s * math.log(z))
    return math.gamma(s) - upper


def modified_incomplete_gamma(s: float, z: float, limit_z: float = GAMMA_LIMIT_Z) -> float:
    """修正不完全 gamma 函数 gamma(s, z) / z^s

    z <= limit_z 时返回极限值 1/s。

    Args:
        s: 形状参数，s > 0
        z: 积分上限，z >= 0
        limit_z: 切换到极限值的阈值
    """
    s, z = float(s), float(z)
    _check_args(s, z)
    if z <= limit_z:
        return 1.0 / s
    if z < s + 1.0:
        return _series_mod(s, z)
    log_z = math.log(z)
    # Gamma(s)/z^s - Gamma(s, z)/z^s
    complete = math.exp(math.lgamma(s) - s * log_z)
    upper = _upper_continued_fraction(s, z) * math.exp(-z)
    return complete - upper
