from typing import Final

# 不完全 gamma 函数
GAMMA_SERIES_EPS: Final[float] = 1e-16
"""级数 / 连分式的相对截断阈值"""
GAMMA_MAX_ITER: Final[int] = 10_000
GAMMA_LIMIT_Z: Final[float] = 1e-8
"""z 不超过该值时 gamma_mod(s, z) 直接取极限 1/s"""
TINY: Final[float] = 1e-300
"""Lentz 算法防止除零的下限"""

# 几何
DEGENERATE_AREA: Final[float] = 1e-14
LOCATE_TOL: Final[float] = 1e-12
"""点定位时重心坐标允许的负向容差"""

# 积分
DEFAULT_EDGE_NODES: Final[int] = 50
"""每个半边上的 Gauss-Legendre 节点数"""
DEFAULT_TRI_NODES: Final[int] = 20
"""Duffy 变换每个方向上的节点数"""
L1_CHUNK: Final[int] = 512
"""L1 误差按三角形分块求值的块大小"""

# 密度
MASS_TOL: Final[float] = 1e-8
VARIANCE_TOL: Final[float] = 1e-12
EVEN_TOL: Final[float] = 1e-12
ORTHO_TOL: Final[float] = 1e-8
"""用户 q 的正交残差接受阈值"""
KAPPA_TOL: Final[float] = 1e-10
"""用户 q 的二阶矩非退化阈值"""

# 可解性证书
CERTIFICATE_TOL: Final[float] = 1e-10

# 基准测试
CSV_HEADER: Final[tuple[str, ...]] = ("function", "n", "triangles", "operator", "l1_error")
SURFACE_HEADER: Final[tuple[str, ...]] = ("mu", "sigma", "error")
