class HistoException(Exception):
    """异常基类"""

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class DomainException(HistoException, ValueError):
    """参数超出定义域异常"""

    def __init__(self, message: str | None = None):
        super().__init__(message or "参数超出定义域")


class DegenerateTriangleException(DomainException):
    """退化三角形异常"""

    def __init__(self, message: str | None = None):
        super().__init__(message or "三角形退化（面积为 0）")


class DegenerateDensityException(DomainException):
    """退化密度异常：质量不为 1、出现负值、方差为 0 或 Gram 矩阵奇异"""

    def __init__(self, message: str | None = None):
        super().__init__(message or "边密度退化")


class NonFiniteValueException(HistoException):
    """积分节点处出现非有限值异常"""

    def __init__(self, message: str | None = None):
        super().__init__(message or "被积函数在积分节点处取到非有限值")


class PointLocationException(HistoException):
    """点定位失败异常"""

    def __init__(self, message: str | None = None):
        super().__init__(message or "查询点不在网格区域内")


class ConvergenceException(HistoException):
    """迭代未收敛"""

    def __init__(self, message: str | None = None):
        super().__init__(message or "迭代未在最大次数内收敛")


class SpecException(HistoException):
    """重构算子配置异常"""

    pass


class DensityFileException(HistoException):
    """密度表文件读取异常"""

    def __init__(self, message: str | None = None):
        super().__init__(message or "密度表文件无法解析")


class TuningException(HistoException):
    """网格搜索中某个参数对重构失败"""

    def __init__(self, mu: float, sigma: float, cause: Exception):
        super().__init__(f"参数 (mu={mu}, sigma={sigma}) 处重构失败: {cause}")
        self.mu = mu
        self.sigma = sigma
        self.cause = cause


class ConfigException(HistoException):
    """配置文件或命令行参数异常"""

    def __init__(self, message: str | None = None):
        super().__init__(message or "配置无效")
