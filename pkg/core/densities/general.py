import re
from collections.abc import Callable
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING, ClassVar

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ..constants import EVEN_TOL, MASS_TOL, VARIANCE_TOL
from ..exception import DegenerateDensityException, DensityFileException, DomainException
from ..quadrature import Rule1D, edge_rule
from ..utils import logger
from .base import EdgeDensity, check_t

if TYPE_CHECKING:
    from ..config import HistoConfig

Evaluator = Callable[[NDArray[np.float64]], NDArray[np.float64]]

_CACHED_MOMENTS = 6
_SEPARATOR = re.compile(r"[,;\s]+")


@dataclass(frozen=True, eq=False)
class GeneralDensity(EdgeDensity):
    """[-1,1] 上的一般概率密度 omega

    矩 mu_{m,omega} 在构造时用边规则一次性求出并缓存（0..6 阶）。
    构造时检查：节点处非负、单位质量、方差非退化。
    """

    kind: ClassVar[str] = "general"

    evaluator: Evaluator
    rule: Rule1D = field(default_factory=edge_rule)
    normalize: bool = False
    """质量偏离 1 时是否自动归一化（否则抛出异常）"""
    name: str = "omega"
    scale: float = field(init=False, default=1.0)
    _moments: NDArray[np.float64] = field(init=False, repr=False)
    _even: bool = field(init=False, repr=False)

    def __post_init__(self):
        values = np.asarray(self.evaluator(self.rule.nodes), dtype=float)
        values = np.broadcast_to(values, self.rule.nodes.shape)
        if not np.all(np.isfinite(values)):
            raise DegenerateDensityException(f"密度 {self.name} 在求积节点处取到非有限值")
        if np.any(values < 0.0):
            raise DegenerateDensityException(f"密度 {self.name} 在求积节点处为负")

        mass = float(self.rule.weights @ values)
        if mass <= 0.0:
            raise DegenerateDensityException(f"密度 {self.name} 的质量为 {mass}")
        scale = 1.0
        if abs(mass - 1.0) > MASS_TOL:
            if not self.normalize:
                raise DegenerateDensityException(f"密度 {self.name} 的质量为 {mass:.12g}，不是 1")
            scale = 1.0 / mass
            logger.warning(f"密度 {self.name} 的质量为 {mass:.12g}，已乘以 {scale:.12g} 归一化")
        object.__setattr__(self, "scale", scale)

        weighted = self.rule.weights * values * scale
        powers = self.rule.nodes[None, :] ** np.arange(_CACHED_MOMENTS + 1)[:, None]
        moments = powers @ weighted
        moments.setflags(write=False)
        object.__setattr__(self, "_moments", moments)
        if moments[2] - moments[1] ** 2 <= VARIANCE_TOL:
            raise DegenerateDensityException(f"密度 {self.name} 方差退化: mu2 - mu1^2 = {moments[2] - moments[1] ** 2:.3g}")

        peak = float(np.max(values))
        object.__setattr__(self, "_even", bool(np.max(np.abs(values - values[::-1])) <= EVEN_TOL * peak))
        logger.debug(f"一般密度 {self.name}: mu1={moments[1]:.6g}, mu2={moments[2]:.6g}, 偶函数={self._even}")

    @classmethod
    def from_density(cls, density: EdgeDensity, rule: Rule1D | None = None, name: str | None = None) -> "GeneralDensity":
        """把任意边密度包装为一般密度，矩改由求积得到"""
        return cls(density.pdf, rule=rule or edge_rule(), name=name or type(density).__name__)

    @classmethod
    def uniform(cls, rule: Rule1D | None = None) -> "GeneralDensity":
        return cls(lambda t: np.full_like(t, 0.5), rule=rule or edge_rule(), name="uniform")

    @classmethod
    def from_file(cls, path: Path, rule: Rule1D | None = None) -> "GeneralDensity":
        """从 (t, omega(t)) 样本表读取，线性插值并归一化

        分隔符可为逗号、分号、制表符或空白，`#` 之后为注释。
        """
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as e:
            raise DensityFileException(f"无法读取密度表 {path}: {e}") from e

        rows: list[tuple[float, float]] = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = [p for p in _SEPARATOR.split(line) if p]
            if len(parts) != 2:
                raise DensityFileException(f"{path}:{lineno} 应为两列，收到 {raw!r}")
            try:
                rows.append((float(parts[0]), float(parts[1])))
            except ValueError:
                raise DensityFileException(f"{path}:{lineno} 无法解析数值 {raw!r}") from None

        if len(rows) < 2:
            raise DensityFileException(f"密度表 {path} 至少需要两行样本")
        table = np.array(sorted(rows))
        ts, ws = table[:, 0], table[:, 1]
        if not np.all(np.isfinite(table)):
            raise DensityFileException(f"密度表 {path} 含非有限值")
        if np.any(np.diff(ts) <= 0.0):
            raise DensityFileException(f"密度表 {path} 的 t 值有重复")
        if ts[0] > -1.0 or ts[-1] < 1.0:
            raise DensityFileException(f"密度表 {path} 必须覆盖 [-1, 1]，实际为 [{ts[0]}, {ts[-1]}]")
        if np.any(ws < 0.0):
            raise DensityFileException(f"密度表 {path} 含负的密度值")

        ts.setflags(write=False)
        ws.setflags(write=False)
        density = cls(lambda t: np.interp(t, ts, ws), rule=rule or edge_rule(), normalize=True, name=Path(path).name)
        logger.info(f"已读取密度表 {path}: {len(ts)} 个样本, 归一化因子 {density.scale:.12g}")
        return density

    @classmethod
    def from_config(cls, config: "HistoConfig") -> "GeneralDensity":
        if not config.density_file:
            raise DensityFileException("--family general 需要 --density-file")
        return cls.from_file(Path(config.density_file), rule=edge_rule(config.edge_nodes))

    def with_rule(self, rule: Rule1D) -> "GeneralDensity":
        """用另一条求积规则重新计算矩"""
        return GeneralDensity(self.evaluator, rule=rule, normalize=self.normalize, name=self.name)

    @property
    def is_even(self) -> bool:
        return self._even

    def pdf(self, t: ArrayLike) -> NDArray[np.float64]:
        t = check_t(t)
        return self.scale * np.broadcast_to(np.asarray(self.evaluator(t), dtype=float), t.shape)

    def moment(self, m: int) -> float:
        if m < 0:
            raise DomainException(f"矩的阶数必须非负，收到 {m}")
        if m <= _CACHED_MOMENTS:
            return float(self._moments[m])
        return self.quadrature_moment(m, self.rule)
