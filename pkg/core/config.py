"""运行配置

默认值全部来自 _conf_schema.json 的 default 字段；--config 指定的 JSON 文件可覆盖其中任意项，
命令行参数再通过 msgspec.structs.replace 覆盖。
"""

import math
from pathlib import Path
from typing import Any, Literal

import msgspec
from msgspec import Struct

from .exception import ConfigException
from .utils import logger

SCHEMA_PATH = Path(__file__).resolve().parent.parent / "_conf_schema.json"

FUNCTION_IDS = ("f1", "f2", "f3", "f4", "f5", "f6")


class HistoConfig(Struct, frozen=True, kw_only=True):
    family: Literal["1", "2", "general"] = "1"
    mu: float = 2.0
    sigma: float = 1.0
    density_file: str = ""
    functions: list[str] = msgspec.field(default_factory=lambda: list(FUNCTION_IDS))
    levels: list[int] = msgspec.field(default_factory=lambda: [20, 30, 40, 50])
    franke_classic: bool = False
    edge_nodes: int = 50
    tri_nodes: int = 20
    tri_refine: bool = True
    tune: bool = False
    grid_mu: list[float] = msgspec.field(default_factory=lambda: [1.0, 2.0, 3.0])
    grid_sigma: list[float] = msgspec.field(default_factory=lambda: [0.5, 1.0, 2.0])
    tune_functions: list[str] = msgspec.field(default_factory=lambda: list(FUNCTION_IDS))
    tune_levels: list[int] = msgspec.field(default_factory=lambda: [10, 20])
    workers: int = 1
    out: str = "errors.csv"
    surface_out: str = ""

    def validate(self) -> "HistoConfig":
        """检查取值范围，返回自身

        Raises:
            ConfigException: 任一项超出范围
        """
        problems = []
        if not self.mu >= 1.0:
            problems.append(f"mu 必须 >= 1，收到 {self.mu}")
        if not self.sigma > 0.0:
            problems.append(f"sigma 必须为正，收到 {self.sigma}")
        if self.family == "general" and not self.density_file:
            problems.append("family 为 general 时必须给出 density_file")
        for name in ("functions", "tune_functions"):
            unknown = [f for f in getattr(self, name) if f not in FUNCTION_IDS]
            if unknown or not getattr(self, name):
                problems.append(f"{name} 必须是 f1 ~ f6 的非空子集，收到 {getattr(self, name)}")
        for name in ("levels", "tune_levels"):
            values = getattr(self, name)
            if not values or any(n < 0 for n in values):
                problems.append(f"{name} 必须是非负整数的非空列表，收到 {values}")
        if self.edge_nodes < 1 or self.tri_nodes < 1:
            problems.append(f"积分节点数必须 >= 1，收到 edge_nodes={self.edge_nodes}, tri_nodes={self.tri_nodes}")
        if self.workers < 1:
            problems.append(f"workers 必须 >= 1，收到 {self.workers}")
        if self.tune:
            if not self.grid_mu or any(not m >= 1.0 for m in self.grid_mu):
                problems.append(f"grid_mu 必须是 >= 1 的非空列表，收到 {self.grid_mu}")
            if not self.grid_sigma or any(not (s > 0.0 and math.isfinite(s)) for s in self.grid_sigma):
                problems.append(f"grid_sigma 必须是有限正数的非空列表，收到 {self.grid_sigma}")
            if self.family == "general":
                problems.append("调优只适用于 family 1 或 2")
        if problems:
            raise ConfigException("；".join(problems))
        return self

    @property
    def surface_path(self) -> Path:
        if self.surface_out:
            return Path(self.surface_out)
        return Path(self.out).with_name("surface.csv")

    def replace(self, **changes: Any) -> "HistoConfig":
        """覆盖非 None 的项"""
        changes = {k: v for k, v in changes.items() if v is not None}
        return msgspec.structs.replace(self, **changes)


def schema_defaults(schema_path: Path = SCHEMA_PATH) -> dict[str, Any]:
    """读取配置 schema 中每一项的 default"""
    try:
        schema = msgspec.json.decode(schema_path.read_bytes())
    except (OSError, msgspec.DecodeError) as e:
        raise ConfigException(f"无法读取配置 schema {schema_path}: {e}") from e
    return {key: item["default"] for key, item in schema.items() if "default" in item}


def load_config(override: Path | None = None, schema_path: Path = SCHEMA_PATH) -> HistoConfig:
    """schema 默认值 + 可选的 JSON 覆盖文件"""
    data = schema_defaults(schema_path)
    if override is not None:
        try:
            extra = msgspec.json.decode(Path(override).read_bytes())
        except (OSError, msgspec.DecodeError) as e:
            raise ConfigException(f"无法读取配置文件 {override}: {e}") from e
        if not isinstance(extra, dict):
            raise ConfigException(f"配置文件 {override} 顶层必须是对象")
        data.update(extra)
    try:
        config = msgspec.convert(data, HistoConfig)
    except msgspec.ValidationError as e:
        raise ConfigException(f"配置项类型错误: {e}") from e
    logger.debug(f"已加载配置: {config}")
    return config
