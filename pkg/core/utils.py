import csv
import logging
from collections import OrderedDict
from collections.abc import Iterable, Iterator, Sequence
from pathlib import Path
from typing import TypeVar

logger = logging.getLogger("histopolation")

K = TypeVar("K")
V = TypeVar("V")


class LimitedSizeDict(OrderedDict[K, V]):
    """
    定长字典
    """

    def __init__(self, *args, max_size=20, **kwargs):
        self.max_size = max_size
        super().__init__(*args, **kwargs)

    def __setitem__(self, key: K, value: V):
        super().__setitem__(key, value)
        if len(self) > self.max_size:
            self.popitem(last=False)  # 移除最早添加的项


def fmt_float(value: float) -> str:
    """15 位有效数字"""
    return f"{value:.15g}"


def chunks(total: int, size: int) -> Iterator[slice]:
    """按块切分 [0, total)

    Args:
        total: 元素总数
        size: 块大小
    """
    for start in range(0, total, size):
        yield slice(start, min(start + size, total))


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[object]]) -> Path:
    """写出 CSV，浮点数统一按 15 位有效数字格式化

    Args:
        path: 输出路径，父目录不存在时自动创建
        header: 表头
        rows: 数据行

    Returns:
        Path: 输出路径
    """
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fp:
        writer = csv.writer(fp, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow(fmt_float(v) if isinstance(v, float) else v for v in row)
    logger.info(f"已写出 {path}")
    return path
