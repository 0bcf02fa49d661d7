"""测试函数、L1 误差与基准流程

基准流程：对每个 (f, n) 构造第 n 层 Friedrichs-Keller 网格，分别用经典算子与加权算子重构，
计算两者的 L1 误差并按输入顺序写出 CSV。
"""

from collections.abc import Callable, Iterable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from threading import Lock

import numpy as np
from numpy.typing import ArrayLike, NDArray
from tqdm import tqdm

from .constants import L1_CHUNK
from .data import ErrorReport, ErrorRow, GlobalReconstruction
from .exception import NonFiniteValueException, SpecException
from .geometry import Mesh, friedrichs_keller
from .histopolation import LocalOperatorSpec, edge_samples, reconstruct_global
from .quadrature import PlaneFunc, Rules, TriRule
from .utils import LimitedSizeDict, chunks, logger

# region 测试函数


@dataclass(frozen=True, slots=True)
class TestFunction:
    """[-1,1]^2 上的测试函数"""

    __test__ = False

    ident: str
    evaluator: PlaneFunc
    description: str = ""

    def __call__(self, x: ArrayLike, y: ArrayLike) -> NDArray[np.float64]:
        return self.evaluator(np.asarray(x, dtype=float), np.asarray(y, dtype=float))


_TEST_FUNCTIONS: dict[str, TestFunction] = {}


def register(ident: str, description: str = ""):
    """注册测试函数装饰器"""

    def decorator(func: PlaneFunc) -> PlaneFunc:
        _TEST_FUNCTIONS[ident] = TestFunction(ident, func, description)
        return func

    return decorator


@register("f1", "sqrt(x^2 + y^2)")
def f1(x, y):
    return np.sqrt(x * x + y * y)


@register("f2", "exp(-4(x^2+y^2)) sin(pi(x+y))")
def f2(x, y):
    return np.exp(-4 * (x * x + y * y)) * np.sin(np.pi * (x + y))


@register("f3", "sin(2 pi x) sin(2 pi y)")
def f3(x, y):
    return np.sin(2 * np.pi * x) * np.sin(2 * np.pi * y)


@register("f4", "sin(4 pi (x+y))")
def f4(x, y):
    return np.sin(4 * np.pi * (x + y))


@register("f5", "1 / (25(x^2+y^2) + 1)")
def f5(x, y):
    return 1.0 / (25 * (x * x + y * y) + 1)


def _franke(x, y, squared_y: bool):
    # [-1,1]^2 -> [0,1]^2
    u = 9 * (x + 1) / 2
    v = 9 * (y + 1) / 2
    second_y = (v + 1) ** 2 if squared_y else v + 1
    return (
        0.75 * np.exp(-((u - 2) ** 2) / 4 - (v - 2) ** 2 / 4)
        + 0.75 * np.exp(-((u + 1) ** 2) / 49 - second_y / 10)
        + 0.5 * np.exp(-((u - 7) ** 2) / 4 - (v - 3) ** 2 / 4)
        - 0.2 * np.exp(-((u - 4) ** 2) - (v - 7) ** 2)
    )


@register("f6", "Franke 函数（第二项 y 部分不平方）")
def f6(x, y):
    return _franke(x, y, squared_y=False)


@register("f6_classic", "Franke 函数（第二项 y 部分平方）")
def f6_classic(x, y):
    return _franke(x, y, squared_y=True)


def get_test_function(ident: str, franke_classic: bool = False) -> TestFunction:
    """按编号取测试函数，franke_classic 时 f6 取平方形式"""
    if ident == "f6" and franke_classic:
        ident = "f6_classic"
    try:
        return _TEST_FUNCTIONS[ident]
    except KeyError:
        raise SpecException(f"未知的测试函数: {ident}，可选 {sorted(_TEST_FUNCTIONS)}") from None


def all_test_functions() -> dict[str, TestFunction]:
    return dict(_TEST_FUNCTIONS)


# endregion

# region L1 误差


def interior_samples(f: PlaneFunc, mesh: Mesh, tri_rule: TriRule) -> NDArray[np.float64]:
    """(T, K) 每个三角形内积分节点处的 f 值"""
    corners = mesh.corners()
    values = np.empty((mesh.n_triangles, len(tri_rule)))
    for sl in chunks(mesh.n_triangles, L1_CHUNK):
        pts = np.einsum("kc,tcd->tkd", tri_rule.nodes, corners[sl])
        values[sl] = np.broadcast_to(np.asarray(f(pts[..., 0], pts[..., 1]), dtype=float), pts.shape[:2])
    if not np.all(np.isfinite(values)):
        raise NonFiniteValueException("被积函数在三角形积分节点处取到非有限值")
    return values


def l1_error(
    f: PlaneFunc,
    recon: GlobalReconstruction,
    tri_rule: TriRule,
    refine: bool = True,
    values: NDArray[np.float64] | None = None,
) -> float:
    """sum_T int_T |f - recon|

    Args:
        tri_rule: 三角形求积规则，refine 时先做一次中点四分
        values: 可选的 interior_samples(f, mesh, 实际使用的规则)，多个算子共用
    """
    rule = tri_rule.refined() if refine else tri_rule
    mesh = recon.mesh
    if values is None:
        values = interior_samples(f, mesh, rule)
    basis = np.concatenate([rule.nodes, rule.nodes**2], axis=1)  # (K, 6)
    areas = mesh.areas
    total = 0.0
    for sl in chunks(mesh.n_triangles, L1_CHUNK):
        approx = recon.coefficients[sl] @ basis.T
        diff = np.abs(values[sl] - approx)
        if not np.all(np.isfinite(diff)):
            raise NonFiniteValueException("L1 误差的被积函数取到非有限值")
        total += float(areas[sl] @ (diff @ rule.weights))
    return total


@dataclass(frozen=True, slots=True)
class SampledProblem:
    """一个函数在一个网格上的边采样与内部采样，供多个算子共用"""

    function: PlaneFunc
    mesh: Mesh
    edge: NDArray[np.float64]
    interior: NDArray[np.float64]

    @classmethod
    def sample(cls, f: PlaneFunc, mesh: Mesh, rules: Rules) -> "SampledProblem":
        return cls(f, mesh, edge_samples(f, mesh, rules.edge), interior_samples(f, mesh, rules.error_rule))

    def error(self, spec: LocalOperatorSpec, rules: Rules) -> float:
        recon = reconstruct_global(self.function, self.mesh, spec, rules, samples=self.edge)
        return l1_error(self.function, recon, rules.triangle, refine=rules.refine, values=self.interior)


_MESH_CACHE: LimitedSizeDict[int, Mesh] = LimitedSizeDict(max_size=16)
_MESH_LOCK = Lock()


def mesh_for(n: int) -> Mesh:
    """第 n 层 Friedrichs-Keller 网格（带缓存）"""
    with _MESH_LOCK:
        if n not in _MESH_CACHE:
            _MESH_CACHE[n] = friedrichs_keller(n)
        return _MESH_CACHE[n]


# endregion

# region 基准流程

OPERATOR_NAMES = ("classical", "enriched")


def evaluate_cell(
    ident: str,
    n: int,
    enriched: LocalOperatorSpec,
    rules: Rules,
    franke_classic: bool = False,
) -> list[ErrorRow]:
    """单个 (f, n)：经典与加权两行"""
    f = get_test_function(ident, franke_classic)
    mesh = mesh_for(n)
    problem = SampledProblem.sample(f, mesh, rules)
    rows = []
    for name, spec in zip(OPERATOR_NAMES, (LocalOperatorSpec.classical(), enriched)):
        err = problem.error(spec, rules)
        rows.append(ErrorRow(ident, n, mesh.n_triangles, name, err))
    logger.debug(f"{ident}, n={n}: classical={rows[0].l1_error:.6e}, enriched={rows[1].l1_error:.6e}")
    return rows


def ordered_map(
    func: Callable,
    items: Sequence,
    workers: int = 1,
    desc: str = "",
    progress: bool = True,
) -> list:
    """按输入顺序返回结果，workers > 1 时用线程池"""
    bar = tqdm(total=len(items), desc=desc, disable=not progress, leave=False)
    try:
        if workers <= 1:
            results = []
            for item in items:
                results.append(func(item))
                bar.update()
            return results
        with ThreadPoolExecutor(max_workers=workers) as executor:
            results = []
            for result in executor.map(func, items):
                results.append(result)
                bar.update()
            return results
    finally:
        bar.close()


def run_workflow(
    functions: Iterable[str],
    levels: Iterable[int],
    spec_enriched: LocalOperatorSpec,
    emit_path: Path | None,
    rules: Rules | None = None,
    franke_classic: bool = False,
    workers: int = 1,
    progress: bool = True,
) -> ErrorReport:
    """对每个 (f, n) 比较经典与加权算子，结果按 (f, n) 的输入顺序排列"""
    functions, levels = list(functions), list(levels)
    if not functions or not levels:
        raise SpecException("测试函数与网格层数都不能为空")
    rules = rules or Rules.default()
    cells = [(ident, n) for ident in functions for n in levels]
    logger.info(f"开始基准测试: {len(functions)} 个函数 x {len(levels)} 层网格, 加权算子 {spec_enriched.label}")

    def work(cell: tuple[str, int]) -> list[ErrorRow]:
        return evaluate_cell(cell[0], cell[1], spec_enriched, rules, franke_classic)

    results = ordered_map(work, cells, workers=workers, desc="benchmark", progress=progress)
    report = ErrorReport([row for rows in results for row in rows])
    if emit_path is not None:
        report.export(emit_path)
    logger.info(f"基准测试完成: {len(report)} 行")
    return report


# endregion
