"""全局参数网格搜索：在候选 (mu, sigma) 上最小化验证函数与网格上的 L1 误差总和"""

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .bench import SampledProblem, get_test_function, mesh_for, ordered_map
from .data import TuningResult
from .exception import DomainException, HistoException, SpecException, TuningException
from .geometry import Mesh
from .histopolation import LocalOperatorSpec
from .quadrature import PlaneFunc, Rules
from .utils import logger


@dataclass(frozen=True, slots=True)
class ParameterGrid:
    """候选参数网格，遍历顺序为先 mu 后 sigma"""

    mu_values: tuple[float, ...]
    sigma_values: tuple[float, ...]

    def __post_init__(self):
        mus = tuple(sorted(float(m) for m in self.mu_values))
        sigmas = tuple(sorted(float(s) for s in self.sigma_values))
        if not mus or not sigmas:
            raise DomainException("参数网格不能为空")
        if any(not m >= 1.0 for m in mus):
            raise DomainException(f"mu 取值必须 >= 1，收到 {mus}")
        if any(not (s > 0.0 and np.isfinite(s)) for s in sigmas):
            raise DomainException(f"sigma 取值必须为有限正数，收到 {sigmas}")
        object.__setattr__(self, "mu_values", mus)
        object.__setattr__(self, "sigma_values", sigmas)

    def __len__(self) -> int:
        return len(self.mu_values) * len(self.sigma_values)

    def pairs(self) -> list[tuple[float, float]]:
        return [(mu, sigma) for mu in self.mu_values for sigma in self.sigma_values]


def _make_spec(family: int, sigma: float, mu: float) -> LocalOperatorSpec:
    if family == 1:
        return LocalOperatorSpec.enriched1(sigma, mu)
    if family == 2:
        return LocalOperatorSpec.enriched2(sigma, mu)
    raise SpecException(f"调优只适用于第 1、2 族，收到 {family}")


def grid_search(
    validation_fns: Sequence[PlaneFunc],
    meshes: Sequence[Mesh],
    grid: ParameterGrid,
    family: int = 1,
    rules: Rules | None = None,
    workers: int = 1,
    progress: bool = False,
) -> TuningResult:
    """E(mu, sigma) = sum_f sum_mesh ||f - pi_{mu,sigma} f||_L1，取最小者

    误差相同时取网格顺序中最早的一个。

    Raises:
        TuningException: 某个参数对重构失败
    """
    if not validation_fns or not meshes:
        raise SpecException("验证函数与网格都不能为空")
    if family not in (1, 2):
        raise SpecException(f"调优只适用于第 1、2 族，收到 {family}")
    rules = rules or Rules.default()
    problems = [SampledProblem.sample(f, mesh, rules) for f in validation_fns for mesh in meshes]
    logger.info(f"开始网格搜索: 第 {family} 族, {len(grid)} 个候选, {len(problems)} 个 (函数, 网格) 组合")

    def total_error(pair: tuple[float, float]) -> float:
        mu, sigma = pair
        try:
            spec = _make_spec(family, sigma, mu)
            return sum(problem.error(spec, rules) for problem in problems)
        except HistoException as e:
            raise TuningException(mu, sigma, e) from e

    pairs = grid.pairs()
    errors = ordered_map(total_error, pairs, workers=workers, desc="tuning", progress=progress)

    best = 0
    for k, err in enumerate(errors):
        logger.debug(f"mu={pairs[k][0]:g}, sigma={pairs[k][1]:g}: E={err:.6e}")
        if err < errors[best]:
            best = k
    best_mu, best_sigma = pairs[best]
    logger.info(f"网格搜索完成: mu*={best_mu:g}, sigma*={best_sigma:g}, E={errors[best]:.6e}")
    surface = [(mu, sigma, err) for (mu, sigma), err in zip(pairs, errors)]
    return TuningResult(best_mu, best_sigma, errors[best], surface, family)


def default_validation(functions: Sequence[str], levels: Sequence[int], franke_classic: bool = False) -> tuple[list[PlaneFunc], list[Mesh]]:
    """由测试函数编号与网格层数构造验证集"""
    return [get_test_function(ident, franke_classic) for ident in functions], [mesh_for(n) for n in levels]
