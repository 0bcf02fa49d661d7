"""命令行入口：经典与加权局部 histopolation 的基准测试（可选先做参数调优）"""

import argparse
import logging
import sys
from collections.abc import Callable, Sequence
from pathlib import Path
from typing import Any

from core.bench import run_workflow
from core.config import FUNCTION_IDS, HistoConfig, load_config
from core.data import ErrorReport, TuningResult
from core.exception import HistoException
from core.histopolation import LocalOperatorSpec
from core.quadrature import Rules
from core.tuning import ParameterGrid, default_validation, grid_search
from core.utils import logger


def _list_of(cast: Callable[[str], Any]) -> Callable[[str], list[Any]]:
    """逗号分隔的列表参数"""

    def parse(text: str) -> list[Any]:
        try:
            return [cast(item.strip()) for item in text.split(",") if item.strip()]
        except ValueError as e:
            raise argparse.ArgumentTypeError(f"无法解析列表 {text!r}: {e}") from None

    return parse


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="histopolation",
        description="在 [-1,1]^2 的 Friedrichs-Keller 网格上比较经典与加权局部 histopolation 的 L1 误差",
    )
    bench = parser.add_argument_group("基准测试")
    bench.add_argument("--functions", type=_list_of(str), help=f"测试函数，逗号分隔，可选 {','.join(FUNCTION_IDS)}")
    bench.add_argument("--levels", type=_list_of(int), help="网格层数 n，逗号分隔")
    bench.add_argument("--family", choices=["1", "2", "general"], help="加权算子的密度族")
    bench.add_argument("--mu", type=float, help="形状参数 mu >= 1")
    bench.add_argument("--sigma", type=float, help="尺度参数 sigma > 0，inf 表示 beta 型极限")
    bench.add_argument("--density-file", help="family 为 general 时的 (t, omega) 样本表")
    bench.add_argument("--franke-classic", action="store_true", default=None, help="f6 使用第二项 y 部分平方的经典 Franke 函数")
    bench.add_argument("--out", help="误差表 CSV 路径")

    tune = parser.add_argument_group("参数调优")
    tune.add_argument("--tune", action="store_true", default=None, help="先网格搜索 (mu, sigma)，再用最优参数跑基准")
    tune.add_argument("--grid-mu", type=_list_of(float), help="mu 候选值，逗号分隔")
    tune.add_argument("--grid-sigma", type=_list_of(float), help="sigma 候选值，逗号分隔")
    tune.add_argument("--tune-functions", type=_list_of(str), help="验证函数，逗号分隔")
    tune.add_argument("--tune-levels", type=_list_of(int), help="验证网格层数，逗号分隔")
    tune.add_argument("--surface-out", help="误差曲面 CSV 路径")

    numeric = parser.add_argument_group("数值")
    numeric.add_argument("--edge-nodes", type=int, help="每个半边上的 Gauss-Legendre 节点数")
    numeric.add_argument("--tri-nodes", type=int, help="三角形 Duffy 规则每个方向的节点数")
    numeric.add_argument("--no-refine", dest="tri_refine", action="store_false", default=None, help="计算误差时不四分三角形")
    numeric.add_argument("--workers", type=int, help="并行线程数")

    misc = parser.add_argument_group("其他")
    misc.add_argument("--config", type=Path, help="覆盖默认值的 JSON 配置文件")
    verbosity = misc.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="输出调试日志")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="只输出警告与错误，不显示进度条")
    return parser


def config_from_args(args: argparse.Namespace) -> HistoConfig:
    """schema 默认值 <- --config 文件 <- 命令行参数"""
    config = load_config(args.config)
    config = config.replace(
        functions=args.functions,
        levels=args.levels,
        family=args.family,
        mu=args.mu,
        sigma=args.sigma,
        density_file=args.density_file,
        franke_classic=args.franke_classic,
        out=args.out,
        tune=args.tune,
        grid_mu=args.grid_mu,
        grid_sigma=args.grid_sigma,
        tune_functions=args.tune_functions,
        tune_levels=args.tune_levels,
        surface_out=args.surface_out,
        edge_nodes=args.edge_nodes,
        tri_nodes=args.tri_nodes,
        tri_refine=args.tri_refine,
        workers=args.workers,
    )
    return config.validate()


class BenchApp:
    def __init__(self, config: HistoConfig, progress: bool = True):
        self.config = config
        self.progress = progress
        self.rules = Rules.default(config.edge_nodes, config.tri_nodes, config.tri_refine)

    # region 核心逻辑

    def tune(self) -> TuningResult:
        """网格搜索，写出误差曲面，并把最优参数写回配置"""
        cfg = self.config
        functions, meshes = default_validation(cfg.tune_functions, cfg.tune_levels, cfg.franke_classic)
        result = grid_search(
            functions,
            meshes,
            ParameterGrid(tuple(cfg.grid_mu), tuple(cfg.grid_sigma)),
            family=int(cfg.family),
            rules=self.rules,
            workers=cfg.workers,
            progress=self.progress,
        )
        result.export_surface(cfg.surface_path)
        self.config = cfg.replace(mu=result.best_mu, sigma=result.best_sigma)
        return result

    def bench(self) -> ErrorReport:
        cfg = self.config
        spec = LocalOperatorSpec.from_config(cfg)
        return run_workflow(
            cfg.functions,
            cfg.levels,
            spec,
            Path(cfg.out),
            rules=self.rules,
            franke_classic=cfg.franke_classic,
            workers=cfg.workers,
            progress=self.progress,
        )

    def run(self) -> int:
        if self.config.tune:
            result = self.tune()
            print(f"最优参数: mu={result.best_mu:g}, sigma={result.best_sigma:g}, E={result.best_total_error:.6e}")
            print(f"误差曲面: {self.config.surface_path}")
        report = self.bench()
        wins = sum(
            report.error(f, n, "enriched") < report.error(f, n, "classical")
            for f in self.config.functions
            for n in self.config.levels
        )
        print(f"误差表: {self.config.out}（{len(report)} 行，加权算子在 {wins}/{len(report) // 2} 个组合中更优）")
        return 0

    # endregion


def setup_logging(verbose: bool, quiet: bool) -> None:
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    logging.basicConfig(level=level, format="%(asctime)s [%(levelname)s] %(message)s", stream=sys.stderr)


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(args.verbose, args.quiet)
    try:
        config = config_from_args(args)
        return BenchApp(config, progress=not args.quiet).run()
    except HistoException as e:
        print(f"错误: {e.message}", file=sys.stderr)
        return 1
    except Exception as e:
        # 未知异常，打印堆栈
        logger.exception("运行过程中发生未知错误")
        print(f"错误: {type(e).__name__}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
