import math

import numpy as np
import pytest
from helpers import make_quadratic

from core.bench import (
    OPERATOR_NAMES,
    SampledProblem,
    all_test_functions,
    get_test_function,
    l1_error,
    mesh_for,
    run_workflow,
)
from core.exception import NonFiniteValueException, SpecException
from core.geometry import friedrichs_keller
from core.histopolation import LocalOperatorSpec, reconstruct_global

ENRICHED = LocalOperatorSpec.enriched1(1.0, 2.0)


def franke_reference(x: float, y: float, squared_y: bool = False) -> float:
    u, v = 9 * (x + 1) / 2, 9 * (y + 1) / 2
    second = (v + 1) ** 2 if squared_y else v + 1
    return (
        0.75 * math.exp(-((u - 2) ** 2) / 4 - ((v - 2) ** 2) / 4)
        + 0.75 * math.exp(-((u + 1) ** 2) / 49 - second / 10)
        + 0.5 * math.exp(-((u - 7) ** 2) / 4 - ((v - 3) ** 2) / 4)
        - 0.2 * math.exp(-((u - 4) ** 2) - (v - 7) ** 2)
    )


# region 测试函数


def test_registered_functions():
    assert set(all_test_functions()) == {"f1", "f2", "f3", "f4", "f5", "f6", "f6_classic"}
    with pytest.raises(SpecException):
        get_test_function("f7")


def test_function_spot_values():
    assert float(get_test_function("f1")(0.6, 0.8)) == pytest.approx(1.0)
    assert float(get_test_function("f2")(0.0, 0.0)) == pytest.approx(0.0, abs=1e-15)
    assert float(get_test_function("f2")(0.25, 0.25)) == pytest.approx(math.exp(-0.5), rel=1e-14)
    assert float(get_test_function("f3")(0.25, 0.25)) == pytest.approx(1.0)
    assert float(get_test_function("f4")(1 / 16, 1 / 16)) == pytest.approx(1.0)
    assert float(get_test_function("f5")(0.2, 0.0)) == pytest.approx(0.5)


@pytest.mark.parametrize("point", [(-1.0, -1.0), (0.0, 0.0), (0.3, -0.7), (1.0, 1.0)])
def test_franke_matches_reference(point):
    f6 = get_test_function("f6")
    classic = get_test_function("f6", franke_classic=True)
    assert classic.ident == "f6_classic"
    assert float(f6(*point)) == pytest.approx(franke_reference(*point), abs=1e-12)
    assert float(classic(*point)) == pytest.approx(franke_reference(*point, squared_y=True), abs=1e-12)


def test_franke_variants_differ():
    x, y = np.meshgrid(np.linspace(-1, 1, 11), np.linspace(-1, 1, 11))
    assert np.max(np.abs(get_test_function("f6")(x, y) - get_test_function("f6_classic")(x, y))) > 1e-3


# endregion

# region L1 误差


def test_l1_error_of_zero_function(rules):
    mesh = friedrichs_keller(2)
    zero = lambda x, y: np.zeros_like(x)  # noqa: E731
    recon = reconstruct_global(zero, mesh, ENRICHED, rules)
    assert l1_error(zero, recon, rules.triangle) == 0.0


def test_l1_error_quadratic_is_exact(rng, rules):
    mesh = friedrichs_keller(3)
    f = make_quadratic(rng)
    recon = reconstruct_global(f, mesh, ENRICHED, rules)
    assert l1_error(f, recon, rules.triangle) <= 1e-9
    assert l1_error(f, recon, rules.triangle, refine=False) <= 1e-9


def test_l1_error_of_known_difference(rules):
    # 重构为 0，误差即 int |x| = 2
    mesh = friedrichs_keller(1)
    recon = reconstruct_global(lambda x, y: np.zeros_like(x), mesh, LocalOperatorSpec.classical(), rules)
    assert l1_error(lambda x, y: np.abs(x), recon, rules.triangle) == pytest.approx(2.0, rel=1e-12)


def test_l1_error_non_finite(rules):
    mesh = friedrichs_keller(0)
    recon = reconstruct_global(lambda x, y: np.zeros_like(x), mesh, ENRICHED, rules)
    with pytest.raises(NonFiniteValueException):
        l1_error(lambda x, y: np.full_like(x, np.inf), recon, rules.triangle)


def test_sampled_problem_matches_direct(rules):
    f = get_test_function("f2")
    mesh = mesh_for(4)
    problem = SampledProblem.sample(f, mesh, rules)
    direct = l1_error(f, reconstruct_global(f, mesh, ENRICHED, rules), rules.triangle)
    assert problem.error(ENRICHED, rules) == direct


def test_mesh_cache():
    assert mesh_for(3) is mesh_for(3)
    assert mesh_for(3).n_triangles == 32


def test_enriched_beats_classical_on_f3(rules):
    f = get_test_function("f3")
    problem = SampledProblem.sample(f, mesh_for(20), rules)
    assert problem.error(ENRICHED, rules) < problem.error(LocalOperatorSpec.classical(), rules)


# endregion

# region 基准流程


def test_smallest_run(tmp_path, rules):
    out = tmp_path / "errors.csv"
    report = run_workflow(["f3"], [0], ENRICHED, out, rules=rules, progress=False)
    assert len(report) == 2
    assert [row.operator for row in report] == list(OPERATOR_NAMES)
    assert all(row.triangles == 2 and row.n == 0 for row in report)
    assert all(row.l1_error >= 0 for row in report)
    lines = out.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "function,n,triangles,operator,l1_error"
    assert lines[1].startswith("f3,0,2,classical,")
    assert lines[2].startswith("f3,0,2,enriched,")


def test_rows_follow_input_order(rules):
    report = run_workflow(["f5", "f1"], [2, 1], ENRICHED, None, rules=rules, progress=False)
    assert [(row.function, row.n) for row in report][::2] == [("f5", 2), ("f5", 1), ("f1", 2), ("f1", 1)]
    assert all(row.triangles == 2 * (row.n + 1) ** 2 for row in report)
    assert report.error("f1", 1, "enriched") == report.rows[-1].l1_error
    with pytest.raises(KeyError):
        report.error("f1", 7, "enriched")


def test_rerun_is_byte_identical(tmp_path, rules):
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    run_workflow(["f2", "f6"], [1, 3], ENRICHED, first, rules=rules, progress=False)
    run_workflow(["f2", "f6"], [1, 3], ENRICHED, second, rules=rules, progress=False)
    assert first.read_bytes() == second.read_bytes()


def test_workers_do_not_change_results(rules):
    serial = run_workflow(["f1", "f4", "f6"], [1, 2], ENRICHED, None, rules=rules, workers=1, progress=False)
    parallel = run_workflow(["f1", "f4", "f6"], [1, 2], ENRICHED, None, rules=rules, workers=3, progress=False)
    assert serial.rows == parallel.rows


def test_empty_selection(rules):
    with pytest.raises(SpecException):
        run_workflow([], [1], ENRICHED, None, rules=rules, progress=False)
    with pytest.raises(SpecException):
        run_workflow(["f1"], [], ENRICHED, None, rules=rules, progress=False)


@pytest.mark.slow
def test_default_sweep_ordering_and_decay(tmp_path, rules):
    functions = ["f1", "f2", "f3", "f4", "f5", "f6"]
    levels = [20, 30, 40, 50]
    report = run_workflow(functions, levels, ENRICHED, tmp_path / "errors.csv", rules=rules, workers=2, progress=False)
    assert len(report) == 48
    for f in functions:
        for n in levels:
            assert report.error(f, n, "enriched") < report.error(f, n, "classical")
    for f in functions[1:]:
        for op in OPERATOR_NAMES:
            assert report.error(f, 50, op) < report.error(f, 20, op)


# endregion
