import time

import numpy as np
import pytest

from haloproj.driver import (RunConfig, RunResult, Status, Trace, check_status, halpern_baseline, run,
                             verify_trace)
from haloproj.geometry import halfspace_from_pair
from haloproj.operators import (Identity, contraction_operator, ell2_example, sign_operator, subgradient_projector,
                                translation_operator)
from haloproj.polyproject import certificate_is_valid


def contraction_cfg(**kw):
    return RunConfig([1.0], contraction_operator(0.5, 1), **kw)


def test_config_validation():
    with pytest.raises(ValueError):
        contraction_cfg(max_iter=0)
    with pytest.raises(ValueError):
        contraction_cfg(tol_residual=0.0)
    with pytest.raises(ValueError):
        RunConfig([1.0, 2.0], contraction_operator(0.5, 1))


def test_contraction_iterates():
    cfg = contraction_cfg()
    res = run(cfg)
    assert res.status is Status.CONVERGED
    xs = res.trace.points[:, 0]
    n = np.arange(31)
    np.testing.assert_allclose(xs[:31], 0.75**n, atol=1e-9, rtol=0)
    assert abs(res.final_point[0]) <= 1e-6
    assert res.trace.residual[-1 + len(res.trace)] <= cfg.tol_residual
    assert verify_trace(res, cfg) == []


def test_translation_iterates():
    cfg = RunConfig([0.0], translation_operator(1.0, [1.0]), divergence_radius=50.0)
    res = run(cfg)
    assert res.status is Status.DIVERGING
    xs = res.trace.points[:, 0]
    np.testing.assert_allclose(xs, np.arange(len(xs)) / 2, atol=1e-9, rtol=0)
    assert len(xs) - 1 == 101 and res.final_point[0] > 50
    assert verify_trace(res, cfg) == []


def test_sign_operator_empties_the_polyhedron():
    cfg = RunConfig([0.0], sign_operator())
    res = run(cfg)
    assert res.status is Status.INFEASIBLE
    assert res.stop_index == 2
    assert res.final_point is None
    assert res.trace.points[1, 0] == pytest.approx(0.5, abs=1e-12)
    # C_1 = [1/2, inf), second cut (-inf, 0]
    np.testing.assert_allclose(res.polyhedron.A, [[-1.0], [1.0]])
    np.testing.assert_allclose(res.polyhedron.b, [-0.5, 0.0])
    assert certificate_is_valid(res.polyhedron, res.infeasibility_certificate)
    assert check_status(res, cfg) == []
    assert verify_trace(res, cfg) == []


def test_fixed_point_hit():
    res = run(RunConfig([0.0], contraction_operator(0.5, 1)))
    assert res.status is Status.FIXED_POINT_HIT
    assert len(res.trace) == 1
    np.testing.assert_array_equal(res.final_point, [0.0])


def test_small_initial_residual_is_converged_not_hit():
    res = run(RunConfig([1e-9], contraction_operator(0.5, 1)))
    assert res.status is Status.CONVERGED and res.stop_index == 0


def test_max_iter_reached():
    cfg = RunConfig([1.0], contraction_operator(0.5, 1), max_iter=5)
    res = run(cfg)
    assert res.status is Status.MAX_ITER_REACHED
    assert len(res.trace) == 6
    assert res.final_point[0] == pytest.approx(0.75**5)


def test_trace_entries():
    res = run(contraction_cfg())
    entry = res.trace[3]
    assert entry.n == 3
    assert entry.x_n[0] == pytest.approx(0.75**3)
    assert entry.y_n[0] == pytest.approx(0.5 * 0.75**3)
    assert entry.dist_to_x0 == pytest.approx(1 - 0.75**3)
    assert entry.num_constraints == 3
    assert [e.n for e in res.trace][-1] == len(res.trace) - 1
    with pytest.raises(IndexError):
        res.trace[len(res.trace)]


def test_scalar_only_trace_when_large(monkeypatch):
    import haloproj.driver as driver

    monkeypatch.setattr(driver, "FULL_TRACE_BUDGET", 10)
    cfg = contraction_cfg(max_iter=100)
    res = run(cfg)
    assert not res.trace.store_vectors
    assert res.trace[0].x_n is None
    assert res.trace[-1].x_n[0] == res.final_point[0]
    assert verify_trace(res, cfg) == []


def subgradient_runs():
    T = subgradient_projector(ell2_example(5))
    for x0 in ([1, 1, 0, 0, 0], [1] * 5, [0.5, -0.5, 0.5, -0.5, 0.5]):
        cfg = RunConfig(x0, T)
        yield cfg, run(cfg)


def test_subgradient_runs_respect_inequalities():
    for cfg, res in subgradient_runs():
        assert res.status is Status.CONVERGED
        assert verify_trace(res, cfg) == []
        assert check_status(res, cfg) == []
        assert np.linalg.norm(res.final_point) < np.linalg.norm(cfg.x0)


def test_fixed_point_in_every_cut():
    # containment check for all shipped operators with a known fixed point
    for cfg, res in subgradient_runs():
        A, b = res.polyhedron.A, res.polyhedron.b
        assert np.all(A @ np.zeros(5) <= b + cfg.eps_feas)


def test_verify_trace_flags_corruption():
    cfg = contraction_cfg()
    res = run(cfg)
    xs, ys = res.trace.points.copy(), res.trace.images.copy()
    xs[2], ys[2] = cfg.x0, cfg.operator.evaluate(cfg.x0)
    bad = RunResult(res.status, res.final_point, Trace.from_arrays(xs, ys))
    assert verify_trace(bad, cfg)


def test_verify_trace_single_entry():
    cfg = RunConfig([0.0], contraction_operator(0.5, 1))
    assert verify_trace(run(cfg), cfg) == []


def test_verify_trace_flags_cut_violation():
    # a fabricated second iterate on the wrong side of the first cut
    cfg = contraction_cfg()
    xs = np.array([[1.0], [0.9]])
    ys = 0.5 * xs
    assert halfspace_from_pair(xs[0], ys[0]).slack(xs[1]) > 0
    problems = verify_trace(RunResult(Status.CONVERGED, xs[1], Trace.from_arrays(xs, ys)), cfg)
    assert any("membership" in p for p in problems)


def test_determinism():
    T = subgradient_projector(ell2_example(5))
    a = run(RunConfig([1] * 5, T))
    b = run(RunConfig([1] * 5, T))
    assert len(a.trace) == len(b.trace)
    assert np.array_equal(a.trace.points, b.trace.points)
    assert np.array_equal(a.trace.dist[: len(a.trace)], b.trace.dist[: len(b.trace)])


def test_halpern_contraction_zero():
    # T = 0 gives x_n = x0 / (n + 1), which tends to the fixed point 0
    res = halpern_baseline(RunConfig([1.0], contraction_operator(0.0, 1), max_iter=500))
    xs = res.trace.points[:, 0]
    np.testing.assert_allclose(xs, 1.0 / np.arange(1, len(xs) + 1), rtol=1e-13)
    assert res.status is Status.MAX_ITER_REACHED
    assert np.all(res.trace.num_constraints[: len(res.trace)] == 0)


def test_halpern_identity():
    res = halpern_baseline(RunConfig([3.0, -2.0], Identity()))
    assert res.status is Status.FIXED_POINT_HIT
    np.testing.assert_array_equal(res.final_point, [3.0, -2.0])


def test_halpern_rate_on_contraction():
    # x_{n+1} = x0/(n+2) + (n+1)/(2(n+2)) x_n  decays like 2/n
    res = halpern_baseline(RunConfig([1.0], contraction_operator(0.5, 1), max_iter=2000))
    xs = res.trace.points[:, 0]
    assert res.status is Status.MAX_ITER_REACHED
    assert 1.9 / 2000 < xs[-1] < 2.1 / 2000


@pytest.mark.slow
def test_halpern_and_outer_approximation_share_the_limit():
    cfg = RunConfig([1.0], contraction_operator(0.5, 1), tol_residual=5e-7, max_iter=3_000_000)
    fast = run(cfg)
    start = time.perf_counter()
    slow = halpern_baseline(cfg)
    print(f"iterations to |x| <= 1e-6: outer approximation {fast.stop_index}, "
          f"Halpern {slow.stop_index} ({time.perf_counter() - start:.0f} s)")
    assert fast.status is slow.status is Status.CONVERGED
    assert abs(fast.final_point[0]) <= 1e-6 and abs(slow.final_point[0]) <= 1e-6
    assert fast.stop_index < slow.stop_index
