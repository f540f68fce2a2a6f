import numpy as np
import pytest

import fca


def kaczmarz_example():
    a = np.array([[1.0], [1.0]])
    return a, fca.LlsInstance(a, np.array([1.0, 0.0]))


def test_kaczmarz_example_shift():
    a, inst = kaczmarz_example()
    q = fca.build_kaczmarz(a)
    assert q(inst.b, np.zeros(1))[0] == 0.0
    d = fca.compute_delta(q, inst)
    assert abs(d["delta"][0] + 0.5) <= 1e-12
    assert inst.x_ls[0] == pytest.approx(0.5)


@pytest.mark.parametrize("method", ["kaczmarz", "cimmino", "landweber"])
def test_operators_pass_certification(method):
    rng = np.random.default_rng(5)
    a = rng.uniform(-1, 1, size=(6, 9))
    if method == "kaczmarz":
        q = fca.build_kaczmarz(a)
    elif method == "cimmino":
        q = fca.build_cimmino(a)
    else:
        q = fca.build_landweber(a).terminal
    rep = fca.validate_properties(q, a, samples=16)
    assert rep["passed"]
    assert rep["pr5_norm"] < 1.0
    # T + R A = I, checked independently in NumPy.
    np.testing.assert_allclose(q.t + q.r @ a, np.eye(9), atol=1e-12)


def test_landweber_bound_is_enforced():
    a = np.array([[1.0, 2.0], [0.0, 1.0]])
    with pytest.raises(fca.ConstructionError, match="2/rho"):
        fca.build_landweber(a, omegas=[10.0])
    with pytest.raises(fca.Error):
        fca.build_kaczmarz(np.array([[0.0, 0.0], [1.0, 1.0]]))


def test_box_constrained_run_converges_into_the_box():
    rng = np.random.default_rng(6)
    a = rng.uniform(-1, 1, size=(5, 8))
    truth = rng.uniform(0.3, 0.7, size=8)
    inst = fca.LlsInstance(a, a @ truth)
    boxes = fca.BoxSchedule([fca.Box.uniform(8, -1, 2)], fca.Box.uniform(8, 0, 1))
    assert fca.verify_nesting(boxes)["passed"]
    q = fca.build_kaczmarz(a)
    tr = fca.run_fca(q, inst, boxes=boxes, stride=1, reference=truth)
    assert tr.status == "converged"
    assert boxes.terminal.contains(tr.x)
    assert np.linalg.norm(a @ tr.x - inst.b) <= 1e-6 * (1 + np.linalg.norm(inst.b))
    assert np.all(np.diff(tr.fejer_distance) <= 1e-12 * (1 + tr.fejer_distance[0]))
    assert fca.fejer_monitor(tr, q, inst, boxes, truth)["passed"]
    assert tr.csv().startswith("k,residual,step_norm")


def test_phantom_and_adaptive_schedule():
    inst, truth, pixels = fca.generate_phantom(grid=6, particles=4, seed=3)
    assert inst.a.shape == (2 * 6 + 2 * 11, 36)
    assert sorted(np.flatnonzero(truth).tolist()) == pixels
    np.testing.assert_array_equal(inst.a @ truth, inst.b)

    q = fca.build_landweber(inst.a)
    fixed = fca.fixed_box_schedule(36)
    probe = fca.run_fca(q, inst, boxes=fixed, max_iter=201, stride=1)
    schedule, guards, probes = fca.adaptive_box_schedule(probe, truth=truth)
    assert len(probes) == 3
    assert fca.verify_nesting(schedule)["passed"]
    assert schedule.terminal.contains(truth)
    assert fca.BoxSchedule.from_json(schedule.to_json()).terminal == schedule.terminal

    run = fca.run_fca(q, inst, boxes=schedule)
    assert run.status == "converged"
    assert fca.ghost_count(run.x, truth) <= fca.ghost_count(probe.x, truth) + 36


def test_shape_errors_surface_as_python_exceptions():
    with pytest.raises(fca.DimensionError):
        fca.LlsInstance(np.eye(3), np.ones(2))
    with pytest.raises(TypeError):
        fca.build_kaczmarz(np.ones(3))


def test_matrix_market_round_trip(tmp_path):
    a = np.arange(6.0).reshape(2, 3) + 0.1
    fca.write_matrix_market(tmp_path / "a.mtx", a, fca.MatrixFormat.coordinate)
    np.testing.assert_array_equal(fca.read_matrix_market(tmp_path / "a.mtx"), a)
    fca.write_vector(tmp_path / "x.txt", a[0])
    np.testing.assert_array_equal(fca.read_vector(tmp_path / "x.txt"), a[0])
    with pytest.raises(fca.IoError):
        fca.read_vector(tmp_path / "missing.txt")
