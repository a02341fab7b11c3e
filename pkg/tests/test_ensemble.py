import numpy as np
import pytest

import spinchain.ensemble as ensemble_mod
from spinchain import (
    ChainSpec,
    NoiseModel,
    SweepConfig,
    derive_seed,
    run_point,
    run_realization,
    run_sweep,
)


BASE = ChainSpec(n_sites=15)
FAST = dict(n_disorder=3, t_final=4.0, n_samples=41, fit_window=(1.0, 4.0))


def test_derive_seed_is_stable_and_value_sensitive():
    # frozen value: a change here breaks reproducibility of every archived run
    assert derive_seed(0, "disorder", 0.5, 1.0, 0.0, 0) == 17720443591534692472
    assert derive_seed(1, "x") != derive_seed(2, "x")
    assert derive_seed(1, "x") != derive_seed(1, "y")
    assert derive_seed(1, 2.0) != derive_seed(1, 2)  # floats and ints hash apart
    with pytest.raises(TypeError):
        derive_seed(None)


def test_single_point_sweep_equals_run_point():
    cfg = SweepConfig(base=BASE, points=((0.5, 1.0, 0.0),), master_seed=3, **FAST)
    sweep = run_sweep(cfg)
    point = run_point(BASE, 0.5, 1.0, 0.0, master_seed=3, **FAST)
    assert np.array_equal(sweep.points[0].mean_frames, point.mean_frames)
    assert np.array_equal(sweep.points[0].msd.values, point.msd.values)
    assert sweep.points[0].fit == point.fit


def test_grid_order_does_not_change_results():
    pts = ((0.0, 1.0, 0.0), (0.5, 0.0, 1.0))
    a = run_sweep(SweepConfig(base=BASE, points=pts, master_seed=7, **FAST))
    b = run_sweep(SweepConfig(base=BASE, points=pts[::-1], master_seed=7, **FAST))
    for pa in a.points:
        pb = next(
            p for p in b.points
            if (p.delta, p.gamma, p.big_gamma) == (pa.delta, pa.gamma, pa.big_gamma)
        )
        assert np.array_equal(pa.mean_frames, pb.mean_frames)
        assert np.array_equal(pa.msd.values, pb.msd.values)


def test_sweep_is_deterministic():
    cfg = SweepConfig(base=BASE, points=((1.0, 0.0, 0.5),), master_seed=11, **FAST)
    a = run_sweep(cfg)
    b = run_sweep(cfg)
    assert np.array_equal(a.points[0].mean_frames, b.points[0].mean_frames)


def test_exact_unitary_path_matches_rk4(monkeypatch):
    spec = ChainSpec(n_sites=31, delta=1.0)
    samples = np.linspace(0, 5.0, 21)
    _, fast, _ = run_realization(spec, NoiseModel.none(), 5, 5.0, None, samples,
                                 use_exact_unitary=True)
    _, rk4, _ = run_realization(spec, NoiseModel.none(), 5, 5.0, 5e-4, samples,
                                use_exact_unitary=False)
    assert np.abs(fast - rk4).max() < 1e-8


def test_failure_policy_marks_point_invalid(monkeypatch):
    real = ensemble_mod.run_realization

    def flaky(spec, model, disorder_seed, *args, **kwargs):
        if disorder_seed % 3 == 0:  # fails well over 10% of realizations
            raise RuntimeError("synthetic failure")
        return real(spec, model, disorder_seed, *args, **kwargs)

    monkeypatch.setattr(ensemble_mod, "run_realization", flaky)
    pt = run_point(BASE, 0.5, 1.0, 0.0, n_disorder=8, t_final=4.0,
                   n_samples=41, fit_window=(1.0, 4.0), master_seed=0)
    assert pt.n_failed > 0
    assert not pt.valid


def test_all_failures_raise():
    with pytest.raises(RuntimeError, match="every realization failed"):
        # hopping trajectories cannot run with both rates zero and n_traj>0 is
        # fine; instead force failure through an impossible fit window via a
        # failing realization: use a monkeypatch-free path with bad dt
        run_point(BASE, 20.0, 5.0, 0.0, n_disorder=2, t_final=4.0, dt=0.5,
                  n_samples=41, master_seed=0)


def test_boundary_guard_flags_and_warns():
    # tiny chain, ballistic: the wavefront reaches the walls well before gt=4
    with pytest.warns(UserWarning, match="boundary mass"):
        pt = run_point(ChainSpec(n_sites=9), 0.0, 1.0, 0.0, n_disorder=2,
                       t_final=4.0, n_samples=41, fit_window=(1.0, 4.0),
                       master_seed=0)
    assert pt.n_boundary_flagged == 2


def test_trajectory_batches_are_reproducible_and_normalized():
    kwargs = dict(n_disorder=2, n_trajectories=4, t_final=2.0, n_samples=21,
                  fit_window=(0.5, 2.0), master_seed=5)
    a = run_point(BASE, 0.5, 1.0, 0.0, **kwargs)
    b = run_point(BASE, 0.5, 1.0, 0.0, **kwargs)
    assert np.array_equal(a.mean_frames, b.mean_frames)
    assert np.abs(a.mean_frames.sum(axis=1) - 1.0).max() < 1e-6
    c = run_point(BASE, 0.5, 0.0, 1.0, **kwargs)  # hopping family
    assert np.abs(c.mean_frames.sum(axis=1) - 1.0).max() < 1e-6


def test_trajectory_mode_rejects_combined_noise():
    with pytest.raises(ValueError, match="one noise channel"):
        SweepConfig(base=BASE, points=((0.0, 1.0, 1.0),), n_trajectories=2)


def test_workers_do_not_change_results():
    kwargs = dict(n_disorder=4, t_final=3.0, n_samples=31, fit_window=(1.0, 3.0),
                  master_seed=2)
    a = run_point(BASE, 0.5, 0.8, 0.0, workers=1, **kwargs)
    b = run_point(BASE, 0.5, 0.8, 0.0, workers=2, **kwargs)
    assert np.array_equal(a.mean_frames, b.mean_frames)
    assert a.fit == b.fit


def test_sweep_config_validation():
    with pytest.raises(ValueError):
        SweepConfig(base=BASE, points=())
    with pytest.raises(ValueError):
        SweepConfig(base=BASE, points=((0, 0, 0),), n_disorder=0)
    with pytest.raises(ValueError):
        SweepConfig(base=BASE, points=((0, 0, 0),), t_final=0.0)
