import json
import math

import numpy as np
import pytest

from beamsweep import (
    ConfigError,
    EvalSettings,
    RearWall,
    Scatterer,
    Scenario,
    Scene,
    build_scene,
    estimate_ground_truth,
    minimal_sweep_plan,
    naf_error_to_cross_track_m,
    reference_noise_power,
    run_comparison,
    scenario_catalog,
    score_rmse,
    simulate_acquisition,
)


def test_cross_track_conversion():
    assert naf_error_to_cross_track_m(0.017, 18.0) == pytest.approx(
        0.30601474091713676, rel=1e-14
    )
    assert naf_error_to_cross_track_m(0.0, 5.0) == 0.0
    # arguments beyond the unit circle saturate instead of raising
    assert naf_error_to_cross_track_m(2.0, 1.0) == pytest.approx(math.pi / 2)
    assert naf_error_to_cross_track_m(-2.0, 1.0) == pytest.approx(-math.pi / 2)
    with pytest.raises(ConfigError):
        naf_error_to_cross_track_m(0.01, 0.0)


def test_ground_truth_buckets_by_nearest_nominal():
    frames = [[-0.11, 0.09], [-0.09, 0.11], [-0.10]]
    truth, counts = estimate_ground_truth(frames, (-0.1, 0.1))
    assert truth[0] == pytest.approx(np.median([-0.11, -0.09, -0.10]))
    assert truth[1] == pytest.approx(np.median([0.09, 0.11]))
    assert counts == (3, 2)


def test_ground_truth_falls_back_to_nominal():
    truth, counts = estimate_ground_truth([[-0.1], [-0.12]], (-0.1, 0.1))
    assert truth[1] == 0.1
    assert counts == (2, 0)
    empty_truth, empty_counts = estimate_ground_truth([], (-0.2, 0.2))
    assert empty_truth == (-0.2, 0.2)
    assert empty_counts == (0, 0)


def test_score_rmse_hand_example():
    s = score_rmse([[-0.1, 0.12]], [(-0.1, 0.1)])
    assert s.rmse_per_target[0] == pytest.approx(0.0)
    assert s.rmse_per_target[1] == pytest.approx(0.02)
    assert s.pooled_rmse == pytest.approx(np.sqrt(0.02**2 / 2))
    assert s.n_runs == 1
    assert s.n_missed == 0
    assert s.detection_rate == 1.0


def test_score_rmse_counts_empty_runs_as_misses():
    s = score_rmse([[], [-0.1, 0.1]], [(-0.1, 0.1), (-0.1, 0.1)])
    assert s.n_missed == 1
    assert s.detection_rate == 0.5
    assert s.rmse_per_target == (0.0, 0.0)


def test_score_rmse_reuses_nearest_estimate():
    s = score_rmse([[0.05]], [(-0.1, 0.1)])
    assert s.errors_per_target[0] == (pytest.approx(0.15),)
    assert s.errors_per_target[1] == (pytest.approx(-0.05),)


def test_score_rmse_validation():
    with pytest.raises(ConfigError):
        score_rmse([[0.1]], [])
    with pytest.raises(ConfigError):
        score_rmse([[0.1], [0.2]], [(-0.1, 0.1)])
    with pytest.raises(ConfigError):
        score_rmse([[0.1], [0.2]], [(-0.1, 0.1), (-0.1,)])


def test_eval_settings_defaults():
    s = EvalSettings()
    geom = s.geometry()
    assert geom.n_tx == 8 and geom.n_rx == 8
    assert np.allclose(geom.tx_positions.sum(), 0.0)
    w = s.weights()
    assert np.all(w.tx == 1.0) and np.all(w.rx == 1.0)
    assert s.naf_limit == pytest.approx(0.2723195175075136, rel=1e-14)


def test_scenario_catalog_layout():
    catalog = scenario_catalog()
    assert [s.name for s in catalog] == [
        "octahedral_far",
        "octahedral_mid",
        "octahedral_near",
        "octahedral_limit",
        "wall_far",
        "wall_mid",
        "wall_near",
        "wall_limit",
    ]
    assert [s.separation_naf for s in catalog[:4]] == [0.209, 0.168, 0.126, 0.084]
    assert all(s.target_amplitude_db == 0.0 for s in catalog[:4])
    assert all(s.target_amplitude_db == 15.0 for s in catalog[4:])
    assert all(s.snr_db == 25.0 for s in catalog)
    far = catalog[0]
    assert far.target_nafs == (-0.1045, 0.1045)


def test_scenario_validation():
    with pytest.raises(ConfigError):
        Scenario("x", "cylinder", 0.1)
    with pytest.raises(ConfigError):
        Scenario("x", "octahedral", 0.0)
    with pytest.raises(ConfigError):
        Scenario("x", "octahedral", 0.1, target_range_m=-1.0)
    with pytest.raises(ConfigError):
        RearWall(range_m=0.0)
    with pytest.raises(ConfigError):
        RearWall(n_scatterers=0)
    with pytest.raises(ConfigError):
        RearWall(extent_naf=1.5)
    with pytest.raises(ConfigError):
        Scene((Scatterer(0.0, 18.0, 1.0),), -1.0)


def test_reference_noise_power_value(radio, geom8):
    assert reference_noise_power(radio, geom8, 25.0) == pytest.approx(
        143619.41891459885, rel=1e-14
    )


def test_build_scene_composition(radio, geom8):
    scenario = scenario_catalog()[0]
    scene = build_scene(scenario, radio, geom8)
    assert len(scene.scatterers) == 2 + 17
    targets = scene.scatterers[:2]
    assert [t.naf for t in targets] == [-0.1045, 0.1045]
    assert all(t.range_m == 18.0 and t.amplitude == 1.0 for t in targets)
    wall = scene.scatterers[2:]
    per_point = 10 ** (11.4 / 20) / 17
    assert all(w.amplitude == pytest.approx(per_point) for w in wall)
    assert all(w.range_m == 22.0 for w in wall)
    assert wall[0].naf == -0.25 and wall[-1].naf == 0.25
    assert scene.noise_power == pytest.approx(reference_noise_power(radio, geom8, 25.0))

    bare = build_scene(scenario, radio, geom8, include_rear_wall=False)
    assert len(bare.scatterers) == 2


@pytest.fixture(scope="module")
def small_acquisition():
    from beamsweep import ArrayGeometry, BeamformingWeights, RadioConfig

    radio = RadioConfig()
    geom = ArrayGeometry.uniform_linear(8, 8)
    weights = BeamformingWeights.all_ones(geom)
    scene = build_scene(scenario_catalog()[0], radio, geom)
    plan = minimal_sweep_plan(8, 0.5 * np.sin(np.radians(33.0)))
    acq = simulate_acquisition(scene, geom, weights, radio, plan, 2, (7, 0))
    return radio, geom, weights, scene, plan, acq


def test_acquisition_shapes(small_acquisition):
    radio, _, _, _, plan, acq = small_acquisition
    assert acq.magnitudes.shape == (9, 2)
    assert acq.profiles.shape == (9, 2, 42)
    assert acq.selected_range_m.shape == (9, 2)
    assert acq.range_centers_m.shape == (42,)
    assert acq.gate_keep.sum() == 36
    assert acq.n_frames == 2
    assert acq.mode == "poc"


def test_acquisition_is_deterministic(small_acquisition):
    radio, geom, weights, scene, plan, acq = small_acquisition
    again = simulate_acquisition(scene, geom, weights, radio, plan, 2, (7, 0))
    np.testing.assert_array_equal(acq.magnitudes, again.magnitudes)
    np.testing.assert_array_equal(acq.profiles, again.profiles)
    np.testing.assert_array_equal(acq.selected_range_m, again.selected_range_m)


def test_acquisition_seed_prefix_matters(small_acquisition):
    radio, geom, weights, scene, plan, acq = small_acquisition
    other = simulate_acquisition(scene, geom, weights, radio, plan, 2, (8, 0))
    assert not np.array_equal(acq.magnitudes, other.magnitudes)


def test_selected_ranges_come_from_kept_bins(small_acquisition):
    _, _, _, _, _, acq = small_acquisition
    kept = acq.range_centers_m[acq.gate_keep]
    assert np.isin(acq.selected_range_m, kept).all()
    assert acq.selected_range_m.max() < 21.0


def test_poc_phasor_leaves_power_unchanged(small_acquisition):
    radio, geom, weights, scene, plan, acq = small_acquisition
    ideal = simulate_acquisition(scene, geom, weights, radio, plan, 2, (7, 0), "ideal")
    np.testing.assert_allclose(acq.profiles, ideal.profiles, rtol=1e-9)
    np.testing.assert_allclose(acq.magnitudes, ideal.magnitudes, rtol=1e-9)


def test_acquisition_frame_slicing(small_acquisition):
    _, _, _, _, _, acq = small_acquisition
    np.testing.assert_array_equal(acq.beam_values(1), acq.magnitudes[:, 0])
    np.testing.assert_array_equal(acq.beam_values(), acq.magnitudes.mean(axis=1))
    np.testing.assert_array_equal(acq.mean_profiles(1), acq.profiles[:, 0])


def test_acquisition_validation(small_acquisition):
    radio, geom, weights, scene, plan, _ = small_acquisition
    with pytest.raises(ConfigError):
        simulate_acquisition(scene, geom, weights, radio, plan, 0, (7, 0))
    with pytest.raises(ConfigError):
        simulate_acquisition(scene, geom, weights, radio, plan, 2, (7, 0), "coherent")


@pytest.fixture(scope="module")
def far_report(tmp_path_factory):
    out = tmp_path_factory.mktemp("far_report")
    scenario = scenario_catalog()[0]
    methods = ["oversampled", "dft", "spline", "omp"]
    report = run_comparison([scenario], methods, [5], out_dir=out)
    return out, methods, report


def test_report_structure(far_report):
    _, methods, report = far_report
    data = report.data
    assert set(data) == {"metadata", "scenarios", "per_scenario", "groups", "ordering"}
    meta = data["metadata"]
    assert meta["master_seeds"] == [5]
    assert meta["methods"] == methods
    assert meta["reference_snr_db"] == "per-scenario"
    assert meta["sweep_seconds"]["minimal"] == pytest.approx(0.54, rel=1e-12)
    assert meta["sweep_seconds"]["oversampled"] == pytest.approx(4.86, rel=1e-12)
    assert meta["naf_resolution"] == pytest.approx(1.0 / 15.0, rel=1e-12)

    groups = data["groups"]
    for m in methods:
        assert groups["walls"][m] is None
        assert groups["reflectors"][m] == groups["total"][m]
        assert report.total_rmse(m) == groups["total"][m]["pooled_rmse"]
        per = data["per_scenario"][m]["octahedral_far"]
        assert per["n_runs"] == 1
    ranking = data["ordering"]["total_pooled_rmse_ascending"]
    assert sorted(ranking) == sorted(methods)
    totals = [report.total_rmse(m) for m in ranking]
    assert totals == sorted(totals)

    gt = data["scenarios"]["octahedral_far"]
    assert gt["kind"] == "octahedral"
    assert gt["nominal_nafs"] == [-0.1045, 0.1045]


def test_report_files_written(far_report):
    out, _, report = far_report
    expected = {"report.json", "report.csv", "peaks.csv", "octahedral_far_sweep.csv"}
    for m in ("oversampled", "dft", "spline"):
        expected.add(f"octahedral_far_{m}.ramp")
        expected.add(f"octahedral_far_{m}.csv")
    names = {p.name for p in out.iterdir()}
    assert names == expected

    on_disk = (out / "report.json").read_bytes()
    assert on_disk == report.to_json_bytes()
    assert json.loads(on_disk) == report.data

    peaks = (out / "peaks.csv").read_text().splitlines()
    assert peaks[0] == "scenario,method,seed,naf,range_m,power"
    assert len(peaks) > 1
    sweep = (out / "octahedral_far_sweep.csv").read_text().splitlines()
    assert sweep[0] == "naf,value"
    assert len(sweep) == 1 + 9

    table = (out / "report.csv").read_text().splitlines()
    assert table[0] == "group,target,oversampled,dft,spline,omp"
    assert len(table) == 1 + 3 * 2 + 1
    walls_row = table[3].split(",")
    assert walls_row[0] == "walls" and walls_row[2] == "nan"


def test_report_bytes_reproducible(far_report):
    _, methods, report = far_report
    again = run_comparison([scenario_catalog()[0]], methods, [5])
    assert again.to_json_bytes() == report.to_json_bytes()


def test_run_comparison_validation():
    scenario = scenario_catalog()[0]
    with pytest.raises(ConfigError):
        run_comparison([], ["dft"], [1])
    with pytest.raises(ConfigError):
        run_comparison([scenario], [], [1])
    with pytest.raises(ConfigError):
        run_comparison([scenario], ["dft"], [])
    with pytest.raises(ConfigError):
        run_comparison([scenario], ["music"], [1])
