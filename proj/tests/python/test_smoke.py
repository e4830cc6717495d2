"""End-to-end smoke tests for the python bindings."""

import json
import math

import pytest

import pvyield


def test_solar_helpers():
    h0 = pvyield.extraterrestrial_insolation(35.0, 6)
    assert 11.0 < h0 < 12.0
    assert pvyield.diffuse_fraction(0.0) == pytest.approx(1.0)
    assert pvyield.diffuse_fraction(0.9) == pytest.approx(0.165)
    assert pvyield.beam_ratio(45.0, 12, 60.0, 180.0) > 1.5


def test_synth_simulate_roundtrip(tmp_path):
    grid = pvyield.synth_climate(seed=7, dlat=15, dlon=30, lat_lo=-60, lat_hi=60)
    assert len(grid) == 9 * 12
    recs = grid.records()
    assert len(recs) == 9 * 12 * 12
    assert all(0.25 <= r.kt <= 0.80 for r in recs)

    path = tmp_path / "world.csv"
    pvyield.save_climate_csv(grid, str(path))
    again = pvyield.load_climate_csv(str(path))
    assert len(again) == len(grid)

    yields = pvyield.simulate_grid(grid)
    assert len(yields) == len(grid)
    for y in yields:
        assert y.annual == pytest.approx(sum(y.monthly))
        assert 0 <= y.tilt_deg <= 60


def test_error_type(tmp_path):
    with pytest.raises(pvyield.PvYieldError):
        pvyield.load_climate_csv(str(tmp_path / "missing.csv"))


def test_train_predict_cycle(tmp_path):
    grid = pvyield.synth_climate(seed=3, dlat=12, dlon=24, lat_lo=-60, lat_hi=60)
    world = tmp_path / "world.csv"
    yields_path = tmp_path / "yields.csv"
    pvyield.save_climate_csv(grid, str(world))
    pvyield.save_yield_csv(pvyield.simulate_grid(grid), str(yields_path))

    model_path = tmp_path / "zones.json"
    map_path = tmp_path / "zmap.csv"
    pvyield.fit_zones(grid, k=4, seed=11, model_path=str(model_path), map_path=str(map_path))

    # Training rows straight from the simulated yields of a few sites.
    yields = pvyield.load_yield_csv(str(yields_path))
    rows_path = tmp_path / "rows.csv"
    by_site = {}
    for rec in grid.records():
        by_site.setdefault((rec.lat, rec.lon), []).append(rec)
    with open(rows_path, "w") as f:
        f.write("source,site_id,lat,lon,month,zone,ghi,tamb,kt,target_kwh_m2\n")
        for y in yields[:: max(1, len(yields) // 12)]:
            sid = f"s{y.lat:+07.2f}{y.lon:+08.2f}".replace("+", "p").replace("-", "m").replace(".", "_")
            for rec in sorted(by_site[(y.lat, y.lon)], key=lambda r: r.month):
                f.write(
                    f"simulated,{sid},{y.lat},{y.lon},{rec.month},1,"
                    f"{rec.ghi_kwh_m2_day!r},{rec.tamb_c!r},{rec.kt!r},{y.monthly[rec.month - 1]!r}\n"
                )

    out_model = tmp_path / "model.json"
    info = pvyield.train_surrogate(str(rows_path), seed=42, max_epochs=150, model_path=str(out_model))
    assert info["epochs"] >= 1
    doc = json.loads(out_model.read_text())
    assert doc["layer_sizes"] == [3, 10, 10, 1]

    preds = pvyield.predict_annual(str(out_model), grid)
    assert len(preds) == len(grid)
    ref = {(y.lat, y.lon): y.annual for y in yields}
    rel = [abs(a - ref[(la, lo)]) / ref[(la, lo)] for la, lo, a in preds]
    assert sum(rel) / len(rel) < 0.25  # smoke-level sanity, not an accuracy gate


def test_summary_metric_fixture():
    s = pvyield.summary_metrics([(10.0, 8.0), (10.0, 12.0)])
    assert s.rmse == pytest.approx(2.0)
    assert s.mape_pct == pytest.approx(100.0 * (2.0 / 8.0 + 2.0 / 12.0) / 2.0)
    assert s.r2 == pytest.approx(0.0)
    assert math.isfinite(s.p95)
