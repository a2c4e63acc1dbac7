import json
import math

import numpy as np
import pytest

from dephasim import CouplingSystem, MemoryConfig, PulseEvent, PulseSchedule, run_memory
from dephasim.cli import (
    ConfigError,
    _fmt,
    _spread_suffix,
    load_config,
    main,
    run,
    schedule_from_dict,
    schedule_to_dict,
    write_curve_csv,
)

from helpers import J_REF


def write_json(path, doc):
    path.write_text(json.dumps(doc))
    return str(path)


def transmission_doc(**overrides):
    doc = {
        "experiment": "transmission",
        "seed": 7,
        "params": {"j_hz": 215.5, "total_time": 6e-3, "noise_start": 1e-3, "trials": 200},
    }
    doc.update(overrides)
    return doc


def memory_doc(**overrides):
    doc = {
        "experiment": "memory",
        "seed": 7,
        "params": {
            "j_hz": 215.5,
            "mean_interval": 2e-3,
            "interval_spread": [0.1, 0.25],
            "observation_times": {"max_time": 40e-3},
            "trials": 100,
        },
    }
    doc.update(overrides)
    return doc


# ---------------------------------------------------------------------------
# config handling
# ---------------------------------------------------------------------------

def test_missing_config_file_exits_1(tmp_path, capsys):
    assert main([str(tmp_path / "nope.json")]) == 1
    assert "config error" in capsys.readouterr().err


def test_invalid_json_exits_1(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    assert main([str(path)]) == 1
    assert "not valid JSON" in capsys.readouterr().err


def test_non_object_config_rejected(tmp_path):
    path = tmp_path / "list.json"
    path.write_text("[1, 2]")
    with pytest.raises(ConfigError, match="object"):
        load_config(path)


def test_unknown_experiment_rejected():
    with pytest.raises(ConfigError, match="experiment"):
        run({"experiment": "tomography"})


def test_monte_carlo_requires_seed(tmp_path, capsys):
    doc = transmission_doc()
    del doc["seed"]
    assert main([write_json(tmp_path / "c.json", doc)]) == 1
    assert "seed" in capsys.readouterr().err


def test_config_type_and_location_errors(tmp_path, capsys):
    doc = transmission_doc()
    doc["params"]["trials"] = "many"
    assert main([write_json(tmp_path / "c.json", doc)]) == 1
    err = capsys.readouterr().err
    assert "trials" in err and "params" in err

    doc = transmission_doc()
    doc["params"]["j_hz"] = -5
    assert main([write_json(tmp_path / "c.json", doc)]) == 1
    assert "j_hz" in capsys.readouterr().err

    doc = transmission_doc()
    del doc["params"]["total_time"]
    assert main([write_json(tmp_path / "c.json", doc)]) == 1
    assert "total_time" in capsys.readouterr().err


def test_bool_is_not_an_int(tmp_path):
    doc = transmission_doc()
    doc["params"]["trials"] = True
    with pytest.raises(ConfigError, match="trials"):
        run(load_config(write_json(tmp_path / "c.json", doc)))


def test_invalid_physics_reported_with_location(tmp_path, capsys):
    doc = transmission_doc()
    doc["params"]["total_time"] = 2e-3  # noise window cannot fit
    assert main([write_json(tmp_path / "c.json", doc)]) == 1
    assert "noise window" in capsys.readouterr().err


def test_out_dir_collision_exits_2(tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("in the way")
    doc = transmission_doc()
    code = main([write_json(tmp_path / "c.json", doc), "--out", str(blocker)])
    assert code == 2
    assert "runtime error" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# transmission runs
# ---------------------------------------------------------------------------

def test_transmission_run_outputs(tmp_path, capsys):
    config = write_json(tmp_path / "c.json", transmission_doc())
    out = tmp_path / "results"
    assert main([config, "--out", str(out)]) == 0
    amps = (out / "amplitudes.csv").read_text().splitlines()
    assert amps[0] == "trial,amplitude_re,amplitude_im"
    assert len(amps) == 201
    groups = (out / "group_averages.csv").read_text().splitlines()
    assert groups[0] == "group,amplitude_re,amplitude_im,magnitude"
    assert len(groups) == 1 + math.ceil(200 / 16)
    summary = (out / "summary.txt").read_text()
    assert "complete dephasing" in summary
    assert "|grand average|" in summary
    assert "complete dephasing" in capsys.readouterr().out


def test_transmission_reruns_are_byte_identical(tmp_path):
    config = write_json(tmp_path / "c.json", transmission_doc())
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert main([config, "--out", str(out_a)]) == 0
    assert main([config, "--out", str(out_b)]) == 0
    for name in ("amplitudes.csv", "group_averages.csv", "summary.txt"):
        assert (out_a / name).read_bytes() == (out_b / name).read_bytes()


def test_seed_override_changes_results(tmp_path):
    config = write_json(tmp_path / "c.json", transmission_doc())
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert main([config, "--out", str(out_a)]) == 0
    assert main([config, "--out", str(out_b), "--seed", "8"]) == 0
    assert (out_a / "amplitudes.csv").read_bytes() != (out_b / "amplitudes.csv").read_bytes()


def test_transmission_bang_bang_summary(tmp_path):
    doc = transmission_doc()
    doc["params"].update(total_time=9e-3, bang_bang=True, pulse_spacing=0.3e-3, trials=64)
    out = tmp_path / "results"
    assert main([write_json(tmp_path / "c.json", doc), "--out", str(out)]) == 0
    summary = (out / "summary.txt").read_text()
    assert "sinc retention (train locked to window start)" in summary
    assert "pulses = 24" in summary


# ---------------------------------------------------------------------------
# memory runs
# ---------------------------------------------------------------------------

def test_memory_run_outputs_one_csv_per_spread(tmp_path):
    config = write_json(tmp_path / "c.json", memory_doc())
    out = tmp_path / "results"
    assert main([config, "--out", str(out)]) == 0
    assert (out / "decay_a010.csv").exists()
    assert (out / "decay_a025.csv").exists()
    lines = (out / "decay_a025.csv").read_text().splitlines()
    assert lines[0] == "time_s,magnitude,fit_magnitude"
    assert len(lines) == 11  # ten toggle cycles in 40 ms
    summary = (out / "summary.txt").read_text()
    assert "t2_sim_s" in summary and "contrast" in summary


def test_memory_csv_round_trips_to_in_memory_values(tmp_path):
    doc = memory_doc()
    doc["params"]["interval_spread"] = 0.25
    config = write_json(tmp_path / "c.json", doc)
    out = tmp_path / "results"
    assert main([config, "--out", str(out)]) == 0

    curve = run_memory(MemoryConfig(
        j=2 * math.pi * 215.5, mean_interval=2e-3, interval_spread=0.25,
        observation_times=tuple(4e-3 * k for k in range(1, 11)), trials=100, seed=7))
    rows = np.loadtxt(out / "decay_a025.csv", delimiter=",", skiprows=1)
    assert np.allclose(rows[:, 0], curve.times, rtol=1e-11, atol=0.0)
    assert np.allclose(rows[:, 1], curve.magnitudes, rtol=1e-11, atol=0.0)
    assert np.allclose(rows[:, 2], curve.fit.magnitude(curve.times), rtol=1e-11, atol=0.0)


def test_memory_reruns_are_byte_identical(tmp_path):
    config = write_json(tmp_path / "c.json", memory_doc())
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert main([config, "--out", str(out_a)]) == 0
    assert main([config, "--out", str(out_b)]) == 0
    for name in ("decay_a010.csv", "decay_a025.csv", "summary.txt"):
        assert (out_a / name).read_bytes() == (out_b / name).read_bytes()


def test_memory_explicit_observation_times(tmp_path):
    doc = memory_doc()
    doc["params"]["interval_spread"] = 0.2
    doc["params"]["observation_times"] = [4e-3, 8e-3, 12e-3, 16e-3]
    out = tmp_path / "results"
    assert main([write_json(tmp_path / "c.json", doc), "--out", str(out)]) == 0
    assert len((out / "decay_a020.csv").read_text().splitlines()) == 5


def test_memory_config_errors(tmp_path, capsys):
    doc = memory_doc()
    doc["params"]["observation_times"] = {"max_time": 1e-3}
    assert main([write_json(tmp_path / "c.json", doc)]) == 1
    assert "max_time" in capsys.readouterr().err

    doc = memory_doc()
    doc["params"]["interval_spread"] = []
    assert main([write_json(tmp_path / "c.json", doc)]) == 1
    assert "interval_spread" in capsys.readouterr().err

    doc = memory_doc()
    doc["params"]["interval_spread"] = [0.1, "wide"]
    assert main([write_json(tmp_path / "c.json", doc)]) == 1
    assert "interval_spread" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# channel demo and verify
# ---------------------------------------------------------------------------

def test_channel_demo_report(tmp_path):
    doc = {"experiment": "channel-demo", "params": {}}
    out = tmp_path / "demo"
    assert main([write_json(tmp_path / "c.json", doc), "--out", str(out)]) == 0
    report = (out / "report.txt").read_text()
    assert "pure-env dilation" in report
    assert "mean phase factor" in report
    # all construction deviations are numerically tiny
    for token in report.split():
        if "e-" in token and token.replace(".", "").replace("e-", "").isdigit():
            assert float(token) < 1e-10


def test_verify_report_passes(tmp_path):
    doc = {"experiment": "verify", "params": {}}
    out = tmp_path / "verify"
    assert main([write_json(tmp_path / "c.json", doc), "--out", str(out)]) == 0
    report = (out / "report.txt").read_text()
    assert "all checks passed" in report
    assert "quadratic shrink ratios" in report


# ---------------------------------------------------------------------------
# serialisation helpers
# ---------------------------------------------------------------------------

def test_schedule_document_round_trip():
    sched = PulseSchedule(
        CouplingSystem(J_REF),
        (PulseEvent(0.0, 1, "y", math.pi / 2), PulseEvent(1e-3, 2, "x", math.pi)),
        5e-3,
    )
    doc = schedule_to_dict(sched)
    assert doc["j_hz"] == pytest.approx(215.5)
    back = schedule_from_dict(doc)
    assert back.total_time == sched.total_time
    assert back.system.j == pytest.approx(sched.system.j)
    assert back.events == sched.events


def test_schedule_document_rejects_garbage():
    with pytest.raises(ConfigError, match="schedule"):
        schedule_from_dict({"j_hz": 215.5})
    with pytest.raises(ConfigError, match="schedule"):
        schedule_from_dict({"j_hz": 215.5, "total_time": 1e-3,
                            "events": [{"time": 0.0, "target": 9, "axis": "x", "angle": 1.0}]})


def test_write_curve_csv_contract(tmp_path):
    from dephasim import DecayCurve, fit_exponential

    t = np.array([0.004, 0.008, 0.012])
    m = np.exp(-t / 0.035)
    curve = DecayCurve(times=t, magnitudes=m, fit=fit_exponential(t, m))
    path = tmp_path / "curve.csv"
    write_curve_csv(curve, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "time_s,magnitude,fit_magnitude"
    assert len(lines) == 4
    assert lines[1].startswith("0.004,")

    empty = DecayCurve(times=np.array([]), magnitudes=np.array([]), fit=curve.fit)
    target = tmp_path / "empty.csv"
    with pytest.raises(ValueError, match="empty"):
        write_curve_csv(empty, target)
    assert not target.exists()


def test_fmt_and_spread_suffix():
    assert _fmt(0.05700204704780489) == "0.0570020470478"
    assert _fmt(1.0) == "1"
    assert _spread_suffix(0.1) == "a010"
    assert _spread_suffix(0.25) == "a025"
    assert _spread_suffix(0.05) == "a005"
    assert _spread_suffix(0.0) == "a000"
