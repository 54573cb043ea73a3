import json

import pytest

from kmsdyn.config.run_config import RunConfig, parse_params
from kmsdyn.errors import ConfigError
from kmsdyn.kmsdyn import main


def _read(path):
    return json.loads(path.read_text(encoding="utf-8"))


def test_classify_chebyshev_critical_point(tmp_path):
    out = tmp_path / "classify.json"
    assert main(["classify", "--preset", "chebyshev", "0", "--out", str(out)]) == 0
    doc = _read(out)
    assert doc["kind"] == "classify"
    assert doc["schema_version"] == "1.0"
    assert (doc["preperiod"], doc["period"]) == (2, 1)
    assert doc["cycle"] == "repelling"
    assert doc["isotropy"] == "Z⊕Z_2"
    assert doc["consistent"] is False
    assert doc["VAL_inf"] is None
    assert doc["orbit"]["arithmetic"] == "exact"


def test_classify_writes_json_to_stdout(capsys):
    assert main(["classify", "--map", "z^2", "1"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["isotropy"] == "Z"
    assert doc["julia"]["location"] == "inside"


def test_output_is_reproducible(tmp_path):
    a, b, c = tmp_path / "a.json", tmp_path / "b.json", tmp_path / "c.json"
    args = ["classify", "--preset", "chebyshev", "0"]
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    main(args + ["--horizon", "80", "--out", str(c)])
    assert _read(c)["config_hash"] != _read(a)["config_hash"]


def test_rees_census(tmp_path):
    out = tmp_path / "census.json"
    code = main(["census", "--preset", "rees", "--beta", "0.5", "--beta", "3", "--depth", "6", "--out", str(out)])
    assert code == 0
    doc = _read(out)
    assert doc["totals"] == [2, 6]
    first = doc["censuses"][0]
    assert first["atomic_count"] == 2
    (state,) = first["states"]
    assert state["class"]["VAL_inf"] == 2
    assert state["atoms"][0][1] == pytest.approx(1.0)


def test_unsupported_census_exits_with_four(tmp_path):
    out = tmp_path / "census.json"
    assert main(["census", "--map", "z^2", "--beta", "1", "--action", "conformal", "--out", str(out)]) == 4
    entry = _read(out)["censuses"][0]
    assert "unsupported" in entry
    assert entry["summable_orbits"] == []


def test_phase_diagram_without_classification(tmp_path):
    out = tmp_path / "phase.csv"
    code = main(["phase-diagram", "--map", "z^2+c", "--param", "c=0", "--beta-min", "0.5", "--beta-max", "2", "--steps", "4", "--out", str(out)])
    assert code == 4
    assert not out.exists()


@pytest.mark.parametrize(
    "argv",
    [
        ["classify", "--map", "z/(z", "0"],
        ["classify", "--map", "z^2", "--tol", "0", "0"],
        ["census", "--map", "z^2", "--beta", "0"],
        ["census", "--map", "z^2", "--beta", "1", "--action", "entropy"],
        ["julia", "--map", "z^2", "--resolution", "8"],
        ["measure", "--map", "z^2", "--kind", "eigenmeasure"],
        ["classify", "--map", "z^2", "--param", "c", "0"],
        ["classify", "--preset", "nowhere", "0"],
    ],
)
def test_bad_input_exits_with_two(argv):
    assert main(argv) == 2


def test_julia_png_is_deterministic(tmp_path):
    a, b = tmp_path / "a.png", tmp_path / "b.png"
    assert main(["julia", "--preset", "square", "--resolution", "16", "--out", str(a)]) == 0
    assert main(["julia", "--preset", "square", "--resolution", "16", "--out", str(b)]) == 0
    assert a.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
    assert a.read_bytes() == b.read_bytes()


def test_measure_csv_preamble(tmp_path):
    out = tmp_path / "cloud.csv"
    assert main(["measure", "--preset", "square", "--depth", "6", "--out", str(out)]) == 0
    lines = out.read_text(encoding="utf-8").splitlines()
    preamble = [line[2:] for line in lines if line.startswith("# ")]
    assert "schema_version=1.0" in preamble
    assert "kind=measure" in preamble
    assert "provenance=lyubich" in preamble
    assert "residual_notion=jacobian" in preamble
    assert lines[len(preamble)] == "re,im,weight"
    assert len(lines) == len(preamble) + 1 + 2**6


def test_measure_binary_needs_out(tmp_path):
    assert main(["measure", "--preset", "square", "--depth", "4", "--format", "bin"]) == 2
    out = tmp_path / "cloud.bin"
    assert main(["measure", "--preset", "square", "--depth", "4", "--format", "bin", "--out", str(out)]) == 0
    assert out.read_bytes()[:4] == b"KMSC"


def test_pressure_writes_csv_and_plot(tmp_path):
    out = tmp_path / "pressure.csv"
    argv = ["pressure", "--preset", "square", "--delta", "0", "--delta", "1", "--delta", "2", "--depth", "10"]
    assert main(argv + ["--out", str(out)]) == 0
    assert out.with_suffix(".png").read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
    preamble = dict(
        line[2:].split("=", 1) for line in out.read_text(encoding="utf-8").splitlines() if line.startswith("# ")
    )
    assert preamble["monotone"] == "1"
    assert float(preamble["root"]) == pytest.approx(1.0, abs=1e-3)


def test_config_hash_ignores_presentation():
    a = RunConfig("z^2+c", {"c": "i"}, out="a.json", format="json")
    b = RunConfig("z^2+c", {"c": "i"}, out="b.json")
    assert a.config_hash == b.config_hash
    assert RunConfig("z^2+c", {"c": "-i"}).config_hash != a.config_hash


def test_presets():
    rees = RunConfig.from_preset("rees")
    assert rees.region == "sphere"
    assert rees.params == {"lam": "0.3+0.9i"}
    assert rees.rational_map.degree == 2
    misiurewicz = RunConfig.from_preset("misiurewicz", horizon=30)
    assert misiurewicz.assumptions.collet_eckmann
    assert misiurewicz.assumptions.preperiodic_critical
    assert misiurewicz.horizon == 30
    with pytest.raises(ConfigError):
        RunConfig.from_preset("nowhere")


def test_config_validation():
    assert parse_params(["c=i", " lam = 0.3+0.9i "]) == {"c": "i", "lam": "0.3+0.9i"}
    with pytest.raises(ConfigError):
        parse_params(["c"])
    with pytest.raises(ConfigError):
        RunConfig("")
    with pytest.raises(ConfigError):
        RunConfig("z^2", region="disc")
    with pytest.raises(ConfigError):
        RunConfig("z^2", format="xml")


def _csv_rows(path):
    lines = [line for line in path.read_text(encoding="utf-8").splitlines() if not line.startswith("# ")]
    header = lines[0].split(",")
    return [dict(zip(header, line.split(","))) for line in lines[1:]]


@pytest.mark.parametrize(
    "argv, suffix",
    [
        (["census", "--preset", "rees", "--beta", "0.5", "--beta", "3", "--depth", "6"], ".json"),
        (["measure", "--preset", "square", "--depth", "6"], ".csv"),
        (["measure", "--preset", "square", "--depth", "6", "--format", "bin"], ".bin"),
        (["pressure", "--preset", "square", "--delta", "0", "--delta", "2", "--depth", "8"], ".csv"),
    ],
    ids=["census", "measure-csv", "measure-bin", "pressure"],
)
def test_outputs_are_byte_reproducible(tmp_path, argv, suffix):
    a, b = tmp_path / f"a{suffix}", tmp_path / f"b{suffix}"
    assert main(argv + ["--out", str(a)]) == 0
    assert main(argv + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    if argv[0] == "pressure":
        assert a.with_suffix(".png").read_bytes() == b.with_suffix(".png").read_bytes()


@pytest.mark.slow
def test_misiurewicz_phase_diagram(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    argv = ["phase-diagram", "--preset", "misiurewicz", "--beta-min", "0.8", "--beta-max", "1.6", "--steps", "9"]
    assert main(argv + ["--out", str(a)]) == 0
    assert main(argv + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert a.with_suffix(".png").read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"

    rows = _csv_rows(a)
    assert len(rows) == 9
    for row in rows:
        beta, hd, error = float(row["beta"]), float(row["hd"]), float(row["hd_error"])
        assert row["atomic_count"] == "0"
        assert int(row["extremal_count"]) == int(abs(beta - hd) <= error)
