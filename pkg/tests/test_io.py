import json

import numpy as np
import pytest

from muqsim.io import (ConfigError, DataError, load_config, parse_config, parse_dataset, read_series_csv,
                       write_manifest, write_series_csv)
from muqsim.polarisation import PolarisationSeries


def test_dataset_examples():
    d = parse_dataset("0.0 0.25 0.01\n0.1 0.24 0.01")
    assert len(d) == 2 and d.sigma is not None
    d = parse_dataset("# t_us A sigma\n# A0 = 0.24\n0.0,0.25,0.01\n\n0.1, 0.24, 0.01\n")
    assert len(d) == 2 and d.header == {"A0": 0.24}
    d = parse_dataset("0 0.2\n1 0.1\n")
    assert d.sigma is None


@pytest.mark.parametrize("text,line", [
    ("0.0 0.25 0.01\n0.2 0.24 0.01\n0.1 0.2 0.01\n", ":3:"),
    ("0.0 0.25 0.01\n0.1 abc 0.01\n", ":2:"),
    ("0.0 0.25 0.01\n0.1\n", ":2:"),
    ("0.0 0.25 0.01\n0.1 0.2\n", ":2:"),
    ("0.0 0.25 0.01\n0.1 0.2 -1\n", ":2:"),
    ("# header\n0.0 0.25 0.01\n0.1 0.2 nan\n", ":3:"),
])
def test_dataset_errors_name_the_line(text, line):
    with pytest.raises(DataError, match=line):
        parse_dataset(text, "f")


def test_dataset_needs_two_rows():
    with pytest.raises(DataError):
        parse_dataset("0 1 1\n")


def test_config_defaults_and_unknown_keys():
    cfg = parse_config({"geometry": {"shell_count": 2}})
    assert cfg.system().n_qubits == 11 and cfg.method == "exact-diag" and cfg.times.size == 191
    with pytest.raises(ConfigError, match="shell_cont"):
        parse_config({"geometry": {"shell_cont": 2}})
    with pytest.raises(ConfigError, match="top level"):
        parse_config({"sed": 1})
    with pytest.raises(ConfigError):
        parse_config({"method": {"name": "rpa"}})  # stochastic without a seed
    with pytest.raises(ConfigError):
        parse_config({"method": {"name": "guess"}})
    with pytest.raises(ConfigError):
        parse_config({"evolution": {"steps": 0}})
    with pytest.raises(ConfigError):
        parse_config({"times": {"values": [0, 2, 1]}})
    with pytest.raises(ConfigError):
        parse_config({"geometry": {"displacements": {"nnn": 0.1}}})  # no such group
    with pytest.raises(ConfigError):
        parse_config({"geometry": {"displacements": {"nnn-nn": 0.1}}})  # shell 4 absent


def test_config_particles_and_field():
    doc = {"particles": [{"kind": "muon"}, {"kind": "fluorine", "position": [0, 0, 1.2]},
                         {"label": "Na", "spin": 1.5, "gyromagnetic_ratio": 7.08e7, "position": [1, 1, 0],
                          "quadrupole": [0.1, 0.0], "efg": [[1, 0, 0], [0, -0.5, 0], [0, 0, -0.5]]}],
           "hamiltonian": {"field": [0, 0, 0.01]}}
    cfg = parse_config(doc)
    assert cfg.system().n_qubits == 5 and 2 in cfg.efg and cfg.magnetic_field == (0, 0, 0.01)
    with pytest.raises(ConfigError):
        parse_config({"particles": [{"kind": "electron"}]})
    with pytest.raises(ConfigError):
        parse_config({"particles": [{"kind": "muon", "colour": "red"}]})
    with pytest.raises(ConfigError):
        parse_config({"particles": [{"kind": "muon"}], "geometry": {"shell_count": 1}})


def test_load_config_file(tmp_path):
    (tmp_path / "d.dat").write_text("0 1 0.1\n1 0.5 0.1\n")
    p = tmp_path / "c.toml"
    p.write_text('seed = 3\n[method]\nname = "rpa"\n[fit]\ndata = "d.dat"\n')
    cfg = load_config(p)
    assert cfg.seed == 3 and cfg.fit["data"] == (tmp_path / "d.dat").resolve()
    p.write_text('[fit]\ndata = "missing.dat"\n')
    with pytest.raises(ConfigError):
        load_config(p)
    p.write_text("seed = [\n")
    with pytest.raises(ConfigError):
        load_config(p)
    with pytest.raises(ConfigError):
        load_config(tmp_path / "nope.toml")


def test_series_csv_round_trip_full_precision(tmp_path):
    t = np.array([0.0, 0.1, 1 / 3])
    s = PolarisationSeries(t, np.array([1.0, np.pi / 4, -1e-17]), np.array([0.0, 1e-3, np.nan]))
    path = write_series_csv(s, tmp_path / "a" / "s.csv")
    assert path.read_text().splitlines()[0] == "time_us,P,sigma_P"
    back = read_series_csv(path)
    assert np.array_equal(back.times, t) and np.array_equal(back.values, s.values)
    assert np.array_equal(back.sigma, s.sigma, equal_nan=True)


def test_manifest(tmp_path):
    cfg = parse_config({"seed": 4})
    path = write_manifest(tmp_path / "m.json", cfg, "simulate", [tmp_path / "x.csv"], {"n": np.int64(3)})
    man = json.loads(path.read_text())
    assert man["seed"] == 4 and man["outputs"] == ["x.csv"] and man["n"] == 3
    assert {"muqsim", "numpy", "scipy", "python"} <= set(man["versions"])
