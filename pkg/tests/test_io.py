import json

import numpy as np
import pytest

from ginibre_dpp._random import as_generator, fresh_seed, spawn_seeds
from ginibre_dpp.configuration import Configuration
from ginibre_dpp.io import read_config, to_csv, to_json, to_svg, write_config


@pytest.fixture
def config():
    return Configuration(
        np.array([0.1 + 0.2j, -1 / 3 + 2j, 3.0 - 1e-17j]),
        {"radius": 4.0, "margin": 3.0, "seed": 9, "mode": "exact", "residuals": np.zeros(3)},
    )


def test_csv_round_trip_is_exact(tmp_path, config):
    path = tmp_path / "a.csv"
    write_config(config, path)
    back = read_config(path)
    np.testing.assert_array_equal(back.points, config.points)
    assert path.read_text().splitlines()[0] == "re,im"


def test_json_round_trip(tmp_path, config):
    path = tmp_path / "a.json"
    write_config(config, path, tool_version="0.1.0")
    back = read_config(path)
    np.testing.assert_array_equal(back.points, config.points)
    assert back.metadata["n_points"] == 3 and back.metadata["tool_version"] == "0.1.0"
    assert "residuals" not in json.loads(path.read_text())


def test_serialization_is_deterministic(config):
    assert to_csv(config) == to_csv(config.copy())
    assert to_json(config) == to_json(config.copy())
    assert to_svg(config) == to_svg(config.copy())
    assert to_svg(config).count("<circle") == 4


def test_bad_csv(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("x,y\n1,2\n")
    with pytest.raises(ValueError):
        read_config(path)
    path.write_text("re,im\n1,2,3\n")
    with pytest.raises(ValueError):
        read_config(path)


def test_empty_configuration(tmp_path):
    path = tmp_path / "e.csv"
    write_config(Configuration(np.zeros(0)), path)
    assert len(read_config(path)) == 0


def test_random_streams():
    g, s = as_generator(5)
    assert s == 5 and g.random() == np.random.Generator(np.random.PCG64(5)).random()
    g2, s2 = as_generator(g)
    assert g2 is g and s2 is None
    with pytest.raises(ValueError):
        as_generator(-1)
    a = [c.generate_state(2).tolist() for c in spawn_seeds(3, 4)]
    b = [c.generate_state(2).tolist() for c in spawn_seeds(3, 2)]
    assert a[:2] == b and len({tuple(x) for x in a}) == 4
    assert 0 <= fresh_seed() < 2**64
