import json

import numpy as np
import pytest

from risnet import MultiportNetwork, ParseError, PortPartition
from risnet.jsonio import (
    complex_from_json,
    complex_to_json,
    dumps_network,
    network_from_dict,
    read_network,
    write_network,
)


def test_complex_round_trip():
    a = np.array([[1 + 2j, -0.5], [3e-300j, 1e300]])
    assert np.array_equal(complex_from_json(complex_to_json(a), 2), a)
    assert complex_from_json([1, [2, 3]], 1).tolist() == [1, 2 + 3j]


def test_network_round_trip(tmp_path):
    net = MultiportNetwork.from_z([[50, 10 + 1j], [10 + 1j, 20]], z0=75.0,
                                  labels=["tx", "ris"], partition=PortPartition(2, transmit=(0,), ris=(1,)))
    path = tmp_path / "n.json"
    write_network(path, net)
    back = read_network(path)
    assert np.array_equal(back.matrix, net.matrix)
    assert back.z0 == 75.0 and back.labels == ("tx", "ris") and back.partition == net.partition
    assert json.loads(dumps_network(back)) == json.loads(path.read_text())


@pytest.mark.parametrize("data", [
    {"matrix": [[[1, 0]]], "extra": 1},
    {"rep": "Z"},
    {"matrix": [[1, 2], [3]]},
    {"matrix": [[[1, 0, 0]]]},
    {"matrix": [[True]]},
    {"matrix": [[1, 2]]},
    {"matrix": [[1]], "rep": "Y"},
    {"matrix": [[1]], "partition": {"T": [0], "R": [0]}},
    [],
])
def test_bad_documents(data):
    with pytest.raises(ParseError):
        network_from_dict(data)


def test_json_syntax_error_has_line(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{\n "z0": 50,\n "matrix": [[1]\n}\n')
    with pytest.raises(ParseError) as err:
        read_network(path)
    assert err.value.line == 4
