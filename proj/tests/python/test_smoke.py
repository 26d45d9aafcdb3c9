import json
import math

import pytest

import sfrl


def h2(p):
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def test_entropy_uniform():
    assert sfrl.entropy([0.25] * 4) == pytest.approx(2.0)


def test_bsc_capacity():
    res = sfrl.capacity([[0.89, 0.11], [0.11, 0.89]])
    assert res["capacity"] == pytest.approx(1 - h2(0.11), abs=1e-8)


def test_mutual_information_dsbs():
    joint = [[0.45, 0.05], [0.05, 0.45]]
    assert sfrl.mutual_information(joint) == pytest.approx(1 - h2(0.1), abs=1e-12)


def test_lb_example_k2():
    fam = sfrl.lb_example(2)
    assert fam["h_v"] == pytest.approx(1.75)
    assert fam["i_xy"] == pytest.approx(0.25)


def test_invalid_pmf_raises():
    with pytest.raises(ValueError):
        sfrl.entropy([0.5, 0.6])


def test_cli_round_trip():
    code, out, _ = sfrl.run_cli(["efi", "example", "--k", "3"])
    assert code == 0
    assert json.loads(out)["payload"]["k"] == 3
    code, _, err = sfrl.run_cli(["no-such-command"])
    assert code == 2
    assert err
