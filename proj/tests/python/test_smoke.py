import json
import math
from pathlib import Path

import pytest

minext = pytest.importorskip("minext")

DATA = Path(__file__).resolve().parents[1] / "data"


def read(name):
    return (DATA / name).read_text()


def test_identity_square_is_certified():
    r = minext.extend(read("identity_square.json"))
    assert r.certified
    assert r.psi["total"] == pytest.approx(2.0, abs=1e-9)
    lo, hi = r.variation["manhattan"]
    assert lo <= hi <= 2.0 + 1e-3
    assert r.margins["manhattan"] >= 0.0


def test_mesh_round_trip_passes_the_audit():
    r = minext.extend(read("l_shape.json"))
    assert r.certified
    audit = minext.verify(r.mesh_json())
    assert audit["passed"]
    assert all(ok for ok, _ in audit["checks"].values())
    report = json.loads(r.report_json())
    assert report["certified"] is True
    assert r.svg().count("<g") == 2


def test_componentwise_sandwich():
    r = minext.extend(read("diamond_shear.json"))
    psi = r.psi
    along, across = r.variation["along"], r.variation["across"]
    assert psi["horizontal"] - psi["error"] <= along[1]
    assert psi["vertical"] - psi["error"] <= across[1]
    assert r.margins["along"] >= 0.0 and r.margins["across"] >= 0.0


def test_psi_matches_extend():
    p = minext.psi(read("diamond_shear.json"))
    assert p["total"] == pytest.approx(p["horizontal"] + p["vertical"])
    assert p["error"] < 1e-9


def test_shortest_path_bends_at_the_reflex_corner():
    poly = [(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)]
    path, length = minext.shortest_path(poly, (2, "1/2"), ("1/2", 2))
    assert ("1", "1") in path
    assert length == pytest.approx(math.hypot(1, 0.5) + math.hypot(0.5, 1))


@pytest.mark.parametrize("name, message", [("bowtie.json", "not injective"), ("zero_eps.json", "eps must be positive")])
def test_invalid_problems_raise(name, message):
    with pytest.raises(minext.Error, match=message):
        minext.extend(read(name))
