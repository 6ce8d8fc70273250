import json
import math
import os
from fractions import Fraction

import pytest

import vwak

DATA = os.environ.get("VWAK_DATA", os.path.join(os.path.dirname(__file__), "..", "..", "data"))


def test_dimension_of_cantor():
    assert abs(vwak.dimension(vwak.CANTOR) - math.log(2) / math.log(3)) < 1e-10


def test_config_file_matches_builtin():
    maps = vwak.load_config(os.path.join(DATA, "cantor.json"))
    as_fractions = [(Fraction(c), Fraction(b)) for c, b in maps]
    assert as_fractions == [(Fraction(c), Fraction(b)) for c, b in vwak.CANTOR]


def test_bad_ratio_is_rejected():
    with pytest.raises(ValueError):
        vwak.dimension([("3/2", "0")])


def test_hull_is_exact():
    assert vwak.hull(vwak.CANTOR) == ("0/1", "1/1")


def test_measure_of_left_third():
    lo, hi = vwak.measure_interval(vwak.CANTOR, "0", "1/3", depth=20)
    assert lo <= 0.5 <= hi
    assert hi - lo < 1e-5


def test_count_table_known_level():
    rows = vwak.count_table(vwak.CANTOR, "3/2", "A", 6, 7, workers=1)
    assert [r["count_hits"] for r in rows] == [194, 320]


def test_critical_exponent_synthetic():
    s = math.log(2) / math.log(3)
    slope = (1 + s) - 2 * (1 - s)
    counts = [(m, 2.0 ** (slope * m)) for m in range(4, 12)]
    out = vwak.critical_exponent(counts, "2", s)
    assert abs(out["l_star"] - (s - 1 + 2 / 3)) < 1e-9


def test_scheme_mass_and_frostman():
    tree_text = vwak.build_scheme(vwak.CANTOR, "5/4", workers=2)
    tree = json.loads(tree_text)
    assert len(tree["root"]["children"]) == 32
    mass = json.loads(vwak.mass_summary(tree_text))
    assert mass["level_totals"] == ["1/1", "1/1", "1/1"]
    report = json.loads(vwak.frostman_scan(tree_text, 0.0))
    assert report["pass"]


def test_scheme_starves_at_huge_v():
    with pytest.raises(vwak.SchemeError):
        vwak.build_scheme(vwak.CANTOR, "10")


def test_cli_exit_codes():
    code, out, _ = vwak.run(["dim", "--ifs", os.path.join(DATA, "cantor.json")])
    assert code == 0
    assert out.strip() == "0.630929753571"
    code, _, err = vwak.run(["cantor", "build", "--ifs", os.path.join(DATA, "cantor.json"), "--v", "10"])
    assert code == 1
    assert "ZeroChildren" in err
