import json
import math

import numpy as np
import pytest

from nlsearch import DomainError, RunConfig, SeriesFile, read_series
from nlsearch.series import (
    csv_text,
    eval_g_rule,
    eval_k_rule,
    json_text,
    parse_csv_text,
    parse_json_text,
    parse_sweep,
    sweep_values,
    write_series,
)


def make_series(**over):
    config = RunConfig(command="simulate", N=100, k=1, g_rule="const:2")
    for key, val in over.items():
        setattr(config, key, val)
    data = np.column_stack([np.linspace(0, 1, 7), np.linspace(0, 1, 7) ** 2])
    return SeriesFile(config=config, columns=["t", "x"], data=data,
                      meta={"t_end": 1.0})


class TestRules:
    def test_g_rules(self):
        assert eval_g_rule("const:2.5", 100, 1) == 2.5
        assert eval_g_rule("3", 100, 1) == 3.0  # bare-number shorthand
        assert eval_g_rule("pow:0.5", 100, 1) == pytest.approx(10.0)
        assert eval_g_rule("pow_over_logR:0.5", 1000, 10) == pytest.approx(
            10.0 / math.log(100))
        assert eval_g_rule("pow_over_logNk:0.125", 65536, 16) == pytest.approx(
            65536 ** 0.125 / math.log(65536 / 16))

    def test_bad_g_rules(self):
        for rule in ("pow", "nope:1", "const:abc", "const:-1", "pow:900"):
            with pytest.raises(DomainError):
                eval_g_rule(rule, 100, 1)

    def test_k_rules(self):
        assert eval_k_rule(None, 100) == 1
        assert eval_k_rule("const:5", 100) == 5
        assert eval_k_rule("7", 100) == 7
        assert eval_k_rule("pow:0.25", 1000) == math.ceil(1000 ** 0.25)
        assert eval_k_rule("pow:0", 100) == 1
        assert eval_k_rule("const:500", 100) == 99  # clamped to k < N

    def test_bad_k_rules(self):
        for rule in ("const:2.5", "nope:1", "const:x"):
            with pytest.raises(DomainError):
                eval_k_rule(rule, 100)

    def test_sweep(self):
        assert parse_sweep("100:400:100") == [100, 400, 100]
        assert sweep_values([100, 400, 100]) == [100, 200, 300, 400]
        assert sweep_values([100, 399, 100]) == [100, 200, 300]
        for text in ("100:400", "400:100:10", "a:b:c", "1:10:0"):
            with pytest.raises(DomainError):
                parse_sweep(text)


class TestRoundTrips:
    def test_csv_round_trip_is_bit_exact(self):
        sf = make_series()
        back = parse_csv_text(csv_text(sf))
        assert back.columns == sf.columns
        assert np.array_equal(back.data, sf.data)
        assert back.config.to_json() == sf.config.to_json()
        assert back.meta["t_end"] == 1.0

    def test_json_round_trip_is_bit_exact(self):
        sf = make_series()
        back = parse_json_text(json_text(sf))
        assert np.array_equal(back.data, sf.data)
        assert back.config.to_json() == sf.config.to_json()

    def test_seventeen_digit_floats_survive(self):
        sf = make_series()
        sf.data[3, 1] = 0.1 + 0.2  # not representable in short decimal
        sf.data[4, 0] = 1e-17
        back = parse_csv_text(csv_text(sf))
        assert back.data[3, 1] == sf.data[3, 1]
        assert back.data[4, 0] == sf.data[4, 0]

    def test_read_series_sniffs_format(self, tmp_path):
        sf = make_series()
        csv_path = tmp_path / "a.csv"
        json_path = tmp_path / "a.json"
        csv_path.write_text(csv_text(sf))
        json_path.write_text(json_text(sf))
        assert np.array_equal(read_series(str(csv_path)).data, sf.data)
        assert np.array_equal(read_series(str(json_path)).data, sf.data)

    def test_rejects_foreign_csv(self, tmp_path):
        path = tmp_path / "foreign.csv"
        path.write_text("a,b\n1,2\n")
        with pytest.raises(DomainError):
            read_series(str(path))


class TestWriteSeries:
    def test_csv_to_path(self, tmp_path):
        sf = make_series()
        target = tmp_path / "out.csv"
        written = write_series(sf, str(target))
        assert written == [str(target)]
        assert np.array_equal(read_series(str(target)).data, sf.data)

    def test_json_format_honored(self, tmp_path):
        sf = make_series(format="json")
        target = tmp_path / "out.json"
        write_series(sf, str(target))
        payload = json.loads(target.read_text())
        assert payload["columns"] == ["t", "x"]

    def test_svg_writes_twin_csv(self, tmp_path):
        sf = make_series(format="svg")
        sf.meta["plot"] = {"pairs": [[0, 1, "x"]], "xlabel": "t", "ylabel": "x"}
        target = tmp_path / "fig.svg"
        written = write_series(sf, str(target))
        twin = tmp_path / "fig.csv"
        assert set(written) == {str(target), str(twin)}
        assert target.read_text().lstrip().startswith("<?xml")
        assert np.array_equal(read_series(str(twin)).data, sf.data)

    def test_svg_needs_out_path(self):
        sf = make_series(format="svg")
        sf.meta["plot"] = {"pairs": [[0, 1, "x"]]}
        with pytest.raises(DomainError):
            write_series(sf, None)

    def test_stdout_fallback(self, capsys):
        sf = make_series()
        assert write_series(sf, None) == []
        out = capsys.readouterr().out
        assert out.startswith("# nlsearch series")
