import json

import pytest

from src import verify
from src.main import EXIT_OK, EXIT_USAGE, EXIT_VERIFICATION, run
from src.series import TruncatedSeries


def test_count(capsys):
    assert run(["count", "--length", "5", "--level", "1"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "36"


def test_count_all_levels_and_height_cap(capsys):
    assert run(["count", "--length", "5", "--all-levels"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "117"
    assert run(["count", "--length", "6", "--max-height", "2"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "93"


def test_series(capsys):
    assert run(["series", "--gf", "sm", "--order", "11"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "1,1,2,5,13,35,97,275,794,2327,6905,20705"


def test_series_bfile(capsys):
    assert run(["series", "--gf", "level:1", "--order", "3", "--format", "bfile"]) == EXIT_OK
    assert capsys.readouterr().out.splitlines() == ["0 0", "1 1", "2 2", "3 5"]


def test_unknown_generator_is_a_usage_error(capsys):
    assert run(["series", "--gf", "nope", "--order", "3"]) == EXIT_USAGE


def test_verify(capsys):
    assert run(["verify", "--max-length", "6"]) == EXIT_OK
    assert "5/5 checks passed" in capsys.readouterr().out


def test_verification_failure_exit_code(monkeypatch, capsys):
    monkeypatch.setattr(verify, "gf_total", lambda N: TruncatedSeries.polynomial([1, 3], N + 1))
    assert run(["verify", "--max-length", "5"]) == EXIT_VERIFICATION
    err = capsys.readouterr().err
    assert "generator=gf_total n=1" in err
    assert "expected=2 got=3" in err


@pytest.mark.parametrize(
    "argv",
    [["frobnicate"], ["count", "--length", "3", "--bogus"], ["count"], [], ["count", "--length", "x"]],
)
def test_usage_errors(argv, capsys):
    assert run(argv) == EXIT_USAGE


def test_json_format(capsys):
    assert run(["heights", "--length", "3", "--expected", "--format", "json"]) == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert payload["schema"] == "1"
    assert payload["expected_height"] == "4/5"
    assert payload["rows"][-1] == [3, "expected_height", "4/5"]


def test_format_from_environment(monkeypatch, capsys):
    monkeypatch.setenv("SKM_FORMAT", "csv")
    assert run(["count", "--length", "5", "--level", "1"]) == EXIT_OK
    assert capsys.readouterr().out.splitlines() == ["count", "36"]


def test_invalid_environment_setting(monkeypatch, capsys):
    monkeypatch.setenv("SKM_DIGITS", "3")
    assert run(["count", "--length", "2"]) == EXIT_USAGE


def test_enumerate(capsys):
    assert run(["enumerate", "--length", "3", "--level", "0", "--print"]) == EXIT_OK
    assert capsys.readouterr().out.splitlines() == ["UDF", "UFD", "UFL", "FUD", "FFF", "5"]


def test_enumerate_above_oracle_limit(capsys):
    assert run(["enumerate", "--length", "17"]) == EXIT_USAGE
    assert "oracle limit exceeded" in capsys.readouterr().err


def test_stats(capsys):
    assert run(["stats", "--length", "4", "--format", "json"]) == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert payload["total"] == 13


def test_sample_is_reproducible(capsys):
    argv = ["sample", "--length", "9", "--level", "1", "--count", "25", "--seed", "123", "--format", "json"]
    assert run(argv) == EXIT_OK
    first = capsys.readouterr().out
    assert run(argv) == EXIT_OK
    assert capsys.readouterr().out == first
    payload = json.loads(first)
    assert payload["seed"] == 123
    assert payload["rng_id"] == "numpy.PCG64"
    assert len(payload["paths"]) == 25


def test_sample_rejects_bad_seed(capsys):
    assert run(["sample", "--length", "3", "--count", "1", "--seed", "-5"]) == EXIT_USAGE


def test_save_config(isolated_settings, capsys):
    assert run(["count", "--length", "2", "--format", "csv", "--save-config"]) == EXIT_OK
    assert "SKM_FORMAT=csv" in (isolated_settings / ".env").read_text()


def test_count_by_layer(capsys):
    assert run(["count", "--length", "3", "--by-layer", "--format", "csv"]) == EXIT_OK
    assert capsys.readouterr().out.splitlines() == ["n,j,F,G,H,K,total", "3,0,0,2,2,1,5"]


def test_count_table(capsys):
    assert run(["count", "--length", "1", "--table", "--format", "csv"]) == EXIT_OK
    assert capsys.readouterr().out.splitlines() == [
        "n,j,F,G,H,K,total",
        "0,0,1,0,0,0,1",
        "1,0,0,0,1,0,1",
        "1,1,1,0,0,0,1",
    ]


def test_count_table_json_with_height_cap(capsys):
    assert run(["count", "--length", "4", "--max-height", "1", "--table", "--format", "json"]) == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert payload["kind"] == "count-table"
    assert payload["height_cap"] == 1
    assert all(row[1] <= 1 for row in payload["rows"])


def test_series_at_order_zero(capsys):
    assert run(["series", "--gf", "sm", "--order", "0"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "1"


def test_version(capsys):
    assert run(["--version"]) == EXIT_OK
    assert "1.0.0" in capsys.readouterr().out
