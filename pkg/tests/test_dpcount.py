from collections import Counter
from fractions import Fraction

import pytest

from src.dpcount import (
    LayerCounts,
    build_table,
    count,
    count_all_levels,
    height_distribution,
    layer_counts,
    marked_distribution,
    return_counts as dp_return_counts,
)
from src.closedforms import gf_layer_level, gf_level
from src.errors import TableRangeError
from src.paths import Layer, enumerate_paths
from tests.tables import LEVEL_COUNTS


def test_length_one_entries():
    table = build_table(1)
    assert table.layer_counts(0, 0) == LayerCounts(1, 0, 0, 0)
    assert table.layer_counts(1, 0) == LayerCounts(0, 0, 1, 0)
    assert table.layer_counts(1, 1) == LayerCounts(1, 0, 0, 0)
    assert table.entry(1, 1, Layer.F) == 1


def test_single_counts():
    assert count(5, 1) == 36
    assert count(4, 4) == 1
    assert count(11, 0) == 20705
    assert count(3, 4) == 0
    assert count(3, -1) == 0


def test_count_matches_level_lists():
    for j, expected in LEVEL_COUNTS.items():
        assert [count(n, j) for n in range(len(expected))] == expected


def test_count_all_levels(total_counts):
    assert count_all_levels(5) == 117
    assert count_all_levels(0) == 1
    assert count_all_levels(7) == 1049
    assert [count_all_levels(n) for n in range(len(total_counts))] == total_counts


def test_return_counts(return_counts):
    assert dp_return_counts(11) == return_counts
    assert dp_return_counts(8, height_cap=2)[6] == 93


def test_table_matches_oracle_by_layer():
    N = 8
    table = build_table(N)
    for n in range(N + 1):
        tally = Counter((p.final_level, p.layer) for p in enumerate_paths(n))
        for j in range(n + 1):
            for layer in Layer:
                assert table.entry(n, j, layer) == tally[(j, layer)]


def test_capped_table_matches_oracle():
    N, cap = 8, 2
    table = build_table(N, height_cap=cap)
    for n in range(N + 1):
        assert table.count(n, 0) == len(enumerate_paths(n, final_level=0, max_height=cap))
        assert table.count(n, cap + 1) == 0


def test_table_range_errors():
    table = build_table(4)
    with pytest.raises(TableRangeError):
        table.count(5, 0)
    with pytest.raises(TableRangeError):
        table.count_all_levels(-1)
    assert table.count(2, 3) == 0


def test_table_rejects_bad_arguments():
    with pytest.raises(ValueError):
        build_table(-1)
    with pytest.raises(ValueError):
        build_table(3, height_cap=-1)


def test_export_rows():
    rows = list(build_table(2).export_rows())
    assert rows[0] == (0, 0, 1, 0, 0, 0, 1)
    assert (2, 0, 0, 1, 1, 0, 2) in rows
    assert all(r[-1] == sum(r[2:6]) for r in rows)


def test_marked_distributions():
    assert marked_distribution(1) == {(1, 0): 1}
    assert marked_distribution(3) == {(1, 0): 3, (1, 1): 1, (3, 0): 1}
    assert marked_distribution(4) == {(0, 0): 2, (2, 0): 6, (0, 1): 1, (2, 1): 3, (4, 0): 1}


def test_marked_distribution_matches_oracle():
    for n in range(8):
        for j in range(3):
            tally = Counter((p.flats, p.lefts) for p in enumerate_paths(n, final_level=j))
            assert marked_distribution(n, j) == dict(tally)


def test_forget_marks():
    N = 9
    marked = build_table(N, marks=True)
    plain = build_table(N)
    assert marked.forget_marks().rows == plain.rows
    assert marked.count(7, 1) == plain.count(7, 1)
    assert marked.layer_counts(6, 0) == plain.layer_counts(6, 0)


def test_marked_entry_by_layer():
    table = build_table(3, marks=True)
    assert table.marked_entry(3, 0, Layer.K) == {(1, 1): 1}
    assert table.marked_entry(3, 9, Layer.K) == {}


@pytest.mark.parametrize(
    "n, at_most, expected",
    [
        (0, (1,), Fraction(0)),
        (1, (1, 1), Fraction(0)),
        (2, (1, 2, 2), Fraction(1, 2)),
        (3, (1, 5, 5, 5), Fraction(4, 5)),
    ],
)
def test_small_height_profiles(n, at_most, expected):
    profile = height_distribution(n)
    assert profile.at_most == at_most
    assert profile.expected_height == expected


def test_height_profile_matches_oracle():
    n = 9
    profile = height_distribution(n)
    heights = Counter(p.height for p in enumerate_paths(n, final_level=0))
    assert profile.total == sum(heights.values())
    assert [profile.exactly(h) for h in range(n + 1)] == [heights[h] for h in range(n + 1)]
    mean = Fraction(sum(h * c for h, c in heights.items()), profile.total)
    assert profile.expected_height == mean


def test_parallel_height_profile_matches_serial():
    assert height_distribution(14, workers=4) == height_distribution(14)


def test_height_profile_rejects_negative_length():
    with pytest.raises(ValueError):
        height_distribution(-2)


def test_layer_counts_without_table():
    assert layer_counts(3, 0) == LayerCounts(0, 2, 2, 1)
    assert layer_counts(5, 1) == build_table(5).layer_counts(5, 1)
    assert layer_counts(2, 5) == LayerCounts(0, 0, 0, 0)


@pytest.fixture(scope="module")
def long_table():
    return build_table(48)


@pytest.mark.parametrize("j", range(13))
def test_table_matches_closed_forms(long_table, j):
    N = long_table.N
    assert [long_table.count(n, j) for n in range(N + 1)] == gf_level(j, N).integer_coefficients()
    for layer in Layer:
        expected = gf_layer_level(layer, j, N).integer_coefficients()
        assert [long_table.entry(n, j, layer) for n in range(N + 1)] == expected
