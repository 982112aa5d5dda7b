import importlib
from fractions import Fraction

import pytest
from pydantic import ValidationError

from src import closedforms
from src.closedforms import (
    bounded_height_form,
    gf_bounded,
    gf_bounded_limit,
    gf_by_name,
    gf_excess_height,
    gf_layer0_constants,
    gf_layer_level,
    gf_level,
    gf_marked,
    gf_sm,
    gf_total,
    gf_total_closed,
    kernel_cancellation_check,
    kernel_roots,
    radicand_factorisation_check,
    solve_bounded_system,
)
from src.dpcount import return_counts
from src.errors import SeriesError
from src.paths import Layer, enumerate_paths, tally_paths
from src.series import TruncatedSeries, mark_poly
from tests.tables import LEVEL_COUNTS, RETURN_COUNTS, TOTAL_COUNTS


def poly(coeffs, precision):
    return TruncatedSeries.polynomial(coeffs, precision)


def test_kernel_roots_leading_terms():
    kr = kernel_roots(10)
    assert kr.u2.valuation == 1
    assert kr.u2.coeff(1) == 2
    assert kr.u1.valuation == -1
    assert kr.u1.coeff(-1) == 1
    assert kr.W.coeff(1) == -2


def test_kernel_roots_vieta():
    kr = kernel_roots(12)
    assert (kr.u1 * kr.u2).agrees_with(poly([2, 0, -1], 12))
    p_over_z = poly([1, -1, 1, 1], 13).shift(-1)
    assert (kr.u1 + kr.u2).agrees_with(p_over_z)


def test_omega_square():
    kr = kernel_roots(12)
    omega = poly([1, 1], 13) * kr.W
    assert (omega * omega).agrees_with(poly([1, -2, -5, 0, 3, 2, 1], 13))


def test_radicand_factorisation():
    assert radicand_factorisation_check(20)


def test_gf_sm(return_counts):
    assert gf_sm(11).integer_coefficients() == return_counts
    assert gf_sm(0).coefficients() == [1]


def test_gf_sm_matches_oracle():
    sm = gf_sm(10).integer_coefficients()
    assert sm == [len(enumerate_paths(n, final_level=0)) for n in range(11)]


@pytest.mark.parametrize("j", sorted(LEVEL_COUNTS))
def test_gf_level_known_lists(j):
    expected = LEVEL_COUNTS[j]
    series = gf_level(j, len(expected) - 1)
    assert series.integer_coefficients() == expected
    assert series.valuation == j


def test_gf_level_zero_is_return_series():
    assert gf_level(0, 20) == gf_sm(20)


def test_gf_level_rejects_negative():
    with pytest.raises(ValueError):
        gf_level(-1, 5)


@pytest.mark.parametrize("j", range(4))
def test_layers_sum_to_level(j):
    total = sum((gf_layer_level(layer, j, 12) for layer in Layer), poly([], 13))
    assert total == gf_level(j, 12)


def test_layer_examples():
    assert gf_layer_level(Layer.H, 0, 5).coeff(1) == 1
    assert gf_layer_level(Layer.F, 1, 5).coeff(1) == 1
    assert gf_layer_level(Layer.K, 0, 5).coeff(3) == 1


def test_layer_zero_constants():
    g0, h0, k0 = gf_layer0_constants(12)
    assert 1 + g0 + h0 + k0 == gf_sm(12)
    assert h0.coeff(1) == 1
    assert g0.coeff(2) == 1
    assert k0.coeff(3) == 1


def test_gf_total(total_counts):
    assert gf_total(10).integer_coefficients() == total_counts
    assert gf_total_closed(10).integer_coefficients() == total_counts


def test_gf_total_is_sum_over_levels():
    N = 14
    by_level = sum((gf_level(j, N) for j in range(N + 1)), poly([], N + 1))
    assert by_level == gf_total(N)


def test_gf_marked_first_terms():
    marked = gf_marked(6)
    assert marked.coeff(0) == 1
    assert marked.coeff(1) == mark_poly([((1, 0), 1)])
    assert marked.coeff(2) == mark_poly([((2, 0), 1), ((0, 0), 1)])
    assert marked.coeff(3) == mark_poly([((1, 1), 1), ((1, 0), 3), ((3, 0), 1)])
    assert marked.coeff(4) == mark_poly(
        [((0, 0), 2), ((2, 0), 6), ((0, 1), 1), ((2, 1), 3), ((4, 0), 1)]
    )


def test_gf_marked_forgetting_marks():
    assert gf_marked(10).substitute(1, 1) == gf_sm(10)


def test_gf_marked_without_lefts_matches_oracle():
    N = 14
    no_lefts = gf_marked(N).substitute(1, 0).integer_coefficients()
    brute = [0] * (N + 1)
    for (n, level, _, _, _, lefts), c in tally_paths(N).items():
        if level == 0 and lefts == 0:
            brute[n] += c
    assert no_lefts == brute


def test_marked_degrees_bounded_by_length():
    marked = gf_marked(8)
    for n in range(9):
        for (a, b), _ in marked.coeff(n).items():
            assert a + b <= n


def test_gf_bounded_height_zero():
    assert gf_bounded(0, 15).integer_coefficients() == [1] * 16


def test_gf_bounded_height_one():
    assert gf_bounded(1, 6).integer_coefficients()[:5] == [1, 1, 2, 5, 11]


def test_gf_bounded_examples():
    assert gf_bounded(5, 10).coeff(5) == 35
    assert gf_bounded(2, 8).integer_coefficients()[:7] == [1, 1, 2, 5, 13, 35, 93]
    assert gf_bounded(2, 12).integer_coefficients() == return_counts(12, height_cap=2)


@pytest.mark.parametrize("H", range(9))
def test_bounded_methods_agree_with_capped_dp(H):
    N = 30
    dp = return_counts(N, height_cap=H)
    for method in ("closed", "recurrence", "system"):
        assert gf_bounded(H, N, method=method).integer_coefficients() == dp


def test_gf_bounded_unknown_method():
    with pytest.raises(SeriesError):
        gf_bounded(2, 5, method="guess")


def test_gf_bounded_monotone_and_converging():
    N = 14
    sm = gf_sm(N).integer_coefficients()
    previous = None
    for H in range(N + 1):
        current = gf_bounded(H, N).integer_coefficients()
        if previous is not None:
            assert all(a <= b for a, b in zip(previous, current))
        assert current[H] == sm[H]
        previous = current


def test_bounded_limit_is_return_series():
    assert gf_bounded_limit(20) == gf_sm(20)


def test_bounded_form_identities():
    form = bounded_height_form(12)
    c = poly([-1, 3, 1, 1], 20)
    assert (form.Ao + form.Bo).agrees_with(2 * c * poly([1, 1], 20))
    assert (form.Au + form.Bu).agrees_with(2 * poly([1, 0, -1], 20) * c)
    p = poly([1, -1, 1, 1], 20)
    assert (form.lambda_plus + form.lambda_minus).agrees_with(p)
    assert (form.lambda_plus * form.lambda_minus).agrees_with(poly([0, 0, 2, 0, -1], 20))


def test_system_determinant_for_small_heights():
    _, det0 = solve_bounded_system(0, 10)
    assert det0.agrees_with(poly([1, -1], 11))
    _, det1 = solve_bounded_system(1, 10)
    assert det1.agrees_with(poly([1, -2, 0, 0, -1], 11))


def test_excess_height():
    assert gf_excess_height(0, 6).coeff(2) == 1
    N = 8
    assert gf_excess_height(N, N).integer_coefficients() == [0] * (N + 1)


def test_excess_height_sums_to_total_height():
    n = 7
    total_height = sum(p.height for p in enumerate_paths(n, final_level=0))
    assert sum(gf_excess_height(h, n).coeff(n) for h in range(n + 1)) == total_height


@pytest.mark.parametrize("j", range(7))
def test_kernel_cancellation(j):
    assert kernel_cancellation_check(j, 24) is None


def test_gf_by_name():
    assert gf_by_name("sm", 11).integer_coefficients() == RETURN_COUNTS
    assert gf_by_name("total", 10).integer_coefficients() == TOTAL_COUNTS
    assert gf_by_name("level:1", 6).coeff(6) == 102
    assert gf_by_name("bounded:0", 4).integer_coefficients() == [1] * 5
    assert gf_by_name("layer:h:0", 5) == gf_layer_level(Layer.H, 0, 5)
    assert gf_by_name("marked", 4).coeff(3).substitute(1, 1) == Fraction(5)


@pytest.mark.parametrize("name", ["nope", "level:x", "layer:Q:1", "bounded"])
def test_gf_by_name_rejects_bad_names(name):
    with pytest.raises(ValueError):
        gf_by_name(name, 5)


def test_settings_are_read_on_first_use(monkeypatch):
    monkeypatch.setenv("SKM_KERNEL_CACHE_SIZE", "0")
    module = importlib.reload(closedforms)
    with pytest.raises(ValidationError):
        module.kernel_roots(5)
    monkeypatch.delenv("SKM_KERNEL_CACHE_SIZE")
    assert module.gf_sm(3).integer_coefficients() == [1, 1, 2, 5]
