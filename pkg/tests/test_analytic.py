import math
from fractions import Fraction

import numpy as np
import pytest

from modules.analytic import Analytic, SpaceSpec, TaylorSeries, parse_complex_list
from modules.module import DomainError, InputError, NotOuterSafeError


def test_degree_cap_defaults():
    assert Analytic.default_degree_cap(1) == 256
    assert Analytic.default_degree_cap(100) == 800


def test_degree_cap_covers_coefficient_tail():
    n, r = 8, 0.9
    D = Analytic.default_degree_cap(n, r)

    assert D > 256
    assert math.comb(D + n, n) * r ** D <= 1e-16


def test_taylor_series_padding_and_truncation():
    f = TaylorSeries.from_coeffs([1, 2], 4)
    assert list(f.coeffs) == [1, 2, 0, 0, 0]
    assert f.exact
    assert f.degree == 1

    g = TaylorSeries.from_coeffs([1, 2, 3], 1)
    assert not g.exact
    assert list(g.coeffs) == [1, 2]


def test_taylor_series_is_read_only():
    f = TaylorSeries.from_coeffs([1, 2])
    with pytest.raises(ValueError):
        f.coeffs[0] = 5


def test_parse_complex_list_formats():
    values = parse_complex_list([1, [0, 1], {"re": 2, "im": -1}])
    assert values == [1, 1j, 2 - 1j]

    with pytest.raises(InputError):
        parse_complex_list([])
    with pytest.raises(InputError):
        parse_complex_list(["x"])


@pytest.mark.parametrize("entry", [{"re": None}, {"re": "abc"}, {"re": 1, "im": "2"}, [1, None], True, float("nan"), [0, float("inf")], {"re": float("-inf")}])
def test_parse_complex_list_rejects_entry(entry):
    with pytest.raises(InputError):
        parse_complex_list([entry])


@pytest.mark.parametrize("text, label", [
    ("h2", "h2"), ("H1", "h1"), ("hinf", "hinf"), ("hp:4", "hp:4"),
    ("bergman", "bergman"), ("w2:-0.5", "bergman"), ("w2:0", "w2:0"), ("w2:-1", "w2:-1"),
])
def test_space_labels(text, label):
    assert SpaceSpec.parse(text).label == label


@pytest.mark.parametrize("text", ["h0.5", "hp:0.5", "w2:0.5", "l2", "w2:x"])
def test_space_parse_rejects(text):
    with pytest.raises(InputError):
        SpaceSpec.parse(text)


def test_space_flags():
    assert SpaceSpec.parse("h2").is_hilbert
    assert SpaceSpec.parse("bergman").is_hilbert
    assert not SpaceSpec.parse("hp:4").is_hilbert
    assert SpaceSpec.parse("hp:4").is_even_hardy
    assert not SpaceSpec.parse("hp:3").is_even_hardy
    assert SpaceSpec.parse("h2").alpha == 0


def test_space_norms():
    f = TaylorSeries.from_coeffs([3, 4])
    assert Analytic.space_norm(f, SpaceSpec.hardy(2)) == pytest.approx(5)

    g = TaylorSeries.from_coeffs([1, 1])
    assert Analytic.space_norm(g, SpaceSpec.weighted(-0.5)) == pytest.approx(math.sqrt(1.5))
    assert Analytic.space_norm(g, SpaceSpec.hardy(math.inf)) == pytest.approx(2)
    # |1 + z|^4 = |1 + 2z + z^2|^2 on the circle
    assert Analytic.space_norm(g, SpaceSpec.hardy(4)) == pytest.approx(6 ** 0.25)
    assert Analytic.space_norm(g, SpaceSpec.hardy(1)) == pytest.approx(4 / math.pi, rel=1e-5)


def test_space_norm_needs_exact_polynomial_for_hp():
    f = TaylorSeries([1, 0.5], 1, False)
    with pytest.raises(DomainError):
        Analytic.space_norm(f, SpaceSpec.hardy(4))


def test_pairings():
    h = TaylorSeries.from_coeffs([1, 2j])
    g = TaylorSeries.from_coeffs([1, 1, 1])

    assert Analytic.cauchy_pairing(h, g) == pytest.approx(1 + 2j)
    assert Analytic.weighted_pairing(h, g, -0.5) == pytest.approx(1 + 1j)


def test_evaluate_and_derivative():
    f = TaylorSeries.from_coeffs([1, 2, 3])
    assert Analytic.evaluate(f, 0.5) == pytest.approx(1 + 1 + 0.75)
    assert list(Analytic.derivative(f).coeffs) == [2, 6]

    with pytest.raises(DomainError):
        Analytic.evaluate(f, 1.0)


def test_boundary_values_below_nyquist():
    f = TaylorSeries.from_coeffs([1, 1, 1, 1])
    with pytest.raises(RuntimeError):
        Analytic.boundary_values(f, 2)

    values = Analytic.boundary_values(f, 8)
    assert values[0] == pytest.approx(4)


@pytest.mark.parametrize("n, m", [(1, 1), (2, 1), (3, 2), (4, 2), (5, 3), (64, 32)])
def test_fejer_order(n, m):
    assert Analytic.fejer_order(n) == m


def test_fejer_multiplier_constant_case():
    assert Analytic.fejer_multiplier(1).coeffs[0] == pytest.approx(1.5)


def test_fejer_multiplier_at_least_one_up_to_m():
    for n in range(1, 40):
        m = Analytic.fejer_order(n)
        coeffs = Analytic.fejer_multiplier(n).coeffs.real
        assert np.all(coeffs[:m + 1] >= 1 - 1e-12)
        assert np.all(coeffs >= 0)


def test_multiplier_apply():
    f = TaylorSeries.from_coeffs([1, 1, 1])
    mult = TaylorSeries.from_coeffs([2, 3])
    assert list(Analytic.multiplier_apply(f, mult).coeffs) == [2, 3]


def test_outer_safe():
    assert Analytic.is_outer_safe(TaylorSeries.from_coeffs([1, 0.5]))
    assert not Analytic.is_outer_safe(TaylorSeries.from_coeffs([1, 1]))
    assert not Analytic.is_outer_safe(TaylorSeries.from_coeffs([0.5, 1]))


def test_integer_power_is_exact():
    power = Analytic.zero_free_power(TaylorSeries.from_coeffs([1, 0.5]), 2)
    assert power.exact
    assert list(power.coeffs[:3]) == [1, 1, 0.25]


def test_fractional_power_squares_back():
    f = TaylorSeries.from_coeffs([1, 0.5])
    root = Analytic.zero_free_power(f, Fraction(1, 2), 64)
    square = np.convolve(root.coeffs, root.coeffs)[:64]

    expected = np.zeros(64)
    expected[:2] = [1, 0.5]
    assert np.max(np.abs(square - expected)) < 1e-9


def test_fractional_power_principal_branch():
    f = TaylorSeries.from_coeffs([4, 1])
    root = Analytic.zero_free_power(f, Fraction(1, 2), 32)
    assert root.coeffs[0] == pytest.approx(2)


def test_power_rejects_zero_in_disc():
    with pytest.raises(NotOuterSafeError, match="not outer-safe"):
        Analytic.zero_free_power(TaylorSeries.from_coeffs([1, 2]), Fraction(1, 2))


def random_polynomial(rng, degree=8) -> TaylorSeries:
    return TaylorSeries.from_coeffs(rng.normal(size=degree + 1) + 1j * rng.normal(size=degree + 1))


def test_parseval(rng):
    for _ in range(10):
        f = random_polynomial(rng, int(rng.integers(0, 20)))
        coefficient_norm = np.sqrt(np.sum(np.abs(f.coeffs) ** 2))

        assert Analytic.space_norm(f, SpaceSpec.hardy(2)) == pytest.approx(coefficient_norm, rel=1e-12)
        assert np.sqrt(np.mean(np.abs(Analytic.boundary_values(f)) ** 2)) == pytest.approx(coefficient_norm, rel=1e-12)


def test_weighted_norm_monotone_in_alpha(rng):
    alphas = [-1, -0.75, -0.5, -0.25, 0]

    for _ in range(10):
        f = random_polynomial(rng)
        norms = [Analytic.space_norm(f, SpaceSpec.weighted(alpha)) for alpha in alphas]
        assert all(a < b for a, b in zip(norms, norms[1:]))


def test_hardy_norms_ordered_in_p(rng):
    exponents = [1, 1.5, 2, 3, 4, math.inf]

    for _ in range(10):
        f = random_polynomial(rng)
        norms = [Analytic.space_norm(f, SpaceSpec.hardy(p)) for p in exponents]
        assert all(a <= b * (1 + 1e-12) for a, b in zip(norms, norms[1:]))


def test_derivative_is_linear(rng):
    f, g = random_polynomial(rng), random_polynomial(rng)
    a, b = 2 - 1j, 0.5j

    combined = Analytic.derivative(TaylorSeries.from_coeffs(a * f.coeffs + b * g.coeffs))
    expected = a * Analytic.derivative(f).coeffs + b * Analytic.derivative(g).coeffs
    assert np.allclose(combined.coeffs, expected)
