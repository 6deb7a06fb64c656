import math

import numpy as np
import pytest

import config
from conftest import random_nodes, separated_nodes
from modules.analytic import Analytic, SpaceSpec, TaylorSeries
from modules.blaschke import NodeSet
from modules.bounds import Bounds
from modules.model_space import ModelSpace
from modules.module import DomainError, InputError, UnsupportedSpaceError
from modules.solvers import PickProblem, Solvers

GOLDEN = (1 + math.sqrt(5)) / 2


def test_schur_anchor():
    f = TaylorSeries.from_coeffs([1, 1])
    assert Solvers.quotient_norm(f, NodeSet.single(0, 2)) == pytest.approx(GOLDEN, abs=1e-9)
    assert Solvers.cs_value([1, 1]) == pytest.approx(GOLDEN, abs=1e-12)


def test_quotient_agrees_with_schur(rng):
    for _ in range(100):
        n = int(rng.integers(1, 11))
        degree = int(rng.integers(0, 2 * n))
        coeffs = rng.standard_normal(degree + 1) + 1j * rng.standard_normal(degree + 1)

        value = Solvers.quotient_norm(TaylorSeries.from_coeffs(coeffs), NodeSet.single(0, n))
        assert value == pytest.approx(Solvers.cs_value(coeffs[:n]), abs=1e-10)


def test_quotient_of_constant():
    sigma = NodeSet.from_points([0.5, -0.2j])
    assert Solvers.quotient_norm(TaylorSeries.from_coeffs([-3]), sigma) == pytest.approx(3)


def test_quotient_of_blaschke_multiple_vanishes():
    sigma = NodeSet(((0.4, 2), (-0.1j, 1)))
    coeffs = np.polynomial.polynomial.polyfromroots([0.4, 0.4, -0.1j, 0.2])
    assert Solvers.quotient_norm(TaylorSeries.from_coeffs(coeffs), sigma) < 1e-9


def test_compression_needs_degree_room():
    basis = ModelSpace.malmquist_basis(NodeSet.single(0, 2))
    f = TaylorSeries.from_coeffs(np.ones(basis.degree_cap))
    with pytest.raises(DomainError):
        Solvers.compression_matrix(f, basis)


def test_compression_of_constant_is_scaled_identity():
    basis = ModelSpace.malmquist_basis(NodeSet.from_points([0.3, 0.6j]))
    matrix = Solvers.compression_matrix(TaylorSeries.from_coeffs([2]), basis)
    assert np.allclose(matrix.entries, 2 * np.eye(2), atol=1e-10)


def test_pick_anchor(rng):
    for _ in range(200):
        n = int(rng.integers(1, 9))
        sigma = separated_nodes(rng, n, r_max=0.6)
        f = TaylorSeries.from_coeffs(rng.standard_normal(4) + 1j * rng.standard_normal(4))
        values = np.polynomial.polynomial.polyval(sigma.flat, f.coeffs)

        value = Solvers.np_value(PickProblem.from_sigma(sigma, values), 1e-8)
        assert value == pytest.approx(Solvers.quotient_norm(f, sigma), rel=1e-6, abs=1e-6)


def test_pencil_matches_bisection(rng):
    for _ in range(50):
        sigma = separated_nodes(rng, int(rng.integers(2, 7)))
        values = np.exp(2j * np.pi * rng.uniform(size=sigma.n))
        prob = PickProblem.from_sigma(sigma, values)

        assert Solvers.np_pencil(prob) == pytest.approx(Solvers.np_value(prob, 1e-10), rel=1e-6)


def test_pick_single_node_is_modulus():
    prob = PickProblem([0.5], [2 - 1j])
    assert Solvers.np_value(prob) == pytest.approx(abs(2 - 1j))


def test_pick_matrix_is_hermitian():
    prob = PickProblem([0.1, 0.5j, -0.3], [1, 1j, 0.5])
    matrix = Solvers.pick_matrix(prob, 2.0)
    assert np.allclose(matrix, matrix.conj().T)


def test_pick_rejects_bad_input():
    with pytest.raises(InputError):
        Solvers.np_value(PickProblem([0.1], [1]), 0)
    with pytest.raises(DomainError, match="distinct"):
        PickProblem([0.1, 0.1], [1, 2])
    with pytest.raises(DomainError):
        PickProblem([0.1, 0.2], [1])
    with pytest.raises(DomainError):
        PickProblem.from_sigma(NodeSet.single(0.1, 2), [1, 2])


def test_estimate_single_origin():
    result = Solvers.c_sigma_estimate(NodeSet.single(0, 1), SpaceSpec.hardy(2), budget=32)
    assert result.value == pytest.approx(1, abs=1e-9)
    assert result.witness is not None


def test_estimate_between_evaluation_and_upper_bound(rng):
    sigma = separated_nodes(rng, 4)
    result = Solvers.c_sigma_estimate(sigma, SpaceSpec.hardy(2), budget=128, seed=3)

    moduli = np.abs(sigma.flat)
    assert result.value >= np.max(1 / np.sqrt(1 - moduli ** 2)) - 1e-9
    assert result.value <= np.sqrt(np.sum((1 + moduli) / (1 - moduli))) + 1e-9


def test_estimate_witness_attains_value():
    sigma = NodeSet.single(-0.5, 3)
    result = Solvers.c_sigma_estimate(sigma, SpaceSpec.hardy(2), budget=64)

    assert np.linalg.norm(result.witness.coeffs) == pytest.approx(1, abs=1e-9)
    assert Solvers.quotient_norm(result.witness, sigma) == pytest.approx(result.value, rel=1e-8)


def test_estimate_bergman_multiplicity():
    sigma = NodeSet.single(-0.5, 6)
    result = Solvers.c_sigma_estimate(sigma, SpaceSpec.weighted(-0.5), budget=64)
    assert result.value >= 1 / (1 - 0.25) - 1e-9


def test_estimate_even_hardy():
    result = Solvers.c_sigma_estimate(NodeSet.single(0, 1), SpaceSpec.hardy(4), budget=8)
    assert result.value == pytest.approx(1, abs=1e-9)


@pytest.mark.parametrize("space", ["h1", "hp:3", "hinf"])
def test_estimate_unsupported(space):
    with pytest.raises(UnsupportedSpaceError):
        Solvers.c_sigma_estimate(NodeSet.single(0, 1), SpaceSpec.parse(space), budget=8)


def test_estimate_is_deterministic_across_threads():
    sigma = NodeSet.from_points([0.5, -0.3 + 0.2j, 0.1j])

    config.set_threads(1)
    serial = Solvers.c_sigma_estimate(sigma, SpaceSpec.hardy(2), budget=64, seed=7)
    config.set_threads(4)
    pooled = Solvers.c_sigma_estimate(sigma, SpaceSpec.hardy(2), budget=64, seed=7)

    assert serial.value == pooled.value
    assert np.array_equal(serial.witness.coeffs, pooled.witness.coeffs)


def test_carleson_single_node():
    assert Solvers.carleson_estimate(NodeSet.single(0.7, 1)).value == 1.0


def test_carleson_at_least_one():
    sigma = NodeSet.from_points([0.5, -0.5])
    result = Solvers.carleson_estimate(sigma, budget=64, seed=1)
    assert result.value >= 1 - 1e-12
    assert result.details["phases"][0] == 0.0


def test_carleson_needs_distinct_nodes():
    with pytest.raises(DomainError):
        Solvers.carleson_estimate(NodeSet.single(0.5, 2))


def test_interpolation_sandwich(rng):
    for _ in range(100):
        sigma = separated_nodes(rng, int(rng.integers(1, 5)))
        report = Solvers.interpolation_sandwich(sigma, budget=32, seed=0)
        assert report["evaluation"] <= report["estimate"] + 1e-6


def test_cs_value_identity():
    assert Solvers.cs_value([1, 0, 0]) == pytest.approx(1)
    assert Solvers.cs_value([0, 2]) == pytest.approx(2)


def random_symbol(rng, degree=6) -> TaylorSeries:
    return TaylorSeries.from_coeffs(rng.standard_normal(degree + 1) + 1j * rng.standard_normal(degree + 1))


def test_quotient_is_homogeneous(rng):
    for _ in range(10):
        sigma = random_nodes(rng, int(rng.integers(1, 6)), 0.8, multiplicities=True)
        f = random_symbol(rng)
        c = complex(rng.standard_normal(), rng.standard_normal())

        scaled = Solvers.quotient_norm(TaylorSeries.from_coeffs(c * f.coeffs), sigma)
        assert scaled == pytest.approx(abs(c) * Solvers.quotient_norm(f, sigma), rel=1e-9)


def test_quotient_grows_with_nodes(rng):
    for _ in range(10):
        sigma = random_nodes(rng, 6, 0.8, multiplicities=True)
        subset = NodeSet(sigma.nodes[:max(1, len(sigma.nodes) - 1)])
        f = random_symbol(rng)

        assert Solvers.quotient_norm(f, subset) <= Solvers.quotient_norm(f, sigma) + 1e-9


def test_quotient_is_contractive(rng):
    for _ in range(10):
        sigma = random_nodes(rng, int(rng.integers(1, 6)), 0.8, multiplicities=True)
        f = random_symbol(rng)

        assert Solvers.quotient_norm(f, sigma) <= Analytic.space_norm(f, SpaceSpec.hardy(math.inf)) + 1e-9


@pytest.mark.parametrize("N", [1, 2])
@pytest.mark.parametrize("n, r", [(2, 0.3), (4, 0.5), (3, 0.7)])
def test_quotient_is_mobius_invariant(N, n, r):
    witness = Bounds.lower_witness(n, r, N)

    composed = Solvers.quotient_norm(witness.psi, NodeSet.single(0, n))
    direct = Solvers.quotient_norm(witness.Psi, NodeSet.single(-r, n))
    assert composed == pytest.approx(direct, rel=1e-7)


def test_carleson_grows_as_nodes_merge():
    values = [Solvers.carleson_estimate(NodeSet.from_points([-t, t]), budget=64).value for t in (0.5, 0.2, 0.05)]

    assert values[0] < values[1] < values[2]
    assert values[-1] >= 10
