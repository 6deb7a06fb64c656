import numpy as np
import pytest

from conftest import random_nodes
from modules.analytic import Analytic, TaylorSeries
from modules.blaschke import Blaschke, BlaschkeProduct, NodeSet
from modules.model_space import KernelSpec, ModelSpace, evaluate_rows, metric_weights, powers
from modules.module import DomainError, NumericalError


def test_disc_grid():
    grid = ModelSpace.disc_grid()
    assert grid.shape == (20 * 512,)
    assert np.max(np.abs(grid)) < 1


def test_malmquist_orthonormality(rng):
    for _ in range(100):
        sigma = random_nodes(rng, int(rng.integers(1, 13)), 0.95, multiplicities=True)
        E = ModelSpace.malmquist_basis(sigma).coefficients
        gram = E.conj() @ E.T
        assert np.max(np.abs(gram - np.eye(sigma.n))) <= 1e-10


def test_malmquist_basis_rejects_small_cap():
    sigma = NodeSet.single(0.5, 3)
    with pytest.raises(DomainError):
        ModelSpace.malmquist_basis(sigma, 10)


def test_malmquist_basis_of_origin_is_monomials():
    basis = ModelSpace.malmquist_basis(NodeSet.single(0, 3))
    assert np.allclose(basis.coefficients[:, :3], np.diag([1, -1, 1]))
    assert len(basis.basis) == 3


def test_malmquist_eval_matches_coefficients(rng):
    sigma = random_nodes(rng, 5, 0.8, multiplicities=True)
    basis = ModelSpace.malmquist_basis(sigma)
    z = np.array([0.1, -0.3 + 0.2j, 0.6j])

    values = evaluate_rows(basis.coefficients, z)
    for k in range(sigma.n):
        assert np.allclose(ModelSpace.malmquist_eval(sigma, k, z), values[k], atol=1e-12)


def test_malmquist_functions_vanish_on_earlier_nodes():
    sigma = NodeSet(((0.3, 1), (-0.5j, 1)))
    assert abs(ModelSpace.malmquist_eval(sigma, 1, 0.3)) < 1e-15

    with pytest.raises(DomainError):
        ModelSpace.malmquist_eval(sigma, 2, 0.0)


def test_projected_szego_closed_form_matches_trace(rng):
    for _ in range(100):
        sigma = random_nodes(rng, int(rng.integers(1, 8)), 0.9, multiplicities=True)
        B = BlaschkeProduct(sigma)
        basis = ModelSpace.malmquist_basis(sigma)
        z = 0.9 * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())

        szego = TaylorSeries(powers(np.conj(z), basis.degree_cap + 1), basis.degree_cap, False)
        projected = ModelSpace.project_trace(szego, basis)
        closed = ModelSpace.projected_szego_closed_form(B, z, basis.degree_cap)

        assert np.max(np.abs(projected.coeffs - closed.coeffs)) <= 1e-9
        assert ModelSpace.projected_szego_norm(B, z) == pytest.approx(np.linalg.norm(closed.coeffs), abs=1e-9)


def test_projected_szego_norm_domain():
    B = BlaschkeProduct(NodeSet.single(0.2, 1))
    with pytest.raises(DomainError):
        ModelSpace.projected_szego_norm(B, 1.0)


@pytest.mark.parametrize("alpha", [0.0, -0.25, -0.5, -1.0])
def test_reproducing_identity(alpha):
    spec = KernelSpec(alpha)
    lam = 0.4 - 0.3j
    D = 256

    f = TaylorSeries.from_coeffs([1, -2j, 0.5, 3], D)
    kernel = ModelSpace.reproducing_kernel(spec, lam, D)

    assert Analytic.weighted_pairing(f, kernel, alpha) == pytest.approx(Analytic.evaluate(f, lam))


def test_bergman_kernel_coefficients():
    lam = 0.5j
    kernel = ModelSpace.reproducing_kernel(KernelSpec(-0.5), lam, 8)
    k = np.arange(9)
    assert np.allclose(kernel.coeffs, (k + 1) * np.conj(lam) ** k)


def test_kernel_spec_range():
    with pytest.raises(DomainError):
        KernelSpec(0.5)


def test_derivative_kernel_reproduces_derivative():
    spec = KernelSpec(-0.5)
    lam = 0.3 + 0.1j
    D = 256

    f = TaylorSeries.from_coeffs([1, 2, -1, 0.5], D)
    kernel = TaylorSeries(ModelSpace.derivative_kernel(spec, lam, 1, D), D, False)
    slope = Analytic.evaluate(Analytic.derivative(f), lam)

    assert Analytic.weighted_pairing(f, kernel, -0.5) == pytest.approx(slope)


def test_gram_schmidt_kernels_orthonormal():
    sigma = NodeSet(((0.3, 2), (-0.2, 1)))
    spec = KernelSpec(-0.5)
    rows = np.array([u.coeffs for u in ModelSpace.gram_schmidt_kernels(sigma, spec)])
    metric = metric_weights(-0.5, rows.shape[1] - 1)

    gram = (rows.conj() * metric) @ rows.T
    assert np.max(np.abs(gram - np.eye(3))) < 1e-10


def test_gram_schmidt_detects_dependency():
    sigma = NodeSet(((0.3, 1), (0.3 + 1e-14, 1)))
    with pytest.raises(NumericalError, match="numerically dependent"):
        ModelSpace.gram_schmidt_kernels(sigma, KernelSpec(0))


def test_weighted_model_basis_spans_kernels():
    sigma = NodeSet(((0.3, 2), (-0.2j, 1)))
    spec = KernelSpec(-0.5)
    D = ModelSpace.degree_cap_for(sigma, extra=2)

    U = ModelSpace.weighted_model_basis(sigma, spec, D)
    metric = metric_weights(-0.5, D)
    assert np.max(np.abs((U.conj() * metric) @ U.T - np.eye(3))) < 1e-10

    for kernel in ModelSpace.gram_schmidt_kernels(sigma, spec, D):
        coordinates = (U.conj() * metric) @ kernel.coeffs
        assert np.sum(np.abs(coordinates) ** 2) == pytest.approx(1, abs=1e-10)


def test_weighted_model_basis_in_h2_is_malmquist():
    sigma = NodeSet.single(0.4, 2)
    D = ModelSpace.degree_cap_for(sigma, extra=2)
    U = ModelSpace.weighted_model_basis(sigma, KernelSpec(0), D)
    assert np.allclose(U, ModelSpace.malmquist_basis(sigma, D).coefficients)


def test_projected_kernel_bound_for_origin():
    assert ModelSpace.projected_kernel_bound(NodeSet.single(0, 1), KernelSpec(0)) == pytest.approx(1)
    assert ModelSpace.projected_kernel_bound(NodeSet.single(0, 4), KernelSpec(0)) == pytest.approx(2, rel=1e-12)


def test_projected_kernel_bound_dominates_evaluation():
    sigma = NodeSet.from_points([0.5, -0.3j])
    bound = ModelSpace.projected_kernel_bound(sigma, KernelSpec(-0.5))
    assert bound >= 1 / (1 - 0.25) - 1e-9


def test_project_trace_interpolates_with_multiplicity(rng):
    sigma = NodeSet(((0.4 + 0.1j, 3), (-0.5j, 1), (0.2, 2)))
    basis = ModelSpace.malmquist_basis(sigma)
    f = TaylorSeries.from_coeffs(rng.normal(size=11) + 1j * rng.normal(size=11))
    projected = ModelSpace.project_trace(f, basis)

    for lam, mult in sigma.nodes:
        g, h = f, projected
        for _ in range(mult):
            assert Analytic.evaluate(h, lam) == pytest.approx(Analytic.evaluate(g, lam), abs=1e-8)
            g, h = Analytic.derivative(g), Analytic.derivative(h)


def test_project_trace_is_idempotent(rng):
    sigma = random_nodes(rng, 6, 0.8, multiplicities=True)
    basis = ModelSpace.malmquist_basis(sigma)
    f = TaylorSeries.from_coeffs(rng.normal(size=15) + 1j * rng.normal(size=15))

    once = ModelSpace.project_trace(f, basis)
    twice = ModelSpace.project_trace(once, basis)
    assert np.allclose(twice.coeffs, once.coeffs, atol=1e-12)


def test_projected_szego_norm_grows_toward_boundary(rng):
    sigma = random_nodes(rng, 4, 0.6)
    B = BlaschkeProduct(sigma)
    angles = np.exp(2j * np.pi * np.arange(4096) / 4096)

    sups = [np.max(ModelSpace.projected_szego_norm(B, rho * angles)) for rho in (0.3, 0.6, 0.9, 0.99, 0.999, 0.99999)]
    assert all(a <= b * (1 + 1e-5) for a, b in zip(sups, sups[1:]))

    boundary = np.sqrt(np.max(np.abs(Blaschke.boundary_derivative(B, angles))))
    assert sups[-1] == pytest.approx(boundary, rel=1e-3)
    assert ModelSpace.projected_kernel_bound(sigma, KernelSpec(0)) == pytest.approx(boundary, rel=1e-6)
